use std::fs;
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use scu::hamsim::{
    cts_schedule, enhanced_pf_schedule, CtsModel, EnhancedModel, ProductFormula, RemainderSeries, SimulationSchedule,
    StepDraw, StepPair,
};
use scu::pauli::PauliSum;
use scu::resources::{default_expansion_order, pf_steps_for_error, tfim_hamiltonian, Algorithm, PF2_LAYERED_ORDER};

use crate::output::{to_json, OutputDir};
use crate::{load_section, CliError, CommonArgs};

/// Largest step count written out as an explicit schedule.
pub const MAX_SCHEDULE_STEPS: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompileConfig {
    /// Hamiltonian file in the Pauli-sum text format.
    pub hamiltonian: Option<PathBuf>,
    /// Use an open-chain TFIM of this size instead of a file.
    pub tfim_n: Option<usize>,
    pub j: f64,
    pub h: f64,
    pub algorithm: Algorithm,
    pub t: f64,
    pub r: Option<u64>,
    pub epsilon: Option<f64>,
    pub lambda_max: Option<f64>,
    /// Full-expansion truncation order; algorithm default when absent.
    pub order: Option<u32>,
    pub seed: u64,
}

impl Default for CompileConfig {
    fn default() -> Self {
        CompileConfig {
            hamiltonian: None,
            tfim_n: None,
            j: 1.0,
            h: 1.0,
            algorithm: Algorithm::Cts,
            t: 1.0,
            r: None,
            epsilon: None,
            lambda_max: None,
            order: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CompileArgs {
    #[arg(long)]
    pub hamiltonian: Option<PathBuf>,
    #[arg(long)]
    pub tfim_n: Option<usize>,
    #[arg(long)]
    pub j: Option<f64>,
    #[arg(long)]
    pub h: Option<f64>,
    /// cts, pf1, pf2, pf1_enhanced or pf2_enhanced.
    #[arg(long)]
    pub algorithm: Option<Algorithm>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Number of steps.
    #[arg(long)]
    pub r: Option<u64>,
    /// Choose r from a spectral-error target.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Choose r from an overhead bound.
    #[arg(long)]
    pub lambda_max: Option<f64>,
    #[arg(long)]
    pub order: Option<u32>,
    #[command(flatten)]
    pub common: CommonArgs,
}

impl CompileConfig {
    pub fn resolve(args: &CompileArgs) -> Result<Self, CliError> {
        let mut c: CompileConfig = load_section(args.common.config.as_deref(), "compile")?;
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = &args.$field {
                    c.$field = v.clone().into();
                })*
            };
        }
        take!(hamiltonian, tfim_n, j, h, algorithm, t, r, epsilon, lambda_max, order);
        if let Some(s) = args.common.seed {
            c.seed = s;
        }
        if c.order.is_none() {
            c.order = Some(default_expansion_order(c.algorithm));
        }
        Ok(c)
    }

    fn hamiltonian(&self) -> Result<PauliSum, CliError> {
        match (&self.hamiltonian, self.tfim_n) {
            (Some(path), None) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                PauliSum::parse_text(&text).map_err(CliError::config)
            }
            (None, Some(n)) => tfim_hamiltonian(n, self.j, self.h).map_err(CliError::config),
            _ => Err(CliError::Config("give exactly one of --hamiltonian or --tfim-n".into())),
        }
    }
}

enum Model {
    Cts(CtsModel),
    Plain(RemainderSeries),
    Enhanced(EnhancedModel),
}

fn plain_schedule(formula: &ProductFormula, t: f64, r: u64, seed: u64) -> Result<SimulationSchedule, CliError> {
    let tau = t / r as f64;
    let left = formula.gates(tau);
    let right = left.inverse().map_err(CliError::runtime)?;
    Ok(SimulationSchedule {
        algorithm: format!("pf{}", formula.order()),
        n_qubits: formula.n_qubits(),
        t,
        r: r as usize,
        order: formula.order(),
        lambda: 1.0,
        seed,
        steps: (0..r as usize)
            .map(|step| StepPair {
                step,
                left: StepDraw {
                    gates: left.clone(),
                    phase: 0.0,
                },
                right: StepDraw {
                    gates: right.clone(),
                    phase: 0.0,
                },
            })
            .collect(),
    })
}

pub fn compile(config: &CompileConfig) -> Result<SimulationSchedule, CliError> {
    let h = config.hamiltonian()?;
    let m = config.order.unwrap_or_else(|| default_expansion_order(config.algorithm));
    let t = config.t;
    if !t.is_finite() {
        return Err(CliError::Config(format!("time must be finite, got {t}")));
    }
    let model = match config.algorithm {
        Algorithm::Cts => Model::Cts(CtsModel::new(&h, m).map_err(CliError::config)?),
        Algorithm::Pf1 | Algorithm::Pf2 => {
            let p = config.algorithm.pf_order().unwrap_or(1);
            Model::Plain(RemainderSeries::new(&h, p, m).map_err(CliError::config)?)
        }
        Algorithm::Pf1Enhanced => Model::Enhanced(EnhancedModel::new(&h, 1, m, m).map_err(CliError::config)?),
        Algorithm::Pf2Enhanced => {
            Model::Enhanced(EnhancedModel::new(&h, 2, m, m.max(PF2_LAYERED_ORDER)).map_err(CliError::config)?)
        }
        Algorithm::Qdrift => return Err(CliError::Config("qdrift has no schedule compiler; use `estimate`".into())),
    };
    let r = match (config.r, config.epsilon, config.lambda_max) {
        (Some(r), None, None) => {
            if r == 0 {
                return Err(CliError::Config("r must be at least 1".into()));
            }
            r
        }
        (None, Some(eps), None) => match &model {
            Model::Cts(c) => c.steps_for_error(t, eps),
            Model::Plain(rem) => pf_steps_for_error(rem, t, eps),
            Model::Enhanced(e) => e.steps_for_error(t, eps),
        }
        .map_err(CliError::config)?,
        (None, None, Some(lmax)) => match &model {
            Model::Cts(c) => c.steps_for_overhead(t, lmax),
            Model::Enhanced(e) => e.steps_for_overhead(t, lmax),
            Model::Plain(_) => return Err(CliError::Config("plain product formulas have λ = 1; use --r or --epsilon".into())),
        }
        .map_err(CliError::config)?,
        _ => return Err(CliError::Config("give exactly one of --r, --epsilon or --lambda-max".into())),
    };
    if r > MAX_SCHEDULE_STEPS {
        return Err(CliError::Config(format!(
            "r = {r} exceeds the schedule limit of {MAX_SCHEDULE_STEPS} steps; loosen the constraint"
        )));
    }
    match &model {
        Model::Cts(_) => cts_schedule(&h, t, r as usize, m, config.seed).map_err(CliError::runtime),
        Model::Plain(rem) => plain_schedule(rem.formula(), t, r, config.seed),
        Model::Enhanced(e) => enhanced_pf_schedule(e, h.n_qubits(), t, r as usize, config.seed).map_err(CliError::runtime),
    }
}

pub fn run(args: CompileArgs) -> Result<Vec<PathBuf>, CliError> {
    let config = CompileConfig::resolve(&args)?;
    let schedule = compile(&config)?;
    let mut out = OutputDir::create(&args.common.out_dir)?;
    out.write("schedule.json", &to_json(&schedule)?)?;
    out.finish("compile", config.seed, &config, args.common.record_time)
}

use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use scu::resources::{damping_comparison, tfim_sweep, Algorithm, SweepConfig, SweepResult};

use crate::output::{fmt_f64, to_json, Csv, OutputDir};
use crate::{load_section, CliError, CommonArgs};

pub const SWEEP_HEADER: [&str; 9] = [
    "n",
    "t",
    "algorithm",
    "constraint_kind",
    "constraint_value",
    "r",
    "lambda",
    "cnot_count",
    "overhead",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimateConfig {
    pub sizes: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    /// Spectral errors for pf1 and pf2.
    pub epsilon: Vec<f64>,
    /// Diamond-norm errors for qDRIFT.
    pub epsilon_diamond: Vec<f64>,
    /// Overhead bounds for CTS and the enhanced formulas.
    pub lambda_max: Vec<f64>,
    pub j: f64,
    pub h: f64,
    /// Simulation time is `time_factor · n`.
    pub time_factor: f64,
    pub damping_n: usize,
    pub damping_p: Vec<f64>,
    /// Unused by the deterministic sweep; recorded for uniformity.
    pub seed: u64,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        let s = SweepConfig::default();
        EstimateConfig {
            sizes: s.sizes,
            algorithms: s.algorithms,
            epsilon: s.epsilons,
            epsilon_diamond: s.diamond_epsilons,
            lambda_max: s.lambda_maxes,
            j: s.j,
            h: s.h,
            time_factor: s.time_factor,
            damping_n: 8,
            damping_p: vec![0.05, 0.15],
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    /// System sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Even sizes from 4 up to this value (overridden by --sizes).
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Algorithms: qdrift, pf1, pf2, pf1_enhanced, pf2_enhanced, cts.
    #[arg(long, value_delimiter = ',')]
    pub algorithms: Option<Vec<Algorithm>>,
    #[arg(long, value_delimiter = ',')]
    pub epsilon: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub epsilon_diamond: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub lambda_max: Option<Vec<f64>>,
    #[arg(long)]
    pub j: Option<f64>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub time_factor: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

impl EstimateConfig {
    pub fn resolve(args: &EstimateArgs) -> Result<Self, CliError> {
        let mut c: EstimateConfig = load_section(args.common.config.as_deref(), "estimate")?;
        if let Some(m) = args.n_max {
            c.sizes = (4..=m.max(4)).step_by(2).collect();
        }
        macro_rules! take {
            ($($field:ident <- $arg:ident),*) => {
                $(if let Some(v) = &args.$arg {
                    c.$field = v.clone();
                })*
            };
        }
        take!(sizes <- sizes, algorithms <- algorithms, epsilon <- epsilon, epsilon_diamond <- epsilon_diamond,
              lambda_max <- lambda_max, j <- j, h <- h, time_factor <- time_factor);
        if let Some(s) = args.common.seed {
            c.seed = s;
        }
        Ok(c)
    }

    pub fn sweep(&self) -> SweepConfig {
        SweepConfig {
            sizes: self.sizes.clone(),
            algorithms: self.algorithms.clone(),
            epsilons: self.epsilon.clone(),
            diamond_epsilons: self.epsilon_diamond.clone(),
            lambda_maxes: self.lambda_max.clone(),
            j: self.j,
            h: self.h,
            time_factor: self.time_factor,
        }
    }
}

pub fn sweep_csv(res: &SweepResult) -> String {
    let mut csv = Csv::new(&SWEEP_HEADER);
    for r in &res.rows {
        csv.row(&[
            r.n.to_string(),
            fmt_f64(r.t),
            r.algorithm.tag().to_string(),
            r.constraint.kind.tag().to_string(),
            fmt_f64(r.constraint.value),
            r.r.to_string(),
            fmt_f64(r.lambda),
            fmt_f64(r.cnot_count),
            fmt_f64(r.overhead),
        ]);
    }
    csv.into_string()
}

#[derive(Serialize)]
struct FitRow {
    algorithm: Algorithm,
    constraint_kind: &'static str,
    constraint_value: f64,
    prefactor: f64,
    exponent: f64,
    r_squared: f64,
    n_points: usize,
}

#[derive(Serialize)]
struct FailureRow {
    n: usize,
    algorithm: Algorithm,
    constraint_kind: &'static str,
    constraint_value: f64,
    error: String,
}

#[derive(Serialize)]
struct FitSummary {
    fits: Vec<FitRow>,
    failures: Vec<FailureRow>,
}

pub fn fits_json(res: &SweepResult) -> Result<String, CliError> {
    to_json(&FitSummary {
        fits: res
            .fits
            .iter()
            .map(|f| FitRow {
                algorithm: f.algorithm,
                constraint_kind: f.constraint.kind.tag(),
                constraint_value: f.constraint.value,
                prefactor: f.prefactor,
                exponent: f.exponent,
                r_squared: f.r_squared,
                n_points: f.n_points,
            })
            .collect(),
        failures: res
            .failures
            .iter()
            .map(|f| FailureRow {
                n: f.n,
                algorithm: f.algorithm,
                constraint_kind: f.constraint.kind.tag(),
                constraint_value: f.constraint.value,
                error: f.error.clone(),
            })
            .collect(),
    })
}

pub fn run(args: EstimateArgs) -> Result<Vec<PathBuf>, CliError> {
    let config = EstimateConfig::resolve(&args)?;
    let sweep = config.sweep();
    sweep.validate().map_err(CliError::config)?;
    let damping = config
        .damping_p
        .iter()
        .map(|&p| damping_comparison(config.damping_n, p).map_err(CliError::config))
        .collect::<Result<Vec<_>, _>>()?;
    let res = tfim_sweep(&sweep).map_err(CliError::runtime)?;
    let mut out = OutputDir::create(&args.common.out_dir)?;
    out.write("sweep.csv", &sweep_csv(&res))?;
    out.write("sweep_fits.json", &fits_json(&res)?)?;
    out.write("damping_comparison.json", &to_json(&damping)?)?;
    out.finish("estimate", config.seed, &config, args.common.record_time)
}

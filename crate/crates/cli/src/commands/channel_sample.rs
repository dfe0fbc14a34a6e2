use std::fs;
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use scu::channel::{convex_decompose, lambda_term_bound, KrausChannel, TermKind, TermRef};
use scu::dense::projector;
use scu::pauli::PauliSum;
use scu::rng::stream;
use scu::sim::{dense_expectation, exact_channel_apply, scu_estimate, Gate, GateSequence, StateVector};

use crate::output::{fmt_f64, to_json, Csv, OutputDir};
use crate::{load_section, CliError, CommonArgs};

pub const DEFAULT_PRESET: &str = "amplitude_damping(0.15)";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelSampleConfig {
    /// Kraus operators in the Pauli-sum text format, separated by `---` lines.
    pub channel: Option<PathBuf>,
    /// `amplitude_damping(p)` or `identity(n)`.
    pub preset: Option<String>,
    pub samples: usize,
    /// Observable as `;`-separated `<coeff> <pauli>` terms; enables the estimate output.
    pub observable: Option<String>,
    /// Input state: `zero` or `plus`.
    pub prep: String,
    /// Shots per sampled circuit; `0` evaluates each circuit exactly.
    pub shots: usize,
    pub seed: u64,
}

impl Default for ChannelSampleConfig {
    fn default() -> Self {
        ChannelSampleConfig {
            channel: None,
            preset: None,
            samples: 1000,
            observable: None,
            prep: "plus".into(),
            shots: 0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ChannelSampleArgs {
    #[arg(long)]
    pub channel: Option<PathBuf>,
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub observable: Option<String>,
    #[arg(long)]
    pub prep: Option<String>,
    #[arg(long)]
    pub shots: Option<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

impl ChannelSampleConfig {
    pub fn resolve(args: &ChannelSampleArgs) -> Result<Self, CliError> {
        let mut c: ChannelSampleConfig = load_section(args.common.config.as_deref(), "channel-sample")?;
        if args.channel.is_some() {
            c.channel = args.channel.clone();
            c.preset = None;
        }
        if args.preset.is_some() {
            c.preset = args.preset.clone();
        }
        if let Some(s) = args.samples {
            c.samples = s;
        }
        if args.observable.is_some() {
            c.observable = args.observable.clone();
        }
        if let Some(p) = &args.prep {
            c.prep = p.clone();
        }
        if let Some(s) = args.shots {
            c.shots = s;
        }
        if let Some(s) = args.common.seed {
            c.seed = s;
        }
        if c.channel.is_none() && c.preset.is_none() {
            c.preset = Some(DEFAULT_PRESET.into());
        }
        Ok(c)
    }

    fn channel(&self) -> Result<KrausChannel, CliError> {
        match (&self.channel, &self.preset) {
            (Some(path), None) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                KrausChannel::parse_text(&text).map_err(CliError::config)
            }
            (None, Some(p)) => KrausChannel::preset(p).map_err(CliError::config),
            _ => Err(CliError::Config("give exactly one of --channel or --preset".into())),
        }
    }

    fn prep(&self, n: usize) -> Result<GateSequence, CliError> {
        match self.prep.as_str() {
            "zero" => Ok(GateSequence::new()),
            "plus" => Ok(GateSequence::from((0..n).map(|qubit| Gate::H { qubit }).collect::<Vec<_>>())),
            other => Err(CliError::Config(format!("unknown prep `{other}` (expected zero or plus)"))),
        }
    }
}

pub fn parse_observable(text: &str) -> Result<PauliSum, CliError> {
    PauliSum::parse_text(&text.replace(';', "\n")).map_err(CliError::config)
}

#[derive(Serialize)]
struct TermRow {
    index: usize,
    kind: TermKind,
    prob: f64,
    left: String,
    right: String,
    alpha: f64,
    kraus_index: usize,
}

#[derive(Serialize)]
struct DecompositionSummary {
    n_qubits: usize,
    lambda: f64,
    /// Largest Pauli term count of any Kraus operator, an upper bound on `lambda`.
    lambda_bound: f64,
    terms: Vec<TermRow>,
}

#[derive(Serialize)]
struct EstimateSummary {
    observable: String,
    prep: String,
    mean: f64,
    std_error: f64,
    n_samples: usize,
    shots_per_sample: usize,
    lambda: f64,
    /// Dense `Tr[O Φ(ρ)]` for registers of up to three qubits.
    exact: Option<f64>,
}

pub fn run(args: ChannelSampleArgs) -> Result<Vec<PathBuf>, CliError> {
    let config = ChannelSampleConfig::resolve(&args)?;
    let channel = config.channel()?;
    let n = channel.n_qubits();
    let prep = config.prep(n)?;
    if config.samples == 0 {
        return Err(CliError::Config("samples must be positive".into()));
    }
    let observable = config.observable.as_deref().map(parse_observable).transpose()?;
    if let Some(o) = &observable {
        if o.n_qubits() != n {
            return Err(CliError::Config(format!("observable acts on {} qubits, channel on {n}", o.n_qubits())));
        }
    }
    let decomp = convex_decompose(&channel).map_err(CliError::runtime)?;
    let (_, bound) = lambda_term_bound(&channel).map_err(CliError::runtime)?;
    let terms: Vec<TermRow> = decomp
        .terms()
        .enumerate()
        .map(|(index, t)| match t {
            TermRef::Diagonal(d) => TermRow {
                index,
                kind: TermKind::Diagonal,
                prob: d.prob,
                left: d.unitary.to_string(),
                right: d.unitary.to_string(),
                alpha: 0.0,
                kraus_index: d.kraus_index,
            },
            TermRef::Cross(c) => TermRow {
                index,
                kind: TermKind::Cross,
                prob: c.prob,
                left: c.left.to_string(),
                right: c.right.to_string(),
                alpha: c.alpha,
                kraus_index: c.kraus_index,
            },
        })
        .collect();

    let mut csv = Csv::new(&["sample", "term", "kind", "left", "right", "phase", "weight"]);
    for s in 0..config.samples {
        let i = decomp.sample_index(&mut stream(config.seed, s as u64));
        let row = &terms[i];
        csv.row(&[
            s.to_string(),
            i.to_string(),
            match row.kind {
                TermKind::Diagonal => "diagonal".into(),
                TermKind::Cross => "cross".into(),
            },
            row.left.clone(),
            row.right.clone(),
            fmt_f64(row.alpha),
            fmt_f64(decomp.lambda),
        ]);
    }

    let mut out = OutputDir::create(&args.common.out_dir)?;
    out.write(
        "decomposition.json",
        &to_json(&DecompositionSummary {
            n_qubits: n,
            lambda: decomp.lambda,
            lambda_bound: bound,
            terms,
        })?,
    )?;
    out.write("samples.csv", &csv.into_string())?;
    if let Some(o) = &observable {
        let est = scu_estimate(&decomp, &prep, o, config.samples, config.shots, config.seed).map_err(CliError::runtime)?;
        let exact = if n <= 3 {
            let psi = StateVector::prepared(n, &prep).map_err(CliError::runtime)?;
            let rho = exact_channel_apply(&channel, &projector(psi.amplitudes())).map_err(CliError::runtime)?;
            Some(dense_expectation(o, &rho).map_err(CliError::runtime)?)
        } else {
            None
        };
        out.write(
            "estimate.json",
            &to_json(&EstimateSummary {
                observable: config.observable.clone().unwrap_or_default(),
                prep: config.prep.clone(),
                mean: est.mean,
                std_error: est.std_error,
                n_samples: est.n_samples,
                shots_per_sample: config.shots,
                lambda: est.lambda,
                exact,
            })?,
        )?;
    }
    out.finish("channel-sample", config.seed, &config, args.common.record_time)
}

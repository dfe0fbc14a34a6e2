use std::f64::consts::PI;
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use scu::ghz::{analytic_fidelity, run_mqc_experiment, GhzExperimentConfig, MqcResult};

use crate::output::{fmt_f64, to_json, Csv, OutputDir};
use crate::{load_section, CliError, CommonArgs};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GhzConfig {
    pub n: usize,
    pub p: Vec<f64>,
    pub shots: usize,
    pub runs: usize,
    pub exact: bool,
    /// θ grid size; `4n` when absent.
    pub grid_points: Option<usize>,
    pub seed: u64,
}

impl Default for GhzConfig {
    fn default() -> Self {
        GhzConfig {
            n: 8,
            p: vec![0.0, 0.05, 0.15],
            shots: 1000,
            runs: 5,
            exact: false,
            grid_points: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GhzArgs {
    /// Number of qubits.
    #[arg(long)]
    pub n: Option<usize>,
    /// Damping probabilities, comma separated or repeated.
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<f64>>,
    /// Shots per angle and run.
    #[arg(long)]
    pub shots: Option<usize>,
    #[arg(long)]
    pub runs: Option<usize>,
    /// Enumerate every sampled term exactly instead of drawing shots.
    #[arg(long)]
    pub exact: bool,
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

impl GhzConfig {
    pub fn resolve(args: &GhzArgs) -> Result<Self, CliError> {
        let mut c: GhzConfig = load_section(args.common.config.as_deref(), "ghz")?;
        if let Some(n) = args.n {
            c.n = n;
        }
        if let Some(p) = &args.p {
            c.p = p.clone();
        }
        if let Some(s) = args.shots {
            c.shots = s;
        }
        if let Some(r) = args.runs {
            c.runs = r;
        }
        c.exact |= args.exact;
        if args.grid_points.is_some() {
            c.grid_points = args.grid_points;
        }
        if let Some(s) = args.common.seed {
            c.seed = s;
        }
        if c.grid_points.is_none() {
            c.grid_points = Some(4 * c.n);
        }
        Ok(c)
    }

    pub fn experiments(&self) -> Result<Vec<GhzExperimentConfig>, CliError> {
        if self.p.is_empty() {
            return Err(CliError::Config("no damping probabilities given".into()));
        }
        if !self.exact && self.shots == 0 {
            return Err(CliError::Config("shots must be positive (use --exact for the exact mode)".into()));
        }
        let m = self.grid_points.unwrap_or(4 * self.n);
        let grid: Vec<f64> = (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect();
        self.p
            .iter()
            .map(|&p| {
                let mut e = GhzExperimentConfig::new(
                    self.n,
                    p,
                    if self.exact { 0 } else { self.shots },
                    if self.exact { 1 } else { self.runs },
                    self.seed,
                );
                e.theta_grid = grid.clone();
                e.validate().map_err(CliError::config)?;
                Ok(e)
            })
            .collect()
    }
}

#[derive(Serialize)]
struct Intensity {
    m: i64,
    #[serde(rename = "I")]
    value: f64,
}

#[derive(Serialize)]
struct RunSummary {
    run: usize,
    population: f64,
    coherence: f64,
    #[serde(rename = "F")]
    fidelity: f64,
}

#[derive(Serialize)]
struct ExperimentSummary {
    p: f64,
    lambda: f64,
    #[serde(rename = "F")]
    fidelity: f64,
    #[serde(rename = "F_stderr")]
    fidelity_stderr: f64,
    #[serde(rename = "F_analytic")]
    analytic: f64,
    population: f64,
    coherence: f64,
    #[serde(rename = "I_m")]
    intensities: Vec<Intensity>,
    signal: Vec<scu::ghz::SignalPoint>,
    runs: Vec<RunSummary>,
}

#[derive(Serialize)]
struct Summary {
    n: usize,
    exact: bool,
    shots_per_angle: usize,
    runs: usize,
    grid_points: usize,
    experiments: Vec<ExperimentSummary>,
}

pub fn signal_csv(results: &[MqcResult]) -> String {
    let mut csv = Csv::new(&["run", "theta", "p", "signal_mean", "signal_stderr"]);
    for res in results {
        for run in &res.runs {
            for pt in &run.signal {
                csv.row(&[
                    run.run.to_string(),
                    fmt_f64(pt.theta),
                    fmt_f64(res.damping_p),
                    fmt_f64(pt.mean),
                    fmt_f64(pt.stderr),
                ]);
            }
        }
    }
    csv.into_string()
}

pub fn run(args: GhzArgs) -> Result<Vec<PathBuf>, CliError> {
    let config = GhzConfig::resolve(&args)?;
    let experiments = config.experiments()?;
    let results = experiments
        .iter()
        .map(|e| run_mqc_experiment(e).map_err(CliError::runtime))
        .collect::<Result<Vec<_>, _>>()?;
    let summary = Summary {
        n: config.n,
        exact: config.exact,
        shots_per_angle: if config.exact { 0 } else { config.shots },
        runs: results.first().map(|r| r.runs.len()).unwrap_or(0),
        grid_points: config.grid_points.unwrap_or(4 * config.n),
        experiments: results
            .iter()
            .map(|r| ExperimentSummary {
                p: r.damping_p,
                lambda: r.lambda,
                fidelity: r.fidelity,
                fidelity_stderr: r.fidelity_stderr,
                analytic: analytic_fidelity(r.n_qubits, r.damping_p),
                population: r.population,
                coherence: r.coherence,
                intensities: r.intensities.iter().map(|&(m, value)| Intensity { m, value }).collect(),
                signal: r.signal.clone(),
                runs: r
                    .runs
                    .iter()
                    .map(|x| RunSummary {
                        run: x.run,
                        population: x.population,
                        coherence: x.coherence,
                        fidelity: x.fidelity,
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut out = OutputDir::create(&args.common.out_dir)?;
    out.write("mqc_signal.csv", &signal_csv(&results))?;
    out.write("mqc_summary.json", &to_json(&summary)?)?;
    out.finish("ghz", config.seed, &config, args.common.record_time)
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use cone_lab_core::harness::{run_experiment, write_report, ConeSource, Experiment, ExperimentConfig, Outcome};
use cone_lab_core::Error;

/// Exit code for malformed configs, cone files and family specs.
const EXIT_INVALID: u8 = 2;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExperimentArg {
    FbiSweep,
    CssSweep,
    EquivalenceMatrix,
    GammaDump,
    HammerStress,
    CentroidSearch,
}

impl From<ExperimentArg> for Experiment {
    fn from(e: ExperimentArg) -> Self {
        match e {
            ExperimentArg::FbiSweep => Experiment::FbiSweep,
            ExperimentArg::CssSweep => Experiment::CssSweep,
            ExperimentArg::EquivalenceMatrix => Experiment::EquivalenceMatrix,
            ExperimentArg::GammaDump => Experiment::GammaDump,
            ExperimentArg::HammerStress => Experiment::HammerStress,
            ExperimentArg::CentroidSearch => Experiment::CentroidSearch,
        }
    }
}

/// Seeded experiments on flat boundary intersections and centrally
/// symmetric sections of convex cones.
#[derive(Debug, Parser)]
#[command(name = "cone-lab", version)]
struct Cli {
    experiment: ExperimentArg,
    /// Cone definition file (JSON); may be repeated.
    #[arg(long = "cone", value_name = "FILE")]
    cones: Vec<PathBuf>,
    /// Family spec `kind:dim[-dim][:key=v1|v2,...]`; may be repeated.
    #[arg(long = "family", value_name = "SPEC")]
    families: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    samples: usize,
    #[arg(long, default_value_t = 10)]
    interior_points: usize,
    /// Sections per cone for hyperplane sweeps.
    #[arg(long, default_value_t = 16)]
    hyperplanes: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Search trace output (centroid-search only).
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
}

impl Cli {
    fn config(self) -> ExperimentConfig {
        let mut sources: Vec<ConeSource> = self.cones.into_iter().map(ConeSource::File).collect();
        sources.extend(self.families.into_iter().map(ConeSource::Family));
        let mut config = ExperimentConfig::new(self.experiment.into(), sources, self.out);
        config.seed = self.seed;
        config.samples = self.samples;
        config.interior_points = self.interior_points;
        config.hyperplanes = self.hyperplanes;
        config.tol = self.tol;
        config.csv = self.csv;
        config.trace = self.trace;
        config
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("CONE_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("CONE_LAB_THREADS must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| format!("thread pool: {e}"))
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::SearchBudgetExhausted { .. } => 3,
        _ => EXIT_INVALID,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_INVALID);
    }
    let config = cli.config();
    let report = match run_experiment(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code_for(&e));
        }
    };
    if let Err(e) = write_report(&report, &config.out) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_INVALID);
    }
    for row in &report.csv {
        println!("{}\t{}\t{:e}\t{:?}", row.cone_id, row.predicate, row.defect, row.verdict);
    }
    match &report.outcome {
        Outcome::Success => {}
        Outcome::Disagreement { cone_id } => eprintln!("disagreement on {cone_id}"),
        Outcome::BudgetExhausted { cone_id } => eprintln!("search budget exhausted on {cone_id}"),
    }
    ExitCode::from(report.outcome.exit_code() as u8)
}

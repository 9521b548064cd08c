//! `searchload optimize | sweep | verify`
//!
//! Exit codes: 0 success, 2 configuration error, 3 infeasible, 4 verification failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use searchload::config::{preset, ScenarioConfig};
use searchload::oracle::{verify, VerifyOptions};
use searchload::report;
use searchload::solver::{optimize, released, sweep, SweepAxis};
use searchload::Error;

#[derive(Parser)]
#[command(name = "searchload", version, about = "Minimum search-load beam parameter optimizer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// Scenario file (flat TOML).
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Shipped scenario, e.g. q1_swerling2.
    #[arg(long)]
    preset: Option<String>,
    /// r_S sampling step (overrides the file).
    #[arg(long)]
    grid_step: Option<f64>,
    #[arg(long, value_enum)]
    fidelity: Option<FidelityArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FidelityArg {
    Paper,
    Exact,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    #[value(name = "p_d0")]
    PD0,
    #[value(name = "p_c_des")]
    PcDes,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario; writes result.txt, result.json and curves.csv.
    Optimize {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Re-optimize over a range of P_d0 or P_c,des; writes sweep.csv.
    Sweep {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value = "p_d0")]
        axis: AxisArg,
        /// Comma-separated axis values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// Keep the one-off requirement and the L_s / r_f caps (released by default).
        #[arg(long)]
        keep_constraints: bool,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Compare the analytic solver with grid search and Monte Carlo.
    Verify {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        mc_trials: u64,
        /// Grid points per axis.
        #[arg(long, default_value_t = 400)]
        grid_points: usize,
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, hide = true, default_value_t = 1.0)]
        perturb_eps: f64,
    },
}

enum Failure {
    Config(String),
    Infeasible(String),
    Verify(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Domain(_) => Failure::Config(e.to_string()),
            Error::Infeasible { .. } => Failure::Infeasible(e.to_string()),
            Error::NoConvergence { .. } => Failure::Other(e.to_string()),
        }
    }
}

fn load(source: &Source) -> Result<ScenarioConfig, Failure> {
    let mut cfg = match (&source.config, &source.preset) {
        (Some(path), _) => ScenarioConfig::load(path)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => return Err(Failure::Config("give --config or --preset".into())),
    };
    if let Some(step) = source.grid_step {
        cfg.grid_step = Some(step);
    }
    if let Some(f) = source.fidelity {
        cfg.fidelity_mode = Some(
            match f {
                FidelityArg::Paper => "paper",
                FidelityArg::Exact => "exact",
            }
            .into(),
        );
    }
    Ok(cfg)
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Other(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, text).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Optimize { source, out } => {
            let cfg = load(&source)?;
            let problem = cfg.problem()?;
            let options = cfg.solver_options()?;
            let result = optimize(&problem, &options)?;
            report::write_optimization(&out, &problem, &result)?;
            print!("{}", report::result_text(&problem, &result));
            Ok(())
        }
        Command::Sweep { source, axis, values, keep_constraints, out } => {
            let cfg = load(&source)?;
            let mut problem = cfg.problem()?;
            if !keep_constraints {
                problem = released(&problem);
            }
            let options = cfg.solver_options()?;
            let axis = match axis {
                AxisArg::PD0 => SweepAxis::PD0,
                AxisArg::PcDes => SweepAxis::PcDes,
            };
            let points = sweep(&problem, axis, &values, &options);
            std::fs::create_dir_all(&out).map_err(|e| Failure::Other(format!("{}: {e}", out.display())))?;
            let file = std::fs::File::create(out.join("sweep.csv"))
                .map_err(|e| Failure::Other(format!("{}: {e}", out.display())))?;
            report::write_sweep(std::io::BufWriter::new(file), axis.name(), &points)?;
            report::write_sweep(std::io::stdout().lock(), axis.name(), &points)?;
            Ok(())
        }
        Command::Verify { source, seed, mc_trials, grid_points, out, perturb_eps } => {
            let cfg = load(&source)?;
            let problem = cfg.problem()?;
            let options = VerifyOptions {
                seed,
                mc_trials,
                grid_points,
                perturb_eps,
                ..VerifyOptions::default()
            };
            let report = verify(&problem.scenario, &problem.bounds, &problem.target.detection()?, &options)?;
            let text = report.render();
            print!("{text}");
            if let Some(path) = out {
                write(&path, &text)?;
            }
            match report.worst() {
                None => Ok(()),
                Some(w) => Err(Failure::Verify(w)),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Infeasible(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Verify(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(4)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

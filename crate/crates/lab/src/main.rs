use std::path::{Path, PathBuf};
use std::process::ExitCode;

use brownian_lab::runner::{run, RunOptions};
use brownian_lab::scenario::Scenario;
use brownian_lab::suite::{run_suite, SuiteName, SuiteOptions};
use brownian_lab::{bundled, LabError, BUNDLED_SCENARIOS};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "brownian-lab", version, about = "Brownian shift subspace workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (or a bundled scenario by name) and write a JSON report.
    Run {
        scenario: String,
        /// Report path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the truncation degree N.
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Run a built-in suite: acceptance, properties or all.
    Suite {
        name: SuiteName,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Forces every residual tolerance to this value.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Also write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List bundled scenarios.
    ListScenarios,
}

fn load(arg: &str) -> Result<Scenario, LabError> {
    let path = Path::new(arg);
    let text = if path.exists() {
        std::fs::read_to_string(path).map_err(|e| LabError::Input(vec![format!("{arg}: {e}")]))?
    } else if let Some(text) = bundled(arg) {
        text.to_string()
    } else {
        return Err(LabError::Input(vec![format!(
            "{arg}: no such file or bundled scenario"
        )]));
    };
    Scenario::parse(&text)
}

fn write_json<T: serde::Serialize>(value: &T, out: Option<&Path>) -> Result<(), LabError> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    match out {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| LabError::Io(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            scenario,
            out,
            seed,
            degree,
        } => load(&scenario)
            .and_then(|s| run(&s, &RunOptions { seed, degree }))
            .and_then(|report| {
                write_json(&report, out.as_deref())?;
                for r in report.results.iter().filter(|r| !r.passed) {
                    eprintln!(
                        "FAIL {}: {}",
                        r.label,
                        r.error.as_deref().unwrap_or("outside tolerance")
                    );
                }
                eprintln!(
                    "{}/{} analyses passed",
                    report.summary.passed, report.summary.total
                );
                Ok(report.summary.all_passed)
            }),
        Command::Suite {
            name,
            seed,
            tolerance,
            out,
        } => {
            let report = run_suite(name, SuiteOptions { seed, tolerance });
            println!("{}", report.table());
            match out {
                Some(p) => write_json(&report, Some(&p)).map(|_| report.summary.all_passed),
                None => Ok(report.summary.all_passed),
            }
        }
        Command::ListScenarios => {
            for (name, text) in BUNDLED_SCENARIOS {
                let desc = Scenario::parse(text)
                    .ok()
                    .and_then(|s| s.description)
                    .unwrap_or_default();
                println!("{name:<24} {desc}");
            }
            Ok(true)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use g2frames::runner::{list_suites, run, RunConfig, RunOptions};

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(
    name = "g2frames",
    version,
    about = "Verify G2 torsion identities on bundles over 4-manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the suites selected by a JSON config.
    Run {
        /// Path to the JSON config.
        #[arg(long)]
        config: PathBuf,
        /// Override the probe seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the number of probe points.
        #[arg(long)]
        probes: Option<usize>,
        /// Replace every upper-bound tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Write the JSON report here (overrides `report` in the config).
        #[arg(long)]
        json: Option<PathBuf>,
        /// Print only the summary line.
        #[arg(long)]
        quiet: bool,
        /// Evaluate probes on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// List the available suites.
    ListSuites {
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
    },
}

fn load(path: &PathBuf, seed: Option<u64>, probes: Option<usize>, tol: Option<f64>) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut cfg = RunConfig::from_json(&text).map_err(|e| e.to_string())?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(p) = probes {
        cfg.probes = p;
    }
    if let Some(t) = tol {
        cfg.tolerances = cfg.tolerances.uniform(t);
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListSuites { json } => {
            let suites = list_suites();
            if json {
                println!("{}", serde_json::to_string_pretty(&suites).expect("suites serialize"));
            } else {
                for s in suites {
                    println!("{}: {}", s.id.as_str(), s.anchor);
                    println!("    {}", s.description);
                }
            }
            ExitCode::SUCCESS
        }
        Command::Run {
            config,
            seed,
            probes,
            tol,
            json,
            quiet,
            sequential,
        } => {
            let cfg = match load(&config, seed, probes, tol) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: invalid config: {e}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            let report = match run(&cfg, RunOptions { sequential }) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_FAIL);
                }
            };
            if !quiet {
                for r in &report.records {
                    println!("{}", r.line());
                }
            }
            if let Some(class) = &report.torsion_class {
                println!("torsion: {class}");
            }
            let failed = report.failures().count();
            println!(
                "{}: {} records, {} failed",
                if report.pass { "PASS" } else { "FAIL" },
                report.records.len(),
                failed
            );
            if quiet {
                for r in report.failures() {
                    eprintln!("{}", r.line());
                }
            }
            if let Some(out) = json.or(cfg.report.clone()) {
                if let Err(e) = std::fs::write(&out, report.to_json() + "\n") {
                    eprintln!("error: cannot write {}: {e}", out.display());
                    return ExitCode::from(EXIT_FAIL);
                }
            }
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
    }
}

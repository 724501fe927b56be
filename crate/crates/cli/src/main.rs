use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use iscap_cli::config::{self, FadingKind, HarvestKind, ProblemKind};
use iscap_cli::{presets, CliError, Overrides, ScenarioConfig};

/// Sweeps and optimizes a terahertz sensing / information / power link.
#[derive(Parser)]
#[command(name = "iscap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the link over the config's [sweep] range and write CSV.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximize energy (p1) or rate (p2) under the other's threshold.
    Optimize {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_enum)]
        problem: Option<ProblemKind>,
        /// Minimum rate for p1, bits/Hz.
        #[arg(long)]
        r_eps: Option<f64>,
        /// Minimum harvested energy for p2, W s.
        #[arg(long)]
        e_eps: Option<f64>,
        /// Also run the exhaustive grid search and report the gap.
        #[arg(long)]
        verify: bool,
    },
    /// List the named base scenarios.
    Presets,
    /// Load a config, apply presets and overrides, and print the result.
    ValidateConfig {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario TOML file; omitted fields come from the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base scenario (see `iscap presets`).
    #[arg(long)]
    preset: Option<String>,
    /// Seed for Monte Carlo fading draws.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    fading: Option<FadingKind>,
    /// Rectifier model.
    #[arg(long, value_enum)]
    eh: Option<HarvestKind>,
}

impl ScenarioArgs {
    fn load(&self) -> Result<ScenarioConfig, CliError> {
        let overrides = Overrides {
            preset: self.preset.clone(),
            seed: self.seed,
            fading: self.fading,
            eh: self.eh,
        };
        match &self.config {
            Some(path) => config::load_config(path, &overrides),
            None => config::resolve(Default::default(), None, &overrides),
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Sweep { scenario, out } => {
            let cfg = scenario.load()?;
            let records = iscap_cli::run_sweep(&cfg)?;
            match out.or(cfg.output_path.map(PathBuf::from)) {
                Some(path) => {
                    let f = File::create(&path)
                        .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
                    iscap_cli::write_csv(&records, BufWriter::new(f))?;
                }
                None => iscap_cli::write_csv(&records, io::stdout().lock())?,
            }
            Ok(iscap_cli::EXIT_OK)
        }
        Command::Optimize {
            scenario,
            problem,
            r_eps,
            e_eps,
            verify,
        } => {
            let cfg = scenario.load()?;
            let problem = iscap_cli::select_problem(&cfg, problem, r_eps, e_eps)?;
            let report = iscap_cli::run_optimize(&cfg, problem, verify)?;
            print!("{}", iscap_cli::format_report(&report));
            Ok(if report.is_infeasible() {
                iscap_cli::EXIT_INFEASIBLE
            } else {
                iscap_cli::EXIT_OK
            })
        }
        Command::Presets => {
            for (name, description) in presets::PRESETS {
                println!("{name:<14} {description}");
            }
            Ok(iscap_cli::EXIT_OK)
        }
        Command::ValidateConfig { scenario } => {
            let cfg = scenario.load()?;
            print!("{}", iscap_cli::describe(&cfg));
            Ok(iscap_cli::EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

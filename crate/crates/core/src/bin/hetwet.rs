use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use hetwet::harness::{load_config, run_experiment_with, sweep, RunOptions, DEFAULT_REPETITIONS};
use hetwet::ProtocolKind;

#[derive(Parser)]
#[command(name = "hetwet", version, about = "Wireless energy transfer simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario for the selected protocols.
    Run(RunArgs),
    /// Run the six heterogeneity scenarios, one subdirectory each.
    Sweep(RunArgs),
    /// Check a config file and exit.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Config file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Protocol name, comma-separated list, or "all".
    #[arg(long, default_value = "all")]
    protocol: String,
    /// Base seed; overrides `rng_seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Repetitions per protocol.
    #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
    runs: usize,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

fn parse_protocols(s: &str) -> Result<Vec<ProtocolKind>> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(ProtocolKind::ALL.to_vec());
    }
    let mut out = Vec::new();
    for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
        let p: ProtocolKind = name.parse()?;
        if !out.contains(&p) {
            out.push(p);
        }
    }
    if out.is_empty() {
        bail!("no protocol given");
    }
    Ok(out)
}

impl RunArgs {
    fn options(&self) -> Result<RunOptions> {
        if self.runs == 0 {
            bail!("--runs must be at least 1");
        }
        Ok(RunOptions {
            protocols: parse_protocols(&self.protocol)?,
            base_seed: self.seed,
            repetitions: self.runs,
            parallel: true,
        })
    }

    fn experiment(&self) -> Result<hetwet::harness::ExperimentConfig> {
        Ok(match &self.config {
            Some(path) => load_config(path)?,
            None => Default::default(),
        })
    }
}

fn real_main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => {
            let exp = args.experiment()?;
            let opts = args.options()?;
            let summary = run_experiment_with(&exp, &opts, &args.out)
                .with_context(|| format!("experiment failed (output: {})", args.out.display()))?;
            for (name, s) in &summary {
                let vd = s.mean_variation_distance.last().copied().unwrap_or(f64::NAN);
                let e = s.mean_total_energy.last().copied().unwrap_or(f64::NAN);
                println!(
                    "{name:>8}  energy {e:10.4}  vd {vd:.6}  balanced {:.2}",
                    s.final_balanced_mean
                );
            }
            println!("wrote {}", args.out.display());
        }
        Command::Sweep(args) => {
            let exp = args.experiment()?;
            let opts = args.options()?;
            let all = sweep(&exp.sim, &opts, &args.out)
                .with_context(|| format!("sweep failed (output: {})", args.out.display()))?;
            for (label, summary) in &all {
                println!("{label}");
                for (name, s) in summary {
                    let vd = s.mean_variation_distance.last().copied().unwrap_or(f64::NAN);
                    println!("  {name:>8}  vd {vd:.6}  balanced {:.2}", s.final_balanced_mean);
                }
            }
            println!("wrote {}", args.out.display());
        }
        Command::Validate { config } => {
            let exp = load_config(&config)?;
            exp.sim.validate()?;
            hetwet::scenario_classes(&exp.scenario)?;
            println!("{}: ok ({})", config.display(), exp.scenario.label());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wavetank::commands::{cmd_analyze, cmd_eval, cmd_simulate, cmd_sweep, cmd_train};
use wavetank::config::{read_config_text, RunConfig};
use wavetank::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "wavetank", version, about = "SPH wave tank with learned PTO damping control")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration; defaults apply to every missing key
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// RNG seed, overriding the configuration
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory, overriding `outputs.dir`
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Constant time step (regression mode)
    #[arg(long, global = true)]
    fixed_dt: Option<f64>,
    /// Spatial dimension, 2 or 3
    #[arg(long, global = true)]
    dim: Option<u32>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Plain run at constant damping
    Simulate,
    /// Mean absorbed power over a list of damping values
    Sweep,
    /// Train the controllers
    Train,
    /// Compare a checkpoint with the constant-damping baseline
    Eval {
        /// Trainer checkpoint written by `train`
        #[arg(long)]
        checkpoint: PathBuf,
    },
    /// Spectra and wave statistics of a gauge CSV
    Analyze {
        /// CSV with a `t` column
        series: PathBuf,
    },
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::parse_raw(&read_config_text(p)?)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(d) = cli.dim {
        cfg.tank.dim = d;
    }
    if let Some(dt) = cli.fixed_dt {
        cfg.tank.fixed_dt = Some(dt);
    }
    if let Some(o) = &cli.out {
        cfg.outputs.dir = o.display().to_string();
    }
    cfg.finish()
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load(&cli)?;
    let out = PathBuf::from(&cfg.outputs.dir);
    match &cli.command {
        Command::Simulate => {
            let s = cmd_simulate(&cfg, &out)?;
            println!("steps {}  absorbed energy {:?}", s.steps, s.energy);
        }
        Command::Sweep => {
            for (kp, p) in cmd_sweep(&cfg, &out)? {
                println!("kp {kp:8.1}  mean power {p:?}");
            }
        }
        Command::Train => {
            let s = cmd_train(&cfg, &out)?;
            let (a, b, c) = s.runtime.shares();
            println!(
                "{} episodes, checkpoint {}; time shares sph {:.1}% rl {:.1}% io {:.1}%",
                s.logs.len(),
                s.checkpoint.display(),
                100.0 * a,
                100.0 * b,
                100.0 * c
            );
        }
        Command::Eval { checkpoint } => {
            let r = cmd_eval(&cfg, checkpoint, &out)?;
            for row in r.agents.iter().chain(std::iter::once(&r.total)) {
                println!(
                    "{:6}  E_drl {:12.4}  E_0 {:12.4}  dE {:10.4}  {:+.2}%",
                    row.label, row.e_drl, row.e_base, row.delta, row.improvement_pct
                );
            }
        }
        Command::Analyze { series } => {
            for s in cmd_analyze(&cfg, series, &out)? {
                println!("{}: Hs {:.4} m  Tp {:.3} s", s.name, s.spectrum.hs, s.spectrum.tp);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::Config { .. } | Error::Parse(_)) {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

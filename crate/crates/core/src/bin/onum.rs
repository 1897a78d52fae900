use std::path::PathBuf;
use std::process::{Command, ExitCode};

use clap::{Args, Parser, Subcommand, ValueEnum};

use onum::harness::output::{config_to_toml, load_config, write_outputs};
use onum::harness::{
    builtin_instance, config_warnings, oracle_report, run_experiment, sweep_configs, sweep_presets,
    SweepParam, UNIFORM_HALFWIDTH,
};
use onum::{Algorithm, Error, ExperimentConfig, RewardKind};

#[derive(Parser)]
#[command(name = "onum", version, about = "Threshold-utility bandit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one experiment cell and write its regret CSV.
    Run(CellArgs),
    /// Run a parameter sweep, one CSV per value.
    Sweep(SweepArgs),
    /// Print offline diagnostics of an instance.
    Oracle(CellArgs),
    /// Write the built-in instances as TOML configs and list the sweep presets.
    Instances {
        #[arg(long, default_value = "instances")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Reward {
    Bernoulli,
    Uniform,
}

#[derive(Args, Clone)]
struct CellArgs {
    /// Built-in instance (1, 2 or 3) or a path to a TOML config.
    #[arg(long, default_value = "1")]
    instance: String,
    #[arg(long)]
    algorithm: Option<String>,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    repeats: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, value_enum)]
    reward: Option<Reward>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    cell: CellArgs,
    /// Swept parameter: capacity or theta-s.
    #[arg(long, requires = "values", conflicts_with = "preset")]
    param: Option<String>,
    /// Comma-separated values of the swept parameter.
    #[arg(long, value_delimiter = ',', requires = "param")]
    values: Option<Vec<f64>>,
    /// Named preset from `onum instances`.
    #[arg(long)]
    preset: Option<String>,
}

impl CellArgs {
    fn config(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = match self.instance.parse::<u32>() {
            Ok(id) => builtin_instance(id)?,
            Err(_) => load_config(self.instance.as_ref()).map_err(|e| match e {
                Error::Io(io) => Error::Config(format!("{}: {io}", self.instance)),
                other => other,
            })?,
        };
        self.apply(&mut cfg)?;
        Ok(cfg)
    }

    fn apply(&self, cfg: &mut ExperimentConfig) -> Result<(), Error> {
        if let Some(a) = &self.algorithm {
            cfg.algorithm = a.parse::<Algorithm>()?;
        }
        if let Some(v) = self.horizon {
            cfg.horizon = v;
        }
        if let Some(v) = self.repeats {
            cfg.repeats = v;
        }
        if let Some(v) = self.seed {
            cfg.base_seed = v;
        }
        if let Some(v) = self.delta {
            cfg.delta = v;
        }
        if let Some(v) = self.epsilon {
            cfg.epsilon = v;
        }
        if let Some(v) = self.gamma {
            cfg.gamma = v;
        }
        if let Some(r) = self.reward {
            cfg.instance.reward_kind = match r {
                Reward::Bernoulli => RewardKind::Bernoulli,
                Reward::Uniform => RewardKind::Uniform {
                    halfwidth: UNIFORM_HALFWIDTH,
                },
            };
        }
        cfg.validate()
    }
}

fn commit_id() -> String {
    Command::new("git")
        .args(["rev-parse", "--short=12", "HEAD"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".to_string())
}

fn run_cell(
    cfg: &ExperimentConfig,
    variant: &str,
    out: &std::path::Path,
    commit: &str,
) -> Result<(), Error> {
    let warnings = config_warnings(cfg)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let trace = run_experiment(cfg)?;
    let path = write_outputs(out, cfg, variant, &trace, commit, &warnings)?;
    println!(
        "{}: final mean regret {:.4}, converged {}/{}",
        path.display(),
        trace.final_mean(),
        trace
            .convergence_rounds
            .iter()
            .filter(|r| r.is_some())
            .count(),
        trace.n_repeats
    );
    Ok(())
}

fn execute(cmd: Cmd) -> Result<(), Error> {
    match cmd {
        Cmd::Run(args) => run_cell(&args.config()?, "base", &args.out, &commit_id()),
        Cmd::Sweep(args) => {
            let commit = commit_id();
            let cells = match (&args.preset, &args.param, &args.values) {
                (Some(name), _, _) => {
                    let preset = sweep_presets()
                        .into_iter()
                        .find(|p| &p.name == name)
                        .ok_or_else(|| Error::Config(format!("unknown preset `{name}`")))?;
                    let mut base = preset.base;
                    args.cell.apply(&mut base)?;
                    sweep_configs(&base, preset.param, &preset.values)?
                }
                (None, Some(param), Some(values)) => {
                    let param: SweepParam = param.parse()?;
                    sweep_configs(&args.cell.config()?, param, values)?
                }
                _ => {
                    return Err(Error::Config(
                        "sweep needs --preset or --param with --values".into(),
                    ))
                }
            };
            for (variant, cfg) in &cells {
                run_cell(cfg, variant, &args.cell.out, &commit)?;
            }
            Ok(())
        }
        Cmd::Oracle(args) => {
            let cfg = args.config()?;
            println!("{}", oracle_report(&cfg)?);
            for w in config_warnings(&cfg)? {
                println!("warning: {w}");
            }
            Ok(())
        }
        Cmd::Instances { out } => {
            std::fs::create_dir_all(&out)?;
            for id in 1..=3 {
                let cfg = builtin_instance(id)?;
                let path = out.join(format!("{}.toml", cfg.name));
                std::fs::write(&path, config_to_toml(&cfg)?)?;
                println!(
                    "{id}  {}  K={} C={} default={}",
                    path.display(),
                    cfg.instance.num_arms(),
                    cfg.instance.capacity,
                    cfg.algorithm.name()
                );
            }
            println!("presets:");
            for p in sweep_presets() {
                println!("  {}  {} in {:?}", p.name, p.param.tag(), p.values);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_contract_violation() { 2 } else { 1 })
        }
    }
}

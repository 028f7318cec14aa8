//! Thin command-line front end; all logic lives in the library.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use harmap::domain::ModelPoint;
use harmap::harness::{self, ExperimentConfig};
use harmap::link::{self, LinkTarget};

#[derive(Parser)]
#[command(
    name = "harmap",
    about = "Energy-minimizing maps from polyhedral local models into curved targets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Path to an experiment config (JSON).
    #[arg(long, conflicts_with = "builtin")]
    config: Option<PathBuf>,
    /// Name of a bundled config (`--builtin list` prints them).
    #[arg(long)]
    builtin: Option<String>,
    /// Output directory (default: $HARMAP_OUT/<name> or ./out/<name>).
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Override the solver movement tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Override the sweep budget.
    #[arg(long)]
    max_sweeps: Option<usize>,
    /// Override the over-relaxation factor (flat targets only).
    #[arg(long)]
    relaxation: Option<f64>,
    /// Override the experiment seed.
    #[arg(long)]
    seed: Option<u64>,
}

impl ConfigArgs {
    fn load(&self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = match (&self.config, &self.builtin) {
            (Some(path), None) => {
                ExperimentConfig::load(path).with_context(|| format!("loading {path:?}"))?
            }
            (None, Some(name)) if name == "list" => {
                for n in harness::BUILTIN_CONFIGS {
                    println!("{n}");
                }
                std::process::exit(0);
            }
            (None, Some(name)) => harness::builtin_config(name)?,
            _ => bail!("exactly one of --config or --builtin is required"),
        };
        if let Some(t) = self.tol {
            cfg.solver.tol = t;
        }
        if let Some(m) = self.max_sweeps {
            cfg.solver.max_sweeps = m;
        }
        if let Some(r) = self.relaxation {
            cfg.solver.relaxation = r;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn out_dir(&self, name: &str) -> PathBuf {
        self.output_dir
            .clone()
            .unwrap_or_else(|| harness::default_output_dir(name))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Mesh the domain and solve the constrained minimization.
    Solve(ConfigArgs),
    /// Solve and run every analytics block the config requests.
    Analyze(ConfigArgs),
    /// Run the randomized comparison oracles.
    Oracles {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Perturb each inequality to self-test the detector.
        #[arg(long)]
        adversarial: bool,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Extract the origin link and estimate its first eigenvalue.
    Link {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 512)]
        subdivision: usize,
        /// real or tripod.
        #[arg(long, default_value = "real")]
        target: String,
    },
    /// Print the summary of a finished run and exit nonzero on failures.
    Report {
        #[arg(long)]
        output_dir: PathBuf,
    },
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Solve(args) => {
            let cfg = args.load()?;
            let dir = args.out_dir(&cfg.name);
            let (_, _, report) = harness::run_solve(&cfg, &dir)?;
            println!(
                "{}: energy {} after {} sweeps (converged: {}) -> {}",
                cfg.name,
                report.total,
                report.sweeps,
                report.converged,
                dir.display()
            );
            if !report.converged {
                std::process::exit(2);
            }
        }
        Command::Analyze(args) => {
            let cfg = args.load()?;
            let dir = args.out_dir(&cfg.name);
            let outcome = harness::run_experiment(&cfg, &dir)?;
            print!(
                "{}",
                std::fs::read_to_string(dir.join("summary.txt")).unwrap_or_default()
            );
            if !outcome.passed() {
                std::process::exit(1);
            }
        }
        Command::Oracles {
            seed,
            samples,
            adversarial,
            output_dir,
        } => {
            let dir = output_dir.unwrap_or_else(|| harness::default_output_dir("oracles"));
            let outcome = harness::run_oracles(seed, samples, adversarial, &dir)?;
            print!(
                "{}",
                std::fs::read_to_string(dir.join("oracle_summary.txt")).unwrap_or_default()
            );
            if !outcome.passed {
                std::process::exit(1);
            }
        }
        Command::Link {
            config,
            subdivision,
            target,
        } => {
            let cfg = config.load()?;
            let model = cfg.build_model()?;
            let field = cfg.build_metric()?;
            let origin = ModelPoint {
                wedge: 0,
                coords: vec![0.0; model.dimension],
            };
            let graph = link::extract_link(&model, &field, &origin)?;
            let t = match target.as_str() {
                "real" => LinkTarget::Real,
                "tripod" => LinkTarget::Tripod,
                other => bail!("unknown link target '{other}'"),
            };
            let res = link::lambda1(&graph, t, subdivision)?;
            let pred = link::predicted_exponent(res.lambda1, model.dimension, 0)?;
            println!(
                "{} ({}): lambda1 = {} at subdivision {}, predicted exponent {} (lipschitz: {})",
                graph.label,
                t.name(),
                res.lambda1,
                res.subdivision,
                pred.alpha,
                pred.lipschitz
            );
        }
        Command::Report { output_dir } => {
            let mut failed = false;
            for file in ["summary.txt", "oracle_summary.txt"] {
                if let Ok(text) = std::fs::read_to_string(output_dir.join(file)) {
                    print!("{text}");
                    failed |= text.lines().any(|l| l.starts_with("[FAIL]"));
                }
            }
            if failed {
                std::process::exit(1);
            }
        }
    }
    Ok(())
}

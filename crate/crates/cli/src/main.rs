//! Command-line front end: optimize a scenario, evaluate or simulate a
//! plan, run configured sweeps, and rerun the bundled experiments.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use noma_mec::{closed_form_ps, estimate_ps, optimal_plan, time_feasible, OffloadingPlan};
use noma_mec_cli::config::{load_config, parse_config, ExperimentConfig};
use noma_mec_cli::output::emit_outputs;
use noma_mec_cli::sweep::run_sweep;

const FIG2: &str = include_str!("../presets/fig2.toml");
const FIG3: &str = include_str!("../presets/fig3.toml");
const FIG4: &str = include_str!("../presets/fig4.toml");

#[derive(Parser)]
#[command(
    name = "noma-mec",
    version,
    about = "Offloading plans and success probabilities for a two-user NOMA edge-computing link"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the optimized plan and success probability of the base scenario.
    Optimize {
        /// Experiment config (TOML).
        config: PathBuf,
    },
    /// Closed-form success probability of an explicit plan.
    Evaluate {
        /// Experiment config (TOML); only [base] is used.
        config: PathBuf,
        /// Plan as t1_ms,t2_ms,beta_a,beta_b,lambda.
        #[arg(long, value_name = "T1_MS,T2_MS,BETA_A,BETA_B,LAMBDA")]
        plan: String,
    },
    /// Monte Carlo estimate at a plan (default: the optimized plan).
    Simulate {
        /// Experiment config (TOML); only [base] is used.
        config: PathBuf,
        /// Plan as t1_ms,t2_ms,beta_a,beta_b,lambda.
        #[arg(long, value_name = "T1_MS,T2_MS,BETA_A,BETA_B,LAMBDA")]
        plan: Option<String>,
        /// Number of channel draws.
        #[arg(long, default_value_t = 100_000)]
        n: u64,
        /// Generator seed.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run the configured sweep and write its output files.
    Sweep {
        /// Experiment config (TOML).
        config: PathBuf,
    },
    /// Rerun a bundled experiment, writing outputs to the current directory.
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Figure {
    Fig2,
    Fig3,
    Fig4,
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Optimize { config } => {
            let exp = load_config(&config)?;
            let (plan, ps) = optimal_plan(&exp.base)?;
            print_plan(&plan);
            println!("ps = {ps}");
        }
        Cmd::Evaluate { config, plan } => {
            let exp = load_config(&config)?;
            let plan = parse_plan(&plan)?;
            let ps = closed_form_ps(&exp.base, &plan)?;
            println!("ps = {ps}");
            println!("feasible = {}", time_feasible(&exp.base, &plan));
            println!("latency_ms = {}", plan.latency() * 1e3);
        }
        Cmd::Simulate {
            config,
            plan,
            n,
            seed,
        } => {
            let exp = load_config(&config)?;
            let plan = match plan {
                Some(text) => parse_plan(&text)?,
                None => optimal_plan(&exp.base)?.0,
            };
            let est = estimate_ps(&exp.base, &plan, n, seed)?;
            let exact = closed_form_ps(&exp.base, &plan)?;
            print_plan(&plan);
            println!("ps_mc = {}", est.p_hat);
            println!("stderr = {}", est.stderr);
            println!("n = {n}");
            println!("seed = {seed}");
            println!("ps_analytic = {exact}");
        }
        Cmd::Sweep { config } => {
            let exp = load_config(&config)?;
            run_and_emit(&exp)?;
        }
        Cmd::Reproduce { figure } => {
            let text = match figure {
                Figure::Fig2 => FIG2,
                Figure::Fig3 => FIG3,
                Figure::Fig4 => FIG4,
            };
            let exp = parse_config(text).context("embedded preset")?;
            run_and_emit(&exp)?;
        }
    }
    Ok(())
}

fn run_and_emit(exp: &ExperimentConfig) -> Result<()> {
    let rows = run_sweep(exp)?;
    let written = emit_outputs(exp, &rows, Path::new("."))?;
    println!("{} rows", rows.len());
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn print_plan(plan: &OffloadingPlan) {
    println!("t1_ms = {}", plan.t1 * 1e3);
    println!("t2_ms = {}", plan.t2 * 1e3);
    println!("beta_a = {}", plan.beta_a);
    println!("beta_b = {}", plan.beta_b);
    println!("lambda = {}", plan.lambda);
}

fn parse_plan(text: &str) -> Result<OffloadingPlan> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 5 {
        bail!("--plan expects five comma-separated numbers: t1_ms,t2_ms,beta_a,beta_b,lambda");
    }
    let nums = parts
        .iter()
        .enumerate()
        .map(|(i, p)| {
            p.trim()
                .parse::<f64>()
                .with_context(|| format!("--plan field {i}: {p:?} is not a number"))
        })
        .collect::<Result<Vec<f64>>>()?;
    let plan = OffloadingPlan {
        t1: nums[0] * 1e-3,
        t2: nums[1] * 1e-3,
        beta_a: nums[2],
        beta_b: nums[3],
        lambda: nums[4],
    };
    plan.validate()?;
    Ok(plan)
}

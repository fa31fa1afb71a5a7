// `!(x > 0)` is how NaN gets rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fblec::PsiModel;
use fblec_cli::config::{parse_priorities_flag, parse_target};
use fblec_cli::{
    commands, compensate_report, ec_report, render, CliError, Figure, FigureOptions, Result,
    Scenario, SweepAxis, SweepSpec, Table,
};

#[derive(Parser)]
#[command(name = "fblec", version, about = "Finite-blocklength effective capacity under collisions")]
struct Cli {
    /// How ψ is evaluated: exact, taylor or closed
    #[arg(long, global = true, default_value = "exact")]
    model: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal error probability and maximum EC of one scenario
    Ec {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        eps_target: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the data of a standard figure (fig2 .. fig10) as CSV
    Figure {
        id: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Reliability target for the constrained curves
        #[arg(long)]
        eps_target: Option<f64>,
        /// Joint-objective weights as `eta_alpha,eta_theta`
        #[arg(long)]
        priorities: Option<String>,
    },
    /// Sweep one parameter around the scenario in --config
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// eps, n_nodes, theta, snr, rho_s_op or d_max
        #[arg(long)]
        axis: String,
        #[arg(long, allow_negative_numbers = true)]
        start: f64,
        #[arg(long, allow_negative_numbers = true)]
        stop: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        eps_target: Option<f64>,
        #[arg(long)]
        priorities: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compensate one node: power, delay or joint
    Compensate {
        scheme: String,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        eps_target: Option<f64>,
        #[arg(long)]
        priorities: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let model: PsiModel = cli
        .model
        .parse()
        .map_err(|_| CliError::Usage(format!("unknown model `{}` (exact, taylor, closed)", cli.model)))?;
    match cli.command {
        Command::Ec {
            config,
            eps_target,
            out,
        } => {
            let scenario = load(&config, eps_target)?;
            emit_text(&ec_report(&scenario, model)?.to_string(), out.as_deref())
        }
        Command::Figure {
            id,
            out,
            eps_target,
            priorities,
        } => {
            let fig: Figure = id.parse()?;
            if let Some(p) = eps_target {
                parse_target(p, "--eps-target")?;
            }
            let opts = FigureOptions {
                model,
                target_eps: eps_target,
                priorities: priorities.as_deref().map(parse_priorities_flag).transpose()?,
            };
            emit_table(&render(fig, &opts)?, out.as_deref())
        }
        Command::Sweep {
            config,
            axis,
            start,
            stop,
            steps,
            eps_target,
            priorities,
            out,
        } => {
            let scenario = load(&config, eps_target)?;
            let spec = SweepSpec {
                axis: axis.parse::<SweepAxis>()?,
                start,
                stop,
                steps,
                base: scenario.network,
                constraint: scenario.constraint,
                priorities: match priorities {
                    Some(p) => Some(parse_priorities_flag(&p)?),
                    None => scenario.priorities,
                },
                model,
            };
            let mut table = spec.run()?;
            if let Some(db) = scenario.snr_db {
                table.meta("snr_db", db);
            }
            emit_table(&table, out.as_deref())
        }
        Command::Compensate {
            scheme,
            config,
            eps_target,
            priorities,
            out,
        } => {
            let scheme: commands::Scheme = scheme.parse()?;
            let scenario = load(&config, eps_target)?;
            let prio = priorities.as_deref().map(parse_priorities_flag).transpose()?;
            emit_text(
                &compensate_report(&scenario, scheme, model, prio)?.to_string(),
                out.as_deref(),
            )
        }
    }
}

fn load(path: &Path, eps_target: Option<f64>) -> Result<Scenario> {
    let mut scenario = Scenario::load(path)?;
    let target = eps_target.map(|p| parse_target(p, "--eps-target")).transpose()?;
    commands::override_target(&mut scenario, target);
    Ok(scenario)
}

fn io_err(path: Option<&Path>) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        context: match path {
            Some(p) => format!("writing {}", p.display()),
            None => "writing stdout".into(),
        },
        source,
    }
}

fn emit_text(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(io_err(Some(p))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(io_err(None)),
    }
}

fn emit_table(table: &Table, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => {
            let file = std::fs::File::create(p).map_err(io_err(Some(p)))?;
            table.write_csv(std::io::BufWriter::new(file))
        }
        None => table.write_csv(std::io::stdout().lock()),
    }
}

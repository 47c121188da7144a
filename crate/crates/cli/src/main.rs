use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use mixcat_core::{Method, PoolRule};

mod commands;
mod config;

use config::Layer;

/// Train, apply and evaluate binary text categorizers.
#[derive(Parser)]
#[command(name = "mixcat", version)]
struct Cli {
    /// TOML file with default settings; flags take precedence.
    #[arg(long, global = true, env = "MIXCAT_CONFIG")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump the word-by-category frequency table as CSV.
    Counts {
        #[arg(long)]
        train: Option<String>,
        #[arg(long)]
        output: Option<String>,
    },
    /// Dump word clusters, one line per cluster.
    Clusters {
        #[arg(long)]
        train: Option<String>,
        /// Cluster the category against its complement instead of all categories.
        #[arg(long)]
        category: Option<String>,
        #[command(flatten)]
        scheme: Scheme,
        #[arg(long)]
        pool_rule: Option<PoolRule>,
        #[arg(long)]
        output: Option<String>,
    },
    /// Train one category-versus-complement model and save it as JSON.
    Train {
        #[arg(long)]
        method: Option<Method>,
        #[arg(long)]
        category: Option<String>,
        #[arg(long)]
        train: Option<String>,
        #[command(flatten)]
        model: ModelFlags,
        /// Write the EM log-likelihood trace here (fmm only).
        #[arg(long)]
        trace: Option<String>,
        #[arg(long)]
        output: Option<String>,
    },
    /// Apply a saved model to documents; prints doc-id, outcome and score as TSV.
    Classify {
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        input: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        epsilon: Option<f64>,
        #[arg(long)]
        output: Option<String>,
    },
    /// Train one model per category and sweep the threshold over a test corpus.
    Eval {
        #[arg(long)]
        method: Option<Method>,
        #[arg(long)]
        train: Option<String>,
        #[arg(long)]
        test: Option<String>,
        #[command(flatten)]
        model: ModelFlags,
        /// Thresholds as `start:stop:step` or a comma-separated list.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        output: Option<String>,
    },
}

#[derive(Args)]
struct Scheme {
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Top words per category for the hard two-category scheme.
    #[arg(long)]
    l: Option<usize>,
    /// Top words kept in the shared cluster for the hard scheme.
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Args)]
struct ModelFlags {
    #[command(flatten)]
    scheme: Scheme,
    /// EM step size in (0, 1].
    #[arg(long, allow_negative_numbers = true)]
    eta: Option<f64>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,
    #[arg(long)]
    pool_rule: Option<PoolRule>,
}

impl Scheme {
    fn layer(self) -> Layer {
        Layer {
            gamma: self.gamma,
            l: self.l,
            m: self.m,
            ..Layer::default()
        }
    }
}

impl ModelFlags {
    fn layer(self) -> Layer {
        Layer {
            eta: self.eta,
            iters: self.iters,
            tol: self.tol,
            pool_rule: self.pool_rule,
            ..self.scheme.layer()
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(path) => Layer::load(path)?,
        None => Layer::default(),
    };
    match cli.command {
        Command::Counts { train, output } => {
            let flags = Layer {
                train,
                output,
                ..Layer::default()
            };
            commands::counts(&flags, &file)
        }
        Command::Clusters {
            train,
            category,
            scheme,
            pool_rule,
            output,
        } => {
            let flags = Layer {
                train,
                category,
                pool_rule,
                output,
                ..scheme.layer()
            };
            commands::clusters(&flags, &file)
        }
        Command::Train {
            method,
            category,
            train,
            model,
            trace,
            output,
        } => {
            let flags = Layer {
                method,
                category,
                train,
                trace,
                output,
                ..model.layer()
            };
            commands::train(&flags, &file)
        }
        Command::Classify {
            model,
            input,
            epsilon,
            output,
        } => {
            let flags = Layer {
                model,
                input,
                epsilon,
                output,
                ..Layer::default()
            };
            commands::classify(&flags, &file)
        }
        Command::Eval {
            method,
            train,
            test,
            model,
            grid,
            output,
        } => {
            let flags = Layer {
                method,
                train,
                test,
                grid,
                output,
                ..model.layer()
            };
            commands::eval(&flags, &file)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("mixcat: {err:#}");
            ExitCode::FAILURE
        }
    }
}

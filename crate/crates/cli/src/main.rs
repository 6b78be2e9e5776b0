//! Command-line driver for the nearplanar experiment pipeline.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nearplanar::experiment::{
    cmd_compare, cmd_evaluate, cmd_generate, cmd_layout, cmd_pipeline, cmd_render,
    records_from_csv, ExperimentConfig,
};

#[derive(Parser)]
#[command(name = "nearplanar", version, about = "Layout experiments on nearly planar graphs")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Experiment config file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the graph datasets.
    Generate(ConfigArgs),
    /// Compute the layout suite for every graph and engine.
    Layout {
        #[command(flatten)]
        config: ConfigArgs,
        /// Reuse layout files that already exist.
        #[arg(long)]
        resume: bool,
    },
    /// Evaluate quality metrics into records.csv.
    Evaluate(ConfigArgs),
    /// Run the paired significance tests into compare.csv.
    Compare(ConfigArgs),
    /// Render one graph/layout pair to SVG.
    Render {
        /// Graph file.
        #[arg(long)]
        graph: PathBuf,
        /// Layout file.
        #[arg(long)]
        layout: PathBuf,
        /// Output SVG file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every stage: generate, layout, evaluate, compare, render.
    Pipeline {
        #[command(flatten)]
        config: ConfigArgs,
        /// Reuse layout files that already exist.
        #[arg(long)]
        resume: bool,
    },
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
    }
    match cli.command {
        Command::Generate(args) => {
            let config = ExperimentConfig::load(&args.config)?;
            cmd_generate(&config, &args.out)?;
        }
        Command::Layout { config: args, resume } => {
            let config = ExperimentConfig::load(&args.config)?;
            cmd_layout(&config, &args.out, resume)?;
        }
        Command::Evaluate(args) => {
            let config = ExperimentConfig::load(&args.config)?;
            let records = cmd_evaluate(&config, &args.out)?;
            println!("wrote {} records to {}", records.len(), args.out.join("records.csv").display());
        }
        Command::Compare(args) => {
            let config = ExperimentConfig::load(&args.config)?;
            let csv = std::fs::read_to_string(args.out.join("records.csv"))?;
            let records = records_from_csv(&csv)?;
            let comparisons = cmd_compare(&config, &records, &args.out)?;
            println!(
                "wrote {} comparisons to {}",
                comparisons.len(),
                args.out.join("compare.csv").display()
            );
        }
        Command::Render { graph, layout, out } => {
            cmd_render(&graph, &layout, &out)?;
        }
        Command::Pipeline { config: args, resume } => {
            let config = ExperimentConfig::load(&args.config)?;
            cmd_pipeline(&config, &args.out, resume)?;
            println!("pipeline finished; outputs in {}", args.out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

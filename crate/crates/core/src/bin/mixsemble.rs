//! Command-line front end: experiment runs, one-shot consensus, preset
//! simulation and pairwise ARI.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mixsemble::datagen::preset;
use mixsemble::harness::{consensus, ConsensusMethod};
use mixsemble::io::{read_partitions_csv, write_dataset_csv, write_partitions_csv, write_results_csv};
use mixsemble::{adjusted_rand_index, run_experiment, summarize, EmConfig, Error, ExperimentConfig, Partition, Result};

#[derive(Debug, Parser)]
#[command(name = "mixsemble", version, about = "Consensus clustering with Dawid-Skene fusion")]
struct Cli {
    /// Worker threads for experiment runs.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
    /// Suppress informational output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Fuse the member partitions of a CSV file into one partition.
    Consensus {
        #[arg(long)]
        partitions: PathBuf,
        /// `ds` (Dawid-Skene) or `vote`.
        #[arg(long, default_value = "ds")]
        method: String,
        /// Number of clusters; labels must then lie in 0..G.
        #[arg(long)]
        g: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw a preset dataset and write it as CSV.
    Simulate {
        #[arg(long)]
        preset: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Adjusted Rand index between two single-column partition files.
    Ari {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
}

fn single_partition(path: &Path) -> Result<Partition> {
    let parts = read_partitions_csv(path, None)?;
    if parts.matrix.n_observers() != 1 {
        return Err(Error::InvalidArgument(format!(
            "{} holds {} partitions, expected 1",
            path.display(),
            parts.matrix.n_observers()
        )));
    }
    Ok(parts.matrix.column(0))
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config } => {
            let text = fs::read_to_string(&config)?;
            let mut config: ExperimentConfig =
                serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(format!("{}: {e}", config.display())))?;
            if let Some(jobs) = cli.jobs {
                config.jobs = Some(jobs as usize);
            }
            let report = run_experiment(&config)?;
            let table = summarize(&report)?;
            let dir = config.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
            fs::create_dir_all(&dir)?;
            write_results_csv(&report, dir.join("results.csv"))?;
            fs::write(dir.join("summary.txt"), &table)?;
            if !cli.quiet {
                print!("{table}");
                eprintln!("wrote results to {}", dir.display());
            }
        }
        Command::Consensus {
            partitions,
            method,
            g,
            out,
        } => {
            let method: ConsensusMethod = method.parse()?;
            let matrix = read_partitions_csv(&partitions, g)?.matrix;
            let fused = consensus(&matrix, method, &EmConfig::default(), 0)?;
            let name = match method {
                ConsensusMethod::DawidSkene => "mixsemble",
                ConsensusMethod::Vote => "vote",
            };
            let column = mixsemble::LabelMatrix::from_columns(&[fused])?;
            write_partitions_csv(&out, &[name.to_string()], &column)?;
            if !cli.quiet {
                eprintln!("wrote {} labels to {}", column.n_items(), out.display());
            }
        }
        Command::Simulate {
            preset: name,
            seed,
            out,
        } => {
            let data = preset(&name, seed)?;
            write_dataset_csv(&data, &out)?;
            if !cli.quiet {
                eprintln!("wrote {} rows to {}", data.n_items(), out.display());
            }
        }
        Command::Ari { a, b } => {
            let ari = adjusted_rand_index(&single_partition(&a)?, &single_partition(&b)?)?;
            println!("{ari}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}

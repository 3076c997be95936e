//! Runs the repeated-initialization protocol on the bundled presets and the
//! iris fixture, then prints the two summary tables.
//!
//! ```text
//! cargo run --release -p mixsemble --example experiment -- 20
//! cargo run --release -p mixsemble --example experiment -- 100 kmeans,gmm-diagonal,gmm-full
//! ```

use mixsemble::harness::{DatasetConfig, ExperimentConfig, MemberSpec};
use mixsemble::{run_experiment, summarize};

fn main() -> mixsemble::Result<()> {
    let n_runs = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(20);
    let roster = std::env::args()
        .nth(2)
        .unwrap_or_else(|| "kmeans,gmm-spherical,gmm-diagonal,gmm-full".into());
    let members = roster
        .split(',')
        .map(|m| m.parse::<MemberSpec>())
        .collect::<mixsemble::Result<Vec<_>>>()?;
    let config = ExperimentConfig {
        datasets: vec![
            DatasetConfig::preset("x2-like"),
            DatasetConfig::preset("manly-like"),
            DatasetConfig::preset("anisotropic"),
            DatasetConfig::fixture("iris"),
        ],
        members,
        n_runs,
        ..ExperimentConfig::default()
    };
    let report = run_experiment(&config)?;
    print!("{}", summarize(&report)?);
    Ok(())
}

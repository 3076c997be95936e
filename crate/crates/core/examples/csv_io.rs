//! CSV round trips: a dataset with a label column, a member partition
//! matrix, and the long and summary results files.
//!
//! ```text
//! cargo run -p mixsemble --example csv_io
//! ```

use mixsemble::datagen::preset;
use mixsemble::harness::{DatasetConfig, ExperimentConfig, MemberSpec};
use mixsemble::io::{
    load_dataset_csv, read_partitions_csv, summary_path, write_dataset_csv, write_partitions_csv, write_results_csv,
};
use mixsemble::{kmeans, run_experiment, LabelMatrix};

fn main() -> mixsemble::Result<()> {
    let dir = std::env::temp_dir().join("mixsemble-csv-io");
    std::fs::create_dir_all(&dir)?;

    let data = preset("x2-like", 0)?;
    let data_path = dir.join("x2.csv");
    write_dataset_csv(&data, &data_path)?;
    let loaded = load_dataset_csv(&data_path, Some("label"))?;
    println!(
        "{}: {} rows, columns {:?}",
        loaded.name,
        loaded.n_items(),
        loaded.column_names()
    );

    let members = (0..3)
        .map(|seed| kmeans(&loaded, 3, seed, 300).map(|f| f.partition))
        .collect::<mixsemble::Result<Vec<_>>>()?;
    let names: Vec<String> = (0..3).map(|s| format!("kmeans-{s}")).collect();
    let parts_path = dir.join("partitions.csv");
    write_partitions_csv(&parts_path, &names, &LabelMatrix::from_columns(&members)?)?;
    let parts = read_partitions_csv(&parts_path, Some(3))?;
    println!(
        "read {} member partitions {:?}",
        parts.matrix.n_observers(),
        parts.names
    );

    let config = ExperimentConfig {
        datasets: vec![DatasetConfig {
            partitions: Some(parts_path),
            ..DatasetConfig::csv(&data_path, "label")
        }],
        members: vec![MemberSpec::KMeans],
        n_runs: 1,
        ..ExperimentConfig::default()
    };
    let results = dir.join("results.csv");
    write_results_csv(&run_experiment(&config)?, &results)?;
    print!("{}", std::fs::read_to_string(summary_path(&results))?);
    Ok(())
}

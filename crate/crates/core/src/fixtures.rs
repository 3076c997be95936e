//! Datasets bundled with the crate.

use std::path::Path;

use crate::datagen::Dataset;
use crate::error::Result;
use crate::io::read_dataset;

const IRIS_CSV: &str = include_str!("../data/iris.csv");

/// Fisher's iris measurements: 150 flowers, four features, three species
/// (column `species`).
pub fn iris() -> Result<Dataset> {
    read_dataset(IRIS_CSV.as_bytes(), Path::new("data/iris.csv"), "iris", Some("species"))
}

/// Names accepted by [`fixture`].
pub const FIXTURES: [&str; 1] = ["iris"];

pub fn fixture(name: &str) -> Result<Dataset> {
    match name {
        "iris" => iris(),
        _ => Err(crate::error::Error::UnknownPreset(name.to_string())),
    }
}

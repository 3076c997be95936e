//! Draws Gaussian and Manly-skewed mixtures from a custom specification and
//! from the bundled presets.
//!
//! ```text
//! cargo run -p mixsemble --example simulate
//! ```

use mixsemble::datagen::{preset, PRESETS};
use mixsemble::{sample_gaussian_mixture, sample_manly_mixture, MixtureSpec};
use nalgebra::DMatrix;

fn column_mean(data: &mixsemble::Dataset, j: usize) -> f64 {
    data.features().column(j).mean()
}

fn main() -> mixsemble::Result<()> {
    let mut spec = MixtureSpec {
        weights: vec![0.5, 0.5],
        means: vec![vec![0.0], vec![4.0]],
        covariances: vec![DMatrix::identity(1, 1), DMatrix::identity(1, 1)],
        skew: None,
    };
    let gaussian = sample_gaussian_mixture(&spec, 2000, 1)?;
    spec.skew = Some(vec![vec![0.4], vec![-0.1]]);
    let skewed = sample_manly_mixture(&spec, 2000, 1)?;
    println!(
        "gaussian mean {:.3}, manly mean {:.3}",
        column_mean(&gaussian, 0),
        column_mean(&skewed, 0)
    );

    for name in PRESETS {
        let data = preset(name, 0)?;
        let sizes = data.truth().map(|t| t.cluster_sizes()).unwrap_or_default();
        println!(
            "{name:<12} {} x {} cluster sizes {sizes:?}",
            data.n_items(),
            data.n_features()
        );
    }
    Ok(())
}

//! k-means and the three Gaussian-mixture covariance families on an
//! anisotropic preset, each GMM started from the k-means partition.
//!
//! ```text
//! cargo run --release -p mixsemble --example clusterers
//! ```

use mixsemble::datagen::preset;
use mixsemble::{adjusted_rand_index, gmm_fit, kmeans, CovarianceFamily, GmmConfig};

fn main() -> mixsemble::Result<()> {
    let data = preset("anisotropic", 0)?;
    let truth = data.truth().expect("presets carry ground truth").clone();
    let start = kmeans(&data, 3, 11, 300)?;
    println!(
        "kmeans         ARI {:.4}  WCSS {:.2}  iterations {}",
        adjusted_rand_index(&start.partition, &truth)?,
        -start.loglik,
        start.n_iterations
    );
    for family in CovarianceFamily::ALL {
        let fit = gmm_fit(&data, 3, family, &start.partition, &GmmConfig::default())?;
        println!(
            "gmm-{:<10} ARI {:.4}  loglik {:.2}  iterations {}",
            family.as_str(),
            adjusted_rand_index(&fit.partition, &truth)?,
            fit.loglik,
            fit.n_iterations
        );
    }
    Ok(())
}

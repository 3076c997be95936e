//! Dawid-Skene fusion of three noisy partitions: two reliable members and
//! one that flips a third of its labels.
//!
//! ```text
//! cargo run -p mixsemble --example dawid_skene
//! ```

use mixsemble::dawid_skene::{fit, hard_labels};
use mixsemble::{adjusted_rand_index, EmConfig, LabelMatrix, Partition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> mixsemble::Result<()> {
    let g = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let truth: Vec<usize> = (0..150).map(|i| i % g).collect();
    let noisy: Vec<usize> = truth
        .iter()
        .map(|&l| {
            if rng.random_bool(0.3) {
                (l + rng.random_range(1..g)) % g
            } else {
                l
            }
        })
        .collect();
    let truth = Partition::new(truth, g)?;
    let matrix = LabelMatrix::from_columns(&[truth.clone(), truth.clone(), Partition::new(noisy, g)?])?;

    let model = fit(&matrix, &EmConfig::default())?;
    println!(
        "converged {} after {} iterations, log-likelihood {:.4}",
        model.converged, model.n_iterations, model.log_likelihood
    );
    println!("priors {:?}", model.priors.as_slice());
    for k in 0..matrix.n_observers() {
        println!(
            "member {k} error-rate diagonal mean {:.3}",
            model.error_rates.diagonal_mean(k)
        );
    }
    println!(
        "ARI of fused labels {:.4}",
        adjusted_rand_index(&hard_labels(&model), &truth)?
    );
    Ok(())
}

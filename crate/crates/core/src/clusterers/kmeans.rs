use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{weighted::WeightedIndex, Distribution};

use super::{squared_distance, FitResult};
use crate::datagen::Dataset;
use crate::error::{Error, Result};
use crate::types::Partition;

/// Nearest center for every row, ties to the lowest center index.
fn assign(data: &nalgebra::DMatrix<f64>, centers: &[Vec<f64>], labels: &mut [usize]) -> f64 {
    let mut total = 0.0;
    for (i, label) in labels.iter_mut().enumerate() {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (c, center) in centers.iter().enumerate() {
            let d = squared_distance(data, i, center);
            if d < best_d {
                best = c;
                best_d = d;
            }
        }
        *label = best;
        total += best_d;
    }
    total
}

/// `sum_i min_c |x_i - c|^2`.
fn objective(data: &nalgebra::DMatrix<f64>, centers: &[Vec<f64>]) -> f64 {
    (0..data.nrows())
        .map(|i| {
            centers
                .iter()
                .map(|c| squared_distance(data, i, c))
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

/// Seeded D²-weighted choice of `g` distinct rows: the first uniformly, each
/// further row with probability proportional to its squared distance to the
/// nearest chosen center. Duplicates fill in when fewer than `g` distinct
/// rows exist.
fn initial_centers(data: &nalgebra::DMatrix<f64>, g: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = data.nrows();
    let row = |i: usize| data.row(i).iter().copied().collect::<Vec<f64>>();
    let mut centers = vec![row(rng.random_range(0..n))];
    let mut nearest: Vec<f64> = (0..n).map(|i| squared_distance(data, i, &centers[0])).collect();
    while centers.len() < g {
        let next = match WeightedIndex::new(&nearest) {
            Ok(dist) => dist.sample(rng),
            // every row coincides with a center
            Err(_) => rng.random_range(0..n),
        };
        let center = row(next);
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(squared_distance(data, i, &center));
        }
        centers.push(center);
    }
    centers
}

/// Lloyd's algorithm from `g` seeded random distinct data points.
///
/// A cluster that loses all its points is re-seeded at the point farthest
/// from its current center. Stops when assignments no longer change or
/// after `max_iter` center updates.
pub fn kmeans(data: &Dataset, g: usize, seed: u64, max_iter: usize) -> Result<FitResult> {
    let x = data.features();
    let n = x.nrows();
    let d = x.ncols();
    if g == 0 {
        return Err(Error::InvalidArgument("number of clusters must be positive".into()));
    }
    if n < g {
        return Err(Error::TooFewPoints {
            n_points: n,
            n_clusters: g,
        });
    }
    if max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = initial_centers(x, g, &mut rng);
    let mut labels = vec![0usize; n];
    assign(x, &centers, &mut labels);
    let mut trace = Vec::new();
    let mut converged = false;
    let mut n_iterations = 0;

    while n_iterations < max_iter {
        n_iterations += 1;
        let mut sums = vec![vec![0.0; d]; g];
        let mut counts = vec![0usize; g];
        for (i, &l) in labels.iter().enumerate() {
            counts[l] += 1;
            for (j, s) in sums[l].iter_mut().enumerate() {
                *s += x[(i, j)];
            }
        }
        let mut taken = Vec::new();
        for c in 0..g {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
        for c in 0..g {
            if counts[c] == 0 {
                let far = (0..n)
                    .filter(|i| !taken.contains(i))
                    .max_by(|&a, &b| {
                        let da = squared_distance(x, a, &centers[labels[a]]);
                        let db = squared_distance(x, b, &centers[labels[b]]);
                        da.total_cmp(&db).then(b.cmp(&a))
                    })
                    .expect("n >= g leaves a candidate point");
                taken.push(far);
                centers[c] = x.row(far).iter().copied().collect();
            }
        }
        trace.push(-objective(x, &centers));

        let previous = labels.clone();
        assign(x, &centers, &mut labels);
        if labels == previous && taken.is_empty() {
            converged = true;
            break;
        }
    }

    let wcss = objective(x, &centers);
    Ok(FitResult {
        partition: Partition::new(labels, g)?,
        params: None,
        loglik: -wcss,
        trace,
        n_iterations,
        converged,
    })
}

//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use mixsemble::{LabelMatrix, Partition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_labels(rng: &mut ChaCha8Rng, n: usize, g: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..g)).collect()
}

pub fn partition(labels: Vec<usize>, g: usize) -> Partition {
    Partition::new(labels, g).unwrap()
}

/// ARI from explicit O(N²) pair enumeration.
pub fn brute_ari(a: &[usize], b: &[usize]) -> f64 {
    let (mut ss, mut sd, mut ds, mut dd) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            match (a[i] == a[j], b[i] == b[j]) {
                (true, true) => ss += 1.0,
                (true, false) => sd += 1.0,
                (false, true) => ds += 1.0,
                (false, false) => dd += 1.0,
            }
        }
    }
    let denom = (ss + sd) * (sd + dd) + (ss + ds) * (ds + dd);
    if denom == 0.0 {
        return if sd == 0.0 && ds == 0.0 { 1.0 } else { 0.0 };
    }
    2.0 * (ss * dd - sd * ds) / denom
}

/// Every permutation of `0..n`.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Number of items where `perm[other[i]] == reference[i]`.
pub fn agreement(reference: &[usize], other: &[usize], perm: &[usize]) -> usize {
    reference.iter().zip(other).filter(|(r, o)| perm[**o] == **r).count()
}

/// `truth` with `n_flips` distinct seeded items moved to a different label.
pub fn flipped(truth: &[usize], g: usize, n_flips: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..truth.len()).collect();
    rand::seq::SliceRandom::shuffle(idx.as_mut_slice(), rng);
    let mut out = truth.to_vec();
    for &i in &idx[..n_flips] {
        out[i] = (truth[i] + rng.random_range(1..g)) % g;
    }
    out
}

/// Straightforward linear-space Dawid-Skene EM with the same initializer,
/// smoothing rule and iteration count as the library.
pub struct ReferenceFit {
    pub z: Vec<Vec<f64>>,
    pub pi: Vec<f64>,
    pub eps: Vec<Vec<Vec<f64>>>,
}

pub fn reference_dawid_skene(x: &LabelMatrix, s: f64, iterations: usize) -> ReferenceFit {
    let (n, k, g) = (x.n_items(), x.n_observers(), x.n_clusters());
    let mut z: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = vec![0.0; g];
            for obs in 0..k {
                row[x.get(i, obs)] += 1.0 / k as f64;
            }
            row
        })
        .collect();
    let m_step = |z: &Vec<Vec<f64>>| {
        let pi: Vec<f64> = (0..g).map(|c| z.iter().map(|r| r[c]).sum::<f64>() / n as f64).collect();
        let eps: Vec<Vec<Vec<f64>>> = (0..k)
            .map(|obs| {
                (0..g)
                    .map(|c| {
                        let total: f64 = z.iter().map(|r| r[c]).sum();
                        (0..g)
                            .map(|h| {
                                let hit: f64 = (0..n).filter(|&i| x.get(i, obs) == h).map(|i| z[i][c]).sum();
                                (s + hit) / (g as f64 * s + total)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        (pi, eps)
    };
    let e_step = |pi: &Vec<f64>, eps: &Vec<Vec<Vec<f64>>>| -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| {
                let w: Vec<f64> = (0..g)
                    .map(|c| pi[c] * (0..k).map(|obs| eps[obs][c][x.get(i, obs)]).product::<f64>())
                    .collect();
                let total: f64 = w.iter().sum();
                w.iter().map(|v| v / total).collect()
            })
            .collect()
    };
    let (mut pi, mut eps) = m_step(&z);
    for _ in 0..iterations {
        z = e_step(&pi, &eps);
        (pi, eps) = m_step(&z);
    }
    z = e_step(&pi, &eps);
    ReferenceFit { z, pi, eps }
}

//! Dawid-Skene consensus over the hard partitions of K ensemble members.
//!
//! Every member is treated as a noisy annotator with its own confusion
//! matrix `eps[k][g][h] = P(member k reports h | latent class g)`. EM
//! alternates between posterior class responsibilities (E-step) and
//! closed-form updates of the class priors and confusion matrices (M-step).
//!
//! The fit is deterministic: it starts from the members' vote shares,
//! derives parameters from them with an M-step, then alternates E and M
//! steps until the relative change of the objective drops below
//! [`EmConfig::rel_tolerance`].
//!
//! With a positive `smoothing` pseudocount `s` the M-step is the MAP update
//! under a symmetric Dirichlet(1 + s) prior on each confusion row. The
//! objective tracked in [`ConsensusModel::loglik_trace`] is then the
//! log-likelihood plus `s * sum(ln eps)`, which is the quantity EM provably
//! does not decrease. With `s = 0` the two coincide.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{ErrorRates, LabelMatrix, Partition, Priors, Responsibilities};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmConfig {
    pub max_iterations: usize,
    /// Stop once `|delta| / (1 + |objective|)` falls below this value.
    pub rel_tolerance: f64,
    /// Pseudocount added to every confusion-matrix cell in the M-step.
    pub smoothing: f64,
}

impl Default for EmConfig {
    fn default() -> Self {
        Self {
            max_iterations: 1000,
            rel_tolerance: 1e-8,
            smoothing: 0.01,
        }
    }
}

impl EmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 1 {
            return Err(Error::InvalidArgument("max_iterations must be at least 1".into()));
        }
        if self.rel_tolerance.is_nan() || self.rel_tolerance <= 0.0 {
            return Err(Error::InvalidArgument("rel_tolerance must be positive".into()));
        }
        if !self.smoothing.is_finite() || self.smoothing < 0.0 {
            return Err(Error::InvalidArgument("smoothing must be a finite value >= 0".into()));
        }
        Ok(())
    }
}

/// Fitted Dawid-Skene state.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusModel {
    pub priors: Priors,
    pub error_rates: ErrorRates,
    /// Posterior class probabilities under the final parameters.
    pub responsibilities: Responsibilities,
    /// EM objective (nats) after the initial M-step and after every iteration.
    pub loglik_trace: Vec<f64>,
    /// Plain log-likelihood of the data under the final parameters.
    pub log_likelihood: f64,
    pub n_iterations: usize,
    pub converged: bool,
}

fn check_shapes(matrix: &LabelMatrix, priors: &Priors, error_rates: &ErrorRates) -> Result<()> {
    let g = matrix.n_clusters();
    for other in [priors.n_clusters(), error_rates.n_clusters()] {
        if other != g {
            return Err(Error::ClusterCountMismatch { left: g, right: other });
        }
    }
    if error_rates.n_observers() != matrix.n_observers() {
        return Err(Error::InvalidArgument(format!(
            "error rates cover {} observers, label matrix has {}",
            error_rates.n_observers(),
            matrix.n_observers()
        )));
    }
    Ok(())
}

/// `ln pi_g + sum_k ln eps[k][g][x_ik]` for every class `g`.
fn class_log_weights(row: &[usize], log_pi: &[f64], log_eps: &ErrorRates, out: &mut [f64]) {
    for (g, w) in out.iter_mut().enumerate() {
        *w = log_pi[g];
        for (k, &h) in row.iter().enumerate() {
            *w += log_eps.get(k, g, h);
        }
    }
}

fn log_parameters(priors: &Priors, error_rates: &ErrorRates) -> (Vec<f64>, ErrorRates) {
    let log_pi = priors.as_slice().iter().map(|p| p.ln()).collect();
    let g = error_rates.n_clusters();
    let k = error_rates.n_observers();
    let mut flat = Vec::with_capacity(k * g * g);
    for obs in 0..k {
        for truth in 0..g {
            flat.extend(error_rates.row(obs, truth).iter().map(|e| e.ln()));
        }
    }
    (log_pi, ErrorRates::from_flat(flat, k, g))
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Vote share of each class among the members labeling an item.
pub fn init_responsibilities(matrix: &LabelMatrix) -> Responsibilities {
    let g = matrix.n_clusters();
    let k = matrix.n_observers() as f64;
    let mut z = vec![0.0; matrix.n_items() * g];
    for (i, row) in matrix.rows().enumerate() {
        for &h in row {
            z[i * g + h] += 1.0;
        }
        for v in &mut z[i * g..(i + 1) * g] {
            *v /= k;
        }
    }
    Responsibilities::from_flat(z, matrix.n_items(), g)
}

pub fn e_step(matrix: &LabelMatrix, priors: &Priors, error_rates: &ErrorRates) -> Result<Responsibilities> {
    check_shapes(matrix, priors, error_rates)?;
    let g = matrix.n_clusters();
    let (log_pi, log_eps) = log_parameters(priors, error_rates);
    let mut z = vec![0.0; matrix.n_items() * g];
    for (i, (row, out)) in matrix.rows().zip(z.chunks_exact_mut(g)).enumerate() {
        class_log_weights(row, &log_pi, &log_eps, out);
        let max = out.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Err(Error::DegenerateRow { item: i });
        }
        let mut total = 0.0;
        for v in out.iter_mut() {
            *v = (*v - max).exp();
            total += *v;
        }
        for v in out.iter_mut() {
            *v /= total;
        }
    }
    Ok(Responsibilities::from_flat(z, matrix.n_items(), g))
}

/// Closed-form parameter update from responsibilities.
///
/// `eps[k][g][h] = (s + sum_i z_ig [x_ik = h]) / (G s + sum_i z_ig)` and
/// `pi_g = sum_i z_ig / N`.
pub fn m_step(
    matrix: &LabelMatrix,
    responsibilities: &Responsibilities,
    smoothing: f64,
) -> Result<(Priors, ErrorRates)> {
    if !smoothing.is_finite() || smoothing < 0.0 {
        return Err(Error::InvalidArgument("smoothing must be a finite value >= 0".into()));
    }
    let g = matrix.n_clusters();
    let k = matrix.n_observers();
    let n = matrix.n_items();
    if responsibilities.n_items() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: responsibilities.n_items(),
        });
    }
    if responsibilities.n_clusters() != g {
        return Err(Error::ClusterCountMismatch {
            left: g,
            right: responsibilities.n_clusters(),
        });
    }

    let mut mass = vec![0.0; g];
    let mut counts = vec![0.0; k * g * g];
    for (row, z) in matrix.rows().zip(responsibilities.rows()) {
        for (truth, &zg) in z.iter().enumerate() {
            mass[truth] += zg;
            for (obs, &h) in row.iter().enumerate() {
                counts[(obs * g + truth) * g + h] += zg;
            }
        }
    }

    if smoothing == 0.0 {
        if let Some(cluster) = mass.iter().position(|&m| m <= 0.0) {
            return Err(Error::EmptyCluster { cluster });
        }
    }
    for cell in counts.chunks_exact_mut(g) {
        let mut total = 0.0;
        for c in cell.iter_mut() {
            *c += smoothing;
            total += *c;
        }
        for c in cell.iter_mut() {
            *c /= total;
        }
    }
    let priors = mass.iter().map(|m| m / n as f64).collect();
    Ok((Priors::from_vec_unchecked(priors), ErrorRates::from_flat(counts, k, g)))
}

/// `sum_i ln sum_g pi_g prod_k eps[k][g][x_ik]`, evaluated per item with
/// log-sum-exp.
pub fn log_likelihood(matrix: &LabelMatrix, priors: &Priors, error_rates: &ErrorRates) -> Result<f64> {
    check_shapes(matrix, priors, error_rates)?;
    let (log_pi, log_eps) = log_parameters(priors, error_rates);
    let mut w = vec![0.0; matrix.n_clusters()];
    let mut total = 0.0;
    for (i, row) in matrix.rows().enumerate() {
        class_log_weights(row, &log_pi, &log_eps, &mut w);
        let item = log_sum_exp(&w);
        if !item.is_finite() {
            return Err(Error::NonFinite { item: i });
        }
        total += item;
    }
    Ok(total)
}

/// Log-likelihood plus the Dirichlet smoothing term `s * sum ln eps`.
fn objective(matrix: &LabelMatrix, priors: &Priors, error_rates: &ErrorRates, smoothing: f64) -> Result<f64> {
    let ll = log_likelihood(matrix, priors, error_rates)?;
    if smoothing == 0.0 {
        return Ok(ll);
    }
    let g = error_rates.n_clusters();
    let penalty: f64 = (0..error_rates.n_observers())
        .flat_map(|k| (0..g).map(move |t| (k, t)))
        .flat_map(|(k, t)| error_rates.row(k, t).iter())
        .map(|e| e.ln())
        .sum();
    Ok(ll + smoothing * penalty)
}

pub fn fit(matrix: &LabelMatrix, config: &EmConfig) -> Result<ConsensusModel> {
    config.validate()?;
    let s = config.smoothing;
    let start = init_responsibilities(matrix);
    let (mut priors, mut error_rates) = m_step(matrix, &start, s)?;
    let mut current = objective(matrix, &priors, &error_rates, s)?;
    let mut trace = vec![current];
    let mut converged = false;
    let mut n_iterations = 0;

    while n_iterations < config.max_iterations {
        let z = e_step(matrix, &priors, &error_rates)?;
        (priors, error_rates) = m_step(matrix, &z, s)?;
        let next = objective(matrix, &priors, &error_rates, s)?;
        n_iterations += 1;
        trace.push(next);
        let change = (next - current).abs() / (1.0 + next.abs());
        current = next;
        if change < config.rel_tolerance {
            converged = true;
            break;
        }
    }

    let responsibilities = e_step(matrix, &priors, &error_rates)?;
    let log_likelihood = log_likelihood(matrix, &priors, &error_rates)?;
    Ok(ConsensusModel {
        priors,
        error_rates,
        responsibilities,
        loglik_trace: trace,
        log_likelihood,
        n_iterations,
        converged,
    })
}

/// Argmax of the final responsibilities, ties to the lowest class.
pub fn hard_labels(model: &ConsensusModel) -> Partition {
    model.responsibilities.argmax()
}

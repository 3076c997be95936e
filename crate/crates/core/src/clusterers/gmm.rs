use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use super::{CovarianceFamily, FitResult, GmmParams};
use crate::datagen::Dataset;
use crate::error::{Error, Result};
use crate::types::Partition;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GmmConfig {
    pub max_iterations: usize,
    /// Stop once `|delta loglik| / (1 + |loglik|)` falls below this value.
    pub rel_tolerance: f64,
    /// Covariance floor added to every diagonal, as a fraction of the mean
    /// per-feature sample variance.
    pub reg_scale: f64,
}

impl Default for GmmConfig {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            rel_tolerance: 1e-8,
            reg_scale: 1e-6,
        }
    }
}

/// Components whose responsibility mass drops below this are treated as
/// collapsed.
const MIN_COMPONENT_MASS: f64 = 1e-8;

struct Component {
    log_weight: f64,
    mean: DVector<f64>,
    chol: Cholesky<f64, Dyn>,
    log_det: f64,
}

fn covariance_floor(x: &DMatrix<f64>, reg_scale: f64) -> f64 {
    let n = x.nrows() as f64;
    let d = x.ncols();
    let total_var: f64 = (0..d)
        .map(|j| {
            let col = x.column(j);
            let mean = col.sum() / n;
            col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n
        })
        .sum();
    let scale = total_var / d as f64;
    reg_scale * if scale > 0.0 { scale } else { 1.0 }
}

fn m_step(
    x: &DMatrix<f64>,
    resp: &DMatrix<f64>,
    family: CovarianceFamily,
    floor: f64,
) -> Result<(GmmParams, Vec<Component>)> {
    let n = x.nrows();
    let d = x.ncols();
    let g = resp.ncols();
    let mut params = GmmParams {
        weights: Vec::with_capacity(g),
        means: Vec::with_capacity(g),
        covariances: Vec::with_capacity(g),
    };
    let mut components = Vec::with_capacity(g);

    for c in 0..g {
        let mass: f64 = resp.column(c).sum();
        if mass < MIN_COMPONENT_MASS {
            return Err(Error::SingularComponent { component: c });
        }
        let mut mean = DVector::zeros(d);
        for i in 0..n {
            let r = resp[(i, c)];
            for j in 0..d {
                mean[j] += r * x[(i, j)];
            }
        }
        mean /= mass;

        let mut scatter = DMatrix::zeros(d, d);
        for i in 0..n {
            let r = resp[(i, c)];
            for a in 0..d {
                let da = x[(i, a)] - mean[a];
                for b in a..d {
                    scatter[(a, b)] += r * da * (x[(i, b)] - mean[b]);
                }
            }
        }
        for a in 0..d {
            for b in 0..a {
                scatter[(a, b)] = scatter[(b, a)];
            }
        }
        scatter /= mass;

        let mut cov = match family {
            CovarianceFamily::Full => scatter,
            CovarianceFamily::Diagonal => DMatrix::from_diagonal(&scatter.diagonal()),
            CovarianceFamily::Spherical => DMatrix::identity(d, d) * (scatter.trace() / d as f64),
        };
        for a in 0..d {
            cov[(a, a)] += floor;
        }
        let chol = cov
            .clone()
            .cholesky()
            .ok_or(Error::SingularComponent { component: c })?;
        let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>();
        let weight = mass / n as f64;
        components.push(Component {
            log_weight: weight.ln(),
            mean: mean.clone(),
            chol,
            log_det,
        });
        params.weights.push(weight);
        params.means.push(mean);
        params.covariances.push(cov);
    }
    Ok((params, components))
}

/// Fills `resp` with posterior responsibilities and returns the
/// log-likelihood.
fn e_step(x: &DMatrix<f64>, components: &[Component], resp: &mut DMatrix<f64>) -> f64 {
    let d = x.ncols();
    let norm = d as f64 * (2.0 * PI).ln();
    let mut logp = vec![0.0; components.len()];
    let mut total = 0.0;
    for i in 0..x.nrows() {
        let xi = DVector::from_iterator(d, x.row(i).iter().copied());
        for (c, comp) in components.iter().enumerate() {
            let diff = &xi - &comp.mean;
            let solved = comp
                .chol
                .l_dirty()
                .solve_lower_triangular(&diff)
                .expect("Cholesky factor has a positive diagonal");
            logp[c] = comp.log_weight - 0.5 * (norm + comp.log_det + solved.norm_squared());
        }
        let max = logp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = logp.iter().map(|v| (v - max).exp()).sum();
        let lse = max + sum.ln();
        for (c, v) in logp.iter().enumerate() {
            resp[(i, c)] = (v - lse).exp();
        }
        total += lse;
    }
    total
}

fn argmax_rows(resp: &DMatrix<f64>) -> Vec<usize> {
    resp.row_iter()
        .map(|r| {
            let mut best = 0;
            for c in 1..r.len() {
                if r[c] > r[best] {
                    best = c;
                }
            }
            best
        })
        .collect()
}

/// Gaussian-mixture EM started from a hard partition.
///
/// The first M-step uses `init` as one-hot responsibilities. Every
/// covariance gets a floor of `reg_scale` times the mean per-feature sample
/// variance added to its diagonal.
pub fn gmm_fit(
    data: &Dataset,
    g: usize,
    family: CovarianceFamily,
    init: &Partition,
    config: &GmmConfig,
) -> Result<FitResult> {
    let x = data.features();
    let n = x.nrows();
    if g == 0 {
        return Err(Error::InvalidArgument("number of components must be positive".into()));
    }
    if n < g {
        return Err(Error::TooFewPoints {
            n_points: n,
            n_clusters: g,
        });
    }
    if init.len() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: init.len(),
        });
    }
    if init.n_clusters() != g {
        return Err(Error::ClusterCountMismatch {
            left: g,
            right: init.n_clusters(),
        });
    }
    if config.max_iterations == 0
        || config.rel_tolerance.is_nan()
        || config.rel_tolerance <= 0.0
        || config.reg_scale.is_nan()
        || config.reg_scale < 0.0
    {
        return Err(Error::InvalidArgument("invalid mixture EM configuration".into()));
    }

    let floor = covariance_floor(x, config.reg_scale);
    let mut resp = DMatrix::zeros(n, g);
    for (i, &l) in init.labels().iter().enumerate() {
        resp[(i, l)] = 1.0;
    }

    let mut trace = Vec::new();
    let mut converged = false;
    let mut n_iterations = 0;
    let mut params;
    loop {
        let (p, components) = m_step(x, &resp, family, floor)?;
        params = p;
        let ll = e_step(x, &components, &mut resp);
        n_iterations += 1;
        if let Some(&prev) = trace.last() {
            let prev: f64 = prev;
            if (ll - prev).abs() / (1.0 + ll.abs()) < config.rel_tolerance {
                converged = true;
            }
        }
        trace.push(ll);
        if converged || n_iterations >= config.max_iterations {
            break;
        }
    }

    let partition = Partition::new(argmax_rows(&resp), g)?;
    Ok(FitResult {
        partition,
        params: Some(params),
        loglik: *trace.last().expect("at least one iteration"),
        trace,
        n_iterations,
        converged,
    })
}

//! Seeded synthetic datasets drawn from finite mixtures.
//!
//! Two styles are available: plain Gaussian mixtures and Manly mixtures,
//! where each Gaussian draw `y` is pushed through the inverse Manly
//! transformation `x_j = ln(1 + lambda_j y_j) / lambda_j` to produce skewed
//! clusters. Both samplers consume the random stream in the same order, so
//! a Manly mixture with every `lambda = 0` reproduces the Gaussian sampler
//! bit for bit.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::types::Partition;

/// Give up after this many consecutive rejected Manly draws.
pub const MAX_CONSECUTIVE_REJECTIONS: usize = 1_000_000;

/// An `N x d` feature matrix with optional ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    features: DMatrix<f64>,
    truth: Option<Partition>,
    column_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        features: DMatrix<f64>,
        truth: Option<Partition>,
        column_names: Vec<String>,
    ) -> Result<Self> {
        if features.nrows() == 0 || features.ncols() == 0 {
            return Err(Error::EmptyInput);
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("dataset contains non-finite values".into()));
        }
        if let Some(t) = &truth {
            if t.len() != features.nrows() {
                return Err(Error::LengthMismatch {
                    left: features.nrows(),
                    right: t.len(),
                });
            }
        }
        if column_names.len() != features.ncols() {
            return Err(Error::LengthMismatch {
                left: features.ncols(),
                right: column_names.len(),
            });
        }
        Ok(Self {
            name: name.into(),
            features,
            truth,
            column_names,
        })
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn truth(&self) -> Option<&Partition> {
        self.truth.as_ref()
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn n_items(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }
}

/// Parameters of a finite mixture: weights, component means and
/// covariances, and optional per-component Manly skewness parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureSpec {
    pub weights: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub covariances: Vec<DMatrix<f64>>,
    pub skew: Option<Vec<Vec<f64>>>,
}

impl MixtureSpec {
    pub fn n_components(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self) -> usize {
        self.means.first().map_or(0, Vec::len)
    }

    /// Checks the specification and returns the Cholesky factor of each
    /// component covariance.
    fn validate(&self) -> Result<Vec<DMatrix<f64>>> {
        let g = self.weights.len();
        let d = self.dim();
        if g == 0 || d == 0 {
            return Err(Error::BadSpec("no components or zero dimension".into()));
        }
        if self.weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::BadSpec("weights must be finite and non-negative".into()));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::BadSpec(format!("weights sum to {total}")));
        }
        if self.means.len() != g || self.means.iter().any(|m| m.len() != d) {
            return Err(Error::BadSpec("means must be G rows of length d".into()));
        }
        if self.means.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::BadSpec("means must be finite".into()));
        }
        if let Some(skew) = &self.skew {
            if skew.len() != g || skew.iter().any(|s| s.len() != d || s.iter().any(|v| !v.is_finite())) {
                return Err(Error::BadSpec("skew must be G finite rows of length d".into()));
            }
        }
        if self.covariances.len() != g {
            return Err(Error::BadSpec("one covariance per component is required".into()));
        }
        self.covariances
            .iter()
            .enumerate()
            .map(|(c, cov)| {
                if cov.shape() != (d, d) {
                    return Err(Error::BadSpec(format!("covariance {c} is not {d}x{d}")));
                }
                if (cov - cov.transpose()).amax() > 1e-12 * cov.amax().max(1.0) {
                    return Err(Error::BadSpec(format!("covariance {c} is not symmetric")));
                }
                cov.clone()
                    .cholesky()
                    .map(|ch| ch.l())
                    .ok_or_else(|| Error::BadSpec(format!("covariance {c} is not positive definite")))
            })
            .collect()
    }
}

/// Inverse Manly transformation of one coordinate.
pub fn manly_inverse(y: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        y
    } else {
        (lambda * y).ln_1p() / lambda
    }
}

/// Manly transformation of one coordinate.
pub fn manly_forward(x: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        x
    } else {
        (lambda * x).exp_m1() / lambda
    }
}

fn pick_component(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (c, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc && *w > 0.0 {
            return c;
        }
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// Draws `n` items; returns the emitted dataset and the underlying Gaussian
/// draws (identical to the features when no skew is applied).
pub(crate) fn sample_with_latent(
    spec: &MixtureSpec,
    n: usize,
    seed: u64,
    name: &str,
) -> Result<(Dataset, DMatrix<f64>)> {
    let factors = spec.validate()?;
    if n == 0 {
        return Err(Error::BadSpec("sample size must be positive".into()));
    }
    let d = spec.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut latent = DMatrix::zeros(n, d);
    let mut features = DMatrix::zeros(n, d);
    let mut labels = Vec::with_capacity(n);
    let mut z = DVector::zeros(d);

    for i in 0..n {
        let c = pick_component(&mut rng, &spec.weights);
        let lambda = spec.skew.as_ref().map(|s| s[c].as_slice());
        let mut rejections = 0;
        let y = loop {
            for v in z.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
            let y = DVector::from_column_slice(&spec.means[c]) + &factors[c] * &z;
            let feasible = match lambda {
                Some(l) => y.iter().zip(l).all(|(yj, lj)| lj * yj + 1.0 > 0.0),
                None => true,
            };
            if feasible {
                break y;
            }
            rejections += 1;
            if rejections > MAX_CONSECUTIVE_REJECTIONS {
                return Err(Error::RejectionOverflow(MAX_CONSECUTIVE_REJECTIONS));
            }
        };
        for j in 0..d {
            latent[(i, j)] = y[j];
            features[(i, j)] = match lambda {
                Some(l) => manly_inverse(y[j], l[j]),
                None => y[j],
            };
        }
        labels.push(c);
    }

    let truth = Partition::new(labels, spec.n_components())?;
    let names = (1..=d).map(|j| format!("x{j}")).collect();
    Ok((Dataset::new(name, features, Some(truth), names)?, latent))
}

pub fn sample_gaussian_mixture(spec: &MixtureSpec, n: usize, seed: u64) -> Result<Dataset> {
    if spec.skew.is_some() {
        return Err(Error::BadSpec("Gaussian mixture specs carry no skew parameters".into()));
    }
    Ok(sample_with_latent(spec, n, seed, "gaussian-mixture")?.0)
}

pub fn sample_manly_mixture(spec: &MixtureSpec, n: usize, seed: u64) -> Result<Dataset> {
    if spec.skew.is_none() {
        return Err(Error::BadSpec("Manly mixture specs need skew parameters".into()));
    }
    Ok(sample_with_latent(spec, n, seed, "manly-mixture")?.0)
}

fn cov2(sxx: f64, sxy: f64, syy: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[sxx, sxy, sxy, syy])
}

/// Names accepted by [`preset`].
pub const PRESETS: [&str; 3] = ["x2-like", "manly-like", "anisotropic"];

/// Number of clusters and default sample size of a named preset.
pub fn preset_shape(name: &str) -> Result<(usize, usize)> {
    match name {
        "x2-like" => Ok((3, 300)),
        "manly-like" => Ok((3, 1000)),
        "anisotropic" => Ok((3, 600)),
        _ => Err(Error::UnknownPreset(name.to_string())),
    }
}

/// Mixture parameters behind a named preset.
///
/// * `x2-like`: three well separated bivariate Gaussian clusters.
/// * `manly-like`: three skewed bivariate clusters from the Manly sampler.
/// * `anisotropic`: three elongated, differently oriented Gaussian clusters
///   with moderate overlap.
pub fn preset_spec(name: &str) -> Result<MixtureSpec> {
    let third = 1.0 / 3.0;
    match name {
        "x2-like" => Ok(MixtureSpec {
            weights: vec![third; 3],
            means: vec![vec![0.0, 0.0], vec![6.0, 0.0], vec![3.0, 5.5]],
            covariances: vec![cov2(1.0, 0.2, 0.8), cov2(0.8, -0.1, 1.0), cov2(0.9, 0.0, 0.9)],
            skew: None,
        }),
        "manly-like" => Ok(MixtureSpec {
            weights: vec![0.25, 0.35, 0.4],
            means: vec![vec![1.0, 2.0], vec![4.0, 6.0], vec![7.0, 1.0]],
            covariances: vec![cov2(1.0, 0.3, 1.2), cov2(1.5, -0.4, 1.0), cov2(1.2, 0.5, 1.5)],
            skew: Some(vec![vec![0.2, -0.2], vec![-0.15, 0.1], vec![0.1, 0.25]]),
        }),
        "anisotropic" => Ok(MixtureSpec {
            weights: vec![third; 3],
            means: vec![vec![0.0, 0.0], vec![4.0, 2.0], vec![0.5, 5.0]],
            covariances: vec![cov2(4.0, 1.8, 1.0), cov2(0.6, -0.2, 3.0), cov2(3.0, -1.5, 1.2)],
            skew: None,
        }),
        _ => Err(Error::UnknownPreset(name.to_string())),
    }
}

/// Samples a named preset at its default size.
pub fn preset(name: &str, seed: u64) -> Result<Dataset> {
    let (_, n) = preset_shape(name)?;
    let spec = preset_spec(name)?;
    let (data, _) = sample_with_latent(&spec, n, seed, name)?;
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(lambda: Option<f64>) -> MixtureSpec {
        MixtureSpec {
            weights: vec![1.0],
            means: vec![vec![0.0]],
            covariances: vec![DMatrix::identity(1, 1)],
            skew: lambda.map(|l| vec![vec![l]]),
        }
    }

    #[test]
    fn standard_normal_mean() {
        let spec = MixtureSpec {
            weights: vec![1.0],
            means: vec![vec![0.0, 0.0]],
            covariances: vec![DMatrix::identity(2, 2)],
            skew: None,
        };
        let n = 10_000;
        let data = sample_gaussian_mixture(&spec, n, 3).unwrap();
        for j in 0..2 {
            let mean = data.features().column(j).mean();
            assert!(mean.abs() < 4.0 / (n as f64).sqrt(), "coordinate {j}: {mean}");
        }
    }

    #[test]
    fn zero_weight_component_is_never_drawn() {
        let spec = MixtureSpec {
            weights: vec![1.0, 0.0],
            means: vec![vec![0.0], vec![5.0]],
            covariances: vec![DMatrix::identity(1, 1), DMatrix::identity(1, 1)],
            skew: None,
        };
        let data = sample_gaussian_mixture(&spec, 500, 11).unwrap();
        assert!(data.truth().unwrap().labels().iter().all(|&l| l == 0));
    }

    #[test]
    fn label_frequencies_follow_weights() {
        let spec = MixtureSpec {
            weights: vec![0.2, 0.5, 0.3],
            means: vec![vec![0.0]; 3],
            covariances: vec![DMatrix::identity(1, 1); 3],
            skew: None,
        };
        let n = 100_000;
        let data = sample_gaussian_mixture(&spec, n, 5).unwrap();
        let sizes = data.truth().unwrap().cluster_sizes();
        for (s, w) in sizes.iter().zip(&spec.weights) {
            assert!((*s as f64 / n as f64 - w).abs() < 0.01);
        }
    }

    #[test]
    fn zero_lambda_matches_gaussian_stream() {
        let mut spec = preset_spec("manly-like").unwrap();
        spec.skew = Some(vec![vec![0.0, 0.0]; 3]);
        let manly = sample_manly_mixture(&spec, 400, 9).unwrap();
        spec.skew = None;
        let gauss = sample_gaussian_mixture(&spec, 400, 9).unwrap();
        assert_eq!(manly.features(), gauss.features());
        assert_eq!(manly.truth(), gauss.truth());
    }

    #[test]
    fn manly_skews_the_marginal() {
        let n = 20_000;
        let data = sample_manly_mixture(&single(Some(0.5)), n, 21).unwrap();
        let x = data.features().column(0);
        let mean = x.mean();
        let m2 = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let m3 = x.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n as f64;
        let skewness = m3 / m2.powf(1.5);
        assert!(skewness.abs() > 4.0 * (6.0 / n as f64).sqrt(), "skewness {skewness}");
        // the log compresses the upper tail
        assert!(skewness < 0.0);
    }

    #[test]
    fn manly_round_trip_recovers_latent_draws() {
        let spec = preset_spec("manly-like").unwrap();
        let (data, latent) = sample_with_latent(&spec, 1000, 4, "t").unwrap();
        let skew = spec.skew.as_ref().unwrap();
        for (i, &c) in data.truth().unwrap().labels().iter().enumerate() {
            for j in 0..2 {
                let back = manly_forward(data.features()[(i, j)], skew[c][j]);
                assert!((back - latent[(i, j)]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn forward_transform_is_gaussian_again() {
        // lambda = 0.1 only rejects draws below y = -10, so the back-transformed
        // sample should pass moment-based normality checks.
        let n = 5000;
        let data = sample_manly_mixture(&single(Some(0.1)), n, 8).unwrap();
        let y: Vec<f64> = data.features().iter().map(|&x| manly_forward(x, 0.1)).collect();
        let mean = y.iter().sum::<f64>() / n as f64;
        let m2 = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let m3 = y.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n as f64;
        let m4 = y.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n as f64;
        let skew = m3 / m2.powf(1.5);
        let kurt = m4 / (m2 * m2) - 3.0;
        assert!(skew.abs() < 4.0 * (6.0 / n as f64).sqrt(), "skew {skew}");
        assert!(kurt.abs() < 4.0 * (24.0 / n as f64).sqrt(), "excess kurtosis {kurt}");
        // while the emitted features themselves are visibly skewed
        let x = data.features();
        let xm = x.mean();
        let xm2 = x.iter().map(|v| (v - xm).powi(2)).sum::<f64>() / n as f64;
        let xm3 = x.iter().map(|v| (v - xm).powi(3)).sum::<f64>() / n as f64;
        assert!(xm3 / xm2.powf(1.5) < -4.0 * (6.0 / n as f64).sqrt());
    }

    #[test]
    fn seeded_determinism() {
        let a = preset("manly-like", 77).unwrap();
        let b = preset("manly-like", 77).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.features(), preset("manly-like", 78).unwrap().features());
    }

    #[test]
    fn bad_specs() {
        let mut spec = single(None);
        spec.weights = vec![0.5];
        assert!(matches!(sample_gaussian_mixture(&spec, 5, 0), Err(Error::BadSpec(_))));
        let mut spec = single(None);
        spec.covariances = vec![DMatrix::from_element(1, 1, -1.0)];
        assert!(matches!(sample_gaussian_mixture(&spec, 5, 0), Err(Error::BadSpec(_))));
        assert!(matches!(
            sample_gaussian_mixture(&single(Some(0.1)), 5, 0),
            Err(Error::BadSpec(_))
        ));
        assert!(matches!(
            sample_manly_mixture(&single(None), 5, 0),
            Err(Error::BadSpec(_))
        ));
        assert!(matches!(preset("nope", 0), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn infeasible_manly_spec_overflows() {
        // lambda = -0.001 needs y < 1000, but the component sits at 5000 with sd 50.
        let spec = MixtureSpec {
            weights: vec![1.0],
            means: vec![vec![5000.0]],
            covariances: vec![DMatrix::from_element(1, 1, 2500.0)],
            skew: Some(vec![vec![-0.001]]),
        };
        assert!(matches!(
            sample_manly_mixture(&spec, 1, 0),
            Err(Error::RejectionOverflow(_))
        ));
    }
}

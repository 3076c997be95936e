//! Built-in ensemble members: Lloyd k-means and Gaussian-mixture EM with
//! spherical, diagonal or full covariances.

mod gmm;
mod kmeans;

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::types::Partition;

pub use gmm::{gmm_fit, GmmConfig};
pub use kmeans::kmeans;

/// Constraint on the component covariance matrices of a Gaussian mixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CovarianceFamily {
    /// `sigma^2 * I` per component.
    Spherical,
    /// Axis-aligned variances per component.
    Diagonal,
    /// Unconstrained symmetric positive definite per component.
    Full,
}

impl CovarianceFamily {
    pub const ALL: [CovarianceFamily; 3] = [Self::Spherical, Self::Diagonal, Self::Full];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Spherical => "spherical",
            Self::Diagonal => "diagonal",
            Self::Full => "full",
        }
    }
}

impl fmt::Display for CovarianceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CovarianceFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown covariance family {s:?}")))
    }
}

/// Fitted Gaussian mixture parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GmmParams {
    pub weights: Vec<f64>,
    pub means: Vec<DVector<f64>>,
    pub covariances: Vec<DMatrix<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub partition: Partition,
    /// `None` for k-means.
    pub params: Option<GmmParams>,
    /// Final log-likelihood for mixtures, negative within-cluster sum of
    /// squares for k-means.
    pub loglik: f64,
    /// Objective after every iteration, in the same units as `loglik`.
    pub trace: Vec<f64>,
    pub n_iterations: usize,
    pub converged: bool,
}

/// Squared Euclidean distance between row `i` of `data` and `center`.
fn squared_distance(data: &DMatrix<f64>, i: usize, center: &[f64]) -> f64 {
    center
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let d = data[(i, j)] - c;
            d * d
        })
        .sum()
}

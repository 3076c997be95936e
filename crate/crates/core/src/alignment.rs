//! Cluster label alignment between ensemble members.
//!
//! Each member is relabeled by the permutation that maximizes item-wise
//! agreement with a reference member. The optimum is found with the
//! Kuhn-Munkres assignment on the contingency table; among several optimal
//! permutations the lexicographically smallest is returned.

use pathfinding::kuhn_munkres::kuhn_munkres;
use pathfinding::matrix::Matrix;

use crate::error::{Error, Result};
use crate::metrics::contingency_table;
use crate::types::{LabelMatrix, Partition};

/// Bijection on `0..G`; `map(l)` is the reference label assigned to label `l`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelPermutation(Vec<usize>);

impl LabelPermutation {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
            }
        }
        Ok(Self(perm))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn map(&self, label: usize) -> usize {
        self.0[label]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, partition: &Partition) -> Result<Partition> {
        partition.permuted(&self.0)
    }
}

/// Maximum-weight assignment over the rows `from..` of `weights`, restricted
/// to the columns still marked free.
fn residual_optimum(weights: &[Vec<i64>], from: usize, free: &[bool]) -> i64 {
    let cols: Vec<usize> = (0..free.len()).filter(|&c| free[c]).collect();
    let rows = weights.len() - from;
    if rows == 0 {
        return 0;
    }
    let m = Matrix::from_fn(rows, cols.len(), |(r, c)| weights[from + r][cols[c]]);
    kuhn_munkres(&m).0
}

/// Lexicographically smallest permutation `perm` maximizing
/// `sum_r weights[r][perm[r]]`, together with that maximum.
pub(crate) fn lex_min_assignment(weights: &[Vec<i64>]) -> (Vec<usize>, i64) {
    let g = weights.len();
    let mut free = vec![true; g];
    let best = residual_optimum(weights, 0, &free);
    let mut fixed = 0i64;
    let mut perm = Vec::with_capacity(g);
    for (row, w) in weights.iter().enumerate() {
        let mut choice = None;
        for c in 0..g {
            if !free[c] {
                continue;
            }
            free[c] = false;
            let ok = fixed + w[c] + residual_optimum(weights, row + 1, &free) == best;
            free[c] = true;
            if ok {
                choice = Some(c);
                break;
            }
        }
        let choice = choice.expect("some column keeps the optimum reachable");
        free[choice] = false;
        fixed += w[choice];
        perm.push(choice);
    }
    (perm, best)
}

/// Permutation of `other`'s labels maximizing agreement with `reference`,
/// and the number of items that agree after applying it.
pub fn best_permutation(reference: &Partition, other: &Partition) -> Result<(LabelPermutation, usize)> {
    if reference.len() != other.len() {
        return Err(Error::LengthMismatch {
            left: reference.len(),
            right: other.len(),
        });
    }
    if reference.n_clusters() != other.n_clusters() {
        return Err(Error::ClusterCountMismatch {
            left: reference.n_clusters(),
            right: other.n_clusters(),
        });
    }
    // rows: labels of `other`, columns: labels of `reference`
    let table = contingency_table(other, reference)?;
    let weights: Vec<Vec<i64>> = table
        .counts()
        .iter()
        .map(|r| r.iter().map(|&c| c as i64).collect())
        .collect();
    let (perm, agreement) = lex_min_assignment(&weights);
    Ok((LabelPermutation(perm), agreement as usize))
}

/// Relabels every column of `matrix` onto column `reference_column`.
pub fn align_ensemble(matrix: &LabelMatrix, reference_column: usize) -> Result<LabelMatrix> {
    if reference_column >= matrix.n_observers() {
        return Err(Error::BadColumnIndex {
            index: reference_column,
            n_columns: matrix.n_observers(),
        });
    }
    let reference = matrix.column(reference_column);
    let columns = matrix
        .columns()
        .into_iter()
        .enumerate()
        .map(|(k, col)| {
            if k == reference_column {
                Ok(col)
            } else {
                let (perm, _) = best_permutation(&reference, &col)?;
                perm.apply(&col)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    LabelMatrix::from_columns(&columns)
}

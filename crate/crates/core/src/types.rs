//! Shared domain types for partitions, observer label matrices and the
//! probability tables of the Dawid-Skene model.
//!
//! Labels are 0-based `usize` values. Anything coming from outside the crate
//! (files, user vectors) is normalized through [`relabel_contiguous`] or
//! checked by [`validate_label_matrix`] before it becomes one of these types.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Absolute tolerance applied to every "sums to one" invariant.
pub const PROB_SUM_TOLERANCE: f64 = 1e-9;

/// A hard assignment of `len()` items to clusters `0..n_clusters()`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<usize>,
    n_clusters: usize,
}

impl Partition {
    pub fn new(labels: Vec<usize>, n_clusters: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some((index, &label)) = labels.iter().enumerate().find(|(_, &l)| l >= n_clusters) {
            return Err(Error::OutOfRangeLabel {
                row: index,
                column: 0,
                label: label as i64,
                n_clusters,
            });
        }
        Ok(Self { labels, n_clusters })
    }

    /// Builds a partition whose cluster count is one past the largest label.
    pub fn from_labels(labels: Vec<usize>) -> Result<Self> {
        let n_clusters = labels.iter().max().map_or(0, |&m| m + 1);
        Self::new(labels, n_clusters)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn into_labels(self) -> Vec<usize> {
        self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    /// Number of items per cluster, indexed by label.
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_clusters];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Returns the same grouping with every label `l` replaced by `perm[l]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n_clusters {
            return Err(Error::ClusterCountMismatch {
                left: perm.len(),
                right: self.n_clusters,
            });
        }
        let labels = self.labels.iter().map(|&l| perm[l]).collect();
        Self::new(labels, self.n_clusters)
    }
}

/// N items labeled by K observers, every label in `0..n_clusters`.
///
/// Stored row-major: the K labels of item `i` are contiguous.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMatrix {
    entries: Vec<usize>,
    n_items: usize,
    n_observers: usize,
    n_clusters: usize,
}

impl LabelMatrix {
    /// Stacks equal-length partitions as observer columns.
    pub fn from_columns(columns: &[Partition]) -> Result<Self> {
        let first = columns.first().ok_or(Error::EmptyInput)?;
        let n_items = first.len();
        let n_clusters = first.n_clusters();
        for c in columns {
            if c.len() != n_items {
                return Err(Error::LengthMismatch {
                    left: n_items,
                    right: c.len(),
                });
            }
            if c.n_clusters() != n_clusters {
                return Err(Error::ClusterCountMismatch {
                    left: n_clusters,
                    right: c.n_clusters(),
                });
            }
        }
        let n_observers = columns.len();
        let mut entries = Vec::with_capacity(n_items * n_observers);
        for i in 0..n_items {
            entries.extend(columns.iter().map(|c| c.labels()[i]));
        }
        Ok(Self {
            entries,
            n_items,
            n_observers,
            n_clusters,
        })
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn n_observers(&self) -> usize {
        self.n_observers
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    pub fn get(&self, item: usize, observer: usize) -> usize {
        self.entries[item * self.n_observers + observer]
    }

    /// The labels all observers gave item `item`.
    pub fn row(&self, item: usize) -> &[usize] {
        let start = item * self.n_observers;
        &self.entries[start..start + self.n_observers]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[usize]> {
        self.entries.chunks_exact(self.n_observers)
    }

    pub fn column(&self, observer: usize) -> Partition {
        let labels = (0..self.n_items).map(|i| self.get(i, observer)).collect();
        Partition {
            labels,
            n_clusters: self.n_clusters,
        }
    }

    pub fn columns(&self) -> Vec<Partition> {
        (0..self.n_observers).map(|k| self.column(k)).collect()
    }

    /// Reorders observers so that new column `j` is old column `order[j]`.
    pub fn select_columns(&self, order: &[usize]) -> Result<Self> {
        let cols = order
            .iter()
            .map(|&k| {
                if k < self.n_observers {
                    Ok(self.column(k))
                } else {
                    Err(Error::BadColumnIndex {
                        index: k,
                        n_columns: self.n_observers,
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_columns(&cols)
    }
}

/// Checks a rectangular integer matrix (rows are items, columns observers)
/// and converts it into a [`LabelMatrix`] with `n_clusters` classes.
pub fn validate_label_matrix(entries: &[Vec<i64>], n_clusters: usize) -> Result<LabelMatrix> {
    let n_items = entries.len();
    let n_observers = entries.first().map_or(0, Vec::len);
    if n_items == 0 || n_observers == 0 {
        return Err(Error::EmptyInput);
    }
    let mut flat = Vec::with_capacity(n_items * n_observers);
    for (row, values) in entries.iter().enumerate() {
        if values.len() != n_observers {
            return Err(Error::RaggedRows {
                row,
                expected: n_observers,
                found: values.len(),
            });
        }
        for (column, &label) in values.iter().enumerate() {
            if label < 0 || label as u64 >= n_clusters as u64 {
                return Err(Error::OutOfRangeLabel {
                    row,
                    column,
                    label,
                    n_clusters,
                });
            }
            flat.push(label as usize);
        }
    }
    Ok(LabelMatrix {
        entries: flat,
        n_items,
        n_observers,
        n_clusters,
    })
}

/// Re-codes arbitrary non-negative labels to `0..G` in order of first
/// appearance. The returned map sends each original label to its new code.
pub fn relabel_contiguous(labels: &[i64]) -> Result<(Partition, BTreeMap<i64, usize>)> {
    if labels.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut mapping = BTreeMap::new();
    let mut out = Vec::with_capacity(labels.len());
    for (index, &label) in labels.iter().enumerate() {
        if label < 0 {
            return Err(Error::NegativeLabel { index, label });
        }
        let next = mapping.len();
        out.push(*mapping.entry(label).or_insert(next));
    }
    let n_clusters = mapping.len();
    Ok((
        Partition {
            labels: out,
            n_clusters,
        },
        mapping,
    ))
}

fn check_simplex(values: &[f64], what: &str) -> Result<()> {
    if values.iter().any(|&p| !p.is_finite() || p < 0.0) {
        return Err(Error::InvalidArgument(format!(
            "{what} contains a negative or non-finite entry"
        )));
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
        return Err(Error::InvalidArgument(format!("{what} sums to {sum}, not 1")));
    }
    Ok(())
}

/// Posterior class probabilities, one row of length G per item.
#[derive(Debug, Clone, PartialEq)]
pub struct Responsibilities {
    z: Vec<f64>,
    n_items: usize,
    n_clusters: usize,
}

impl Responsibilities {
    pub fn new(rows: &[Vec<f64>]) -> Result<Self> {
        let n_items = rows.len();
        let n_clusters = rows.first().map_or(0, Vec::len);
        if n_items == 0 || n_clusters == 0 {
            return Err(Error::EmptyInput);
        }
        let mut z = Vec::with_capacity(n_items * n_clusters);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n_clusters {
                return Err(Error::RaggedRows {
                    row: i,
                    expected: n_clusters,
                    found: r.len(),
                });
            }
            check_simplex(r, &format!("responsibility row {i}"))?;
            z.extend_from_slice(r);
        }
        Ok(Self { z, n_items, n_clusters })
    }

    pub(crate) fn from_flat(z: Vec<f64>, n_items: usize, n_clusters: usize) -> Self {
        debug_assert_eq!(z.len(), n_items * n_clusters);
        Self { z, n_items, n_clusters }
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    pub fn row(&self, item: usize) -> &[f64] {
        &self.z[item * self.n_clusters..(item + 1) * self.n_clusters]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.z.chunks_exact(self.n_clusters)
    }

    /// Argmax per row, ties going to the lowest class index.
    pub fn argmax(&self) -> Partition {
        let labels = self
            .rows()
            .map(|r| {
                let mut best = 0;
                for (g, &p) in r.iter().enumerate().skip(1) {
                    if p > r[best] {
                        best = g;
                    }
                }
                best
            })
            .collect();
        Partition {
            labels,
            n_clusters: self.n_clusters,
        }
    }
}

/// Per-observer confusion matrices: `get(k, g, h)` is the probability that
/// observer `k` reports `h` for an item whose latent class is `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRates {
    eps: Vec<f64>,
    n_observers: usize,
    n_clusters: usize,
}

impl ErrorRates {
    /// `matrices[k][g][h]`, each row a probability vector.
    pub fn new(matrices: &[Vec<Vec<f64>>]) -> Result<Self> {
        let n_observers = matrices.len();
        let n_clusters = matrices.first().map_or(0, Vec::len);
        if n_observers == 0 || n_clusters == 0 {
            return Err(Error::EmptyInput);
        }
        let mut eps = Vec::with_capacity(n_observers * n_clusters * n_clusters);
        for (k, m) in matrices.iter().enumerate() {
            if m.len() != n_clusters {
                return Err(Error::ClusterCountMismatch {
                    left: n_clusters,
                    right: m.len(),
                });
            }
            for (g, row) in m.iter().enumerate() {
                if row.len() != n_clusters {
                    return Err(Error::ClusterCountMismatch {
                        left: n_clusters,
                        right: row.len(),
                    });
                }
                check_simplex(row, &format!("error-rate row (observer {k}, class {g})"))?;
                eps.extend_from_slice(row);
            }
        }
        Ok(Self {
            eps,
            n_observers,
            n_clusters,
        })
    }

    /// Every observer reports each class with probability `1/G`.
    pub fn uniform(n_observers: usize, n_clusters: usize) -> Self {
        Self {
            eps: vec![1.0 / n_clusters as f64; n_observers * n_clusters * n_clusters],
            n_observers,
            n_clusters,
        }
    }

    pub(crate) fn from_flat(eps: Vec<f64>, n_observers: usize, n_clusters: usize) -> Self {
        debug_assert_eq!(eps.len(), n_observers * n_clusters * n_clusters);
        Self {
            eps,
            n_observers,
            n_clusters,
        }
    }

    pub fn n_observers(&self) -> usize {
        self.n_observers
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    pub fn get(&self, observer: usize, truth: usize, reported: usize) -> f64 {
        let g = self.n_clusters;
        self.eps[(observer * g + truth) * g + reported]
    }

    /// Row `truth` of observer `observer`'s confusion matrix.
    pub fn row(&self, observer: usize, truth: usize) -> &[f64] {
        let g = self.n_clusters;
        let start = (observer * g + truth) * g;
        &self.eps[start..start + g]
    }

    /// Observer `observer`'s confusion matrix as nested rows.
    pub fn matrix(&self, observer: usize) -> Vec<Vec<f64>> {
        (0..self.n_clusters).map(|g| self.row(observer, g).to_vec()).collect()
    }

    /// Mean of the diagonal of one observer's confusion matrix.
    pub fn diagonal_mean(&self, observer: usize) -> f64 {
        let g = self.n_clusters;
        (0..g).map(|c| self.get(observer, c, c)).sum::<f64>() / g as f64
    }
}

/// Latent class prior probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Priors(Vec<f64>);

impl Priors {
    pub fn new(pi: Vec<f64>) -> Result<Self> {
        if pi.is_empty() {
            return Err(Error::EmptyInput);
        }
        check_simplex(&pi, "priors")?;
        Ok(Self(pi))
    }

    pub fn uniform(n_clusters: usize) -> Self {
        Self(vec![1.0 / n_clusters as f64; n_clusters])
    }

    pub(crate) fn from_vec_unchecked(pi: Vec<f64>) -> Self {
        Self(pi)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn n_clusters(&self) -> usize {
        self.0.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn validate_accepts_in_range_entries() {
        let m = validate_label_matrix(&[vec![0, 0], vec![1, 1], vec![2, 2]], 3).unwrap();
        assert_eq!((m.n_items(), m.n_observers(), m.n_clusters()), (3, 2, 3));
        assert_eq!(m.row(1), &[1, 1]);
    }

    #[test]
    fn validate_rejects_out_of_range_and_empty() {
        assert!(matches!(
            validate_label_matrix(&[vec![0, 3]], 3),
            Err(Error::OutOfRangeLabel {
                label: 3,
                column: 1,
                ..
            })
        ));
        assert!(matches!(
            validate_label_matrix(&[vec![0, -1]], 3),
            Err(Error::OutOfRangeLabel { label: -1, .. })
        ));
        assert!(matches!(validate_label_matrix(&[], 2), Err(Error::EmptyInput)));
        assert!(matches!(validate_label_matrix(&[vec![]], 2), Err(Error::EmptyInput)));
        assert!(matches!(
            validate_label_matrix(&[vec![0, 1], vec![0]], 2),
            Err(Error::RaggedRows { row: 1, .. })
        ));
    }

    #[test]
    fn relabel_uses_first_appearance_order() {
        let (p, map) = relabel_contiguous(&[5, 5, 9, 5]).unwrap();
        assert_eq!(p.labels(), &[0, 0, 1, 0]);
        assert_eq!(p.n_clusters(), 2);
        assert_eq!(map, BTreeMap::from([(5, 0), (9, 1)]));

        let (p, _) = relabel_contiguous(&[0, 1, 2]).unwrap();
        assert_eq!(p.labels(), &[0, 1, 2]);

        let (p, map) = relabel_contiguous(&[2, 0, 2, 1]).unwrap();
        assert_eq!(p.labels(), &[0, 1, 0, 2]);
        assert_eq!(map, BTreeMap::from([(2, 0), (0, 1), (1, 2)]));
    }

    #[test]
    fn relabel_rejects_negative() {
        assert!(matches!(
            relabel_contiguous(&[1, -2]),
            Err(Error::NegativeLabel { index: 1, label: -2 })
        ));
    }

    #[test]
    fn probability_types_check_sums() {
        assert!(Priors::new(vec![0.5, 0.6]).is_err());
        assert!(Priors::new(vec![0.25, 0.75]).is_ok());
        assert!(Responsibilities::new(&[vec![0.2, 0.8], vec![1.0, 0.1]]).is_err());
        assert!(ErrorRates::new(&[vec![vec![0.9, 0.1], vec![0.0, 1.0]]]).is_ok());
        assert!(ErrorRates::new(&[vec![vec![0.9, 0.2], vec![0.0, 1.0]]]).is_err());
    }

    #[test]
    fn argmax_breaks_ties_low() {
        let z = Responsibilities::new(&[vec![0.5, 0.5], vec![0.2, 0.8]]).unwrap();
        assert_eq!(z.argmax().labels(), &[0, 1]);
    }

    proptest! {
        #[test]
        fn relabel_preserves_co_membership(labels in prop::collection::vec(0i64..20, 1..40)) {
            let (p, _) = relabel_contiguous(&labels).unwrap();
            let new = p.labels();
            for i in 0..labels.len() {
                for j in 0..labels.len() {
                    prop_assert_eq!(labels[i] == labels[j], new[i] == new[j]);
                }
            }
            prop_assert!(new.iter().all(|&l| l < p.n_clusters()));
        }

        #[test]
        fn matrix_valid_iff_every_column_valid(
            rows in prop::collection::vec(prop::collection::vec(-1i64..5, 3), 1..10),
            g in 1usize..5,
        ) {
            let whole = validate_label_matrix(&rows, g).is_ok();
            let per_column = (0..3).all(|k| {
                let col: Vec<Vec<i64>> = rows.iter().map(|r| vec![r[k]]).collect();
                validate_label_matrix(&col, g).is_ok()
            });
            prop_assert_eq!(whole, per_column);
        }
    }
}

//! Partition agreement: contingency tables and the adjusted Rand index.

use crate::error::{Error, Result};
use crate::types::Partition;

/// Cross-tabulation of two partitions of the same items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<Vec<usize>>,
    row_sums: Vec<usize>,
    col_sums: Vec<usize>,
    total: usize,
}

impl ContingencyTable {
    /// `counts()[u][v]` is the number of items with label `u` in the first
    /// partition and `v` in the second.
    pub fn counts(&self) -> &[Vec<usize>] {
        &self.counts
    }

    pub fn row_sums(&self) -> &[usize] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[usize] {
        &self.col_sums
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// True when every non-empty row and column holds exactly one non-zero
    /// cell, i.e. the two partitions group items identically.
    pub fn is_bijective(&self) -> bool {
        let rows_ok = self.counts.iter().all(|r| r.iter().filter(|&&c| c > 0).count() <= 1);
        let cols_ok = (0..self.col_sums.len()).all(|v| self.counts.iter().filter(|r| r[v] > 0).count() <= 1);
        rows_ok && cols_ok
    }
}

pub fn contingency_table(a: &Partition, b: &Partition) -> Result<ContingencyTable> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut counts = vec![vec![0usize; b.n_clusters()]; a.n_clusters()];
    for (&u, &v) in a.labels().iter().zip(b.labels()) {
        counts[u][v] += 1;
    }
    let row_sums = counts.iter().map(|r| r.iter().sum()).collect();
    let col_sums = (0..b.n_clusters()).map(|v| counts.iter().map(|r| r[v]).sum()).collect();
    Ok(ContingencyTable {
        counts,
        row_sums,
        col_sums,
        total: a.len(),
    })
}

fn pairs(n: usize) -> f64 {
    let n = n as f64;
    n * (n - 1.0) / 2.0
}

/// Adjusted Rand index (Hubert-Arabie form).
///
/// When the expected index equals the maximum index (both partitions are
/// all-singletons, or both a single cluster) the result is 1.0 if the two
/// partitions group items identically and 0.0 otherwise.
pub fn adjusted_rand_index(a: &Partition, b: &Partition) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::TooFewItems(a.len()));
    }
    let table = contingency_table(a, b)?;
    let index: f64 = table.counts.iter().flat_map(|r| r.iter()).map(|&c| pairs(c)).sum();
    let sum_a: f64 = table.row_sums.iter().map(|&c| pairs(c)).sum();
    let sum_b: f64 = table.col_sums.iter().map(|&c| pairs(c)).sum();
    let expected = sum_a * sum_b / pairs(table.total);
    let max_index = 0.5 * (sum_a + sum_b);
    let denom = max_index - expected;
    if denom == 0.0 {
        return Ok(if table.is_bijective() { 1.0 } else { 0.0 });
    }
    // Symmetric in (sum_a, sum_b), so swapping arguments is bit-identical.
    Ok((index - expected) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(labels: &[usize]) -> Partition {
        Partition::from_labels(labels.to_vec()).unwrap()
    }

    #[test]
    fn contingency_examples() {
        let t = contingency_table(&p(&[0, 0, 1, 1]), &p(&[0, 0, 1, 1])).unwrap();
        assert_eq!(t.counts(), &[vec![2, 0], vec![0, 2]]);
        let t = contingency_table(&p(&[0, 0, 1, 1]), &p(&[1, 1, 0, 0])).unwrap();
        assert_eq!(t.counts(), &[vec![0, 2], vec![2, 0]]);
        let t = contingency_table(&p(&[0, 0, 0, 1]), &p(&[0, 1, 0, 1])).unwrap();
        assert_eq!(t.counts(), &[vec![2, 1], vec![0, 1]]);
        assert_eq!(t.row_sums(), &[3, 1]);
        assert_eq!(t.col_sums(), &[2, 2]);
        assert_eq!(t.total(), 4);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            contingency_table(&p(&[0, 1]), &p(&[0])),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            adjusted_rand_index(&p(&[0, 1]), &p(&[0])),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            adjusted_rand_index(&p(&[0]), &p(&[0])),
            Err(Error::TooFewItems(1))
        ));
    }

    #[test]
    fn ari_examples() {
        assert_eq!(
            adjusted_rand_index(&p(&[0, 1, 2, 0, 1]), &p(&[0, 1, 2, 0, 1])).unwrap(),
            1.0
        );
        assert_eq!(adjusted_rand_index(&p(&[0, 1, 0, 1]), &p(&[1, 0, 1, 0])).unwrap(), 1.0);
        // 15 item pairs: 2 together in both, 6 together in a, 3 in b -> 8/33
        let v = adjusted_rand_index(&p(&[0, 0, 0, 1, 1, 1]), &p(&[0, 0, 1, 1, 2, 2])).unwrap();
        assert!((v - 8.0 / 33.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_denominator() {
        let ones = p(&[0, 0, 0]);
        let singletons = p(&[0, 1, 2]);
        assert_eq!(adjusted_rand_index(&ones, &ones).unwrap(), 1.0);
        assert_eq!(adjusted_rand_index(&singletons, &p(&[2, 0, 1])).unwrap(), 1.0);
        // One-cluster vs all-singletons has a non-zero denominator.
        assert_eq!(adjusted_rand_index(&ones, &singletons).unwrap(), 0.0);
    }
}

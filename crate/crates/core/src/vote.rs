//! Plurality vote over aligned ensemble members.

use crate::alignment::align_ensemble;
use crate::error::Result;
use crate::types::{LabelMatrix, Partition};

/// Most frequent label per item; ties go to the lowest label.
///
/// The columns must already share a label coding, see [`align_ensemble`].
pub fn majority_vote(aligned: &LabelMatrix) -> Partition {
    let g = aligned.n_clusters();
    let mut tally = vec![0usize; g];
    let labels = aligned
        .rows()
        .map(|row| {
            tally.iter_mut().for_each(|t| *t = 0);
            for &h in row {
                tally[h] += 1;
            }
            let mut best = 0;
            for (label, &count) in tally.iter().enumerate().skip(1) {
                if count > tally[best] {
                    best = label;
                }
            }
            best
        })
        .collect();
    Partition::new(labels, g).expect("labels come from a validated matrix")
}

/// Aligns every column onto `reference_column`, then votes.
pub fn aligned_majority_vote(matrix: &LabelMatrix, reference_column: usize) -> Result<Partition> {
    Ok(majority_vote(&align_ensemble(matrix, reference_column)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::validate_label_matrix;
    use proptest::prelude::*;

    #[test]
    fn plurality_and_ties() {
        let m = validate_label_matrix(&[vec![0, 0, 1], vec![2, 1, 1], vec![2, 0, 1]], 3).unwrap();
        assert_eq!(majority_vote(&m).labels(), &[0, 1, 0]);
        let m = validate_label_matrix(&[vec![0, 1], vec![1, 0]], 2).unwrap();
        assert_eq!(majority_vote(&m).labels(), &[0, 0]);
    }

    #[test]
    fn unanimous_rows_copy_the_column() {
        let m = validate_label_matrix(&[vec![2, 2, 2], vec![0, 0, 0], vec![1, 1, 1]], 3).unwrap();
        assert_eq!(majority_vote(&m), m.column(1));
    }

    #[test]
    fn aligned_vote_undoes_relabeling() {
        let m = validate_label_matrix(&[vec![0, 1, 0], vec![0, 1, 0], vec![1, 0, 0], vec![1, 0, 1]], 2).unwrap();
        assert_eq!(aligned_majority_vote(&m, 0).unwrap().labels(), &[0, 0, 1, 1]);
    }

    fn matrix_strategy() -> impl Strategy<Value = (Vec<Vec<i64>>, usize)> {
        (1usize..5, 1usize..6, 1usize..20)
            .prop_flat_map(|(g, k, n)| (prop::collection::vec(prop::collection::vec(0..g as i64, k), n), Just(g)))
    }

    proptest! {
        #[test]
        fn strict_majority_wins((rows, g) in matrix_strategy()) {
            let m = validate_label_matrix(&rows, g).unwrap();
            let out = majority_vote(&m);
            for (i, row) in m.rows().enumerate() {
                for label in 0..g {
                    let count = row.iter().filter(|&&h| h == label).count();
                    if 2 * count > row.len() {
                        prop_assert_eq!(out.labels()[i], label);
                    }
                }
            }
        }

        #[test]
        fn duplicating_a_member_keeps_wide_margins((rows, g) in matrix_strategy(), pick in 0usize..5) {
            let m = validate_label_matrix(&rows, g).unwrap();
            let dup = pick % m.n_observers();
            let mut order: Vec<usize> = (0..m.n_observers()).collect();
            order.push(dup);
            let bigger = m.select_columns(&order).unwrap();
            let before = majority_vote(&m);
            let after = majority_vote(&bigger);
            for (i, row) in m.rows().enumerate() {
                let mut counts = vec![0usize; g];
                for &h in row { counts[h] += 1; }
                counts.sort_unstable_by(|a, b| b.cmp(a));
                let margin = counts[0] - counts.get(1).copied().unwrap_or(0);
                if margin >= 2 {
                    prop_assert_eq!(before.labels()[i], after.labels()[i]);
                }
            }
        }

        #[test]
        fn identical_columns_vote_to_that_column(labels in prop::collection::vec(0i64..4, 1..30), k in 1usize..5) {
            let rows: Vec<Vec<i64>> = labels.iter().map(|&l| vec![l; k]).collect();
            let m = validate_label_matrix(&rows, 4).unwrap();
            prop_assert_eq!(majority_vote(&m), m.column(0));
        }
    }
}

//! Aligns member labels onto a reference member, then takes the per-item
//! plurality label.
//!
//! ```text
//! cargo run -p mixsemble --example alignment_vote
//! ```

use mixsemble::vote::aligned_majority_vote;
use mixsemble::{align_ensemble, best_permutation, LabelMatrix, Partition};

fn main() -> mixsemble::Result<()> {
    let a = Partition::new(vec![0, 0, 1, 1, 2, 2, 2], 3)?;
    // same grouping as `a` under other names, with item 6 moved
    let b = Partition::new(vec![2, 2, 0, 0, 1, 1, 0], 3)?;
    let c = Partition::new(vec![1, 1, 2, 2, 0, 2, 0], 3)?;

    let (perm, agreement) = best_permutation(&a, &b)?;
    println!("b -> a permutation {:?}, agreeing items {agreement}", perm.as_slice());

    let matrix = LabelMatrix::from_columns(&[a, b, c])?;
    let aligned = align_ensemble(&matrix, 0)?;
    for (i, row) in aligned.rows().enumerate() {
        println!("item {i}: raw {:?} aligned {row:?}", matrix.row(i));
    }
    println!("vote {:?}", aligned_majority_vote(&matrix, 0)?.labels());
    Ok(())
}

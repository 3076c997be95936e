//! Adjusted Rand index and the contingency table behind it.
//!
//! ```text
//! cargo run -p mixsemble --example ari
//! ```

use mixsemble::{adjusted_rand_index, contingency_table, Partition};

fn main() -> mixsemble::Result<()> {
    let truth = Partition::from_labels(vec![0, 0, 0, 1, 1, 1])?;
    let split = Partition::from_labels(vec![0, 0, 1, 1, 2, 2])?;
    let relabeled = Partition::from_labels(vec![2, 2, 2, 0, 0, 0])?;

    let table = contingency_table(&truth, &split)?;
    println!("contingency table {:?}", table.counts());
    println!("ARI(truth, split)     = {:.6}", adjusted_rand_index(&truth, &split)?);
    println!(
        "ARI(truth, relabeled) = {:.6}",
        adjusted_rand_index(&truth, &relabeled)?
    );
    Ok(())
}

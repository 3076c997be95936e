//! Consensus clustering that treats clustering algorithms as noisy
//! annotators.
//!
//! Each ensemble member contributes one hard partition. The partitions are
//! fused either by a Dawid-Skene latent-class model fitted with EM
//! ([`dawid_skene`]) or by plurality vote after label alignment ([`vote`],
//! [`alignment`]). The crate also provides the pieces needed to evaluate
//! the fusion end to end: k-means and Gaussian-mixture members
//! ([`clusterers`]), seeded mixture generators ([`datagen`]), the adjusted
//! Rand index ([`metrics`]), CSV interchange ([`io`]) and a repeated-run
//! experiment harness ([`harness`]).
//!
//! ```
//! use mixsemble::{dawid_skene, validate_label_matrix, EmConfig};
//!
//! // three members, the last one disagrees on item 2
//! let matrix = validate_label_matrix(
//!     &[vec![0, 0, 0], vec![1, 1, 1], vec![1, 1, 0], vec![0, 0, 0]],
//!     2,
//! )?;
//! let model = dawid_skene::fit(&matrix, &EmConfig::default())?;
//! assert_eq!(dawid_skene::hard_labels(&model).labels(), &[0, 1, 1, 0]);
//! # Ok::<(), mixsemble::Error>(())
//! ```

pub mod alignment;
pub mod clusterers;
pub mod datagen;
pub mod dawid_skene;
pub mod error;
pub mod fixtures;
pub mod harness;
pub mod io;
pub mod metrics;
pub mod report;
pub mod types;
pub mod vote;

pub use alignment::{align_ensemble, best_permutation, LabelPermutation};
pub use clusterers::{gmm_fit, kmeans, CovarianceFamily, FitResult, GmmConfig, GmmParams};
pub use datagen::{sample_gaussian_mixture, sample_manly_mixture, Dataset, MixtureSpec};
pub use dawid_skene::{ConsensusModel, EmConfig};
pub use error::{Error, Result};
pub use harness::{run_experiment, summarize, DatasetConfig, ExperimentConfig, MemberSpec};
pub use metrics::{adjusted_rand_index, contingency_table, ContingencyTable};
pub use report::{ExperimentReport, MethodSummary, RunRecord};
pub use types::{
    relabel_contiguous, validate_label_matrix, ErrorRates, LabelMatrix, Partition, Priors, Responsibilities,
};
pub use vote::majority_vote;

//! Experiment runner: repeated seeded runs of every ensemble member on every
//! dataset, followed by aligned majority vote and Dawid-Skene fusion, all
//! scored with the adjusted Rand index against ground truth.
//!
//! Seeds: run `r` uses `base_seed + r`. With [`InitMode::Shared`] one k-means
//! fit with that seed is both the `kmeans` member and the starting partition
//! of every Gaussian-mixture member. With [`InitMode::PerMember`] member `m`
//! draws its own k-means seed from ChaCha8 stream `m + 1` of the run seed.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clusterers::{gmm_fit, kmeans, CovarianceFamily, GmmConfig};
use crate::datagen::{preset, preset_shape, preset_spec, sample_with_latent, Dataset};
use crate::dawid_skene::{self, EmConfig};
use crate::error::{Error, Result};
use crate::fixtures::fixture;
use crate::io::{load_dataset_csv, read_partitions_csv};
use crate::metrics::adjusted_rand_index;
use crate::report::{
    format_fixed4, ExperimentReport, RunRecord, METHOD_MAX, METHOD_MIN, METHOD_MIXSEMBLE, METHOD_VOTE,
};
use crate::types::{LabelMatrix, Partition};
use crate::vote::aligned_majority_vote;

/// An ensemble member built into the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MemberSpec {
    KMeans,
    Gmm(CovarianceFamily),
}

impl MemberSpec {
    /// `kmeans`, `gmm-spherical`, `gmm-diagonal`, `gmm-full`.
    pub fn name(&self) -> String {
        match self {
            Self::KMeans => "kmeans".to_string(),
            Self::Gmm(f) => format!("gmm-{f}"),
        }
    }

    pub fn default_roster() -> Vec<MemberSpec> {
        let mut roster = vec![Self::KMeans];
        roster.extend(CovarianceFamily::ALL.map(Self::Gmm));
        roster
    }
}

impl fmt::Display for MemberSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for MemberSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "kmeans" {
            return Ok(Self::KMeans);
        }
        s.strip_prefix("gmm-")
            .ok_or_else(|| Error::InvalidArgument(format!("unknown member {s:?}")))?
            .parse()
            .map(Self::Gmm)
    }
}

impl Serialize for MemberSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

impl<'de> Deserialize<'de> for MemberSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitMode {
    #[default]
    Shared,
    PerMember,
}

/// Where a dataset comes from. Exactly one of `preset`, `fixture` or `csv`
/// must be set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    /// Name used in reports; defaults to the preset, fixture or file stem.
    pub name: Option<String>,
    pub preset: Option<String>,
    pub fixture: Option<String>,
    pub csv: Option<PathBuf>,
    /// Ground-truth column of a CSV dataset.
    pub label_column: Option<String>,
    /// Number of clusters; defaults to the number of ground-truth classes.
    pub n_clusters: Option<usize>,
    /// Preset sample size override.
    pub n: Option<usize>,
    /// Seed used once to draw a preset sample.
    pub data_seed: u64,
    /// Precomputed member partitions; replaces the member roster.
    pub partitions: Option<PathBuf>,
}

impl DatasetConfig {
    pub fn preset(name: &str) -> Self {
        Self {
            preset: Some(name.to_string()),
            ..Self::default()
        }
    }

    pub fn fixture(name: &str) -> Self {
        Self {
            fixture: Some(name.to_string()),
            ..Self::default()
        }
    }

    pub fn csv(path: impl Into<PathBuf>, label_column: &str) -> Self {
        Self {
            csv: Some(path.into()),
            label_column: Some(label_column.to_string()),
            ..Self::default()
        }
    }

    pub fn load(&self) -> Result<Dataset> {
        let mut data = match (&self.preset, &self.fixture, &self.csv) {
            (Some(p), None, None) => match self.n {
                Some(n) => sample_with_latent(&preset_spec(p)?, n, self.data_seed, p)?.0,
                None => preset(p, self.data_seed)?,
            },
            (None, Some(f), None) => fixture(f)?,
            (None, None, Some(path)) => load_dataset_csv(path, self.label_column.as_deref())?,
            _ => {
                return Err(Error::InvalidConfig(
                    "each dataset needs exactly one of preset, fixture or csv".into(),
                ))
            }
        };
        if let Some(name) = &self.name {
            data.name = name.clone();
        }
        Ok(data)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub datasets: Vec<DatasetConfig>,
    pub members: Vec<MemberSpec>,
    pub n_runs: usize,
    pub base_seed: u64,
    pub init: InitMode,
    pub kmeans_max_iter: usize,
    pub gmm: GmmConfig,
    pub consensus: EmConfig,
    /// Member column every other member is aligned to before voting.
    pub reference_column: usize,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    /// Directory for `results.csv`, `results_summary.csv` and `summary.txt`.
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            datasets: Vec::new(),
            members: MemberSpec::default_roster(),
            n_runs: 100,
            base_seed: 0,
            init: InitMode::Shared,
            kmeans_max_iter: 300,
            gmm: GmmConfig::default(),
            consensus: EmConfig::default(),
            reference_column: 0,
            jobs: None,
            output_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_runs < 1 {
            return Err(Error::InvalidConfig("n_runs must be at least 1".into()));
        }
        if self.datasets.is_empty() {
            return Err(Error::InvalidConfig("no datasets configured".into()));
        }
        let builtin_needed = self.datasets.iter().any(|d| d.partitions.is_none());
        if builtin_needed && self.members.len() < 2 {
            return Err(Error::InvalidConfig("at least 2 members are required".into()));
        }
        if builtin_needed && self.reference_column >= self.members.len() {
            return Err(Error::InvalidConfig("reference_column is not a member index".into()));
        }
        if self.kmeans_max_iter == 0 {
            return Err(Error::InvalidConfig("kmeans_max_iter must be at least 1".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::InvalidConfig("jobs must be at least 1".into()));
        }
        self.consensus.validate()
    }
}

/// The k-means seed of member `member` in run seed `run_seed`.
pub fn member_seed(run_seed: u64, member: usize, mode: InitMode) -> u64 {
    match mode {
        InitMode::Shared => run_seed,
        InitMode::PerMember => {
            let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
            rng.set_stream(member as u64 + 1);
            rng.next_u64()
        }
    }
}

/// Fits every member for one run and stacks their partitions.
pub fn fit_members(
    data: &Dataset,
    n_clusters: usize,
    members: &[MemberSpec],
    run_seed: u64,
    config: &ExperimentConfig,
) -> Result<LabelMatrix> {
    let shared = match config.init {
        InitMode::Shared => Some(kmeans(data, n_clusters, run_seed, config.kmeans_max_iter)?.partition),
        InitMode::PerMember => None,
    };
    let columns = members
        .iter()
        .enumerate()
        .map(|(m, spec)| {
            let start = match &shared {
                Some(p) => p.clone(),
                None => {
                    let seed = member_seed(run_seed, m, config.init);
                    kmeans(data, n_clusters, seed, config.kmeans_max_iter)?.partition
                }
            };
            match spec {
                MemberSpec::KMeans => Ok(start),
                MemberSpec::Gmm(family) => Ok(gmm_fit(data, n_clusters, *family, &start, &config.gmm)?.partition),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    LabelMatrix::from_columns(&columns)
}

/// Which consensus a one-shot fusion should compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConsensusMethod {
    DawidSkene,
    Vote,
}

impl FromStr for ConsensusMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ds" | "mixsemble" => Ok(Self::DawidSkene),
            "vote" => Ok(Self::Vote),
            _ => Err(Error::InvalidArgument(format!("unknown consensus method {s:?}"))),
        }
    }
}

pub fn consensus(
    matrix: &LabelMatrix,
    method: ConsensusMethod,
    em: &EmConfig,
    reference_column: usize,
) -> Result<Partition> {
    match method {
        ConsensusMethod::DawidSkene => Ok(dawid_skene::hard_labels(&dawid_skene::fit(matrix, em)?)),
        ConsensusMethod::Vote => aligned_majority_vote(matrix, reference_column),
    }
}

struct PreparedDataset {
    data: Dataset,
    truth: Partition,
    n_clusters: usize,
    member_names: Vec<String>,
    external: Option<LabelMatrix>,
}

fn prepare(cfg: &DatasetConfig, config: &ExperimentConfig) -> Result<PreparedDataset> {
    let data = cfg.load()?;
    let truth = data
        .truth()
        .cloned()
        .ok_or_else(|| Error::InvalidConfig(format!("dataset {:?} has no ground truth", data.name)))?;
    let n_clusters = match (cfg.n_clusters, &cfg.preset) {
        (Some(g), _) => g,
        (None, Some(p)) => preset_shape(p)?.0,
        (None, None) => truth.n_clusters(),
    };
    let (member_names, external) = match &cfg.partitions {
        Some(path) => {
            let parts = read_partitions_csv(path, None)?;
            if parts.matrix.n_items() != data.n_items() {
                return Err(Error::LengthMismatch {
                    left: data.n_items(),
                    right: parts.matrix.n_items(),
                });
            }
            if parts.matrix.n_observers() < 2 {
                return Err(Error::InvalidConfig("at least 2 member partitions are required".into()));
            }
            if parts.matrix.n_clusters() > n_clusters {
                return Err(Error::ClusterCountMismatch {
                    left: n_clusters,
                    right: parts.matrix.n_clusters(),
                });
            }
            let widened = parts
                .matrix
                .columns()
                .into_iter()
                .map(|p| Partition::new(p.into_labels(), n_clusters))
                .collect::<Result<Vec<_>>>()?;
            (parts.names, Some(LabelMatrix::from_columns(&widened)?))
        }
        None => (config.members.iter().map(MemberSpec::name).collect(), None),
    };
    Ok(PreparedDataset {
        data,
        truth,
        n_clusters,
        member_names,
        external,
    })
}

fn run_once(prepared: &PreparedDataset, run: usize, config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    let seed = config.base_seed.wrapping_add(run as u64);
    let matrix = match &prepared.external {
        Some(m) => m.clone(),
        None => fit_members(&prepared.data, prepared.n_clusters, &config.members, seed, config)?,
    };
    let reference = if prepared.external.is_some() {
        0
    } else {
        config.reference_column
    };
    let truth = &prepared.truth;
    let record = |method: &str, ari: f64| RunRecord {
        dataset: prepared.data.name.clone(),
        method: method.to_string(),
        run,
        seed,
        ari,
    };

    let mut records = Vec::with_capacity(matrix.n_observers() + 4);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (k, name) in prepared.member_names.iter().enumerate() {
        let ari = adjusted_rand_index(&matrix.column(k), truth)?;
        lo = lo.min(ari);
        hi = hi.max(ari);
        records.push(record(name, ari));
    }
    records.push(record(METHOD_MIN, lo));
    records.push(record(METHOD_MAX, hi));

    let vote = consensus(&matrix, ConsensusMethod::Vote, &config.consensus, reference)?;
    records.push(record(METHOD_VOTE, adjusted_rand_index(&vote, truth)?));
    let mix = consensus(&matrix, ConsensusMethod::DawidSkene, &config.consensus, reference)?;
    records.push(record(METHOD_MIXSEMBLE, adjusted_rand_index(&mix, truth)?));
    Ok(records)
}

/// Runs the full protocol. Output order is canonical (dataset, method, run)
/// whatever the thread count.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let work = || -> Result<ExperimentReport> {
        let mut report = ExperimentReport::new();
        for cfg in &config.datasets {
            let prepared = prepare(cfg, config)?;
            let name = prepared.data.name.clone();
            if !report.members(&name).is_empty() {
                return Err(Error::InvalidConfig(format!("duplicate dataset name {name:?}")));
            }
            report.set_members(&name, prepared.member_names.clone());
            let runs: Vec<Vec<RunRecord>> = (0..config.n_runs)
                .into_par_iter()
                .map(|run| {
                    run_once(&prepared, run, config).map_err(|e| Error::Run {
                        dataset: name.clone(),
                        run,
                        source: Box::new(e),
                    })
                })
                .collect::<Result<_>>()?;
            for record in runs.into_iter().flatten() {
                report.push(record);
            }
        }
        report.finalize();
        Ok(report)
    };
    match config.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(work),
        None => work(),
    }
}

fn table(header: &[String], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            rows.iter()
                .map(|r| r[c].len())
                .chain([header[c].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header);
    for r in rows {
        out.push_str(&line(r));
    }
    out
}

/// `mean(sd)` cells for `methods`, with `*` appended to the best of the
/// `contenders` (every contender tied at four decimals is marked).
fn score_cells(report: &ExperimentReport, dataset: &str, methods: &[String], contenders: &[String]) -> Vec<String> {
    let best = contenders
        .iter()
        .filter_map(|m| report.summary(dataset, m))
        .map(|s| format_fixed4(s.mean))
        .max_by(|a, b| {
            a.parse::<f64>()
                .unwrap_or(f64::MIN)
                .total_cmp(&b.parse().unwrap_or(f64::MIN))
        });
    methods
        .iter()
        .map(|m| match report.summary(dataset, m) {
            Some(s) => {
                let mean = format_fixed4(s.mean);
                let mark = if contenders.contains(m) && best.as_ref() == Some(&mean) {
                    "*"
                } else {
                    ""
                };
                format!("{mean}({}){mark}", format_fixed4(s.sd))
            }
            None => "-".to_string(),
        })
        .collect()
}

/// Renders two plain-text tables: the members' mean ARI per dataset, and the
/// per-run member minimum and maximum next to vote and mixsemble.
pub fn summarize(report: &ExperimentReport) -> Result<String> {
    if report.is_empty() {
        return Err(Error::EmptyReport);
    }
    let ensemble = [METHOD_MIN, METHOD_MAX, METHOD_VOTE, METHOD_MIXSEMBLE].map(String::from);
    let datasets = report.datasets();

    let mut members: Vec<String> = Vec::new();
    for d in &datasets {
        let listed = report.members(d);
        let names: Vec<String> = if listed.is_empty() {
            report
                .summaries()
                .into_iter()
                .filter(|s| s.dataset == *d && !ensemble.contains(&s.method))
                .map(|s| s.method)
                .collect()
        } else {
            listed.to_vec()
        };
        for n in names {
            if !members.contains(&n) {
                members.push(n);
            }
        }
    }

    let mut out = String::from("Mean ARI (SD) per member; * marks the best member\n");
    let mut header = vec!["dataset".to_string()];
    header.extend(members.iter().cloned());
    let rows: Vec<Vec<String>> = datasets
        .iter()
        .map(|d| {
            let mut row = vec![d.to_string()];
            row.extend(score_cells(report, d, &members, &members));
            row
        })
        .collect();
    out.push_str(&table(&header, &rows));

    let has_ensemble = datasets
        .iter()
        .any(|d| ensemble.iter().any(|m| report.summary(d, m).is_some()));
    if has_ensemble {
        out.push_str("\nMean ARI (SD) of per-run member min/max and ensembles; * marks the better ensemble\n");
        let mut header = vec!["dataset".to_string()];
        header.extend(ensemble.iter().cloned());
        let contenders = [METHOD_VOTE, METHOD_MIXSEMBLE].map(String::from);
        let rows: Vec<Vec<String>> = datasets
            .iter()
            .map(|d| {
                let mut row = vec![d.to_string()];
                row.extend(score_cells(report, d, &ensemble, &contenders));
                row
            })
            .collect();
        out.push_str(&table(&header, &rows));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(method: &str, run: usize, ari: f64) -> RunRecord {
        RunRecord {
            dataset: "d".into(),
            method: method.into(),
            run,
            seed: run as u64,
            ari,
        }
    }

    #[test]
    fn member_names_round_trip() {
        for m in MemberSpec::default_roster() {
            assert_eq!(m.name().parse::<MemberSpec>().unwrap(), m);
        }
        assert!("gmm-tied".parse::<MemberSpec>().is_err());
        assert!("dbscan".parse::<MemberSpec>().is_err());
        let json = serde_json::to_string(&MemberSpec::Gmm(CovarianceFamily::Full)).unwrap();
        assert_eq!(json, "\"gmm-full\"");
    }

    #[test]
    fn summarize_single_and_pair() {
        let mut r = ExperimentReport::new();
        r.push(record("kmeans", 0, 0.5));
        let text = summarize(&r).unwrap();
        assert!(text.contains("0.5000(0.0000)"), "{text}");

        let mut r = ExperimentReport::new();
        r.push(record("kmeans", 0, 0.4));
        r.push(record("kmeans", 1, 0.6));
        let text = summarize(&r).unwrap();
        assert!(text.contains("0.5000(0.1414)"), "{text}");

        assert!(matches!(summarize(&ExperimentReport::new()), Err(Error::EmptyReport)));
    }

    #[test]
    fn summarize_marks_best() {
        let mut r = ExperimentReport::new();
        r.set_members("d", vec!["a".into(), "b".into()]);
        for (m, v) in [
            ("a", 0.7),
            ("b", 0.9),
            ("min", 0.7),
            ("max", 0.9),
            ("vote", 0.8),
            ("mixsemble", 0.8),
        ] {
            r.push(record(m, 0, v));
        }
        r.finalize();
        let text = summarize(&r).unwrap();
        assert!(text.contains("0.9000(0.0000)*"));
        assert!(!text.contains("0.7000(0.0000)*"));
        // vote and mixsemble tie, both marked
        assert_eq!(text.matches("0.8000(0.0000)*").count(), 2);
        assert_eq!(summarize(&r).unwrap(), text);
    }

    #[test]
    fn member_seeds() {
        assert_eq!(member_seed(7, 3, InitMode::Shared), 7);
        let a = member_seed(7, 0, InitMode::PerMember);
        let b = member_seed(7, 1, InitMode::PerMember);
        assert_ne!(a, b);
        assert_eq!(a, member_seed(7, 0, InitMode::PerMember));
    }

    #[test]
    fn config_validation() {
        let mut cfg = ExperimentConfig {
            datasets: vec![DatasetConfig::preset("x2-like")],
            ..ExperimentConfig::default()
        };
        assert!(cfg.validate().is_ok());
        cfg.n_runs = 0;
        assert!(cfg.validate().is_err());
        cfg.n_runs = 1;
        cfg.members.truncate(1);
        assert!(cfg.validate().is_err());
        let both = DatasetConfig {
            preset: Some("x2-like".into()),
            fixture: Some("iris".into()),
            ..DatasetConfig::default()
        };
        assert!(matches!(both.load(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn config_json_defaults() {
        let cfg: ExperimentConfig =
            serde_json::from_str(r#"{"datasets":[{"preset":"x2-like"}],"members":["kmeans","gmm-full"],"n_runs":3}"#)
                .unwrap();
        assert_eq!(cfg.n_runs, 3);
        assert_eq!(cfg.members.len(), 2);
        assert_eq!(cfg.consensus, EmConfig::default());
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"bogus":1}"#).is_err());
    }
}

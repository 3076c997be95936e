//! CSV interchange: datasets, member partition matrices, and results.
//!
//! All files are UTF-8, comma separated, with a mandatory header row.
//! Numbers are parsed and printed with `.` as the decimal point regardless
//! of locale.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use crate::datagen::Dataset;
use crate::error::{Error, Result};
use crate::report::{format_fixed4, ExperimentReport};
use crate::types::{relabel_contiguous, validate_label_matrix, LabelMatrix, Partition};

fn parse_error(path: &Path, err: csv::Error) -> Error {
    let line = err.position().map_or(0, |p| p.line());
    match err.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        kind => Error::ParseError {
            path: path.to_path_buf(),
            line,
            message: format!("{kind:?}"),
        },
    }
}

fn reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source)
}

fn read_all<R: Read>(source: R, path: &Path) -> Result<(Vec<String>, Vec<csv::StringRecord>)> {
    let mut rdr = reader(source);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| parse_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.is_empty() || headers.iter().all(String::is_empty) {
        return Err(Error::EmptyInput);
    }
    let mut rows = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| parse_error(path, e))?;
        if record.len() != headers.len() {
            return Err(Error::RaggedRows {
                row,
                expected: headers.len(),
                found: record.len(),
            });
        }
        rows.push(record);
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok((headers, rows))
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string())
}

/// Reads a numeric feature table. When `label_column` is given, that column
/// is read as text, coded by order of first appearance and stored as the
/// ground truth; every other column must be numeric.
pub fn load_dataset_csv(path: impl AsRef<Path>, label_column: Option<&str>) -> Result<Dataset> {
    let path = path.as_ref();
    read_dataset(File::open(path)?, path, &dataset_name(path), label_column)
}

/// Like [`load_dataset_csv`] but reads from any byte source; `path` is only
/// used in error messages.
pub fn read_dataset<R: Read>(source: R, path: &Path, name: &str, label_column: Option<&str>) -> Result<Dataset> {
    let (headers, rows) = read_all(source, path)?;
    let label_idx = label_column
        .map(|name| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::MissingColumn(name.to_string()))
        })
        .transpose()?;
    let feature_cols: Vec<usize> = (0..headers.len()).filter(|&c| Some(c) != label_idx).collect();
    if feature_cols.is_empty() {
        return Err(Error::EmptyInput);
    }

    let mut values = Vec::with_capacity(rows.len() * feature_cols.len());
    let mut codes: HashMap<String, usize> = HashMap::new();
    let mut labels = Vec::with_capacity(rows.len());
    for (row, record) in rows.iter().enumerate() {
        for &c in &feature_cols {
            let cell = &record[c];
            let v: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::NonNumericCell {
                    path: path.to_path_buf(),
                    row,
                    column: headers[c].clone(),
                    value: cell.to_string(),
                })?;
            values.push(v);
        }
        if let Some(li) = label_idx {
            let next = codes.len();
            labels.push(*codes.entry(record[li].to_string()).or_insert(next));
        }
    }

    let features = DMatrix::from_row_slice(rows.len(), feature_cols.len(), &values);
    let truth = match label_idx {
        Some(_) => Some(Partition::new(labels, codes.len())?),
        None => None,
    };
    let names = feature_cols.iter().map(|&c| headers[c].clone()).collect();
    Dataset::new(name, features, truth, names)
}

/// Writes features (and the truth, as column `label`, when present).
pub fn write_dataset_csv(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path.as_ref())?);
    let mut header = data.column_names().join(",");
    if data.truth().is_some() {
        header.push_str(",label");
    }
    writeln!(out, "{header}")?;
    let x = data.features();
    for i in 0..x.nrows() {
        let mut line = (0..x.ncols())
            .map(|j| format!("{}", x[(i, j)]))
            .collect::<Vec<_>>()
            .join(",");
        if let Some(t) = data.truth() {
            line.push_str(&format!(",{}", t.labels()[i]));
        }
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

/// Member names (from the header) and their partitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemberPartitions {
    pub names: Vec<String>,
    pub matrix: LabelMatrix,
}

/// Reads an `N x K` integer partition matrix with a header naming members.
///
/// Without `n_clusters`, each column is re-coded independently by order of
/// first appearance and the matrix uses the largest per-column cluster
/// count. With `n_clusters`, labels must already lie in `0..n_clusters`.
pub fn read_partitions_csv(path: impl AsRef<Path>, n_clusters: Option<usize>) -> Result<MemberPartitions> {
    let path = path.as_ref();
    let (names, rows) = read_all(File::open(path)?, path)?;
    let mut entries = Vec::with_capacity(rows.len());
    for (row, record) in rows.iter().enumerate() {
        let parsed = record
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                cell.parse::<i64>().map_err(|_| Error::ParseError {
                    path: path.to_path_buf(),
                    line: row as u64 + 2,
                    message: format!("column {:?}: {cell:?} is not an integer label", names[c]),
                })
            })
            .collect::<Result<Vec<i64>>>()?;
        entries.push(parsed);
    }

    let matrix = match n_clusters {
        Some(g) => validate_label_matrix(&entries, g)?,
        None => {
            let k = names.len();
            let mut coded = Vec::with_capacity(k);
            for c in 0..k {
                let column: Vec<i64> = entries.iter().map(|r| r[c]).collect();
                coded.push(relabel_contiguous(&column)?.0);
            }
            let g = coded.iter().map(Partition::n_clusters).max().unwrap_or(1);
            let widened = coded
                .into_iter()
                .map(|p| Partition::new(p.into_labels(), g))
                .collect::<Result<Vec<_>>>()?;
            LabelMatrix::from_columns(&widened)?
        }
    };
    Ok(MemberPartitions { names, matrix })
}

pub fn load_partitions_csv(path: impl AsRef<Path>, n_clusters: Option<usize>) -> Result<LabelMatrix> {
    Ok(read_partitions_csv(path, n_clusters)?.matrix)
}

pub fn write_partitions_csv(path: impl AsRef<Path>, names: &[String], matrix: &LabelMatrix) -> Result<()> {
    if names.len() != matrix.n_observers() {
        return Err(Error::LengthMismatch {
            left: matrix.n_observers(),
            right: names.len(),
        });
    }
    let mut out = BufWriter::new(File::create(path.as_ref())?);
    writeln!(out, "{}", names.join(","))?;
    for row in matrix.rows() {
        let line = row.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

/// Path of the summary file written next to a long-format results file:
/// `results.csv` -> `results_summary.csv`.
pub fn summary_path(results: &Path) -> PathBuf {
    let stem = results
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "results".to_string());
    results.with_file_name(format!("{stem}_summary.csv"))
}

/// Writes `dataset,method,run,seed,ari` rows to `path` and
/// `dataset,method,mean_ari,sd_ari` rows to [`summary_path`]`(path)`.
///
/// Run-level ARI is printed at full round-trip precision; summary means and
/// standard deviations with four decimals.
pub fn write_results_csv(report: &ExperimentReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut records: Vec<_> = report.records().iter().collect();
    records.sort_by(|a, b| {
        (a.dataset.as_str(), a.method.as_str(), a.run).cmp(&(b.dataset.as_str(), b.method.as_str(), b.run))
    });

    let mut long = BufWriter::new(File::create(path)?);
    writeln!(long, "dataset,method,run,seed,ari")?;
    for r in records {
        writeln!(long, "{},{},{},{},{}", r.dataset, r.method, r.run, r.seed, r.ari)?;
    }
    long.flush()?;

    let mut summary = BufWriter::new(File::create(summary_path(path))?);
    writeln!(summary, "dataset,method,mean_ari,sd_ari")?;
    for s in report.summaries() {
        writeln!(
            summary,
            "{},{},{},{}",
            s.dataset,
            s.method,
            format_fixed4(s.mean),
            format_fixed4(s.sd)
        )?;
    }
    summary.flush()?;
    Ok(())
}

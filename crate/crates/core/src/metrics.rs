//! Clustering evaluation: accuracy under optimal label matching, normalized
//! mutual information, and the cross-method performance-ratio aggregation
//! used to compare methods across datasets.

use crate::assignment::min_cost_assignment;
use crate::error::{Error, Result};
use crate::graph::Partition;

/// Counts of nodes per (predicted label, true label) pair, zero-padded to a
/// square so the label sets can be matched one-to-one.
fn padded_confusion(pred: &Partition, truth: &Partition) -> Result<Vec<Vec<f64>>> {
    if pred.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            actual: pred.len(),
        });
    }
    if pred.len() == 0 {
        return Err(Error::Score("cannot score empty partitions".into()));
    }
    let side = pred.community_count().max(truth.community_count());
    let mut counts = vec![vec![0.0; side]; side];
    for i in 0..pred.len() {
        counts[pred.label(i)][truth.label(i)] += 1.0;
    }
    Ok(counts)
}

/// Fraction of nodes on the diagonal after the best one-to-one relabeling of
/// `pred` onto `truth` (exact assignment on the padded confusion matrix).
pub fn accuracy(pred: &Partition, truth: &Partition) -> Result<f64> {
    let counts = padded_confusion(pred, truth)?;
    let negated: Vec<Vec<f64>> = counts
        .iter()
        .map(|row| row.iter().map(|&c| -c).collect())
        .collect();
    let (row_to_col, _) = min_cost_assignment(&negated);
    let matched: f64 = (0..counts.len()).map(|i| counts[i][row_to_col[i]]).sum();
    Ok(matched / pred.len() as f64)
}

/// Which entropy mean normalizes the mutual information.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NmiNormalization {
    /// `I / sqrt(H(pred) * H(truth))`, the standard convention here.
    Geometric,
    /// `2I / (H(pred) + H(truth))`, offered for comparing against tools
    /// that normalize this way.
    Arithmetic,
}

/// Normalized mutual information with geometric-mean normalization.
/// 0 when either partition has a single community; clamped to [0, 1].
pub fn nmi(pred: &Partition, truth: &Partition) -> Result<f64> {
    nmi_with(pred, truth, NmiNormalization::Geometric)
}

pub fn nmi_with(pred: &Partition, truth: &Partition, norm: NmiNormalization) -> Result<f64> {
    let counts = padded_confusion(pred, truth)?;
    let n = pred.len() as f64;
    let row_sums: Vec<f64> = counts.iter().map(|r| r.iter().sum()).collect();
    let col_sums: Vec<f64> = (0..counts.len())
        .map(|j| counts.iter().map(|r| r[j]).sum())
        .collect();

    let entropy = |sums: &[f64]| -> f64 {
        -sums
            .iter()
            .filter(|&&s| s > 0.0)
            .map(|&s| (s / n) * (s / n).ln())
            .sum::<f64>()
    };
    let h_pred = entropy(&row_sums);
    let h_truth = entropy(&col_sums);
    let denom = match norm {
        NmiNormalization::Geometric => (h_pred * h_truth).sqrt(),
        NmiNormalization::Arithmetic => 0.5 * (h_pred + h_truth),
    };
    if denom <= 0.0 {
        return Ok(0.0);
    }

    let mut info = 0.0;
    for (i, row) in counts.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c > 0.0 {
                info += (c / n) * ((n * c) / (row_sums[i] * col_sums[j])).ln();
            }
        }
    }
    Ok((info / denom).clamp(0.0, 1.0))
}

/// One scored (method, dataset) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub method: String,
    pub dataset: String,
    pub accuracy: f64,
    pub nmi: f64,
}

/// Accuracy/NMI scores over a methods x datasets grid. Rows may arrive in
/// any order; the grid must be complete before ratios are taken.
#[derive(Debug, Clone, Default)]
pub struct ScoreTable {
    rows: Vec<ScoreRow>,
}

impl ScoreTable {
    pub fn new() -> ScoreTable {
        ScoreTable::default()
    }

    pub fn push(&mut self, method: &str, dataset: &str, accuracy: f64, nmi: f64) {
        self.rows.push(ScoreRow {
            method: method.to_string(),
            dataset: dataset.to_string(),
            accuracy,
            nmi,
        });
    }

    pub fn rows(&self) -> &[ScoreRow] {
        &self.rows
    }
}

/// Per-method averages of the per-dataset ratios `score / best score on
/// that dataset`, one for accuracy and one for NMI.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodRatios {
    pub method: String,
    pub rho_accuracy: f64,
    pub rho_nmi: f64,
}

/// Methods keep first-appearance order. Errors on duplicate or missing
/// cells, scores outside [0, 1], or a dataset whose best score is 0.
pub fn performance_ratios(table: &ScoreTable) -> Result<Vec<MethodRatios>> {
    let mut methods: Vec<&str> = Vec::new();
    let mut datasets: Vec<&str> = Vec::new();
    for row in table.rows() {
        if !(0.0..=1.0).contains(&row.accuracy) || !(0.0..=1.0).contains(&row.nmi) {
            return Err(Error::Score(format!(
                "scores for ({}, {}) must be in [0, 1]",
                row.method, row.dataset
            )));
        }
        if !methods.contains(&row.method.as_str()) {
            methods.push(&row.method);
        }
        if !datasets.contains(&row.dataset.as_str()) {
            datasets.push(&row.dataset);
        }
    }
    if methods.is_empty() {
        return Err(Error::Score("empty score table".into()));
    }

    // cell[method][dataset]
    let mut cells: Vec<Vec<Option<(f64, f64)>>> = vec![vec![None; datasets.len()]; methods.len()];
    for row in table.rows() {
        let a = methods.iter().position(|&m| m == row.method).unwrap();
        let d = datasets.iter().position(|&x| x == row.dataset).unwrap();
        if cells[a][d].replace((row.accuracy, row.nmi)).is_some() {
            return Err(Error::Score(format!(
                "duplicate cell ({}, {})",
                row.method, row.dataset
            )));
        }
    }

    let mut out = Vec::with_capacity(methods.len());
    for (a, &method) in methods.iter().enumerate() {
        let mut rho = (0.0, 0.0);
        for (d, &dataset) in datasets.iter().enumerate() {
            let (acc, nmi) = cells[a][d].ok_or_else(|| {
                Error::Score(format!("missing cell ({method}, {dataset})"))
            })?;
            let max_acc = best(&cells, d, |c| c.0);
            let max_nmi = best(&cells, d, |c| c.1);
            if max_acc <= 0.0 || max_nmi <= 0.0 {
                return Err(Error::Score(format!(
                    "dataset {dataset} has a zero column maximum"
                )));
            }
            rho.0 += acc / max_acc;
            rho.1 += nmi / max_nmi;
        }
        out.push(MethodRatios {
            method: method.to_string(),
            rho_accuracy: rho.0 / datasets.len() as f64,
            rho_nmi: rho.1 / datasets.len() as f64,
        });
    }
    Ok(out)
}

fn best(cells: &[Vec<Option<(f64, f64)>>], d: usize, pick: impl Fn((f64, f64)) -> f64) -> f64 {
    cells
        .iter()
        .filter_map(|row| row[d].map(&pick))
        .fold(f64::NEG_INFINITY, f64::max)
}

//! The CSV contract. One fixed schema for all commands; per-run rows and
//! aggregates share it, told apart by the `kind` column. Numbers are written
//! with Rust's shortest-roundtrip float formatting and never depend on
//! locale, so identical results serialize to identical bytes.

use std::io::Write;
use std::path::Path;

use crate::Result;

/// Bumped whenever a column is added, removed or reinterpreted.
pub const SCHEMA: &str = "mplx1";

pub const CSV_HEADER: &str = "schema,kind,dataset,method,h,gamma,ordering,param,sample,run,\
sample_seed,run_seed,accuracy,nmi,f,q_layers,outer_iters,communities,wall_ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// One solver run.
    Run,
    /// Mean over all runs of one (dataset, method, gamma, param) cell.
    Mean,
    /// The mean row of the gamma that scored the highest NMI in its cell.
    Best,
    /// Performance ratio of a method across datasets.
    Ratio,
}

impl RowKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RowKind::Run => "run",
            RowKind::Mean => "mean",
            RowKind::Best => "best",
            RowKind::Ratio => "ratio",
        }
    }
}

/// One CSV line. Optional fields serialize as empty cells.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub kind: RowKind,
    pub dataset: String,
    pub method: String,
    pub h: Option<usize>,
    pub gamma: Option<f64>,
    pub ordering: Option<&'static str>,
    pub param: Option<f64>,
    pub sample: Option<usize>,
    pub run: Option<usize>,
    pub sample_seed: Option<u64>,
    pub run_seed: Option<u64>,
    pub accuracy: Option<f64>,
    pub nmi: Option<f64>,
    pub f: Option<f64>,
    pub q_layers: Vec<f64>,
    pub outer_iters: Option<usize>,
    pub communities: Option<usize>,
    pub wall_ms: Option<u128>,
}

impl ResultRow {
    /// A row with everything blank except kind, dataset and method.
    pub fn blank(kind: RowKind, dataset: &str, method: &str) -> ResultRow {
        ResultRow {
            kind,
            dataset: dataset.to_string(),
            method: method.to_string(),
            h: None,
            gamma: None,
            ordering: None,
            param: None,
            sample: None,
            run: None,
            sample_seed: None,
            run_seed: None,
            accuracy: None,
            nmi: None,
            f: None,
            q_layers: Vec::new(),
            outer_iters: None,
            communities: None,
            wall_ms: None,
        }
    }

    pub fn to_csv(&self) -> String {
        let opt_num = |x: Option<f64>| x.map(fmt_num).unwrap_or_default();
        let opt_usize = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
        let q = self
            .q_layers
            .iter()
            .map(|&v| fmt_num(v))
            .collect::<Vec<_>>()
            .join(";");
        [
            SCHEMA.to_string(),
            self.kind.as_str().to_string(),
            self.dataset.clone(),
            self.method.clone(),
            opt_usize(self.h),
            opt_num(self.gamma),
            self.ordering.unwrap_or_default().to_string(),
            opt_num(self.param),
            opt_usize(self.sample),
            opt_usize(self.run),
            self.sample_seed.map(|v| v.to_string()).unwrap_or_default(),
            self.run_seed.map(|v| v.to_string()).unwrap_or_default(),
            opt_num(self.accuracy),
            opt_num(self.nmi),
            opt_num(self.f),
            q,
            opt_usize(self.outer_iters),
            opt_usize(self.communities),
            self.wall_ms.map(|v| v.to_string()).unwrap_or_default(),
        ]
        .join(",")
    }
}

/// Shortest-roundtrip decimal form with a `.` separator, e.g. `0.1`, `-0.25`.
pub fn fmt_num(x: f64) -> String {
    format!("{x}")
}

/// Writes header plus rows to `path`, or to standard output when `path` is
/// `None`.
pub fn write_csv(rows: &[ResultRow], path: Option<&Path>) -> Result<()> {
    let mut text = String::with_capacity(64 * (rows.len() + 1));
    text.push_str(CSV_HEADER);
    text.push('\n');
    for row in rows {
        text.push_str(&row.to_csv());
        text.push('\n');
    }
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_row_have_the_same_arity() {
        let row = ResultRow::blank(RowKind::Run, "d", "GL");
        assert_eq!(
            row.to_csv().split(',').count(),
            CSV_HEADER.split(',').count()
        );
    }

    #[test]
    fn numbers_round_trip() {
        assert_eq!(fmt_num(0.1), "0.1");
        assert_eq!(fmt_num(-0.25), "-0.25");
        let tricky = 0.1 + 0.2;
        assert_eq!(tricky, fmt_num(tricky).parse::<f64>().unwrap());
    }

    #[test]
    fn optional_cells_serialize_empty() {
        let mut row = ResultRow::blank(RowKind::Mean, "d", "MVM2");
        row.gamma = Some(0.5);
        row.nmi = Some(0.9375);
        let line = row.to_csv();
        assert!(line.starts_with("mplx1,mean,d,MVM2,,0.5,"));
        assert!(line.ends_with(",,,")); // outer_iters, communities, wall_ms all blank
    }

    #[test]
    fn q_layers_join_with_semicolons() {
        let mut row = ResultRow::blank(RowKind::Run, "d", "GL");
        row.q_layers = vec![0.5, 0.25];
        assert!(row.to_csv().contains(",0.5;0.25,"));
    }
}

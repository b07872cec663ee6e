//! CSV and JSON ingestion/emission.
//!
//! All CSVs are UTF-8 with a header row and `.` decimal separator. Floats
//! are written in Rust's shortest round-trip form, so identical runs emit
//! byte-identical files.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::diagnostics::{EssReport, FactorMetric};
use crate::error::{Error, Result};
use crate::nngp::NngpFactor;
use crate::simgen::SimTruth;
use crate::spatial::LocationSet;
use crate::store::ChainStore;

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Reads sites from a CSV with columns `x1..xd`.
pub fn read_locations_csv(path: &Path) -> Result<LocationSet> {
    let mat = read_matrix_csv(path)?;
    let (n, d) = mat.shape();
    let mut coords = Vec::with_capacity(n * d);
    for i in 0..n {
        for j in 0..d {
            coords.push(mat[(i, j)]);
        }
    }
    LocationSet::new(coords, n, d)
}

/// Writes sites to a CSV with columns `x1..xd`.
pub fn write_locations_csv(path: &Path, locs: &LocationSet) -> Result<()> {
    let mat = DMatrix::from_fn(locs.len(), locs.dim(), |i, j| locs.site(i)[j]);
    write_matrix_csv(path, &mat, "x")
}

/// Reads a numeric matrix from a headered CSV.
pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let width = reader
        .headers()
        .map_err(|e| csv_err(path, e))?
        .len();
    if width == 0 {
        return Err(Error::Csv {
            path: path.to_path_buf(),
            message: "no columns".into(),
        });
    }
    let mut rows: Vec<f64> = Vec::new();
    let mut n = 0usize;
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_err(path, e))?;
        if record.len() != width {
            return Err(Error::Csv {
                path: path.to_path_buf(),
                message: format!("row {} has {} fields, expected {width}", line + 2, record.len()),
            });
        }
        for field in record.iter() {
            let v: f64 = field.trim().parse().map_err(|_| Error::Csv {
                path: path.to_path_buf(),
                message: format!("row {}: '{}' is not a number", line + 2, field),
            })?;
            rows.push(v);
        }
        n += 1;
    }
    if n == 0 {
        return Err(Error::Csv {
            path: path.to_path_buf(),
            message: "no data rows".into(),
        });
    }
    Ok(DMatrix::from_fn(n, width, |i, j| rows[i * width + j]))
}

/// Writes a matrix to a CSV with columns `<prefix>1..<prefix>C`.
pub fn write_matrix_csv(path: &Path, mat: &DMatrix<f64>, prefix: &str) -> Result<()> {
    let mut w = csv_writer(path)?;
    let header: Vec<String> = (1..=mat.ncols()).map(|j| format!("{prefix}{j}")).collect();
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for i in 0..mat.nrows() {
        let row: Vec<String> = (0..mat.ncols()).map(|j| format!("{}", mat[(i, j)])).collect();
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// JSON-friendly record of the generating values of a simulation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TruthRecord {
    /// Row-major `p x q`.
    pub beta: Vec<Vec<f64>>,
    /// Row-major `K x q`.
    pub lambda: Vec<Vec<f64>>,
    pub sigma2: Vec<f64>,
    /// Row-major `n x K`.
    pub factors: Vec<Vec<f64>>,
    pub decay: Vec<f64>,
}

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn from_rows(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err(Error::InvalidInput(format!("{what}: empty matrix")));
    }
    let c = rows[0].len();
    if rows.iter().any(|r| r.len() != c) {
        return Err(Error::InvalidInput(format!("{what}: ragged rows")));
    }
    Ok(DMatrix::from_fn(rows.len(), c, |i, j| rows[i][j]))
}

impl TruthRecord {
    pub fn from_truth(truth: &SimTruth) -> Self {
        Self {
            beta: to_rows(&truth.beta),
            lambda: to_rows(&truth.lambda),
            sigma2: truth.sigma2.iter().copied().collect(),
            factors: to_rows(&truth.factors),
            decay: truth.decay.clone(),
        }
    }

    pub fn beta_matrix(&self) -> Result<DMatrix<f64>> {
        from_rows(&self.beta, "truth beta")
    }

    pub fn lambda_matrix(&self) -> Result<DMatrix<f64>> {
        from_rows(&self.lambda, "truth lambda")
    }

    pub fn factor_matrix(&self) -> Result<DMatrix<f64>> {
        from_rows(&self.factors, "truth factors")
    }

    pub fn sigma2_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.sigma2)
    }
}

pub fn write_truth_json(path: &Path, truth: &TruthRecord) -> Result<()> {
    let json = serde_json::to_string(truth).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    fs::write(path, json).map_err(|e| Error::io(path, e))
}

pub fn read_truth_json(path: &Path) -> Result<TruthRecord> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&raw).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Dumps the sparse rows of an NNGP factor as `(row, col, value)` triplets.
pub fn write_nngp_csv(path: &Path, factor: &NngpFactor) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["row", "col", "value"])
        .map_err(|e| csv_err(path, e))?;
    for (i, j, v) in factor.triplets() {
        w.write_record([i.to_string(), j.to_string(), format!("{v}")])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `block, min, mean, median, frac_below_100` per block.
pub fn write_ess_csv(path: &Path, report: &EssReport) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["block", "min", "mean", "median", "frac_below_100"])
        .map_err(|e| csv_err(path, e))?;
    for (name, s) in &report.blocks {
        w.write_record([
            name.clone(),
            format!("{}", s.min),
            format!("{}", s.mean),
            format!("{}", s.median),
            format!("{}", s.frac_below_100),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `factor, euclidean_distance, spherical_variance` per factor.
pub fn write_factor_metrics_csv(path: &Path, metrics: &[FactorMetric]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["factor", "euclidean_distance", "spherical_variance"])
        .map_err(|e| csv_err(path, e))?;
    for (k, m) in metrics.iter().enumerate() {
        w.write_record([
            (k + 1).to_string(),
            format!("{}", m.euclidean_distance),
            format!("{}", m.spherical_variance),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Long-format traces of the coefficient, loading, and noise-variance
/// chains (factors are too large to dump by default).
pub fn write_traces_csv(path: &Path, chains: &ChainStore) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["iteration", "parameter", "value"])
        .map_err(|e| csv_err(path, e))?;
    for t in 0..chains.retained() {
        for i in 0..chains.meta.p {
            for j in 0..chains.meta.q {
                w.write_record([
                    (t + 1).to_string(),
                    format!("beta[{},{}]", i + 1, j + 1),
                    format!("{}", chains.beta[t][(i, j)]),
                ])
                .map_err(|e| csv_err(path, e))?;
            }
        }
        for i in 0..chains.meta.k {
            for j in 0..chains.meta.q {
                w.write_record([
                    (t + 1).to_string(),
                    format!("lambda[{},{}]", i + 1, j + 1),
                    format!("{}", chains.lambda[t][(i, j)]),
                ])
                .map_err(|e| csv_err(path, e))?;
            }
        }
        for j in 0..chains.meta.q {
            w.write_record([
                (t + 1).to_string(),
                format!("sigma2[{}]", j + 1),
                format!("{}", chains.sigma2[t][j]),
            ])
            .map_err(|e| csv_err(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Side-by-side ESS table: one row per block, one column group per run.
pub fn write_compare_csv(path: &Path, runs: &[(String, EssReport)]) -> Result<()> {
    if runs.is_empty() {
        return Err(Error::InvalidInput("nothing to compare".into()));
    }
    let blocks: Vec<&String> = runs[0].1.blocks.iter().map(|(b, _)| b).collect();
    let mut w = csv_writer(path)?;
    let mut header = vec!["block".to_string()];
    for (name, _) in runs {
        header.push(format!("{name}_min"));
        header.push(format!("{name}_mean"));
        header.push(format!("{name}_median"));
        header.push(format!("{name}_frac_below_100"));
    }
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for block in blocks {
        let mut row = vec![block.clone()];
        for (_, report) in runs {
            let s = report.block(block).ok_or_else(|| {
                Error::DimensionMismatch(format!("run missing block {block}"))
            })?;
            row.push(format!("{}", s.min));
            row.push(format!("{}", s.mean));
            row.push(format!("{}", s.median));
            row.push(format!("{}", s.frac_below_100));
        }
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simgen::{default_spec, simulate};
    use tempfile::tempdir;

    #[test]
    fn locations_roundtrip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("locations.csv");
        let locs = LocationSet::from_points(&[(0.125, 0.5), (0.75, 0.25), (0.1, 0.9)]).unwrap();
        write_locations_csv(&path, &locs).unwrap();
        let back = read_locations_csv(&path).unwrap();
        assert_eq!(back.len(), 3);
        assert_eq!(back.site(1), locs.site(1));
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("x1,x2\n"));
    }

    #[test]
    fn matrix_csv_errors_name_location() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(&path, "a,b\n1.0,2.0\n3.0,oops\n").unwrap();
        match read_matrix_csv(&path) {
            Err(Error::Csv { message, .. }) => {
                assert!(message.contains("row 3"), "message: {message}");
                assert!(message.contains("oops"));
            }
            other => panic!("expected csv error, got {other:?}"),
        }
        assert!(read_matrix_csv(&dir.path().join("absent.csv")).is_err());
    }

    #[test]
    fn truth_roundtrip() {
        let mut spec = default_spec();
        spec.n = 25;
        let (_, truth) = simulate(&spec).unwrap();
        let record = TruthRecord::from_truth(&truth);
        let dir = tempdir().unwrap();
        let path = dir.path().join("truth.json");
        write_truth_json(&path, &record).unwrap();
        let back = read_truth_json(&path).unwrap();
        assert_eq!(back.beta_matrix().unwrap(), truth.beta);
        assert_eq!(back.lambda_matrix().unwrap(), truth.lambda);
        assert_eq!(back.factor_matrix().unwrap(), truth.factors);
        assert_eq!(back.sigma2_vector(), truth.sigma2);
        assert_eq!(back.decay, truth.decay);
    }

    #[test]
    fn matrix_roundtrip_exact() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let mat = DMatrix::from_row_slice(2, 3, &[1.5, -2.25, 1e-17, 0.1, 3.0, -0.7]);
        write_matrix_csv(&path, &mat, "y").unwrap();
        let back = read_matrix_csv(&path).unwrap();
        assert_eq!(back, mat);
    }
}

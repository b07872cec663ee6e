//! Retained-draw storage and its on-disk format.
//!
//! A chain directory holds `metadata.json` plus one flat little-endian
//! float64 binary per parameter block (`ftilde.bin`, `beta.bin`,
//! `lambda.bin`, `sigma2.bin`), each draw written row-major. The metadata
//! records the shapes, so readers can validate file sizes byte-for-byte.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const METADATA_FILE: &str = "metadata.json";
pub const FACTOR_FILE: &str = "ftilde.bin";
pub const BETA_FILE: &str = "beta.bin";
pub const LAMBDA_FILE: &str = "lambda.bin";
pub const SIGMA2_FILE: &str = "sigma2.bin";

/// Sampler variant that produced a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Algorithm {
    /// Projected blocked Gibbs.
    #[serde(rename = "ProjMC2")]
    ProjMc2,
    /// Plain blocked Gibbs.
    Gibbs,
    /// Blocked Gibbs followed by factor recentering.
    GibbsPost,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::ProjMc2 => "ProjMC2",
            Algorithm::Gibbs => "Gibbs",
            Algorithm::GibbsPost => "GibbsPost",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ProjMC2" => Ok(Algorithm::ProjMc2),
            "Gibbs" => Ok(Algorithm::Gibbs),
            "GibbsPost" => Ok(Algorithm::GibbsPost),
            other => Err(Error::InvalidConfig(format!(
                "unknown algorithm '{other}' (expected ProjMC2, Gibbs, or GibbsPost)"
            ))),
        }
    }
}

/// Run metadata stored alongside the binaries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMeta {
    pub algorithm: Algorithm,
    pub iterations: usize,
    pub warmup: usize,
    pub thin: usize,
    pub seed: u64,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub k: usize,
    pub retained: usize,
    pub intercept_col: Option<usize>,
    pub lsmr_warnings: usize,
    pub wall_time_secs: f64,
    /// Fully resolved run configuration, echoed for reproducibility.
    pub config: serde_json::Value,
    pub dtype: String,
    /// Block name -> `[retained, rows, cols]`.
    pub shape: BTreeMap<String, Vec<usize>>,
}

/// Thinned post-warmup draws of all sampled quantities.
#[derive(Debug, Clone)]
pub struct ChainStore {
    /// Projected factors for the projected sampler, raw factors otherwise;
    /// one `n x K` matrix per retained draw.
    pub factors: Vec<DMatrix<f64>>,
    /// `p x q` per draw.
    pub beta: Vec<DMatrix<f64>>,
    /// `K x q` per draw.
    pub lambda: Vec<DMatrix<f64>>,
    /// Length-`q` per draw.
    pub sigma2: Vec<DVector<f64>>,
    pub meta: RunMeta,
}

impl ChainStore {
    pub fn retained(&self) -> usize {
        self.factors.len()
    }

    /// Scalar chains of a named block, one per parameter entry, each of
    /// length `retained`. Blocks: `beta0` (intercept row), `beta1`
    /// (remaining rows), `lambda`, `f`, `sigma2`.
    pub fn scalar_chains(&self, block: &str) -> Result<Vec<Vec<f64>>> {
        let d = self.retained();
        let icol = self.meta.intercept_col.unwrap_or(0);
        let mut chains = Vec::new();
        match block {
            "beta0" => {
                for j in 0..self.meta.q {
                    chains.push((0..d).map(|t| self.beta[t][(icol, j)]).collect());
                }
            }
            "beta1" => {
                for r in 0..self.meta.p {
                    if r == icol {
                        continue;
                    }
                    for j in 0..self.meta.q {
                        chains.push((0..d).map(|t| self.beta[t][(r, j)]).collect());
                    }
                }
            }
            "lambda" => {
                for r in 0..self.meta.k {
                    for j in 0..self.meta.q {
                        chains.push((0..d).map(|t| self.lambda[t][(r, j)]).collect());
                    }
                }
            }
            "f" => {
                for kk in 0..self.meta.k {
                    for i in 0..self.meta.n {
                        chains.push((0..d).map(|t| self.factors[t][(i, kk)]).collect());
                    }
                }
            }
            "sigma2" => {
                for j in 0..self.meta.q {
                    chains.push((0..d).map(|t| self.sigma2[t][j]).collect());
                }
            }
            other => return Err(Error::UnknownBlock(other.to_string())),
        }
        Ok(chains)
    }

    /// Writes `metadata.json` plus the four block binaries into `dir`
    /// (created if absent).
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut meta = self.meta.clone();
        meta.retained = self.retained();
        meta.dtype = "f64le".to_string();
        meta.shape = self.shapes();

        let path = dir.join(METADATA_FILE);
        let json = serde_json::to_string_pretty(&meta).map_err(|e| Error::Json {
            path: path.clone(),
            message: e.to_string(),
        })?;
        fs::write(&path, json).map_err(|e| Error::io(&path, e))?;

        write_block(&dir.join(FACTOR_FILE), self.factors.iter().map(matrix_row_major))?;
        write_block(&dir.join(BETA_FILE), self.beta.iter().map(matrix_row_major))?;
        write_block(&dir.join(LAMBDA_FILE), self.lambda.iter().map(matrix_row_major))?;
        write_block(
            &dir.join(SIGMA2_FILE),
            self.sigma2.iter().map(|v| v.iter().copied().collect()),
        )?;
        Ok(())
    }

    /// Reads a chain directory, validating binary lengths against the
    /// metadata shapes.
    pub fn read_dir(dir: &Path) -> Result<Self> {
        let path = dir.join(METADATA_FILE);
        let raw = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let meta: RunMeta = serde_json::from_str(&raw).map_err(|e| Error::Json {
            path: path.clone(),
            message: e.to_string(),
        })?;
        if meta.dtype != "f64le" {
            return Err(Error::ChainStore(format!(
                "unsupported dtype '{}'",
                meta.dtype
            )));
        }
        let d = meta.retained;

        let factors = read_matrices(&dir.join(FACTOR_FILE), d, meta.n, meta.k)?;
        let beta = read_matrices(&dir.join(BETA_FILE), d, meta.p, meta.q)?;
        let lambda = read_matrices(&dir.join(LAMBDA_FILE), d, meta.k, meta.q)?;
        let sigma2 = read_matrices(&dir.join(SIGMA2_FILE), d, 1, meta.q)?
            .into_iter()
            .map(|m| DVector::from_iterator(meta.q, m.iter().copied()))
            .collect();
        Ok(Self {
            factors,
            beta,
            lambda,
            sigma2,
            meta,
        })
    }

    fn shapes(&self) -> BTreeMap<String, Vec<usize>> {
        let d = self.retained();
        let mut shape = BTreeMap::new();
        shape.insert("ftilde".into(), vec![d, self.meta.n, self.meta.k]);
        shape.insert("beta".into(), vec![d, self.meta.p, self.meta.q]);
        shape.insert("lambda".into(), vec![d, self.meta.k, self.meta.q]);
        shape.insert("sigma2".into(), vec![d, self.meta.q]);
        shape
    }
}

fn matrix_row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

fn write_block(path: &Path, draws: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for draw in draws {
        for v in draw {
            w.write_all(&v.to_le_bytes()).map_err(|e| Error::io(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn read_matrices(path: &Path, draws: usize, rows: usize, cols: usize) -> Result<Vec<DMatrix<f64>>> {
    let mut file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes).map_err(|e| Error::io(path, e))?;
    let expected = draws * rows * cols * 8;
    if bytes.len() != expected {
        return Err(Error::ChainStore(format!(
            "{} holds {} bytes but metadata implies {expected}",
            path.display(),
            bytes.len()
        )));
    }
    let per_draw = rows * cols;
    let mut out = Vec::with_capacity(draws);
    for t in 0..draws {
        let base = t * per_draw * 8;
        let m = DMatrix::from_fn(rows, cols, |i, j| {
            let off = base + (i * cols + j) * 8;
            f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap())
        });
        out.push(m);
    }
    Ok(out)
}

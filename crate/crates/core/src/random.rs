//! Random-channel experiments.
//!
//! Each row `W(. | x, s)` of a sampled channel is drawn uniformly from the
//! probability simplex (a flat Dirichlet, via normalized exponentials). Every
//! sample owns a ChaCha8 stream keyed by `(seed, cell, index)`, so results
//! do not depend on how samples are scheduled across threads. Samples are
//! keyed by the channel shape only, so cells that differ only in `epsilon`
//! threshold the same set of channels.

use std::io::Write;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::avc::Avc;
use crate::sym::{f_value, SymError, DECISION_SLACK};

/// Recorded in scan metadata.
pub const SAMPLING_DISTRIBUTION: &str = "flat-dirichlet";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid scan configuration: {0}")]
    InvalidConfig(String),
    #[error("sample {index} of cell s={s} failed: {source}")]
    Sample {
        s: usize,
        index: u64,
        #[source]
        source: SymError,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Draws a channel whose rows are independent uniform points on the simplex.
pub fn sample_avc<R: Rng + ?Sized>(x_size: usize, s_size: usize, y_size: usize, rng: &mut R) -> Avc {
    let mut w = Vec::with_capacity(x_size * s_size * y_size);
    let mut row = vec![0.0; y_size];
    for _ in 0..x_size * s_size {
        for v in row.iter_mut() {
            *v = rng.sample::<f64, _>(Exp1);
        }
        let total: f64 = row.iter().sum();
        w.extend(row.iter().map(|v| v / total));
    }
    Avc::new(x_size, s_size, y_size, w).expect("normalized rows form a valid channel")
}

/// Key identifying a channel shape within a scan.
pub fn cell_key(x_size: usize, y_size: usize, s_size: usize) -> u64 {
    ((x_size as u64) << 42) | ((y_size as u64) << 21) | s_size as u64
}

/// Independent stream for sample `index` of `cell` under `seed`.
pub fn sample_rng(seed: u64, cell: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&cell.to_le_bytes());
    key[16..24].copy_from_slice(&index.to_le_bytes());
    key[24..].copy_from_slice(b"avcsym01");
    ChaCha8Rng::from_seed(key)
}

/// Smallest jammer alphabet size with `S - 1 >= (X - 1) Y / 2`.
pub fn dof_threshold(x_size: usize, y_size: usize) -> usize {
    ((x_size - 1) * y_size).div_ceil(2) + 1
}

/// One-sided upper confidence bound on the true fraction when none of
/// `samples` draws succeeded.
pub fn zero_fraction_upper_bound(samples: usize, confidence: f64) -> f64 {
    1.0 - (1.0 - confidence).powf(1.0 / samples as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanConfig {
    pub x_size: usize,
    pub y_size: usize,
    pub s_values: Vec<usize>,
    pub eps_values: Vec<f64>,
    pub samples_per_cell: usize,
    pub seed: u64,
}

impl ScanConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::InvalidConfig(m.to_string()));
        if self.samples_per_cell == 0 {
            return bad("samples_per_cell must be at least 1");
        }
        if self.x_size < 2 || self.y_size < 2 {
            return bad("x and y sizes must be at least 2");
        }
        if self.s_values.is_empty() || self.s_values.iter().any(|&s| s < 2) {
            return bad("s values must be non-empty and at least 2");
        }
        if self.eps_values.is_empty() || self.eps_values.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
            return bad("epsilon values must be non-empty and positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanCell {
    pub s: usize,
    pub epsilon: f64,
    pub fraction_symmetrizable: f64,
    pub samples: usize,
    pub mean_f: f64,
}

impl ScanCell {
    fn from_values(s: usize, epsilon: f64, values: &[f64]) -> Self {
        let hits = values.iter().filter(|&&f| f <= epsilon + DECISION_SLACK).count();
        let mean_f = values.iter().sum::<f64>() / values.len() as f64;
        Self {
            s,
            epsilon,
            fraction_symmetrizable: hits as f64 / values.len() as f64,
            samples: values.len(),
            mean_f,
        }
    }

    /// Binomial standard error of the fraction.
    pub fn standard_error(&self) -> f64 {
        let p = self.fraction_symmetrizable;
        (p * (1.0 - p) / self.samples as f64).sqrt()
    }
}

/// `F(W)` for every sample of one shape, in index order.
fn sample_f_values(
    x_size: usize,
    y_size: usize,
    s_size: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<f64>, ExperimentError> {
    let cell = cell_key(x_size, y_size, s_size);
    (0..samples as u64)
        .into_par_iter()
        .map(|index| {
            let mut rng = sample_rng(seed, cell, index);
            let avc = sample_avc(x_size, s_size, y_size, &mut rng);
            f_value(&avc)
                .map(|r| r.f_value)
                .map_err(|source| ExperimentError::Sample {
                    s: s_size,
                    index,
                    source,
                })
        })
        .collect()
}

/// Estimates the probability that a random `X x S x Y` channel is
/// `epsilon`-symmetrizable.
pub fn estimate_psym(
    x_size: usize,
    y_size: usize,
    s_size: usize,
    epsilon: f64,
    samples: usize,
    seed: u64,
) -> Result<ScanCell, ExperimentError> {
    ScanConfig {
        x_size,
        y_size,
        s_values: vec![s_size],
        eps_values: vec![epsilon],
        samples_per_cell: samples,
        seed,
    }
    .validate()?;
    let values = sample_f_values(x_size, y_size, s_size, samples, seed)?;
    Ok(ScanCell::from_values(s_size, epsilon, &values))
}

/// One cell per `(s, epsilon)`, `s` outermost.
pub fn psym_surface(config: &ScanConfig) -> Result<Vec<ScanCell>, ExperimentError> {
    config.validate()?;
    let mut cells = Vec::with_capacity(config.s_values.len() * config.eps_values.len());
    for &s in &config.s_values {
        let values = sample_f_values(config.x_size, config.y_size, s, config.samples_per_cell, config.seed)?;
        for &eps in &config.eps_values {
            cells.push(ScanCell::from_values(s, eps, &values));
        }
    }
    Ok(cells)
}

#[derive(Serialize)]
struct CsvRow {
    s: usize,
    epsilon: f64,
    fraction: f64,
    mean_f: f64,
    samples: usize,
    seed: u64,
}

/// Writes `s,epsilon,fraction,mean_f,samples,seed`.
pub fn write_scan_csv<W: Write>(out: W, cells: &[ScanCell], seed: u64) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    for c in cells {
        w.serialize(CsvRow {
            s: c.s,
            epsilon: c.epsilon,
            fraction: c.fraction_symmetrizable,
            mean_f: c.mean_f,
            samples: c.samples,
            seed,
        })?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

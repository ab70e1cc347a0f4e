//! Arbitrarily varying channels over finite alphabets.
//!
//! An [`Avc`] stores the transition tensor `W(y | x, s)` indexed `[x][s][y]`,
//! flattened row-major. Every `(x, s)` row is a probability distribution
//! over the output alphabet. Values are validated but never renormalized.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Row-sum tolerance applied by [`Avc::new`].
pub const ROW_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AvcError {
    #[error("shape mismatch: expected {expected} entries, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("alphabet sizes must be positive (x={x}, s={s}, y={y})")]
    EmptyAlphabet { x: usize, s: usize, y: usize },
    #[error("negative or non-finite entry {value} at (x={x}, s={s}, y={y})")]
    NegativeEntry { x: usize, s: usize, y: usize, value: f64 },
    #[error("entry {value} exceeds 1 at (x={x}, s={s}, y={y})")]
    EntryAboveOne { x: usize, s: usize, y: usize, value: f64 },
    #[error("row (x={x}, s={s}) sums to {actual}")]
    RowSumViolation { x: usize, s: usize, actual: f64 },
    #[error("jammer strategy row x={x} sums to {actual}")]
    StrategyRowSum { x: usize, actual: f64 },
    #[error("dimension mismatch: channel is {avc_x}x{avc_s}, strategy is {u_x}x{u_s}")]
    DimensionMismatch {
        avc_x: usize,
        avc_s: usize,
        u_x: usize,
        u_s: usize,
    },
    #[error("at least two sender symbols are required, got {0}")]
    AlphabetTooSmall(usize),
    #[error("powers must be positive (sender {sender}, jammer {jammer})")]
    NonPositivePower { sender: f64, jammer: f64 },
}

/// A finite arbitrarily varying channel `W(y | x, s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AvcJson", into = "AvcJson")]
pub struct Avc {
    x_size: usize,
    s_size: usize,
    y_size: usize,
    w: Vec<f64>,
}

impl Avc {
    /// Validates a flat `[x][s][y]` tensor at the default row-sum tolerance.
    pub fn new(x_size: usize, s_size: usize, y_size: usize, w: Vec<f64>) -> Result<Self, AvcError> {
        Self::with_tolerance(x_size, s_size, y_size, w, ROW_SUM_TOL)
    }

    /// Validates with a caller-chosen row-sum tolerance. Generators whose
    /// entries carry quadrature error use this with a looser bound.
    pub fn with_tolerance(
        x_size: usize,
        s_size: usize,
        y_size: usize,
        w: Vec<f64>,
        row_tol: f64,
    ) -> Result<Self, AvcError> {
        if x_size == 0 || s_size == 0 || y_size == 0 {
            return Err(AvcError::EmptyAlphabet {
                x: x_size,
                s: s_size,
                y: y_size,
            });
        }
        let expected = x_size * s_size * y_size;
        if w.len() != expected {
            return Err(AvcError::ShapeMismatch {
                expected,
                actual: w.len(),
            });
        }
        for x in 0..x_size {
            for s in 0..s_size {
                let row = &w[(x * s_size + s) * y_size..(x * s_size + s + 1) * y_size];
                for (y, &value) in row.iter().enumerate() {
                    if !(value >= 0.0) || !value.is_finite() {
                        return Err(AvcError::NegativeEntry { x, s, y, value });
                    }
                    if value > 1.0 + row_tol {
                        return Err(AvcError::EntryAboveOne { x, s, y, value });
                    }
                }
                let actual: f64 = row.iter().sum();
                if (actual - 1.0).abs() > row_tol {
                    return Err(AvcError::RowSumViolation { x, s, actual });
                }
            }
        }
        Ok(Self {
            x_size,
            s_size,
            y_size,
            w,
        })
    }

    /// Validates a nested `[x][s][y]` tensor.
    pub fn from_nested(raw: &[Vec<Vec<f64>>]) -> Result<Self, AvcError> {
        let x_size = raw.len();
        let s_size = raw.first().map_or(0, Vec::len);
        let y_size = raw.first().and_then(|r| r.first()).map_or(0, Vec::len);
        if raw.iter().any(|r| r.len() != s_size) || raw.iter().flatten().any(|r| r.len() != y_size) {
            let actual = raw.iter().flatten().map(Vec::len).sum();
            return Err(AvcError::ShapeMismatch {
                expected: x_size * s_size * y_size,
                actual,
            });
        }
        let flat = raw.iter().flatten().flatten().copied().collect();
        Self::new(x_size, s_size, y_size, flat)
    }

    /// Builds a channel from a closure `f(x, s, y)`.
    pub fn from_fn(
        x_size: usize,
        s_size: usize,
        y_size: usize,
        f: impl Fn(usize, usize, usize) -> f64,
    ) -> Result<Self, AvcError> {
        let mut w = Vec::with_capacity(x_size * s_size * y_size);
        for x in 0..x_size {
            for s in 0..s_size {
                for y in 0..y_size {
                    w.push(f(x, s, y));
                }
            }
        }
        Self::new(x_size, s_size, y_size, w)
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn s_size(&self) -> usize {
        self.s_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    /// `W(y | x, s)`.
    #[inline]
    pub fn prob(&self, x: usize, s: usize, y: usize) -> f64 {
        self.w[(x * self.s_size + s) * self.y_size + y]
    }

    /// The output distribution for sender symbol `x` and jammer state `s`.
    pub fn row(&self, x: usize, s: usize) -> &[f64] {
        let start = (x * self.s_size + s) * self.y_size;
        &self.w[start..start + self.y_size]
    }

    /// Flat `[x][s][y]` storage.
    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.x_size)
            .map(|x| (0..self.s_size).map(|s| self.row(x, s).to_vec()).collect())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("channel serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Wire form `{"x": .., "s": .., "y": .., "w": [[[..]]]}`.
#[derive(Debug, Serialize, Deserialize)]
struct AvcJson {
    x: usize,
    s: usize,
    y: usize,
    w: Vec<Vec<Vec<f64>>>,
}

impl TryFrom<AvcJson> for Avc {
    type Error = AvcError;

    fn try_from(raw: AvcJson) -> Result<Self, Self::Error> {
        let shape_ok = raw.w.len() == raw.x
            && raw.w.iter().all(|r| r.len() == raw.s)
            && raw.w.iter().flatten().all(|r| r.len() == raw.y);
        if !shape_ok {
            return Err(AvcError::ShapeMismatch {
                expected: raw.x * raw.s * raw.y,
                actual: raw.w.iter().flatten().map(Vec::len).sum(),
            });
        }
        let flat = raw.w.into_iter().flatten().flatten().collect();
        Avc::new(raw.x, raw.s, raw.y, flat)
    }
}

impl From<Avc> for AvcJson {
    fn from(avc: Avc) -> Self {
        AvcJson {
            x: avc.x_size,
            s: avc.s_size,
            y: avc.y_size,
            w: avc.to_nested(),
        }
    }
}

/// A jammer strategy `U(s | x)`, indexed `[x][s]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JammerStrategy {
    x_size: usize,
    s_size: usize,
    u: Vec<f64>,
}

impl JammerStrategy {
    pub fn new(x_size: usize, s_size: usize, u: Vec<f64>) -> Result<Self, AvcError> {
        Self::with_tolerance(x_size, s_size, u, ROW_SUM_TOL)
    }

    pub fn with_tolerance(x_size: usize, s_size: usize, u: Vec<f64>, row_tol: f64) -> Result<Self, AvcError> {
        if x_size == 0 || s_size == 0 {
            return Err(AvcError::EmptyAlphabet {
                x: x_size,
                s: s_size,
                y: 1,
            });
        }
        if u.len() != x_size * s_size {
            return Err(AvcError::ShapeMismatch {
                expected: x_size * s_size,
                actual: u.len(),
            });
        }
        for x in 0..x_size {
            let row = &u[x * s_size..(x + 1) * s_size];
            if let Some((s, &value)) = row.iter().enumerate().find(|(_, v)| !(**v >= 0.0) || !v.is_finite()) {
                return Err(AvcError::NegativeEntry { x, s, y: 0, value });
            }
            let actual: f64 = row.iter().sum();
            if (actual - 1.0).abs() > row_tol {
                return Err(AvcError::StrategyRowSum { x, actual });
            }
        }
        Ok(Self { x_size, s_size, u })
    }

    /// `U(s | x) = [s == x]`; requires `S >= X`.
    pub fn identity(x_size: usize, s_size: usize) -> Result<Self, AvcError> {
        let u = (0..x_size)
            .flat_map(|x| (0..s_size).map(move |s| if s == x { 1.0 } else { 0.0 }))
            .collect();
        Self::new(x_size, s_size, u)
    }

    pub fn uniform(x_size: usize, s_size: usize) -> Result<Self, AvcError> {
        Self::new(x_size, s_size, vec![1.0 / s_size as f64; x_size * s_size])
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn s_size(&self) -> usize {
        self.s_size
    }

    #[inline]
    pub fn prob(&self, x: usize, s: usize) -> f64 {
        self.u[x * self.s_size + s]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.u[x * self.s_size..(x + 1) * self.s_size]
    }

    pub fn to_nested(&self) -> Vec<Vec<f64>> {
        (0..self.x_size).map(|x| self.row(x).to_vec()).collect()
    }
}

/// Per-pair L1 mismatch for a fixed strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectReport {
    /// Keyed by `(x, x_hat)` with `x < x_hat`.
    pub per_pair: BTreeMap<(usize, usize), f64>,
    pub max_defect: f64,
}

/// `sum_y | sum_s W(y|x,s) U(s|x_hat) - sum_s W(y|x_hat,s) U(s|x) |` for one pair.
pub fn pair_defect(avc: &Avc, u: &JammerStrategy, x: usize, x_hat: usize) -> f64 {
    (0..avc.y_size)
        .map(|y| {
            let mut diff = 0.0;
            for s in 0..avc.s_size {
                diff += avc.prob(x, s, y) * u.prob(x_hat, s) - avc.prob(x_hat, s, y) * u.prob(x, s);
            }
            diff.abs()
        })
        .sum()
}

/// Evaluates the symmetrization defect of `avc` under the strategy `u`.
pub fn symmetrization_defect(avc: &Avc, u: &JammerStrategy) -> Result<DefectReport, AvcError> {
    if avc.x_size != u.x_size || avc.s_size != u.s_size {
        return Err(AvcError::DimensionMismatch {
            avc_x: avc.x_size,
            avc_s: avc.s_size,
            u_x: u.x_size,
            u_s: u.s_size,
        });
    }
    if avc.x_size < 2 {
        return Err(AvcError::AlphabetTooSmall(avc.x_size));
    }
    let mut per_pair = BTreeMap::new();
    let mut max_defect: f64 = 0.0;
    for x in 0..avc.x_size {
        for x_hat in x + 1..avc.x_size {
            let d = pair_defect(avc, u, x, x_hat);
            max_defect = max_defect.max(d);
            per_pair.insert((x, x_hat), d);
        }
    }
    Ok(DefectReport { per_pair, max_defect })
}

/// Capacity in bits of the Gaussian AVC with sender power `sender` and
/// jammer power `jammer`: `0.5 * log2(1 + E/P)` when `P < E`, else zero.
pub fn gaussian_avc_capacity(sender: f64, jammer: f64) -> Result<f64, AvcError> {
    if !(sender > 0.0) || !(jammer > 0.0) {
        return Err(AvcError::NonPositivePower { sender, jammer });
    }
    if jammer < sender {
        Ok(0.5 * (1.0 + sender / jammer).log2())
    } else {
        Ok(0.0)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// `W(y|s,x) = W(y|x,s)` with `W(0|s,x)` = 0.9, 0.4, 0.4, 0.2 over (s,x) = (0,0),(0,1),(1,0),(1,1).
    pub fn symmetric_channel() -> Avc {
        let p0 = [[0.9, 0.4], [0.4, 0.2]];
        Avc::from_fn(2, 2, 2, |x, s, y| if y == 0 { p0[s][x] } else { 1.0 - p0[s][x] }).unwrap()
    }

    /// Output depends only on the jammer state.
    pub fn x_independent_channel() -> Avc {
        let v0 = [0.7, 0.3];
        Avc::from_fn(2, 2, 2, |_, s, y| if y == 0 { v0[s] } else { 1.0 - v0[s] }).unwrap()
    }

    /// Output depends only on the sender symbol.
    pub fn s_independent_channel() -> Avc {
        let p0 = [0.9, 0.1];
        Avc::from_fn(2, 2, 2, |x, _, y| if y == 0 { p0[x] } else { 1.0 - p0[x] }).unwrap()
    }
}

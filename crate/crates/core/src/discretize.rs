//! Finite approximations of a jammer with continuous inputs.
//!
//! The jammer's energy disk `|beta|^2 <= E_S` is covered by a square grid
//! of half-open boxes of side `delta`. Boxes touching the disk are kept
//! whole; a box center outside the disk is pulled back onto its boundary.
//! A continuous channel becomes a finite one by averaging over each box,
//! and a continuous jammer strategy by integrating its density over each
//! box.

use std::io::Write;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::avc::{Avc, AvcError, JammerStrategy};
use crate::bosonic::{beamsplitter_output, psk_constellation, wedge_row, BosonicError, BosonicParams};
use crate::quad::{integrate, integrate_rect, QuadError, Rect};
use crate::sym::{f_value, SymError};

/// Allowed deviation of a discretized strategy row from total mass one.
pub const MASS_TOL: f64 = 1e-6;
const MASS_QUAD_TOL: f64 = 1e-11;
const MAX_BOX_SUBDIVISIONS: usize = 4000;

#[derive(Debug, Error)]
pub enum DiscretizeError {
    #[error("pitch {pitch} exceeds the disk diameter {max}")]
    PitchTooLarge { pitch: f64, max: f64 },
    #[error("invalid grid: {0}")]
    InvalidSpec(String),
    #[error("row {x} of the discretized strategy has mass {mass}")]
    NormalizationFailure { x: usize, mass: f64 },
    #[error("pitch values must be positive and strictly decreasing")]
    DeltaOrder,
    #[error(transparent)]
    Bosonic(#[from] BosonicError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Avc(#[from] AvcError),
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub energy_limit: f64,
    pub pitch: f64,
}

impl GridSpec {
    pub fn new(energy_limit: f64, pitch: f64) -> Result<Self, DiscretizeError> {
        let spec = Self { energy_limit, pitch };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), DiscretizeError> {
        if !(self.energy_limit > 0.0) || !self.energy_limit.is_finite() {
            return Err(DiscretizeError::InvalidSpec(format!(
                "energy limit {}",
                self.energy_limit
            )));
        }
        if !(self.pitch > 0.0) || !self.pitch.is_finite() {
            return Err(DiscretizeError::InvalidSpec(format!("pitch {}", self.pitch)));
        }
        let max = 2.0 * self.energy_limit.sqrt();
        if self.pitch > max {
            return Err(DiscretizeError::PitchTooLarge { pitch: self.pitch, max });
        }
        Ok(())
    }

    pub fn radius(&self) -> f64 {
        self.energy_limit.sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JammerGrid {
    pub spec: GridSpec,
    /// Boxes per axis of the bounding lattice.
    pub per_axis: usize,
    /// Lower-left corner of the bounding lattice (both coordinates).
    pub origin: f64,
    pub boxes: Vec<Rect>,
    pub centers: Vec<Complex64>,
    /// Lattice cell `(ix, iy)` at `iy * per_axis + ix` maps to a box index.
    lookup: Vec<Option<usize>>,
}

/// Lattice over the bounding square of the disk, keeping every box whose
/// closure meets the disk.
pub fn make_grid(spec: GridSpec) -> Result<JammerGrid, DiscretizeError> {
    spec.validate()?;
    let r = spec.radius();
    let delta = spec.pitch;
    let per_axis = ((2.0 * r / delta) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let origin = -(per_axis as f64) * delta / 2.0;
    let mut boxes = Vec::new();
    let mut centers = Vec::new();
    let mut lookup = vec![None; per_axis * per_axis];
    for iy in 0..per_axis {
        for ix in 0..per_axis {
            let x0 = origin + ix as f64 * delta;
            let y0 = origin + iy as f64 * delta;
            let rect = Rect {
                x0,
                x1: x0 + delta,
                y0,
                y1: y0 + delta,
            };
            let nearest = Complex64::new(0.0f64.clamp(rect.x0, rect.x1), 0.0f64.clamp(rect.y0, rect.y1));
            if nearest.norm_sqr() > spec.energy_limit {
                continue;
            }
            let mid = Complex64::new(x0 + delta / 2.0, y0 + delta / 2.0);
            let center = if mid.norm() > r { mid * (r / mid.norm()) } else { mid };
            lookup[iy * per_axis + ix] = Some(boxes.len());
            boxes.push(rect);
            centers.push(center);
        }
    }
    Ok(JammerGrid {
        spec,
        per_axis,
        origin,
        boxes,
        centers,
        lookup,
    })
}

impl JammerGrid {
    pub fn count(&self) -> usize {
        self.boxes.len()
    }

    fn cell(&self, v: f64) -> Option<usize> {
        let k = ((v - self.origin) / self.spec.pitch).floor();
        if k < 0.0 {
            return None;
        }
        let k = k as usize;
        match k.cmp(&self.per_axis) {
            std::cmp::Ordering::Less => Some(k),
            // The far edge of the lattice closes the last box.
            std::cmp::Ordering::Equal if v <= self.origin + self.per_axis as f64 * self.spec.pitch => Some(k - 1),
            _ => None,
        }
    }

    /// Index of the retained box containing `z`.
    pub fn locate(&self, z: Complex64) -> Option<usize> {
        let ix = self.cell(z.re)?;
        let iy = self.cell(z.im)?;
        self.lookup[iy * self.per_axis + ix]
    }

    /// Whether box `i` contains `z` under the half-open convention.
    pub fn contains(&self, i: usize, z: Complex64) -> bool {
        let b = &self.boxes[i];
        let far = self.origin + self.per_axis as f64 * self.spec.pitch;
        let inside = |v: f64, lo: f64, hi: f64| v >= lo && (v < hi || (hi == far && v == far));
        inside(z.re, b.x0, b.x1) && inside(z.im, b.y0, b.y1)
    }
}

/// A jammer strategy over the continuous input disk: `density(x, s)` is the
/// probability density of input `s` given the spoofed message `x`.
pub trait ContinuousStrategy: Sync {
    fn rows(&self) -> usize;
    fn density(&self, x: usize, s: Complex64) -> f64;
}

/// Uniform over the disk for every row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformDisk {
    pub energy_limit: f64,
    pub rows: usize,
}

impl ContinuousStrategy for UniformDisk {
    fn rows(&self) -> usize {
        self.rows
    }

    fn density(&self, _x: usize, s: Complex64) -> f64 {
        if s.norm_sqr() <= self.energy_limit {
            1.0 / (std::f64::consts::PI * self.energy_limit)
        } else {
            0.0
        }
    }
}

/// Centered Gaussian `exp(-|s|^2 / width^2)` restricted to the disk and
/// renormalized, identical for every row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedGaussian {
    pub energy_limit: f64,
    pub width: f64,
    pub rows: usize,
}

impl ContinuousStrategy for TruncatedGaussian {
    fn rows(&self) -> usize {
        self.rows
    }

    fn density(&self, _x: usize, s: Complex64) -> f64 {
        let r2 = s.norm_sqr();
        if r2 > self.energy_limit {
            return 0.0;
        }
        let w2 = self.width * self.width;
        let mass = std::f64::consts::PI * w2 * -(-self.energy_limit / w2).exp_m1();
        (-r2 / w2).exp() / mass
    }
}

/// Integral of `f` over `rect` intersected with the disk of radius `r`.
fn integrate_box_disk(f: impl Fn(f64, f64) -> f64, rect: &Rect, r: f64, tol: f64) -> Result<f64, QuadError> {
    let lo = rect.x0.max(-r);
    let hi = rect.x1.min(r);
    if lo >= hi {
        return Ok(0.0);
    }
    // The disk boundary crosses the box edges at these abscissae.
    let mut cuts = vec![lo, hi];
    for y in [rect.y0, rect.y1] {
        if y.abs() < r {
            let u = (r * r - y * y).sqrt();
            cuts.extend([-u, u].into_iter().filter(|&u| u > lo && u < hi));
        }
    }
    if lo < 0.0 && hi > 0.0 {
        cuts.push(0.0);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let pieces = (cuts.len() - 1) as f64;
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let q = integrate(
            |u| {
                let h = (r * r - u * u).max(0.0).sqrt();
                let (a, b) = (rect.y0.max(-h), rect.y1.min(h));
                if a >= b {
                    return 0.0;
                }
                integrate(|v| f(u, v), a, b, tol / (2.0 * pieces * (w[1] - w[0]).max(1.0)))
                    .map(|q| q.value)
                    .unwrap_or(f64::NAN)
            },
            w[0],
            w[1],
            tol / (2.0 * pieces),
        )?;
        total += q.value;
    }
    Ok(total)
}

/// Box masses of a continuous strategy: entry `(x, i)` integrates the
/// density of row `x` over box `i`.
pub fn discretize_strategy(
    density: &dyn ContinuousStrategy,
    grid: &JammerGrid,
) -> Result<JammerStrategy, DiscretizeError> {
    let rows = density.rows();
    let s = grid.count();
    let r = grid.spec.radius();
    let cells: Vec<f64> = (0..rows * s)
        .into_par_iter()
        .map(|k| {
            let (x, i) = (k / s, k % s);
            integrate_box_disk(
                |u, v| density.density(x, Complex64::new(u, v)),
                &grid.boxes[i],
                r,
                MASS_QUAD_TOL,
            )
        })
        .collect::<Result<_, _>>()?;
    for x in 0..rows {
        let mass: f64 = cells[x * s..(x + 1) * s].iter().sum();
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(DiscretizeError::NormalizationFailure { x, mass });
        }
    }
    Ok(JammerStrategy::with_tolerance(rows, s, cells, MASS_TOL)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedAvc {
    pub avc: Avc,
    pub grid: JammerGrid,
    pub source_params: BosonicParams,
}

/// Output distributions of every sender message against jammer input `beta`,
/// written `x`-major into `out`.
fn channel_rows_at(
    params: &BosonicParams,
    constellation: &[Complex64],
    beta: Complex64,
    out: &mut [f64],
) -> Result<(), BosonicError> {
    let m = params.m;
    let jammer = params.jammer_state(beta);
    for x in 0..m {
        let state = beamsplitter_output(&params.sender_state(constellation, x), &jammer, params.eta)?;
        out[x * m..(x + 1) * m].copy_from_slice(&wedge_row(&state, m, params.quad_tol)?);
    }
    Ok(())
}

fn assemble(params: &BosonicParams, grid: &JammerGrid, per_box: Vec<Vec<f64>>) -> Result<Avc, DiscretizeError> {
    let m = params.m;
    let s = grid.count();
    let mut w = vec![0.0; m * s * m];
    for (i, cell) in per_box.iter().enumerate() {
        for x in 0..m {
            let dst = (x * s + i) * m;
            w[dst..dst + m].copy_from_slice(&cell[x * m..(x + 1) * m]);
        }
    }
    let tol = (m as f64 * params.quad_tol).max(1e-9);
    Ok(Avc::with_tolerance(m, s, m, w, tol)?)
}

/// Channel whose jammer input `i` is the average of the continuous channel
/// over box `i`. The sender uses the constellation of `params`; the jammer
/// inputs are the grid boxes.
pub fn average_channel(params: &BosonicParams, grid: &JammerGrid) -> Result<DiscretizedAvc, DiscretizeError> {
    params.validate()?;
    let m = params.m;
    let constellation = psk_constellation(m, params.energy)?;
    let area = grid.spec.pitch * grid.spec.pitch;
    let per_box: Vec<Vec<f64>> = grid
        .boxes
        .par_iter()
        .map(|rect| {
            let mut failure: Option<BosonicError> = None;
            let sums = integrate_rect(
                |u, v, out| {
                    if let Err(e) = channel_rows_at(params, &constellation, Complex64::new(u, v), out) {
                        failure.get_or_insert(e);
                        out.iter_mut().for_each(|o| *o = 0.0);
                    }
                },
                *rect,
                m * m,
                params.quad_tol * area,
                MAX_BOX_SUBDIVISIONS,
            )?;
            if let Some(e) = failure {
                return Err(e.into());
            }
            Ok(sums.into_iter().map(|v| v / area).collect())
        })
        .collect::<Result<_, DiscretizeError>>()?;
    Ok(DiscretizedAvc {
        avc: assemble(params, grid, per_box)?,
        grid: grid.clone(),
        source_params: *params,
    })
}

/// Channel evaluated at the box centers instead of averaged over boxes.
pub fn center_channel(params: &BosonicParams, grid: &JammerGrid) -> Result<Avc, DiscretizeError> {
    params.validate()?;
    let m = params.m;
    let constellation = psk_constellation(m, params.energy)?;
    let per_box: Vec<Vec<f64>> = grid
        .centers
        .par_iter()
        .map(|&beta| {
            let mut out = vec![0.0; m * m];
            channel_rows_at(params, &constellation, beta, &mut out)?;
            Ok(out)
        })
        .collect::<Result<_, DiscretizeError>>()?;
    assemble(params, grid, per_box)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub delta: f64,
    pub s_delta: usize,
    pub lp_n: usize,
    pub lp_m: usize,
    pub f_value: f64,
    pub build_seconds: f64,
    pub solve_seconds: f64,
}

/// `F` of the box-averaged channel for each pitch, finest last.
pub fn convergence_scan(
    params: &BosonicParams,
    energy_limit: f64,
    delta_values: &[f64],
) -> Result<Vec<ConvergenceRow>, DiscretizeError> {
    if delta_values.is_empty()
        || delta_values.iter().any(|d| !(*d > 0.0))
        || delta_values.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(DiscretizeError::DeltaOrder);
    }
    delta_values
        .iter()
        .map(|&delta| {
            let start = Instant::now();
            let grid = make_grid(GridSpec::new(energy_limit, delta)?)?;
            let disc = average_channel(params, &grid)?;
            let build_seconds = start.elapsed().as_secs_f64();
            let start = Instant::now();
            let r = f_value(&disc.avc)?;
            let solve_seconds = start.elapsed().as_secs_f64();
            Ok(ConvergenceRow {
                delta,
                s_delta: grid.count(),
                lp_n: r.lp_stats.n,
                lp_m: r.lp_stats.m,
                f_value: r.f_value,
                build_seconds,
                solve_seconds,
            })
        })
        .collect()
}

/// Writes `delta,s_delta,lp_n,lp_m,f_value,build_seconds,solve_seconds`.
pub fn write_convergence_csv<W: Write>(out: W, rows: &[ConvergenceRow]) -> Result<(), DiscretizeError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

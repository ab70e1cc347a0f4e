//! Adaptive quadrature.
//!
//! One-dimensional integrals use a globally adaptive 7/15-point
//! Gauss-Kronrod scheme: the interval with the largest error estimate is
//! bisected until the summed estimate drops below the tolerance.
//! Rectangles use a tensorized 7-point Gauss-Legendre rule, refined the
//! same way by quartering, with the error of a cell estimated from the
//! difference between its own rule and the sum over its four quarters.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("tolerance {tol:e} not reached after {subdivisions} subdivisions (estimate {estimate:e})")]
    QuadratureFailure {
        tol: f64,
        estimate: f64,
        subdivisions: usize,
    },
    #[error("integrand returned a non-finite value")]
    NonFinite,
}

/// Kronrod abscissae on `[0, 1]`; odd indices are the Gauss points.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 7-point Gauss-Legendre rule on `[-1, 1]`.
pub const GL7_NODES: [f64; 7] = [-XGK[1], -XGK[3], -XGK[5], 0.0, XGK[5], XGK[3], XGK[1]];
pub const GL7_WEIGHTS: [f64; 7] = [WG[0], WG[1], WG[2], WG[3], WG[2], WG[1], WG[0]];

pub const DEFAULT_MAX_SUBDIVISIONS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

fn gauss_kronrod(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<Quadrature, QuadError> {
    integrate_with(&mut f, a, b, tol, DEFAULT_MAX_SUBDIVISIONS)
}

pub fn integrate_with(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    max_subdivisions: usize,
) -> Result<Quadrature, QuadError> {
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let (value, error) = gauss_kronrod(f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total_value = value;
    let mut total_error = error;
    let mut subdivisions = 0;
    while total_error > tol {
        if subdivisions >= max_subdivisions {
            return Err(QuadError::QuadratureFailure {
                tol,
                estimate: total_error,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let (lv, le) = gauss_kronrod(f, worst.a, mid);
        let (rv, re) = gauss_kronrod(f, mid, worst.b);
        evaluations += 30;
        subdivisions += 1;
        total_value += lv + rv - worst.value;
        total_error += le + re - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
        });
        if !total_value.is_finite() {
            return Err(QuadError::NonFinite);
        }
        // Resum to keep the running totals free of cancellation drift.
        if subdivisions % 64 == 0 {
            total_value = heap.iter().map(|s| s.value).sum();
            total_error = heap.iter().map(|s| s.error).sum();
        }
    }
    // Final sum in interval order so the result does not depend on heap layout.
    let mut parts: Vec<&Segment> = heap.iter().collect();
    parts.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = parts.iter().map(|s| s.value).sum();
    if !f64::is_finite(value) {
        return Err(QuadError::NonFinite);
    }
    Ok(Quadrature {
        value,
        error_estimate: total_error,
        evaluations,
    })
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    fn quarters(&self) -> [Rect; 4] {
        let xm = 0.5 * (self.x0 + self.x1);
        let ym = 0.5 * (self.y0 + self.y1);
        [
            Rect {
                x0: self.x0,
                x1: xm,
                y0: self.y0,
                y1: ym,
            },
            Rect {
                x0: xm,
                x1: self.x1,
                y0: self.y0,
                y1: ym,
            },
            Rect {
                x0: self.x0,
                x1: xm,
                y0: ym,
                y1: self.y1,
            },
            Rect {
                x0: xm,
                x1: self.x1,
                y0: ym,
                y1: self.y1,
            },
        ]
    }
}

/// Tensor 7x7 Gauss-Legendre over `rect` of a vector-valued integrand
/// writing `dim` components into its output slice.
fn gl7_rect(f: &mut impl FnMut(f64, f64, &mut [f64]), rect: &Rect, dim: usize, scratch: &mut [f64]) -> Vec<f64> {
    let hx = 0.5 * (rect.x1 - rect.x0);
    let hy = 0.5 * (rect.y1 - rect.y0);
    let cx = 0.5 * (rect.x0 + rect.x1);
    let cy = 0.5 * (rect.y0 + rect.y1);
    let mut acc = vec![0.0; dim];
    for (nx, wx) in GL7_NODES.iter().zip(GL7_WEIGHTS) {
        for (ny, wy) in GL7_NODES.iter().zip(GL7_WEIGHTS) {
            f(cx + hx * nx, cy + hy * ny, scratch);
            let w = wx * wy * hx * hy;
            for (a, v) in acc.iter_mut().zip(scratch.iter()) {
                *a += w * v;
            }
        }
    }
    acc
}

struct Cell {
    rect: Rect,
    /// Sum of the quarter rules.
    value: Vec<f64>,
    error: f64,
    order: usize,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.order.cmp(&self.order))
    }
}

fn refine_cell(
    f: &mut impl FnMut(f64, f64, &mut [f64]),
    rect: Rect,
    coarse: Vec<f64>,
    dim: usize,
    scratch: &mut [f64],
    order: usize,
) -> (Cell, [Vec<f64>; 4]) {
    let quarters = rect.quarters();
    let parts = quarters.map(|q| gl7_rect(f, &q, dim, scratch));
    let mut value = vec![0.0; dim];
    for p in &parts {
        for (v, x) in value.iter_mut().zip(p) {
            *v += x;
        }
    }
    let error = value
        .iter()
        .zip(&coarse)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    (
        Cell {
            rect,
            value,
            error,
            order,
        },
        parts,
    )
}

/// Integrates a vector-valued `f` over `rect`; the returned components
/// each carry an estimated absolute error of at most `tol`.
pub fn integrate_rect(
    mut f: impl FnMut(f64, f64, &mut [f64]),
    rect: Rect,
    dim: usize,
    tol: f64,
    max_subdivisions: usize,
) -> Result<Vec<f64>, QuadError> {
    let mut scratch = vec![0.0; dim];
    let coarse = gl7_rect(&mut f, &rect, dim, &mut scratch);
    let mut order = 0;
    let (root, mut children) = refine_cell(&mut f, rect, coarse, dim, &mut scratch, order);
    let mut total_error = root.error;
    let mut heap = BinaryHeap::new();
    // Children rules are kept so a refined cell reuses them as its coarse estimates.
    let mut pending: Vec<Option<[Vec<f64>; 4]>> = Vec::new();
    pending.push(Some(std::mem::take(&mut children)));
    heap.push(root);
    let mut subdivisions = 0;
    while total_error > tol {
        if subdivisions >= max_subdivisions {
            return Err(QuadError::QuadratureFailure {
                tol,
                estimate: total_error,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        total_error -= worst.error;
        let coarse_parts = pending[worst.order].take().expect("cell refined once");
        for (q, coarse) in worst.rect.quarters().into_iter().zip(coarse_parts) {
            order += 1;
            let (cell, parts) = refine_cell(&mut f, q, coarse, dim, &mut scratch, order);
            total_error += cell.error;
            pending.push(Some(parts));
            heap.push(cell);
        }
        subdivisions += 1;
    }
    let mut cells: Vec<&Cell> = heap.iter().collect();
    cells.sort_by_key(|c| c.order);
    let mut out = vec![0.0; dim];
    for c in cells {
        for (o, v) in out.iter_mut().zip(&c.value) {
            *o += v;
        }
    }
    if out.iter().any(|v| !v.is_finite()) {
        return Err(QuadError::NonFinite);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        let s: f64 = GL7_WEIGHTS.iter().sum();
        assert!((s - 2.0).abs() < 1e-15);
        let k: f64 = WGK[7] + 2.0 * WGK[..7].iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-15);
    }

    #[test]
    fn integrates_polynomials_exactly() {
        let q = integrate(|x| x.powi(6) - 3.0 * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((q.value - (128.0 / 7.0 - 6.0)).abs() < 1e-12);
    }

    #[test]
    fn integrates_peaked_gaussian() {
        let q = integrate(|x| (-(x * x) / 1e-4).exp(), -1.0, 1.0, 1e-12).unwrap();
        let exact = (std::f64::consts::PI * 1e-4).sqrt() * libm::erf(100.0);
        assert!((q.value - exact).abs() < 1e-11, "{} vs {exact}", q.value);
    }

    #[test]
    fn handles_sqrt_endpoint() {
        let q = integrate(|x| (1.0 - x * x).max(0.0).sqrt(), -1.0, 1.0, 1e-10).unwrap();
        assert!((q.value - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn reports_failure_when_budget_exhausted() {
        let mut f = |x: f64| if x < 0.3 { 0.0 } else { 1.0 };
        let err = integrate_with(&mut f, 0.0, 1.0, 1e-14, 3).unwrap_err();
        assert!(matches!(err, QuadError::QuadratureFailure { subdivisions: 3, .. }));
    }

    #[test]
    fn rect_rule_on_smooth_integrand() {
        let rect = Rect {
            x0: -1.0,
            x1: 2.0,
            y0: 0.0,
            y1: 1.5,
        };
        let out = integrate_rect(
            |x, y, o| {
                o[0] = (x * y).cos();
                o[1] = 1.0;
            },
            rect,
            2,
            1e-12,
            200,
        )
        .unwrap();
        // Reference by iterated one-dimensional quadrature.
        let reference = integrate(
            |x| integrate(|y| (x * y).cos(), 0.0, 1.5, 1e-14).unwrap().value,
            -1.0,
            2.0,
            1e-13,
        )
        .unwrap()
        .value;
        assert!((out[0] - reference).abs() < 1e-11);
        assert!((out[1] - rect.area()).abs() < 1e-13);
    }
}

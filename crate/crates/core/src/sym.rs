//! Symmetrizability as a linear program.
//!
//! The jammer strategy `U(s|x)` and one auxiliary variable `z(x, x_hat, y)`
//! per unordered pair and output symbol linearize the absolute values in
//! the pairwise L1 mismatch. Bounding every pair budget `sum_y z` by a
//! fixed `epsilon` gives the feasibility problem; bounding them all by one
//! scalar `t` and minimizing `t` gives `F(W)` directly.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::avc::{symmetrization_defect, Avc, AvcError, JammerStrategy};
use crate::lp::{solve_lp, LinearProgram, LpError, LpStatus};

/// Slack on `F <= epsilon` absorbing solver tolerance.
pub const DECISION_SLACK: f64 = 1e-8;
/// Allowed gap between the LP optimum and the re-evaluated defect of its strategy.
pub const CERTIFICATE_TOL: f64 = 1e-6;
/// Largest number of strategies [`brute_force_f`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymError {
    #[error(transparent)]
    Avc(#[from] AvcError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("solver returned {0:?} for a program that always has an optimum")]
    UnexpectedStatus(LpStatus),
    #[error("LP optimum {lp} disagrees with re-evaluated defect {reevaluated}")]
    CertificateMismatch { lp: f64, reevaluated: f64 },
    #[error("grid has {points} strategies, limit is {limit}")]
    GridTooLarge { points: u128, limit: u128 },
    #[error("resolution must be in (0, 1], got {0}")]
    InvalidResolution(f64),
}

/// Constraint and variable counts of an assembled program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LpSize {
    pub variables: usize,
    pub equalities: usize,
    /// Nonnegativity bounds on the strategy entries.
    pub bounds: usize,
    pub linearization: usize,
    pub budget: usize,
}

impl LpSize {
    pub fn for_shape(x_size: usize, s_size: usize, y_size: usize) -> Self {
        let pairs = x_size * x_size.saturating_sub(1) / 2;
        Self {
            variables: x_size * s_size + pairs * y_size,
            equalities: x_size,
            bounds: x_size * s_size,
            linearization: 2 * pairs * y_size,
            budget: pairs,
        }
    }

    pub fn constraints(&self) -> usize {
        self.equalities + self.bounds + self.linearization + self.budget
    }
}

/// Variable layout shared by both programs.
struct Layout {
    x: usize,
    s: usize,
    y: usize,
    pairs: Vec<(usize, usize)>,
}

impl Layout {
    fn new(avc: &Avc) -> Result<Self, SymError> {
        let x = avc.x_size();
        if x < 2 {
            return Err(AvcError::AlphabetTooSmall(x).into());
        }
        let pairs = (0..x).flat_map(|a| (a + 1..x).map(move |b| (a, b))).collect();
        Ok(Self {
            x,
            s: avc.s_size(),
            y: avc.y_size(),
            pairs,
        })
    }

    fn u(&self, x: usize, s: usize) -> usize {
        x * self.s + s
    }

    fn z(&self, pair: usize, y: usize) -> usize {
        self.x * self.s + pair * self.y + y
    }

    fn base_vars(&self) -> usize {
        self.x * self.s + self.pairs.len() * self.y
    }

    /// Everything except the budget rows.
    fn assemble(&self, avc: &Avc, n: usize) -> LinearProgram {
        let mut lp = LinearProgram::new(n);
        for x in 0..self.x {
            let mut row = vec![0.0; n];
            for s in 0..self.s {
                row[self.u(x, s)] = 1.0;
            }
            lp.add_eq(row, 1.0);
        }
        for (p, &(x, x_hat)) in self.pairs.iter().enumerate() {
            for y in 0..self.y {
                // D = sum_s W(y|x,s) U(s|x_hat) - sum_s W(y|x_hat,s) U(s|x)
                let mut diff = vec![0.0; n];
                for s in 0..self.s {
                    diff[self.u(x_hat, s)] += avc.prob(x, s, y);
                    diff[self.u(x, s)] -= avc.prob(x_hat, s, y);
                }
                let mut pos = diff.clone();
                pos[self.z(p, y)] = -1.0;
                lp.add_le(pos, 0.0);
                let mut neg: Vec<f64> = diff.into_iter().map(|a| -a).collect();
                neg[self.z(p, y)] = -1.0;
                lp.add_le(neg, 0.0);
            }
        }
        lp
    }

    fn strategy(&self, point: &[f64]) -> Result<JammerStrategy, AvcError> {
        let mut u = point[..self.x * self.s].to_vec();
        for row in u.chunks_mut(self.s) {
            let total: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= total);
        }
        JammerStrategy::new(self.x, self.s, u)
    }
}

/// The feasibility program: a point exists iff `F(W) <= epsilon`.
pub fn build_epsilon_sym_lp(avc: &Avc, epsilon: f64) -> Result<LinearProgram, SymError> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(SymError::InvalidEpsilon(epsilon));
    }
    let layout = Layout::new(avc)?;
    let n = layout.base_vars();
    let mut lp = layout.assemble(avc, n);
    for p in 0..layout.pairs.len() {
        let mut row = vec![0.0; n];
        for y in 0..layout.y {
            row[layout.z(p, y)] = 1.0;
        }
        lp.add_le(row, epsilon);
    }
    Ok(lp)
}

/// Minimizes `t` subject to every pair budget `sum_y z <= t`.
pub fn build_f_value_lp(avc: &Avc) -> Result<LinearProgram, SymError> {
    let layout = Layout::new(avc)?;
    let n = layout.base_vars() + 1;
    let t = n - 1;
    let mut lp = layout.assemble(avc, n);
    for p in 0..layout.pairs.len() {
        let mut row = vec![0.0; n];
        for y in 0..layout.y {
            row[layout.z(p, y)] = 1.0;
        }
        row[t] = -1.0;
        lp.add_le(row, 0.0);
    }
    lp.objective[t] = 1.0;
    Ok(lp)
}

/// Solves the feasibility program and returns a certificate strategy when
/// one exists.
pub fn solve_epsilon_sym(avc: &Avc, epsilon: f64) -> Result<Option<JammerStrategy>, SymError> {
    let lp = build_epsilon_sym_lp(avc, epsilon)?;
    let out = solve_lp(&lp)?;
    match out.status {
        LpStatus::Optimal => {
            let layout = Layout::new(avc)?;
            Ok(Some(layout.strategy(&out.point.expect("optimal has point"))?))
        }
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => Err(SymError::UnexpectedStatus(LpStatus::Unbounded)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LpStats {
    pub n: usize,
    pub m: usize,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymResult {
    pub f_value: f64,
    pub strategy: JammerStrategy,
    pub epsilon: Option<f64>,
    pub is_eps_symmetrizable: Option<bool>,
    pub lp_stats: LpStats,
}

#[derive(Serialize)]
struct SymResultJson<'a> {
    f_value: f64,
    epsilon: Option<f64>,
    symmetrizable: Option<bool>,
    u: Vec<Vec<f64>>,
    lp: &'a LpStats,
}

impl SymResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&SymResultJson {
            f_value: self.f_value,
            epsilon: self.epsilon,
            symmetrizable: self.is_eps_symmetrizable,
            u: self.strategy.to_nested(),
            lp: &self.lp_stats,
        })
        .expect("result serializes")
    }
}

/// Computes `F(W)` as a single LP optimum and checks the optimal strategy
/// against a direct defect evaluation.
pub fn f_value(avc: &Avc) -> Result<SymResult, SymError> {
    let layout = Layout::new(avc)?;
    let lp = build_f_value_lp(avc)?;
    let out = solve_lp(&lp)?;
    let (value, point) = match out.status {
        LpStatus::Optimal => (
            out.value.expect("optimal has value"),
            out.point.expect("optimal has point"),
        ),
        status => return Err(SymError::UnexpectedStatus(status)),
    };
    let strategy = layout.strategy(&point)?;
    let reevaluated = symmetrization_defect(avc, &strategy)?.max_defect;
    if (reevaluated - value).abs() > CERTIFICATE_TOL {
        return Err(SymError::CertificateMismatch { lp: value, reevaluated });
    }
    let size = LpSize::for_shape(layout.x, layout.s, layout.y);
    Ok(SymResult {
        f_value: value.max(0.0),
        strategy,
        epsilon: None,
        is_eps_symmetrizable: None,
        lp_stats: LpStats {
            n: lp.num_vars(),
            m: size.constraints() + 1,
            iterations: out.iterations,
        },
    })
}

/// Decides `F(W) <= epsilon` (with [`DECISION_SLACK`]).
pub fn is_epsilon_symmetrizable(avc: &Avc, epsilon: f64) -> Result<SymResult, SymError> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(SymError::InvalidEpsilon(epsilon));
    }
    let mut result = f_value(avc)?;
    result.epsilon = Some(epsilon);
    result.is_eps_symmetrizable = Some(result.f_value <= epsilon + DECISION_SLACK);
    Ok(result)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForce {
    pub value: f64,
    pub strategy: JammerStrategy,
    /// `X * S * 2 * Y`; the grid minimum exceeds `F(W)` by at most
    /// `lipschitz * resolution`.
    pub lipschitz: f64,
    pub points: u128,
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// All compositions of `total` into `parts` nonnegative integers, in
/// lexicographic order.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(left - k, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, &mut Vec::new(), &mut out);
    out
}

/// Exhaustive minimum of the symmetrization defect over strategies whose
/// rows lie on the simplex lattice of pitch `resolution`.
pub fn brute_force_f(avc: &Avc, resolution: f64) -> Result<BruteForce, SymError> {
    if !(resolution > 0.0 && resolution <= 1.0) {
        return Err(SymError::InvalidResolution(resolution));
    }
    let layout = Layout::new(avc)?;
    let (xs, ss, ys) = (layout.x, layout.s, layout.y);
    let steps = (1.0 / resolution).round() as usize;
    let per_row = binomial((steps + ss - 1) as u128, (ss - 1) as u128);
    let points = per_row.checked_pow(xs as u32).unwrap_or(u128::MAX);
    if points > BRUTE_FORCE_LIMIT {
        return Err(SymError::GridTooLarge {
            points,
            limit: BRUTE_FORCE_LIMIT,
        });
    }

    let rows: Vec<Vec<f64>> = compositions(steps, ss)
        .into_iter()
        .map(|c| c.into_iter().map(|k| k as f64 / steps as f64).collect())
        .collect();
    let nrows = rows.len();
    // mix[(x * Y + y) * nrows + r] = sum_s W(y|x,s) rows[r][s]
    let mut mix = vec![0.0; xs * ys * nrows];
    for x in 0..xs {
        for y in 0..ys {
            for (r, row) in rows.iter().enumerate() {
                mix[(x * ys + y) * nrows + r] = (0..ss).map(|s| avc.prob(x, s, y) * row[s]).sum();
            }
        }
    }
    let at = |x: usize, y: usize, r: usize| mix[(x * ys + y) * nrows + r];

    let eval = |choice: &[usize], cutoff: f64| -> f64 {
        let mut worst: f64 = 0.0;
        for &(x, x_hat) in &layout.pairs {
            let d: f64 = (0..ys)
                .map(|y| (at(x, y, choice[x_hat]) - at(x_hat, y, choice[x])).abs())
                .sum();
            worst = worst.max(d);
            if worst >= cutoff {
                break;
            }
        }
        worst
    };

    // Partition on the first row; odometer over the remaining rows.
    let best = (0..nrows)
        .into_par_iter()
        .map(|first| {
            let mut choice = vec![0usize; xs];
            choice[0] = first;
            let mut best = (f64::INFINITY, choice.clone());
            loop {
                let v = eval(&choice, best.0);
                if v < best.0 {
                    best = (v, choice.clone());
                }
                let mut k = xs - 1;
                loop {
                    if k == 0 {
                        return best;
                    }
                    choice[k] += 1;
                    if choice[k] < nrows {
                        break;
                    }
                    choice[k] = 0;
                    k -= 1;
                }
            }
        })
        .reduce(
            || (f64::INFINITY, Vec::new()),
            |a, b| match a.0.total_cmp(&b.0) {
                std::cmp::Ordering::Greater => b,
                std::cmp::Ordering::Less => a,
                std::cmp::Ordering::Equal => {
                    if a.1 <= b.1 {
                        a
                    } else {
                        b
                    }
                }
            },
        );

    let u: Vec<f64> = best.1.iter().flat_map(|&r| rows[r].clone()).collect();
    let strategy = JammerStrategy::new(xs, ss, u)?;
    let value = symmetrization_defect(avc, &strategy)?.max_defect;
    Ok(BruteForce {
        value,
        strategy,
        lipschitz: (xs * ss * 2 * ys) as f64,
        points,
    })
}

/// Size and predicted interior-point cost of the feasibility program.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RuntimeEstimate {
    pub n: usize,
    pub m: usize,
    /// Input length in bits, `log2((X^2 Y + X S) / epsilon)`.
    pub bits: f64,
    /// `(n + m)^{3/2} * n * bits`, dimensionless.
    pub predicted_order: f64,
}

pub fn runtime_estimate(avc: &Avc, epsilon: f64) -> RuntimeEstimate {
    runtime_estimate_for_shape(avc.x_size(), avc.s_size(), avc.y_size(), epsilon)
}

pub fn runtime_estimate_for_shape(x_size: usize, s_size: usize, y_size: usize, epsilon: f64) -> RuntimeEstimate {
    let size = LpSize::for_shape(x_size, s_size, y_size);
    let n = size.variables;
    let m = size.constraints();
    let scale = (x_size * x_size * y_size + x_size * s_size) as f64;
    let bits = (scale / epsilon).log2();
    RuntimeEstimate {
        n,
        m,
        bits,
        predicted_order: ((n + m) as f64).powf(1.5) * n as f64 * bits,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::avc::fixtures::*;

    #[test]
    fn program_sizes_match_counts() {
        let avc = Avc::from_fn(4, 6, 4, |_, _, _| 0.25).unwrap();
        let lp = build_epsilon_sym_lp(&avc, 0.1).unwrap();
        assert_eq!(lp.num_vars(), 48);
        assert_eq!(lp.a_eq.len(), 4);
        assert_eq!(lp.a_ineq.len(), 48 + 6);
        let size = LpSize::for_shape(4, 6, 4);
        assert_eq!(
            size,
            LpSize {
                variables: 48,
                equalities: 4,
                bounds: 24,
                linearization: 48,
                budget: 6
            }
        );

        let lp = build_epsilon_sym_lp(&symmetric_channel(), 0.1).unwrap();
        assert_eq!(lp.num_vars(), 6);
        assert_eq!(lp.a_eq.len(), 2);
        assert_eq!(lp.a_ineq.len(), 4 + 1);
        assert_eq!(LpSize::for_shape(2, 2, 2).bounds, 4);
    }

    #[test]
    fn feasibility_program_matches_known_defects() {
        let avc = s_independent_channel();
        assert!(solve_epsilon_sym(&avc, 1.0).unwrap().is_none());
        let u = solve_epsilon_sym(&avc, 1.7).unwrap().unwrap();
        assert!(symmetrization_defect(&avc, &u).unwrap().max_defect <= 1.7 + 1e-8);
        assert!(solve_epsilon_sym(&symmetric_channel(), 0.0).unwrap().is_some());
    }

    #[test]
    fn f_value_of_fixtures() {
        assert!(f_value(&symmetric_channel()).unwrap().f_value <= 1e-8);
        assert!(f_value(&x_independent_channel()).unwrap().f_value <= 1e-8);
        let r = f_value(&s_independent_channel()).unwrap();
        assert!((r.f_value - 1.6).abs() <= 1e-6);
        assert_eq!(r.lp_stats.n, 7);
    }

    #[test]
    fn epsilon_decisions() {
        let sym = is_epsilon_symmetrizable(&symmetric_channel(), 1e-6).unwrap();
        assert_eq!(sym.is_eps_symmetrizable, Some(true));
        let s_ind = s_independent_channel();
        assert_eq!(
            is_epsilon_symmetrizable(&s_ind, 1.5).unwrap().is_eps_symmetrizable,
            Some(false)
        );
        assert_eq!(
            is_epsilon_symmetrizable(&s_ind, 1.7).unwrap().is_eps_symmetrizable,
            Some(true)
        );
        assert!(matches!(
            is_epsilon_symmetrizable(&s_ind, 0.0),
            Err(SymError::InvalidEpsilon(_))
        ));
    }

    #[test]
    fn single_sender_symbol_is_rejected() {
        let avc = Avc::new(1, 1, 1, vec![1.0]).unwrap();
        assert!(matches!(
            f_value(&avc),
            Err(SymError::Avc(AvcError::AlphabetTooSmall(1)))
        ));
        assert!(build_epsilon_sym_lp(&avc, 0.1).is_err());
    }

    #[test]
    fn brute_force_on_fixtures() {
        let b = brute_force_f(&symmetric_channel(), 0.05).unwrap();
        assert!(b.value <= 1e-12);
        assert_eq!(b.points, 21 * 21);
        assert_eq!(b.lipschitz, 16.0);
        for res in [0.5, 0.1, 0.03] {
            let b = brute_force_f(&s_independent_channel(), res).unwrap();
            assert!((b.value - 1.6).abs() < 1e-12);
        }
    }

    #[test]
    fn brute_force_grid_limit() {
        let avc = Avc::from_fn(3, 4, 2, |_, _, _| 0.5).unwrap();
        assert!(matches!(brute_force_f(&avc, 0.01), Err(SymError::GridTooLarge { .. })));
        assert!(matches!(
            brute_force_f(&symmetric_channel(), 0.0),
            Err(SymError::InvalidResolution(_))
        ));
    }

    #[test]
    fn compositions_enumerate_simplex_lattice() {
        let c = compositions(4, 3);
        assert_eq!(c.len() as u128, binomial(6, 2));
        assert!(c.iter().all(|v| v.iter().sum::<usize>() == 4));
        assert_eq!(c[0], vec![0, 0, 4]);
    }

    #[test]
    fn runtime_estimate_counts() {
        let e = runtime_estimate_for_shape(4, 6, 4, 2f64.powi(-10));
        assert_eq!(e.n, 48);
        assert_eq!(e.m, 4 + 24 + 48 + 6);
        let bits = (88.0f64 / 2f64.powi(-10)).log2();
        assert!((e.bits - bits).abs() < 1e-12);
        assert!((e.predicted_order - 130f64.powf(1.5) * 48.0 * bits).abs() < 1e-6);
        assert_eq!(runtime_estimate_for_shape(2, 2, 2, 0.1).n, 6);
        assert_eq!(runtime_estimate_for_shape(4, 14, 4, 0.1).n, 80);
    }

    #[test]
    fn json_shape() {
        let r = is_epsilon_symmetrizable(&s_independent_channel(), 1.5).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["symmetrizable"], false);
        assert_eq!(v["epsilon"], 1.5);
        assert_eq!(v["lp"]["n"], 7);
        assert_eq!(v["u"].as_array().unwrap().len(), 2);
        let r = f_value(&s_independent_channel()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert!(v["epsilon"].is_null() && v["symmetrizable"].is_null());
    }
}

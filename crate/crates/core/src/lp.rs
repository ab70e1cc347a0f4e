//! Dense two-phase primal simplex.
//!
//! Problems are stated as
//!
//! ```text
//! minimize    c^T v
//! subject to  A_eq v  = b_eq
//!             A_ineq v <= b_ineq
//!             v >= lower_bounds
//! ```
//!
//! The solver shifts the bounds to zero, adds one slack per inequality and
//! one artificial per row that cannot start with a slack in the basis. Phase 1
//! minimizes the artificial sum, phase 2 the real objective. Pricing is
//! Dantzig's rule; after a run of degenerate pivots it switches to Bland's
//! rule until the objective moves again. Every optimal point is re-checked
//! against the original constraints before it is returned.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("malformed program: {0}")]
    Malformed(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("numerical breakdown after {iterations} pivots: {reason}")]
    NumericalBreakdown { iterations: usize, reason: String },
    #[error("iteration limit {limit} reached")]
    IterationLimit { limit: usize },
}

/// A linear program in inequality/equality form.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub a_eq: Vec<Vec<f64>>,
    pub b_eq: Vec<f64>,
    pub a_ineq: Vec<Vec<f64>>,
    pub b_ineq: Vec<f64>,
    pub lower_bounds: Vec<f64>,
    pub variable_names: Option<Vec<String>>,
}

impl LinearProgram {
    /// Empty program over `n` variables with zero objective and `v >= 0`.
    pub fn new(n: usize) -> Self {
        Self {
            objective: vec![0.0; n],
            a_eq: Vec::new(),
            b_eq: Vec::new(),
            a_ineq: Vec::new(),
            b_ineq: Vec::new(),
            lower_bounds: vec![0.0; n],
            variable_names: None,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Equality plus inequality rows; bounds are not counted.
    pub fn num_rows(&self) -> usize {
        self.a_eq.len() + self.a_ineq.len()
    }

    pub fn add_eq(&mut self, row: Vec<f64>, rhs: f64) {
        self.a_eq.push(row);
        self.b_eq.push(rhs);
    }

    pub fn add_le(&mut self, row: Vec<f64>, rhs: f64) {
        self.a_ineq.push(row);
        self.b_ineq.push(rhs);
    }

    /// `a^T v >= rhs`, stored as `-a^T v <= -rhs`.
    pub fn add_ge(&mut self, row: Vec<f64>, rhs: f64) {
        self.add_le(row.into_iter().map(|a| -a).collect(), -rhs);
    }

    /// Checks the shape invariants.
    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.lower_bounds.len() != n {
            return Err(LpError::Malformed(format!(
                "{} lower bounds for {n} variables",
                self.lower_bounds.len()
            )));
        }
        if self.a_eq.len() != self.b_eq.len() || self.a_ineq.len() != self.b_ineq.len() {
            return Err(LpError::Malformed("row count differs from rhs length".into()));
        }
        if let Some(names) = &self.variable_names {
            if names.len() != n {
                return Err(LpError::Malformed("variable name count".into()));
            }
        }
        for (kind, rows) in [("equality", &self.a_eq), ("inequality", &self.a_ineq)] {
            if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
                return Err(LpError::Malformed(format!(
                    "{kind} row {i} has {} columns, expected {n}",
                    row.len()
                )));
            }
        }
        let finite = self.objective.iter().all(|v| v.is_finite())
            && self.lower_bounds.iter().all(|v| v.is_finite())
            && self.b_eq.iter().chain(&self.b_ineq).all(|v| v.is_finite())
            && self.a_eq.iter().chain(&self.a_ineq).flatten().all(|v| v.is_finite());
        if !finite {
            return Err(LpError::Malformed("non-finite coefficient".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub value: Option<f64>,
    pub point: Option<Vec<f64>>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Phase-1 optimum above this certifies infeasibility; also the
    /// tolerance for the final feasibility check.
    pub feasibility_tol: f64,
    /// Smallest admissible pivot magnitude.
    pub pivot_tol: f64,
    /// Pivots below this are used only when no better-conditioned
    /// entering column exists.
    pub stable_pivot_tol: f64,
    /// Reduced costs above `-optimality_tol` count as nonnegative.
    pub optimality_tol: f64,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub bland_after: usize,
    /// Defaults to `50 * (rows + cols)` of the tableau.
    pub max_iterations: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            feasibility_tol: 1e-8,
            pivot_tol: 1e-12,
            stable_pivot_tol: 1e-7,
            optimality_tol: 1e-10,
            bland_after: 1000,
            max_iterations: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConstraintKind {
    Equality,
    Inequality,
    LowerBound,
}

/// A constraint not met by a candidate point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ConstraintKind,
    pub index: usize,
    /// Amount by which the constraint is missed (always positive).
    pub residual: f64,
}

/// Lists every constraint of `lp` that `point` misses by more than `tol`.
pub fn verify_point(lp: &LinearProgram, point: &[f64], tol: f64) -> Result<Vec<Violation>, LpError> {
    if point.len() != lp.num_vars() {
        return Err(LpError::DimensionMismatch {
            expected: lp.num_vars(),
            actual: point.len(),
        });
    }
    let dot = |row: &[f64]| row.iter().zip(point).map(|(a, v)| a * v).sum::<f64>();
    let mut out = Vec::new();
    for (i, (row, b)) in lp.a_eq.iter().zip(&lp.b_eq).enumerate() {
        let residual = (dot(row) - b).abs();
        if residual > tol {
            out.push(Violation {
                kind: ConstraintKind::Equality,
                index: i,
                residual,
            });
        }
    }
    for (i, (row, b)) in lp.a_ineq.iter().zip(&lp.b_ineq).enumerate() {
        let residual = dot(row) - b;
        if residual > tol {
            out.push(Violation {
                kind: ConstraintKind::Inequality,
                index: i,
                residual,
            });
        }
    }
    for (i, (v, lb)) in point.iter().zip(&lp.lower_bounds).enumerate() {
        let residual = lb - v;
        if residual > tol {
            out.push(Violation {
                kind: ConstraintKind::LowerBound,
                index: i,
                residual,
            });
        }
    }
    Ok(out)
}

/// Solves `lp` with default options. A numerical breakdown is retried with
/// progressively stricter pivot selection before it is reported.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    let default = SolverOptions::default();
    let mut result = solve_lp_with(lp, &default);
    for stable in [1e-3, 1e-2] {
        match &result {
            Err(LpError::NumericalBreakdown { .. }) => {
                let opts = SolverOptions {
                    stable_pivot_tol: stable,
                    ..default
                };
                result = solve_lp_with(lp, &opts);
            }
            _ => break,
        }
    }
    result
}

pub fn solve_lp_with(lp: &LinearProgram, opts: &SolverOptions) -> Result<LpOutcome, LpError> {
    lp.validate()?;
    let mut tab = Tableau::build(lp);
    let limit = opts.max_iterations.unwrap_or(50 * (tab.rows + tab.cols));
    let mut run = Run {
        opts,
        limit,
        iterations: 0,
    };

    if tab.num_artificial > 0 {
        tab.set_phase1_objective();
        match run.optimize(&mut tab)? {
            Step::Optimal => {}
            Step::Unbounded => {
                return Err(LpError::NumericalBreakdown {
                    iterations: run.iterations,
                    reason: "phase 1 reported unbounded".into(),
                })
            }
        }
        if -tab.obj[tab.cols] > opts.feasibility_tol {
            return Ok(LpOutcome {
                status: LpStatus::Infeasible,
                value: None,
                point: None,
                iterations: run.iterations,
            });
        }
        tab.evict_artificials(&mut run);
    }

    tab.set_phase2_objective(&lp.objective);
    match run.optimize(&mut tab)? {
        Step::Unbounded => Ok(LpOutcome {
            status: LpStatus::Unbounded,
            value: None,
            point: None,
            iterations: run.iterations,
        }),
        Step::Optimal => {
            let point = tab.primal_point(lp);
            let violations = verify_point(lp, &point, opts.feasibility_tol)?;
            if let Some(worst) = violations.iter().max_by(|a, b| a.residual.total_cmp(&b.residual)) {
                return Err(LpError::NumericalBreakdown {
                    iterations: run.iterations,
                    reason: format!(
                        "optimal point misses {:?} {} by {:e}",
                        worst.kind, worst.index, worst.residual
                    ),
                });
            }
            let value = lp.objective.iter().zip(&point).map(|(c, v)| c * v).sum();
            Ok(LpOutcome {
                status: LpStatus::Optimal,
                value: Some(value),
                point: Some(point),
                iterations: run.iterations,
            })
        }
    }
}

enum Step {
    Optimal,
    Unbounded,
}

struct Run<'a> {
    opts: &'a SolverOptions,
    limit: usize,
    iterations: usize,
}

/// Row-major tableau; the last column holds the right-hand side.
struct Tableau {
    rows: usize,
    cols: usize,
    width: usize,
    data: Vec<f64>,
    /// Reduced costs; `obj[cols]` is minus the current objective value.
    obj: Vec<f64>,
    basis: Vec<usize>,
    num_structural: usize,
    first_artificial: usize,
    num_artificial: usize,
    /// Sparse copy of the initial rows, used to rebuild the tableau.
    orig: Vec<Vec<(usize, f64)>>,
    orig_alive: Vec<bool>,
    /// Original row of each artificial column.
    art_row: Vec<usize>,
    /// Phase 2 costs; empty during phase 1.
    costs: Vec<f64>,
}

const ZERO_CUTOFF: f64 = 1e-14;
const SINGULAR_PIVOT: f64 = 1e-13;
/// Primal infeasibility the Harris ratio test may trade for a larger pivot.
const HARRIS_SLACK: f64 = 1e-9;

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        let m_eq = lp.a_eq.len();
        let m_in = lp.a_ineq.len();
        let rows = m_eq + m_in;

        let shifted =
            |row: &[f64], b: f64| -> f64 { b - row.iter().zip(&lp.lower_bounds).map(|(a, l)| a * l).sum::<f64>() };
        let eq_rhs: Vec<f64> = lp.a_eq.iter().zip(&lp.b_eq).map(|(r, &b)| shifted(r, b)).collect();
        let in_rhs: Vec<f64> = lp.a_ineq.iter().zip(&lp.b_ineq).map(|(r, &b)| shifted(r, b)).collect();

        let num_artificial = m_eq + in_rhs.iter().filter(|&&b| b < 0.0).count();
        let first_artificial = n + m_in;
        let cols = first_artificial + num_artificial;
        let width = cols + 1;
        let mut data = vec![0.0; rows * width];
        let mut basis = vec![0; rows];
        let mut next_art = first_artificial;

        for (i, (row, &rhs)) in lp.a_eq.iter().zip(&eq_rhs).enumerate() {
            let sign = if rhs < 0.0 { -1.0 } else { 1.0 };
            let t = &mut data[i * width..(i + 1) * width];
            for (dst, a) in t.iter_mut().zip(row) {
                *dst = sign * a;
            }
            t[next_art] = 1.0;
            t[cols] = sign * rhs;
            basis[i] = next_art;
            next_art += 1;
        }
        for (k, (row, &rhs)) in lp.a_ineq.iter().zip(&in_rhs).enumerate() {
            let i = m_eq + k;
            let sign = if rhs < 0.0 { -1.0 } else { 1.0 };
            let t = &mut data[i * width..(i + 1) * width];
            for (dst, a) in t.iter_mut().zip(row) {
                *dst = sign * a;
            }
            t[n + k] = sign;
            t[cols] = sign * rhs;
            if rhs < 0.0 {
                t[next_art] = 1.0;
                basis[i] = next_art;
                next_art += 1;
            } else {
                basis[i] = n + k;
            }
        }

        let orig = data
            .chunks(width)
            .map(|row| row.iter().copied().enumerate().filter(|&(_, a)| a != 0.0).collect())
            .collect();
        let mut art_row = vec![0; num_artificial];
        for (i, &b) in basis.iter().enumerate() {
            if b >= first_artificial {
                art_row[b - first_artificial] = i;
            }
        }
        Self {
            orig_alive: vec![true; rows],
            art_row,
            orig,
            costs: Vec::new(),
            rows,
            cols,
            width,
            data,
            obj: vec![0.0; width],
            basis,
            num_structural: n,
            first_artificial,
            num_artificial,
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.first_artificial
    }

    fn set_phase1_objective(&mut self) {
        self.obj.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.rows {
            if self.is_artificial(self.basis[i]) {
                let row = &self.data[i * self.width..(i + 1) * self.width];
                for (o, a) in self.obj.iter_mut().zip(row) {
                    *o -= a;
                }
            }
        }
        for j in self.first_artificial..self.cols {
            self.obj[j] = 0.0;
        }
    }

    fn set_phase2_objective(&mut self, c: &[f64]) {
        self.costs = c.to_vec();
        self.refresh_objective();
    }

    fn refresh_objective(&mut self) {
        if self.costs.is_empty() {
            self.set_phase1_objective();
            return;
        }
        let c = &self.costs;
        self.obj.iter_mut().for_each(|v| *v = 0.0);
        self.obj[..self.num_structural].copy_from_slice(c);
        for i in 0..self.rows {
            let b = self.basis[i];
            let cb = if b < self.num_structural { c[b] } else { 0.0 };
            if cb != 0.0 {
                let row = &self.data[i * self.width..(i + 1) * self.width];
                for (o, a) in self.obj.iter_mut().zip(row) {
                    *o -= cb * a;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let inv = 1.0 / self.data[r * w + c];
        let mut pivot_row: Vec<f64> = self.data[r * w..(r + 1) * w].iter().map(|a| a * inv).collect();
        pivot_row[c] = 1.0;
        let nz: Vec<usize> = (0..w).filter(|&j| pivot_row[j] != 0.0).collect();

        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let row = &mut self.data[i * w..(i + 1) * w];
            let f = row[c];
            if f == 0.0 {
                continue;
            }
            for &j in &nz {
                let v = row[j] - f * pivot_row[j];
                row[j] = if v.abs() < ZERO_CUTOFF { 0.0 } else { v };
            }
            row[c] = 0.0;
        }
        let f = self.obj[c];
        if f != 0.0 {
            for &j in &nz {
                self.obj[j] -= f * pivot_row[j];
            }
            self.obj[c] = 0.0;
        }
        self.data[r * w..(r + 1) * w].copy_from_slice(&pivot_row);
        self.basis[r] = c;
    }

    /// Pivots basic artificials out after phase 1; rows that cannot be
    /// pivoted are linearly dependent and are dropped.
    fn evict_artificials(&mut self, run: &mut Run<'_>) {
        let mut i = 0;
        while i < self.rows {
            if !self.is_artificial(self.basis[i]) {
                i += 1;
                continue;
            }
            let candidate = (0..self.first_artificial)
                .filter(|&j| self.at(i, j).abs() > 1e-9)
                .max_by(|&a, &b| self.at(i, a).abs().total_cmp(&self.at(i, b).abs()));
            match candidate {
                Some(j) => {
                    self.pivot(i, j);
                    run.iterations += 1;
                    i += 1;
                }
                None => {
                    let w = self.width;
                    self.data.drain(i * w..(i + 1) * w);
                    // The basic artificial's own row carries the dependency.
                    self.orig_alive[self.art_row[self.basis[i] - self.first_artificial]] = false;
                    self.basis.remove(i);
                    self.rows -= 1;
                }
            }
        }
    }

    /// Recomputes the tableau as `B^-1 A` for the current basis, discarding
    /// accumulated rounding. Returns false if the basis is numerically singular.
    fn reinvert(&mut self) -> bool {
        let m = self.rows;
        let w = self.width;
        // Dense B followed by the identity, reduced by Gauss-Jordan.
        let mut col_of = vec![usize::MAX; w];
        for (k, &b) in self.basis.iter().enumerate() {
            col_of[b] = k;
        }
        let mw = 2 * m;
        let mut aug = vec![0.0; m * mw];
        let alive: Vec<&Vec<(usize, f64)>> = self
            .orig
            .iter()
            .zip(&self.orig_alive)
            .filter_map(|(r, &a)| a.then_some(r))
            .collect();
        for (i, row) in alive.iter().enumerate() {
            for &(j, a) in row.iter() {
                if col_of[j] != usize::MAX {
                    aug[i * mw + col_of[j]] = a;
                }
            }
            aug[i * mw + m + i] = 1.0;
        }
        for k in 0..m {
            let p = (k..m)
                .max_by(|&a, &b| aug[a * mw + k].abs().total_cmp(&aug[b * mw + k].abs()))
                .unwrap();
            let piv = aug[p * mw + k];
            if piv.abs() < SINGULAR_PIVOT {
                return false;
            }
            if p != k {
                for j in 0..mw {
                    aug.swap(p * mw + j, k * mw + j);
                }
            }
            let inv = 1.0 / piv;
            for j in 0..mw {
                aug[k * mw + j] *= inv;
            }
            for i in 0..m {
                if i == k {
                    continue;
                }
                let f = aug[i * mw + k];
                if f == 0.0 {
                    continue;
                }
                for j in 0..mw {
                    aug[i * mw + j] -= f * aug[k * mw + j];
                }
            }
        }
        // Row k of B^-1 now sits in aug[k][m..2m]; basis[k] owns tableau row k.
        self.data.iter_mut().for_each(|v| *v = 0.0);
        for (i, row) in alive.iter().enumerate() {
            for &(j, a) in row.iter() {
                for k in 0..m {
                    let binv = aug[k * mw + m + i];
                    if binv != 0.0 {
                        self.data[k * w + j] += binv * a;
                    }
                }
            }
        }
        for v in self.data.iter_mut() {
            if v.abs() < ZERO_CUTOFF {
                *v = 0.0;
            }
        }
        for (k, &b) in self.basis.iter().enumerate() {
            let row = &mut self.data[k * w..(k + 1) * w];
            row[b] = 1.0;
            for (&other, _) in self.basis.iter().zip(0..).filter(|&(_, i)| i != k) {
                row[other] = 0.0;
            }
        }
        self.refresh_objective();
        true
    }

    fn primal_point(&self, lp: &LinearProgram) -> Vec<f64> {
        let mut shifted = vec![0.0; self.num_structural];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.num_structural {
                shifted[b] = self.at(i, self.cols).max(0.0);
            }
        }
        shifted.iter().zip(&lp.lower_bounds).map(|(v, l)| v + l).collect()
    }
}

impl Run<'_> {
    /// Harris two-pass ratio test on column `c`. Returns the leaving row,
    /// its pivot element and the step length, or `Err(max_entry)` when no
    /// entry clears the pivot tolerance.
    fn ratio_test(&self, tab: &Tableau, c: usize, bland: bool) -> Result<(usize, f64, f64), f64> {
        let opts = self.opts;
        let rhs_col = tab.cols;
        let mut bound = f64::INFINITY;
        let mut max_entry: f64 = 0.0;
        let slack = if bland { 0.0 } else { HARRIS_SLACK };
        for i in 0..tab.rows {
            let a = tab.at(i, c);
            max_entry = max_entry.max(a);
            if a > opts.pivot_tol {
                bound = bound.min((tab.at(i, rhs_col).max(0.0) + slack) / a);
            }
        }
        if bound.is_infinite() {
            return Err(max_entry);
        }
        let bound = bound + 1e-12 * (1.0 + bound);
        let mut leave: Option<(usize, f64, f64)> = None;
        for i in 0..tab.rows {
            let a = tab.at(i, c);
            if a <= opts.pivot_tol {
                continue;
            }
            let ratio = tab.at(i, rhs_col).max(0.0) / a;
            if ratio > bound {
                continue;
            }
            let better = match leave {
                None => true,
                Some((k, ak, rk)) => {
                    if bland {
                        ratio < rk || (ratio == rk && tab.basis[i] < tab.basis[k])
                    } else {
                        a > ak
                    }
                }
            };
            if better {
                leave = Some((i, a, ratio));
            }
        }
        Ok(leave.expect("some row attains the bound"))
    }

    fn reinvert(&self, tab: &mut Tableau) -> Result<(), LpError> {
        if tab.reinvert() {
            Ok(())
        } else {
            Err(LpError::NumericalBreakdown {
                iterations: self.iterations,
                reason: "basis became singular".into(),
            })
        }
    }

    fn optimize(&mut self, tab: &mut Tableau) -> Result<Step, LpError> {
        let opts = self.opts;
        let mut degenerate_run = 0usize;
        let mut bland = false;
        let eligible_cols = tab.first_artificial;
        let mut candidates: Vec<usize> = Vec::new();
        let reinvert_every = 2 * tab.rows + 100;
        let mut since_reinvert = 0usize;

        loop {
            candidates.clear();
            candidates.extend((0..eligible_cols).filter(|&j| tab.obj[j] < -opts.optimality_tol));
            if candidates.is_empty() {
                if since_reinvert == 0 {
                    return Ok(Step::Optimal);
                }
                self.reinvert(tab)?;
                since_reinvert = 0;
                continue;
            }
            if since_reinvert >= reinvert_every {
                self.reinvert(tab)?;
                since_reinvert = 0;
                continue;
            }
            if !bland {
                candidates.sort_by(|&a, &b| tab.obj[a].total_cmp(&tab.obj[b]).then(a.cmp(&b)));
            }

            // Take the best-priced column whose pivot is stable; otherwise the
            // column offering the largest pivot.
            let mut chosen: Option<(usize, usize, f64, f64)> = None;
            let mut tiny = 0.0f64;
            for &c in &candidates {
                match self.ratio_test(tab, c, bland) {
                    Err(max_entry) if max_entry <= 0.0 => return Ok(Step::Unbounded),
                    Err(max_entry) => tiny = tiny.max(max_entry),
                    Ok((r, a, theta)) => {
                        if chosen.is_none_or(|(_, _, best, _)| a > best) {
                            chosen = Some((c, r, a, theta));
                        }
                        if a >= opts.stable_pivot_tol || bland {
                            break;
                        }
                    }
                }
            }
            let Some((c, r, a, theta)) = chosen else {
                return Err(LpError::NumericalBreakdown {
                    iterations: self.iterations,
                    reason: format!("only sub-tolerance pivots available ({tiny:e})"),
                });
            };

            if self.iterations >= self.limit {
                return Err(LpError::IterationLimit { limit: self.limit });
            }
            // Small pivots amplify rounding, so take them only on a fresh
            // tableau and refresh again afterwards.
            let small = a < opts.stable_pivot_tol;
            if small && since_reinvert > 0 {
                self.reinvert(tab)?;
                since_reinvert = 0;
                continue;
            }
            tab.pivot(r, c);
            self.iterations += 1;
            since_reinvert += 1;
            if small {
                self.reinvert(tab)?;
                since_reinvert = 0;
            }

            if theta <= opts.pivot_tol {
                degenerate_run += 1;
                if degenerate_run >= opts.bland_after {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
                bland = false;
            }
        }
    }
}

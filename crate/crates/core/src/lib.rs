//! Deciding epsilon-symmetrizability of arbitrarily varying channels.
//!
//! The crate is organized bottom-up:
//!
//! - [`avc`]: channel and strategy types, the defect for a fixed strategy.
//! - [`lp`]: a dense two-phase simplex solver.
//! - [`sym`]: the symmetrizability program, `F(W)` and a brute-force oracle.
//! - [`random`]: random-channel experiments.
//! - [`bosonic`]: M-PSK over a thermal-noise beam splitter with heterodyne detection.
//! - [`discretize`]: finite jammer grids for energy-limited continuous jammers.
//! - [`cli`]: the `avcsym` command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod avc;
pub mod bosonic;
pub mod cli;
pub mod discretize;
pub mod lp;
pub mod quad;
pub mod random;
pub mod sym;

pub use avc::{symmetrization_defect, Avc, AvcError, DefectReport, JammerStrategy};
pub use lp::{solve_lp, verify_point, LinearProgram, LpError, LpOutcome, LpStatus};
pub use sym::{brute_force_f, f_value, is_epsilon_symmetrizable, SymError, SymResult};

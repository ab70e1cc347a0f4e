//! Phase-shift-keyed displaced thermal states sent through a beam splitter
//! that mixes in a jammer, read out by heterodyne detection and decoded by
//! angular wedges.
//!
//! Heterodyne detection of a displaced thermal state with displacement `a`
//! and mean photon number `N` yields a complex Gaussian outcome with density
//! `exp(-|z - a|^2 / (N + 1)) / (pi (N + 1))`. Wedge probabilities integrate
//! this density radially in closed form and angularly by adaptive quadrature.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::avc::{Avc, AvcError};
use crate::quad::{integrate, QuadError};
use crate::sym::{f_value, SymError};

pub const DEFAULT_QUAD_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum BosonicError {
    #[error("constellation needs m >= 2 and positive finite energy (got m={m}, energy={energy})")]
    BadConstellation { m: usize, energy: f64 },
    #[error("transmittivity {0} outside [0, 1]")]
    EtaOutOfRange(f64),
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Avc(#[from] AvcError),
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Displaced thermal state. `|displacement|^2` is the mean signal photon
/// number, `noise` the mean thermal photon number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalState {
    pub displacement: Complex64,
    pub noise: f64,
}

impl ThermalState {
    pub fn new(displacement: Complex64, noise: f64) -> Result<Self, BosonicError> {
        if !(noise >= 0.0) || !noise.is_finite() {
            return Err(BosonicError::InvalidParams(format!(
                "noise {noise} must be finite and >= 0"
            )));
        }
        Ok(Self { displacement, noise })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BosonicParams {
    pub m: usize,
    pub energy: f64,
    pub noise_sender: f64,
    pub noise_jammer: f64,
    pub eta: f64,
    pub quad_tol: f64,
}

impl BosonicParams {
    pub fn new(m: usize, energy: f64, noise_sender: f64, noise_jammer: f64, eta: f64) -> Self {
        Self {
            m,
            energy,
            noise_sender,
            noise_jammer,
            eta,
            quad_tol: DEFAULT_QUAD_TOL,
        }
    }

    pub fn validate(&self) -> Result<(), BosonicError> {
        if self.m < 2 || !(self.energy > 0.0) || !self.energy.is_finite() {
            return Err(BosonicError::BadConstellation {
                m: self.m,
                energy: self.energy,
            });
        }
        for (name, v) in [("noise_sender", self.noise_sender), ("noise_jammer", self.noise_jammer)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(BosonicError::InvalidParams(format!(
                    "{name} {v} must be finite and >= 0"
                )));
            }
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(BosonicError::EtaOutOfRange(self.eta));
        }
        if !(self.quad_tol > 0.0) {
            return Err(BosonicError::InvalidParams(format!(
                "quad_tol {} must be > 0",
                self.quad_tol
            )));
        }
        Ok(())
    }

    /// Sender state for message `x`.
    pub fn sender_state(&self, constellation: &[Complex64], x: usize) -> ThermalState {
        ThermalState {
            displacement: constellation[x],
            noise: self.noise_sender,
        }
    }

    /// Jammer state with input `beta`.
    pub fn jammer_state(&self, beta: Complex64) -> ThermalState {
        ThermalState {
            displacement: beta,
            noise: self.noise_jammer,
        }
    }
}

/// Half-open angular sector `[theta_minus, theta_plus)` decoding message
/// `m_index`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeRegion {
    pub m_index: usize,
    pub theta_minus: f64,
    pub theta_plus: f64,
}

impl WedgeRegion {
    /// Wedge of message `index` out of `m`, centered on its constellation point.
    pub fn new(index: usize, m: usize) -> Self {
        let step = 2.0 * PI / m as f64;
        Self {
            m_index: index,
            theta_minus: step * (index as f64 - 0.5),
            theta_plus: step * (index as f64 + 0.5),
        }
    }

    /// Index of the wedge containing `z` among `m` wedges.
    pub fn locate(z: Complex64, m: usize) -> usize {
        let step = 2.0 * PI / m as f64;
        let shifted = (z.arg() + 0.5 * step).rem_euclid(2.0 * PI);
        ((shifted / step).floor() as usize).min(m - 1)
    }
}

/// `m` points of energy `energy` equally spaced on a circle, starting on
/// the positive real axis.
pub fn psk_constellation(m: usize, energy: f64) -> Result<Vec<Complex64>, BosonicError> {
    if m < 2 || !(energy > 0.0) || !energy.is_finite() {
        return Err(BosonicError::BadConstellation { m, energy });
    }
    let r = energy.sqrt();
    Ok((0..m)
        .map(|k| Complex64::from_polar(r, 2.0 * PI * k as f64 / m as f64))
        .collect())
}

/// Output of a beam splitter with transmittivity `eta` fed by the sender
/// and the jammer.
pub fn beamsplitter_output(
    sender: &ThermalState,
    jammer: &ThermalState,
    eta: f64,
) -> Result<ThermalState, BosonicError> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(BosonicError::EtaOutOfRange(eta));
    }
    Ok(ThermalState {
        displacement: sender.displacement * eta.sqrt() + jammer.displacement * (1.0 - eta).sqrt(),
        noise: eta * sender.noise + (1.0 - eta) * jammer.noise,
    })
}

pub fn heterodyne_density(state: &ThermalState, point: Complex64) -> f64 {
    let var = state.noise + 1.0;
    (-(point - state.displacement).norm_sqr() / var).exp() / (PI * var)
}

/// Radially integrated density along direction `theta`:
/// `int_0^inf r p(r e^{i theta}) dr`.
fn angular_density(a: f64, phi: f64, sigma: f64, theta: f64) -> f64 {
    let var = sigma * sigma;
    let b = a * (theta - phi).cos();
    let base = (-a * a / var).exp() / (2.0 * PI);
    let tail = b / (2.0 * sigma * PI.sqrt()) * ((b * b - a * a) / var).exp() * libm::erfc(-b / sigma);
    base + tail
}

/// Probability that the heterodyne outcome of `state` falls in `region`,
/// to absolute error `quad_tol`.
pub fn wedge_probability(state: &ThermalState, region: &WedgeRegion, quad_tol: f64) -> Result<f64, BosonicError> {
    if !(quad_tol > 0.0) {
        return Err(BosonicError::InvalidParams(format!("quad_tol {quad_tol} must be > 0")));
    }
    let a = state.displacement.norm();
    let phi = state.displacement.arg();
    let sigma = (state.noise + 1.0).sqrt();
    let q = integrate(
        |theta| angular_density(a, phi, sigma, theta),
        region.theta_minus,
        region.theta_plus,
        quad_tol,
    )?;
    Ok(q.value.clamp(0.0, 1.0))
}

/// Probabilities of all `m` wedges for one received state.
pub fn wedge_row(state: &ThermalState, m: usize, quad_tol: f64) -> Result<Vec<f64>, BosonicError> {
    (0..m)
        .map(|y| wedge_probability(state, &WedgeRegion::new(y, m), quad_tol))
        .collect()
}

/// Channel with `X = S = Y = m`: sender and jammer both draw from the same
/// constellation of energy `params.energy`.
pub fn build_mpsk_avc(params: &BosonicParams) -> Result<Avc, BosonicError> {
    params.validate()?;
    let m = params.m;
    let constellation = psk_constellation(m, params.energy)?;
    let rows: Vec<Vec<f64>> = (0..m * m)
        .into_par_iter()
        .map(|k| {
            let (x, s) = (k / m, k % m);
            let sender = params.sender_state(&constellation, x);
            let jammer = params.jammer_state(constellation[s]);
            let out = beamsplitter_output(&sender, &jammer, params.eta)?;
            wedge_row(&out, m, params.quad_tol)
        })
        .collect::<Result<_, _>>()?;
    let tol = (m as f64 * params.quad_tol).max(1e-9);
    Ok(Avc::with_tolerance(m, m, m, rows.concat(), tol)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaPoint {
    pub eta: f64,
    pub f_value: f64,
    pub lp_iterations: usize,
}

/// `F` of the channel at each transmittivity; `params.eta` is ignored.
pub fn eta_scan(params: &BosonicParams, eta_values: &[f64]) -> Result<Vec<EtaPoint>, BosonicError> {
    if eta_values.is_empty() {
        return Err(BosonicError::InvalidParams("no eta values".into()));
    }
    if let Some(&bad) = eta_values.iter().find(|e| !(0.0..=1.0).contains(*e)) {
        return Err(BosonicError::EtaOutOfRange(bad));
    }
    eta_values
        .iter()
        .map(|&eta| {
            let avc = build_mpsk_avc(&BosonicParams { eta, ..*params })?;
            let r = f_value(&avc)?;
            Ok(EtaPoint {
                eta,
                f_value: r.f_value,
                lp_iterations: r.lp_stats.iterations,
            })
        })
        .collect()
}

/// Writes `eta,f_value,lp_iterations`.
pub fn write_eta_csv<W: Write>(out: W, points: &[EtaPoint]) -> Result<(), BosonicError> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(p)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sym::f_value;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn scenario_params(eta: f64) -> BosonicParams {
        BosonicParams::new(6, 16.0, 1.0, 1.0, eta)
    }

    #[test]
    fn constellation_points() {
        let c = psk_constellation(4, 1.0).unwrap();
        let expect = [
            Complex64::new(1.0, 0.0),
            Complex64::i(),
            Complex64::new(-1.0, 0.0),
            -Complex64::i(),
        ];
        for (a, b) in c.iter().zip(expect) {
            assert!((a - b).norm() < 1e-15);
        }
        let c = psk_constellation(6, 16.0).unwrap();
        assert!((c[0] - Complex64::new(4.0, 0.0)).norm() < 1e-15);
        for m in 2..12 {
            let sum: Complex64 = psk_constellation(m, 3.0).unwrap().iter().sum();
            assert!(sum.norm() < 1e-12);
        }
        assert!(matches!(
            psk_constellation(1, 1.0),
            Err(BosonicError::BadConstellation { .. })
        ));
        assert!(psk_constellation(3, 0.0).is_err());
    }

    #[test]
    fn beam_splitter_limits() {
        let a = ThermalState::new(Complex64::new(4.0, 0.0), 1.0).unwrap();
        let b = ThermalState::new(Complex64::new(-4.0, 0.0), 1.0).unwrap();
        assert_eq!(beamsplitter_output(&a, &b, 1.0).unwrap(), a);
        assert_eq!(beamsplitter_output(&a, &b, 0.0).unwrap(), b);
        let mid = beamsplitter_output(&a, &b, 0.5).unwrap();
        assert!(mid.displacement.norm() < 1e-15);
        assert!((mid.noise - 1.0).abs() < 1e-15);
        assert!(matches!(
            beamsplitter_output(&a, &b, 1.5),
            Err(BosonicError::EtaOutOfRange(_))
        ));
        assert!(ThermalState::new(Complex64::new(0.0, 0.0), -1.0).is_err());
    }

    #[test]
    fn density_peak_values() {
        let alpha = Complex64::new(1.5, -0.5);
        let s = ThermalState::new(alpha, 1.0).unwrap();
        assert!((heterodyne_density(&s, alpha) - 1.0 / (2.0 * PI)).abs() < 1e-15);
        let s = ThermalState::new(alpha, 0.0).unwrap();
        assert!((heterodyne_density(&s, alpha) - 1.0 / PI).abs() < 1e-15);
        assert!(heterodyne_density(&s, Complex64::new(100.0, 0.0)) < 1e-300);
    }

    #[test]
    fn wedges_tile_the_circle() {
        for m in [2usize, 3, 6, 8] {
            let w = WedgeRegion::new(0, m);
            assert!((w.theta_plus - w.theta_minus - 2.0 * PI / m as f64).abs() < 1e-15);
            for k in 0..m {
                let z = Complex64::from_polar(2.0, 2.0 * PI * k as f64 / m as f64);
                assert_eq!(WedgeRegion::locate(z, m), k);
            }
        }
        // Boundaries belong to the upper wedge of the half-open pair.
        let edge = Complex64::from_polar(1.0, PI / 6.0);
        assert_eq!(WedgeRegion::locate(edge, 6), 1);
    }

    #[test]
    fn centered_state_splits_evenly() {
        for noise in [0.0, 1.0, 5.0] {
            let s = ThermalState::new(Complex64::new(0.0, 0.0), noise).unwrap();
            for p in wedge_row(&s, 6, 1e-12).unwrap() {
                assert!((p - 1.0 / 6.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn wedge_sums_are_one() {
        let s = ThermalState::new(Complex64::new(2.3, -3.1), 0.7).unwrap();
        for m in [2usize, 5, 6, 16] {
            let total: f64 = wedge_row(&s, m, 1e-9).unwrap().iter().sum();
            assert!((total - 1.0).abs() < m as f64 * 1e-9, "{m}: {total}");
        }
    }

    #[test]
    fn wedge_matches_monte_carlo() {
        let params = scenario_params(0.5);
        let c = psk_constellation(6, 16.0).unwrap();
        let out = beamsplitter_output(&params.sender_state(&c, 0), &params.jammer_state(c[0]), 0.5).unwrap();
        let p = wedge_probability(&out, &WedgeRegion::new(0, 6), 1e-9).unwrap();

        let n = 10_000_000usize;
        let sd = ((out.noise + 1.0) / 2.0).sqrt();
        let mut rng = crate::random::sample_rng(11, 0, 0);
        let mut hits = 0usize;
        for _ in 0..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = out.displacement + Complex64::new(sd * re, sd * im);
            if WedgeRegion::locate(z, 6) == 0 {
                hits += 1;
            }
        }
        let est = hits as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((est - p).abs() <= 3.0 * se, "quadrature {p} vs sampled {est} (se {se})");
    }

    #[test]
    fn channel_shapes_and_symmetries() {
        let avc = build_mpsk_avc(&scenario_params(0.5)).unwrap();
        assert_eq!((avc.x_size(), avc.s_size(), avc.y_size()), (6, 6, 6));
        for x in 0..6 {
            for s in 0..6 {
                for y in 0..6 {
                    assert!((avc.prob(x, s, y) - avc.prob(s, x, y)).abs() < 1e-12);
                    // Rotating every displacement by one step shifts the output.
                    let rotated = avc.prob((x + 1) % 6, (s + 1) % 6, (y + 1) % 6);
                    assert!((avc.prob(x, s, y) - rotated).abs() < 2e-9);
                }
            }
        }
        for m in 0..6 {
            let diag = avc.prob(m, m, m);
            for y in (0..6).filter(|&y| y != m) {
                assert!(diag > avc.prob(m, m, y));
            }
        }
    }

    #[test]
    fn opaque_splitter_ignores_sender() {
        let avc = build_mpsk_avc(&scenario_params(0.0)).unwrap();
        for s in 0..6 {
            for x in 1..6 {
                assert_eq!(avc.row(x, s), avc.row(0, s));
            }
        }
    }

    #[test]
    fn scan_zeros_and_transparent_end() {
        let points = eta_scan(&scenario_params(0.0), &[0.0, 0.5, 1.0]).unwrap();
        assert!(points[0].f_value <= 1e-6);
        assert!(points[1].f_value <= 1e-6);
        assert!(points[2].f_value >= 1.5, "{}", points[2].f_value);
        let direct = f_value(&build_mpsk_avc(&scenario_params(1.0)).unwrap())
            .unwrap()
            .f_value;
        assert_eq!(direct, points[2].f_value);

        let mut buf = Vec::new();
        write_eta_csv(&mut buf, &points).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("eta,f_value,lp_iterations\n"));
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn invalid_parameters() {
        assert!(eta_scan(&scenario_params(0.0), &[0.2, 1.5]).is_err());
        assert!(eta_scan(&scenario_params(0.0), &[]).is_err());
        let bad = BosonicParams {
            quad_tol: 0.0,
            ..scenario_params(0.3)
        };
        assert!(build_mpsk_avc(&bad).is_err());
        let s = ThermalState::new(Complex64::new(1.0, 0.0), 0.0).unwrap();
        assert!(wedge_probability(&s, &WedgeRegion::new(0, 4), -1.0).is_err());
    }
}

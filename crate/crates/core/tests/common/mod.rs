#![allow(dead_code)]

use avcsym::Avc;
use rand::Rng;

/// `W(y|s,x) = W(y|x,s)`.
pub fn symmetric_channel() -> Avc {
    let p0 = [[0.9, 0.4], [0.4, 0.2]];
    Avc::from_fn(2, 2, 2, |x, s, y| if y == 0 { p0[s][x] } else { 1.0 - p0[s][x] }).unwrap()
}

/// Output depends only on the jammer state.
pub fn x_independent_channel() -> Avc {
    let v0 = [0.7, 0.3];
    Avc::from_fn(2, 2, 2, |_, s, y| if y == 0 { v0[s] } else { 1.0 - v0[s] }).unwrap()
}

/// Output depends only on the sender symbol; rows 0.9/0.1 and 0.1/0.9.
pub fn s_independent_channel() -> Avc {
    let p0 = [0.9, 0.1];
    Avc::from_fn(2, 2, 2, |x, _, y| if y == 0 { p0[x] } else { 1.0 - p0[x] }).unwrap()
}

/// Channel with independent rows drawn uniformly from the simplex, via
/// sorted uniform spacings.
pub fn spacing_channel(x: usize, s: usize, y: usize, rng: &mut impl Rng) -> Avc {
    let mut w = Vec::with_capacity(x * s * y);
    for _ in 0..x * s {
        let mut cuts: Vec<f64> = (0..y - 1).map(|_| rng.random::<f64>()).collect();
        cuts.push(0.0);
        cuts.push(1.0);
        cuts.sort_by(f64::total_cmp);
        w.extend(cuts.windows(2).map(|c| c[1] - c[0]));
    }
    Avc::with_tolerance(x, s, y, w, 1e-12).unwrap()
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_avcsym")
}

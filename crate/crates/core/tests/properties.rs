mod common;

use avcsym::lp::{solve_lp, verify_point, LpStatus};
use avcsym::sym::build_epsilon_sym_lp;
use avcsym::{brute_force_f, f_value, is_epsilon_symmetrizable, symmetrization_defect, Avc, JammerStrategy};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn channel(x: usize, s: usize, y: usize, seed: u64) -> Avc {
    common::spacing_channel(x, s, y, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn shape() -> impl Strategy<Value = (usize, usize, usize, u64)> {
    (2usize..=4, 1usize..=4, 2usize..=4, any::<u64>())
}

fn permute(avc: &Avc, px: &[usize], ps: &[usize], py: &[usize]) -> Avc {
    Avc::with_tolerance(
        avc.x_size(),
        avc.s_size(),
        avc.y_size(),
        (0..avc.x_size())
            .flat_map(|x| (0..avc.s_size()).flat_map(move |s| (0..avc.y_size()).map(move |y| (x, s, y))))
            .map(|(x, s, y)| avc.prob(px[x], ps[s], py[y]))
            .collect(),
        1e-9,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn relabeling_preserves_f((x, s, y, seed) in shape(), rot in 0usize..4) {
        let avc = channel(x, s, y, seed);
        let f = f_value(&avc).unwrap().f_value;
        let px: Vec<usize> = (0..x).map(|i| (i + rot) % x).collect();
        let ps: Vec<usize> = (0..s).rev().collect();
        let py: Vec<usize> = (0..y).map(|i| (i + 1) % y).collect();
        let g = f_value(&permute(&avc, &px, &ps, &py)).unwrap().f_value;
        prop_assert!((f - g).abs() < 1e-7, "{} vs {}", f, g);
    }

    #[test]
    fn f_is_a_certified_minimum((x, s, y, seed) in shape()) {
        let avc = channel(x, s, y, seed);
        let r = f_value(&avc).unwrap();
        prop_assert!((0.0..=2.0 + 1e-9).contains(&r.f_value));
        let attained = symmetrization_defect(&avc, &r.strategy).unwrap().max_defect;
        prop_assert!((attained - r.f_value).abs() < 1e-6);
        let u = JammerStrategy::uniform(x, s).unwrap();
        prop_assert!(r.f_value <= symmetrization_defect(&avc, &u).unwrap().max_defect + 1e-8);
    }

    #[test]
    fn decision_is_monotone_in_epsilon((x, s, y, seed) in shape(), a in 1e-4f64..2.0, b in 1e-4f64..2.0) {
        let avc = channel(x, s, y, seed);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let at_lo = is_epsilon_symmetrizable(&avc, lo).unwrap().is_eps_symmetrizable.unwrap();
        let at_hi = is_epsilon_symmetrizable(&avc, hi).unwrap().is_eps_symmetrizable.unwrap();
        prop_assert!(!at_lo || at_hi);
    }

    #[test]
    fn feasibility_program_agrees_with_f((x, s, y, seed) in shape(), margin in 1e-3f64..0.1) {
        let avc = channel(x, s, y, seed);
        let f = f_value(&avc).unwrap().f_value;
        let lp = build_epsilon_sym_lp(&avc, f + margin).unwrap();
        let out = solve_lp(&lp).unwrap();
        prop_assert_eq!(out.status, LpStatus::Optimal);
        prop_assert!(verify_point(&lp, out.point.as_ref().unwrap(), 1e-8).unwrap().is_empty());
        if f > margin {
            let out = solve_lp(&build_epsilon_sym_lp(&avc, f - margin).unwrap()).unwrap();
            prop_assert_eq!(out.status, LpStatus::Infeasible);
        }
    }

    #[test]
    fn solving_is_deterministic((x, s, y, seed) in shape()) {
        let avc = channel(x, s, y, seed);
        let a = f_value(&avc).unwrap();
        let b = f_value(&avc).unwrap();
        prop_assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn json_round_trip_is_exact((x, s, y, seed) in shape()) {
        let avc = channel(x, s, y, seed);
        let back = Avc::from_json(&avc.to_json()).unwrap();
        prop_assert_eq!(back.as_slice(), avc.as_slice());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn grid_search_brackets_f(seed in any::<u64>()) {
        let avc = channel(2, 2, 2, seed);
        let f = f_value(&avc).unwrap().f_value;
        let grid = brute_force_f(&avc, 0.02).unwrap();
        prop_assert!(grid.value >= f - 1e-6);
        prop_assert!(grid.value <= f + grid.lipschitz * 0.02);
    }
}

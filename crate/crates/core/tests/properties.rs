use std::sync::OnceLock;

use isospec::base::harmonic_oscillator;
use isospec::chain::{chain_modes, chain_potential, ParamChain};
use isospec::closed_form::{
    admissible, closed_mode, closed_potential, from_polynomial, kink_parameters, viete_coefficients,
};
use isospec::grid::{cumulative_integral, derivative, make_grid, normalize, total_integral};
use isospec::sweep::{family, mode_surface};
use isospec::{BaseProblem, Execution, SampledFunction};
use proptest::prelude::*;

fn ho() -> &'static BaseProblem {
    static HO: OnceLock<BaseProblem> = OnceLock::new();
    HO.get_or_init(|| harmonic_oscillator(&make_grid(-10.0, 10.0, 2001).unwrap()).unwrap())
}

/// λ ∈ (0, 10] ∪ [-10, -1.001]
fn lambda() -> impl Strategy<Value = f64> {
    prop_oneof![0.001f64..=10.0, -10.0f64..=-1.001]
}

fn lambdas(depth: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(lambda(), depth)
}

fn sup(a: &SampledFunction, b: &SampledFunction) -> f64 {
    a.sup_distance(b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn running_integral_of_nonnegative_samples_is_monotone(
        values in prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..1.0, 0.0f64..1e6], 3..300),
        width in 0.1f64..50.0,
    ) {
        let grid = make_grid(-width / 2.0, width / 2.0, values.len()).unwrap();
        let f = SampledFunction::new(grid, values).unwrap();
        let c = cumulative_integral(&f);
        prop_assert_eq!(c.at(0), 0.0);
        for w in c.values().windows(2) {
            prop_assert!(w[1] >= w[0], "{} then {}", w[0], w[1]);
        }
        prop_assert_eq!(*c.values().last().unwrap(), total_integral(&f));
    }

    #[test]
    fn derivative_inverts_running_integral(
        amp in 0.1f64..3.0,
        width in 0.5f64..2.0,
        center in -1.0f64..1.0,
        offset in -1.0f64..1.0,
    ) {
        let grid = make_grid(-6.0, 6.0, 1201).unwrap();
        let f = grid
            .sample(|x| amp * (-((x - center) / width).powi(2)).exp() + offset)
            .unwrap();
        let back = derivative(&cumulative_integral(&f));
        prop_assert!(sup(&back, &f) < 1e-6, "{}", sup(&back, &f));
    }

    #[test]
    fn normalize_is_idempotent(
        values in prop::collection::vec(1e-3f64..10.0, 5..200),
    ) {
        let grid = make_grid(0.0, 1.0, values.len()).unwrap();
        let once = normalize(&SampledFunction::new(grid, values).unwrap()).unwrap();
        let twice = normalize(&once).unwrap();
        prop_assert!((total_integral(&once.square()) - 1.0).abs() < 1e-12);
        prop_assert!(sup(&once, &twice) < 1e-12 * once.values().iter().fold(1.0, |a: f64, b| a.max(b.abs())));
    }

    #[test]
    fn lambda_product_identity(ls in lambdas(1..=6)) {
        let c = viete_coefficients(&ls).unwrap();
        let product: f64 = ls.iter().map(|l| l * (l + 1.0)).product();
        let identity = c.c1 * (c.c1 + c.c2);
        prop_assert!(((product - identity) / identity).abs() <= 1e-12);
    }

    #[test]
    fn coefficients_are_permutation_invariant(ls in lambdas(2..=6), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut shuffled = ls.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let a = viete_coefficients(&ls).unwrap();
        let b = viete_coefficients(&shuffled).unwrap();
        prop_assert!((a.c1 - b.c1).abs() <= 1e-12 * a.c1.abs());
        prop_assert!((a.c2 - b.c2).abs() <= 1e-12 * (1.0 + a.c2.abs()));
    }

    #[test]
    fn polynomial_and_roots_give_same_coefficients(ls in lambdas(1..=5)) {
        // ∏ (t - λ_j), highest power first
        let mut poly = vec![1.0];
        for &l in &ls {
            let mut next = poly.clone();
            next.push(0.0);
            for k in 0..poly.len() {
                next[k + 1] -= l * poly[k];
            }
            poly = next;
        }
        let a = viete_coefficients(&ls).unwrap();
        let b = from_polynomial(&poly).unwrap();
        let scale = ls.iter().map(|l| 1.0 + l.abs()).product::<f64>();
        prop_assert!((a.c1 - b.c1).abs() <= 1e-12 * scale);
        prop_assert!((a.c2 - b.c2).abs() <= 1e-12 * scale);
    }

    #[test]
    fn admissible_iff_denominator_one_signed(le in -20.0f64..20.0) {
        let kink = kink_parameters(ho()).unwrap();
        prop_assume!((le - 0.0).abs() > 1e-9 && (le + 1.0).abs() > 1e-9);
        // ΔF spans [0, 1]; λ_eff + ΔF vanishes somewhere iff λ_eff ∈ [-1, 0]
        prop_assert_eq!(admissible(le, &kink), !(-1.0..=0.0).contains(&le));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closed_form_matches_iteration(ls in lambdas(1..=4)) {
        let bp = ho();
        let iterated = chain_modes(bp, &ParamChain::new(ls.clone()).unwrap()).unwrap();
        let closed = closed_mode(bp, &ls).unwrap();
        prop_assert!(sup(iterated.final_mode(), &closed) <= 1e-8);
        let vi = chain_potential(bp, &ParamChain::new(ls.clone()).unwrap()).unwrap();
        let vc = closed_potential(bp, &ls).unwrap();
        prop_assert!(sup(&vi, &vc) <= 1e-4, "{}", sup(&vi, &vc));
    }

    #[test]
    fn large_parameter_drops_out(ls in lambdas(1..=3), position in 0usize..4) {
        let bp = ho();
        let mut extended = ls.clone();
        extended.insert(position.min(ls.len()), 1e8);
        let reduced = closed_mode(bp, &ls).unwrap();
        let full = closed_mode(bp, &extended).unwrap();
        prop_assert!(sup(&reduced, &full) <= 1e-6);
        let vr = closed_potential(bp, &ls).unwrap();
        let vf = closed_potential(bp, &extended).unwrap();
        prop_assert!(sup(&vr, &vf) <= 1e-6);
    }

    #[test]
    fn modes_are_normalized(ls in lambdas(1..=4)) {
        let v = closed_mode(ho(), &ls).unwrap();
        prop_assert!((total_integral(&v.square()) - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn closed_mode_is_permutation_invariant(ls in lambdas(2..=4)) {
        let mut reversed = ls.clone();
        reversed.reverse();
        let a = closed_mode(ho(), &ls).unwrap();
        let b = closed_mode(ho(), &reversed).unwrap();
        prop_assert!(sup(&a, &b) <= 1e-12);
    }
}

#[test]
fn execution_strategy_does_not_change_results() {
    let bp = ho();
    let tuples: Vec<Vec<f64>> = (1..=16).map(|k| vec![0.3 * k as f64, 0.2, -2.0]).collect();
    let a = family(bp, &tuples, Execution::Sequential).unwrap();
    let b = family(bp, &tuples, Execution::Parallel).unwrap();
    assert_eq!(a, b);
    let grid: Vec<f64> = (1..=12).map(|k| 0.4 * k as f64).collect();
    let k = bp.grid().node_index(-1.4).unwrap();
    let sa = mode_surface(bp, &grid, &grid, k, Execution::Sequential).unwrap();
    let sb = mode_surface(bp, &grid, &grid, k, Execution::Parallel).unwrap();
    assert_eq!(sa, sb);
}

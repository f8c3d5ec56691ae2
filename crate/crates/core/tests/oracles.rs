use isospec::base::{harmonic_oscillator, numeric_ground_state, reflectionless_well};
use isospec::chain::one_param_mode;
use isospec::closed_form::{closed_mode, closed_potential};
use isospec::grid::{cumulative_integral, derivative, make_grid, second_derivative};
use isospec::spectral::{
    discretize, discretize_with, lowest_eigenvalues, zero_mode_residual, Scheme,
    TridiagonalHamiltonian,
};
use isospec::SampledFunction;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::erf::erf;
use std::f64::consts::PI;

fn dense(diagonal: &[f64], offdiagonal: &[f64]) -> DMatrix<f64> {
    let n = diagonal.len();
    let mut m = DMatrix::zeros(n, n);
    for k in 0..n {
        m[(k, k)] = diagonal[k];
    }
    for (k, &e) in offdiagonal.iter().enumerate() {
        m[(k, k + 1)] = e;
        m[(k + 1, k)] = e;
    }
    m
}

/// Eigenvalues of `A x = E M x` by Cholesky reduction and a dense symmetric
/// eigensolver.
fn dense_levels(h: &TridiagonalHamiltonian) -> Vec<f64> {
    let a = dense(&h.diagonal, &h.offdiagonal);
    let reduced = match &h.mass {
        None => a,
        Some(m) => {
            let l = dense(&m.diagonal, &m.offdiagonal)
                .cholesky()
                .expect("mass matrix is positive definite")
                .l();
            let li = l.try_inverse().unwrap();
            &li * a * li.transpose()
        }
    };
    let mut e: Vec<f64> = SymmetricEigen::new(reduced)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    e.sort_by(f64::total_cmp);
    e
}

#[test]
fn running_integral_of_gaussian_density_is_erf() {
    let grid = make_grid(-10.0, 10.0, 4001).unwrap();
    let density = grid.sample(|x| (-x * x).exp() / PI.sqrt()).unwrap();
    let c = cumulative_integral(&density);
    for k in 0..grid.len() {
        let x = grid.point(k);
        let exact = 0.5 * (1.0 + erf(x));
        assert!(
            (c.at(k) - exact).abs() < 1e-8,
            "x = {x}: {} vs {exact}",
            c.at(k)
        );
    }
}

#[test]
fn derivative_stencils_on_gaussian() {
    let grid = make_grid(-10.0, 10.0, 4001).unwrap();
    let g = grid.sample(|x| (-x * x).exp()).unwrap();
    let d = derivative(&g);
    let dd = second_derivative(&g);
    for k in 0..grid.len() {
        let x = grid.point(k);
        let e = (-x * x).exp();
        assert!((d.at(k) + 2.0 * x * e).abs() < 1e-6);
        assert!((dd.at(k) - (4.0 * x * x - 2.0) * e).abs() < 1e-6);
    }
}

#[test]
fn bisection_matches_dense_eigensolver() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..12 {
        let n = rng.gen_range(20..=200);
        let grid = make_grid(-3.0, 3.0, n).unwrap();
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let v = SampledFunction::new(grid, values).unwrap();
        let kappa = rng.gen_range(0.1..2.0);
        for scheme in [Scheme::ThreePoint, Scheme::Numerov] {
            let h = discretize_with(&v, kappa, scheme);
            let oracle = dense_levels(&h);
            let k = h.size().min(10);
            let levels = lowest_eigenvalues(&h, k).unwrap();
            for (m, (a, b)) in levels.iter().zip(&oracle).enumerate() {
                let tol = 1e-9 * (1.0 + b.abs());
                assert!(
                    (a - b).abs() < tol,
                    "trial {trial} {scheme:?} level {m}: {a} vs {b}"
                );
            }
        }
    }
}

fn oscillator_levels(n: usize, scheme: Scheme) -> Vec<f64> {
    let bp = harmonic_oscillator(&make_grid(-10.0, 10.0, n).unwrap()).unwrap();
    lowest_eigenvalues(&discretize_with(bp.potential(), 0.5, scheme), 6).unwrap()
}

#[test]
fn oscillator_levels_are_integers() {
    for scheme in [Scheme::ThreePoint, Scheme::Numerov] {
        for (m, e) in oscillator_levels(4001, scheme).iter().enumerate() {
            assert!((e - m as f64).abs() < 1e-4, "{scheme:?} level {m}: {e}");
        }
    }
}

#[test]
fn refinement_orders() {
    let error = |n, scheme| {
        oscillator_levels(n, scheme)
            .iter()
            .enumerate()
            .map(|(m, e)| (e - m as f64).abs())
            .fold(0.0, f64::max)
    };
    let ratio3 = error(501, Scheme::ThreePoint) / error(1001, Scheme::ThreePoint);
    assert!((3.5..4.5).contains(&ratio3), "three-point ratio {ratio3}");
    let ratio4 = error(251, Scheme::Numerov) / error(501, Scheme::Numerov);
    assert!(
        (13.0..19.0).contains(&ratio4),
        "fourth-order ratio {ratio4}"
    );
}

#[test]
fn reflectionless_well_has_one_bound_state() {
    let bp = reflectionless_well(&make_grid(-12.0, 12.0, 4801).unwrap()).unwrap();
    let levels = lowest_eigenvalues(&discretize(bp.potential(), 1.0), 2).unwrap();
    assert!(levels[0].abs() < 1e-5, "{}", levels[0]);
    // box states sit above the asymptote V₀ → 1
    assert!(levels[1] > 1.0, "{}", levels[1]);
}

#[test]
fn numeric_ground_state_of_sampled_oscillator() {
    // level is fourth order in h, the symmetrized pencil's vector second order
    let error = |n| {
        let grid = make_grid(-10.0, 10.0, n).unwrap();
        let bp = numeric_ground_state(&grid.sample(|x| 0.5 * x * x).unwrap(), 0.5).unwrap();
        assert!(
            (bp.energy_shift() - 0.5).abs() < 1e-9,
            "{}",
            bp.energy_shift()
        );
        let exact = harmonic_oscillator(&grid).unwrap();
        bp.ground_state()
            .sup_distance(exact.ground_state())
            .unwrap()
    };
    let (coarse, fine) = (error(2001), error(4001));
    assert!(fine < 1e-6, "{fine}");
    assert!((3.5..4.5).contains(&(coarse / fine)), "{coarse} / {fine}");
}

#[test]
fn zero_mode_residual_controls() {
    let bp = harmonic_oscillator(&make_grid(-10.0, 10.0, 4001).unwrap()).unwrap();
    for lambdas in [vec![0.2], vec![5.0], vec![-1.5], vec![0.1, 0.2]] {
        let v = closed_mode(&bp, &lambdas).unwrap();
        let deformed = closed_potential(&bp, &lambdas).unwrap();
        let good = zero_mode_residual(&deformed, &v, 0.5).unwrap();
        assert!(good <= 1e-3, "{lambdas:?}: {good}");
        let bad = zero_mode_residual(bp.potential(), &v, 0.5).unwrap();
        assert!(bad > 1e-2, "{lambdas:?}: {bad}");
    }
    let u0 = one_param_mode(&bp, 1e12, true).unwrap();
    assert!(zero_mode_residual(bp.potential(), &u0, 0.5).unwrap() <= 1e-3);
}

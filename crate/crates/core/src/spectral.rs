//! Finite-difference Hamiltonians `-κ d²/dx² + V` with Dirichlet walls at
//! the grid ends, Sturm-sequence bisection for their lowest levels, and the
//! numerical certificate of strict isospectrality.
//!
//! Two discretizations are available. [`Scheme::ThreePoint`] is the textbook
//! symmetric tridiagonal matrix. [`Scheme::Numerov`] is the symmetric
//! Numerov pencil `A ψ = E M ψ` with
//!
//! ```text
//! A = -κ L + (B V + V B) / 2,   M = B = tridiag(1, 10, 1) / 12
//! ```
//!
//! which is fourth-order accurate and still tridiagonal, so the same
//! inertia count applies to `A - σ M`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::base::BaseProblem;
use crate::closed_form::{closed_mode, closed_potential, viete_coefficients};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::{second_derivative, Grid, SampledFunction};

/// Absolute bisection tolerance for eigenvalues.
pub const EIGEN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    ThreePoint,
    Numerov,
}

/// Symmetric tridiagonal "mass" matrix of a generalized problem.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMass {
    pub diagonal: Vec<f64>,
    pub offdiagonal: Vec<f64>,
}

/// Discretized Hamiltonian on the interior points of a grid. For the
/// three-point scheme `mass` is `None` (identity).
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalHamiltonian {
    pub diagonal: Vec<f64>,
    pub offdiagonal: Vec<f64>,
    pub mass: Option<TridiagonalMass>,
    pub grid: Arc<Grid>,
    pub kappa: f64,
    pub scheme: Scheme,
}

/// Three-point Laplacian with Dirichlet walls at the grid ends.
pub fn discretize(potential: &SampledFunction, kappa: f64) -> TridiagonalHamiltonian {
    discretize_with(potential, kappa, Scheme::ThreePoint)
}

pub fn discretize_with(
    potential: &SampledFunction,
    kappa: f64,
    scheme: Scheme,
) -> TridiagonalHamiltonian {
    let grid = potential.grid().clone();
    let h2 = grid.spacing().powi(2);
    let v = &potential.values()[1..potential.len() - 1];
    let m = v.len();
    match scheme {
        Scheme::ThreePoint => TridiagonalHamiltonian {
            diagonal: v.iter().map(|&vk| 2.0 * kappa / h2 + vk).collect(),
            offdiagonal: vec![-kappa / h2; m.saturating_sub(1)],
            mass: None,
            grid,
            kappa,
            scheme,
        },
        Scheme::Numerov => TridiagonalHamiltonian {
            diagonal: v
                .iter()
                .map(|&vk| 2.0 * kappa / h2 + 10.0 / 12.0 * vk)
                .collect(),
            offdiagonal: v
                .windows(2)
                .map(|w| -kappa / h2 + (w[0] + w[1]) / 24.0)
                .collect(),
            mass: Some(TridiagonalMass {
                diagonal: vec![10.0 / 12.0; m],
                offdiagonal: vec![1.0 / 12.0; m.saturating_sub(1)],
            }),
            grid,
            kappa,
            scheme,
        },
    }
}

impl TridiagonalHamiltonian {
    pub fn size(&self) -> usize {
        self.diagonal.len()
    }

    fn shifted(&self, sigma: f64) -> (Vec<f64>, Vec<f64>) {
        match &self.mass {
            None => (
                self.diagonal.iter().map(|d| d - sigma).collect(),
                self.offdiagonal.clone(),
            ),
            Some(m) => (
                self.diagonal
                    .iter()
                    .zip(&m.diagonal)
                    .map(|(a, b)| a - sigma * b)
                    .collect(),
                self.offdiagonal
                    .iter()
                    .zip(&m.offdiagonal)
                    .map(|(a, b)| a - sigma * b)
                    .collect(),
            ),
        }
    }

    /// Number of eigenvalues strictly below `sigma`: the count of negative
    /// pivots in the LDLᵀ factorization of `A - σM`.
    pub fn sturm_count(&self, sigma: f64) -> usize {
        let n = self.size();
        if n == 0 {
            return 0;
        }
        let off = |i: usize| match &self.mass {
            None => self.offdiagonal[i],
            Some(m) => self.offdiagonal[i] - sigma * m.offdiagonal[i],
        };
        let diag = |i: usize| match &self.mass {
            None => self.diagonal[i] - sigma,
            Some(m) => self.diagonal[i] - sigma * m.diagonal[i],
        };
        let pivmin = f64::MIN_POSITIVE
            * self
                .offdiagonal
                .iter()
                .fold(1.0_f64, |acc, e| acc.max(e * e));
        let mut count = 0;
        let mut q = diag(0);
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let e = off(i - 1);
            q = diag(i) - e * e / q;
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Interval `[lo, hi]` with no eigenvalue below `lo` and at least `k`
    /// eigenvalues below `hi`.
    fn bracket(&self, k: usize) -> (f64, f64) {
        let start = self
            .diagonal
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
            .min(0.0);
        let mut lo = start - 1.0;
        let mut step = 1.0;
        while self.sturm_count(lo) > 0 {
            lo -= step;
            step *= 2.0;
        }
        let mut hi = lo + 1.0;
        let mut step = 1.0;
        while self.sturm_count(hi) < k {
            hi += step;
            step *= 2.0;
        }
        (lo, hi)
    }

    fn bisect_index(&self, j: usize, mut lo: f64, mut hi: f64) -> f64 {
        while hi - lo > EIGEN_TOL {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sturm_count(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solve `(A - σM) x = rhs` by Gaussian elimination without pivoting.
    /// Only used with `σ` below the spectrum, where the matrix is positive
    /// definite.
    fn solve_shifted(&self, sigma: f64, rhs: &[f64]) -> Vec<f64> {
        let (d, e) = self.shifted(sigma);
        let n = d.len();
        let mut c = vec![0.0; n];
        let mut x = vec![0.0; n];
        let mut piv = d[0];
        x[0] = rhs[0] / piv;
        for i in 1..n {
            c[i - 1] = e[i - 1] / piv;
            piv = d[i] - e[i - 1] * c[i - 1];
            x[i] = (rhs[i] - e[i - 1] * x[i - 1]) / piv;
        }
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        x
    }

    fn apply_mass(&self, y: &[f64]) -> Vec<f64> {
        match &self.mass {
            None => y.to_vec(),
            Some(m) => (0..y.len())
                .map(|i| {
                    let mut s = m.diagonal[i] * y[i];
                    if i > 0 {
                        s += m.offdiagonal[i - 1] * y[i - 1];
                    }
                    if i + 1 < y.len() {
                        s += m.offdiagonal[i] * y[i + 1];
                    }
                    s
                })
                .collect(),
        }
    }
}

/// The `k` smallest eigenvalues in ascending order.
pub fn lowest_eigenvalues(h: &TridiagonalHamiltonian, k: usize) -> Result<Vec<f64>> {
    lowest_eigenvalues_with(h, k, Execution::default())
}

pub fn lowest_eigenvalues_with(
    h: &TridiagonalHamiltonian,
    k: usize,
    exec: Execution,
) -> Result<Vec<f64>> {
    if k == 0 || k > h.size() {
        return Err(Error::KOutOfRange { k, size: h.size() });
    }
    let (lo, hi) = h.bracket(k);
    Ok(exec.map_range(k, |j| h.bisect_index(j, lo, hi)))
}

/// Lowest eigenpair by bisection plus inverse iteration. Returns the two
/// lowest levels and the ground-state vector on the interior points, with
/// positive sum.
pub fn ground_state(h: &TridiagonalHamiltonian) -> Result<(f64, f64, Vec<f64>)> {
    let n = h.size();
    if n < 2 {
        return Err(Error::KOutOfRange { k: 2, size: n });
    }
    let (lo, hi) = h.bracket(2);
    let e0 = h.bisect_index(0, lo, hi);
    let e1 = h.bisect_index(1, lo, hi);
    // Shift strictly below E0 so that A - σM stays positive definite.
    let sigma = e0 - (EIGEN_TOL + 1e-12 * e0.abs()).max(1e-6 * (e1 - e0));
    let mut x = vec![1.0; n];
    for _ in 0..50 {
        let rhs = h.apply_mass(&x);
        let mut y = h.solve_shifted(sigma, &rhs);
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            break;
        }
        let sign = if y.iter().sum::<f64>() < 0.0 {
            -1.0
        } else {
            1.0
        };
        y.iter_mut().for_each(|v| *v *= sign / norm);
        let change = y
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        x = y;
        if change < 1e-14 {
            break;
        }
    }
    Ok((e0, e1, x))
}

/// Relative residual `‖-κ v'' + V v‖₂ / ‖v‖₂` over samples with `|v| > 1e-8`.
pub fn zero_mode_residual(
    potential: &SampledFunction,
    mode: &SampledFunction,
    kappa: f64,
) -> Result<f64> {
    potential.check_same_grid(mode)?;
    let d2 = second_derivative(mode);
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..mode.len() {
        let v = mode.at(k);
        if v.abs() > 1e-8 {
            let r = -kappa * d2.at(k) + potential.at(k) * v;
            num += r * r;
            den += v * v;
        }
    }
    if den == 0.0 {
        return Err(Error::EmptyMask);
    }
    Ok((num / den).sqrt())
}

/// Result of comparing the low-lying spectrum of a deformed potential with
/// the base one on the same grid and solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub parameters: Vec<f64>,
    pub k: usize,
    pub scheme: Scheme,
    pub base_levels: Vec<f64>,
    pub deformed_levels: Vec<f64>,
    pub max_abs_diff: f64,
    pub zero_mode_residual: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Spectral comparison of an arbitrary deformed potential against the base.
pub fn compare_spectra(
    bp: &BaseProblem,
    deformed: &SampledFunction,
    mode: &SampledFunction,
    parameters: &[f64],
    k: usize,
    tol: f64,
    scheme: Scheme,
) -> Result<SpectralReport> {
    let kappa = bp.kinetic_scale();
    let base_levels = lowest_eigenvalues(&discretize_with(bp.potential(), kappa, scheme), k)?;
    let deformed_levels = lowest_eigenvalues(&discretize_with(deformed, kappa, scheme), k)?;
    let max_abs_diff = base_levels
        .iter()
        .zip(&deformed_levels)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let zero_mode_residual = zero_mode_residual(deformed, mode, kappa)?;
    Ok(SpectralReport {
        parameters: parameters.to_vec(),
        k,
        scheme,
        base_levels,
        deformed_levels,
        max_abs_diff,
        zero_mode_residual,
        tol,
        passed: max_abs_diff <= tol,
    })
}

/// Certify that the closed-form family member for `lambdas` has the same
/// `k` lowest levels as the base potential, using the fourth-order scheme.
pub fn verify_isospectral(
    bp: &BaseProblem,
    lambdas: &[f64],
    k: usize,
    tol: f64,
) -> Result<SpectralReport> {
    viete_coefficients(lambdas).map_err(|e| Error::Inadmissible(e.to_string()))?;
    let potential = closed_potential(bp, lambdas)?;
    let mode = closed_mode(bp, lambdas)?;
    compare_spectra(bp, &potential, &mode, lambdas, k, tol, Scheme::Numerov)
}

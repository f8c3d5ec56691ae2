//! Data-parallel evaluation of many family members on one base problem.

use crate::base::BaseProblem;
use crate::closed_form::{
    closed_mode, closed_mode_at, closed_potential, viete_coefficients, VieteCoefficients,
};
use crate::error::Result;
use crate::exec::Execution;
use crate::grid::{total_integral, SampledFunction};

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMember {
    pub lambdas: Vec<f64>,
    pub coefficients: VieteCoefficients,
    pub potential: SampledFunction,
    pub mode: SampledFunction,
    /// `∫ v²` of the mode, for the pre-write normalization check.
    pub norm2: f64,
}

/// Closed-form potential and zero mode for every parameter tuple, in input
/// order.
pub fn family(bp: &BaseProblem, tuples: &[Vec<f64>], exec: Execution) -> Result<Vec<FamilyMember>> {
    exec.try_map(tuples, |lambdas| {
        let coefficients = viete_coefficients(lambdas)?;
        let mode = closed_mode(bp, lambdas)?;
        let potential = closed_potential(bp, lambdas)?;
        let norm2 = total_integral(&mode.square());
        Ok(FamilyMember {
            lambdas: lambdas.clone(),
            coefficients,
            potential,
            mode,
            norm2,
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub lambda1: f64,
    pub lambda2: f64,
    pub value: f64,
}

/// Two-parameter zero mode `v_{λ₁,λ₂}(x)` at the grid node `index` over the
/// mesh `lambda1 × lambda2`, `lambda1` varying slowest.
pub fn mode_surface(
    bp: &BaseProblem,
    lambda1: &[f64],
    lambda2: &[f64],
    index: usize,
    exec: Execution,
) -> Result<Vec<SurfacePoint>> {
    let running = bp.running_integral();
    let mesh: Vec<(f64, f64)> = lambda1
        .iter()
        .flat_map(|&a| lambda2.iter().map(move |&b| (a, b)))
        .collect();
    exec.try_map(&mesh, |&(a, b)| {
        let coeffs = viete_coefficients(&[a, b])?;
        Ok(SurfacePoint {
            lambda1: a,
            lambda2: b,
            value: closed_mode_at(bp, &running, &coeffs, index)?,
        })
    })
}

//! Step-by-step Darboux chain.
//!
//! Each step takes a normalized zero mode `v` and a parameter `λ ∉ [-1, 0]`
//! and produces
//!
//! ```text
//! v_new = √(λ(λ+1)) · v / (λ + ∫_c^x v²)
//! ```
//!
//! which is again normalized. The potential after `i` steps is
//! `V₀ - 2κ D² Σ_j ln(λ_j + ∫ v_{j-1}²)`.
//!
//! Denominators are carried in the scaled form `1 + I/λ`, so very large
//! parameters do not lose precision and the constant `ln|λ|` never enters
//! a second difference.

use crate::base::{log_derivative, superpotential, BaseProblem, Boundary};
use crate::error::{Error, Result};
use crate::grid::{
    cumulative_integral, derivative, second_derivative, total_integral, MaskedFunction,
    SampledFunction,
};

/// Tolerance on `∫v² = 1` for inputs to a chain step.
pub const NORMALIZATION_TOL: f64 = 1e-6;

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || (-1.0..=0.0).contains(&lambda) {
        Err(Error::ForbiddenParameter { lambda })
    } else {
        Ok(())
    }
}

pub(crate) fn check_lambda_for(bp: &BaseProblem, lambda: f64) -> Result<()> {
    check_lambda(lambda)?;
    if bp.boundary() == Boundary::HalfLine && lambda <= 0.0 {
        return Err(Error::HalfLineParameter { lambda });
    }
    Ok(())
}

/// Ordered deformation parameters `λ₁ … λᵢ`, each outside `[-1, 0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamChain {
    lambdas: Vec<f64>,
}

impl ParamChain {
    pub fn new(lambdas: impl Into<Vec<f64>>) -> Result<Self> {
        let lambdas = lambdas.into();
        if lambdas.is_empty() {
            return Err(Error::EmptyParameters);
        }
        for &l in &lambdas {
            check_lambda(l)?;
        }
        Ok(Self { lambdas })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn depth(&self) -> usize {
        self.lambdas.len()
    }

    /// Extra restrictions of the base problem (positivity on a half line).
    pub fn check_for(&self, bp: &BaseProblem) -> Result<()> {
        for &l in &self.lambdas {
            check_lambda_for(bp, l)?;
        }
        Ok(())
    }
}

/// All intermediate results of a chain: entry `j` belongs to depth `j + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainResult {
    pub modes: Vec<SampledFunction>,
    pub potentials: Vec<SampledFunction>,
    /// `∫_c^x v_{j}²` of the mode consumed by step `j + 1` (`ΔF` first).
    pub running_integrals: Vec<SampledFunction>,
}

impl ChainResult {
    pub fn final_mode(&self) -> &SampledFunction {
        self.modes.last().expect("chains are nonempty")
    }

    pub fn final_potential(&self) -> &SampledFunction {
        self.potentials.last().expect("chains are nonempty")
    }
}

struct Step {
    mode: SampledFunction,
    running: SampledFunction,
    log_denominator: SampledFunction,
}

/// Scaled denominator `1 + I/λ`, required to be strictly positive.
fn scaled_denominator(running: &SampledFunction, lambda: f64) -> Result<Vec<f64>> {
    running
        .values()
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let d = 1.0 + i / lambda;
            if d > 0.0 {
                Ok(d)
            } else {
                Err(Error::DenominatorVanishes { index: k })
            }
        })
        .collect()
}

/// `sign(λ) √(1 + 1/λ)`, equal to `√(λ(λ+1)) / λ`.
fn scaled_norm(lambda: f64) -> f64 {
    lambda.signum() * (1.0 + 1.0 / lambda).sqrt()
}

fn step(prev: &SampledFunction, lambda: f64) -> Result<Step> {
    check_lambda(lambda)?;
    let running = cumulative_integral(&prev.square());
    let d = scaled_denominator(&running, lambda)?;
    let c = scaled_norm(lambda);
    let grid = prev.grid().clone();
    let mode = SampledFunction::new(
        grid.clone(),
        prev.values()
            .iter()
            .zip(&d)
            .map(|(v, d)| c * v / d)
            .collect(),
    )?;
    let log_denominator = SampledFunction::new(
        grid,
        running
            .values()
            .iter()
            .map(|i| (i / lambda).ln_1p())
            .collect(),
    )?;
    Ok(Step {
        mode,
        running,
        log_denominator,
    })
}

/// One-parameter mode. Normalized: `v_λ = √(λ(λ+1)) u₀/(λ + ΔF)`;
/// otherwise `u_λ = u₀/(λ + ΔF)`.
pub fn one_param_mode(bp: &BaseProblem, lambda: f64, normalized: bool) -> Result<SampledFunction> {
    check_lambda_for(bp, lambda)?;
    let u0 = bp.ground_state();
    if normalized {
        return step(u0, lambda).map(|s| s.mode);
    }
    let d = scaled_denominator(&bp.running_integral(), lambda)?;
    SampledFunction::new(
        u0.grid().clone(),
        u0.values()
            .iter()
            .zip(&d)
            .map(|(u, d)| u / (lambda * d))
            .collect(),
    )
}

/// One-parameter potential from the expanded form
/// `V₀ - 4κ u₀u₀'/(λ+ΔF) + 2κ u₀⁴/(λ+ΔF)²`.
pub fn one_param_potential(bp: &BaseProblem, lambda: f64) -> Result<SampledFunction> {
    check_lambda_for(bp, lambda)?;
    let d = scaled_denominator(&bp.running_integral(), lambda)?;
    let reciprocal: Vec<f64> = d.iter().map(|d| 1.0 / (lambda * d)).collect();
    expanded_potential(bp, &reciprocal, 1.0)
}

/// Same family member through `V₀ - 2κ D² ln(λ + ΔF)`.
pub fn one_param_potential_log(bp: &BaseProblem, lambda: f64) -> Result<SampledFunction> {
    check_lambda_for(bp, lambda)?;
    let running = bp.running_integral();
    scaled_denominator(&running, lambda)?;
    let logs = running.map(|i| (i / lambda).ln_1p())?;
    deform_by_log(bp, &logs)
}

/// `V₀ - 4κ c u₀u₀' r + 2κ c² u₀⁴ r²` with `r` the reciprocal denominator.
pub(crate) fn expanded_potential(
    bp: &BaseProblem,
    reciprocal: &[f64],
    c: f64,
) -> Result<SampledFunction> {
    let kappa = bp.kinetic_scale();
    let u0 = bp.ground_state();
    let du0 = derivative(u0);
    let values = (0..u0.len())
        .map(|k| {
            let u = u0.at(k);
            let r = reciprocal[k];
            bp.potential().at(k) - 4.0 * kappa * c * u * du0.at(k) * r
                + 2.0 * kappa * c * c * u.powi(4) * r * r
        })
        .collect();
    SampledFunction::new(u0.grid().clone(), values)
}

/// `V₀ - 2κ D² g`.
pub(crate) fn deform_by_log(bp: &BaseProblem, g: &SampledFunction) -> Result<SampledFunction> {
    let kappa = bp.kinetic_scale();
    bp.potential()
        .zip_with(&second_derivative(g), |v, d2| v - 2.0 * kappa * d2)
}

/// One normalized chain step applied to an arbitrary normalized mode.
pub fn iterate_mode(prev: &SampledFunction, lambda: f64) -> Result<SampledFunction> {
    check_lambda(lambda)?;
    let norm2 = total_integral(&prev.square());
    if (norm2 - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::UnnormalizedInput { norm2 });
    }
    step(prev, lambda).map(|s| s.mode)
}

/// Fold the normalized step over the chain, starting from `u₀`.
pub fn chain_modes(bp: &BaseProblem, chain: &ParamChain) -> Result<ChainResult> {
    chain.check_for(bp)?;
    let mut prev = bp.ground_state().clone();
    let mut log_sum = SampledFunction::zeros(bp.grid().clone());
    let mut result = ChainResult {
        modes: Vec::with_capacity(chain.depth()),
        potentials: Vec::with_capacity(chain.depth()),
        running_integrals: Vec::with_capacity(chain.depth()),
    };
    for (j, &lambda) in chain.lambdas().iter().enumerate() {
        let wrap = |e: Error| Error::Step {
            depth: j + 1,
            source: Box::new(e),
        };
        if j > 0 {
            let norm2 = total_integral(&prev.square());
            if (norm2 - 1.0).abs() > NORMALIZATION_TOL {
                return Err(wrap(Error::UnnormalizedInput { norm2 }));
            }
        }
        let s = step(&prev, lambda).map_err(wrap)?;
        log_sum = log_sum.zip_with(&s.log_denominator, |a, b| a + b)?;
        result.potentials.push(deform_by_log(bp, &log_sum)?);
        result.running_integrals.push(s.running);
        result.modes.push(s.mode.clone());
        prev = s.mode;
    }
    Ok(result)
}

/// `V₀ - 2κ D² Σ_j ln(λ_j + ∫ v_{j-1}²)`.
pub fn chain_potential(bp: &BaseProblem, chain: &ParamChain) -> Result<SampledFunction> {
    chain_modes(bp, chain).map(|r| r.final_potential().clone())
}

/// General Riccati solution `y₁ = y₀ + F₀/(λ + ∫_c^x F₀)` with `F₀ = u₀²`,
/// on the mask of the superpotential.
pub fn riccati_general_solution(bp: &BaseProblem, lambda: f64) -> Result<MaskedFunction> {
    check_lambda_for(bp, lambda)?;
    let y0 = superpotential(bp);
    let d = scaled_denominator(&bp.running_integral(), lambda)?;
    let u0 = bp.ground_state();
    let values = (0..u0.len())
        .map(|k| y0.function.at(k) + u0.at(k).powi(2) / (lambda * d[k]))
        .collect();
    Ok(MaskedFunction {
        function: SampledFunction::new(u0.grid().clone(), values)?,
        mask: y0.mask,
    })
}

/// `-v'/v` on the samples where `|v| > floor`.
pub fn negative_log_derivative(v: &SampledFunction, floor: f64) -> MaskedFunction {
    log_derivative(v, &derivative(v), |k| v.at(k).abs() > floor)
}

/// `κ(y² + y')` for a superpotential `y`. The mask drops samples whose
/// derivative stencil touches a masked sample.
pub fn fermionic_partner(y: &MaskedFunction, kappa: f64) -> MaskedFunction {
    let dy = derivative(&y.function);
    let n = y.mask.len();
    let mask: Vec<bool> = (0..n)
        .map(|k| {
            let lo = k.saturating_sub(2);
            let hi = (k + 2).min(n - 1);
            (lo..=hi).all(|j| y.mask[j])
        })
        .collect();
    let values = (0..n)
        .map(|k| {
            if mask[k] {
                let v = y.function.at(k);
                kappa * (v * v + dy.at(k))
            } else {
                0.0
            }
        })
        .collect();
    MaskedFunction {
        function: SampledFunction::new(y.function.grid().clone(), values)
            .expect("partner of finite data is finite"),
        mask,
    }
}

/// Fermionic partner `V₁ = κ(y₀² + y₀')` shared by the whole family.
pub fn partner_potential(bp: &BaseProblem) -> MaskedFunction {
    fermionic_partner(&superpotential(bp), bp.kinetic_scale())
}

//! Base problems at zero factorization energy: a potential `V₀` shifted so
//! that its ground level sits at zero, together with the normalized,
//! nodeless ground state `u₀`.
//!
//! Sign convention: the superpotential is `y₀ = -u₀'/u₀`, so that
//! `V₀ = κ(y₀² - y₀')` and the fermionic partner is `V₁ = κ(y₀² + y₀')`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{
    cumulative_integral, derivative, normalize, total_integral, Grid, MaskedFunction,
    SampledFunction,
};
use crate::spectral::{discretize_with, ground_state, zero_mode_residual, Scheme};

/// Log-derivatives are only evaluated where `u₀` exceeds this.
pub const LOG_DERIVATIVE_FLOOR: f64 = 1e-12;

/// Whether `x_min` plays the role of the integration limit `c = -∞`
/// (truncated full line) or `c = 0` with a hard wall.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    FullLine,
    HalfLine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaseProblem {
    grid: Arc<Grid>,
    potential: SampledFunction,
    ground_state: SampledFunction,
    kinetic_scale: f64,
    energy_shift: f64,
    boundary: Boundary,
    name: String,
}

impl BaseProblem {
    /// Assemble a base problem and check its invariants: `∫u₀² = 1`,
    /// `u₀ > 0` on the interior, and a zero-mode residual below `1e-4`.
    pub fn new(
        name: impl Into<String>,
        potential: SampledFunction,
        ground_state: SampledFunction,
        kinetic_scale: f64,
        energy_shift: f64,
    ) -> Result<Self> {
        if !(kinetic_scale > 0.0 && kinetic_scale.is_finite()) {
            return Err(Error::InvalidKineticScale(kinetic_scale));
        }
        potential.check_same_grid(&ground_state)?;
        let norm2 = total_integral(&ground_state.square());
        if (norm2 - 1.0).abs() > 1e-8 {
            return Err(Error::InvariantViolation(format!(
                "ground state norm² = {norm2}"
            )));
        }
        let n = ground_state.len();
        if let Some(k) = (1..n - 1).find(|&k| ground_state.at(k) <= 0.0) {
            return Err(Error::InvariantViolation(format!(
                "ground state not positive at interior index {k}"
            )));
        }
        let residual = zero_mode_residual(&potential, &ground_state, kinetic_scale)?;
        if residual > 1e-4 {
            return Err(Error::InvariantViolation(format!(
                "zero-mode residual {residual:e} exceeds 1e-4"
            )));
        }
        Ok(Self {
            grid: potential.grid().clone(),
            potential,
            ground_state,
            kinetic_scale,
            energy_shift,
            boundary: Boundary::FullLine,
            name: name.into(),
        })
    }

    /// Mark `x_min` as a hard wall (`c = 0`); parameters must then be positive.
    pub fn on_half_line(mut self) -> Self {
        self.boundary = Boundary::HalfLine;
        self
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// `V₀`, shifted so that the ground level is zero.
    pub fn potential(&self) -> &SampledFunction {
        &self.potential
    }

    /// `u₀`, normalized and positive.
    pub fn ground_state(&self) -> &SampledFunction {
        &self.ground_state
    }

    pub fn kinetic_scale(&self) -> f64 {
        self.kinetic_scale
    }

    /// The ground energy subtracted from the input potential.
    pub fn energy_shift(&self) -> f64 {
        self.energy_shift
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `ΔF(x) = ∫_c^x u₀²`, rising from 0 at `x_min` to 1 at `x_max`.
    pub fn running_integral(&self) -> SampledFunction {
        cumulative_integral(&self.ground_state.square())
    }
}

fn require_span(grid: &Grid, lo: f64, hi: f64) -> Result<()> {
    if grid.x_min() > lo || grid.x_max() < hi {
        Err(Error::DomainTooSmall { lo, hi })
    } else {
        Ok(())
    }
}

/// Harmonic oscillator in units `ħ = m = ω = 1`: `κ = 1/2`,
/// `V₀ = x²/2 - 1/2`, `u₀ = π^{-1/4} e^{-x²/2}` renormalized on the grid.
pub fn harmonic_oscillator(grid: &Arc<Grid>) -> Result<BaseProblem> {
    require_span(grid, -8.0, 8.0)?;
    let potential = grid.sample(|x| 0.5 * x * x - 0.5)?;
    let u0 = normalize(&grid.sample(|x| (-0.5 * x * x).exp())?)?;
    BaseProblem::new("harmonic_oscillator", potential, u0, 0.5, 0.5)
}

/// Reflectionless Pöschl–Teller well with one bound state: `κ = 1`,
/// `V₀ = 1 - 2 sech²x`, `u₀ = sech(x)/√2` renormalized on the grid.
pub fn reflectionless_well(grid: &Arc<Grid>) -> Result<BaseProblem> {
    require_span(grid, -12.0, 12.0)?;
    let potential = grid.sample(|x| 1.0 - 2.0 / x.cosh().powi(2))?;
    let u0 = normalize(&grid.sample(|x| 1.0 / x.cosh())?)?;
    BaseProblem::new("reflectionless", potential, u0, 1.0, 1.0)
}

/// Ground state of an arbitrary sampled potential from the fourth-order
/// finite-difference Hamiltonian. The lowest level `E₀` becomes the energy
/// shift and `V₀ = V - E₀`.
pub fn numeric_ground_state(potential: &SampledFunction, kappa: f64) -> Result<BaseProblem> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidKineticScale(kappa));
    }
    let h = discretize_with(potential, kappa, Scheme::Numerov);
    let (e0, e1, vector) = ground_state(&h)?;
    let gap = e1 - e0;
    if !(gap > 1e-8) {
        return Err(Error::NoGap { gap });
    }
    let peak = vector.iter().copied().fold(0.0, f64::max);
    if let Some(i) = vector.iter().position(|&v| v < -1e-10 * peak) {
        return Err(Error::NodalGroundState { index: i + 1 });
    }
    let mut values = Vec::with_capacity(potential.len());
    values.push(0.0);
    values.extend(vector.iter().map(|v| v.max(0.0)));
    values.push(0.0);
    let u0 = normalize(&SampledFunction::new(potential.grid().clone(), values)?)?;
    let shifted = potential.map(|v| v - e0)?;
    BaseProblem::new("numeric", shifted, u0, kappa, e0)
}

/// `y₀ = -u₀'/u₀`, masked where `u₀ ≤ 1e-12`. Masked samples hold 0.
pub fn superpotential(bp: &BaseProblem) -> MaskedFunction {
    let u0 = bp.ground_state();
    log_derivative(u0, &derivative(u0), |k| u0.at(k) > LOG_DERIVATIVE_FLOOR)
}

pub(crate) fn log_derivative(
    f: &SampledFunction,
    df: &SampledFunction,
    keep: impl Fn(usize) -> bool,
) -> MaskedFunction {
    let mask: Vec<bool> = (0..f.len()).map(keep).collect();
    let values = (0..f.len())
        .map(|k| if mask[k] { -df.at(k) / f.at(k) } else { 0.0 })
        .collect();
    MaskedFunction {
        function: SampledFunction::new(f.grid().clone(), values)
            .expect("masked log-derivative is finite"),
        mask,
    }
}

/// Integration factor `F₀ = u₀²`.
pub fn integration_factor(bp: &BaseProblem) -> SampledFunction {
    bp.ground_state().square()
}

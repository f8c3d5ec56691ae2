//! Closed forms of the chain.
//!
//! The whole chain collapses to a single denominator linear in `ΔF`:
//!
//! ```text
//! v = √(Λ₁⋯Λᵢ) u₀ / (C₁ + C₂ ΔF),   V = V₀ - 2κ D² ln(C₁ + C₂ ΔF)
//! ```
//!
//! where `C₁ = e_i(λ)` is the product of the parameters and `C₂` is the sum
//! of the lower elementary symmetric polynomials `e_0 … e_{i-1}`. Since
//! `C₁ + C₂ = ∏(1 + λ_j)`, the normalization is `Λ₁⋯Λᵢ = C₁(C₁ + C₂)`.

use serde::{Deserialize, Serialize};

use crate::base::BaseProblem;
use crate::chain::{check_lambda, check_lambda_for, deform_by_log, expanded_potential};
use crate::error::{Error, Result};
use crate::grid::{tail_integral, MaskedFunction, SampledFunction};

/// Below this value of `ΔF` (Pursey) or `1 - ΔF` (Abraham–Moses) the limit
/// potentials are masked as invalid.
pub const LIMIT_MASK_FLOOR: f64 = 1e-6;

/// Elementary symmetric polynomials `e_0 … e_i` of the parameters.
pub fn elementary_symmetric(lambdas: &[f64]) -> Result<Vec<f64>> {
    if lambdas.is_empty() {
        return Err(Error::EmptyParameters);
    }
    let mut e = vec![0.0; lambdas.len() + 1];
    e[0] = 1.0;
    for (j, &l) in lambdas.iter().enumerate() {
        for k in (1..=j + 1).rev() {
            e[k] += l * e[k - 1];
        }
    }
    Ok(e)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VieteCoefficients {
    pub c1: f64,
    pub c2: f64,
    /// `C₁/C₂`; `None` when `C₂ = 0`.
    pub lambda_eff: Option<f64>,
    /// `∏ λ_j(λ_j + 1)`.
    pub lambda_product: f64,
}

impl VieteCoefficients {
    fn from_c(c1: f64, c2: f64, lambda_product: f64) -> Self {
        Self {
            c1,
            c2,
            lambda_eff: (c2 != 0.0).then(|| c1 / c2),
            lambda_product,
        }
    }

    /// Denominator `C₁ + C₂ t` at a value `t` of the running integral.
    pub fn denominator(&self, t: f64) -> f64 {
        self.c1 + self.c2 * t
    }

    /// Endpoint sign test on `[lo, hi]`: a linear function keeps one sign on
    /// the interval iff it has the same strict sign at both ends.
    pub fn check_denominator(&self, lo: f64, hi: f64) -> Result<()> {
        let (a, b) = (self.denominator(lo), self.denominator(hi));
        if a * b > 0.0 {
            Ok(())
        } else {
            Err(Error::SingularDenominator { lo, hi })
        }
    }

    /// `sign(C₁) √(1 + C₂/C₁)`, which equals `√(C₁(C₁+C₂))/C₁`.
    fn scaled_norm(&self) -> Result<f64> {
        let r = 1.0 + self.c2 / self.c1;
        if !(self.c1 != 0.0 && r > 0.0) {
            return Err(Error::Inadmissible(format!(
                "Λ-product C₁(C₁+C₂) = {} is not positive",
                self.c1 * (self.c1 + self.c2)
            )));
        }
        Ok(self.c1.signum() * r.sqrt())
    }
}

/// Viète coefficients of a parameter list (each `λ ∉ [-1, 0]`).
pub fn viete_coefficients(lambdas: &[f64]) -> Result<VieteCoefficients> {
    for &l in lambdas {
        check_lambda(l)?;
    }
    let e = elementary_symmetric(lambdas)?;
    let i = lambdas.len();
    let c1 = e[i];
    let c2: f64 = e[..i].iter().sum();
    let lambda_product = lambdas.iter().map(|l| l * (l + 1.0)).product();
    Ok(VieteCoefficients::from_c(c1, c2, lambda_product))
}

/// Viète coefficients read off a polynomial `a₀xⁱ + a₁xⁱ⁻¹ + … + aᵢ` whose
/// roots play the role of the parameters: after dividing by `a₀`,
/// `C₁ = (-1)ⁱ aᵢ` and `C₂ = Σ_{k<i} (-1)ᵏ a_k`.
///
/// Roots need not be real; admissibility is a property of the denominator
/// (see [`VieteCoefficients::check_denominator`]).
pub fn from_polynomial(coefficients: &[f64]) -> Result<VieteCoefficients> {
    let (&lead, _) = coefficients.split_first().ok_or(Error::EmptyParameters)?;
    if lead == 0.0 {
        return Err(Error::ZeroLeadingCoefficient);
    }
    let i = coefficients.len() - 1;
    if i == 0 {
        return Err(Error::EmptyParameters);
    }
    let monic: Vec<f64> = coefficients.iter().map(|a| a / lead).collect();
    let alt = |k: usize| {
        if k.is_multiple_of(2) {
            monic[k]
        } else {
            -monic[k]
        }
    };
    let c1 = alt(i);
    let c2: f64 = (0..i).map(alt).sum();
    Ok(VieteCoefficients::from_c(c1, c2, c1 * (c1 + c2)))
}

fn running_range(running: &SampledFunction) -> (f64, f64) {
    let v = running.values();
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Scaled denominators `1 + (C₂/C₁) ΔF`, checked nonvanishing.
fn scaled_denominators(coeffs: &VieteCoefficients, running: &SampledFunction) -> Result<Vec<f64>> {
    let (lo, hi) = running_range(running);
    coeffs.check_denominator(lo, hi)?;
    let ratio = coeffs.c2 / coeffs.c1;
    Ok(running.values().iter().map(|t| 1.0 + ratio * t).collect())
}

fn check_lambdas(bp: &BaseProblem, lambdas: &[f64]) -> Result<VieteCoefficients> {
    for &l in lambdas {
        check_lambda_for(bp, l)?;
    }
    viete_coefficients(lambdas)
}

/// `√(Λ₁⋯Λᵢ) u₀ / (C₁ + C₂ ΔF)`.
pub fn closed_mode(bp: &BaseProblem, lambdas: &[f64]) -> Result<SampledFunction> {
    let coeffs = check_lambdas(bp, lambdas)?;
    closed_mode_from(bp, &coeffs)
}

/// Closed-form mode for arbitrary coefficients, e.g. from a polynomial.
pub fn closed_mode_from(bp: &BaseProblem, coeffs: &VieteCoefficients) -> Result<SampledFunction> {
    let running = bp.running_integral();
    let d = scaled_denominators(coeffs, &running)?;
    let c = coeffs.scaled_norm()?;
    let u0 = bp.ground_state();
    SampledFunction::new(
        u0.grid().clone(),
        u0.values().iter().zip(&d).map(|(u, d)| c * u / d).collect(),
    )
}

/// Mode value at a single grid index, for parameter sweeps. `running` is
/// [`BaseProblem::running_integral`], nondecreasing, so its range is read
/// off the end samples in O(1).
pub fn closed_mode_at(
    bp: &BaseProblem,
    running: &SampledFunction,
    coeffs: &VieteCoefficients,
    index: usize,
) -> Result<f64> {
    let v = running.values();
    debug_assert!(v.windows(2).all(|w| w[1] >= w[0]));
    coeffs.check_denominator(v[0], v[v.len() - 1])?;
    let c = coeffs.scaled_norm()?;
    let d = 1.0 + coeffs.c2 / coeffs.c1 * running.at(index);
    Ok(c * bp.ground_state().at(index) / d)
}

/// Expanded closed-form potential
/// `V₀ - 4κ C₂ u₀u₀'/(C₁ + C₂ΔF) + 2κ C₂² u₀⁴/(C₁ + C₂ΔF)²`.
pub fn closed_potential(bp: &BaseProblem, lambdas: &[f64]) -> Result<SampledFunction> {
    let coeffs = check_lambdas(bp, lambdas)?;
    closed_potential_from(bp, &coeffs)
}

pub fn closed_potential_from(
    bp: &BaseProblem,
    coeffs: &VieteCoefficients,
) -> Result<SampledFunction> {
    let running = bp.running_integral();
    let d = scaled_denominators(coeffs, &running)?;
    // C₂/(C₁ + C₂ΔF) = (C₂/C₁)/d, so pass the ratio as the constant.
    let reciprocal: Vec<f64> = d.iter().map(|d| 1.0 / d).collect();
    expanded_potential(bp, &reciprocal, coeffs.c2 / coeffs.c1)
}

/// Log form `V₀ - 2κ D² ln(C₁ + C₂ΔF)` of the closed-form potential.
pub fn closed_potential_log(bp: &BaseProblem, lambdas: &[f64]) -> Result<SampledFunction> {
    let coeffs = check_lambdas(bp, lambdas)?;
    let running = bp.running_integral();
    scaled_denominators(&coeffs, &running)?;
    let ratio = coeffs.c2 / coeffs.c1;
    let logs = running.map(|t| (ratio * t).ln_1p())?;
    deform_by_log(bp, &logs)
}

/// `ΔF = α + β K(x)` with the kink `K` ranging over `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KinkDecomposition {
    pub alpha: f64,
    pub beta: f64,
    pub kink: SampledFunction,
}

impl KinkDecomposition {
    /// Decompose a nondecreasing running integral.
    pub fn from_running_integral(running: &SampledFunction) -> Result<Self> {
        let v = running.values();
        let scale = v.iter().fold(0.0_f64, |a, x| a.max(x.abs())).max(1.0);
        if let Some(k) = v.windows(2).position(|w| w[1] < w[0] - 1e-14 * scale) {
            return Err(Error::NonmonotoneInput { index: k + 1 });
        }
        let (lo, hi) = running_range(running);
        let alpha = 0.5 * (hi + lo);
        let beta = 0.5 * (hi - lo);
        if !(beta > 0.0) {
            return Err(Error::NonmonotoneInput { index: 0 });
        }
        let kink = running.map(|t| (t - alpha) / beta)?;
        Ok(Self { alpha, beta, kink })
    }
}

pub fn kink_parameters(bp: &BaseProblem) -> Result<KinkDecomposition> {
    KinkDecomposition::from_running_integral(&bp.running_integral())
}

/// `λ_eff > β - α` or `λ_eff < -(β + α)`.
pub fn admissible(lambda_eff: f64, kink: &KinkDecomposition) -> bool {
    lambda_eff > kink.beta - kink.alpha || lambda_eff < -(kink.beta + kink.alpha)
}

fn limit_potential(bp: &BaseProblem, profile: &SampledFunction) -> Result<MaskedFunction> {
    let mask: Vec<bool> = profile
        .values()
        .iter()
        .map(|&t| t >= LIMIT_MASK_FLOOR)
        .collect();
    let logs = profile.map(|t| t.max(f64::MIN_POSITIVE).ln())?;
    let function = deform_by_log(bp, &logs)?;
    Ok(MaskedFunction { function, mask })
}

/// `V₀ - 2κ D² ln ΔF`, the `λ → 0⁺` end of the family. Masked where
/// `ΔF < 1e-6`, i.e. next to `x_min`.
pub fn pursey_limit_potential(bp: &BaseProblem) -> Result<MaskedFunction> {
    limit_potential(bp, &bp.running_integral())
}

/// `V₀ - 2κ D² ln(1 - ΔF)`, the `λ → -1⁻` end of the family. `1 - ΔF` is
/// evaluated as the right-tail integral of `u₀²`. Masked where
/// `1 - ΔF < 1e-6`, i.e. next to `x_max`.
pub fn abraham_moses_limit_potential(bp: &BaseProblem) -> Result<MaskedFunction> {
    limit_potential(bp, &tail_integral(&bp.ground_state().square()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::harmonic_oscillator;
    use crate::chain::{one_param_mode, one_param_potential};
    use crate::grid::{make_grid, total_integral};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn ho() -> BaseProblem {
        harmonic_oscillator(&make_grid(-10.0, 10.0, 4001).unwrap()).unwrap()
    }

    #[test]
    fn symmetric_polynomials() {
        assert_eq!(elementary_symmetric(&[3.0]).unwrap(), vec![1.0, 3.0]);
        assert_eq!(
            elementary_symmetric(&[2.0, 5.0]).unwrap(),
            vec![1.0, 7.0, 10.0]
        );
        assert_eq!(
            elementary_symmetric(&[1.0, 2.0, 3.0]).unwrap(),
            vec![1.0, 6.0, 11.0, 6.0]
        );
        assert!(matches!(
            elementary_symmetric(&[]),
            Err(Error::EmptyParameters)
        ));
    }

    #[test]
    fn viete_low_depth() {
        let (a, b, c) = (0.3, 2.5, 7.0);
        let v = viete_coefficients(&[a, b]).unwrap();
        assert_abs_diff_eq!(v.c1, a * b, epsilon = 1e-15);
        assert_abs_diff_eq!(v.c2, a + b + 1.0, epsilon = 1e-15);
        let v = viete_coefficients(&[a, b, c]).unwrap();
        assert_abs_diff_eq!(v.c1, a * b * c, epsilon = 1e-13);
        assert_abs_diff_eq!(
            v.c2,
            a * b + b * c + c * a + a + b + c + 1.0,
            epsilon = 1e-13
        );
        assert!(matches!(
            viete_coefficients(&[0.3, -0.2]),
            Err(Error::ForbiddenParameter { .. })
        ));
    }

    #[test]
    fn effective_parameter_range_of_figure_family() {
        let lo = viete_coefficients(&[0.1, 0.2]).unwrap().lambda_eff.unwrap();
        let hi = viete_coefficients(&[5.0, 0.2]).unwrap().lambda_eff.unwrap();
        assert_abs_diff_eq!(lo, 0.02 / 1.3, epsilon = 1e-15);
        assert_abs_diff_eq!(hi, 1.0 / 6.2, epsilon = 1e-15);
        assert!((lo - 0.0154).abs() < 5e-4 && (hi - 0.1613).abs() < 5e-4);
    }

    #[test]
    fn lambda_eff_undefined_when_c2_vanishes() {
        // c2 = 1 + λ₁ + λ₂ = 0
        let v = viete_coefficients(&[2.0, -3.0]).unwrap();
        assert_eq!(v.c2, 0.0);
        assert_eq!(v.lambda_eff, None);
    }

    #[test]
    fn closed_mode_depth_one_matches_one_param() {
        let bp = ho();
        for l in [0.2, 3.0, -1.5] {
            let a = closed_mode(&bp, &[l]).unwrap();
            let b = one_param_mode(&bp, l, true).unwrap();
            assert!(a.sup_distance(&b).unwrap() < 1e-14);
            let p = closed_potential(&bp, &[l]).unwrap();
            let q = one_param_potential(&bp, l).unwrap();
            assert!(p.sup_distance(&q).unwrap() < 1e-12);
        }
    }

    #[test]
    fn closed_mode_at_origin() {
        let bp = ho();
        let v = closed_mode(&bp, &[0.1, 0.2]).unwrap();
        let expected = (0.11_f64 * 0.24).sqrt() * PI.powf(-0.25) / 0.67;
        assert_abs_diff_eq!(v.at(2000), expected, epsilon = 1e-8);
        assert_abs_diff_eq!(expected, 0.18216, epsilon = 1e-5);
        assert_abs_diff_eq!(total_integral(&v.square()), 1.0, epsilon = 1e-6);
        let running = bp.running_integral();
        let coeffs = viete_coefficients(&[0.1, 0.2]).unwrap();
        assert_eq!(
            closed_mode_at(&bp, &running, &coeffs, 2000).unwrap(),
            v.at(2000)
        );
    }

    #[test]
    fn closed_mode_large_parameters() {
        let bp = ho();
        for depth in 1..=4 {
            let v = closed_mode(&bp, &vec![1e8; depth]).unwrap();
            assert!(v.sup_distance(bp.ground_state()).unwrap() < 1e-5);
        }
    }

    #[test]
    fn closed_potential_permutation() {
        let bp = ho();
        let a = closed_potential(&bp, &[0.1, 0.2]).unwrap();
        let b = closed_potential(&bp, &[0.2, 0.1]).unwrap();
        assert!(a.sup_distance(&b).unwrap() <= 1e-12);
    }

    #[test]
    fn closed_potential_matches_effective_mielnik() {
        let bp = ho();
        let eff = viete_coefficients(&[0.1, 0.2]).unwrap().lambda_eff.unwrap();
        let a = closed_potential(&bp, &[0.1, 0.2]).unwrap();
        let b = one_param_potential(&bp, eff).unwrap();
        assert!(a.sup_distance(&b).unwrap() <= 1e-12);
    }

    #[test]
    fn polynomial_coefficients() {
        let (a, b) = (0.4, 3.0);
        let v = from_polynomial(&[1.0, -(a + b), a * b]).unwrap();
        assert_abs_diff_eq!(v.c1, a * b, epsilon = 1e-15);
        assert_abs_diff_eq!(v.c2, 1.0 + a + b, epsilon = 1e-15);
        let d1 = from_polynomial(&[1.0, -0.7]).unwrap();
        assert_abs_diff_eq!(d1.c1, 0.7);
        assert_abs_diff_eq!(d1.c2, 1.0);
        let scaled = from_polynomial(&[2.0, -1.4]).unwrap();
        assert_eq!(scaled, d1);
        assert!(matches!(
            from_polynomial(&[0.0, 1.0]),
            Err(Error::ZeroLeadingCoefficient)
        ));
    }

    #[test]
    fn complex_roots_checked_on_denominator() {
        // x² + 1: roots ±i, C₁ = 1, C₂ = 1, denominator 1 + ΔF > 0.
        let v = from_polynomial(&[1.0, 0.0, 1.0]).unwrap();
        assert!(v.check_denominator(0.0, 1.0).is_ok());
        let bp = ho();
        let m = closed_mode_from(&bp, &v).unwrap();
        assert_abs_diff_eq!(total_integral(&m.square()), 1.0, epsilon = 1e-6);
        // x² + 3x + 0.5: C₁ = 0.5, C₂ = 1 - 3 = -2, denominator 0.5 - 2ΔF vanishes.
        let bad = from_polynomial(&[1.0, 3.0, 0.5]).unwrap();
        assert!(matches!(
            closed_mode_from(&bp, &bad),
            Err(Error::SingularDenominator { .. })
        ));
    }

    #[test]
    fn kink_decomposition() {
        let bp = ho();
        let k = kink_parameters(&bp).unwrap();
        assert_abs_diff_eq!(k.alpha, 0.5, epsilon = 1e-8);
        assert_abs_diff_eq!(k.beta, 0.5, epsilon = 1e-8);
        assert_abs_diff_eq!(k.kink.at(0), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(k.kink.at(4000), 1.0, epsilon = 1e-12);
        let doubled = bp.running_integral().scale(2.0).unwrap();
        let k2 = KinkDecomposition::from_running_integral(&doubled).unwrap();
        assert_abs_diff_eq!(k2.alpha, 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(k2.beta, 1.0, epsilon = 1e-8);
        let bumpy = bp.grid().sample(|x| x.sin()).unwrap();
        assert!(matches!(
            KinkDecomposition::from_running_integral(&bumpy),
            Err(Error::NonmonotoneInput { .. })
        ));
    }

    #[test]
    fn admissibility_intervals() {
        let k = kink_parameters(&ho()).unwrap();
        assert!(admissible(0.0154, &k));
        assert!(!admissible(-0.5, &k));
        assert!(admissible(-1.5, &k));
        assert!(!admissible(0.0, &k));
        assert!(!admissible(-0.999, &k));
        assert!(admissible(-1.001, &k));
        let centered = KinkDecomposition {
            alpha: 0.0,
            beta: 0.5,
            kink: k.kink.clone(),
        };
        assert!(admissible(0.6, &centered) && admissible(-0.6, &centered));
        assert!(!admissible(0.4, &centered));
    }

    #[test]
    fn limit_masks() {
        let bp = ho();
        let p = pursey_limit_potential(&bp).unwrap();
        let a = abraham_moses_limit_potential(&bp).unwrap();
        assert!(!p.mask[0] && p.mask[4000]);
        assert!(a.mask[0] && !a.mask[4000]);
        // away from the singular end both flatten onto V₀
        for k in 3600..3990 {
            assert!((p.function.at(k) - bp.potential().at(k)).abs() < 1e-4);
            assert!((a.function.at(4000 - k) - bp.potential().at(4000 - k)).abs() < 1e-4);
        }
    }
}

//! Uniform grids, sampled functions and the discrete calculus built on them.
//!
//! Everything downstream (ground states, Darboux chains, spectra) works on
//! samples of a uniform grid. The integration lower limit `c` of the running
//! integrals is always the left end of the grid.
//!
//! The stencils are fourth order: five-point central differences inside,
//! fourth-order one-sided stencils near the ends, and a per-interval cubic
//! rule for running integrals.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid on `[x_min, x_max]` with `n` samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
            return Err(Error::InvalidBounds { x_min, x_max });
        }
        if n < 3 {
            return Err(Error::TooFewPoints { n });
        }
        Ok(Self { x_min, x_max, n })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    /// The k-th grid point. The last point is pinned to `x_max` exactly.
    pub fn point(&self, k: usize) -> f64 {
        if k + 1 == self.n {
            self.x_max
        } else {
            self.x_min + k as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.point(k)).collect()
    }

    /// Index of the grid node equal to `x` (within a millionth of a spacing).
    pub fn node_index(&self, x: f64) -> Option<usize> {
        let h = self.spacing();
        let t = (x - self.x_min) / h;
        let k = t.round();
        if k < 0.0 || k > (self.n - 1) as f64 {
            return None;
        }
        let k = k as usize;
        ((self.point(k) - x).abs() <= 1e-6 * h).then_some(k)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }

    pub fn sample(self: &Arc<Self>, f: impl Fn(f64) -> f64) -> Result<SampledFunction> {
        let values = (0..self.n).map(|k| f(self.point(k))).collect();
        SampledFunction::new(self.clone(), values)
    }
}

/// Convenience wrapper mirroring [`Grid::new`] but returning a shared grid.
pub fn make_grid(x_min: f64, x_max: f64, n: usize) -> Result<Arc<Grid>> {
    Grid::new(x_min, x_max, n).map(Arc::new)
}

/// Finite real samples of a function on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![0.0; n],
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn at(&self, k: usize) -> f64 {
        self.values[k]
    }

    /// Samplewise map; fails if the map produces non-finite values.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            self.grid.clone(),
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    /// Samplewise combination of two functions on the same grid.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::new(self.grid.clone(), values)
    }

    pub fn scale(&self, factor: f64) -> Result<Self> {
        self.map(|v| v * factor)
    }

    pub fn square(&self) -> Self {
        // Squares of finite values can only overflow, never become NaN.
        let values: Vec<f64> = self.values.iter().map(|v| v * v).collect();
        Self {
            grid: self.grid.clone(),
            values,
        }
    }

    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// A sampled function paired with a validity mask. Values where the mask is
/// `false` are finite placeholders and must not be trusted.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedFunction {
    pub function: SampledFunction,
    pub mask: Vec<bool>,
}

impl MaskedFunction {
    pub fn values(&self) -> &[f64] {
        self.function.values()
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Iterator over `(index, value)` of valid samples.
    pub fn valid(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.function
            .values()
            .iter()
            .enumerate()
            .filter(|(k, _)| self.mask[*k])
            .map(|(k, &v)| (k, v))
    }
}

/// First derivative.
///
/// Fourth-order central differences inside, fourth-order one-sided stencils
/// at the two points closest to each end. Grids with fewer than five points
/// fall back to second order.
pub fn derivative(f: &SampledFunction) -> SampledFunction {
    let v = f.values();
    let n = v.len();
    let h = f.grid().spacing();
    let mut d = vec![0.0; n];
    if n < 5 {
        for k in 1..n - 1 {
            d[k] = (v[k + 1] - v[k - 1]) / (2.0 * h);
        }
        d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
        d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    } else {
        let c = 12.0 * h;
        for k in 2..n - 2 {
            d[k] = (v[k - 2] - 8.0 * v[k - 1] + 8.0 * v[k + 1] - v[k + 2]) / c;
        }
        d[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / c;
        d[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / c;
        d[n - 1] = (25.0 * v[n - 1] - 48.0 * v[n - 2] + 36.0 * v[n - 3] - 16.0 * v[n - 4]
            + 3.0 * v[n - 5])
            / c;
        d[n - 2] =
            (3.0 * v[n - 1] + 10.0 * v[n - 2] - 18.0 * v[n - 3] + 6.0 * v[n - 4] - v[n - 5]) / c;
    }
    finite_or_zero(f.grid().clone(), d)
}

/// Second derivative.
///
/// Fourth-order five-point stencil inside, fourth-order six-point one-sided
/// stencils for the two points closest to each end. Grids with fewer than
/// six points use the three-point stencil with endpoints extrapolated
/// linearly from the adjacent interior values.
pub fn second_derivative(f: &SampledFunction) -> SampledFunction {
    let v = f.values();
    let n = v.len();
    let h2 = f.grid().spacing().powi(2);
    let mut d = vec![0.0; n];
    if n < 6 {
        for k in 1..n - 1 {
            d[k] = (v[k - 1] - 2.0 * v[k] + v[k + 1]) / h2;
        }
        if n == 3 {
            d[0] = d[1];
            d[2] = d[1];
        } else {
            d[0] = 2.0 * d[1] - d[2];
            d[n - 1] = 2.0 * d[n - 2] - d[n - 3];
        }
    } else {
        let c = 12.0 * h2;
        for k in 2..n - 2 {
            d[k] = (-v[k - 2] + 16.0 * v[k - 1] - 30.0 * v[k] + 16.0 * v[k + 1] - v[k + 2]) / c;
        }
        d[0] = (45.0 * v[0] - 154.0 * v[1] + 214.0 * v[2] - 156.0 * v[3] + 61.0 * v[4]
            - 10.0 * v[5])
            / c;
        d[1] = (10.0 * v[0] - 15.0 * v[1] - 4.0 * v[2] + 14.0 * v[3] - 6.0 * v[4] + v[5]) / c;
        d[n - 1] = (45.0 * v[n - 1] - 154.0 * v[n - 2] + 214.0 * v[n - 3] - 156.0 * v[n - 4]
            + 61.0 * v[n - 5]
            - 10.0 * v[n - 6])
            / c;
        d[n - 2] = (10.0 * v[n - 1] - 15.0 * v[n - 2] - 4.0 * v[n - 3] + 14.0 * v[n - 4]
            - 6.0 * v[n - 5]
            + v[n - 6])
            / c;
    }
    finite_or_zero(f.grid().clone(), d)
}

/// Increments of the running integral between consecutive samples.
fn interval_increments(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let trapezoid = |k: usize| 0.5 * h * (v[k] + v[k + 1]);
    if n < 4 {
        return (0..n - 1).map(trapezoid).collect();
    }
    let c = h / 24.0;
    (0..n - 1)
        .map(|k| {
            let cubic = if k == 0 {
                c * (9.0 * v[0] + 19.0 * v[1] - 5.0 * v[2] + v[3])
            } else if k == n - 2 {
                c * (9.0 * v[n - 1] + 19.0 * v[n - 2] - 5.0 * v[n - 3] + v[n - 4])
            } else {
                c * (-v[k - 1] + 13.0 * v[k] + 13.0 * v[k + 1] - v[k + 2])
            };
            // Under-resolved intervals of a nonnegative integrand can make the
            // cubic go negative; the trapezoid keeps running integrals monotone.
            if cubic < 0.0 && v[k] >= 0.0 && v[k + 1] >= 0.0 {
                trapezoid(k)
            } else {
                cubic
            }
        })
        .collect()
}

/// Running integral `∫_{x_min}^{x} f`. Exactly zero at `x_min`.
pub fn cumulative_integral(f: &SampledFunction) -> SampledFunction {
    let inc = interval_increments(f.values(), f.grid().spacing());
    let mut out = Vec::with_capacity(f.len());
    let mut acc = 0.0;
    out.push(acc);
    for d in inc {
        acc += d;
        out.push(acc);
    }
    finite_or_zero(f.grid().clone(), out)
}

/// Right-tail integral `∫_{x}^{x_max} f`, the exact mirror image of
/// [`cumulative_integral`]. Exactly zero at `x_max`.
pub fn tail_integral(f: &SampledFunction) -> SampledFunction {
    let mut reversed = f.values().to_vec();
    reversed.reverse();
    let inc = interval_increments(&reversed, f.grid().spacing());
    let mut out = Vec::with_capacity(f.len());
    let mut acc = 0.0;
    out.push(acc);
    for d in inc {
        acc += d;
        out.push(acc);
    }
    out.reverse();
    finite_or_zero(f.grid().clone(), out)
}

/// `∫_{x_min}^{x_max} f`, the last sample of [`cumulative_integral`].
pub fn total_integral(f: &SampledFunction) -> f64 {
    interval_increments(f.values(), f.grid().spacing())
        .into_iter()
        .sum()
}

/// Rescale `f` so that `∫ f² = 1`.
pub fn normalize(f: &SampledFunction) -> Result<SampledFunction> {
    let norm2 = total_integral(&f.square());
    if !(norm2 > 0.0) || !norm2.is_finite() {
        return Err(Error::ZeroNorm);
    }
    f.scale(1.0 / norm2.sqrt())
}

fn finite_or_zero(grid: Arc<Grid>, mut values: Vec<f64>) -> SampledFunction {
    // Stencils of finite inputs only overflow on pathological data; clamp
    // so the SampledFunction invariant survives.
    for v in &mut values {
        if !v.is_finite() {
            *v = if v.is_nan() {
                0.0
            } else {
                v.signum() * f64::MAX
            };
        }
    }
    SampledFunction { grid, values }
}

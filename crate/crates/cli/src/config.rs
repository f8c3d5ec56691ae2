//! Run configuration: a flat JSON object.
//!
//! | key | type | meaning |
//! |-----|------|---------|
//! | `problem` | string | `harmonic_oscillator`, `reflectionless` or `numeric` (required) |
//! | `potential_file` | string | two-column CSV `x,V` (numeric problems only) |
//! | `x_min`, `x_max`, `n` | number | grid; defaults depend on the problem |
//! | `kinetic_scale` | number | coefficient κ of `-d²/dx²` |
//! | `lambdas` | number array | parameter tuple (or sweep template) |
//! | `sweep_index` | integer | which entry of `lambdas` is swept |
//! | `sweep_values` | number array | explicit sweep values |
//! | `sweep_range`, `sweep_count` | [a, b], integer | evenly spaced sweep values |
//! | `sweep2d_lambda1`, `sweep2d_count1` | [a, b], integer | first mesh axis |
//! | `sweep2d_lambda2`, `sweep2d_count2` | [a, b], integer | second mesh axis |
//! | `fixed_x` | number array | grid nodes at which the 2-D tables are taken |
//! | `verify_k`, `verify_tol` | integer, number | spectral check |
//! | `verify_perturbation` | number | amplitude of a Gaussian bump added to the deformed potential (negative control) |
//! | `stride` | integer | emit every `stride`-th grid point in family/limit tables |
//! | `output`, `format` | string | output path and `csv`/`json` |

use std::path::PathBuf;

use isospec::closed_form::viete_coefficients;
use serde_json::{Map, Value};
use thiserror::Error;

const KNOWN_KEYS: &[&str] = &[
    "problem",
    "potential_file",
    "x_min",
    "x_max",
    "n",
    "kinetic_scale",
    "lambdas",
    "sweep_index",
    "sweep_values",
    "sweep_range",
    "sweep_count",
    "sweep2d_lambda1",
    "sweep2d_count1",
    "sweep2d_lambda2",
    "sweep2d_count2",
    "fixed_x",
    "verify_k",
    "verify_tol",
    "verify_perturbation",
    "stride",
    "output",
    "format",
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid `{field}`: {reason}")]
    Validation { field: String, reason: String },
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Validation {
        field: field.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    HarmonicOscillator,
    Reflectionless,
    Numeric { path: PathBuf },
}

impl Problem {
    pub fn name(&self) -> &'static str {
        match self {
            Problem::HarmonicOscillator => "harmonic_oscillator",
            Problem::Reflectionless => "reflectionless",
            Problem::Numeric { .. } => "numeric",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    /// No parameters given (enough for `limits`).
    Base,
    Single(Vec<f64>),
    Sweep {
        template: Vec<f64>,
        index: usize,
        values: Vec<f64>,
    },
    Sweep2d {
        lambda1: Vec<f64>,
        lambda2: Vec<f64>,
        fixed_x: Vec<f64>,
    },
}

impl Mode {
    /// Parameter tuples of the family modes, in output order.
    pub fn tuples(&self) -> Vec<Vec<f64>> {
        match self {
            Mode::Single(l) => vec![l.clone()],
            Mode::Sweep {
                template,
                index,
                values,
            } => values
                .iter()
                .map(|&v| {
                    let mut t = template.clone();
                    t[*index] = v;
                    t
                })
                .collect(),
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifySpec {
    pub k: usize,
    pub tol: f64,
    pub perturbation: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: Problem,
    /// `None` for numeric problems, whose grid comes from the potential file.
    pub grid: Option<GridSpec>,
    pub kinetic_scale: f64,
    pub mode: Mode,
    pub verify: Option<VerifySpec>,
    pub stride: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
}

struct Fields<'a>(&'a Map<String, Value>);

impl Fields<'_> {
    fn has(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    fn f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_f64()
                .filter(|x| x.is_finite())
                .map(Some)
                .ok_or_else(|| invalid(key, "expected a finite number")),
        }
    }

    fn usize(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .map(|x| Some(x as usize))
                .ok_or_else(|| invalid(key, "expected a nonnegative integer")),
        }
    }

    fn string(&self, key: &str) -> Result<Option<&str>, ConfigError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_str()
                .map(Some)
                .ok_or_else(|| invalid(key, "expected a string")),
        }
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| {
                    v.as_f64()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| invalid(key, "expected an array of finite numbers"))
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(_) => Err(invalid(key, "expected an array of numbers")),
        }
    }

    fn range(&self, key: &str) -> Result<Option<(f64, f64)>, ConfigError> {
        match self.list(key)? {
            None => Ok(None),
            Some(v) if v.len() == 2 && v[0] <= v[1] => Ok(Some((v[0], v[1]))),
            Some(_) => Err(invalid(key, "expected [start, end] with start <= end")),
        }
    }
}

/// `count` evenly spaced values from `a` to `b`, endpoints exact.
pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..count)
            .map(|k| {
                if k + 1 == count {
                    b
                } else {
                    a + (b - a) * k as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

fn check_parameter(field: &str, lambda: f64) -> Result<(), ConfigError> {
    if (-1.0..=0.0).contains(&lambda) {
        Err(invalid(
            field,
            format!("parameter {lambda} in deleted interval [-1,0]"),
        ))
    } else {
        Ok(())
    }
}

/// Every parameter outside `[-1, 0]` and the tuple's denominator
/// `C₁ + C₂ΔF` one-signed for `ΔF ∈ [0, 1]`.
fn check_tuple(field: &str, tuple: &[f64]) -> Result<(), ConfigError> {
    for &l in tuple {
        check_parameter(field, l)?;
    }
    let coeffs = viete_coefficients(tuple).map_err(|e| invalid(field, e.to_string()))?;
    coeffs
        .check_denominator(0.0, 1.0)
        .map_err(|e| invalid(field, format!("tuple {tuple:?}: {e}")))
}

fn range_values(
    f: &Fields,
    range_key: &str,
    count_key: &str,
) -> Result<Option<Vec<f64>>, ConfigError> {
    match (f.range(range_key)?, f.usize(count_key)?) {
        (None, None) => Ok(None),
        (Some((a, b)), Some(c)) if c >= 1 => Ok(Some(linspace(a, b, c))),
        (Some(_), Some(_)) => Err(invalid(count_key, "must be at least 1")),
        (Some(_), None) => Err(invalid(count_key, format!("required with `{range_key}`"))),
        (None, Some(_)) => Err(invalid(range_key, format!("required with `{count_key}`"))),
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let map = value
        .as_object()
        .ok_or_else(|| invalid("<document>", "expected a JSON object"))?;
    if let Some(key) = map.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
        return Err(invalid(key, "unknown key"));
    }
    let f = Fields(map);

    let problem = match f.string("problem")? {
        None => return Err(invalid("problem", "missing required key")),
        Some("harmonic_oscillator") => Problem::HarmonicOscillator,
        Some("reflectionless") => Problem::Reflectionless,
        Some("numeric") => {
            let path = f
                .string("potential_file")?
                .ok_or_else(|| invalid("potential_file", "required for numeric problems"))?;
            Problem::Numeric {
                path: PathBuf::from(path),
            }
        }
        Some(other) => {
            return Err(invalid(
                "problem",
                format!("unknown problem {other:?} (see `catalog`)"),
            ))
        }
    };
    if !matches!(problem, Problem::Numeric { .. }) && f.has("potential_file") {
        return Err(invalid("potential_file", "only valid for numeric problems"));
    }

    let (default_grid, fixed_kappa) = match problem {
        Problem::HarmonicOscillator => (
            Some(GridSpec {
                x_min: -10.0,
                x_max: 10.0,
                n: 4001,
            }),
            Some(0.5),
        ),
        Problem::Reflectionless => (
            Some(GridSpec {
                x_min: -12.0,
                x_max: 12.0,
                n: 4801,
            }),
            Some(1.0),
        ),
        Problem::Numeric { .. } => (None, None),
    };
    let grid = match default_grid {
        Some(d) => {
            let g = GridSpec {
                x_min: f.f64("x_min")?.unwrap_or(d.x_min),
                x_max: f.f64("x_max")?.unwrap_or(d.x_max),
                n: f.usize("n")?.unwrap_or(d.n),
            };
            if g.n < 3 {
                return Err(invalid("n", "grid needs at least 3 points"));
            }
            if g.x_min >= g.x_max {
                return Err(invalid("x_max", "must exceed x_min"));
            }
            Some(g)
        }
        None => {
            for key in ["x_min", "x_max", "n"] {
                if f.has(key) {
                    return Err(invalid(
                        key,
                        "numeric problems take their grid from the potential file",
                    ));
                }
            }
            None
        }
    };
    let kinetic_scale = match (f.f64("kinetic_scale")?, fixed_kappa) {
        (Some(k), _) if !(k > 0.0) => return Err(invalid("kinetic_scale", "must be positive")),
        (Some(k), Some(fixed)) if k != fixed => {
            return Err(invalid(
                "kinetic_scale",
                format!("{} is defined with kinetic scale {fixed}", problem.name()),
            ))
        }
        (Some(k), _) => k,
        (None, Some(fixed)) => fixed,
        (None, None) => 0.5,
    };

    let lambdas = f.list("lambdas")?;
    let sweep_values = f.list("sweep_values")?;
    let sweep_ranged = range_values(&f, "sweep_range", "sweep_count")?;
    let sweep_active = f.has("sweep_index") || sweep_values.is_some() || sweep_ranged.is_some();
    let lambda1 = range_values(&f, "sweep2d_lambda1", "sweep2d_count1")?;
    let lambda2 = range_values(&f, "sweep2d_lambda2", "sweep2d_count2")?;
    let fixed_x = f.list("fixed_x")?;
    let sweep2d_active = lambda1.is_some() || lambda2.is_some() || fixed_x.is_some();

    if sweep_active && sweep2d_active {
        return Err(invalid(
            "sweep2d_lambda1",
            "sweep and sweep2d modes are exclusive",
        ));
    }
    let mode = if sweep2d_active {
        if lambdas.is_some() {
            return Err(invalid("lambdas", "not used in sweep2d mode"));
        }
        let lambda1 =
            lambda1.ok_or_else(|| invalid("sweep2d_lambda1", "required in sweep2d mode"))?;
        let lambda2 =
            lambda2.ok_or_else(|| invalid("sweep2d_lambda2", "required in sweep2d mode"))?;
        let fixed_x = fixed_x.ok_or_else(|| invalid("fixed_x", "required in sweep2d mode"))?;
        if fixed_x.is_empty() {
            return Err(invalid("fixed_x", "needs at least one position"));
        }
        for &a in &lambda1 {
            check_parameter("sweep2d_lambda1", a)?;
        }
        for &b in &lambda2 {
            check_parameter("sweep2d_lambda2", b)?;
        }
        for &a in &lambda1 {
            for &b in &lambda2 {
                check_tuple("sweep2d_lambda2", &[a, b])?;
            }
        }
        if let Some(g) = grid {
            if let Some(x) = fixed_x.iter().find(|&&x| x < g.x_min || x > g.x_max) {
                return Err(invalid("fixed_x", format!("{x} lies outside the grid")));
            }
        }
        Mode::Sweep2d {
            lambda1,
            lambda2,
            fixed_x,
        }
    } else if sweep_active {
        let template =
            lambdas.ok_or_else(|| invalid("lambdas", "sweep mode needs a parameter template"))?;
        let index = f.usize("sweep_index")?.unwrap_or(0);
        if index >= template.len() {
            return Err(invalid("sweep_index", "out of range for `lambdas`"));
        }
        let values = match (sweep_values, sweep_ranged) {
            (Some(_), Some(_)) => {
                return Err(invalid(
                    "sweep_values",
                    "give either values or a range, not both",
                ))
            }
            (Some(v), None) | (None, Some(v)) => v,
            (None, None) => return Err(invalid("sweep_range", "sweep mode needs values")),
        };
        if values.is_empty() {
            return Err(invalid("sweep_values", "empty sweep"));
        }
        let mode = Mode::Sweep {
            template,
            index,
            values,
        };
        for t in mode.tuples() {
            check_tuple("sweep_values", &t)?;
        }
        mode
    } else if let Some(l) = lambdas {
        if l.is_empty() {
            return Err(invalid("lambdas", "empty parameter list"));
        }
        check_tuple("lambdas", &l)?;
        Mode::Single(l)
    } else {
        Mode::Base
    };

    let verify = match (f.usize("verify_k")?, f.f64("verify_tol")?) {
        (None, None) => {
            if f.has("verify_perturbation") {
                return Err(invalid(
                    "verify_perturbation",
                    "requires verify_k and verify_tol",
                ));
            }
            None
        }
        (Some(k), Some(tol)) => {
            if k == 0 {
                return Err(invalid("verify_k", "must be at least 1"));
            }
            if !(tol >= 0.0) {
                return Err(invalid("verify_tol", "must be nonnegative"));
            }
            Some(VerifySpec {
                k,
                tol,
                perturbation: f.f64("verify_perturbation")?,
            })
        }
        (Some(_), None) => return Err(invalid("verify_tol", "required with verify_k")),
        (None, Some(_)) => return Err(invalid("verify_k", "required with verify_tol")),
    };

    let stride = f.usize("stride")?.unwrap_or(1);
    if stride == 0 {
        return Err(invalid("stride", "must be at least 1"));
    }
    let format = match f.string("format")? {
        None => Format::default(),
        Some(s) => s.parse().map_err(|e: String| invalid("format", e))?,
    };
    let output = f.string("output")?.map(PathBuf::from);

    Ok(RunConfig {
        problem,
        grid,
        kinetic_scale,
        mode,
        verify,
        stride,
        output,
        format,
    })
}

/// Built-in configurations `fig1` .. `fig5`: the two-parameter oscillator
/// family sweep (fig1, fig2) and fixed-x parameter meshes (fig3 .. fig5).
pub fn preset(name: &str) -> Option<&'static str> {
    match name {
        "fig1" => Some(include_str!("../presets/fig1.json")),
        "fig2" => Some(include_str!("../presets/fig2.json")),
        "fig3" => Some(include_str!("../presets/fig3.json")),
        "fig4" => Some(include_str!("../presets/fig4.json")),
        "fig5" => Some(include_str!("../presets/fig5.json")),
        _ => None,
    }
}

pub const PRESETS: &[&str] = &["fig1", "fig2", "fig3", "fig4", "fig5"];

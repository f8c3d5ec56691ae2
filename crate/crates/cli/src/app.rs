//! Command orchestration. Every command computes its outputs in memory as a
//! list of [`Artifact`]s; [`write_artifacts`] is the single writer.

use std::path::{Path, PathBuf};

use isospec::base::{harmonic_oscillator, numeric_ground_state, reflectionless_well};
use isospec::chain::NORMALIZATION_TOL;
use isospec::closed_form::{
    abraham_moses_limit_potential, admissible, closed_mode, closed_potential, kink_parameters,
    pursey_limit_potential,
};
use isospec::grid::make_grid;
use isospec::spectral::{compare_spectra, Scheme};
use isospec::sweep::{family, mode_surface};
use isospec::{BaseProblem, Execution, MaskedFunction, SampledFunction};
use serde_json::{json, Value};
use thiserror::Error;

use crate::config::{ConfigError, Format, GridSpec, Mode, Problem, RunConfig};
use crate::table::CsvTable;

#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid `{field}`: {reason}")]
    Validation { field: String, reason: String },
    #[error(transparent)]
    Library(#[from] isospec::Error),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl AppError {
    /// Process exit status: 1 validation, 2 verification, 3 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) | AppError::Validation { .. } | AppError::Library(_) => 1,
            AppError::Verification(_) => 2,
            AppError::Io { .. } => 3,
        }
    }
}

fn invalid(field: &str, reason: impl Into<String>) -> AppError {
    AppError::Validation {
        field: field.to_string(),
        reason: reason.into(),
    }
}

/// One output document. `path: None` means standard output.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub path: Option<PathBuf>,
    pub contents: Vec<u8>,
}

/// Artifacts plus an optional verification failure, reported after the
/// artifacts are written.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub failure: Option<String>,
}

impl From<Vec<Artifact>> for Outcome {
    fn from(artifacts: Vec<Artifact>) -> Self {
        Outcome {
            artifacts,
            failure: None,
        }
    }
}

pub fn write_artifacts(artifacts: &[Artifact]) -> Result<(), AppError> {
    use std::io::Write;
    for a in artifacts {
        match &a.path {
            Some(p) => std::fs::write(p, &a.contents).map_err(|source| AppError::Io {
                path: p.clone(),
                source,
            })?,
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(&a.contents)
                    .and_then(|_| out.flush())
                    .map_err(|source| AppError::Io {
                        path: PathBuf::from("<stdout>"),
                        source,
                    })?
            }
        }
    }
    Ok(())
}

/// Reads a two-column `x,V` CSV on a uniform grid. A non-numeric first row
/// is taken as a header; blank lines and `#` comments are skipped.
pub fn read_potential_csv(path: &Path) -> Result<SampledFunction, AppError> {
    let text = std::fs::read_to_string(path).map_err(|source| AppError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_potential_csv(&text)
}

pub fn parse_potential_csv(text: &str) -> Result<SampledFunction, AppError> {
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    let mut first = true;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = match fields.as_slice() {
            [a, b] => a.parse::<f64>().ok().zip(b.parse::<f64>().ok()),
            _ => None,
        };
        match parsed {
            Some((x, v)) if x.is_finite() && v.is_finite() => {
                xs.push(x);
                vs.push(v);
            }
            None if first => {}
            _ => {
                return Err(invalid(
                    "potential_file",
                    format!("line {}: expected two finite numbers `x,V`", lineno + 1),
                ))
            }
        }
        first = false;
    }
    if xs.len() < 3 {
        return Err(invalid("potential_file", "needs at least 3 samples"));
    }
    let n = xs.len();
    let (a, b) = (xs[0], xs[n - 1]);
    let grid = make_grid(a, b, n).map_err(|e| invalid("potential_file", e.to_string()))?;
    let h = grid.spacing();
    if let Some(k) = (0..n).find(|&k| (xs[k] - grid.point(k)).abs() > 1e-6 * h) {
        return Err(invalid(
            "potential_file",
            format!("sample {} at x = {} is off the uniform grid", k + 1, xs[k]),
        ));
    }
    Ok(SampledFunction::new(grid, vs)?)
}

pub fn load_problem(cfg: &RunConfig) -> Result<BaseProblem, AppError> {
    let grid = |g: GridSpec| make_grid(g.x_min, g.x_max, g.n);
    let bp = match (&cfg.problem, cfg.grid) {
        (Problem::HarmonicOscillator, Some(g)) => harmonic_oscillator(&grid(g)?)?,
        (Problem::Reflectionless, Some(g)) => reflectionless_well(&grid(g)?)?,
        (Problem::Numeric { path }, _) => {
            numeric_ground_state(&read_potential_csv(path)?, cfg.kinetic_scale)?
        }
        (_, None) => return Err(invalid("x_min", "grid missing")),
    };
    Ok(bp)
}

fn grid_meta(bp: &BaseProblem) -> Value {
    let g = bp.grid();
    json!({"x_min": g.x_min(), "x_max": g.x_max(), "n": g.len(), "spacing": g.spacing()})
}

fn base_meta(cfg: &RunConfig, bp: &BaseProblem) -> Value {
    json!({
        "problem": cfg.problem.name(),
        "grid": grid_meta(bp),
        "kinetic_scale": bp.kinetic_scale(),
        "energy_shift": bp.energy_shift(),
        "units": {
            "x": "length in natural units of the base problem (hbar = m = omega = 1 for the oscillator)",
            "V0": "energy, ground level shifted to zero",
            "V": "energy, same scale as V0",
            "v": "length^(-1/2), normalized so that the integral of v^2 is 1",
            "lambda": "dimensionless",
        },
    })
}

fn to_json(value: &Value) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("JSON values always serialize");
    bytes.push(b'\n');
    bytes
}

/// `<stem><suffix>.<ext>` next to `path`.
fn sibling(path: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}

fn strided(n: usize, stride: usize) -> impl Iterator<Item = usize> {
    (0..n).step_by(stride)
}

/// Rejects tuples whose effective parameter falls outside the intervals
/// allowed by the kink decomposition of this base problem.
fn check_admissible(bp: &BaseProblem, tuples: &[Vec<f64>]) -> Result<(), AppError> {
    let kink = kink_parameters(bp)?;
    for t in tuples {
        let c = isospec::closed_form::viete_coefficients(t)?;
        if let Some(le) = c.lambda_eff {
            if !admissible(le, &kink) {
                return Err(invalid(
                    "lambdas",
                    format!("tuple {t:?} has inadmissible effective parameter {le}"),
                ));
            }
        }
    }
    Ok(())
}

pub fn run_family(cfg: &RunConfig, exec: Execution) -> Result<Outcome, AppError> {
    let tuples = cfg.mode.tuples();
    if tuples.is_empty() {
        return Err(invalid("lambdas", "family needs `lambdas` or a sweep"));
    }
    let bp = load_problem(cfg)?;
    check_admissible(&bp, &tuples)?;
    let members = family(&bp, &tuples, exec)?;
    for m in &members {
        if (m.norm2 - 1.0).abs() > NORMALIZATION_TOL {
            return Err(AppError::Verification(format!(
                "zero mode for {:?} has norm^2 {} (tolerance {NORMALIZATION_TOL}); nothing written",
                m.lambdas, m.norm2
            )));
        }
    }

    let grid = bp.grid();
    let v0 = bp.potential().values();
    let rows: Vec<usize> = strided(grid.len(), cfg.stride).collect();
    let lambda_eff =
        |m: &isospec::sweep::FamilyMember| m.coefficients.lambda_eff.unwrap_or(f64::INFINITY);

    let mut meta = base_meta(cfg, &bp);
    meta["stride"] = json!(cfg.stride);
    meta["members"] = Value::Array(
        members
            .iter()
            .map(|m| {
                json!({
                    "lambdas": m.lambdas,
                    "c1": m.coefficients.c1,
                    "c2": m.coefficients.c2,
                    "lambda_eff": m.coefficients.lambda_eff,
                    "norm2": m.norm2,
                })
            })
            .collect(),
    );

    let artifacts = match cfg.format {
        Format::Csv => {
            let mut table = CsvTable::new(&["x", "V0", "V", "v", "lambda_eff"]);
            for m in &members {
                let le = lambda_eff(m);
                for &k in &rows {
                    table.push(&[grid.point(k), v0[k], m.potential.at(k), m.mode.at(k), le]);
                }
            }
            let mut out = vec![Artifact {
                path: cfg.output.clone(),
                contents: table.into_bytes(),
            }];
            if let Some(p) = &cfg.output {
                out.push(Artifact {
                    path: Some(sibling(p, ".meta", "json")),
                    contents: to_json(&meta),
                });
            }
            out
        }
        Format::Json => {
            let x: Vec<f64> = rows.iter().map(|&k| grid.point(k)).collect();
            let pick = |f: &SampledFunction| rows.iter().map(|&k| f.at(k)).collect::<Vec<_>>();
            let doc = json!({
                "meta": meta,
                "x": x,
                "V0": pick(bp.potential()),
                "members": members.iter().map(|m| json!({
                    "lambdas": m.lambdas,
                    "lambda_eff": m.coefficients.lambda_eff,
                    "V": pick(&m.potential),
                    "v": pick(&m.mode),
                })).collect::<Vec<_>>(),
            });
            vec![Artifact {
                path: cfg.output.clone(),
                contents: to_json(&doc),
            }]
        }
    };
    Ok(artifacts.into())
}

pub fn run_sweep2d(cfg: &RunConfig, exec: Execution) -> Result<Outcome, AppError> {
    let Mode::Sweep2d {
        lambda1,
        lambda2,
        fixed_x,
    } = &cfg.mode
    else {
        return Err(invalid(
            "sweep2d_lambda1",
            "sweep2d needs a parameter mesh and `fixed_x`",
        ));
    };
    let bp = load_problem(cfg)?;
    let grid = bp.grid().clone();
    let mesh: Vec<Vec<f64>> = lambda1
        .iter()
        .flat_map(|&a| lambda2.iter().map(move |&b| vec![a, b]))
        .collect();
    check_admissible(&bp, &mesh)?;
    let mut indices = Vec::with_capacity(fixed_x.len());
    for &x in fixed_x {
        if !grid.contains(x) {
            return Err(invalid("fixed_x", format!("{x} lies outside the grid")));
        }
        let k = grid
            .node_index(x)
            .ok_or_else(|| invalid("fixed_x", format!("{x} is not a grid node")))?;
        indices.push(k);
    }
    if cfg.format == Format::Csv && fixed_x.len() > 1 && cfg.output.is_none() {
        return Err(invalid("output", "several CSV tables need an output path"));
    }

    let mut tables = Vec::with_capacity(fixed_x.len());
    for (&x, &k) in fixed_x.iter().zip(&indices) {
        tables.push((x, k, mode_surface(&bp, lambda1, lambda2, k, exec)?));
    }
    let mut meta = base_meta(cfg, &bp);
    meta["lambda1"] = json!(lambda1);
    meta["lambda2"] = json!(lambda2);

    let artifacts = match cfg.format {
        Format::Csv => {
            let mut out = Vec::new();
            for (x, k, points) in &tables {
                let mut table = CsvTable::new(&["lambda1", "lambda2", "v_at_x"]);
                for p in points {
                    table.push(&[p.lambda1, p.lambda2, p.value]);
                }
                let path = match &cfg.output {
                    Some(p) if tables.len() > 1 => Some(sibling(
                        p,
                        &format!(".x{}", crate::table::format_number(*x)),
                        "csv",
                    )),
                    other => other.clone(),
                };
                let meta_path = path.as_ref().map(|p| sibling(p, ".meta", "json"));
                out.push(Artifact {
                    path,
                    contents: table.into_bytes(),
                });
                if let Some(mp) = meta_path {
                    let mut m = meta.clone();
                    m["fixed_x"] = json!(x);
                    m["node_index"] = json!(k);
                    out.push(Artifact {
                        path: Some(mp),
                        contents: to_json(&m),
                    });
                }
            }
            out
        }
        Format::Json => {
            let doc = json!({
                "meta": meta,
                "tables": tables.iter().map(|(x, k, points)| json!({
                    "fixed_x": x,
                    "node_index": k,
                    "points": points.iter().map(|p| json!({
                        "lambda1": p.lambda1,
                        "lambda2": p.lambda2,
                        "v_at_x": p.value,
                    })).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            });
            vec![Artifact {
                path: cfg.output.clone(),
                contents: to_json(&doc),
            }]
        }
    };
    Ok(artifacts.into())
}

/// Spectral comparison for every configured parameter tuple. The report is
/// always JSON and is written even when the check fails.
pub fn run_verify(cfg: &RunConfig) -> Result<Outcome, AppError> {
    let spec = cfg
        .verify
        .ok_or_else(|| invalid("verify_k", "verify needs `verify_k` and `verify_tol`"))?;
    let tuples = cfg.mode.tuples();
    if tuples.is_empty() {
        return Err(invalid("lambdas", "verify needs `lambdas` or a sweep"));
    }
    let bp = load_problem(cfg)?;
    check_admissible(&bp, &tuples)?;
    let mut reports = Vec::with_capacity(tuples.len());
    for t in &tuples {
        let mut potential = closed_potential(&bp, t)?;
        if let Some(a) = spec.perturbation {
            let bump = bp.grid().sample(|x| a * (-x * x).exp())?;
            potential = potential.zip_with(&bump, |v, b| v + b)?;
        }
        let mode = closed_mode(&bp, t)?;
        reports.push(compare_spectra(
            &bp,
            &potential,
            &mode,
            t,
            spec.k,
            spec.tol,
            Scheme::Numerov,
        )?);
    }
    let passed = reports.iter().all(|r| r.passed);
    let mut meta = base_meta(cfg, &bp);
    meta["perturbation"] = json!(spec.perturbation);
    let doc = json!({"meta": meta, "passed": passed, "reports": reports});
    let failure = (!passed).then(|| {
        let worst = reports
            .iter()
            .filter(|r| !r.passed)
            .map(|r| {
                format!(
                    "{:?}: max |dE| = {:e} > {:e}",
                    r.parameters, r.max_abs_diff, r.tol
                )
            })
            .collect::<Vec<_>>()
            .join("; ");
        format!("spectra differ ({worst})")
    });
    Ok(Outcome {
        artifacts: vec![Artifact {
            path: cfg.output.clone(),
            contents: to_json(&doc),
        }],
        failure,
    })
}

fn limit_table(bp: &BaseProblem, limit: &MaskedFunction, stride: usize) -> CsvTable {
    let grid = bp.grid();
    let mut table = CsvTable::new(&["x", "V0", "V_limit", "mask"]);
    for k in strided(grid.len(), stride) {
        let (value, flag) = if limit.mask[k] {
            (limit.function.at(k), 1.0)
        } else {
            (f64::NAN, 0.0)
        };
        table.push(&[grid.point(k), bp.potential().at(k), value, flag]);
    }
    table
}

/// Pursey (`λ → 0⁺`) and Abraham-Moses (`λ → -1⁻`) endpoint potentials.
pub fn run_limits(cfg: &RunConfig) -> Result<Outcome, AppError> {
    let bp = load_problem(cfg)?;
    let pursey = pursey_limit_potential(&bp)?;
    let am = abraham_moses_limit_potential(&bp)?;
    let mut meta = base_meta(cfg, &bp);
    meta["stride"] = json!(cfg.stride);
    meta["mask_floor"] = json!(isospec::closed_form::LIMIT_MASK_FLOOR);
    meta["tables"] = json!({
        "pursey": "lambda_eff -> 0+ endpoint, masked where the running integral of u0^2 is below mask_floor",
        "abraham_moses": "lambda_eff -> -1- endpoint, masked where the tail integral of u0^2 is below mask_floor",
    });
    let artifacts = match cfg.format {
        Format::Csv => {
            let path = cfg.output.as_ref().ok_or_else(|| {
                invalid(
                    "output",
                    "limits writes two CSV tables and needs an output path",
                )
            })?;
            vec![
                Artifact {
                    path: Some(sibling(path, ".pursey", "csv")),
                    contents: limit_table(&bp, &pursey, cfg.stride).into_bytes(),
                },
                Artifact {
                    path: Some(sibling(path, ".abraham_moses", "csv")),
                    contents: limit_table(&bp, &am, cfg.stride).into_bytes(),
                },
                Artifact {
                    path: Some(sibling(path, ".meta", "json")),
                    contents: to_json(&meta),
                },
            ]
        }
        Format::Json => {
            let rows: Vec<usize> = strided(bp.grid().len(), cfg.stride).collect();
            let column = |f: &MaskedFunction| {
                rows.iter()
                    .map(|&k| {
                        if f.mask[k] {
                            json!(f.function.at(k))
                        } else {
                            Value::Null
                        }
                    })
                    .collect::<Vec<_>>()
            };
            let doc = json!({
                "meta": meta,
                "x": rows.iter().map(|&k| bp.grid().point(k)).collect::<Vec<_>>(),
                "V0": rows.iter().map(|&k| bp.potential().at(k)).collect::<Vec<_>>(),
                "pursey": column(&pursey),
                "abraham_moses": column(&am),
            });
            vec![Artifact {
                path: cfg.output.clone(),
                contents: to_json(&doc),
            }]
        }
    };
    Ok(artifacts.into())
}

/// Built-in base problems.
pub fn catalog(format: Format, output: Option<PathBuf>) -> Artifact {
    let entries = [
        (
            "harmonic_oscillator",
            "V0 = x^2/2 - 1/2, u0 = pi^(-1/4) exp(-x^2/2)",
            0.5,
            "[-10, 10], n = 4001",
        ),
        (
            "reflectionless",
            "V0 = 1 - 2 sech^2 x, u0 = sech(x)/sqrt(2)",
            1.0,
            "[-12, 12], n = 4801",
        ),
        (
            "numeric",
            "V from a two-column CSV `x,V` (key `potential_file`); ground state found numerically",
            0.5,
            "taken from the file",
        ),
    ];
    let contents = match format {
        Format::Csv => {
            let mut s = String::new();
            for (name, desc, kappa, grid) in entries {
                s.push_str(&format!("{name}\n  {desc}\n  kinetic_scale = {kappa}\n  default grid {grid}\n"));
            }
            s.into_bytes()
        }
        Format::Json => to_json(&Value::Array(
            entries
                .iter()
                .map(|(name, desc, kappa, grid)| {
                    json!({"name": name, "description": desc, "kinetic_scale": kappa, "default_grid": grid})
                })
                .collect(),
        )),
    };
    Artifact {
        path: output,
        contents,
    }
}

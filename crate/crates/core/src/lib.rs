//! Multi-parameter families of strictly isospectral one-dimensional
//! Schrödinger potentials.
//!
//! Starting from a potential `V₀` whose ground level sits at zero energy and
//! its normalized ground state `u₀`, repeated double Darboux transformations
//! with parameters `λ₁ … λᵢ ∉ [-1, 0]` produce deformed potentials with the
//! same spectrum and their normalized zero modes. The crate builds these
//! both step by step ([`chain`]) and through their closed forms
//! ([`closed_form`]), and certifies the spectra with a finite-difference
//! eigensolver ([`spectral`]).
//!
//! ```
//! use isospec::{base, closed_form, grid};
//!
//! let g = grid::make_grid(-10.0, 10.0, 2001).unwrap();
//! let bp = base::harmonic_oscillator(&g).unwrap();
//! let v = closed_form::closed_mode(&bp, &[0.1, 0.2]).unwrap();
//! let norm = grid::total_integral(&v.square());
//! assert!((norm - 1.0).abs() < 1e-6);
//! ```

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod base;
pub mod chain;
pub mod closed_form;
pub mod error;
pub mod exec;
pub mod grid;
pub mod spectral;
pub mod sweep;

pub use base::BaseProblem;
pub use chain::{ChainResult, ParamChain};
pub use closed_form::{KinkDecomposition, VieteCoefficients};
pub use error::{Error, Result};
pub use exec::Execution;
pub use grid::{Grid, MaskedFunction, SampledFunction};
pub use spectral::{Scheme, SpectralReport, TridiagonalHamiltonian};

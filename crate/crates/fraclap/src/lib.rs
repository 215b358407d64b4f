//! One-dimensional fractional Laplacian toolkit.
//!
//! The fractional Laplacian `(-Δ)^{α/2}`, `0 < α < 2`, is discretized here
//! through its singular-integral representation: the singularity is absorbed
//! into a rescaled second difference, while the tail is integrated exactly
//! against piecewise linear (tent) or piecewise quadratic interpolants of the
//! sampled function. The result is a discrete convolution with positive
//! weights that decay like `j^{-1-α}`.
//!
//! Module map:
//!
//! - [`special`]: scalar Γ and Gauss ₂F₁ used by weights and exact solutions.
//! - [`kernel`]: convolution weights, their closed-form sums and one-sided
//!   boundary weights at truncation.
//! - [`grid`]: uniform symmetric grids, grid functions and far-field models.
//! - [`operator`]: truncated operator with analytic far-field corrections,
//!   FFT fast path, and a midpoint-rule comparison scheme.
//! - [`exact`]: catalog of closed-form `(u, (-Δ)^{α/2} u)` pairs.
//! - [`solve`]: extended Dirichlet solver and monotone obstacle iteration.
//! - [`harness`]: convergence sweeps, rate fitting and CSV reports.
//! - [`props`]: the machine-checkable property suite.
//! - [`quad`]: adaptive quadrature used as an independent oracle.
//! - [`io`]: CSV/config/plot-script text formats of the CLI.
//!
//! ```
//! use fraclap::{FarField, Grid, GridFn, InterpOrder, Kernel, KernelParams};
//! use fraclap::operator::{apply_full, default_m};
//!
//! // (-Δ)^{α/2} e^{-x²} at x = 0 for α = 1 is 2/√π ≈ 1.12838.
//! let grid = Grid::symmetric(10.0, 0.05)?;
//! let u = GridFn::sample(grid, |x| (-x * x).exp())?;
//! let m = default_m(&grid, InterpOrder::Quad);
//! let kernel = Kernel::new(KernelParams::new(1.0, 0.05, InterpOrder::Quad, m)?)?;
//! let lu = apply_full(&kernel, &u, &FarField::Zero)?;
//! let at_zero = lu.values()[grid.center()];
//! assert!((at_zero - 1.1283791670955126).abs() < 1e-4);
//! # Ok::<(), fraclap::Error>(())
//! ```

pub mod exact;
pub mod grid;
pub mod harness;
pub mod io;
pub mod kernel;
pub mod operator;
pub mod props;
pub mod quad;
pub mod solve;
pub mod special;

mod util;

pub use grid::{FarField, Grid, GridFn, TailRule};
pub use kernel::{InterpOrder, Kernel, KernelParams};

use thiserror::Error;

/// Errors shared across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside a function's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Evaluation at a pole (Γ at non-positive integers, ₂F₁ parameter poles).
    #[error("pole: {0}")]
    Pole(String),
    /// A series or iteration exceeded its term/iteration cap before meeting
    /// its tolerance.
    #[error("did not converge: {0}")]
    NonConvergence(String),
    /// Structural mismatch between objects that must share parameters.
    #[error("mismatch: {0}")]
    Mismatch(String),
    /// A linear system violated the strict diagonal dominance contract.
    #[error("singular system: {0}")]
    Singular(String),
    /// Not enough data for a fit or estimate.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    /// Malformed text input (CSV table or config file).
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Caps the worker pool used by the parallel sweeps. Takes effect only if no
/// parallel work has run yet; returns whether the pool was configured.
pub fn set_threads(n: usize) -> bool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .is_ok()
}

//! Toolkit for verifying and generating self-dual Yang-Mills (SDYM) fields on
//! conformally Kahler Riemannian 4-manifolds in double-null coordinates.
//!
//! Coordinates are `(z, w, zt, wt)`, treated as four independent complex
//! variables. On the real (Euclidean) slice `zt = conj(z)`, `wt = conj(w)`,
//! and a point is parametrized by real coordinates `(x1, x2, x3, x4)` with
//! `z = x1 + i x2`, `w = x3 + i x4`. Wirtinger derivatives follow:
//! `d/dz = (d/dx1 - i d/dx2)/2` and `d/dzt = (d/dx1 + i d/dx2)/2`.
//!
//! Modules:
//! - [`expr`]: small symbolic expression language (parsing, Wirtinger
//!   differentiation, evaluation).
//! - [`field`]: scalar and matrix fields with analytic and sampled backends,
//!   grids, norms and serialization.
//! - [`geometry`]: Hermitian metrics, differential forms, Hodge star, Lee
//!   form, the auxiliary first-order scalar, curvature diagnostics.
//! - [`gauge`]: gauge potentials, curvature, SDYM residuals, Yang and
//!   K-matrix formulations, Chern density.
//! - [`backlund`]: block splitting and the Backlund transform, including the
//!   grid least-squares primitive integration and the obstruction probe.
//! - [`heavenly`]: second heavenly equation residual and its K-matrix chain.
//! - [`catalog`]: curated metric entries (flat, conformally flat,
//!   Eguchi-Hanson, Burns, Fubini-Study) plus seed Yang-matrix families.
//! - [`report`]: deterministic JSON reports.
//! - [`cli`]: command-line entry points.

pub mod expr;
pub mod field;
pub mod geometry;
pub mod gauge;
pub mod backlund;
pub mod heavenly;
pub mod catalog;
pub mod report;
pub mod cli;

pub use num_complex::Complex64;

/// Frozen tolerance constants used across tests and CLI verdicts.
pub mod tol {
    /// Generic residual tolerance for analytic (exact-derivative) pipelines.
    pub const ANALYTIC: f64 = 1e-8;
    /// Tight tolerance for identities that hold to rounding error.
    pub const EXACT: f64 = 1e-10;
    /// Constant `C` in the sampled-backend tolerance `C * h^4 * scale`.
    pub const SAMPLED_C: f64 = 50.0;
    /// Relative stopping tolerance for the grid least-squares solver.
    pub const SOLVER: f64 = 1e-10;
    /// Frozen lower bound for the obstruction residual on Fubini-Study
    /// (calibrated once against the catalog chart and grid defaults).
    pub const OBSTRUCTION_LOWER: f64 = 1e-2;

    /// Pass threshold for a sampled-backend residual with grid spacing `h`
    /// and field scale `scale`.
    pub fn sampled(h: f64, scale: f64) -> f64 {
        SAMPLED_C * h.powi(4) * scale.max(1.0)
    }

    /// Pass threshold for a transformed Yang matrix produced by the grid
    /// solver: whichever dominates between solver and discretization error.
    pub fn backlund(h: f64, scale: f64) -> f64 {
        (10.0 * SOLVER).max(sampled(h, scale))
    }
}

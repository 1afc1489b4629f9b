//! Scalar and matrix fields over chart boxes, with analytic (exact symbolic
//! derivative) and sampled (fourth-order finite-difference) backends.

mod grid;
mod matrix;
mod sampled;
mod scalar;
pub mod serialize;

pub use grid::{sample_lattice, ChartBox, Exclusion, Grid, GridSpec, Point};
pub use matrix::MatrixField;
pub use sampled::SampledScalar;
pub use scalar::{ClosureField, ClosureFn, ScalarField};

use num_complex::Complex64;

pub type C = Complex64;

#[derive(Debug, thiserror::Error)]
pub enum FieldError {
    #[error(transparent)]
    Eval(#[from] crate::expr::EvalError),
    #[error("grid mismatch between sampled operands")]
    GridMismatch,
    #[error("derivative unavailable for this field (no stored derivative closure)")]
    NoDerivative,
    #[error("dimension mismatch: {0}")]
    Dim(String),
    #[error("singular matrix at point ({0:?})")]
    SingularMatrix([f64; 4]),
    #[error("grid spec invalid: {0}")]
    BadGrid(String),
    #[error("no interior points remain after applying margin {0}")]
    EmptyInterior(usize),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad file format: {0}")]
    Format(String),
    #[error("incompatible right-hand sides: compatibility residual {0:.3e} exceeds tolerance")]
    Incompatible(f64),
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, FieldError>;

/// Deterministic sum: fixed-size sequential blocks combined in index order,
/// independent of thread count. Used anywhere a parallel reduction feeds a
/// reported number.
pub fn det_sum(values: &[f64]) -> f64 {
    use rayon::prelude::*;
    const BLOCK: usize = 4096;
    let partials: Vec<f64> = values
        .par_chunks(BLOCK)
        .map(|chunk| chunk.iter().sum::<f64>())
        .collect();
    partials.iter().sum()
}

/// Deterministic complex dot product `conj(a) . b` (blocked like [`det_sum`]).
pub fn det_dot(a: &[C], b: &[C]) -> C {
    use rayon::prelude::*;
    const BLOCK: usize = 4096;
    assert_eq!(a.len(), b.len());
    let partials: Vec<C> = a
        .par_chunks(BLOCK)
        .zip(b.par_chunks(BLOCK))
        .map(|(ca, cb)| {
            ca.iter()
                .zip(cb.iter())
                .map(|(x, y)| x.conj() * y)
                .sum::<C>()
        })
        .collect();
    partials.iter().sum()
}

#[cfg(test)]
mod tests;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while evaluating a quantity of the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error("quadrature did not converge: best estimate {value:e}, error bound {error:e}")]
    NonConvergence { value: f64, error: f64 },

    /// The Jacobi sweep limit was reached with a non-negligible off-diagonal part.
    #[error("symmetric eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("matrix is not positive definite: pivot {pivot} is {value:e}")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("grid too coarse: spacing {spacing:e} exceeds {required:e}")]
    GridTooCoarse { spacing: f64, required: f64 },

    #[error("extended precision exhausted: only {surviving_digits:.1} significant digits survive")]
    PrecisionExhausted { surviving_digits: f64 },

    #[error("bracket inversion for eigenvalue {n}: lower {lower} > upper {upper}")]
    BracketInversion { n: usize, lower: f64, upper: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

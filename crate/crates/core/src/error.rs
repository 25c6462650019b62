use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A plane wave was requested outside the momentum grid.
    #[error("momentum {n0} lies outside the grid of half-width {n_max}")]
    Grid { n0: i64, n_max: usize },

    /// Probability reached the edge of the momentum grid.
    #[error(
        "truncation: edge occupation {edge:.3e} after kick {kick} exceeds the leakage \
         threshold (half-width {n_max}); enlarge n_max and rerun"
    )]
    Truncation {
        kick: usize,
        edge: f64,
        n_max: usize,
    },

    /// A quadrature failed its resolution or convergence check.
    #[error("accuracy error: {0}")]
    Accuracy(String),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Error type shared by all modules.

use alloc::string::String;
use alloc::vec::Vec;

/// Everything that can go wrong in the core crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Matrix list has the wrong number or shape of matrices.
    #[error("shape error: {0}")]
    Shape(String),
    /// Some `B^β` is not exactly skew-symmetric.
    #[error("B^{beta} is not skew-symmetric at ({row},{col})")]
    NotSkewSymmetric {
        /// Matrix index.
        beta: usize,
        /// Row of the offending entry.
        row: usize,
        /// Column of the offending entry.
        col: usize,
    },
    /// `B^τ` is (numerically) singular at the reported unit `τ`.
    #[error("degenerate: sigma_min(B^tau) = {sigma_min:e} below threshold at tau = {tau:?}")]
    Degenerate {
        /// The sampled direction.
        tau: Vec<f64>,
        /// Smallest singular value found there.
        sigma_min: f64,
    },
    /// Dimension limits `n ≤ 16`, `r ≤ 4` exceeded, or `n`/`r` zero.
    #[error("unsupported dimensions n={n}, r={r}")]
    Dimensions {
        /// Half horizontal dimension.
        n: usize,
        /// Centre dimension.
        r: usize,
    },
    /// Vector lengths do not match the group.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch {
        /// Expected length.
        expected: usize,
        /// Supplied length.
        got: usize,
    },
    /// Dilation factor must be positive.
    #[error("dilation factor must be positive, got {0}")]
    NonPositiveLambda(f64),
    /// `τ = 0`.
    #[error("tau is zero")]
    ZeroTau,
    /// `B^τ` singular for this particular `τ`.
    #[error("B^tau degenerate at this tau (sigma_min = {0:e})")]
    DegenerateTau(f64),
    /// The spectrum of `(B^z)ᵗB^z` is not enclosed by the functional-calculus contour.
    #[error("spectrum escaped the contour (projector defect {0:e}); reduce epsilon")]
    SpectrumEscapedContour(f64),
    /// Laguerre degree is negative.
    #[error("negative degree")]
    NegativeDegree,
    /// Laguerre argument is negative.
    #[error("negative argument {0}")]
    NegativeArgument(f64),
    /// Degree above the configured cap.
    #[error("degree {m} above cap {cap}")]
    DegreeCap {
        /// Requested degree.
        m: usize,
        /// Cap.
        cap: usize,
    },
    /// `y = 0` where the representation needs `y ≠ 0`.
    #[error("y = 0: use the continued representation")]
    YZero,
    /// `(y, t) = (0, 0)`.
    #[error("kernel is singular at the origin")]
    OriginPoint,
    /// Quadrature refinement did not settle.
    #[error("quadrature not converged (relative discrepancy {0:e})")]
    QuadratureNotConverged(f64),
    /// Abel parameter outside `[0, 1)`.
    #[error("R = {0} not in [0, 1)")]
    RNotInRange(f64),
    /// Bad configuration value.
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Result alias.
pub type Result<T> = core::result::Result<T, Error>;

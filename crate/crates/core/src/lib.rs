//! Spectral projection kernels of the sub-Laplacian on non-degenerate
//! nilpotent Lie groups of step two.
//!
//! The group is `ℝ^{2n} × ℝ^r` with product
//! `(x,t)(y,s) = (x+y, t+s+2B(x,y))` for a skew-symmetric bilinear map `B`.
//! This crate evaluates everything that lives on a single point or a single
//! frequency `τ ∈ ℝ^r`:
//!
//! * [`group`]: validation, group law, dilations, homogeneous norm;
//! * [`tau`]: the spectral package of `B^τ` and its holomorphic extension;
//! * [`laguerre`]: Laguerre functions and the fibre kernels `Q_m(y, τ)`;
//! * [`quadrature`]: Gauss rules and sphere rules;
//! * [`kernels`]: the projection kernels `P_m(y, t)` in three independent
//!   representations, the Abel-summed kernel and kernel statistics.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![forbid(unsafe_code)]
#![warn(missing_docs)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod group;
pub mod kernels;
pub mod laguerre;
pub mod linalg;
pub mod quadrature;
pub mod tau;

/// Re-exported so downstream crates use the same matrix type.
pub use nalgebra;

pub use error::{Error, Result};
pub use group::{GroupDescriptor, GroupPoint};
pub use kernels::{KernelConfig, KernelEvaluator};
pub use laguerre::MultiIndex;
pub use quadrature::SphereRule;
pub use tau::{ComplexTauMatrix, TauSpectrum};

/// Complex double used throughout.
pub type C64 = num_complex::Complex<f64>;

//! Grid machinery, file formats, verification suite and command-line front
//! end for the projection kernels of `nilproj-core`.
//!
//! * [`grid`]: sampling grids and the partial Fourier transform in `t`;
//! * [`engine`]: twisted convolution, `ℙ_m` and Abel reconstruction;
//! * [`config`]: the JSON run configuration;
//! * [`io`]: points/kernel CSV, slice CSV and the binary sample container;
//! * [`suite`]: the verification checks and their JSON report.

#![forbid(unsafe_code)]
#![warn(missing_docs)]

pub mod config;
pub mod engine;
pub mod error;
pub mod grid;
pub mod io;
pub mod suite;

pub use error::{Error, Result};
pub use nilproj_core;

//! Stationary symmetric α-stable processes through their flow representations.
//!
//! A process `X(t) = ∫_E f_t(x) M(dx)` is described by a [`KernelSpec`]: a
//! control measure space, a nonsingular flow, a ±1 cocycle and a base
//! function. On top of that the crate offers positive/null and
//! conservative/dissipative classification, the three-way decomposition,
//! series and sub-Gaussian path simulation, and ergodicity and maxima
//! diagnostics.

pub mod catalog;
pub mod classify;
pub mod diagnostics;
pub mod error;
pub mod flows;
pub mod kernels;
pub mod linalg;
pub mod paths;
pub mod quadrature;
pub mod rng;
pub mod simulate;
pub mod spaces;
pub mod stable;
pub mod stats;

pub use error::{Error, Result};
pub use flows::{Cocycle, Flow, FlowClass, Point, TimeDomain};
pub use kernels::{eval_kernel, kernel_norm, scale_of_combination, support_fraction, KernelSpec};
pub use rng::RngStream;
pub use spaces::MeasureSpace;
pub use stable::{sample_positive_stable, sample_sas, StabilityIndex, StableScale};

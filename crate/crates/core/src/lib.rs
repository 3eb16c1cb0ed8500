//! Generalized group testing with monotone stochastic test functions.
//!
//! A test on a pool containing `x` defective items comes back positive with
//! probability `f(x)`, where `f` is non-decreasing on `{0, ..., d}`. The crate
//! computes the parameters of a Bernoulli test design for a given `f`,
//! generates test matrices and outcomes, decodes with a per-item threshold
//! rule, estimates an unknown `d` adaptively, and runs Monte Carlo
//! experiments over all of it.

pub mod codec;
pub mod design;
pub mod error;
pub mod estimate;
pub mod numerics;
#[doc(hidden)]
pub mod oracles;
pub mod rng;
pub mod sim;
pub mod test_functions;

pub use codec::{decode, simulate_outcomes, DecodeResult, Outcomes, TestMatrix};
pub use design::{
    bounds_report, concentration_h, design_point, optimize_q, sensitivity_h, BoundsReport,
    DesignPoint, Objective,
};
pub use error::{Error, Result};
pub use estimate::{estimate_d, EstimateResult, PoolTester};
pub use test_functions::{Family, NoiseClass, TestFunction};

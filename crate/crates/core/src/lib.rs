//! Large-deviation rate functions for the extreme eigenvalues of sample
//! covariance matrices `W = (1/n) C Cᵀ`, Monte Carlo and exact-enumeration
//! estimates of the matching tail probabilities, and the soft-decision
//! parallel interference cancellation (SD-PIC) decoder whose bit errors are
//! governed by those eigenvalues.

pub mod dist;
pub mod error;
pub mod linalg;
pub mod mclab;
pub mod rate;
pub mod rng;
pub mod sdpic;
pub mod stats;

pub use dist::EntryDistribution;
pub use error::{Error, Result};
pub use linalg::{mp_edges, CovMatrix, SampleMatrix, Spectrum, UnitVector};

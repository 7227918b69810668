//! Uplink multi-cell massive MIMO with matched-filter receivers, comparing
//! independent per-cell orthogonal pilots (DOP) against full pilot reuse (FPR).
//!
//! The crate covers the finite-size Monte-Carlo chain (layout, pilots,
//! training, MMSE estimation, empirical SINR), the large-system SINR limits,
//! the user-capacity solvers under power control, and the experiment drivers
//! that tie them together.

// `!(x > 0.0)` style checks are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod capacity;
pub mod config;
pub mod experiments;
pub mod geometry;
pub mod randmat;
pub mod rng;
pub mod training;
pub mod uplink;

mod error;
mod par;

pub use error::{Error, Result};

pub use asymptotics::{MomentMode, MomentSet, Sinr, SinrLimit};
pub use capacity::CapacityQuery;
pub use config::{PilotScheme, PowerMode, SystemConfig};
pub use geometry::Deployment;
pub use randmat::{ChannelRealization, PilotSet};
pub use training::EstimateSet;
pub use uplink::SinrSample;

/// Complex baseband sample.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix, column-major.
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

/// Power ratio to decibels.
pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Decibels to a linear power ratio.
pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

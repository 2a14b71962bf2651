//! Degrees-of-freedom regions and transmission-scheme simulation for the
//! K-user MISO broadcast channel under i.i.d. time-varying jamming.

pub mod baseband;
pub mod cli;
pub mod config;
pub mod error;
pub mod estimator;
pub mod jamming;
pub mod math;
pub mod region;
pub mod rng;
pub mod scheme;

pub use config::Config;
pub use error::{Error, Result};
pub use jamming::{JammerDistribution, JammerState, StateSequence};
pub use region::{DofPoint, DofRegion, HalfSpace};

//! Outage analysis and sub-carrier / power allocation for mixed UE and UAV
//! cellular downlinks.

pub mod channel;
pub mod config;
pub mod error;
pub mod outage;
pub mod scenario;

pub use config::SimConfig;
pub use error::{Error, Result};
pub mod power;
pub mod assignment;
pub mod matching;
pub mod coalition;
pub mod baselines;
pub mod experiments;

//! Link-level modelling, statistical passive beamforming and ergodic-rate
//! analysis for a MISO downlink assisted by one or more intelligent
//! reflecting surfaces (IRSs).
//!
//! The pipeline is:
//!
//! 1. [`scenario`] turns a [`SystemConfig`] and a deployment geometry into
//!    deterministic [`ChannelStatistics`] (LoS matrices, Rician weights,
//!    spatial correlation).
//! 2. [`analysis`] folds those statistics into the numerator/denominator
//!    matrices of the closed-form rate approximation and evaluates the
//!    special-case closed forms.
//! 3. [`beamforming`] designs the IRS reflection vector from statistics only
//!    (generalized-eigenvector solve plus phase extraction), along with the
//!    random and single-antenna optimal baselines.
//! 4. [`channel`], [`estimation`] and [`simulator`] sample fading and CSI
//!    errors and estimate the exact ergodic rate by Monte Carlo.
//! 5. [`harness`] runs sweeps and writes the CSV consumed by plotting tools.

pub mod analysis;
pub mod beamforming;
pub mod channel;
pub mod config;
pub mod error;
pub mod estimation;
pub mod harness;
pub mod linalg;
pub mod rng;
pub mod scenario;
pub mod simulator;

pub use analysis::{StatMatrices, DenominatorModel};
pub use beamforming::ReflectionVector;
pub use channel::ChannelRealization;
pub use config::SystemConfig;
pub use error::{Error, Result};
pub use estimation::CsiEstimates;
pub use harness::{Method, RateReport};
pub use scenario::{ChannelStatistics, DeploymentGeometry, KFactor};
pub use simulator::McEstimate;

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

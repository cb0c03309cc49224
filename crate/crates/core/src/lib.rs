//! Evolutionary multi-objective optimization under decision-space noise.
//!
//! The crate provides two test-landscape families (multi-sphere and the
//! diffraction grating) with closed-form perceived-fitness moments, the
//! elitist (1+1)-CMA kernel, three optimizers (MO-CMA-ES with parental
//! re-evaluation schemes, SMS-EMOA and NSGA-II), quality indicators, and the
//! post-hoc analysis used to study how noisy archives relate to their
//! noise-free counterparts.

pub mod acceptance;
pub mod cma_kernel;
pub mod error;
pub mod indicators;
pub mod landscapes;
pub mod objective;
pub mod optimizers;
pub mod oracles;
pub mod posthoc;
pub mod rng;

pub use error::{Error, Result};
pub use objective::{ObjectiveVector, Sense, Senses};
pub use rng::RandomStream;

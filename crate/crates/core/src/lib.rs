//! Simulation of a true random number generator built on photon-number
//! detection of weak laser pulses.
//!
//! The pipeline is: a pulsed laser with Poissonian photon statistics
//! ([`source`]), a gated Geiger-mode avalanche photodiode with dark counts,
//! afterpulsing and dead time ([`detector`]), pair coding with von Neumann
//! scan-and-discard ([`extractor`]), and a statistical battery for the output
//! ([`randtest`]). [`theory`] holds the closed-form probability model the
//! simulation is checked against.

pub mod bits;
pub mod config;
pub mod detector;
mod error;
pub mod extractor;
pub mod formats;
pub mod pipeline;
pub mod randtest;
pub mod rng;
pub mod source;
pub mod special;
pub mod theory;

pub use bits::BitStream;
pub use config::{parse_count, OutputFormat, RunConfig};
pub use detector::{DetectorConfig, DetectorState, GateRecord};
pub use error::{Error, Result};
pub use extractor::{ExtractionStats, PairingMode};
pub use rng::RandomStream;
pub use source::SourceConfig;
pub use theory::EffectiveMean;

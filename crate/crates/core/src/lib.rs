//! Universal lossy coding for one encoder broadcasting to `J` decoders with
//! side information.
//!
//! The system is fixed by a known memoryless channel `W` from the source
//! letter to every decoder's side information and target, plus per-decoder
//! distortion measures. The source law itself is unknown to the codec: the
//! encoder measures empirical block types of `x^n`, picks a block length,
//! offset and catalog code whose empirical distortion meets every target
//! within slack, and sends that choice followed by the codewords.
//!
//! Module map:
//! - [`model`]: alphabets, channel, distortion, source generators
//! - [`blockcode`]: explicit block-code tables and exact expected distortion
//! - [`catalog`]: the shared code family (enumerated or designed)
//! - [`empirical`]: overlapping and non-overlapping block types
//! - [`universal`]: plan selection, bitstream, encoder and decoders
//! - [`experiments`]: presets, Monte Carlo trials, good-set estimates, CSV

pub mod blockcode;
pub mod catalog;
pub mod empirical;
pub mod error;
pub mod experiments;
pub mod model;
pub mod seeds;
pub mod universal;
pub mod word;

/// Alphabet letters are 0-based indices.
pub type Symbol = usize;

pub use error::{Error, Result};

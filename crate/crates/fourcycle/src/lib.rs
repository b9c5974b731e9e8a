//! Construction, exact verification, and Monte Carlo evaluation of CSS
//! code pairs built from quasi-cyclic LDPC codes with circulant
//! permutation blocks.
//!
//! The pipeline: pick a perfume triple `(P, sigma, tau)` ([`perfume`]),
//! build the two model matrices from it ([`construct`]), optionally thin
//! their rows with mask vectors, verify the twisted and girth conditions
//! both compactly ([`model`]) and on the expanded binary matrices
//! ([`gf2`]), then estimate decoding performance over two independent
//! binary symmetric channels with a syndrome sum-product decoder
//! ([`channel`]).
//!
//! The `fourcycle` binary exposes the batch commands `tables`, `build`,
//! `verify`, `simulate`, and `find` on top of this library.

pub mod channel;
pub mod cli;
pub mod construct;
pub mod error;
pub mod gf2;
pub mod model;
pub mod numtheory;
pub mod perfume;

pub use error::{Error, Result};

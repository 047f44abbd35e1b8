//! SINR meta distribution of downlink wireless networks.
//!
//! The crate evaluates `P(P_s(θ) > γ)`, the distribution of per-link
//! conditional success probabilities, for five spatial models (PPP, Poisson
//! bipolar, Matérn cluster, K-tier PPP, Poisson line Cox) with four routes:
//!
//! * the dominant-interferer plus mean-field approximation ([`metadist::proposed_meta`]),
//! * the two-moment beta approximation ([`metadist::beta_meta`]),
//! * exact Gil-Pelaez inversion of the imaginary moments ([`metadist::exact_meta_gilpelaez`]),
//! * Monte-Carlo ground truth with the fading average in closed form ([`simkit::simulate_meta`]).
//!
//! Units are kilometres and watts throughout; thresholds are linear inside
//! the library and in dB only at the CLI boundary.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod manifest;
pub mod metadist;
pub mod quad;
pub mod simkit;
pub mod specfun;

pub use error::{Error, Result};
pub use geometry::{ChannelModel, NetworkModel, Tier};
pub use metadist::{MetaCurve, MetaQuery, Method, QuadratureSpec};

//! Link-level simulator and analytical toolkit for coded transmission over
//! half-duplex amplify-and-forward cooperative relay channels.
//!
//! The crate covers the full chain of a distributed space-time BICM system
//! on sequential slotted amplify-and-forward (SSAF) cooperation frames:
//!
//! * [`bounds`]: nested ("matryoshka") block-fading channels, exact
//!   diversity-order bounds for every protocol/precoder configuration, and
//!   a brute-force code-diversity oracle.
//! * [`channel`]: fading draws, relay gain normalization, the
//!   upper-triangular cascade matrix, colored-noise covariance and
//!   Cholesky whitening, frame transmission.
//! * [`precoder`]: algebraic space-time rotations (2x2 cyclotomic, 4x4
//!   full-diversity) and their single/multi embeddings.
//! * [`bicm`]: recursive systematic convolutional codes with puncturing,
//!   diversity-constrained interleaving, Gray QAM mapping.
//! * [`receiver`]: exhaustive APP detection and exact log-MAP (BCJR)
//!   decoding, iterated a fixed number of times.
//! * [`outage`]: Gaussian-input mutual information and Monte Carlo outage
//!   probability.
//! * [`harness`]: seeded, reproducible word-error-rate experiments with
//!   presets and CSV emission.

pub mod bicm;
pub mod bounds;
pub mod channel;
pub mod harness;
pub mod linalg;
pub mod outage;
pub mod precoder;
pub mod rational;
pub mod receiver;

pub use rational::Rational;

//! Discrete-time simulation of index-modulated pilot placement for
//! faster-than-Nyquist (FTN) signaling over HF channels.
//!
//! The transmitter hides `N_b` extra bits in the position of each frame's
//! pilot sequence ([`framing`]). The receiver whitens the symbol-spaced
//! matched-filter output ([`waveform`]), finds the pilot by correlating
//! against the whitened pilot and scoring candidate spike pairs ([`psli`]),
//! and then estimates the tapped-delay-line channel by least squares on the
//! interference-free part of the pilot ([`estimator`]). [`channel`] generates
//! the static and Watterson fading processes, and [`simkit`] ties everything
//! into Monte-Carlo experiments.
//!
//! Time is normalized so the Nyquist symbol period `T` is 1 and symbols are
//! spaced `tau` apart; every filter here works at that symbol spacing.

pub mod channel;
pub mod error;
pub mod estimator;
pub mod framing;
pub mod modem;
pub mod psli;
pub mod simkit;
pub mod waveform;

pub mod par;
pub mod rng;

pub use error::{Error, Result};

/// Complex baseband sample.
pub type C64 = num_complex::Complex64;

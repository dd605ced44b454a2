//! Simulator for the quantum delayed-choice experiment on a two-spin NMR
//! processor (¹H ancilla, ¹³C system).
//!
//! The crate is organized bottom-up:
//!
//! - [`numcore`]: closed-form 2×2 and 4×4 complex operators.
//! - [`spinmodel`]: spin system, deviation matrices, pseudo-pure states.
//! - [`pulselang`]: pulse-file parser, gate compiler, unitary semantics,
//!   equivalence verifier.
//! - [`channels`]: ancilla σz dephasing and its gradient-pulse emulation.
//! - [`experiment`]: the interferometer circuit, closed-form references,
//!   sweeps and cosine fits.
//! - [`tomo`]: Pauli expectations and linear-inversion reconstruction.
//! - [`cli`]: the `qdchoice` command-line tool.
//!
//! ```
//! use qdchoice::experiment::{detection_probability, run_circuit, DelayedChoiceConfig};
//! use qdchoice::spinmodel::SpinSystem;
//!
//! let cfg = DelayedChoiceConfig::gate(std::f64::consts::PI, 0.0)?;
//! let d = run_circuit(&cfg, &SpinSystem::default())?;
//! assert!((detection_probability(&d)? - 1.0).abs() < 1e-12);
//! # Ok::<(), qdchoice::Error>(())
//! ```

pub mod channels;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod numcore;
pub mod pulselang;
pub mod spinmodel;
pub mod tomo;

pub use error::{Error, Result};

// The guide's listings run as doctests, so the book cannot drift from the code.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/deviation-matrix.md")]
    mod deviation_matrix {}
    #[doc = include_str!("../../../book/src/pulse-language.md")]
    mod pulse_language {}
    #[doc = include_str!("../../../book/src/measurement.md")]
    mod measurement {}
    #[doc = include_str!("../../../book/src/fringes.md")]
    mod fringes {}
    #[doc = include_str!("../../../book/src/tomography.md")]
    mod tomography {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

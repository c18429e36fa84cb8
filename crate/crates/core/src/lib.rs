//! Synthesis of deterministic top-down tree transducers that uniformize
//! relations given as deterministic top-down automata over convolutions.
//!
//! The pipeline: parse a specification automaton ([`automata`]), build the
//! delay game ([`synth`]), solve it ([`game`]) and extract a transducer
//! ([`transducers`]). [`oracle`] holds brute-force checks used to validate
//! all of the above.

pub mod automata;
pub mod error;
pub mod game;
pub mod oracle;
pub mod paths;
pub mod synth;
pub mod terms;
pub mod transducers;

pub use error::{Error, Result};

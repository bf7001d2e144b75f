//! Finite feedback space-time schemes for quasi-static MIMO channels.
//!
//! A finite feedback scheme pairs `N` space-time block codes with a feedback
//! function: the receiver looks at the channel, picks one of the codes and
//! tells the transmitter its index. This crate builds such schemes (full-rate
//! algebraic constructions and the classical baselines), certifies their
//! diversity from the stacked difference matrices, and measures bit error
//! rates by seeded Monte Carlo simulation.

pub mod algebra;
pub mod cli;
pub mod codes;
pub mod decoder;
pub mod diversity;
pub mod error;
pub mod feedback;
pub mod lattice;
pub mod simulator;

pub use error::{Error, Result};

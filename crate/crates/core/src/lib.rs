//! Base-21 line coding toolkit: prime-base scrambling, run-limited
//! enumerative codecs, BPM balancing, word alignment and a link-startup
//! simulator.

pub mod alignment;
pub mod alphabet;
pub mod balance;
pub mod endec;
pub mod error;
pub mod framework;
pub mod linksim;
pub mod modprime;
pub mod scrambler;
pub mod sidestream;

pub use error::{Error, Result};

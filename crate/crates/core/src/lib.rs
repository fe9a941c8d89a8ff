//! Numerical toolkit for Stepanov and Weyl seminorms, translation-number
//! scans, almost-periodicity classification, and bounded mild solutions of
//! exponentially stable evolution equations.

pub mod aptest;
pub mod error;
pub mod evolution;
pub mod io;
pub mod seminorm;
pub mod signal;
pub mod verify;

pub use error::{Error, Result};

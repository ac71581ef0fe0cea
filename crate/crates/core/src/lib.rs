//! Yao-Yao equipartitions, dual-cone partitions and numerical verification
//! of the functional and classical Blaschke-Santalo inequalities.

pub mod bodies;
pub mod certificate;
pub mod cli;
pub mod equipartition;
pub mod error;
pub mod field;
pub mod fixtures;
pub mod geometry;
pub mod inequalities;
pub mod io;
pub mod measures;
pub mod optim;
pub mod sampling;
pub mod svg;

pub use certificate::{Certificate, Diagnostic};
pub use error::{Result, SantaloError};

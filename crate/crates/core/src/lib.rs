//! Many-valued relational algebra over complete residuated lattices.

pub mod error;
pub mod lattice;
pub mod cli;
pub mod colimit;
pub mod dataio;
pub mod diagram;
pub mod lnn;
pub mod omega;
pub mod relation;

pub use error::{Error, Result};

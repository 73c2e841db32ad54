//! Trace-based single-node repair for Reed-Solomon codes in rack-aware storage.

pub mod cli;
pub mod error;
pub mod forge;
pub mod gf;
pub mod grs;
pub mod io;
pub mod linalg;
pub mod poly;
pub mod rack;
pub mod report;
pub mod runner;

pub use error::{Error, Result};
pub use gf::{Fe, FieldTower, Subfield, TraceBasis};
pub use grs::{Codeword, GrsCode};
pub use poly::Poly;

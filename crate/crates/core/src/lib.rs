//! Coarse geometry of catalog groups, evaluated on finite Cayley-graph windows.

pub mod actions;
pub mod coarse;
pub mod error;
pub mod group;
pub mod maps;

pub use error::{Error, Result};
pub mod battery;
pub mod cert;
pub mod gromov;
pub mod group_coarse;
pub mod report;

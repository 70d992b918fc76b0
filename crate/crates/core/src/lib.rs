pub mod cumulants;
pub mod data;
pub mod error;
pub mod linstat;
pub mod mc;
pub mod models;
pub mod regression;
pub mod score_mod;
pub mod solver;
pub mod specialfn;

pub use error::{Direction, Error, Result};

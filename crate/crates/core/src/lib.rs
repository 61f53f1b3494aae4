pub mod checks;
pub mod error;
pub mod examples;
pub mod field;
pub mod group_ring;
pub mod induced;
pub mod io;
pub mod lift;
pub mod matrix;
pub mod modules;
pub mod root_data;
pub mod sample;
pub mod torus_log;

pub use error::{Error, Result};

pub mod bounds;
pub mod cli;
pub mod drift;
pub mod error;
pub mod numeric;
pub mod sim;
pub mod strength;

pub use error::{Error, Result};

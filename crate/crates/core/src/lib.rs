pub mod cli;
pub mod error;
pub mod forest;
pub mod pairing;
pub mod rewrite;
pub mod taut;

pub use error::{Error, Result};

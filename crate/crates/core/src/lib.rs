pub mod error;
pub mod numkern;
pub mod quadform;
pub mod specflow;
pub mod reduction;
pub mod scenarios;
pub mod cli;
pub mod symplectic;

pub use error::{Error, Result};

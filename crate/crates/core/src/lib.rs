pub mod error;
pub mod spaceform;

pub use error::{Error, Result};
pub mod bounds;
pub mod mesh;
pub mod dec;
pub mod verify;
pub mod cli;

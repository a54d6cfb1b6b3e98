pub mod algebra;
pub mod channels;
pub mod classify;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod linmap;
pub mod neb;
pub mod random;

pub use error::{Error, Result};

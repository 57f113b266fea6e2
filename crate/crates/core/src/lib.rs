pub mod config;
pub mod error;
pub mod export;
pub mod fem;
pub mod linalg;
pub mod mesh;
pub mod oracle;
pub mod reduction;
pub mod runner;
pub mod ssn;

pub use error::{Error, Result};

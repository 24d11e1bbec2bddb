pub mod matkit;
pub mod projection;
pub mod error;
pub use error::{Error, Result};

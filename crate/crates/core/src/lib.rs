pub mod classify;
pub mod cli;
pub mod error;
pub mod glrt;
pub mod io;
pub mod linalg;
pub mod numrange;
pub mod pencil;
pub mod signal;

pub use error::{Error, Result};

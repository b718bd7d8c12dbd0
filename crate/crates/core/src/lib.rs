pub mod error;
pub mod field;
pub mod numtheory;

pub use error::{Error, Result};
pub mod mpoly;
pub mod perm;
pub mod linalg;
pub mod orbit;
pub mod relations;
pub mod oracles;
pub mod subsum;
pub mod constructions;
pub mod detect;
pub mod cli;

pub mod closed_forms;
pub mod error;
pub mod inequalities;
pub mod kernels;
pub mod quadrature;
pub mod oracle;
pub mod signs;
pub mod simplex;
pub mod stechkin;
pub mod trig;
pub mod verify;

pub use error::{Error, Result};

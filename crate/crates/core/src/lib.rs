//! Interactive disambiguation of candidate programs through multiple-choice
//! questions built from preconditions and separating postconditions.

pub mod error;
pub mod logic;
pub mod answers;
pub mod distinguish;
pub mod precond;
pub mod learner;
pub mod render;
pub mod rulelang;

pub use error::{Error, Result};

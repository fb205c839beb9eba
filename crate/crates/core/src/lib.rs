pub mod arith;
pub mod error;
pub mod finite;
pub mod projgroup;

pub use error::{Error, Result};
pub mod extgroup;
pub mod curves;
pub mod galmodel;
pub mod moduli;
pub mod twists;
pub mod selftest;

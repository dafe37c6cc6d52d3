pub mod cli;
pub mod comparison;
pub mod discrete;
pub mod error;
pub mod extended;
pub mod json;
pub mod mms;
pub mod models;
pub mod needle;

pub use error::{Error, Result};
pub use extended::ExtendedReal;

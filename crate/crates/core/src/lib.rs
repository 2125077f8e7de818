pub mod error;
pub mod field;
pub mod gaussian;
pub mod transforms;
pub mod cyclotomic;
pub mod transcoder;
pub mod modem;
pub mod link;
pub mod ber;
pub mod cli;

pub use error::{Error, Result};

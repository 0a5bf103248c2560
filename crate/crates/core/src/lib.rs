//! LP decoding of linear codes over finite commutative rings.

pub mod analysis;
pub mod channel;
pub mod code;
pub mod decoder;
pub mod error;
pub mod harness;
pub mod lp;
pub mod polytope;
pub mod pseudocodeword;
pub mod ring;

pub use error::{Error, Result};

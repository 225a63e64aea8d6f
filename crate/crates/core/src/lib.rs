//! Linear list-decodable codes for insertion/deletion channels.
//!
//! The construction concatenates an outer list-recoverable code with a sequence of
//! short binary inner codes `S_1, …, S_n` (a *sync sequence*) whose edit balls
//! overlap in a controlled way. Decoding slides a window across the received string,
//! list-decodes every window against every inner code, and hands the per-block
//! candidate sets to the outer list-recovery step.

pub mod bitlinalg;
pub mod codec;
pub mod edit_metric;
mod error;
pub mod gf;
pub mod inner_code;
pub mod outer_code;
pub mod pseudorandom;
pub mod rational;
pub mod seed;
pub mod sync;

pub use bitlinalg::{BitMatrix, BitVector};
pub use error::{Error, Result};
pub use rational::Rational;

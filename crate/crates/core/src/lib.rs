//! Bit-exact, cycle-accurate model of a digit-serial pipelined NTT
//! accelerator built on lazy Montgomery arithmetic.
//!
//! The arithmetic is generic over the unsigned [`Word`](word::Word) type
//! that holds residues and REDC intermediates. The aliases below pick a
//! word for the usual modulus classes; [`word`] explains the sizing rule.

pub mod digitflow;
pub mod montcore;
pub mod params;
pub mod pipeline;
pub mod reference;
pub mod word;

mod error;

pub use bnum::types::{U1024, U256, U512};
pub use num_bigint::BigUint;

pub use error::{Error, Result};
pub use params::Direction;

/// Moduli up to roughly 25 bits with any digit size up to 32 bits.
pub type Context64 = params::MontgomeryContext<u64>;
/// 64-bit-class moduli.
pub type Context256 = params::MontgomeryContext<U256>;
/// Moduli up to 253 bits with any digit size dividing 256.
pub type Context512 = params::MontgomeryContext<U512>;
/// Any modulus, arbitrary precision.
pub type ContextBig = params::MontgomeryContext<BigUint>;

pub type Domain64 = params::NttDomain<u64>;
pub type Domain256 = params::NttDomain<U256>;
pub type Domain512 = params::NttDomain<U512>;
pub type DomainBig = params::NttDomain<BigUint>;

pub type Pipeline64 = pipeline::Pipeline<u64>;
pub type Pipeline256 = pipeline::Pipeline<U256>;
pub type Pipeline512 = pipeline::Pipeline<U512>;
pub type PipelineBig = pipeline::Pipeline<BigUint>;

//! Unsigned integer word types the arithmetic is generic over.
//!
//! Every quantity in the model (residues, REDC intermediates, digits) is an
//! element of one `Word` type. Fixed-width types (`u64`, `u128`, the `bnum`
//! wide integers) are fast and `Copy`; `BigUint` covers anything larger.
//! Contexts refuse to build when the chosen type cannot hold `2qR`, the
//! largest intermediate REDC produces.

use std::fmt::{Debug, Display};
use std::ops::{BitAnd, BitOr, Shl, Shr};
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{FromPrimitive, Num, PrimInt, ToPrimitive};
use rand::RngCore;

use crate::error::{Error, Result};

pub trait Word:
    Num
    + Clone
    + Ord
    + Debug
    + Display
    + FromStr
    + FromPrimitive
    + ToPrimitive
    + Shl<usize, Output = Self>
    + Shr<usize, Output = Self>
    + BitAnd<Output = Self>
    + BitOr<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Storage width in bits, `None` for arbitrary precision.
    const CAPACITY_BITS: Option<u32>;

    /// Short name used in reports and error messages.
    const NAME: &'static str;

    /// Number of significant bits (0 for zero).
    fn bit_length(&self) -> u32;

    /// `(self * rhs) mod 2^k` for `k` no larger than the storage width,
    /// without requiring the full product to fit.
    fn mul_low(&self, rhs: &Self, k: u32) -> Self {
        low_bits(self.clone() * rhs.clone(), k)
    }

    fn to_biguint(&self) -> BigUint {
        BigUint::from_str_radix(&self.to_string(), 10).expect("decimal rendering parses")
    }

    /// Converts from an arbitrary-precision value, `None` if it does not fit.
    fn from_biguint(v: &BigUint) -> Option<Self> {
        if let Some(cap) = Self::CAPACITY_BITS {
            if v.bits() > u64::from(cap) {
                return None;
            }
        }
        Self::from_str_radix(&v.to_str_radix(16), 16).ok()
    }
}

macro_rules! prim_word {
    ($t:ty, $bits:expr) => {
        impl Word for $t {
            const CAPACITY_BITS: Option<u32> = Some($bits);
            const NAME: &'static str = stringify!($t);

            #[inline]
            fn bit_length(&self) -> u32 {
                $bits - self.leading_zeros()
            }

            #[inline]
            fn mul_low(&self, rhs: &Self, k: u32) -> Self {
                low_bits(self.wrapping_mul(*rhs), k)
            }

            fn to_biguint(&self) -> BigUint {
                BigUint::from(*self)
            }

            fn from_biguint(v: &BigUint) -> Option<Self> {
                <$t>::try_from(v).ok()
            }
        }
    };
}

prim_word!(u64, 64);
prim_word!(u128, 128);

macro_rules! bnum_word {
    ($t:ty, $bits:expr, $name:expr) => {
        impl Word for $t {
            const CAPACITY_BITS: Option<u32> = Some($bits);
            const NAME: &'static str = $name;

            #[inline]
            fn bit_length(&self) -> u32 {
                $bits - PrimInt::leading_zeros(*self)
            }

            #[inline]
            fn mul_low(&self, rhs: &Self, k: u32) -> Self {
                low_bits(self.wrapping_mul(*rhs), k)
            }
        }
    };
}

bnum_word!(bnum::types::U256, 256, "U256");
bnum_word!(bnum::types::U512, 512, "U512");
bnum_word!(bnum::types::U1024, 1024, "U1024");

impl Word for BigUint {
    const CAPACITY_BITS: Option<u32> = None;
    const NAME: &'static str = "BigUint";

    fn bit_length(&self) -> u32 {
        self.bits() as u32
    }

    fn to_biguint(&self) -> BigUint {
        self.clone()
    }

    fn from_biguint(v: &BigUint) -> Option<Self> {
        Some(v.clone())
    }
}

/// `2^k`.
#[inline]
pub fn pow2<W: Word>(k: u32) -> W {
    W::one() << k as usize
}

/// `x mod 2^k`.
#[inline]
pub fn low_bits<W: Word>(x: W, k: u32) -> W {
    if W::CAPACITY_BITS.is_some_and(|cap| k >= cap) {
        return x;
    }
    x & (pow2::<W>(k) - W::one())
}

#[inline]
pub fn from_u64<W: Word>(v: u64) -> W {
    W::from_u64(v).expect("every word type holds a u64")
}

/// Whether `W` can hold an integer of `bits` bits.
pub fn holds_bits<W: Word>(bits: u32) -> bool {
    W::CAPACITY_BITS.is_none_or(|cap| bits <= cap)
}

pub fn convert<W: Word>(v: &BigUint) -> Result<W> {
    W::from_biguint(v).ok_or(Error::WordTooNarrow {
        word: W::NAME,
        capacity: W::CAPACITY_BITS.unwrap_or(u32::MAX),
        required: v.bits() as u32,
    })
}

/// Parses a decimal string into `W`.
pub fn parse_decimal<W: Word>(s: &str) -> Result<W> {
    let big = BigUint::from_str_radix(s.trim(), 10)
        .map_err(|_| Error::Document(format!("not a decimal integer: {s:?}")))?;
    convert(&big)
}

/// Uniform sample from `[0, bound)` by rejection on `bit_length(bound)` random bits.
pub fn random_below<W: Word, R: RngCore + ?Sized>(rng: &mut R, bound: &W) -> W {
    assert!(!bound.is_zero(), "empty sampling range");
    let bits = bound.bit_length();
    loop {
        let mut v = W::zero();
        let mut filled = 0;
        while filled < bits {
            let take = (bits - filled).min(64);
            let chunk = rng.next_u64() & (u64::MAX >> (64 - take));
            v = v | (from_u64::<W>(chunk) << filled as usize);
            filled += take;
        }
        if &v < bound {
            return v;
        }
    }
}

//! Floating-point scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar the map engine is generic over.
///
/// Implemented for `f32` and `f64`. Besides the usual float arithmetic the
/// trait carries what persistence needs: a type tag and a lossless bit
/// encoding, so a saved map reloads bit-for-bit.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + FromStr + Display + Debug + Default + Send + Sync + 'static
{
    /// Tag written into persisted artifacts.
    const TAG: &'static str;

    /// Raw IEEE-754 bits, widened to 64 bits.
    fn to_bits_u64(self) -> u64;

    /// Inverse of [`Scalar::to_bits_u64`]. Returns `None` if `bits` does not fit the type.
    fn from_bits_u64(bits: u64) -> Option<Self>;

    /// Byte width of the raw encoding.
    const BYTES: usize;

    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(Self::nan)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Converts a count; exact for counts below the mantissa width.
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).unwrap_or_else(Self::infinity)
    }
}

impl Scalar for f64 {
    const TAG: &'static str = "f64";
    const BYTES: usize = 8;

    fn to_bits_u64(self) -> u64 {
        self.to_bits()
    }

    fn from_bits_u64(bits: u64) -> Option<Self> {
        Some(f64::from_bits(bits))
    }
}

impl Scalar for f32 {
    const TAG: &'static str = "f32";
    const BYTES: usize = 4;

    fn to_bits_u64(self) -> u64 {
        u64::from(self.to_bits())
    }

    fn from_bits_u64(bits: u64) -> Option<Self> {
        u32::try_from(bits).ok().map(f32::from_bits)
    }
}

/// Euclidean distance between two equal-length slices.
pub fn euclidean<T: Scalar>(a: &[T], b: &[T]) -> T {
    squared_euclidean(a, b).sqrt()
}

/// Squared Euclidean distance between two equal-length slices.
pub fn squared_euclidean<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| {
        let d = x - y;
        acc + d * d
    })
}

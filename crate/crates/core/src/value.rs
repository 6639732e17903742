use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use num_traits::Zero;

/// Scalar sample type accepted by the transforms: `f64` or [`Complex64`].
pub trait Value: Copy + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync {
    fn to_complex(self) -> Complex64;

    /// Real inputs keep only the real part.
    fn from_complex(c: Complex64) -> Self;
}

impl Value for f64 {
    #[inline]
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }

    #[inline]
    fn from_complex(c: Complex64) -> Self {
        c.re
    }
}

impl Value for Complex64 {
    #[inline]
    fn to_complex(self) -> Complex64 {
        self
    }

    #[inline]
    fn from_complex(c: Complex64) -> Self {
        c
    }
}

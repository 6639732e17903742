//! Special functions: generalized Laguerre polynomials and roots, normalized
//! associated Legendre functions, complex spherical harmonics.
//!
//! Spherical harmonics are orthonormal over the unit sphere and carry the
//! Condon-Shortley phase `(-1)^m`:
//!
//! ```text
//! Y_l^m(θ, φ) = λ_l^m(θ) e^{imφ},   Y_l^{-m} = (-1)^m conj(Y_l^m)
//! ```

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
// `Float` is unused whenever std's inherent float methods are linked in.
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Laguerre order parameter used by the radial basis.
pub const LAGUERRE_ALPHA: f64 = 0.5;

/// Degree `l` and order `m` of a spherical harmonic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HarmonicIndex {
    pub degree: usize,
    pub order: i64,
}

impl HarmonicIndex {
    pub const fn new(degree: usize, order: i64) -> Self {
        HarmonicIndex { degree, order }
    }

    pub fn is_valid(&self) -> bool {
        self.order.unsigned_abs() as usize <= self.degree
    }
}

/// `L_n^{(alpha)}(x)` by the three-term upward recurrence.
pub fn laguerre_eval(n: usize, alpha: f64, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::invalid(format!("laguerre argument must be finite, got {x}")));
    }
    if !alpha.is_finite() || alpha <= -1.0 {
        return Err(Error::invalid(format!("laguerre order must exceed -1, got {alpha}")));
    }
    Ok(laguerre_unchecked(n, alpha, x))
}

pub(crate) fn laguerre_unchecked(n: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Roots of `L_n^{(alpha)}` in increasing order.
///
/// Eigenvalues of the symmetric Jacobi matrix (Golub-Welsch), each refined by
/// one Newton step using `d/dx L_n^{(a)} = -L_{n-1}^{(a+1)}`.
pub fn laguerre_roots(n: usize, alpha: f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("laguerre_roots needs at least one root"));
    }
    if !alpha.is_finite() || alpha <= -1.0 {
        return Err(Error::invalid(format!("laguerre order must exceed -1, got {alpha}")));
    }
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let fi = i as f64;
        jacobi[(i, i)] = 2.0 * fi + alpha + 1.0;
        if i > 0 {
            let off = (fi * (fi + alpha)).sqrt();
            jacobi[(i, i - 1)] = off;
            jacobi[(i - 1, i)] = off;
        }
    }
    let mut roots: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    roots.sort_by(|a, b| a.total_cmp(b));
    for x in roots.iter_mut() {
        let value = laguerre_unchecked(n, alpha, *x);
        let slope = -laguerre_unchecked(n - 1, alpha + 1.0, *x);
        if slope != 0.0 {
            *x -= value / slope;
        }
    }
    Ok(roots)
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Orthonormal associated Legendre values `λ_l^m(θ)` for `l = m..=lmax`,
/// `m >= 0`, Condon-Shortley phase included.
///
/// The recurrence runs on already-normalized values so nothing overflows for
/// moderate degrees.
pub fn legendre_column(lmax: usize, m: usize, theta: f64) -> Vec<f64> {
    if m > lmax {
        return Vec::new();
    }
    let (s, c) = theta.sin_cos();
    let mut pmm = 0.5 / PI.sqrt();
    for k in 1..=m {
        let k = k as f64;
        pmm *= -((2.0 * k + 1.0) / (2.0 * k)).sqrt() * s;
    }
    let mut out = vec![0.0; lmax - m + 1];
    out[0] = pmm;
    if lmax == m {
        return out;
    }
    let mf = m as f64;
    out[1] = (2.0 * mf + 3.0).sqrt() * c * pmm;
    for l in (m + 2)..=lmax {
        let lf = l as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let lm1 = lf - 1.0;
        let b = ((lm1 * lm1 - mf * mf) / (4.0 * lm1 * lm1 - 1.0)).sqrt();
        let i = l - m;
        out[i] = a * (c * out[i - 1] - b * out[i - 2]);
    }
    out
}

/// Single orthonormal associated Legendre value; negative orders follow
/// `λ_l^{-m} = (-1)^m λ_l^m`.
pub fn legendre_normalized(degree: usize, order: i64, theta: f64) -> f64 {
    let m = order.unsigned_abs() as usize;
    if m > degree {
        return 0.0;
    }
    let v = legendre_column(degree, m, theta)[degree - m];
    if order < 0 && m % 2 == 1 {
        -v
    } else {
        v
    }
}

/// Orthonormal complex spherical harmonic at colatitude `theta`, longitude `phi`.
pub fn spherical_harmonic(idx: HarmonicIndex, theta: f64, phi: f64) -> Result<Complex64> {
    if !idx.is_valid() {
        return Err(Error::invalid(format!("spherical harmonic order {} exceeds degree {}", idx.order, idx.degree)));
    }
    if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
        return Err(Error::invalid(format!("colatitude {theta} outside [0, pi] or bad longitude {phi}")));
    }
    let lambda = legendre_normalized(idx.degree, idx.order, theta);
    Ok(Complex64::from_polar(lambda, idx.order as f64 * phi))
}

/// Colatitude and longitude of a (not necessarily normalized) direction.
pub fn direction_angles(dir: [f64; 3]) -> (f64, f64) {
    let [x, y, z] = dir;
    let r = (x * x + y * y + z * z).sqrt();
    let theta = if r == 0.0 { 0.0 } else { (z / r).clamp(-1.0, 1.0).acos() };
    let phi = y.atan2(x);
    (theta, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn laguerre_low_orders() {
        assert_eq!(laguerre_eval(0, 0.5, 7.3).unwrap(), 1.0);
        assert_eq!(laguerre_eval(1, 0.5, 1.5).unwrap(), 0.0);
        // L_2^{1/2}(1.5) = -0.75
        assert_relative_eq!(laguerre_eval(2, 0.5, 1.5).unwrap(), -0.75, epsilon = 1e-15);
    }

    #[test]
    fn laguerre_rejects_non_finite() {
        assert!(matches!(laguerre_eval(3, 0.5, f64::NAN), Err(Error::InvalidArgument(_))));
        assert!(matches!(laguerre_eval(3, 0.5, f64::INFINITY), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn roots_require_positive_count() {
        assert!(matches!(laguerre_roots(0, 0.5), Err(Error::InvalidArgument(_))));
        let r = laguerre_roots(1, 0.5).unwrap();
        assert_relative_eq!(r[0], 1.5, epsilon = 1e-15);
    }

    #[test]
    fn largest_root_of_fourth_order_is_a_zero() {
        assert!(laguerre_eval(4, 0.5, 10.182435).unwrap().abs() < 1e-4);
    }

    #[test]
    fn harmonic_constants() {
        let y00 = spherical_harmonic(HarmonicIndex::new(0, 0), 0.7, 1.9).unwrap();
        assert_relative_eq!(y00.re, 0.5 / PI.sqrt(), epsilon = 1e-15);
        assert_eq!(y00.im, 0.0);
        let y10 = spherical_harmonic(HarmonicIndex::new(1, 0), 0.0, 0.0).unwrap();
        assert_relative_eq!(y10.re, (3.0 / (4.0 * PI)).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn harmonic_closed_forms_fix_the_phase() {
        let (t, p) = (0.83, -2.1);
        let (s, c) = (t.sin(), t.cos());
        let y21 = spherical_harmonic(HarmonicIndex::new(2, 1), t, p).unwrap();
        let expect = Complex64::from_polar(-(15.0 / (8.0 * PI)).sqrt() * s * c, p);
        assert_relative_eq!(y21.re, expect.re, epsilon = 1e-14);
        assert_relative_eq!(y21.im, expect.im, epsilon = 1e-14);
        let y20 = spherical_harmonic(HarmonicIndex::new(2, 0), t, p).unwrap();
        assert_relative_eq!(y20.re, (5.0 / (16.0 * PI)).sqrt() * (3.0 * c * c - 1.0), epsilon = 1e-14);
        let y22 = spherical_harmonic(HarmonicIndex::new(2, 2), t, p).unwrap();
        let expect = Complex64::from_polar((15.0 / (32.0 * PI)).sqrt() * s * s, 2.0 * p);
        assert_relative_eq!(y22.re, expect.re, epsilon = 1e-14);
        assert_relative_eq!(y22.im, expect.im, epsilon = 1e-14);
    }

    #[test]
    fn harmonic_rejects_order_above_degree() {
        let err = spherical_harmonic(HarmonicIndex::new(2, 3), 0.1, 0.1).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
        assert!(spherical_harmonic(HarmonicIndex::new(2, 1), -0.1, 0.0).is_err());
    }

    #[test]
    fn addition_theorem() {
        let (t, p) = (1.1, 2.3);
        let l = 10;
        let sum: f64 = (-(l as i64)..=l as i64)
            .map(|m| spherical_harmonic(HarmonicIndex::new(l, m), t, p).unwrap().norm_sqr())
            .sum();
        assert_relative_eq!(sum, (2.0 * l as f64 + 1.0) / (4.0 * PI), epsilon = 1e-12);
    }

    #[test]
    fn conjugation_symmetry() {
        for l in 0..=12usize {
            for m in 1..=l as i64 {
                let pos = spherical_harmonic(HarmonicIndex::new(l, m), 0.4, 0.9).unwrap();
                let neg = spherical_harmonic(HarmonicIndex::new(l, -m), 0.4, 0.9).unwrap();
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let diff = neg - pos.conj() * sign;
                assert!(diff.norm() <= 1e-14, "l={l} m={m}");
            }
        }
    }

    #[test]
    fn high_degree_legendre_stays_finite() {
        let col = legendre_column(64, 0, 0.3);
        assert!(col.iter().all(|v| v.is_finite()));
        let col = legendre_column(64, 64, 1.2);
        assert!(col[0].is_finite() && col[0] != 0.0);
    }

    #[test]
    fn direction_angles_round_trip() {
        let (t, p) = direction_angles([0.0, 0.0, 1.0]);
        assert_eq!((t, p), (0.0, 0.0));
        let (t, p) = direction_angles([0.0, 1.0, 0.0]);
        assert_relative_eq!(t, PI / 2.0);
        assert_relative_eq!(p, PI / 2.0);
    }
}

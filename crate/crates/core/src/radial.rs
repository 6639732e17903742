//! Radial direction: Gauss-Laguerre shell placement, quadrature weights and
//! the Gaussian-Laguerre basis
//!
//! ```text
//! R_n(q) = [2 ζ^{-3/2} n! / Γ(n + 3/2)]^{1/2} exp(-q²/2ζ) L_n^{1/2}(q²/ζ)
//! ```
//!
//! which is orthonormal under the measure `q² dq`. Shells sit at
//! `q_i = sqrt(ζ x_i)` with `x_i` the roots of `L_N^{1/2}`; with the matching
//! weights the `N`-node rule integrates `exp(-q²/ζ)` times any polynomial in
//! `q²/ζ` of degree `≤ 2N-1` exactly.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
// `Float` is unused whenever std's inherent float methods are linked in.
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::RealSolver;
use crate::specfun::{laguerre_roots, laguerre_unchecked, ln_gamma, LAGUERRE_ALPHA};
use crate::{Error, Result, Value};

/// Highest radial order (exclusive) the basis evaluation accepts.
pub const MAX_RADIAL_ORDER: usize = 32;

/// Relation between b-value (s/mm²) and q-space radius.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum BConvention {
    /// `b = q²`; the diffusion-time constant is absorbed into q.
    #[default]
    Normalized,
    /// `b = 4π² τ q²` with `τ` the effective diffusion time in seconds and q in 1/mm.
    Physical { tau: f64 },
}

impl BConvention {
    pub fn validate(&self) -> Result<()> {
        match *self {
            BConvention::Normalized => Ok(()),
            BConvention::Physical { tau } if tau.is_finite() && tau > 0.0 => Ok(()),
            BConvention::Physical { tau } => Err(Error::invalid(format!("diffusion time must be positive, got {tau}"))),
        }
    }

    fn factor(&self) -> f64 {
        match *self {
            BConvention::Normalized => 1.0,
            BConvention::Physical { tau } => 4.0 * PI * PI * tau,
        }
    }

    pub fn q_from_b(&self, b: f64) -> f64 {
        (b / self.factor()).sqrt()
    }

    pub fn b_from_q(&self, q: f64) -> f64 {
        self.factor() * q * q
    }
}

/// Shell placement and quadrature rule for the radial direction.
#[derive(Debug, Clone)]
pub struct RadialScheme {
    convention: BConvention,
    zeta: f64,
    roots: Vec<f64>,
    radii: Vec<f64>,
    bvalues: Vec<f64>,
    weights: Vec<f64>,
    /// `basis[i][n] = R_n(q_i)`
    basis: Vec<Vec<f64>>,
}

/// Places `shells` Gauss-Laguerre shells so the outermost lies exactly at `b_max`.
pub fn make_radial_scheme(shells: usize, b_max: f64, conv: BConvention) -> Result<RadialScheme> {
    if shells == 0 {
        return Err(Error::invalid("radial scheme needs at least one shell"));
    }
    if shells >= MAX_RADIAL_ORDER {
        return Err(Error::invalid(format!("at most {} shells are supported, got {shells}", MAX_RADIAL_ORDER - 1)));
    }
    if !(b_max.is_finite() && b_max > 0.0) {
        return Err(Error::invalid(format!("b_max must be positive, got {b_max}")));
    }
    conv.validate()?;

    let roots = laguerre_roots(shells, LAGUERRE_ALPHA)?;
    let x_max = roots[shells - 1];
    let q_max = conv.q_from_b(b_max);
    let zeta = q_max * q_max / x_max;
    let radii: Vec<f64> = roots.iter().map(|&x| (zeta * x).sqrt()).collect();
    let mut bvalues: Vec<f64> = roots.iter().map(|&x| b_max * (x / x_max)).collect();
    bvalues[shells - 1] = b_max;
    let weights = quadrature_weights(&roots, shells, zeta)?;
    let basis = radii.iter().map(|&q| (0..shells).map(|n| basis_unchecked(n, q, zeta)).collect()).collect();
    Ok(RadialScheme { convention: conv, zeta, roots, radii, bvalues, weights, basis })
}

impl RadialScheme {
    pub fn shell_count(&self) -> usize {
        self.roots.len()
    }

    pub fn convention(&self) -> BConvention {
        self.convention
    }

    /// Scale factor in q² units.
    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    /// Scale factor expressed as a b-value.
    pub fn zeta_b(&self) -> f64 {
        self.convention.b_from_q(self.zeta.sqrt())
    }

    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn bvalues(&self) -> &[f64] {
        &self.bvalues
    }

    pub fn b_max(&self) -> f64 {
        self.bvalues[self.bvalues.len() - 1]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `R_n(q_i)` for `n < N`.
    pub fn basis_at_shell(&self, shell: usize) -> &[f64] {
        &self.basis[shell]
    }

    /// Factors the collocation matrix `M[i, n] = R_n(q_{shells[i]})`, `n < shells.len()`.
    pub fn collocation(&self, shells: &[usize]) -> Result<RadialCollocation> {
        let n = self.shell_count();
        if shells.is_empty() || shells.len() > n {
            return Err(Error::invalid(format!("collocation needs between 1 and {n} shells, got {}", shells.len())));
        }
        for (pos, &s) in shells.iter().enumerate() {
            if s >= n {
                return Err(Error::invalid(format!("shell index {s} out of range for {n} shells")));
            }
            if shells[..pos].contains(&s) {
                return Err(Error::invalid(format!("shell index {s} repeated")));
            }
        }
        let k = shells.len();
        let m = DMatrix::from_fn(k, k, |i, j| self.basis[shells[i]][j]);
        Ok(RadialCollocation { shells: shells.to_vec(), solver: RealSolver::new(m) })
    }
}

/// Factored radial collocation system over a subset of shells.
#[derive(Debug, Clone)]
pub struct RadialCollocation {
    shells: Vec<usize>,
    solver: RealSolver,
}

impl RadialCollocation {
    pub fn shells(&self) -> &[usize] {
        &self.shells
    }

    pub fn condition(&self) -> f64 {
        self.solver.condition()
    }

    pub fn solve<V: Value>(&self, values: &[V]) -> Result<Vec<V>> {
        if values.len() != self.shells.len() {
            return Err(Error::LengthMismatch {
                what: "collocation values",
                expected: self.shells.len(),
                actual: values.len(),
            });
        }
        let ctx = || format!("radial collocation over shells {:?}", self.shells);
        self.solver.check(ctx)?;
        let rhs: Vec<_> = values.iter().map(|v| v.to_complex()).collect();
        Ok(self.solver.solve(&rhs, ctx)?.into_iter().map(V::from_complex).collect())
    }
}

fn basis_unchecked(n: usize, q: f64, zeta: f64) -> f64 {
    let nf = n as f64;
    let log_norm = 0.5 * (2.0f64.ln() - 1.5 * zeta.ln() + ln_gamma(nf + 1.0) - ln_gamma(nf + 1.5));
    let x = q * q / zeta;
    (log_norm - 0.5 * x).exp() * laguerre_unchecked(n, LAGUERRE_ALPHA, x)
}

/// Gaussian-Laguerre radial function `R_n(q)` for scale `zeta`.
pub fn radial_basis_eval(n: usize, q: f64, zeta: f64) -> Result<f64> {
    if !(zeta.is_finite() && zeta > 0.0) {
        return Err(Error::invalid(format!("scale factor must be positive, got {zeta}")));
    }
    if !(q.is_finite() && q >= 0.0) {
        return Err(Error::invalid(format!("radius must be non-negative, got {q}")));
    }
    if n >= MAX_RADIAL_ORDER {
        return Err(Error::invalid(format!("radial order {n} exceeds cap {MAX_RADIAL_ORDER}")));
    }
    Ok(basis_unchecked(n, q, zeta))
}

/// Quadrature weights for nodes `q_i = sqrt(zeta x_i)`:
///
/// ```text
/// w_i = 0.5 ζ^{3/2} Γ(N + 3/2) x_i e^{x_i} / (N! (N+1)² [L_{N+1}^{1/2}(x_i)]²)
/// ```
///
/// evaluated in log space.
pub fn quadrature_weights(roots: &[f64], n: usize, zeta: f64) -> Result<Vec<f64>> {
    if roots.len() != n || n == 0 {
        return Err(Error::LengthMismatch { what: "quadrature roots", expected: n, actual: roots.len() });
    }
    if !(zeta.is_finite() && zeta > 0.0) {
        return Err(Error::invalid(format!("scale factor must be positive, got {zeta}")));
    }
    let nf = n as f64;
    let log_const = 0.5f64.ln() + 1.5 * zeta.ln() + ln_gamma(nf + 1.5) - ln_gamma(nf + 1.0) - 2.0 * (nf + 1.0).ln();
    roots
        .iter()
        .map(|&x| {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::invalid(format!("root {x} is not positive")));
            }
            let value = laguerre_unchecked(n, LAGUERRE_ALPHA, x);
            let slope = -laguerre_unchecked(n - 1, LAGUERRE_ALPHA + 1.0, x);
            if (value / slope).abs() > 1e-8 * x.max(1.0) {
                return Err(Error::invalid(format!("{x} is not a root of L_{n}^(1/2)")));
            }
            let next = laguerre_unchecked(n + 1, LAGUERRE_ALPHA, x);
            Ok((log_const + x.ln() + x - 2.0 * next.abs().ln()).exp())
        })
        .collect()
}

/// Exact projection onto `R_0..R_{N-1}`: `c_n = Σ_i w_i R_n(q_i) v_i`.
pub fn radial_project<V: Value>(values: &[V], scheme: &RadialScheme) -> Result<Vec<V>> {
    let n = scheme.shell_count();
    if values.len() != n {
        return Err(Error::LengthMismatch { what: "shell values", expected: n, actual: values.len() });
    }
    Ok((0..n)
        .map(|order| {
            values
                .iter()
                .enumerate()
                .fold(V::zero(), |acc, (i, &v)| acc + v * (scheme.weights[i] * scheme.basis[i][order]))
        })
        .collect())
}

/// Direct solve of `M c = values` with `M[i, n] = R_n(q_{shells[i]})`.
///
/// `n_max` must equal `shells.len()` so the system is square.
pub fn radial_collocation_solve<V: Value>(
    values: &[V],
    shells: &[usize],
    n_max: usize,
    scheme: &RadialScheme,
) -> Result<Vec<V>> {
    if n_max != shells.len() {
        return Err(Error::invalid(format!(
            "collocation with {} shells needs n_max = {}, got {n_max}",
            shells.len(),
            shells.len()
        )));
    }
    scheme.collocation(shells)?.solve(values)
}

/// `Σ_n c_n R_n(q)`.
pub fn radial_series<V: Value>(coeffs: &[V], q: f64, zeta: f64) -> V {
    coeffs.iter().enumerate().fold(V::zero(), |acc, (n, &c)| acc + c * basis_unchecked(n, q, zeta))
}

/// Values of `Σ_n c_n R_n` at every shell of the scheme.
pub fn radial_synthesize<V: Value>(coeffs: &[V], scheme: &RadialScheme) -> Result<Vec<V>> {
    let n = scheme.shell_count();
    if coeffs.len() > n {
        return Err(Error::LengthMismatch { what: "radial coefficients", expected: n, actual: coeffs.len() });
    }
    Ok(scheme.basis.iter().map(|row| coeffs.iter().zip(row).fold(V::zero(), |acc, (&c, &r)| acc + c * r)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_shells() {
        let s = make_radial_scheme(4, 8000.0, BConvention::Normalized).unwrap();
        let expect = [411.3, 1694.4, 4036.3, 8000.0];
        for (b, e) in s.bvalues().iter().zip(expect) {
            assert!((b - e).abs() < 0.05, "{b} vs {e}");
        }
        // 8000 / x_4 with x_4 = 10.182437613815925 (Hermite-root oracle)
        assert_relative_eq!(s.zeta_b(), 785.666488066, max_relative = 1e-10);
    }

    #[test]
    fn single_shell() {
        let s = make_radial_scheme(1, 100.0, BConvention::Normalized).unwrap();
        assert_eq!(s.bvalues(), &[100.0]);
        assert_relative_eq!(s.zeta(), 100.0 / 1.5, max_relative = 1e-15);
    }

    #[test]
    fn invalid_arguments() {
        assert!(matches!(make_radial_scheme(4, 0.0, BConvention::Normalized), Err(Error::InvalidArgument(_))));
        assert!(matches!(make_radial_scheme(4, -5.0, BConvention::Normalized), Err(Error::InvalidArgument(_))));
        assert!(matches!(make_radial_scheme(0, 100.0, BConvention::Normalized), Err(Error::InvalidArgument(_))));
        assert!(make_radial_scheme(2, 100.0, BConvention::Physical { tau: 0.0 }).is_err());
        assert!(matches!(radial_basis_eval(0, 0.0, 0.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(radial_basis_eval(0, 0.0, -1.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn basis_at_origin() {
        // sqrt(2 / Γ(3/2))
        assert_relative_eq!(radial_basis_eval(0, 0.0, 1.0).unwrap(), 1.502251088929885, max_relative = 1e-14);
    }

    #[test]
    fn single_node_weight() {
        // 0.5 Γ(5/2) 1.5 e^{1.5} / (4 · 0.75²)
        let w = quadrature_weights(&[1.5], 1, 1.0).unwrap();
        assert_relative_eq!(w[0], 1.9858967628204663, max_relative = 1e-14);
        let w = quadrature_weights(&[1.5], 1, 9.0).unwrap();
        assert_relative_eq!(w[0], 1.9858967628204663 * 27.0, max_relative = 1e-14);
        // brute force: the single-node rule must normalize R_0
        let r0 = radial_basis_eval(0, (1.5f64 * 9.0).sqrt(), 9.0).unwrap();
        assert_relative_eq!(w[0] * r0 * r0, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn weights_reject_mismatched_roots() {
        let roots = laguerre_roots(3, 0.5).unwrap();
        assert!(matches!(quadrature_weights(&roots, 4, 1.0), Err(Error::LengthMismatch { .. })));
        assert!(matches!(quadrature_weights(&[1.0, 2.0], 2, 1.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn projection_of_basis_function() {
        let s = make_radial_scheme(4, 8000.0, BConvention::Normalized).unwrap();
        let values: Vec<f64> = (0..4).map(|i| s.basis_at_shell(i)[2]).collect();
        let c = radial_project(&values, &s).unwrap();
        for (n, c) in c.iter().enumerate() {
            let expect = if n == 2 { 1.0 } else { 0.0 };
            assert!((c - expect).abs() < 1e-12, "n={n} c={c}");
        }
        let zeros = radial_project(&[0.0; 4], &s).unwrap();
        assert!(zeros.iter().all(|&c| c == 0.0));
        assert!(matches!(radial_project(&[0.0; 3], &s), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn collocation_small_systems() {
        let s = make_radial_scheme(4, 8000.0, BConvention::Normalized).unwrap();
        let v = s.basis_at_shell(3)[0];
        let c = radial_collocation_solve(&[v], &[3], 1, &s).unwrap();
        assert_relative_eq!(c[0], 1.0, epsilon = 1e-14);

        let truth = [0.7, -0.3];
        let values: Vec<f64> = [2usize, 3]
            .iter()
            .map(|&i| truth[0] * s.basis_at_shell(i)[0] + truth[1] * s.basis_at_shell(i)[1])
            .collect();
        let c = radial_collocation_solve(&values, &[2, 3], 2, &s).unwrap();
        for (a, b) in c.iter().zip(truth) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!(radial_collocation_solve(&values, &[2, 3], 3, &s).is_err());
        assert!(radial_collocation_solve(&values, &[2, 2], 2, &s).is_err());
    }

    #[test]
    fn physical_convention_keeps_ratios() {
        let a = make_radial_scheme(4, 8000.0, BConvention::Normalized).unwrap();
        let b = make_radial_scheme(4, 8000.0, BConvention::Physical { tau: 0.02 }).unwrap();
        for (x, y) in a.bvalues().iter().zip(b.bvalues()) {
            assert_relative_eq!(x, y, max_relative = 1e-14);
        }
        assert_relative_eq!(b.zeta_b(), a.zeta_b(), max_relative = 1e-12);
        for (q, bv) in b.radii().iter().zip(b.bvalues()) {
            assert_relative_eq!(b.convention().b_from_q(*q), *bv, max_relative = 1e-12);
        }
    }
}

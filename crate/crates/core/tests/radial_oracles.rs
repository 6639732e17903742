use proptest::prelude::*;
use qspace_core::radial::{
    make_radial_scheme, quadrature_weights, radial_basis_eval, radial_collocation_solve, radial_project,
    radial_synthesize, BConvention,
};
use qspace_core::specfun::laguerre_roots;

/// Adaptive Simpson on [a, b].
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, 50)
}

fn gamma_half_integer(x: f64) -> f64 {
    // x = j + 3/2
    let mut g = std::f64::consts::PI.sqrt();
    let mut t = 0.5;
    while t < x - 0.25 {
        g *= t;
        t += 1.0;
    }
    g
}

#[test]
fn basis_is_orthonormal_by_numerical_integration() {
    let zeta = 1.0;
    let upper = 25.0;
    let norm = adaptive_simpson(
        &|q| {
            let r = radial_basis_eval(2, q, zeta).unwrap();
            r * r * q * q
        },
        0.0,
        upper,
        1e-14,
    );
    assert!((norm - 1.0).abs() < 1e-10, "{norm}");
    let cross = adaptive_simpson(
        &|q| radial_basis_eval(1, q, zeta).unwrap() * radial_basis_eval(3, q, zeta).unwrap() * q * q,
        0.0,
        upper,
        1e-14,
    );
    assert!(cross.abs() < 1e-10, "{cross}");
}

#[test]
fn discrete_orthonormality() {
    let s = make_radial_scheme(4, 8000.0, BConvention::Normalized).unwrap();
    for a in 0..4 {
        for b in 0..4 {
            let sum: f64 = (0..4).map(|i| s.weights()[i] * s.basis_at_shell(i)[a] * s.basis_at_shell(i)[b]).sum();
            let expect = if a == b { 1.0 } else { 0.0 };
            assert!((sum - expect).abs() < 1e-12, "{a},{b}: {sum}");
        }
    }
}

fn moment_residual(n: usize, j: i32, zeta: f64) -> f64 {
    let s = make_radial_scheme(n, 1.0, BConvention::Normalized).unwrap();
    let weights = quadrature_weights(s.roots(), n, zeta).unwrap();
    let sum: f64 = s
        .roots()
        .iter()
        .zip(&weights)
        .map(|(&x, &w)| {
            let q2 = zeta * x;
            w * q2.powi(j) * (-q2 / zeta).exp()
        })
        .sum();
    let exact = 0.5 * gamma_half_integer(j as f64 + 1.5) * zeta.powf(j as f64 + 1.5);
    ((sum - exact) / exact).abs()
}

#[test]
fn gaussian_moment_exactness_is_sharp() {
    let n = 4;
    for zeta in [1.0, 785.666488066] {
        for j in 0..(2 * n as i32) {
            let r = moment_residual(n, j, zeta);
            assert!(r < 1e-11, "j={j} zeta={zeta} rel={r}");
        }
        let r = moment_residual(n, 2 * n as i32, zeta);
        assert!(r > 1e-6, "j=2N should not be exact, rel={r}");
    }
}

#[test]
fn weights_positive() {
    for n in 1..=8 {
        let s = make_radial_scheme(n, 3000.0, BConvention::Normalized).unwrap();
        assert!(s.weights().iter().all(|&w| w > 0.0), "N={n}");
        assert!(s.radii().windows(2).all(|w| w[0] < w[1]));
        for (b, x) in s.bvalues().iter().zip(s.roots()) {
            let ratio = b / s.b_max();
            assert!((ratio - x / s.roots()[n - 1]).abs() < 1e-12);
        }
    }
}

#[test]
fn gaussian_zero_moment_at_default_scale() {
    let s = make_radial_scheme(4, 8000.0, BConvention::Normalized).unwrap();
    let zeta = s.zeta();
    let sum: f64 = s.radii().iter().zip(s.weights()).map(|(&q, &w)| w * (-q * q / zeta).exp()).sum();
    let exact = 0.5 * gamma_half_integer(1.5) * zeta.powf(1.5);
    assert!(((sum - exact) / exact).abs() < 1e-12);
}

#[test]
fn scale_covariance() {
    let roots = laguerre_roots(5, 0.5).unwrap();
    let w1 = quadrature_weights(&roots, 5, 3.0).unwrap();
    let w2 = quadrature_weights(&roots, 5, 3.0 * 7.5).unwrap();
    for (a, b) in w1.iter().zip(&w2) {
        assert!((b / a / 7.5f64.powf(1.5) - 1.0).abs() < 1e-13);
    }
    let a = make_radial_scheme(5, 2000.0, BConvention::Normalized).unwrap();
    let b = make_radial_scheme(5, 2000.0 * 7.5, BConvention::Normalized).unwrap();
    for i in 0..5 {
        assert!((b.radii()[i] / a.radii()[i] / 7.5f64.sqrt() - 1.0).abs() < 1e-13);
        assert!((b.bvalues()[i] / b.b_max() - a.bvalues()[i] / a.b_max()).abs() < 1e-13);
    }
}

#[test]
fn collocation_matches_projection_for_all_shells() {
    let s = make_radial_scheme(4, 8000.0, BConvention::Normalized).unwrap();
    let truth = [0.4, -1.2, 0.05, 0.77];
    let values = radial_synthesize(&truth, &s).unwrap();
    let quad = radial_project(&values, &s).unwrap();
    let col = radial_collocation_solve(&values, &[0, 1, 2, 3], 4, &s).unwrap();
    for i in 0..4 {
        assert!((quad[i] - col[i]).abs() < 1e-10);
    }
}

proptest! {
    #[test]
    fn project_inverts_synthesis(c in prop::collection::vec(-1.0f64..1.0, 4), b_max in 500.0f64..20000.0) {
        let s = make_radial_scheme(4, b_max, BConvention::Normalized).unwrap();
        let values = radial_synthesize(&c, &s).unwrap();
        let back = radial_project(&values, &s).unwrap();
        for (a, b) in back.iter().zip(&c) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_projection_is_componentwise(re in prop::collection::vec(-1.0f64..1.0, 3), im in prop::collection::vec(-1.0f64..1.0, 3)) {
        let s = make_radial_scheme(3, 4000.0, BConvention::Normalized).unwrap();
        let c: Vec<_> = re.iter().zip(&im).map(|(&a, &b)| num_complex::Complex64::new(a, b)).collect();
        let values = radial_synthesize(&c, &s).unwrap();
        let back = radial_project(&values, &s).unwrap();
        for (a, b) in back.iter().zip(&c) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }
}

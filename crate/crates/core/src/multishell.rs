//! The multi-shell grid and the spherical polar Fourier transform.
//!
//! Shell `i` carries an angular scheme of band-limit `L_i`. Coefficients
//! `E_{nlm}` live on the staircase set `n < N_l`, `N_l = #{i : L_i > l}`,
//! whose size equals the sample count, so the forward transform is a
//! bijection. The forward pass handles shells in decreasing band-limit: each
//! shell first has the already-recovered degrees `l >= L_i` subtracted, then
//! its samples are band-limited and one SHT gives `E_lm(q_i)`. A degree is
//! solved radially as soon as every shell carrying it is done, by Gauss-
//! Laguerre quadrature when all shells carry it and by collocation otherwise.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use num_complex::Complex64;
// `Float` is unused whenever std's inherent float methods are linked in.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::angular::{forward_sht, make_angular_scheme, AngularOptions, AngularScheme, ShCoefficients};
use crate::radial::{make_radial_scheme, radial_project, BConvention, RadialScheme, MAX_RADIAL_ORDER};
use crate::specfun::{direction_angles, legendre_column};
use crate::{Error, Result, Value};

/// One acquisition point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSample {
    pub shell: usize,
    pub direction: [f64; 3],
    pub theta: f64,
    pub phi: f64,
    pub q: f64,
    pub b: f64,
}

/// A radial scheme plus one angular scheme per shell.
#[derive(Debug, Clone)]
pub struct MultiShellGrid {
    radial: RadialScheme,
    angular: Vec<AngularScheme>,
    samples: Vec<GridSample>,
    shell_start: Vec<usize>,
}

/// Builds the grid with default ring placement.
pub fn build_grid(shells: usize, b_max: f64, band_limits: &[usize], conv: BConvention) -> Result<MultiShellGrid> {
    let options = vec![AngularOptions::default(); band_limits.len()];
    build_grid_with(shells, b_max, band_limits, conv, &options)
}

/// Builds the grid with per-shell ring placement overrides.
pub fn build_grid_with(
    shells: usize,
    b_max: f64,
    band_limits: &[usize],
    conv: BConvention,
    options: &[AngularOptions],
) -> Result<MultiShellGrid> {
    if band_limits.len() != shells {
        return Err(Error::invalid(format!("{} band-limits given for {shells} shells", band_limits.len())));
    }
    if options.len() != shells {
        return Err(Error::LengthMismatch { what: "angular options", expected: shells, actual: options.len() });
    }
    if let Some(l) = band_limits.iter().find(|&&l| l == 0 || l % 2 == 0) {
        return Err(Error::invalid(format!("band-limit {l} is not odd and positive")));
    }
    if band_limits.windows(2).any(|w| w[0] > w[1]) {
        log::warn!("band-limits {band_limits:?} are not non-decreasing with b");
    }
    let radial = make_radial_scheme(shells, b_max, conv)?;
    let angular =
        band_limits.iter().zip(options).map(|(&l, o)| make_angular_scheme(l, o)).collect::<Result<Vec<_>>>()?;
    Ok(MultiShellGrid::assemble(radial, angular))
}

impl MultiShellGrid {
    fn assemble(radial: RadialScheme, angular: Vec<AngularScheme>) -> Self {
        let mut samples = Vec::new();
        let mut shell_start = Vec::with_capacity(angular.len());
        for (shell, scheme) in angular.iter().enumerate() {
            shell_start.push(samples.len());
            let q = radial.radii()[shell];
            let b = radial.bvalues()[shell];
            for (&direction, (theta, phi)) in scheme.directions().iter().zip(scheme.angles()) {
                samples.push(GridSample { shell, direction, theta, phi, q, b });
            }
        }
        MultiShellGrid { radial, angular, samples, shell_start }
    }

    pub fn radial(&self) -> &RadialScheme {
        &self.radial
    }

    pub fn angular(&self) -> &[AngularScheme] {
        &self.angular
    }

    pub fn shell_count(&self) -> usize {
        self.angular.len()
    }

    pub fn band_limits(&self) -> Vec<usize> {
        self.angular.iter().map(|a| a.band_limit()).collect()
    }

    pub fn max_band_limit(&self) -> usize {
        self.angular.iter().map(|a| a.band_limit()).max().unwrap_or(1)
    }

    pub fn samples(&self) -> &[GridSample] {
        &self.samples
    }

    pub fn sample_count(&self) -> usize {
        self.samples.len()
    }

    /// Index range of shell `shell` within [`MultiShellGrid::samples`].
    pub fn shell_range(&self, shell: usize) -> Range<usize> {
        let start = self.shell_start[shell];
        start..start + self.angular[shell].sample_count()
    }

    /// True when band-limits do not decrease with b.
    pub fn is_monotone(&self) -> bool {
        self.angular.windows(2).all(|w| w[0].band_limit() <= w[1].band_limit())
    }

    pub fn staircase_layout(&self) -> SpfLayout {
        staircase_index(&self.band_limits())
    }
}

/// Bijection between `(n, l, m)` and a linear position: even `l` ascending,
/// then `m = -l..=l`, then `n` ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpfLayout {
    /// Radial order count for each even degree `l = 2p`.
    radial_counts: Vec<usize>,
    offsets: Vec<usize>,
    len: usize,
}

/// Staircase layout for per-shell band-limits: `N_l = #{i : L_i > l}` for even `l < max L_i`.
pub fn staircase_index(band_limits: &[usize]) -> SpfLayout {
    let l_max = band_limits.iter().copied().max().unwrap_or(0);
    let counts = (0..l_max).step_by(2).map(|l| band_limits.iter().filter(|&&li| li > l).count()).collect();
    SpfLayout::build(counts)
}

impl SpfLayout {
    fn build(radial_counts: Vec<usize>) -> Self {
        let mut offsets = Vec::with_capacity(radial_counts.len());
        let mut len = 0;
        for (p, &count) in radial_counts.iter().enumerate() {
            offsets.push(len);
            len += (4 * p + 1) * count;
        }
        SpfLayout { radial_counts, offsets, len }
    }

    /// `N` radial orders for every even degree below `band_limit`.
    pub fn full(radial_orders: usize, band_limit: usize) -> Self {
        SpfLayout::build(vec![radial_orders; band_limit.div_ceil(2)])
    }

    /// Layout from explicit per-degree radial counts (`counts[p]` for `l = 2p`).
    pub fn from_radial_counts(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::invalid("layout needs at least one degree"));
        }
        if let Some(&c) = counts.iter().find(|&&c| c > MAX_RADIAL_ORDER) {
            return Err(Error::invalid(format!("radial count {c} exceeds cap {MAX_RADIAL_ORDER}")));
        }
        Ok(SpfLayout::build(counts))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// One past the highest even degree: an odd band-limit.
    pub fn band_limit(&self) -> usize {
        2 * self.radial_counts.len() - 1
    }

    pub fn radial_counts(&self) -> &[usize] {
        &self.radial_counts
    }

    /// `N_l`; zero for odd or out-of-range degrees.
    pub fn radial_count(&self, degree: usize) -> usize {
        if degree % 2 == 1 {
            return 0;
        }
        self.radial_counts.get(degree / 2).copied().unwrap_or(0)
    }

    pub fn max_radial_count(&self) -> usize {
        self.radial_counts.iter().copied().max().unwrap_or(0)
    }

    pub fn index(&self, n: usize, degree: usize, order: i64) -> Option<usize> {
        let count = self.radial_count(degree);
        if n >= count || order.unsigned_abs() as usize > degree {
            return None;
        }
        Some(self.offsets[degree / 2] + (order + degree as i64) as usize * count + n)
    }

    /// `(n, l, m)` in linear order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.radial_counts.iter().enumerate().flat_map(|(p, &count)| {
            let l = 2 * p;
            (-(l as i64)..=l as i64).flat_map(move |m| (0..count).map(move |n| (n, l, m)))
        })
    }
}

/// Complex SPF coefficients over a layout, tied to the radial scale they were
/// computed with.
#[derive(Debug, Clone, PartialEq)]
pub struct SpfCoefficients {
    layout: SpfLayout,
    zeta: f64,
    convention: BConvention,
    values: Vec<Complex64>,
}

impl SpfCoefficients {
    pub fn zeros(layout: SpfLayout, zeta: f64, convention: BConvention) -> Result<Self> {
        let values = vec![Complex64::zero(); layout.len()];
        SpfCoefficients::new(layout, zeta, convention, values)
    }

    pub fn new(layout: SpfLayout, zeta: f64, convention: BConvention, values: Vec<Complex64>) -> Result<Self> {
        if !(zeta.is_finite() && zeta > 0.0) {
            return Err(Error::invalid(format!("scale factor must be positive, got {zeta}")));
        }
        convention.validate()?;
        if values.len() != layout.len() {
            return Err(Error::LengthMismatch {
                what: "SPF coefficients",
                expected: layout.len(),
                actual: values.len(),
            });
        }
        Ok(SpfCoefficients { layout, zeta, convention, values })
    }

    pub fn layout(&self) -> &SpfLayout {
        &self.layout
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn convention(&self) -> BConvention {
        self.convention
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn get(&self, n: usize, degree: usize, order: i64) -> Option<Complex64> {
        self.layout.index(n, degree, order).map(|i| self.values[i])
    }

    /// `(n, l, m, E_nlm)` in layout order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, i64, Complex64)> + '_ {
        self.layout.entries().zip(&self.values).map(|((n, l, m), &v)| (n, l, m, v))
    }

    /// Real-basis coefficients in the same layout; see
    /// [`ShCoefficients::to_real`] for the convention.
    pub fn to_real(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.values.len()];
        let root2 = 2.0f64.sqrt();
        for (i, (n, l, m)) in self.layout.entries().enumerate() {
            if m < 0 {
                continue;
            }
            let a = self.values[i];
            if m == 0 {
                out[i] = a.re;
            } else {
                let s = if m % 2 == 0 { root2 } else { -root2 };
                out[i] = s * a.re;
                let neg = self.layout.index(n, l, -m).expect("layout is symmetric in m");
                out[neg] = -s * a.im;
            }
        }
        out
    }

    /// `E(q, q̂)`. The direction need not be normalized.
    pub fn evaluate(&self, q: f64, direction: [f64; 3]) -> Result<Complex64> {
        inverse_spf(self, q, direction)
    }

    /// `E` at a b-value using the stored convention.
    pub fn evaluate_at_b(&self, b: f64, direction: [f64; 3]) -> Result<Complex64> {
        if !(b.is_finite() && b >= 0.0) {
            return Err(Error::invalid(format!("b-value must be non-negative, got {b}")));
        }
        inverse_spf(self, self.convention.q_from_b(b), direction)
    }
}

/// How the forward transform treats degrees missing from low-band shells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpfMode {
    /// Bijective transform on the staircase coefficient set.
    #[default]
    Staircase,
    /// Treat missing degrees as zero and project every degree onto all `N`
    /// radial orders by quadrature; yields `N × (L_max+1)/2`-degree tables.
    ZeroPadded,
}

/// Forward SPF transform on the staircase set.
pub fn forward_spf<V: Value>(grid: &MultiShellGrid, samples: &[V]) -> Result<SpfCoefficients> {
    forward_spf_with(grid, samples, SpfMode::Staircase)
}

pub fn forward_spf_with<V: Value>(grid: &MultiShellGrid, samples: &[V], mode: SpfMode) -> Result<SpfCoefficients> {
    if samples.len() != grid.sample_count() {
        return Err(Error::LengthMismatch {
            what: "grid samples",
            expected: grid.sample_count(),
            actual: samples.len(),
        });
    }
    match mode {
        SpfMode::Staircase => forward_staircase(grid, samples),
        SpfMode::ZeroPadded => forward_zero_padded(grid, samples),
    }
}

fn forward_staircase<V: Value>(grid: &MultiShellGrid, samples: &[V]) -> Result<SpfCoefficients> {
    let radial = &grid.radial;
    let n_shells = grid.shell_count();
    let limits = grid.band_limits();
    let layout = staircase_index(&limits);
    let mut out = SpfCoefficients::zeros(layout, radial.zeta(), radial.convention())?;

    let mut order: Vec<usize> = (0..n_shells).collect();
    order.sort_by(|&a, &b| limits[b].cmp(&limits[a]));
    let mut shell_coeffs: Vec<Option<ShCoefficients>> = vec![None; n_shells];

    for (pos, &shell) in order.iter().enumerate() {
        let scheme = &grid.angular[shell];
        let range = grid.shell_range(shell);
        let mut values: Vec<Complex64> = samples[range.clone()].iter().map(|v| v.to_complex()).collect();
        if limits[shell] < out.layout.band_limit() {
            let excess = degree_excess(&out, radial.basis_at_shell(shell), limits[shell]);
            for (v, s) in values.iter_mut().zip(&grid.samples[range]) {
                *v -= excess.evaluate(s.theta, s.phi);
            }
        }
        shell_coeffs[shell] = Some(forward_sht(scheme, &values)?);

        let floor = order.get(pos + 1).map_or(0, |&next| limits[next]);
        let mut degree = floor + floor % 2;
        while degree < limits[shell] {
            solve_degree(&mut out, radial, &limits, &shell_coeffs, degree, false)?;
            degree += 2;
        }
    }
    Ok(SpfCoefficients { values: out.values.into_iter().map(Value::from_complex).collect(), ..out })
}

fn forward_zero_padded<V: Value>(grid: &MultiShellGrid, samples: &[V]) -> Result<SpfCoefficients> {
    let radial = &grid.radial;
    let limits = grid.band_limits();
    let layout = SpfLayout::full(grid.shell_count(), grid.max_band_limit());
    let mut out = SpfCoefficients::zeros(layout, radial.zeta(), radial.convention())?;
    let shell_coeffs = (0..grid.shell_count())
        .map(|i| forward_sht(&grid.angular[i], &samples[grid.shell_range(i)]).map(Some))
        .collect::<Result<Vec<_>>>()?;
    for degree in (0..grid.max_band_limit()).step_by(2) {
        solve_degree(&mut out, radial, &limits, &shell_coeffs, degree, true)?;
    }
    Ok(out)
}

/// Angular coefficients at one shell for degrees `>= from_degree`, built from
/// the radial coefficients recovered so far.
fn degree_excess(coeffs: &SpfCoefficients, basis_at_shell: &[f64], from_degree: usize) -> ShCoefficients {
    let band = coeffs.layout.band_limit();
    let mut sh = ShCoefficients::zeros(band).expect("layout band-limit is odd");
    let mut degree = from_degree + from_degree % 2;
    while degree < band {
        let count = coeffs.layout.radial_count(degree);
        for m in -(degree as i64)..=degree as i64 {
            let base = coeffs.layout.index(0, degree, m).expect("index within layout");
            let v = (0..count).fold(Complex64::zero(), |acc, n| acc + coeffs.values[base + n] * basis_at_shell[n]);
            sh.set(degree, m, v).expect("even degree within band");
        }
        degree += 2;
    }
    sh
}

fn solve_degree(
    out: &mut SpfCoefficients,
    radial: &RadialScheme,
    limits: &[usize],
    shell_coeffs: &[Option<ShCoefficients>],
    degree: usize,
    zero_padded: bool,
) -> Result<()> {
    let n_shells = limits.len();
    let carriers: Vec<usize> = (0..n_shells).filter(|&i| limits[i] > degree).collect();
    let angular_at = |i: usize, m: i64| -> Complex64 {
        shell_coeffs[i].as_ref().and_then(|c| c.get(degree, m)).unwrap_or_else(Complex64::zero)
    };
    let quadrature = zero_padded || carriers.len() == n_shells;
    let collocation = if quadrature { None } else { Some(radial.collocation(&carriers)?) };
    for m in -(degree as i64)..=degree as i64 {
        let radial_coeffs = match &collocation {
            None => {
                let values: Vec<Complex64> = (0..n_shells).map(|i| angular_at(i, m)).collect();
                radial_project(&values, radial)?
            }
            Some(col) => {
                let values: Vec<Complex64> = carriers.iter().map(|&i| angular_at(i, m)).collect();
                col.solve(&values)?
            }
        };
        let base = out.layout.index(0, degree, m).expect("degree within layout");
        let count = out.layout.radial_count(degree);
        out.values[base..base + count].copy_from_slice(&radial_coeffs[..count]);
    }
    Ok(())
}

/// `Σ_{n,l,m} E_{nlm} R_n(q) Y_l^m(q̂)` over the coefficient layout.
pub fn inverse_spf(coeffs: &SpfCoefficients, q: f64, direction: [f64; 3]) -> Result<Complex64> {
    if !(q.is_finite() && q >= 0.0) {
        return Err(Error::invalid(format!("radius must be non-negative, got {q}")));
    }
    let norm = direction.iter().map(|c| c * c).sum::<f64>();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::invalid("direction must be a finite non-zero vector"));
    }
    let (theta, phi) = direction_angles(direction);
    let layout = &coeffs.layout;
    let radial: Vec<f64> = (0..layout.max_radial_count())
        .map(|n| crate::radial::radial_basis_eval(n, q, coeffs.zeta))
        .collect::<Result<_>>()?;
    let band = layout.band_limit();
    let mut acc = Complex64::zero();
    for abs_m in 0..band {
        let col = legendre_column(band - 1, abs_m, theta);
        let mut degree = abs_m + abs_m % 2;
        while degree < band {
            let count = layout.radial_count(degree);
            let lam = col[degree - abs_m];
            for sign in [1i64, -1] {
                if abs_m == 0 && sign < 0 {
                    continue;
                }
                let m = sign * abs_m as i64;
                let base = layout.index(0, degree, m).expect("degree within layout");
                let r = (0..count).fold(Complex64::zero(), |a, n| a + coeffs.values[base + n] * radial[n]);
                let lam_m = if sign < 0 && abs_m % 2 == 1 { -lam } else { lam };
                acc += r * Complex64::from_polar(lam_m, m as f64 * phi);
            }
            degree += 2;
        }
    }
    Ok(acc)
}

/// Values of the expansion at every grid sample.
pub fn synthesize(grid: &MultiShellGrid, coeffs: &SpfCoefficients) -> Result<Vec<Complex64>> {
    grid.samples.iter().map(|s| inverse_spf(coeffs, s.q, s.direction)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_size() {
        let g = build_grid(4, 8000.0, &[3, 5, 9, 11], BConvention::Normalized).unwrap();
        assert_eq!(g.sample_count(), 132);
        let per_shell: Vec<usize> = (0..4).map(|i| g.shell_range(i).len()).collect();
        assert_eq!(per_shell, vec![6, 15, 45, 66]);
        assert!(g.samples().iter().all(|s| s.direction[2] >= 0.0));
        assert!(g.is_monotone());
    }

    #[test]
    fn micro_and_uniform_grids() {
        let g = build_grid(1, 1000.0, &[1], BConvention::Normalized).unwrap();
        assert_eq!(g.sample_count(), 1);
        let g = build_grid(4, 8000.0, &[11; 4], BConvention::Normalized).unwrap();
        assert_eq!(g.sample_count(), 264);
    }

    #[test]
    fn grid_argument_errors() {
        assert!(matches!(
            build_grid(4, 8000.0, &[3, 5, 8, 11], BConvention::Normalized),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            build_grid(3, 8000.0, &[3, 5, 9, 11], BConvention::Normalized),
            Err(Error::InvalidArgument(_))
        ));
        // non-monotone only warns
        let g = build_grid(2, 8000.0, &[5, 3], BConvention::Normalized).unwrap();
        assert!(!g.is_monotone());
    }

    #[test]
    fn staircase_table_sizes() {
        let layout = staircase_index(&[3, 5, 9, 11]);
        assert_eq!(layout.radial_counts(), &[4, 4, 3, 2, 2, 1]);
        assert_eq!(layout.len(), 132);
        let entries: Vec<_> = staircase_index(&[1]).entries().collect();
        assert_eq!(entries, vec![(0, 0, 0)]);
        let uniform = staircase_index(&[11; 4]);
        assert_eq!(uniform.len(), 264);
        assert!(uniform.radial_counts().iter().all(|&c| c == 4));
    }

    #[test]
    fn layout_ordering() {
        let layout = staircase_index(&[3, 5]);
        let entries: Vec<_> = layout.entries().collect();
        assert_eq!(&entries[..4], &[(0, 0, 0), (1, 0, 0), (0, 2, -2), (1, 2, -2)]);
        for (i, (n, l, m)) in entries.iter().enumerate() {
            assert_eq!(layout.index(*n, *l, *m), Some(i));
        }
        assert_eq!(layout.index(2, 0, 0), None);
        assert_eq!(layout.index(1, 4, 0), None);
        assert_eq!(layout.index(0, 6, 0), None);
    }

    #[test]
    fn zero_coefficients_evaluate_to_zero() {
        let c = SpfCoefficients::zeros(staircase_index(&[3, 5, 9, 11]), 700.0, BConvention::Normalized).unwrap();
        assert_eq!(c.evaluate(3.0, [0.3, 0.2, 0.9]).unwrap(), Complex64::zero());
        assert!(c.evaluate(3.0, [0.0; 3]).is_err());
        assert!(c.evaluate(-1.0, [0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn sample_count_checked() {
        let g = build_grid(2, 3000.0, &[3, 5], BConvention::Normalized).unwrap();
        assert!(matches!(forward_spf(&g, &[0.0; 20]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn basis_element_recovered() {
        let g = build_grid(4, 8000.0, &[3, 5, 9, 11], BConvention::Normalized).unwrap();
        let zeta = g.radial().zeta();
        let y00 = 0.5 / core::f64::consts::PI.sqrt();
        let samples: Vec<f64> =
            g.samples().iter().map(|s| crate::radial::radial_basis_eval(0, s.q, zeta).unwrap() * y00).collect();
        let c = forward_spf(&g, &samples).unwrap();
        for (n, l, m, v) in c.iter() {
            let expect = if (n, l, m) == (0, 0, 0) { 1.0 } else { 0.0 };
            assert!((v - expect).norm() < 1e-9, "({n},{l},{m}) {v}");
        }
    }
}

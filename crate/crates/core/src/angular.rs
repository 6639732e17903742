//! Hemisphere sampling with `L(L+1)/2` samples and the matching spherical
//! harmonic transform for antipodally symmetric signals.
//!
//! An odd band-limit `L` admits the even degrees `l = 0, 2, .., L-1`. The
//! scheme has `(L+1)/2` iso-latitude rings in the northern hemisphere; ring
//! `k` carries `4k+1` equispaced samples, so its DFT resolves orders
//! `|m| <= 2k` and every other order folds onto one of them.
//!
//! The forward transform walks orders from `|m| = L-1` down to zero. For
//! order `m` the rings `k >= ceil(|m|/2)` are usable. Each contributes its
//! `m`-th Fourier coefficient, minus the aliases from orders `m + t(4k+1)`,
//! all of which have larger `|m|` and are already known. The remaining
//! unknowns form a small square Legendre system, one per `|m|`, factored once
//! at construction.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
// `Float` is unused whenever std's inherent float methods are linked in.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::linalg::{condition_number, RealSolver};
use crate::specfun::{legendre_column, spherical_harmonic, HarmonicIndex};
use crate::{Error, Result, Value, MAX_CONDITION};

/// One iso-latitude ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ring {
    /// Colatitude in radians.
    pub theta: f64,
    pub count: usize,
    /// Longitude of the first sample.
    pub phi_offset: f64,
}

impl Ring {
    pub fn phi(&self, j: usize) -> f64 {
        self.phi_offset + 2.0 * PI * j as f64 / self.count as f64
    }
}

/// Overrides for ring placement.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularOptions {
    /// Explicit ring colatitudes (one per ring, in `[0, π/2]`). Disables the
    /// conditioning search.
    pub latitudes: Option<Vec<f64>>,
    /// Per-ring longitude offsets; zero when absent.
    pub phi_offsets: Option<Vec<f64>>,
    /// Perturb the default latitudes to minimize the worst per-order
    /// condition number.
    pub optimize_latitudes: bool,
}

impl Default for AngularOptions {
    fn default() -> Self {
        AngularOptions { latitudes: None, phi_offsets: None, optimize_latitudes: true }
    }
}

#[derive(Debug, Clone)]
struct OrderSystem {
    first_ring: usize,
    first_degree: usize,
    solver: RealSolver,
}

/// Iso-latitude hemisphere scheme for an odd band-limit, with the per-order
/// systems of the fast transform already factored.
#[derive(Debug, Clone)]
pub struct AngularScheme {
    band_limit: usize,
    rings: Vec<Ring>,
    ring_start: Vec<usize>,
    directions: Vec<[f64; 3]>,
    /// `legendre[k][m][l - m] = λ_l^m(θ_k)` for `m <= l < L`.
    legendre: Vec<Vec<Vec<f64>>>,
    orders: Vec<OrderSystem>,
}

/// Number of samples (and of even-degree coefficients) for band-limit `l`.
pub const fn sample_count(band_limit: usize) -> usize {
    band_limit * (band_limit + 1) / 2
}

/// Ring count for an odd band-limit.
pub const fn ring_count(band_limit: usize) -> usize {
    band_limit.div_ceil(2)
}

/// Default ring colatitudes `π(2k+1) / (2(L+1))`.
pub fn default_latitudes(band_limit: usize) -> Vec<f64> {
    (0..ring_count(band_limit)).map(|k| PI * (2 * k + 1) as f64 / (2 * (band_limit + 1)) as f64).collect()
}

fn check_band_limit(band_limit: usize) -> Result<()> {
    if band_limit == 0 || band_limit.is_multiple_of(2) {
        return Err(Error::invalid(format!("band-limit must be odd and positive, got {band_limit}")));
    }
    Ok(())
}

fn order_matrix(band_limit: usize, abs_m: usize, latitudes: &[f64]) -> DMatrix<f64> {
    let first_ring = abs_m.div_ceil(2);
    let first_degree = abs_m + abs_m % 2;
    let dim = latitudes.len() - first_ring;
    let mut a = DMatrix::zeros(dim, dim);
    for (row, &theta) in latitudes[first_ring..].iter().enumerate() {
        let col = legendre_column(band_limit - 1, abs_m, theta);
        for j in 0..dim {
            a[(row, j)] = col[first_degree + 2 * j - abs_m];
        }
    }
    a
}

/// Largest condition number over all per-order systems for the given latitudes.
pub fn worst_condition(band_limit: usize, latitudes: &[f64]) -> f64 {
    (0..band_limit).map(|m| condition_number(&order_matrix(band_limit, m, latitudes))).fold(1.0, f64::max)
}

fn optimize_latitudes(band_limit: usize, latitudes: &mut [f64]) {
    let spacing = PI / (band_limit + 1) as f64;
    let bound = 0.25 * spacing;
    let defaults = latitudes.to_vec();
    let mut best = worst_condition(band_limit, latitudes);
    for step in [0.5 * bound, 0.25 * bound, 0.125 * bound] {
        for _pass in 0..2 {
            for k in 0..latitudes.len() {
                for dir in [1.0, -1.0] {
                    let old = latitudes[k];
                    let cand = (old + dir * step).clamp(defaults[k] - bound, defaults[k] + bound);
                    if cand == old {
                        continue;
                    }
                    latitudes[k] = cand;
                    let c = worst_condition(band_limit, latitudes);
                    if c < best * (1.0 - 1e-9) {
                        best = c;
                    } else {
                        latitudes[k] = old;
                    }
                }
            }
        }
    }
}

/// Builds the hemisphere scheme for odd `band_limit`.
///
/// Construction succeeds for any latitudes inside `[0, π/2]`; degenerate
/// placements show up in [`AngularScheme::condition_numbers`] and make
/// [`forward_sht`] fail.
pub fn make_angular_scheme(band_limit: usize, options: &AngularOptions) -> Result<AngularScheme> {
    check_band_limit(band_limit)?;
    let k_count = ring_count(band_limit);

    let latitudes = match &options.latitudes {
        Some(lat) => {
            if lat.len() != k_count {
                return Err(Error::LengthMismatch { what: "ring latitudes", expected: k_count, actual: lat.len() });
            }
            if let Some(bad) = lat.iter().find(|t| !(t.is_finite() && (0.0..=PI / 2.0).contains(*t))) {
                return Err(Error::invalid(format!("ring colatitude {bad} outside [0, pi/2]")));
            }
            lat.clone()
        }
        None => {
            let mut lat = default_latitudes(band_limit);
            if options.optimize_latitudes {
                optimize_latitudes(band_limit, &mut lat);
            }
            lat
        }
    };
    let offsets = match &options.phi_offsets {
        Some(off) => {
            if off.len() != k_count {
                return Err(Error::LengthMismatch { what: "ring offsets", expected: k_count, actual: off.len() });
            }
            if let Some(bad) = off.iter().find(|p| !p.is_finite()) {
                return Err(Error::invalid(format!("ring offset {bad} is not finite")));
            }
            off.clone()
        }
        None => vec![0.0; k_count],
    };

    let rings: Vec<Ring> = latitudes
        .iter()
        .zip(&offsets)
        .enumerate()
        .map(|(k, (&theta, &phi_offset))| Ring { theta, count: 4 * k + 1, phi_offset })
        .collect();

    let mut ring_start = Vec::with_capacity(k_count);
    let mut directions = Vec::with_capacity(sample_count(band_limit));
    for ring in &rings {
        ring_start.push(directions.len());
        let (st, ct) = ring.theta.sin_cos();
        for j in 0..ring.count {
            let (sp, cp) = ring.phi(j).sin_cos();
            directions.push([st * cp, st * sp, ct]);
        }
    }
    debug_assert_eq!(directions.len(), sample_count(band_limit));

    let legendre = rings
        .iter()
        .map(|ring| (0..band_limit).map(|m| legendre_column(band_limit - 1, m, ring.theta)).collect())
        .collect();

    let orders = (0..band_limit)
        .map(|abs_m| OrderSystem {
            first_ring: abs_m.div_ceil(2),
            first_degree: abs_m + abs_m % 2,
            solver: RealSolver::new(order_matrix(band_limit, abs_m, &latitudes)),
        })
        .collect();

    Ok(AngularScheme { band_limit, rings, ring_start, directions, legendre, orders })
}

impl AngularScheme {
    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn rings(&self) -> &[Ring] {
        &self.rings
    }

    pub fn sample_count(&self) -> usize {
        self.directions.len()
    }

    /// Unit vectors in acquisition order (ring by ring, longitude ascending).
    pub fn directions(&self) -> &[[f64; 3]] {
        &self.directions
    }

    /// `(theta, phi)` of every sample in acquisition order.
    pub fn angles(&self) -> Vec<(f64, f64)> {
        self.rings.iter().flat_map(|r| (0..r.count).map(move |j| (r.theta, r.phi(j)))).collect()
    }

    /// Condition number of the per-order system, indexed by `|m|`.
    pub fn condition_numbers(&self) -> Vec<f64> {
        self.orders.iter().map(|o| o.solver.condition()).collect()
    }

    pub fn max_condition(&self) -> f64 {
        self.orders.iter().map(|o| o.solver.condition()).fold(1.0, f64::max)
    }

    fn lambda(&self, ring: usize, degree: usize, order: i64) -> f64 {
        let m = order.unsigned_abs() as usize;
        let v = self.legendre[ring][m][degree - m];
        if order < 0 && m % 2 == 1 {
            -v
        } else {
            v
        }
    }

    /// `Σ_l a_{lm} λ_l^m(θ_k)` over the even degrees present.
    fn ring_profile(&self, coeffs: &ShCoefficients, ring: usize, order: i64) -> Complex64 {
        let m = order.unsigned_abs() as usize;
        let mut acc = Complex64::zero();
        let mut l = m + m % 2;
        while l < self.band_limit {
            acc += coeffs.values[coeff_index(l, order)] * self.lambda(ring, l, order);
            l += 2;
        }
        acc
    }
}

/// Position of `(l, m)` in the coefficient layout: even `l` ascending, then
/// `m = -l..=l`.
pub fn coeff_index(degree: usize, order: i64) -> usize {
    debug_assert!(degree.is_multiple_of(2) && order.unsigned_abs() as usize <= degree);
    degree * degree.saturating_sub(1) / 2 + (order + degree as i64) as usize
}

/// Even-degree spherical harmonic coefficients below an odd band-limit.
#[derive(Debug, Clone, PartialEq)]
pub struct ShCoefficients {
    band_limit: usize,
    values: Vec<Complex64>,
}

impl ShCoefficients {
    pub fn zeros(band_limit: usize) -> Result<Self> {
        check_band_limit(band_limit)?;
        Ok(ShCoefficients { band_limit, values: vec![Complex64::zero(); sample_count(band_limit)] })
    }

    pub fn from_values(band_limit: usize, values: Vec<Complex64>) -> Result<Self> {
        check_band_limit(band_limit)?;
        if values.len() != sample_count(band_limit) {
            return Err(Error::LengthMismatch {
                what: "harmonic coefficients",
                expected: sample_count(band_limit),
                actual: values.len(),
            });
        }
        Ok(ShCoefficients { band_limit, values })
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// `None` for odd degrees or indices outside the band.
    pub fn get(&self, degree: usize, order: i64) -> Option<Complex64> {
        if degree % 2 == 1 || degree >= self.band_limit || order.unsigned_abs() as usize > degree {
            return None;
        }
        Some(self.values[coeff_index(degree, order)])
    }

    pub fn set(&mut self, degree: usize, order: i64, value: Complex64) -> Result<()> {
        if degree % 2 == 1 || degree >= self.band_limit || order.unsigned_abs() as usize > degree {
            return Err(Error::invalid(format!("({degree}, {order}) outside the even-degree band")));
        }
        self.values[coeff_index(degree, order)] = value;
        Ok(())
    }

    /// `(l, m)` pairs in layout order.
    pub fn indices(&self) -> impl Iterator<Item = HarmonicIndex> {
        (0..self.band_limit).step_by(2).flat_map(|l| (-(l as i64)..=l as i64).map(move |m| HarmonicIndex::new(l, m)))
    }

    /// Synthesizes the expansion at an arbitrary direction.
    pub fn evaluate(&self, theta: f64, phi: f64) -> Complex64 {
        let mut acc = Complex64::zero();
        for m in 0..self.band_limit {
            let col = legendre_column(self.band_limit - 1, m, theta);
            let mut l = m + m % 2;
            while l < self.band_limit {
                let lam = col[l - m];
                acc += self.values[coeff_index(l, m as i64)] * Complex64::from_polar(lam, m as f64 * phi);
                if m > 0 {
                    let sign = if m % 2 == 1 { -lam } else { lam };
                    acc += self.values[coeff_index(l, -(m as i64))] * Complex64::from_polar(sign, -(m as f64) * phi);
                }
                l += 2;
            }
        }
        acc
    }

    /// Real spherical-harmonic coefficients for a real signal, same layout:
    /// `r_{l,m} = √2 (-1)^m Re a_{lm}` and `r_{l,-m} = -√2 (-1)^m Im a_{lm}`
    /// for `m > 0`, matching the real basis `√2 (-1)^m Re Y_l^m` /
    /// `√2 (-1)^m Im Y_l^m`.
    pub fn to_real(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.values.len()];
        for idx in self.indices() {
            let (l, m) = (idx.degree, idx.order);
            if m < 0 {
                continue;
            }
            let a = self.values[coeff_index(l, m)];
            if m == 0 {
                out[coeff_index(l, 0)] = a.re;
            } else {
                let s = if m % 2 == 0 { 2.0f64.sqrt() } else { -(2.0f64.sqrt()) };
                out[coeff_index(l, m)] = s * a.re;
                out[coeff_index(l, -m)] = -s * a.im;
            }
        }
        out
    }

    /// Inverse of [`ShCoefficients::to_real`].
    pub fn from_real(band_limit: usize, real: &[f64]) -> Result<Self> {
        let mut out = ShCoefficients::zeros(band_limit)?;
        if real.len() != out.values.len() {
            return Err(Error::LengthMismatch {
                what: "real harmonic coefficients",
                expected: out.values.len(),
                actual: real.len(),
            });
        }
        let h = core::f64::consts::FRAC_1_SQRT_2;
        for l in (0..band_limit).step_by(2) {
            out.values[coeff_index(l, 0)] = Complex64::new(real[coeff_index(l, 0)], 0.0);
            for m in 1..=l as i64 {
                let s = if m % 2 == 0 { h } else { -h };
                let a = Complex64::new(s * real[coeff_index(l, m)], -s * real[coeff_index(l, -m)]);
                out.values[coeff_index(l, m)] = a;
                let conj_sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                out.values[coeff_index(l, -m)] = a.conj() * conj_sign;
            }
        }
        Ok(out)
    }
}

fn check_samples<V>(scheme: &AngularScheme, samples: &[V]) -> Result<()> {
    if samples.len() != scheme.sample_count() {
        return Err(Error::LengthMismatch {
            what: "angular samples",
            expected: scheme.sample_count(),
            actual: samples.len(),
        });
    }
    Ok(())
}

/// Order-recursive forward transform. Exact (to rounding) for signals with
/// even degrees below the band-limit.
pub fn forward_sht<V: Value>(scheme: &AngularScheme, samples: &[V]) -> Result<ShCoefficients> {
    check_samples(scheme, samples)?;
    let l_band = scheme.band_limit;
    for (m, order) in scheme.orders.iter().enumerate() {
        order.solver.check(|| format!("angular order |m| = {m} at band-limit {l_band}"))?;
    }

    // fourier[k][m + 2k] = e^{-imφ0}/M Σ_j f_j e^{-2πi jm/M}, |m| <= 2k
    let fourier: Vec<Vec<Complex64>> = scheme
        .rings
        .iter()
        .zip(&scheme.ring_start)
        .map(|(ring, &start)| {
            let count = ring.count;
            let half = (count / 2) as i64;
            let twiddle: Vec<Complex64> =
                (0..count).map(|t| Complex64::from_polar(1.0, -2.0 * PI * t as f64 / count as f64)).collect();
            let values = &samples[start..start + count];
            (-half..=half)
                .map(|m| {
                    let step = m.rem_euclid(count as i64) as usize;
                    let mut acc = Complex64::zero();
                    let mut t = 0;
                    for v in values {
                        acc += v.to_complex() * twiddle[t];
                        t += step;
                        if t >= count {
                            t -= count;
                        }
                    }
                    acc * Complex64::from_polar(1.0 / count as f64, -(m as f64) * ring.phi_offset)
                })
                .collect()
        })
        .collect();

    let mut coeffs = ShCoefficients::zeros(l_band)?;
    let max_order = (l_band - 1) as i64;
    for abs_m in (0..l_band).rev() {
        let system = &scheme.orders[abs_m];
        let signs: &[i64] = if abs_m == 0 { &[1] } else { &[1, -1] };
        for &sign in signs {
            let m = sign * abs_m as i64;
            let rhs: Vec<Complex64> = (system.first_ring..scheme.rings.len())
                .map(|k| {
                    let ring = &scheme.rings[k];
                    let period = ring.count as i64;
                    let mut g = fourier[k][(m + 2 * k as i64) as usize];
                    let mut alias = m + period;
                    while alias <= max_order {
                        let phase = Complex64::from_polar(1.0, (alias - m) as f64 * ring.phi_offset);
                        g -= scheme.ring_profile(&coeffs, k, alias) * phase;
                        alias += period;
                    }
                    let mut alias = m - period;
                    while alias >= -max_order {
                        let phase = Complex64::from_polar(1.0, (alias - m) as f64 * ring.phi_offset);
                        g -= scheme.ring_profile(&coeffs, k, alias) * phase;
                        alias -= period;
                    }
                    g
                })
                .collect();
            let solution = system.solver.solve(&rhs, || format!("angular order m = {m}"))?;
            let flip = sign < 0 && abs_m % 2 == 1;
            for (j, value) in solution.into_iter().enumerate() {
                let l = system.first_degree + 2 * j;
                coeffs.values[coeff_index(l, m)] = if flip { -value } else { value };
            }
        }
    }
    Ok(coeffs)
}

/// Direct summation of the expansion at every scheme direction.
pub fn inverse_sht(scheme: &AngularScheme, coeffs: &ShCoefficients) -> Result<Vec<Complex64>> {
    if coeffs.band_limit != scheme.band_limit {
        return Err(Error::invalid(format!(
            "coefficient band-limit {} does not match scheme band-limit {}",
            coeffs.band_limit, scheme.band_limit
        )));
    }
    let l_band = scheme.band_limit as i64;
    let mut out = Vec::with_capacity(scheme.sample_count());
    for (k, ring) in scheme.rings.iter().enumerate() {
        let profiles: Vec<Complex64> = (-(l_band - 1)..l_band).map(|m| scheme.ring_profile(coeffs, k, m)).collect();
        for j in 0..ring.count {
            let phi = ring.phi(j);
            let v = profiles
                .iter()
                .zip(-(l_band - 1)..l_band)
                .fold(Complex64::zero(), |acc, (p, m)| acc + p * Complex64::from_polar(1.0, m as f64 * phi));
            out.push(v);
        }
    }
    Ok(out)
}

/// Reference transform: the dense `Y a = f` system with harmonics evaluated
/// pointwise from each direction, factored once by SVD.
#[derive(Debug, Clone)]
pub struct DenseShtOracle {
    band_limit: usize,
    svd: nalgebra::SVD<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    condition: f64,
}

impl DenseShtOracle {
    pub fn new(scheme: &AngularScheme) -> Result<Self> {
        let size = scheme.sample_count();
        let mut basis = DMatrix::<Complex64>::zeros(size, size);
        for (row, (theta, phi)) in scheme.angles().into_iter().enumerate() {
            for l in (0..scheme.band_limit).step_by(2) {
                for m in -(l as i64)..=l as i64 {
                    basis[(row, coeff_index(l, m))] = spherical_harmonic(HarmonicIndex::new(l, m), theta, phi)?;
                }
            }
        }
        let svd = basis.svd(true, true);
        let sv = &svd.singular_values;
        let condition = if sv.min() > 0.0 { sv.max() / sv.min() } else { f64::INFINITY };
        if !(condition.is_finite() && condition <= MAX_CONDITION) {
            return Err(Error::Conditioning { context: format!("dense harmonic system of size {size}"), condition });
        }
        Ok(DenseShtOracle { band_limit: scheme.band_limit, svd, condition })
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn solve<V: Value>(&self, samples: &[V]) -> Result<ShCoefficients> {
        let size = sample_count(self.band_limit);
        if samples.len() != size {
            return Err(Error::LengthMismatch { what: "angular samples", expected: size, actual: samples.len() });
        }
        let rhs = DMatrix::from_iterator(size, 1, samples.iter().map(|v| v.to_complex()));
        let solution = self.svd.solve(&rhs, 0.0).map_err(|e| Error::Conditioning {
            context: format!("dense harmonic solve: {e}"),
            condition: self.condition,
        })?;
        ShCoefficients::from_values(self.band_limit, solution.iter().copied().collect())
    }
}

/// One-shot [`DenseShtOracle`].
pub fn dense_sht_oracle<V: Value>(scheme: &AngularScheme, samples: &[V]) -> Result<ShCoefficients> {
    check_samples(scheme, samples)?;
    DenseShtOracle::new(scheme)?.solve(samples)
}

/// A sample placed on the full sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectedSample<V> {
    pub direction: [f64; 3],
    pub value: V,
    /// True for points inferred by antipodal symmetry.
    pub mirrored: bool,
}

/// Original samples followed by their antipodes carrying the same values.
/// Antipodes that coincide with an existing direction are dropped.
pub fn mirror_to_full_sphere<V: Value>(scheme: &AngularScheme, samples: &[V]) -> Result<Vec<DirectedSample<V>>> {
    check_samples(scheme, samples)?;
    let dirs = scheme.directions();
    let mut out: Vec<DirectedSample<V>> = dirs
        .iter()
        .zip(samples)
        .map(|(&direction, &value)| DirectedSample { direction, value, mirrored: false })
        .collect();
    for (d, &value) in dirs.iter().zip(samples) {
        let anti = [-d[0], -d[1], -d[2]];
        if d[2].abs() < 1e-12 {
            let dup = dirs.iter().any(|e| {
                let dx = e[0] - anti[0];
                let dy = e[1] - anti[1];
                let dz = e[2] - anti[2];
                dx * dx + dy * dy + dz * dz < 1e-24
            });
            if dup {
                continue;
            }
        }
        out.push(DirectedSample { direction: anti, value, mirrored: true });
    }
    Ok(out)
}

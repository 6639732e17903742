//! Synthetic diffusion signals for validation: Gaussian multi-tensor
//! mixtures, random staircase coefficient tables and Rician noise.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
// `Float` is unused whenever std's inherent float methods are linked in.
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::multishell::{forward_spf_with, staircase_index, MultiShellGrid, SpfCoefficients, SpfLayout, SpfMode};
use crate::radial::BConvention;
use crate::{Error, Result};

/// Symmetric positive-definite diffusivity (mm²/s) with a volume fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorComponent {
    diffusivity: [[f64; 3]; 3],
    fraction: f64,
}

impl TensorComponent {
    pub fn new(diffusivity: [[f64; 3]; 3], fraction: f64) -> Result<Self> {
        let d = diffusivity;
        if d.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("diffusivity has non-finite entries"));
        }
        for (i, j) in [(1, 0), (2, 0), (2, 1)] {
            if (d[i][j] - d[j][i]).abs() > 1e-12 * (d[i][j].abs() + d[j][i].abs()).max(f64::MIN_POSITIVE) {
                return Err(Error::invalid("diffusivity is not symmetric"));
            }
        }
        // Sylvester's criterion
        let m1 = d[0][0];
        let m2 = d[0][0] * d[1][1] - d[0][1] * d[1][0];
        let m3 = d[0][0] * (d[1][1] * d[2][2] - d[1][2] * d[2][1]) - d[0][1] * (d[1][0] * d[2][2] - d[1][2] * d[2][0])
            + d[0][2] * (d[1][0] * d[2][1] - d[1][1] * d[2][0]);
        if !(m1 > 0.0 && m2 > 0.0 && m3 > 0.0) {
            return Err(Error::invalid("diffusivity is not positive-definite"));
        }
        if !(0.0..=1.0).contains(&fraction) {
            return Err(Error::invalid(format!("volume fraction {fraction} outside [0, 1]")));
        }
        Ok(TensorComponent { diffusivity, fraction })
    }

    /// Cylindrically symmetric tensor `λ⊥ I + (λ∥ - λ⊥) u uᵀ`.
    pub fn axial(axis: [f64; 3], parallel: f64, perpendicular: f64, fraction: f64) -> Result<Self> {
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::invalid("tensor axis must be non-zero"));
        }
        let u = [axis[0] / norm, axis[1] / norm, axis[2] / norm];
        let mut d = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                d[i][j] = (parallel - perpendicular) * u[i] * u[j] + if i == j { perpendicular } else { 0.0 };
            }
        }
        TensorComponent::new(d, fraction)
    }

    pub fn diffusivity(&self) -> [[f64; 3]; 3] {
        self.diffusivity
    }

    pub fn fraction(&self) -> f64 {
        self.fraction
    }

    /// `ûᵀ D û` for a unit vector.
    pub fn apparent_diffusivity(&self, u: [f64; 3]) -> f64 {
        let d = &self.diffusivity;
        (0..3).map(|i| (0..3).map(|j| u[i] * d[i][j] * u[j]).sum::<f64>()).sum()
    }
}

/// Two equally weighted fibres along x and y with eigenvalues
/// `[1.7, 0.3, 0.3] × 1e-3` mm²/s.
pub fn crossing_phantom() -> [TensorComponent; 2] {
    [
        TensorComponent::axial([1.0, 0.0, 0.0], 1.7e-3, 0.3e-3, 0.5).expect("valid tensor"),
        TensorComponent::axial([0.0, 1.0, 0.0], 1.7e-3, 0.3e-3, 0.5).expect("valid tensor"),
    ]
}

/// `E = Σ_j f_j exp(-b ûᵀ D_j û)`.
pub fn multi_tensor_eval(mixture: &[TensorComponent], b: f64, direction: [f64; 3]) -> Result<f64> {
    if mixture.is_empty() {
        return Err(Error::invalid("mixture has no components"));
    }
    let total: f64 = mixture.iter().map(|c| c.fraction).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("volume fractions sum to {total}, not 1")));
    }
    if !(b.is_finite() && b >= 0.0) {
        return Err(Error::invalid(format!("b-value must be non-negative, got {b}")));
    }
    let norm = direction.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::invalid("direction must be non-zero"));
    }
    let u = [direction[0] / norm, direction[1] / norm, direction[2] / norm];
    Ok(mixture.iter().map(|c| c.fraction * (-b * c.apparent_diffusivity(u)).exp()).sum())
}

/// Per-degree damping `exp(-decay l)`, with `l = 0` always undamped.
fn damping(decay: f64, degree: usize) -> f64 {
    if degree == 0 {
        1.0
    } else {
        (-decay * degree as f64).exp()
    }
}

/// Reproducible random coefficients on the staircase set of `band_limits`
/// (radial orders capped at `radial_orders`). Entries are uniform in
/// `[-1, 1]` (real and imaginary parts), scaled by `exp(-decay l)`, and obey
/// `E_{nl,-m} = (-1)^m conj(E_{nlm})` so the signal is real.
pub fn random_staircase_signal(
    seed: u64,
    band_limits: &[usize],
    radial_orders: usize,
    zeta: f64,
    decay: f64,
) -> Result<SpfCoefficients> {
    let staircase = staircase_index(band_limits);
    let counts = staircase.radial_counts().iter().map(|&c| c.min(radial_orders)).collect();
    let layout = SpfLayout::from_radial_counts(counts)?;
    random_signal_on(seed, layout, zeta, decay)
}

/// Same as [`random_staircase_signal`] on an arbitrary layout.
pub fn random_signal_on(seed: u64, layout: SpfLayout, zeta: f64, decay: f64) -> Result<SpfCoefficients> {
    if decay.is_nan() || decay < 0.0 {
        return Err(Error::invalid(format!("decay must be non-negative, got {decay}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SpfCoefficients::zeros(layout.clone(), zeta, BConvention::Normalized)?;
    for (p, &count) in layout.radial_counts().iter().enumerate() {
        let l = 2 * p;
        let scale = damping(decay, l);
        for n in 0..count {
            for m in 0..=l as i64 {
                let re: f64 = rng.random_range(-1.0..=1.0);
                let im: f64 = if m == 0 { 0.0 } else { rng.random_range(-1.0..=1.0) };
                let v = Complex64::new(re, im) * scale;
                let pos = layout.index(n, l, m).expect("entry in layout");
                out.values_mut()[pos] = v;
                if m > 0 {
                    let neg = layout.index(n, l, -m).expect("entry in layout");
                    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                    out.values_mut()[neg] = v.conj() * sign;
                }
            }
        }
    }
    Ok(out)
}

/// `|v + η₁ + iη₂|` with `η ~ N(0, σ²)`, reproducible under `seed`.
pub fn add_rician_noise(samples: &[f64], sigma: f64, seed: u64) -> Result<Vec<f64>> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::invalid(format!("noise level must be non-negative, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(samples.iter().map(|v| v.abs()).collect());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::invalid(format!("{e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(samples
        .iter()
        .map(|&v| {
            let re = v + normal.sample(&mut rng);
            let im = normal.sample(&mut rng);
            (re * re + im * im).sqrt()
        })
        .collect())
}

/// Samples `mixture` on the grid, reconstructs with `mode`, and returns the
/// relative RMS error `sqrt(Σ(ê - e)² / Σ e²)` over `count` random held-out
/// points with `b` uniform in `[0, b_max]` and uniformly distributed directions.
pub fn held_out_relative_rms(
    grid: &MultiShellGrid,
    mixture: &[TensorComponent],
    mode: SpfMode,
    count: usize,
    seed: u64,
) -> Result<f64> {
    let samples =
        grid.samples().iter().map(|s| multi_tensor_eval(mixture, s.b, s.direction)).collect::<Result<Vec<f64>>>()?;
    let coeffs = forward_spf_with(grid, &samples, mode)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b_max = grid.radial().b_max();
    let (mut err, mut norm) = (0.0, 0.0);
    for _ in 0..count {
        let b = rng.random_range(0.0..=b_max);
        let dir = loop {
            let d: [f64; 3] =
                [StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)];
            if d.iter().map(|c| c * c).sum::<f64>() > 1e-12 {
                break d;
            }
        };
        let truth = multi_tensor_eval(mixture, b, dir)?;
        let rec = coeffs.evaluate_at_b(b, dir)?.re;
        err += (rec - truth) * (rec - truth);
        norm += truth * truth;
    }
    Ok((err / norm).sqrt())
}

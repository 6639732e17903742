//! Self-check of a grid: radial quadrature exactness, angular conditioning,
//! transform round trips and agreement with the dense solver.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use qspace_core::angular::{forward_sht, inverse_sht, AngularScheme, DenseShtOracle, ShCoefficients};
use qspace_core::multishell::{forward_spf, synthesize, MultiShellGrid};
use qspace_core::signals::random_staircase_signal;
use qspace_core::specfun::ln_gamma;

pub const ORTHONORMALITY_TOL: f64 = 1e-12;
pub const MOMENT_TOL: f64 = 1e-11;
/// Relative residual above which the first non-exact moment counts as inexact.
pub const MOMENT_SHARPNESS: f64 = 1e-6;
pub const CONDITION_TOL: f64 = 1e4;
pub const SHT_ROUND_TRIP_TOL: f64 = 1e-10;
pub const SPF_ROUND_TRIP_TOL: f64 = 1e-9;
pub const ORACLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct ValidateOptions {
    pub trials: usize,
    pub seed: u64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions { trials: 25, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// `None` when the quantity could not be computed or is not finite.
    pub value: Option<f64>,
    pub threshold: f64,
    /// `"<="` or `">"`: how `value` must compare to `threshold`.
    pub requirement: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            passed: value <= threshold,
            value: finite(value),
            threshold,
            requirement: "<=",
            detail: None,
        }
    }

    fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check { passed: value > threshold, requirement: ">", ..Check::at_most(name, value, threshold) }
    }

    fn failed(name: impl Into<String>, threshold: f64, requirement: &'static str, detail: String) -> Self {
        Check { name: name.into(), passed: false, value: None, threshold, requirement, detail: Some(detail) }
    }

    fn with_detail(mut self, detail: String) -> Self {
        self.detail = Some(detail);
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ShellReport {
    pub shell: usize,
    pub band_limit: usize,
    pub b: f64,
    pub weight: f64,
    pub sample_count: usize,
    pub ring_latitudes: Vec<f64>,
    /// Condition number of the Legendre system for `|m| = 0..L-1`.
    pub order_conditions: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub shell_count: usize,
    pub b_max: f64,
    pub band_limits: Vec<usize>,
    pub sample_count: usize,
    pub coefficient_count: usize,
    pub trials: usize,
    pub seed: u64,
    pub shells: Vec<ShellReport>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl ValidationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn validate(grid: &MultiShellGrid, options: &ValidateOptions) -> ValidationReport {
    let radial = grid.radial();
    let layout = grid.staircase_layout();
    let mut checks = Vec::new();

    checks.push(
        Check::at_most("sample_budget", (grid.sample_count() as f64 - layout.len() as f64).abs(), 0.0)
            .with_detail(format!("{} samples, {} staircase coefficients", grid.sample_count(), layout.len())),
    );

    let (ortho, moments, sharp) = quadrature_residuals(grid);
    checks.push(Check::at_most("radial_orthonormality", ortho, ORTHONORMALITY_TOL));
    checks.push(Check::at_most("radial_moments_exact", moments, MOMENT_TOL));
    checks.push(Check::above("radial_moment_2n_inexact", sharp, MOMENT_SHARPNESS));

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut shells = Vec::new();
    for (i, scheme) in grid.angular().iter().enumerate() {
        let label = |what: &str| format!("shell{}_{}", i + 1, what);
        let conditions = scheme.condition_numbers();
        let worst = conditions.iter().cloned().fold(0.0, f64::max);
        checks.push(
            Check::at_most(label("sht_condition"), if worst.is_nan() { f64::INFINITY } else { worst }, CONDITION_TOL)
                .with_detail(format!("worst of {} per-order systems", conditions.len())),
        );
        checks.push(match sht_round_trip(scheme, options.trials, &mut rng) {
            Ok(err) => Check::at_most(label("sht_round_trip"), err, SHT_ROUND_TRIP_TOL),
            Err(e) => Check::failed(label("sht_round_trip"), SHT_ROUND_TRIP_TOL, "<=", e.to_string()),
        });
        checks.push(match oracle_agreement(scheme, options.trials, &mut rng) {
            Ok(err) => Check::at_most(label("oracle_agreement"), err, ORACLE_TOL),
            Err(e) => Check::failed(label("oracle_agreement"), ORACLE_TOL, "<=", e.to_string()),
        });
        shells.push(ShellReport {
            shell: i + 1,
            band_limit: scheme.band_limit(),
            b: radial.bvalues()[i],
            weight: radial.weights()[i],
            sample_count: scheme.sample_count(),
            ring_latitudes: scheme.rings().iter().map(|r| r.theta).collect(),
            order_conditions: conditions.into_iter().map(finite).collect(),
        });
    }

    checks.push(match spf_round_trip(grid, options.trials, options.seed) {
        Ok(err) => Check::at_most("spf_round_trip", err, SPF_ROUND_TRIP_TOL),
        Err(e) => Check::failed("spf_round_trip", SPF_ROUND_TRIP_TOL, "<=", e.to_string()),
    });

    let passed = checks.iter().all(|c| c.passed);
    ValidationReport {
        shell_count: grid.shell_count(),
        b_max: radial.b_max(),
        band_limits: grid.band_limits(),
        sample_count: grid.sample_count(),
        coefficient_count: layout.len(),
        trials: options.trials,
        seed: options.seed,
        shells,
        checks,
        passed,
    }
}

/// Returns the worst orthonormality residual, the worst relative Gaussian
/// moment residual for `j < 2N`, and the relative residual at `j = 2N`.
pub fn quadrature_residuals(grid: &MultiShellGrid) -> (f64, f64, f64) {
    let radial = grid.radial();
    let n = radial.shell_count();
    let w = radial.weights();
    let mut ortho = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let sum: f64 = (0..n).map(|i| w[i] * radial.basis_at_shell(i)[a] * radial.basis_at_shell(i)[b]).sum();
            let expect = if a == b { 1.0 } else { 0.0 };
            ortho = ortho.max((sum - expect).abs());
        }
    }
    let zeta = radial.zeta();
    let moment = |j: usize| {
        let sum: f64 = radial
            .radii()
            .iter()
            .zip(w)
            .map(|(&q, &wi)| {
                let q2 = q * q;
                wi * q2.powi(j as i32) * (-q2 / zeta).exp()
            })
            .sum();
        let ln_exact = (0.5f64).ln() + ln_gamma(j as f64 + 1.5) + (j as f64 + 1.5) * zeta.ln();
        (sum / ln_exact.exp() - 1.0).abs()
    };
    let exact = (0..2 * n).map(moment).fold(0.0, f64::max);
    (ortho, exact, moment(2 * n))
}

fn random_sh(band_limit: usize, rng: &mut ChaCha8Rng) -> ShCoefficients {
    let mut c = ShCoefficients::zeros(band_limit).expect("odd band-limit");
    for v in c.values_mut() {
        *v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    c
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn sht_round_trip(scheme: &AngularScheme, trials: usize, rng: &mut ChaCha8Rng) -> qspace_core::Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let c = random_sh(scheme.band_limit(), rng);
        let samples = inverse_sht(scheme, &c)?;
        let back = forward_sht(scheme, &samples)?;
        worst = worst.max(max_diff(back.values(), c.values()));
    }
    Ok(worst)
}

fn oracle_agreement(scheme: &AngularScheme, trials: usize, rng: &mut ChaCha8Rng) -> qspace_core::Result<f64> {
    let oracle = DenseShtOracle::new(scheme)?;
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let samples: Vec<Complex64> = (0..scheme.sample_count())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let fast = forward_sht(scheme, &samples)?;
        let dense = oracle.solve(&samples)?;
        worst = worst.max(max_diff(fast.values(), dense.values()));
    }
    Ok(worst)
}

fn spf_round_trip(grid: &MultiShellGrid, trials: usize, seed: u64) -> qspace_core::Result<f64> {
    let mut worst = 0.0f64;
    let zeta = grid.radial().zeta();
    for t in 0..trials {
        let truth =
            random_staircase_signal(seed.wrapping_add(t as u64), &grid.band_limits(), grid.shell_count(), zeta, 0.0)?;
        let samples = synthesize(grid, &truth)?;
        let back = forward_spf(grid, &samples)?;
        worst = worst.max(max_diff(back.values(), truth.values()));
    }
    Ok(worst)
}

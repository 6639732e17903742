//! Command implementations, kept free of argument parsing so they can be
//! driven from tests.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use qspace_core::angular::{mirror_to_full_sphere, AngularOptions};
use qspace_core::multishell::{
    build_grid_with, forward_spf_with, synthesize, MultiShellGrid, SpfCoefficients, SpfLayout, SpfMode,
};
use qspace_core::radial::BConvention;

use crate::descriptor::SchemeDescriptor;
use crate::formats::{self, Query};
use crate::CliError;

/// Grid parameters as given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub shells: usize,
    pub b_max: f64,
    pub band_limits: Vec<usize>,
    pub convention: BConvention,
    /// `(shell index from 0, ring latitudes)` overrides.
    pub latitudes: Vec<(usize, Vec<f64>)>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            shells: 4,
            b_max: 8000.0,
            band_limits: vec![3, 5, 9, 11],
            convention: BConvention::Normalized,
            latitudes: Vec::new(),
        }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<MultiShellGrid, CliError> {
        let mut options = vec![AngularOptions::default(); self.band_limits.len()];
        for (shell, lat) in &self.latitudes {
            let slot = options.get_mut(*shell).ok_or_else(|| {
                CliError::Validation(format!(
                    "latitude override for shell {} but the grid has {} shells",
                    shell + 1,
                    self.band_limits.len()
                ))
            })?;
            *slot = AngularOptions { latitudes: Some(lat.clone()), ..AngularOptions::default() };
        }
        Ok(build_grid_with(self.shells, self.b_max, &self.band_limits, self.convention, &options)?)
    }
}

/// Parses `SHELL:theta,theta,...` with a 1-based shell index.
pub fn parse_latitude_override(s: &str) -> Result<(usize, Vec<f64>), String> {
    let (shell, list) = s.split_once(':').ok_or("expected SHELL:theta,theta,...")?;
    let shell: usize = shell.trim().parse().map_err(|_| format!("invalid shell index {:?}", shell))?;
    if shell == 0 {
        return Err("shell indices start at 1".into());
    }
    let lat = list
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("invalid latitude {:?}", t)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((shell - 1, lat))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridFormat {
    Bvec,
    Json,
    Csv,
}

/// A piece of output bound for a file, or stdout when `path` is `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub path: Option<PathBuf>,
    pub contents: String,
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Renders the grid. With a prefix, `bvec` produces `PREFIX.bvals` and
/// `PREFIX.bvecs`, `json` produces `PREFIX.json`, `csv` produces
/// `PREFIX.csv`, and `mirror` adds `PREFIX.mirror.csv`.
pub fn grid_outputs(
    grid: &MultiShellGrid,
    format: GridFormat,
    mirror: bool,
    prefix: Option<&Path>,
) -> Result<Vec<Output>, CliError> {
    let at = |suffix: &str| prefix.map(|p| with_suffix(p, suffix));
    let mut out = match format {
        GridFormat::Bvec => vec![
            Output { path: at(".bvals"), contents: formats::write_bvals(grid) },
            Output { path: at(".bvecs"), contents: formats::write_bvecs(grid) },
        ],
        GridFormat::Json => vec![Output { path: at(".json"), contents: SchemeDescriptor::from_grid(grid).to_json() }],
        GridFormat::Csv => vec![Output { path: at(".csv"), contents: formats::write_grid_csv(grid) }],
    };
    if mirror {
        out.push(Output { path: at(".mirror.csv"), contents: formats::write_mirror_csv(&mirror_points(grid)?) });
    }
    Ok(out)
}

pub fn mirror_points(
    grid: &MultiShellGrid,
) -> Result<Vec<(usize, f64, qspace_core::angular::DirectedSample<f64>)>, CliError> {
    let mut points = Vec::new();
    for (i, scheme) in grid.angular().iter().enumerate() {
        let b = grid.radial().bvalues()[i];
        let zeros = vec![0.0; scheme.sample_count()];
        points.extend(mirror_to_full_sphere(scheme, &zeros)?.into_iter().map(|p| (i, b, p)));
    }
    Ok(points)
}

pub fn write_outputs(outputs: &[Output]) -> Result<(), CliError> {
    use std::io::Write;
    for o in outputs {
        match &o.path {
            Some(p) => write_file(p, &o.contents)?,
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(o.contents.as_bytes())
                    .map_err(|error| CliError::Io { path: PathBuf::from("<stdout>"), error })?;
            }
        }
    }
    Ok(())
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|error| CliError::Io { path: path.to_path_buf(), error })
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|error| CliError::Io { path: path.to_path_buf(), error })
}

pub fn load_scheme(path: &Path) -> Result<MultiShellGrid, CliError> {
    SchemeDescriptor::from_json(&read_file(path)?).and_then(|d| d.to_grid()).map_err(|e| match e {
        CliError::Descriptor(msg) => CliError::Descriptor(format!("{}: {}", path.display(), msg)),
        other => other,
    })
}

#[derive(Debug, Clone)]
pub struct ForwardResult {
    pub coefficients: SpfCoefficients,
    /// Largest absolute difference between the samples and the expansion
    /// resynthesized on the grid. Zero up to rounding in staircase mode.
    pub residual: f64,
}

pub fn forward(grid: &MultiShellGrid, samples: &[f64], mode: SpfMode) -> Result<ForwardResult, CliError> {
    if samples.len() != grid.sample_count() {
        return Err(CliError::Validation(format!(
            "sample count mismatch: scheme expects {} samples, file has {}",
            grid.sample_count(),
            samples.len()
        )));
    }
    let coefficients = forward_spf_with(grid, samples, mode)?;
    let resynth = synthesize(grid, &coefficients)?;
    let residual = resynth.iter().zip(samples).map(|(r, s)| (r.re - s).abs().max(r.im.abs())).fold(0.0, f64::max);
    Ok(ForwardResult { coefficients, residual })
}

pub fn evaluate(
    grid: &MultiShellGrid,
    layout: SpfLayout,
    values: Vec<Complex64>,
    queries: &[Query],
) -> Result<Vec<Complex64>, CliError> {
    let radial = grid.radial();
    let coeffs = SpfCoefficients::new(layout, radial.zeta(), radial.convention(), values)?;
    queries.iter().map(|q| coeffs.evaluate_at_b(q.b, q.direction).map_err(CliError::from)).collect()
}

//! Lossless JSON description of a grid.

use serde::{Deserialize, Serialize};

use qspace_core::angular::AngularOptions;
use qspace_core::multishell::{build_grid_with, MultiShellGrid};
use qspace_core::radial::BConvention;

use crate::CliError;

pub const DESCRIPTOR_VERSION: &str = "qspace-scheme/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum ConventionDescriptor {
    Normalized,
    Physical { tau: f64 },
}

impl From<BConvention> for ConventionDescriptor {
    fn from(c: BConvention) -> Self {
        match c {
            BConvention::Normalized => ConventionDescriptor::Normalized,
            BConvention::Physical { tau } => ConventionDescriptor::Physical { tau },
        }
    }
}

impl From<&ConventionDescriptor> for BConvention {
    fn from(c: &ConventionDescriptor) -> Self {
        match *c {
            ConventionDescriptor::Normalized => BConvention::Normalized,
            ConventionDescriptor::Physical { tau } => BConvention::Physical { tau },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingDescriptor {
    pub theta: f64,
    pub phi_offset: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellDescriptor {
    pub band_limit: usize,
    pub b: f64,
    pub q: f64,
    pub weight: f64,
    pub rings: Vec<RingDescriptor>,
}

/// Everything needed to rebuild a grid exactly. Derived fields (`zeta`,
/// b-values, weights) are informational and checked on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeDescriptor {
    pub version: String,
    pub shell_count: usize,
    pub b_max: f64,
    pub convention: ConventionDescriptor,
    pub band_limits: Vec<usize>,
    pub zeta: f64,
    pub zeta_b: f64,
    pub sample_count: usize,
    pub shells: Vec<ShellDescriptor>,
}

impl SchemeDescriptor {
    pub fn from_grid(grid: &MultiShellGrid) -> Self {
        let radial = grid.radial();
        let shells = grid
            .angular()
            .iter()
            .enumerate()
            .map(|(i, scheme)| ShellDescriptor {
                band_limit: scheme.band_limit(),
                b: radial.bvalues()[i],
                q: radial.radii()[i],
                weight: radial.weights()[i],
                rings: scheme
                    .rings()
                    .iter()
                    .map(|r| RingDescriptor { theta: r.theta, phi_offset: r.phi_offset, count: r.count })
                    .collect(),
            })
            .collect();
        SchemeDescriptor {
            version: DESCRIPTOR_VERSION.to_string(),
            shell_count: grid.shell_count(),
            b_max: radial.b_max(),
            convention: radial.convention().into(),
            band_limits: grid.band_limits(),
            zeta: radial.zeta(),
            zeta_b: radial.zeta_b(),
            sample_count: grid.sample_count(),
            shells,
        }
    }

    /// Rebuilds the grid with the recorded ring placement.
    pub fn to_grid(&self) -> Result<MultiShellGrid, CliError> {
        if self.version != DESCRIPTOR_VERSION {
            return Err(CliError::Descriptor(format!("unsupported version {:?}", self.version)));
        }
        if self.shells.len() != self.shell_count || self.band_limits.len() != self.shell_count {
            return Err(CliError::Descriptor(format!(
                "{} shells declared but {} shell records and {} band-limits present",
                self.shell_count,
                self.shells.len(),
                self.band_limits.len()
            )));
        }
        let options: Vec<AngularOptions> = self
            .shells
            .iter()
            .map(|s| AngularOptions {
                latitudes: Some(s.rings.iter().map(|r| r.theta).collect()),
                phi_offsets: Some(s.rings.iter().map(|r| r.phi_offset).collect()),
                optimize_latitudes: false,
            })
            .collect();
        let grid =
            build_grid_with(self.shell_count, self.b_max, &self.band_limits, (&self.convention).into(), &options)?;
        if grid.sample_count() != self.sample_count {
            return Err(CliError::Descriptor(format!(
                "descriptor declares {} samples, rebuilt grid has {}",
                self.sample_count,
                grid.sample_count()
            )));
        }
        Ok(grid)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("descriptor serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Descriptor(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qspace_core::multishell::build_grid;

    #[test]
    fn descriptor_rebuilds_identical_grid() {
        let grid = build_grid(4, 8000.0, &[3, 5, 9, 11], BConvention::Physical { tau: 0.03 }).unwrap();
        let desc = SchemeDescriptor::from_grid(&grid);
        let parsed = SchemeDescriptor::from_json(&desc.to_json()).unwrap();
        assert_eq!(parsed, desc);
        let rebuilt = parsed.to_grid().unwrap();
        assert_eq!(rebuilt.samples(), grid.samples());
        assert_eq!(SchemeDescriptor::from_grid(&rebuilt), desc);
    }

    #[test]
    fn version_is_checked() {
        let grid = build_grid(1, 1000.0, &[1], BConvention::Normalized).unwrap();
        let mut desc = SchemeDescriptor::from_grid(&grid);
        desc.version = "other".into();
        assert!(matches!(desc.to_grid(), Err(CliError::Descriptor(_))));
    }
}

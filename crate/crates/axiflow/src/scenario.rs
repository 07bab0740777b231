//! Canonical initial data: closed analytic profiles that lie in the
//! admissible set and exercise the distinct singularity types.
//!
//! All constructors sample the grid's stored sin table, so endpoint
//! values are exactly zero and mirror-symmetric data is bit-exactly
//! symmetric (the flow then conserves c to the last bit).

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::profile::HProfile;

/// Analytic scenario selector; `build` samples it on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    /// Round sphere of radius d0: h = d0²sin²θ/2, shrinks to a point at
    /// t = d0²/4.
    Sphere { d0: f64 },
    /// Ellipsoid with axial half-width d0 and radial scale beta·d0:
    /// h = β²d0²sin²θ/2 (u = β√(d0²−x²)).
    Ellipsoid { d0: f64, beta: f64 },
    /// Symmetric dumbbell h = d0²sin²θ(1−μ sin²θ)/2 with neck at π/2;
    /// admissible for every μ ∈ (0,1), pinches for μ near 1.
    Dumbbell { d0: f64, mu: f64 },
    /// h = sin²θ + sin³θ on d = 1: even and positive with h″(0) =
    /// h″(π) = 2, but only C¹ᐧ⁵-regular in the physical variable — the
    /// canonical admissible-but-not-smooth datum.
    Sin2PlusSin3,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Scenario::Sphere { d0 } => d0 > 0.0,
            Scenario::Ellipsoid { d0, beta } => d0 > 0.0 && beta > 0.0,
            Scenario::Dumbbell { d0, mu } => d0 > 0.0 && mu > 0.0 && mu < 1.0,
            Scenario::Sin2PlusSin3 => true,
        };
        if !ok {
            return Err(Error::InvalidInput(format!(
                "scenario parameters out of range: {self:?} (need d0 > 0, beta > 0, mu in (0,1))"
            )));
        }
        Ok(())
    }

    pub fn build(&self, grid: &Grid) -> Result<HProfile> {
        self.validate()?;
        match *self {
            Scenario::Sphere { d0 } => sphere(grid, d0),
            Scenario::Ellipsoid { d0, beta } => ellipsoid(grid, d0, beta),
            Scenario::Dumbbell { d0, mu } => dumbbell(grid, d0, mu),
            Scenario::Sin2PlusSin3 => sin2_plus_sin3(grid),
        }
    }
}

pub fn sphere(grid: &Grid, d0: f64) -> Result<HProfile> {
    Scenario::Sphere { d0 }.validate()?;
    let vals = grid
        .sin_theta()
        .iter()
        .map(|&s| 0.5 * d0 * d0 * s * s)
        .collect();
    HProfile::new(vals, 0.0, d0)
}

pub fn ellipsoid(grid: &Grid, d0: f64, beta: f64) -> Result<HProfile> {
    Scenario::Ellipsoid { d0, beta }.validate()?;
    let vals = grid
        .sin_theta()
        .iter()
        .map(|&s| 0.5 * beta * beta * d0 * d0 * s * s)
        .collect();
    HProfile::new(vals, 0.0, d0)
}

pub fn dumbbell(grid: &Grid, d0: f64, mu: f64) -> Result<HProfile> {
    Scenario::Dumbbell { d0, mu }.validate()?;
    let vals = grid
        .sin_theta()
        .iter()
        .map(|&s| 0.5 * d0 * d0 * s * s * (1.0 - mu * s * s))
        .collect();
    HProfile::new(vals, 0.0, d0)
}

pub fn sin2_plus_sin3(grid: &Grid) -> Result<HProfile> {
    let vals = grid
        .sin_theta()
        .iter()
        .map(|&s| s * s + s * s * s)
        .collect();
    HProfile::new(vals, 0.0, 1.0)
}

//! Validity of the single-channel (Born-Oppenheimer) reduction.
//!
//! The dark channel stays decoupled while the motional coupling to the
//! bright pair is slow compared with the energy gap. Both sides are bounded
//! with worst-case values rather than pointwise trap data: the velocity by
//! sqrt(2E/M̃) from the atom's energy scale, the potential shift by E
//! itself. That gives
//!
//!   lhs = (|g|/r)·sqrt(2E/M̃)        (coupling bound, rad·s⁻¹)
//!   rhs = ½·(sqrt(4ξ(r+|z|) + E²) − E)   (gap lower bound, rad·s⁻¹)
//!
//! and the reduction is trusted where lhs ≤ criterion·rhs. Along any ray
//! from the origin lhs falls like 1/r while rhs grows with r, so the ratio
//! crosses any criterion level exactly once; that crossing is the threshold
//! radius. The gap bound is derived for zero one-photon detuning only and
//! the functions refuse Δ ≠ 0.

use crate::fields::{AtomConfig, BeamConfig, FieldsError, DEFAULT_EXCLUSION_RADIUS};
use crate::geometry::Vec3;
use crate::numeric::bisect_decreasing_log;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Relative bracket width of the threshold bisection. Tight enough that the
/// ratio at the returned radius sits within 1e-3 of the criterion even
/// where the ratio falls as steeply as r⁻².
pub const THRESHOLD_REL_TOL: f64 = 2e-4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AdiabaticError {
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("the adiabatic criterion is derived for zero detuning, got delta = {delta}")]
    UnsupportedDetuning { delta: f64 },
    #[error(
        "no threshold: ratio {ratio:.3e} already below criterion {criterion} at r = {r_min:.3e} m"
    )]
    NoThreshold {
        r_min: f64,
        ratio: f64,
        criterion: f64,
    },
}

impl From<FieldsError> for AdiabaticError {
    fn from(e: FieldsError) -> AdiabaticError {
        AdiabaticError::DomainError(e.to_string())
    }
}

/// Upper bound (|g|/r)·sqrt(2E/M̃) on the motional coupling, rad·s⁻¹.
pub fn coupling_bound(g: i32, atom: &AtomConfig, r: f64) -> Result<f64, AdiabaticError> {
    if !(r > 0.0) {
        return Err(AdiabaticError::DomainError(format!(
            "coupling bound needs r > 0, got {r}"
        )));
    }
    let v = (2.0 * atom.energy_scale / atom.mass_over_hbar).sqrt();
    Ok(g.unsigned_abs() as f64 / r * v)
}

/// Lower bound ½·(sqrt(4ξ(r+|z|) + E²) − E) on the gap to the bright pair,
/// rad·s⁻¹, evaluated without cancellation.
pub fn gap_bound(
    beam: &BeamConfig,
    atom: &AtomConfig,
    r: f64,
    z: f64,
) -> Result<f64, AdiabaticError> {
    if beam.delta != 0.0 {
        return Err(AdiabaticError::UnsupportedDetuning { delta: beam.delta });
    }
    if !(r >= z.abs()) {
        return Err(AdiabaticError::DomainError(format!(
            "gap bound needs r >= |z|, got r = {r}, z = {z}"
        )));
    }
    let e = atom.energy_scale;
    let s = 4.0 * beam.xi * (r + z.abs());
    Ok(0.5 * s / ((e * e + s).sqrt() + e))
}

/// Coupling bound over gap bound; +inf where the gap bound vanishes.
pub fn adiabatic_ratio(
    beam: &BeamConfig,
    atom: &AtomConfig,
    r: f64,
    z: f64,
) -> Result<f64, AdiabaticError> {
    let lhs = coupling_bound(beam.g, atom, r)?;
    let rhs = gap_bound(beam, atom, r, z)?;
    Ok(if rhs > 0.0 { lhs / rhs } else { f64::INFINITY })
}

/// Threshold radius along one direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdReport {
    /// m.
    pub radius: f64,
    pub criterion: f64,
    /// Ratio re-evaluated at `radius`; within 1e-3 of `criterion`.
    pub ratio_at_radius: f64,
    /// Unit vector of the scanned ray.
    pub direction: Vec3,
}

/// Radius where the coupling/gap ratio falls to `criterion` along
/// `direction`, by bisection on a logarithmic radius axis.
pub fn threshold_radius(
    beam: &BeamConfig,
    atom: &AtomConfig,
    direction: Vec3,
    criterion: f64,
) -> Result<ThresholdReport, AdiabaticError> {
    beam.validate()?;
    atom.validate()?;
    if !(criterion > 0.0 && criterion <= 1.0) {
        return Err(AdiabaticError::DomainError(format!(
            "criterion must lie in (0, 1], got {criterion}"
        )));
    }
    let len = crate::geometry::norm(direction);
    if !(len > 0.0 && len.is_finite()) {
        return Err(AdiabaticError::DomainError(
            "direction must be a nonzero finite vector".into(),
        ));
    }
    let unit = crate::geometry::scale(direction, 1.0 / len);
    let ratio = |r: f64| {
        adiabatic_ratio(beam, atom, r, r * unit[2]).expect("ray geometry is always consistent")
    };

    let r_min = DEFAULT_EXCLUSION_RADIUS;
    let at_min = ratio(r_min);
    if at_min < criterion {
        return Err(AdiabaticError::NoThreshold {
            r_min,
            ratio: at_min,
            criterion,
        });
    }
    let mut hi = 8.0 * r_min;
    while ratio(hi) > criterion {
        hi *= 8.0;
        if hi > 1e12 {
            return Err(AdiabaticError::DomainError(
                "ratio never fell below the criterion out to 1e12 m".into(),
            ));
        }
    }
    let radius = bisect_decreasing_log(ratio, r_min, hi, criterion, THRESHOLD_REL_TOL);
    Ok(ThresholdReport {
        radius,
        criterion,
        ratio_at_radius: ratio(radius),
        direction: unit,
    })
}

/// Rectangular (ρ, z) cell grid for [`region_map`], cell-centred.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionGrid {
    pub n_rho: usize,
    pub n_z: usize,
    /// m.
    pub rho_max: f64,
    /// m.
    pub z_min: f64,
    /// m.
    pub z_max: f64,
}

impl RegionGrid {
    pub fn validate(&self) -> Result<(), AdiabaticError> {
        if self.n_rho == 0 || self.n_z == 0 {
            return Err(AdiabaticError::DomainError(
                "region grid needs at least one cell per axis".into(),
            ));
        }
        if !(self.rho_max > 0.0 && self.z_max > self.z_min)
            || !(self.rho_max.is_finite() && self.z_min.is_finite() && self.z_max.is_finite())
        {
            return Err(AdiabaticError::DomainError(format!(
                "region grid needs rho_max > 0 and z_max > z_min, got ({}, {}, {})",
                self.rho_max, self.z_min, self.z_max
            )));
        }
        Ok(())
    }
}

/// One evaluated cell of the validity map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdiabaticSample {
    /// m.
    pub rho: f64,
    /// m.
    pub z: f64,
    /// rad·s⁻¹.
    pub lhs: f64,
    /// rad·s⁻¹.
    pub rhs: f64,
    pub ratio: f64,
    pub valid: bool,
}

/// Validity mask over a cell grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionMap {
    pub criterion: f64,
    pub n_rho: usize,
    pub n_z: usize,
    pub valid_fraction: f64,
    /// Row-major over (ρ, z), ρ outermost.
    pub samples: Vec<AdiabaticSample>,
}

/// Evaluates both bounds on every cell of `grid`. The beam is taken as
/// given (a switched-off beam simply yields an everywhere-invalid map), but
/// a nonzero detuning is still refused.
pub fn region_map(
    beam: &BeamConfig,
    atom: &AtomConfig,
    grid: &RegionGrid,
    criterion: f64,
) -> Result<RegionMap, AdiabaticError> {
    grid.validate()?;
    if !(criterion > 0.0 && criterion <= 1.0) {
        return Err(AdiabaticError::DomainError(format!(
            "criterion must lie in (0, 1], got {criterion}"
        )));
    }
    if beam.delta != 0.0 {
        return Err(AdiabaticError::UnsupportedDetuning { delta: beam.delta });
    }
    let h_rho = grid.rho_max / grid.n_rho as f64;
    let h_z = (grid.z_max - grid.z_min) / grid.n_z as f64;
    let samples: Vec<AdiabaticSample> = (0..grid.n_rho * grid.n_z)
        .into_par_iter()
        .map(|idx| {
            let rho = (((idx / grid.n_z) as f64) + 0.5) * h_rho;
            let z = grid.z_min + (((idx % grid.n_z) as f64) + 0.5) * h_z;
            let r = rho.hypot(z);
            let lhs = coupling_bound(beam.g, atom, r).expect("cell radius is positive");
            let rhs = gap_bound(beam, atom, r, z).expect("cell geometry is consistent");
            AdiabaticSample {
                rho,
                z,
                lhs,
                rhs,
                ratio: if rhs > 0.0 { lhs / rhs } else { f64::INFINITY },
                valid: rhs > 0.0 && lhs <= criterion * rhs,
            }
        })
        .collect();
    let valid = samples.iter().filter(|s| s.valid).count();
    Ok(RegionMap {
        criterion,
        n_rho: grid.n_rho,
        n_z: grid.n_z,
        valid_fraction: valid as f64 / samples.len() as f64,
        samples,
    })
}

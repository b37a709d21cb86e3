//! Shaped Raman beams, the trap potential, and the pointwise eigensystem of
//! the atom's internal Hamiltonian.
//!
//! Two beams co-propagate along +z with common wavevector k; the probe
//! carries an optical vortex of winding number g. Their intensity envelopes
//! grow linearly away from the origin,
//!
//! ```text
//! |Ω_p|² = ξ (r + z),     |Ω_c|² = ξ [(2η−1) r − z],
//! ```
//!
//! so both are non-negative everywhere (r ≥ |z|, η ≥ 1) and vanish together
//! only at the origin. At η = 1 the control intensity also vanishes on the
//! +z axis; for η > 1 it is positive everywhere off the origin.
//!
//! Over the internal basis (|1⟩, |2⟩, |e⟩) the local Hamiltonian is
//!
//! ```text
//!     ⎡  V    0   Ω_p* ⎤
//! H = ⎢  0    V   Ω_c* ⎥ ,
//!     ⎣ Ω_p  Ω_c   Δ   ⎦
//! ```
//!
//! with spectrum E₀ = V and E± = V + ½(Δ̃ ± √(4Ω² + Δ̃²)), where Δ̃ = Δ − V
//! and Ω² = |Ω_p|² + |Ω_c|². The E₀ eigenvector is the dark state
//! (Ω_p|2⟩ − Ω_c|1⟩)/Ω: it carries no excited-state amplitude, and as the
//! atom moves its position dependence imprints a geometric vector potential
//! on the centre of mass.
//!
//! For g ≠ 0 no single-valued smooth dark section covers all directions, so
//! the residual phase freedom is fixed per gauge patch: patch A is regular
//! around the +z axis, patch B around the −z axis, and they overlap in a band
//! about the equator where the two sections differ by the transition function
//! e^{igφ}.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::Position;

/// Radius of the default exclusion ball around the origin, in meters.
///
/// Both Rabi couplings vanish at the origin, closing the gap between the dark
/// level and the bright pair, so the adiabatic separation that every consumer
/// of [`EigenFrame`] relies on breaks down there.
pub const DEFAULT_EXCLUSION_RADIUS: f64 = 1e-9;

/// Half-width in polar angle of the equatorial band where the gauge patches
/// overlap.
pub const OVERLAP_HALF_WIDTH: f64 = std::f64::consts::PI / 12.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FieldsError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(
        "the Rabi couplings vanish here, the internal levels are degenerate \
         and the dark state is undefined"
    )]
    DegeneratePoint,
}

/// Gauge patch on which the dark section's phase is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Patch {
    /// Covers polar angles θ ∈ [0, π/2 + δ); regular on the +z axis.
    A,
    /// Covers polar angles θ ∈ (π/2 − δ, π]; regular on the −z axis.
    B,
}

impl Patch {
    pub fn other(self) -> Patch {
        match self {
            Patch::A => Patch::B,
            Patch::B => Patch::A,
        }
    }

    /// Membership with the default overlap half-width.
    pub fn contains(self, theta: f64) -> bool {
        self.contains_with(theta, OVERLAP_HALF_WIDTH)
    }

    pub fn contains_with(self, theta: f64, overlap_half_width: f64) -> bool {
        let half = std::f64::consts::FRAC_PI_2;
        match self {
            Patch::A => theta >= 0.0 && theta < half + overlap_half_width,
            Patch::B => theta > half - overlap_half_width && theta <= std::f64::consts::PI,
        }
    }
}

/// Geometry of the two beams.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamConfig {
    /// Intensity slope ξ, rad²·s⁻²·m⁻¹.
    pub xi: f64,
    /// Winding number of the probe beam's optical vortex.
    pub g: i32,
    /// Deformation parameter of the control envelope, ≥ 1.
    #[serde(default = "default_eta")]
    pub eta: f64,
    /// Common wavevector along z, m⁻¹.
    #[serde(default)]
    pub k: f64,
    /// One-photon detuning Δ of the excited level, rad·s⁻¹.
    #[serde(default)]
    pub delta: f64,
}

fn default_eta() -> f64 {
    1.0
}

impl BeamConfig {
    pub fn validate(&self) -> Result<(), FieldsError> {
        if !(self.xi > 0.0 && self.xi.is_finite()) {
            return Err(FieldsError::InvalidConfig(format!(
                "beam intensity slope xi must be positive and finite, got {}",
                self.xi
            )));
        }
        if !(self.eta >= 1.0 && self.eta.is_finite()) {
            return Err(FieldsError::InvalidConfig(format!(
                "beam deformation eta must be at least 1, got {}",
                self.eta
            )));
        }
        if !self.k.is_finite() || !self.delta.is_finite() {
            return Err(FieldsError::InvalidConfig(
                "beam wavevector k and detuning delta must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// Mass and energy scale of the centre-of-mass motion, in ħ = 1 units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    /// M/ħ, s·m⁻².
    pub mass_over_hbar: f64,
    /// Characteristic kinetic energy E/ħ of the wavepacket, rad·s⁻¹.
    pub energy_scale: f64,
}

impl AtomConfig {
    /// Converts SI inputs (kg and J) once at the boundary.
    pub fn from_si(mass_kg: f64, energy_joule: f64) -> Self {
        AtomConfig {
            mass_over_hbar: mass_kg / crate::HBAR,
            energy_scale: energy_joule / crate::HBAR,
        }
    }

    pub fn validate(&self) -> Result<(), FieldsError> {
        if !(self.mass_over_hbar > 0.0 && self.mass_over_hbar.is_finite()) {
            return Err(FieldsError::InvalidConfig(format!(
                "mass_over_hbar must be positive and finite, got {}",
                self.mass_over_hbar
            )));
        }
        if !(self.energy_scale >= 0.0 && self.energy_scale.is_finite()) {
            return Err(FieldsError::InvalidConfig(format!(
                "energy_scale must be non-negative and finite, got {}",
                self.energy_scale
            )));
        }
        Ok(())
    }
}

/// External potential seen by the two ground levels.
///
/// The excited level is untrapped and both ground levels see the same
/// potential, so the trap shifts the dark level rigidly and enters the
/// internal problem only through the effective detuning Δ − V.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TrapConfig {
    /// Free motion, V = 0.
    None,
    /// Isotropic potential tabulated against radius (m, rad·s⁻¹), linearly
    /// interpolated and clamped outside the table.
    Spherical { r: Vec<f64>, v: Vec<f64> },
    /// Harmonic confinement centred on the z axis at height z₀:
    /// V = ½ (M/ħ) [ω² ρ² + ω_z² (z − z₀)²].
    Harmonic { omega: f64, omega_z: f64, z0: f64 },
}

impl TrapConfig {
    pub fn validate(&self) -> Result<(), FieldsError> {
        match self {
            TrapConfig::None => Ok(()),
            TrapConfig::Spherical { r, v } => {
                if r.len() != v.len() || r.len() < 2 {
                    return Err(FieldsError::InvalidConfig(
                        "spherical trap table needs matching r and v columns with at least \
                         two rows"
                            .into(),
                    ));
                }
                if !r.windows(2).all(|w| w[0] < w[1]) || !r.iter().all(|x| x.is_finite()) {
                    return Err(FieldsError::InvalidConfig(
                        "spherical trap radii must be finite and strictly increasing".into(),
                    ));
                }
                if !v.iter().all(|x| x.is_finite()) {
                    return Err(FieldsError::InvalidConfig(
                        "spherical trap potential values must be finite".into(),
                    ));
                }
                Ok(())
            }
            TrapConfig::Harmonic { omega, omega_z, z0 } => {
                if !(*omega > 0.0 && *omega_z > 0.0 && *z0 > 0.0)
                    || !(omega.is_finite() && omega_z.is_finite() && z0.is_finite())
                {
                    return Err(FieldsError::InvalidConfig(format!(
                        "harmonic trap needs omega > 0, omega_z > 0, z0 > 0; got \
                         ({omega}, {omega_z}, {z0})"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Potential at a point, rad·s⁻¹.
    pub fn potential(&self, atom: &AtomConfig, pos: &Position) -> f64 {
        match self {
            TrapConfig::None => 0.0,
            TrapConfig::Spherical { r, v } => interp_clamped(r, v, pos.r()),
            TrapConfig::Harmonic { omega, omega_z, z0 } => {
                let rho = pos.rho();
                let dz = pos.z - z0;
                0.5 * atom.mass_over_hbar * (omega * omega * rho * rho + omega_z * omega_z * dz * dz)
            }
        }
    }
}

fn interp_clamped(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    match xs.partition_point(|&t| t < x) {
        0 => ys[0],
        i if i == xs.len() => ys[xs.len() - 1],
        i => {
            let w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
            ys[i - 1] + w * (ys[i] - ys[i - 1])
        }
    }
}

/// Pointwise eigen-decomposition of the internal Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenFrame {
    /// Dark-level energy, equal to the trap potential V(r).
    pub e0: f64,
    /// Upper bright energy.
    pub e_plus: f64,
    /// Lower bright energy.
    pub e_minus: f64,
    /// Dark section over (|1⟩, |2⟩, |e⟩), phase-fixed on `patch`.
    pub dark: [Complex64; 3],
    /// e_plus − e0, always ≥ 0.
    pub gap_plus: f64,
    /// e0 − e_minus, always ≥ 0.
    pub gap_minus: f64,
    pub patch: Patch,
}

/// Both Rabi couplings at a point.
///
/// The squared envelopes are clamped at zero before the square root: exactly
/// on the beam axes rounding can drive the linear forms a few ulp negative.
pub fn rabi_at(beam: &BeamConfig, pos: &Position) -> (Complex64, Complex64) {
    let r = pos.r();
    let p_sq = (beam.xi * (r + pos.z)).max(0.0);
    let c_sq = (beam.xi * ((2.0 * beam.eta - 1.0) * r - pos.z)).max(0.0);
    let phase_c = beam.k * pos.z;
    let phase_p = phase_c + f64::from(beam.g) * pos.phi();
    (
        Complex64::from_polar(p_sq.sqrt(), phase_p),
        Complex64::from_polar(c_sq.sqrt(), phase_c),
    )
}

/// Internal Hamiltonian for given couplings, detuning, and ground-level
/// potential, over the basis (|1⟩, |2⟩, |e⟩).
pub fn hamiltonian(omega_p: Complex64, omega_c: Complex64, delta: f64, v: f64) -> [[Complex64; 3]; 3] {
    let zero = Complex64::new(0.0, 0.0);
    [
        [Complex64::new(v, 0.0), zero, omega_p.conj()],
        [zero, Complex64::new(v, 0.0), omega_c.conj()],
        [omega_p, omega_c, Complex64::new(delta, 0.0)],
    ]
}

/// Internal Hamiltonian assembled from the beam and trap fields at a point.
pub fn local_hamiltonian(
    beam: &BeamConfig,
    trap: &TrapConfig,
    atom: &AtomConfig,
    pos: &Position,
) -> [[Complex64; 3]; 3] {
    let (omega_p, omega_c) = rabi_at(beam, pos);
    hamiltonian(omega_p, omega_c, beam.delta, trap.potential(atom, pos))
}

/// Distances (gap_minus, gap_plus) from the dark level to the bright pair.
///
/// The half-sum-and-difference forms ½(√(4Ω² + Δ̃²) ∓ Δ̃) cancel badly when
/// Ω² ≪ Δ̃², so the narrow gap is computed as Ω² over the wide one; their
/// product is Ω² exactly.
pub fn gaps(omega_sq: f64, delta: f64, v: f64) -> (f64, f64) {
    let dt = delta - v;
    let s = (4.0 * omega_sq + dt * dt).sqrt();
    let wide = 0.5 * (s + dt.abs());
    let narrow = if wide > 0.0 { omega_sq / wide } else { 0.0 };
    if dt >= 0.0 {
        (narrow, wide)
    } else {
        (wide, narrow)
    }
}

/// Internal energies [e_minus, e0, e_plus], always in ascending order.
pub fn eigenvalues(omega_sq: f64, delta: f64, v: f64) -> [f64; 3] {
    let (gap_minus, gap_plus) = gaps(omega_sq, delta, v);
    [v - gap_minus, v, v + gap_plus]
}

/// Dark eigenvector (Ω_p|2⟩ − Ω_c|1⟩)/Ω in whatever phases the couplings
/// carry. Use [`dark_section`] when a smooth patch-fixed section is needed.
pub fn dark_state(omega_p: Complex64, omega_c: Complex64) -> Result<[Complex64; 3], FieldsError> {
    let norm = (omega_p.norm_sqr() + omega_c.norm_sqr()).sqrt();
    if norm == 0.0 {
        return Err(FieldsError::DegeneratePoint);
    }
    Ok([-omega_c / norm, omega_p / norm, Complex64::new(0.0, 0.0)])
}

/// Dark section with the phase convention of a gauge patch.
///
/// Patch A puts the winding on the |1⟩ component,
/// (−|Ω_c| e^{i(kz − gφ)}, |Ω_p| e^{ikz}, 0)/Ω, which vanishes on the +z axis
/// at η = 1; patch B puts it on |2⟩,
/// (−|Ω_c| e^{ikz}, |Ω_p| e^{i(kz + gφ)}, 0)/Ω, vanishing on the −z axis.
/// In the overlap band dark_B = dark_A · e^{igφ} componentwise.
pub fn dark_section(
    beam: &BeamConfig,
    pos: &Position,
    patch: Patch,
) -> Result<[Complex64; 3], FieldsError> {
    let r = pos.r();
    let mod_p = (beam.xi * (r + pos.z)).max(0.0).sqrt();
    let mod_c = (beam.xi * ((2.0 * beam.eta - 1.0) * r - pos.z)).max(0.0).sqrt();
    let norm = mod_p.hypot(mod_c);
    if norm == 0.0 {
        return Err(FieldsError::DegeneratePoint);
    }
    let kz = beam.k * pos.z;
    let g_phi = f64::from(beam.g) * pos.phi();
    let (phase_1, phase_2) = match patch {
        Patch::A => (kz - g_phi, kz),
        Patch::B => (kz, kz + g_phi),
    };
    Ok([
        -Complex64::from_polar(mod_c / norm, phase_1),
        Complex64::from_polar(mod_p / norm, phase_2),
        Complex64::new(0.0, 0.0),
    ])
}

/// Eigen-decomposition at a point, rejecting the default exclusion ball.
pub fn eigensystem(
    beam: &BeamConfig,
    trap: &TrapConfig,
    atom: &AtomConfig,
    pos: &Position,
    patch: Patch,
) -> Result<EigenFrame, FieldsError> {
    eigensystem_with_exclusion(beam, trap, atom, pos, patch, DEFAULT_EXCLUSION_RADIUS)
}

/// Eigen-decomposition at a point with a caller-chosen exclusion radius.
pub fn eigensystem_with_exclusion(
    beam: &BeamConfig,
    trap: &TrapConfig,
    atom: &AtomConfig,
    pos: &Position,
    patch: Patch,
    exclusion_radius: f64,
) -> Result<EigenFrame, FieldsError> {
    if pos.r() < exclusion_radius {
        return Err(FieldsError::DegeneratePoint);
    }
    let (omega_p, omega_c) = rabi_at(beam, pos);
    let omega_sq = omega_p.norm_sqr() + omega_c.norm_sqr();
    if omega_sq == 0.0 {
        return Err(FieldsError::DegeneratePoint);
    }
    let v = trap.potential(atom, pos);
    let (gap_minus, gap_plus) = gaps(omega_sq, beam.delta, v);
    let dark = dark_section(beam, pos, patch)?;
    Ok(EigenFrame {
        e0: v,
        e_plus: v + gap_plus,
        e_minus: v - gap_minus,
        dark,
        gap_plus,
        gap_minus,
        patch,
    })
}

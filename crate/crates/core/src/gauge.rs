//! Geometric gauge structure induced on the centre of mass by the dark state.
//!
//! When the atom follows the dark state adiabatically, its centre of mass
//! feels the vector potential A = −i⟨D|∇D⟩. For the shaped beams of
//! [`crate::fields`] this connection is that of a magnetic monopole sitting at
//! the origin: on the two patches
//!
//! ```text
//! A_a = −g tan(θ/2) / (2ηr) · e_φ ,      A_b = +g cot(θ/2) / (2ηr) · e_φ ,
//! ```
//!
//! each regular on its own pole, differing in the overlap by the gradient of
//! the transition phase gφ/η. The common curvature is radial,
//! B = −g/(2ηr²) · e_r, so every origin-centred sphere carries flux −2πg/η.
//! At η = 1 the flux is an integer multiple of 2π and the two sections patch
//! together consistently; for η > 1 the charge is fractional, and the
//! transition function e^{igφ/η} fails to be single-valued unless g/η is an
//! integer.
//!
//! Everything is computed twice where it matters: closed forms above, and
//! finite differences of the actual dark section, which also pick up the
//! patch-independent pure-gauge piece k·e_z from the common beam phase.

use num_complex::Complex64;
use serde::Serialize;

use crate::fields::{dark_section, BeamConfig, FieldsError, Patch, DEFAULT_EXCLUSION_RADIUS};
use crate::geometry::{self, Position, Vec3};
use crate::numeric::{gauss_legendre, pairwise_sum, richardson2};

/// Recommended finite-difference step, as a fraction of the local radius.
pub const DEFAULT_STEP_FACTOR: f64 = 1e-4;

const AXIS_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GaugeError {
    #[error("the patch-{patch:?} connection is singular on this axis (θ = {theta:.6e} rad)")]
    OnAxisSingular { patch: Patch, theta: f64 },
    #[error(
        "finite-difference stencil at θ = {theta:.6} rad leaves patch {patch:?}; \
         move the point or shrink the step"
    )]
    PatchBoundary { patch: Patch, theta: f64 },
    #[error("colatitude θ = {theta:.6} rad is outside the patch overlap band")]
    OutsideOverlap { theta: f64 },
    #[error(
        "numeric connection has imaginary residue {imag:.3e}; the section is not varying \
         smoothly at this step size"
    )]
    ImaginaryResidue { imag: f64 },
    #[error(transparent)]
    Fields(#[from] FieldsError),
}

/// One sampled value of the gauge field, for map-style outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaugeSample {
    pub position: Position,
    /// Cartesian components; m⁻¹ for a connection, m⁻² for a curvature.
    pub a_vec: Vec3,
    pub patch: Patch,
    pub kind: SampleKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    Connection,
    Curvature,
}

/// Flux of the curvature through an origin-centred sphere.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluxReport {
    /// Sphere radius, m.
    pub radius: f64,
    /// Total flux, dimensionless.
    pub flux: f64,
    /// flux / 2π; integer at η = 1.
    pub chern: f64,
    pub quadrature_order: usize,
    /// Difference against the half-order quadrature.
    pub estimated_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantization {
    Quantized,
    NotQuantized,
}

/// Closed-form connection on a patch, in Cartesian components.
///
/// The pure-gauge term k·e_z from the common beam phase has zero curl and is
/// omitted unless `include_kz` is set; with it on, the result matches the
/// finite-difference route through the dark section.
pub fn connection_analytic(
    beam: &BeamConfig,
    pos: &Position,
    patch: Patch,
    include_kz: bool,
) -> Result<Vec3, GaugeError> {
    let r = pos.r();
    if r < DEFAULT_EXCLUSION_RADIUS {
        return Err(FieldsError::DegeneratePoint.into());
    }
    let theta = pos.theta();
    let g = f64::from(beam.g);
    let magnitude = match patch {
        Patch::A => {
            if theta > std::f64::consts::PI - AXIS_MARGIN {
                return Err(GaugeError::OnAxisSingular { patch, theta });
            }
            -g * (0.5 * theta).tan() / (2.0 * beam.eta * r)
        }
        Patch::B => {
            if theta < AXIS_MARGIN {
                return Err(GaugeError::OnAxisSingular { patch, theta });
            }
            g / ((0.5 * theta).tan() * 2.0 * beam.eta * r)
        }
    };
    let mut a = geometry::scale(pos.unit_azimuthal(), magnitude);
    if include_kz {
        a[2] += beam.k;
    }
    Ok(a)
}

fn check_stencil(pos: &Position, patch: Patch, h: f64) -> Result<(), GaugeError> {
    if pos.r() < DEFAULT_EXCLUSION_RADIUS {
        return Err(FieldsError::DegeneratePoint.into());
    }
    if !patch.contains(pos.theta()) {
        return Err(GaugeError::PatchBoundary { patch, theta: pos.theta() });
    }
    for axis in 0..3 {
        for step in [h, -h, 0.5 * h, -0.5 * h] {
            let q = pos.step(axis, step);
            if q.r() < DEFAULT_EXCLUSION_RADIUS {
                return Err(FieldsError::DegeneratePoint.into());
            }
            if !patch.contains(q.theta()) {
                return Err(GaugeError::PatchBoundary { patch, theta: q.theta() });
            }
        }
    }
    Ok(())
}

fn connection_central_raw(
    beam: &BeamConfig,
    pos: &Position,
    patch: Patch,
    h: f64,
) -> Result<[Complex64; 3], GaugeError> {
    let center = dark_section(beam, pos, patch)?;
    let mut a = [Complex64::new(0.0, 0.0); 3];
    for axis in 0..3 {
        let plus = dark_section(beam, &pos.step(axis, h), patch)?;
        let minus = dark_section(beam, &pos.step(axis, -h), patch)?;
        let mut overlap = Complex64::new(0.0, 0.0);
        for c in 0..3 {
            overlap += center[c].conj() * (plus[c] - minus[c]);
        }
        a[axis] = Complex64::new(0.0, -1.0) * overlap / (2.0 * h);
    }
    Ok(a)
}

/// Single central-difference estimate of −i⟨D|∇D⟩; second order in h.
pub fn connection_central(
    beam: &BeamConfig,
    pos: &Position,
    patch: Patch,
    h: f64,
) -> Result<Vec3, GaugeError> {
    assert!(h > 0.0 && h.is_finite(), "step must be positive, got {h}");
    check_stencil(pos, patch, h)?;
    let a = connection_central_raw(beam, pos, patch, h)?;
    Ok([a[0].re, a[1].re, a[2].re])
}

/// Finite-difference connection, Richardson-extrapolated over (h, h/2).
///
/// The result includes the pure-gauge k·e_z term, since the dark section
/// carries the common beam phase. The imaginary part of the projection is a
/// consistency residue and must stay below 1e-8 of the field scale.
pub fn connection_numeric(
    beam: &BeamConfig,
    pos: &Position,
    patch: Patch,
    h: f64,
) -> Result<Vec3, GaugeError> {
    assert!(h > 0.0 && h.is_finite(), "step must be positive, got {h}");
    check_stencil(pos, patch, h)?;
    let coarse = connection_central_raw(beam, pos, patch, h)?;
    let fine = connection_central_raw(beam, pos, patch, 0.5 * h)?;
    let mut a = [0.0; 3];
    let mut worst_imag = 0.0f64;
    for axis in 0..3 {
        let refined = fine[axis] + (fine[axis] - coarse[axis]) / 3.0;
        a[axis] = refined.re;
        worst_imag = worst_imag.max(refined.im.abs());
    }
    let scale = geometry::norm(a).max(1.0 / pos.r());
    if worst_imag > 1e-8 * scale {
        return Err(GaugeError::ImaginaryResidue { imag: worst_imag });
    }
    Ok(a)
}

/// Closed-form curvature, patch-independent: B = −g/(2ηr²) · e_r.
pub fn curvature(beam: &BeamConfig, pos: &Position) -> Result<Vec3, GaugeError> {
    let r = pos.r();
    if r < DEFAULT_EXCLUSION_RADIUS {
        return Err(FieldsError::DegeneratePoint.into());
    }
    let magnitude = -f64::from(beam.g) / (2.0 * beam.eta * r * r);
    Ok(geometry::scale(pos.unit_radial(), magnitude))
}

/// Curl of the finite-difference connection, Richardson-extrapolated.
///
/// Each connection sample uses its own local step [`DEFAULT_STEP_FACTOR`]·r,
/// so `h` only controls the outer curl stencil.
pub fn curvature_numeric(
    beam: &BeamConfig,
    pos: &Position,
    patch: Patch,
    h: f64,
) -> Result<Vec3, GaugeError> {
    assert!(h > 0.0 && h.is_finite(), "step must be positive, got {h}");
    let curl_at = |step: f64| -> Result<Vec3, GaugeError> {
        let mut grad = [[0.0; 3]; 3];
        for axis in 0..3 {
            let qp = pos.step(axis, step);
            let qm = pos.step(axis, -step);
            let plus = connection_numeric(beam, &qp, patch, DEFAULT_STEP_FACTOR * qp.r())?;
            let minus = connection_numeric(beam, &qm, patch, DEFAULT_STEP_FACTOR * qm.r())?;
            for j in 0..3 {
                grad[axis][j] = (plus[j] - minus[j]) / (2.0 * step);
            }
        }
        Ok([
            grad[1][2] - grad[2][1],
            grad[2][0] - grad[0][2],
            grad[0][1] - grad[1][0],
        ])
    };
    let coarse = curl_at(h)?;
    let fine = curl_at(0.5 * h)?;
    Ok(std::array::from_fn(|i| richardson2(coarse[i], fine[i])))
}

/// Curvature flux through the origin-centred sphere of the given radius.
///
/// Gauss-Legendre in cos θ crossed with a uniform trapezoid in φ; both the
/// main and the half-order estimate accumulate with pairwise summation, so
/// the report is bit-stable regardless of how callers parallelize around it.
pub fn monopole_flux(
    beam: &BeamConfig,
    radius: f64,
    quadrature_order: usize,
) -> Result<FluxReport, GaugeError> {
    assert!(quadrature_order >= 2, "quadrature order must be at least 2");
    let flux = flux_at_order(beam, radius, quadrature_order)?;
    let halved = flux_at_order(beam, radius, (quadrature_order / 2).max(2))?;
    let estimated_error = (flux - halved).abs().max(f64::EPSILON * flux.abs());
    Ok(FluxReport {
        radius,
        flux,
        chern: flux / std::f64::consts::TAU,
        quadrature_order,
        estimated_error,
    })
}

fn flux_at_order(beam: &BeamConfig, radius: f64, order: usize) -> Result<f64, GaugeError> {
    if radius < DEFAULT_EXCLUSION_RADIUS {
        return Err(FieldsError::DegeneratePoint.into());
    }
    let (nodes, weights) = gauss_legendre(order);
    let n_phi = 2 * order;
    let dphi = std::f64::consts::TAU / n_phi as f64;
    let mut contributions = Vec::with_capacity(order * n_phi);
    for (cos_theta, w) in nodes.iter().zip(weights.iter()) {
        let theta = cos_theta.clamp(-1.0, 1.0).acos();
        for i in 0..n_phi {
            let phi = dphi * i as f64;
            let pos = Position::from_spherical(radius, theta, phi);
            let b = curvature(beam, &pos)?;
            contributions.push(geometry::dot(b, pos.unit_radial()) * radius * radius * w * dphi);
        }
    }
    Ok(pairwise_sum(&contributions))
}

/// Loop integral ∮(A_b − A_a)·dl around the circle of colatitude θ.
///
/// Equals 2πg/η: the winding of the transition function between the two
/// sections, and an integer multiple of 2π exactly when the monopole charge
/// is quantized.
pub fn transition_holonomy(
    beam: &BeamConfig,
    radius: f64,
    theta: f64,
    n_samples: usize,
) -> Result<f64, GaugeError> {
    assert!(n_samples >= 1);
    if !(Patch::A.contains(theta) && Patch::B.contains(theta)) {
        return Err(GaugeError::OutsideOverlap { theta });
    }
    let arc = std::f64::consts::TAU / n_samples as f64 * radius * theta.sin();
    let mut vals = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let phi = std::f64::consts::TAU * i as f64 / n_samples as f64;
        let pos = Position::from_spherical(radius, theta, phi);
        let a = connection_analytic(beam, &pos, Patch::A, false)?;
        let b = connection_analytic(beam, &pos, Patch::B, false)?;
        vals.push(geometry::dot(geometry::sub(b, a), pos.unit_azimuthal()) * arc);
    }
    Ok(pairwise_sum(&vals))
}

/// Whether the monopole charge g/η survives as a consistent quantum theory:
/// the transition function e^{igφ/η} is single-valued iff g/η is an integer.
pub fn quantization_check(g: i32, eta: f64) -> Quantization {
    let ratio = f64::from(g) / eta;
    if (ratio - ratio.round()).abs() <= 1e-12 {
        Quantization::Quantized
    } else {
        Quantization::NotQuantized
    }
}

//! Centre-of-mass spectrum of the dark channel in a cylindrical harmonic
//! trap.
//!
//! With azimuthal quantum number m the planar motion reduces to a radial
//! problem with effective potential F_m/(2M̃): the squared sum of the
//! centrifugal momentum m/ρ and the azimuthal gauge potential. Near the trap
//! axis F_m collapses to a Laurent form whose Hamiltonian is an exactly
//! solvable shifted oscillator: the radial frequency grows to
//! ω̃ = sqrt(ω² + g²/(16 M̃² z₀⁴)) and the level gets the charge-dependent
//! offset −m g/(4 M̃ z₀²). Both closed forms live here, together with the
//! eigenfunctions and an independent finite-difference eigensolver used to
//! cross-validate them.
//!
//! The finite-difference path symmetrizes the radial operator with the
//! substitution u = sqrt(ρ)·T and discretizes the flux form
//! −(1/ρ)(ρ u′)′ on a cell-centred grid (cells at half-integer steps,
//! fluxes on integer faces). The axis face carries zero weight, which
//! enforces regularity without a boundary row, and the resulting matrix is
//! symmetric positive definite so the Lanczos solver applies directly.
//! Eigenvalues are λ = 2 M̃ E.

use crate::fields::{AtomConfig, TrapConfig};
use crate::lanczos::{lowest_eigenpairs, LanczosOptions, NoConvergence};
use crate::numeric::{gauss_legendre, richardson2};
use crate::special::{hermite_h, kummer_poly};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectrumError {
    #[error("domain error: {0}")]
    DomainError(String),
    #[error(
        "grid too coarse: estimated relative error {worst:.3e} exceeds tolerance {tolerance:.3e}"
    )]
    GridTooCoarse { worst: f64, tolerance: f64 },
    #[error("eigensolver failed: {0}")]
    NonConverged(#[from] NoConvergence),
}

/// Trap, atom and beam-charge parameters of one spectrum problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrapSpectrumParams {
    pub atom: AtomConfig,
    /// Radial trap frequency ω, rad·s⁻¹.
    pub omega: f64,
    /// Axial trap frequency ω_z, rad·s⁻¹.
    pub omega_z: f64,
    /// Trap centre height above the beam origin, m.
    pub z0: f64,
    /// Winding number of the probe beam phase.
    pub g: i32,
}

impl TrapSpectrumParams {
    pub fn new(atom: AtomConfig, trap: &TrapConfig, g: i32) -> Result<Self, SpectrumError> {
        atom.validate()
            .map_err(|e| SpectrumError::DomainError(e.to_string()))?;
        trap.validate()
            .map_err(|e| SpectrumError::DomainError(e.to_string()))?;
        match *trap {
            TrapConfig::Harmonic { omega, omega_z, z0 } => Ok(TrapSpectrumParams {
                atom,
                omega,
                omega_z,
                z0,
                g,
            }),
            _ => Err(SpectrumError::DomainError(
                "spectrum problems need the harmonic trap variant".into(),
            )),
        }
    }

    /// Gauge-widened radial frequency ω̃ = sqrt(ω² + g²/(16 M̃² z₀⁴)).
    pub fn omega_tilde(&self) -> f64 {
        let m_tilde = self.atom.mass_over_hbar;
        let gf = self.g as f64;
        let s = gf * gf / (16.0 * m_tilde * m_tilde * self.z0.powi(4));
        (self.omega * self.omega + s).sqrt()
    }

    /// ω̃ − ω, evaluated without cancellation.
    pub fn frequency_shift(&self) -> f64 {
        let m_tilde = self.atom.mass_over_hbar;
        let gf = self.g as f64;
        let s = gf * gf / (16.0 * m_tilde * m_tilde * self.z0.powi(4));
        s / (self.omega_tilde() + self.omega)
    }

    /// Charge-dependent level offset −m g/(4 M̃ z₀²), rad·s⁻¹.
    pub fn zero_point_term(&self, m: i32) -> f64 {
        -(m as f64) * (self.g as f64) / (4.0 * self.atom.mass_over_hbar * self.z0 * self.z0)
    }

    /// Closed-form level energy
    /// E = (2 n_ρ + |m| + 1) ω̃ − m g/(4 M̃ z₀²) + (n_z + ½) ω_z.
    pub fn analytic_energy(&self, m: i32, n_rho: u32, n_z: u32) -> f64 {
        let radial = (2 * n_rho as i64 + m.unsigned_abs() as i64 + 1) as f64 * self.omega_tilde();
        let axial = (n_z as f64 + 0.5) * self.omega_z;
        radial + self.zero_point_term(m) + axial
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMethod {
    Analytic,
    NumericApproxF,
    NumericExactF,
}

/// One energy level, labelled by quantum numbers when they are known and by
/// the ascending index within the m sector otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumLevel {
    pub m: i32,
    pub index: usize,
    pub n_rho: Option<u32>,
    pub n_z: Option<u32>,
    /// rad·s⁻¹.
    pub energy: f64,
}

/// Exact effective radial potential (times 2M̃):
/// F_m = (m/ρ + g (z − r)/(2 r ρ))² with r = sqrt(ρ² + z²).
pub fn f_exact(m: i32, g: i32, rho: f64, z: f64) -> Result<f64, SpectrumError> {
    if !(rho > 0.0) {
        return Err(SpectrumError::DomainError(format!(
            "f_exact needs rho > 0, got {rho}"
        )));
    }
    let r = rho.hypot(z);
    let t = (m as f64) / rho + (g as f64) * (z - r) / (2.0 * r * rho);
    Ok(t * t)
}

/// Near-axis Laurent form of the effective potential:
/// m²/ρ² + g² ρ²/(16 z₀⁴) − m g/(2 z₀²).
///
/// Kept as the literal three-term sum; nothing is clipped even when
/// rounding takes it through zero near the classical node.
pub fn f_approx(m: i32, g: i32, rho: f64, z0: f64) -> Result<f64, SpectrumError> {
    if !(rho > 0.0 && z0 > 0.0) {
        return Err(SpectrumError::DomainError(format!(
            "f_approx needs rho > 0 and z0 > 0, got ({rho}, {z0})"
        )));
    }
    let (mf, gf) = (m as f64, g as f64);
    let z0sq = z0 * z0;
    Ok(mf * mf / (rho * rho) + gf * gf * rho * rho / (16.0 * z0sq * z0sq)
        - mf * gf / (2.0 * z0sq))
}

/// All closed-form levels with n_ρ ≤ n_rho_max, n_z ≤ n_z_max in one m
/// sector, sorted ascending.
pub fn analytic_levels(
    p: &TrapSpectrumParams,
    m: i32,
    n_rho_max: u32,
    n_z_max: u32,
) -> Vec<SpectrumLevel> {
    let mut levels = Vec::with_capacity((n_rho_max as usize + 1) * (n_z_max as usize + 1));
    for n_rho in 0..=n_rho_max {
        for n_z in 0..=n_z_max {
            levels.push(SpectrumLevel {
                m,
                index: 0,
                n_rho: Some(n_rho),
                n_z: Some(n_z),
                energy: p.analytic_energy(m, n_rho, n_z),
            });
        }
    }
    levels.sort_by(|a, b| {
        a.energy
            .total_cmp(&b.energy)
            .then(a.n_rho.cmp(&b.n_rho))
            .then(a.n_z.cmp(&b.n_z))
    });
    for (i, level) in levels.iter_mut().enumerate() {
        level.index = i;
    }
    levels
}

/// Closed-form eigenfunction of the near-axis problem:
/// ψ = N e^{imφ} ρ^{|m|} e^{−M̃ω̃ρ²/2} ₁F₁(−n_ρ; |m|+1; M̃ω̃ρ²)
///       · e^{−M̃ω_z(z−z₀)²/2} H_{n_z}(sqrt(M̃ω_z)(z−z₀)).
#[derive(Debug, Clone)]
pub struct AnalyticWavefunction {
    m: i32,
    n_rho: u32,
    n_z: u32,
    /// M̃ ω̃.
    a_rho: f64,
    /// M̃ ω_z.
    a_z: f64,
    z0: f64,
    norm: f64,
}

impl AnalyticWavefunction {
    pub fn new(p: &TrapSpectrumParams, m: i32, n_rho: u32, n_z: u32) -> AnalyticWavefunction {
        let mut wf = AnalyticWavefunction {
            m,
            n_rho,
            n_z,
            a_rho: p.atom.mass_over_hbar * p.omega_tilde(),
            a_z: p.atom.mass_over_hbar * p.omega_z,
            z0: p.z0,
            norm: 1.0,
        };
        let (i_rho, i_z) = wf.squared_moments(200, 10.0);
        wf.norm = 1.0 / (std::f64::consts::TAU * i_rho * i_z).sqrt();
        wf
    }

    /// Radial factor without normalization.
    pub fn radial_profile(&self, rho: f64) -> f64 {
        let x = self.a_rho * rho * rho;
        rho.powi(self.m.abs()) * (-0.5 * x).exp() * kummer_poly(self.n_rho, self.m.abs() as f64 + 1.0, x)
    }

    /// Axial factor without normalization.
    pub fn z_profile(&self, z: f64) -> f64 {
        let dz = z - self.z0;
        (-0.5 * self.a_z * dz * dz).exp() * hermite_h(self.n_z, self.a_z.sqrt() * dz)
    }

    pub fn norm_constant(&self) -> f64 {
        self.norm
    }

    pub fn eval(&self, rho: f64, z: f64, phi: f64) -> Complex64 {
        Complex64::from_polar(
            self.norm * self.radial_profile(rho) * self.z_profile(z),
            self.m as f64 * phi,
        )
    }

    /// (∫ radial² ρ dρ, ∫ axial² dz) by Gauss-Legendre over `extent`
    /// oscillator lengths.
    fn squared_moments(&self, order: usize, extent: f64) -> (f64, f64) {
        let (nodes, weights) = gauss_legendre(order);
        let l_rho = 1.0 / self.a_rho.sqrt();
        let half = 0.5 * extent * l_rho;
        let mut i_rho = 0.0;
        for (&x, &w) in nodes.iter().zip(&weights) {
            let rho = half * (x + 1.0);
            let f = self.radial_profile(rho);
            i_rho += w * half * f * f * rho;
        }
        let l_z = 1.0 / self.a_z.sqrt();
        let mut i_z = 0.0;
        for (&x, &w) in nodes.iter().zip(&weights) {
            let z = self.z0 + extent * l_z * x;
            let f = self.z_profile(z);
            i_z += w * extent * l_z * f * f;
        }
        (i_rho, i_z)
    }
}

/// Tensor grid for the finite-difference solver: `n_rho` radial cells over
/// `rho_extent` radial oscillator lengths and `n_z` interior axial points
/// over ±`z_extent` axial oscillator lengths around z₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub n_rho: usize,
    pub n_z: usize,
    pub rho_extent: f64,
    pub z_extent: f64,
}

impl Default for GridSpec {
    fn default() -> GridSpec {
        GridSpec {
            n_rho: 512,
            n_z: 512,
            rho_extent: 8.0,
            z_extent: 8.0,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), SpectrumError> {
        if self.n_rho < 8 || self.n_z < 8 {
            return Err(SpectrumError::DomainError(format!(
                "grid needs at least 8 points per axis, got {}x{}",
                self.n_rho, self.n_z
            )));
        }
        if !(self.rho_extent >= 6.0 && self.z_extent >= 6.0)
            || !(self.rho_extent.is_finite() && self.z_extent.is_finite())
        {
            return Err(SpectrumError::DomainError(format!(
                "grid extents must cover at least 6 oscillator lengths, got ({}, {})",
                self.rho_extent, self.z_extent
            )));
        }
        Ok(())
    }
}

/// Which effective radial potential the numeric solver discretizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    ExactF,
    ApproxF,
}

/// Lowest levels of one m sector from the finite-difference operator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericSpectrum {
    pub m: i32,
    pub method: SpectrumMethod,
    /// rad·s⁻¹, ascending.
    pub energies: Vec<f64>,
    pub n_rho: usize,
    pub n_z: usize,
    pub rho_max: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub matvecs: usize,
    pub restarts: usize,
    /// Explicit eigensolver residuals in the λ = 2M̃E scale.
    pub residual_norms: Vec<f64>,
}

struct FdOperator {
    n_rho: usize,
    n_z: usize,
    /// Coupling between radial cells i and i+1 (entered with a minus sign).
    radial_coupling: Vec<f64>,
    /// Full diagonal: both kinetic faces plus potential terms.
    diagonal: Vec<f64>,
    inv_hz_sq: f64,
}

impl FdOperator {
    fn build(
        p: &TrapSpectrumParams,
        m: i32,
        potential: PotentialKind,
        grid: &GridSpec,
    ) -> Result<(FdOperator, f64, f64, f64), SpectrumError> {
        grid.validate()?;
        let m_tilde = p.atom.mass_over_hbar;
        let l_rho = 1.0 / (m_tilde * p.omega_tilde()).sqrt();
        let l_z = 1.0 / (m_tilde * p.omega_z).sqrt();
        let rho_max = grid.rho_extent * l_rho;
        let z_min = p.z0 - grid.z_extent * l_z;
        let z_max = p.z0 + grid.z_extent * l_z;
        let hr = rho_max / grid.n_rho as f64;
        let hz = (z_max - z_min) / (grid.n_z as f64 + 1.0);

        let radial_coupling: Vec<f64> = (0..grid.n_rho - 1)
            .map(|i| {
                let i = i as f64;
                (i + 1.0) / ((i + 0.5) * (i + 1.5)).sqrt() / (hr * hr)
            })
            .collect();

        let kinetic_diag = 2.0 / (hr * hr) + 2.0 / (hz * hz);
        let mut diagonal = vec![0.0; grid.n_rho * grid.n_z];
        for ir in 0..grid.n_rho {
            let rho = (ir as f64 + 0.5) * hr;
            for iz in 0..grid.n_z {
                let z = z_min + (iz as f64 + 1.0) * hz;
                let f = match potential {
                    PotentialKind::ExactF => f_exact(m, p.g, rho, z)?,
                    PotentialKind::ApproxF => f_approx(m, p.g, rho, p.z0)?,
                };
                let dz = z - p.z0;
                let v2m = m_tilde * m_tilde
                    * (p.omega * p.omega * rho * rho + p.omega_z * p.omega_z * dz * dz);
                diagonal[ir * grid.n_z + iz] = kinetic_diag + f + v2m;
            }
        }

        Ok((
            FdOperator {
                n_rho: grid.n_rho,
                n_z: grid.n_z,
                radial_coupling,
                diagonal,
                inv_hz_sq: 1.0 / (hz * hz),
            },
            rho_max,
            z_min,
            z_max,
        ))
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let nz = self.n_z;
        let nr = self.n_rho;
        y.par_chunks_mut(nz).enumerate().for_each(|(ir, row)| {
            let base = ir * nz;
            for iz in 0..nz {
                let idx = base + iz;
                let mut acc = self.diagonal[idx] * x[idx];
                if iz > 0 {
                    acc -= self.inv_hz_sq * x[idx - 1];
                }
                if iz + 1 < nz {
                    acc -= self.inv_hz_sq * x[idx + 1];
                }
                if ir > 0 {
                    acc -= self.radial_coupling[ir - 1] * x[idx - nz];
                }
                if ir + 1 < nr {
                    acc -= self.radial_coupling[ir] * x[idx + nz];
                }
                row[iz] = acc;
            }
        });
    }
}

/// Lowest `n_eigs` levels of one m sector by second-order finite
/// differences and thick-restart Lanczos, with default solver options.
pub fn spectrum_numeric(
    p: &TrapSpectrumParams,
    m: i32,
    potential: PotentialKind,
    grid: &GridSpec,
    n_eigs: usize,
) -> Result<NumericSpectrum, SpectrumError> {
    spectrum_numeric_with(p, m, potential, grid, &LanczosOptions::new(n_eigs))
}

/// As [`spectrum_numeric`] with explicit eigensolver options.
pub fn spectrum_numeric_with(
    p: &TrapSpectrumParams,
    m: i32,
    potential: PotentialKind,
    grid: &GridSpec,
    opts: &LanczosOptions,
) -> Result<NumericSpectrum, SpectrumError> {
    let n = grid.n_rho * grid.n_z;
    if opts.n_eigs == 0 || opts.n_eigs > 32.min(n / 8) {
        return Err(SpectrumError::DomainError(format!(
            "n_eigs must be between 1 and {}, got {}",
            32.min(n / 8),
            opts.n_eigs
        )));
    }
    let (op, rho_max, z_min, z_max) = FdOperator::build(p, m, potential, grid)?;
    let result = lowest_eigenpairs(|x, y| op.apply(x, y), n, opts)?;
    let two_m = 2.0 * p.atom.mass_over_hbar;
    Ok(NumericSpectrum {
        m,
        method: match potential {
            PotentialKind::ExactF => SpectrumMethod::NumericExactF,
            PotentialKind::ApproxF => SpectrumMethod::NumericApproxF,
        },
        energies: result.eigenvalues.iter().map(|l| l / two_m).collect(),
        n_rho: grid.n_rho,
        n_z: grid.n_z,
        rho_max,
        z_min,
        z_max,
        matvecs: result.matvecs,
        restarts: result.restarts,
        residual_norms: result.residual_norms,
    })
}

/// A numeric spectrum with a grid-refinement error estimate attached.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckedSpectrum {
    /// Solution on the doubled grid.
    pub fine: NumericSpectrum,
    /// Richardson extrapolation of coarse and fine energies.
    pub extrapolated: Vec<f64>,
    /// |fine − coarse|/3 relative to the extrapolated value, per level.
    pub estimated_rel_error: Vec<f64>,
}

/// Solves on `grid` and on the doubled grid and extrapolates; fails with
/// `GridTooCoarse` when the estimated relative error exceeds `rel_tol`.
pub fn spectrum_numeric_checked(
    p: &TrapSpectrumParams,
    m: i32,
    potential: PotentialKind,
    grid: &GridSpec,
    n_eigs: usize,
    rel_tol: f64,
) -> Result<CheckedSpectrum, SpectrumError> {
    let coarse = spectrum_numeric(p, m, potential, grid, n_eigs)?;
    let doubled = GridSpec {
        n_rho: 2 * grid.n_rho,
        n_z: 2 * grid.n_z,
        ..*grid
    };
    let fine = spectrum_numeric(p, m, potential, &doubled, n_eigs)?;
    let mut extrapolated = Vec::with_capacity(n_eigs);
    let mut estimated = Vec::with_capacity(n_eigs);
    let mut worst = 0.0f64;
    for (c, f) in coarse.energies.iter().zip(&fine.energies) {
        let best = richardson2(*c, *f);
        let err = ((f - c) / 3.0).abs() / best.abs().max(f64::MIN_POSITIVE);
        extrapolated.push(best);
        estimated.push(err);
        worst = worst.max(err);
    }
    if worst > rel_tol {
        return Err(SpectrumError::GridTooCoarse {
            worst,
            tolerance: rel_tol,
        });
    }
    Ok(CheckedSpectrum {
        fine,
        extrapolated,
        estimated_rel_error: estimated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn unit_params(omega: f64, omega_z: f64, z0: f64, g: i32) -> TrapSpectrumParams {
        TrapSpectrumParams {
            atom: AtomConfig {
                mass_over_hbar: 1.0,
                energy_scale: 1.0,
            },
            omega,
            omega_z,
            z0,
            g,
        }
    }

    #[test]
    fn exact_potential_reduces_to_centrifugal_without_charge() {
        for &(m, rho, z) in &[(1, 0.7, 0.3), (-3, 2.0, -1.5), (2, 1e-3, 5.0)] {
            let f = f_exact(m, 0, rho, z).unwrap();
            assert_relative_eq!(f, (m as f64 / rho).powi(2), max_relative = 1e-15);
        }
    }

    #[test]
    fn exact_potential_vanishes_on_the_equatorial_node() {
        assert_eq!(f_exact(1, 2, 1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn exact_potential_approaches_centrifugal_on_axis() {
        let f = f_exact(2, 5, 1e-8, 1.0).unwrap();
        assert_relative_eq!(f, 4.0 / 1e-16, max_relative = 1e-12);
    }

    #[test]
    fn potentials_reject_nonpositive_coordinates() {
        assert!(matches!(
            f_exact(1, 1, 0.0, 1.0),
            Err(SpectrumError::DomainError(_))
        ));
        assert!(matches!(
            f_exact(1, 1, -0.5, 1.0),
            Err(SpectrumError::DomainError(_))
        ));
        assert!(matches!(
            f_approx(1, 1, 1.0, 0.0),
            Err(SpectrumError::DomainError(_))
        ));
        assert!(matches!(
            f_approx(1, 1, 0.0, 1.0),
            Err(SpectrumError::DomainError(_))
        ));
    }

    #[test]
    fn approximate_potential_by_direct_substitution() {
        assert_eq!(f_approx(1, 1, 1.0, 1.0).unwrap(), 0.5625);
        assert_relative_eq!(
            f_approx(2, 0, 0.5, 3.0).unwrap(),
            16.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn approximate_potential_is_the_raw_three_term_sum() {
        // near its node the sum may round through zero; whatever the raw
        // arithmetic gives must come back unclipped
        for &rho in &[0.999_999_9, 1.0, 1.000_000_1] {
            let raw = 1.0 / (rho * rho) + 16.0 * rho * rho / 16.0 - 4.0 / 2.0;
            assert_eq!(f_approx(1, 4, rho, 1.0).unwrap(), raw);
        }
    }

    #[test]
    fn approximation_tracks_the_exact_potential_near_the_axis() {
        let z0 = 2.0;
        for m in -2..=2 {
            for &g in &[1, 10] {
                for i in 0..20 {
                    let rho = z0 * 1e-3 * (0.1f64 / 1e-3).powf(i as f64 / 19.0);
                    let fe = f_exact(m, g, rho, z0).unwrap();
                    let fa = f_approx(m, g, rho, z0).unwrap();
                    assert!(
                        (fe - fa).abs() <= 0.05 * fe.abs().max(1e-300),
                        "m={m} g={g} rho/z0={:.3e}: exact {fe:.6e} vs approx {fa:.6e}",
                        rho / z0
                    );
                }
            }
        }
    }

    #[test]
    fn closed_form_reduces_to_the_bare_oscillator_without_charge() {
        let p = unit_params(1.3, 0.7, 2.0, 0);
        assert_relative_eq!(p.omega_tilde(), 1.3, max_relative = 1e-15);
        assert_eq!(p.zero_point_term(3), 0.0);
        for (m, n_rho, n_z) in [(0i32, 0u32, 0u32), (2, 1, 3), (-1, 2, 0)] {
            let expected =
                (2 * n_rho + m.unsigned_abs() + 1) as f64 * 1.3 + (n_z as f64 + 0.5) * 0.7;
            assert_relative_eq!(
                p.analytic_energy(m, n_rho, n_z),
                expected,
                max_relative = 1e-15
            );
        }
    }

    #[test]
    fn azimuthal_flip_moves_only_the_offset_term() {
        let p = unit_params(1.0, 1.3, 2.0, 7);
        for m in 1..=3 {
            let diff = p.analytic_energy(m, 1, 2) - p.analytic_energy(-m, 1, 2);
            assert_relative_eq!(
                diff,
                -(m as f64) * 7.0 / (2.0 * p.z0 * p.z0),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn cesium_shift_and_offset_match_frozen_values() {
        let atom = AtomConfig::from_si(2.207e-25, 1e-26);
        let trap = TrapConfig::Harmonic {
            omega: std::f64::consts::TAU * 1e2,
            omega_z: std::f64::consts::TAU * 1e6,
            z0: 1e-3,
        };
        let p = TrapSpectrumParams::new(atom, &trap, 10_000).unwrap();
        assert_relative_eq!(
            p.frequency_shift(),
            0.0011355791294818118,
            max_relative = 1e-9
        );
        assert_relative_eq!(
            p.zero_point_term(1),
            -1.1945761214318078,
            max_relative = 1e-9
        );
    }

    #[test]
    fn params_require_the_harmonic_trap() {
        let atom = AtomConfig {
            mass_over_hbar: 1.0,
            energy_scale: 0.0,
        };
        let err = TrapSpectrumParams::new(atom, &TrapConfig::None, 1).unwrap_err();
        assert!(matches!(err, SpectrumError::DomainError(_)));
    }

    #[test]
    fn level_listing_is_sorted_and_labelled() {
        let p = unit_params(1.0, 1.3, 2.0, 4);
        let levels = analytic_levels(&p, 1, 3, 3);
        assert_eq!(levels.len(), 16);
        for (i, pair) in levels.windows(2).enumerate() {
            assert!(
                pair[0].energy <= pair[1].energy,
                "levels out of order at {i}"
            );
        }
        for (i, level) in levels.iter().enumerate() {
            assert_eq!(level.index, i);
            let expected = p.analytic_energy(1, level.n_rho.unwrap(), level.n_z.unwrap());
            assert_eq!(level.energy, expected);
        }
    }

    #[test]
    fn wavefunction_normalization_is_quadrature_stable() {
        let p = unit_params(1.0, 1.3, 2.0, 3);
        for (m, n_rho, n_z) in [(0, 0, 0), (1, 1, 2), (-2, 2, 1)] {
            let wf = AnalyticWavefunction::new(&p, m, n_rho, n_z);
            let (i_rho, i_z) = wf.squared_moments(260, 12.0);
            let refreshed = 1.0 / (std::f64::consts::TAU * i_rho * i_z).sqrt();
            assert_relative_eq!(wf.norm_constant(), refreshed, max_relative = 1e-10);
        }
    }

    #[test]
    fn lowest_radial_profile_is_a_plain_gaussian() {
        let p = unit_params(1.0, 1.0, 2.0, 5);
        let wf = AnalyticWavefunction::new(&p, 2, 0, 0);
        let a = p.atom.mass_over_hbar * p.omega_tilde();
        for &rho in &[0.1, 0.6, 1.4] {
            assert_relative_eq!(
                wf.radial_profile(rho),
                rho * rho * (-0.5 * a * rho * rho).exp(),
                max_relative = 1e-14
            );
        }
    }

    fn rayleigh_quotient(p: &TrapSpectrumParams, m: i32, n_rho: u32, n_z: u32) -> f64 {
        let wf = AnalyticWavefunction::new(p, m, n_rho, n_z);
        let m_tilde = p.atom.mass_over_hbar;
        let l_rho = 1.0 / (m_tilde * p.omega_tilde()).sqrt();
        let l_z = 1.0 / (m_tilde * p.omega_z).sqrt();
        let (nodes, weights) = gauss_legendre(160);

        let deriv = |f: &dyn Fn(f64) -> f64, x: f64, h: f64| {
            let d = |hh: f64| (f(x + hh) - f(x - hh)) / (2.0 * hh);
            richardson2(d(h), d(0.5 * h))
        };

        let radial = |rho: f64| wf.radial_profile(rho);
        let axial = |z: f64| wf.z_profile(z);

        let mut i_r2 = 0.0;
        let mut i_dr2 = 0.0;
        let mut i_fr2 = 0.0;
        let mut i_vr2 = 0.0;
        let half = 0.5 * 10.0 * l_rho;
        for (&x, &w) in nodes.iter().zip(&weights) {
            let rho = half * (x + 1.0);
            let r = radial(rho);
            let dr = deriv(&radial, rho, 1e-4 * l_rho);
            let f = f_approx(m, p.g, rho, p.z0).unwrap();
            let ww = w * half * rho;
            i_r2 += ww * r * r;
            i_dr2 += ww * dr * dr;
            i_fr2 += ww * f * r * r;
            i_vr2 += ww * (0.5 * m_tilde * p.omega * p.omega * rho * rho) * r * r;
        }
        let mut i_z2 = 0.0;
        let mut i_dz2 = 0.0;
        let mut i_vz2 = 0.0;
        for (&x, &w) in nodes.iter().zip(&weights) {
            let z = p.z0 + 10.0 * l_z * x;
            let f = axial(z);
            let df = deriv(&axial, z, 1e-4 * l_z);
            let dz = z - p.z0;
            i_z2 += w * 10.0 * l_z * f * f;
            i_dz2 += w * 10.0 * l_z * df * df;
            i_vz2 += w * 10.0 * l_z * (0.5 * m_tilde * p.omega_z * p.omega_z * dz * dz) * f * f;
        }

        let kinetic = (i_dr2 * i_z2 + i_r2 * i_dz2 + i_fr2 * i_z2) / (2.0 * m_tilde);
        let potential = i_vr2 * i_z2 + i_r2 * i_vz2;
        (kinetic + potential) / (i_r2 * i_z2)
    }

    #[test]
    fn ground_state_energy_expectation_matches_the_closed_form() {
        let p = unit_params(1.0, 1.3, 2.0, 6);
        let expected = p.analytic_energy(0, 0, 0);
        assert_relative_eq!(rayleigh_quotient(&p, 0, 0, 0), expected, max_relative = 1e-6);
    }

    #[test]
    fn excited_state_energy_expectation_matches_the_closed_form() {
        let p = unit_params(1.0, 1.3, 2.0, 3);
        let expected = p.analytic_energy(1, 1, 2);
        assert_relative_eq!(rayleigh_quotient(&p, 1, 1, 2), expected, max_relative = 1e-6);
    }

    #[test]
    fn radial_excitations_are_orthogonal() {
        let p = unit_params(1.0, 1.3, 2.0, 4);
        let w0 = AnalyticWavefunction::new(&p, 1, 0, 0);
        let w1 = AnalyticWavefunction::new(&p, 1, 1, 0);
        let l_rho = 1.0 / (p.atom.mass_over_hbar * p.omega_tilde()).sqrt();
        let (nodes, weights) = gauss_legendre(200);
        let half = 0.5 * 10.0 * l_rho;
        let mut overlap = 0.0;
        let mut scale0 = 0.0;
        let mut scale1 = 0.0;
        for (&x, &w) in nodes.iter().zip(&weights) {
            let rho = half * (x + 1.0);
            let (f0, f1) = (w0.radial_profile(rho), w1.radial_profile(rho));
            overlap += w * half * f0 * f1 * rho;
            scale0 += w * half * f0 * f0 * rho;
            scale1 += w * half * f1 * f1 * rho;
        }
        assert_abs_diff_eq!(overlap / (scale0 * scale1).sqrt(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn numeric_levels_match_the_closed_form_on_the_near_axis_potential() {
        let p = unit_params(1.0, 1.3, 2.0, 10);
        let grid = GridSpec {
            n_rho: 128,
            n_z: 128,
            ..GridSpec::default()
        };
        for &m in &[0, 2] {
            let numeric = spectrum_numeric(&p, m, PotentialKind::ApproxF, &grid, 4).unwrap();
            let mut expected: Vec<f64> = (0..4)
                .flat_map(|nr| (0..4).map(move |nz| p.analytic_energy(m, nr, nz)))
                .collect();
            expected.sort_by(f64::total_cmp);
            for (i, (&num, &exact)) in numeric.energies.iter().zip(&expected).enumerate() {
                assert!(
                    (num - exact).abs() <= 5e-3 * exact.abs(),
                    "m={m} level {i}: numeric {num:.8} vs closed form {exact:.8}"
                );
            }
            for pair in numeric.energies.windows(2) {
                assert!(pair[0] < pair[1]);
            }
        }
    }

    #[test]
    fn discretization_error_shrinks_at_second_order() {
        let p = unit_params(1.0, 1.3, 2.0, 10);
        let exact = p.analytic_energy(2, 0, 0);
        let mut errors = Vec::new();
        for &n in &[48usize, 96] {
            let grid = GridSpec {
                n_rho: n,
                n_z: n,
                ..GridSpec::default()
            };
            let numeric = spectrum_numeric(&p, 2, PotentialKind::ApproxF, &grid, 1).unwrap();
            errors.push((numeric.energies[0] - exact).abs());
        }
        let slope = (errors[0] / errors[1]).log2();
        assert!(
            (1.8..2.2).contains(&slope),
            "refinement slope {slope:.3} outside (1.8, 2.2); errors {errors:?}"
        );
    }

    #[test]
    fn strong_axial_trap_validates_the_near_axis_reduction() {
        let p = unit_params(1.0, 1e4, 50.0, 10_000);
        assert_relative_eq!(p.omega_tilde(), std::f64::consts::SQRT_2, max_relative = 1e-12);
        let grid = GridSpec {
            n_rho: 96,
            n_z: 48,
            ..GridSpec::default()
        };
        let numeric = spectrum_numeric(&p, 0, PotentialKind::ExactF, &grid, 2).unwrap();
        let expected = [p.analytic_energy(0, 0, 0), p.analytic_energy(0, 1, 0)];
        for (num, exact) in numeric.energies.iter().zip(&expected) {
            assert!(
                (num - exact).abs() <= 0.02 * exact,
                "numeric {num:.6} vs closed form {exact:.6}"
            );
        }
    }

    #[test]
    fn refinement_check_flags_a_coarse_grid_and_extrapolates_a_fine_one() {
        let p = unit_params(1.0, 1.3, 2.0, 10);
        let grid = GridSpec {
            n_rho: 32,
            n_z: 32,
            ..GridSpec::default()
        };
        let err = spectrum_numeric_checked(&p, 0, PotentialKind::ApproxF, &grid, 2, 1e-9)
            .unwrap_err();
        assert!(matches!(err, SpectrumError::GridTooCoarse { .. }));

        let checked =
            spectrum_numeric_checked(&p, 0, PotentialKind::ApproxF, &grid, 2, 5e-2).unwrap();
        let exact = p.analytic_energy(0, 0, 0);
        let fine_err = (checked.fine.energies[0] - exact).abs();
        let extrap_err = (checked.extrapolated[0] - exact).abs();
        assert!(
            extrap_err < fine_err,
            "extrapolation did not improve: {extrap_err:.3e} vs {fine_err:.3e}"
        );
    }

    #[test]
    fn numeric_solver_is_deterministic() {
        let p = unit_params(1.0, 1.3, 2.0, 4);
        let grid = GridSpec {
            n_rho: 48,
            n_z: 48,
            ..GridSpec::default()
        };
        let a = spectrum_numeric(&p, 1, PotentialKind::ApproxF, &grid, 3).unwrap();
        let b = spectrum_numeric(&p, 1, PotentialKind::ApproxF, &grid, 3).unwrap();
        assert_eq!(a.energies, b.energies);
        assert_eq!(a.matvecs, b.matvecs);
    }

    #[test]
    fn grid_validation_rejects_undersized_domains() {
        let p = unit_params(1.0, 1.0, 1.0, 1);
        let tiny = GridSpec {
            n_rho: 4,
            n_z: 64,
            ..GridSpec::default()
        };
        assert!(matches!(
            spectrum_numeric(&p, 0, PotentialKind::ApproxF, &tiny, 1),
            Err(SpectrumError::DomainError(_))
        ));
        let short = GridSpec {
            rho_extent: 3.0,
            ..GridSpec::default()
        };
        assert!(matches!(
            spectrum_numeric(&p, 0, PotentialKind::ApproxF, &short, 1),
            Err(SpectrumError::DomainError(_))
        ));
    }
}

//! Run configuration: one JSON document plus dot-path `--set` overrides.

use std::path::{Path, PathBuf};

use monopole::adiabatic::RegionGrid;
use monopole::fields::{AtomConfig, BeamConfig, TrapConfig};
use monopole::spectrum::{GridSpec, PotentialKind};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

/// Everything one invocation needs: the physical system, a seed for the
/// eigensolver, the output location, and per-task knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub atom: AtomSi,
    pub beam: BeamConfig,
    pub trap: TrapConfig,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub tasks: Tasks,
}

fn default_seed() -> u64 {
    0x5EED
}

impl RunConfig {
    pub fn atom_config(&self) -> AtomConfig {
        AtomConfig::from_si(self.atom.mass_kg, self.atom.energy_joule)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.atom_config().validate()?;
        self.beam.validate()?;
        self.trap.validate()?;
        Ok(())
    }
}

/// Atom inputs in SI units; converted to ħ = 1 units at the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSi {
    /// Atomic mass, kg.
    pub mass_kg: f64,
    /// Characteristic kinetic energy of the wavepacket, J.
    pub energy_joule: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> OutputConfig {
        OutputConfig { directory: PathBuf::from("out") }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tasks {
    pub fields: FieldsTask,
    pub gauge_map: GaugeMapTask,
    pub flux: FluxTask,
    pub holonomy: HolonomyTask,
    pub harmonics: HarmonicsTask,
    pub spectrum_analytic: SpectrumAnalyticTask,
    pub spectrum_numeric: SpectrumNumericTask,
    pub adiabatic: AdiabaticTask,
}

/// x-z slice of the beam envelopes and internal energies, cell-centred so an
/// even count never lands on the degenerate origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldsTask {
    pub n_per_axis: usize,
    /// Half-width of the slice, m.
    pub extent: f64,
}

impl Default for FieldsTask {
    fn default() -> FieldsTask {
        FieldsTask { n_per_axis: 64, extent: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaugeMapTask {
    /// Sphere radius, m.
    pub radius: f64,
    pub n_theta: usize,
    pub n_phi: usize,
    /// Finite-difference step as a fraction of the radius.
    pub step_factor: f64,
}

impl Default for GaugeMapTask {
    fn default() -> GaugeMapTask {
        GaugeMapTask {
            radius: 1e-4,
            n_theta: 24,
            n_phi: 8,
            step_factor: monopole::gauge::DEFAULT_STEP_FACTOR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FluxTask {
    /// Sphere radii, m.
    pub radii: Vec<f64>,
    pub quadrature_order: usize,
}

impl Default for FluxTask {
    fn default() -> FluxTask {
        FluxTask { radii: vec![1e-6, 1e-5, 1e-4], quadrature_order: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HolonomyTask {
    /// Circle radius, m.
    pub radius: f64,
    /// Colatitudes inside the patch overlap band, rad.
    pub thetas: Vec<f64>,
    pub n_samples: usize,
}

impl Default for HolonomyTask {
    fn default() -> HolonomyTask {
        let half = std::f64::consts::FRAC_PI_2;
        let band = monopole::fields::OVERLAP_HALF_WIDTH;
        HolonomyTask {
            radius: 1e-4,
            thetas: vec![half - 0.5 * band, half, half + 0.5 * band],
            n_samples: 256,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HarmonicsTask {
    /// How many values of l to take, starting from the lowest admissible one.
    pub l_count: usize,
    pub n_theta: usize,
    pub n_phi: usize,
    /// Gauss-Legendre order for the orthonormality integrals.
    pub quadrature_order: usize,
}

impl Default for HarmonicsTask {
    fn default() -> HarmonicsTask {
        HarmonicsTask { l_count: 3, n_theta: 12, n_phi: 8, quadrature_order: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumAnalyticTask {
    pub m_list: Vec<i32>,
    pub n_rho_max: u32,
    pub n_z_max: u32,
}

impl Default for SpectrumAnalyticTask {
    fn default() -> SpectrumAnalyticTask {
        SpectrumAnalyticTask { m_list: vec![-2, -1, 0, 1, 2], n_rho_max: 3, n_z_max: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumNumericTask {
    pub m_list: Vec<i32>,
    pub potential: PotentialKind,
    pub grid: GridSpec,
    pub n_eigs: usize,
    /// When set, solve again on the doubled grid and fail with exit code 2
    /// unless the estimated relative error stays below this.
    pub check_rel_tol: Option<f64>,
}

impl Default for SpectrumNumericTask {
    fn default() -> SpectrumNumericTask {
        SpectrumNumericTask {
            m_list: vec![0, 1],
            potential: PotentialKind::ApproxF,
            grid: GridSpec { n_rho: 128, n_z: 128, ..GridSpec::default() },
            n_eigs: 5,
            check_rel_tol: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdiabaticTask {
    /// Largest acceptable coupling/gap ratio, in (0, 1].
    pub criterion: f64,
    /// Rays to scan for the threshold radius.
    pub directions: Vec<[f64; 3]>,
    pub region: RegionGrid,
}

impl Default for AdiabaticTask {
    fn default() -> AdiabaticTask {
        AdiabaticTask {
            criterion: 1.0,
            directions: vec![[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]],
            region: RegionGrid {
                n_rho: 64,
                n_z: 64,
                rho_max: 1e-3,
                z_min: -1e-3,
                z_max: 1e-3,
            },
        }
    }
}

/// Reads, overrides, deserializes, and validates one configuration.
///
/// The file is parsed first so every default is materialized, then `--set`
/// overrides are applied to that canonical form and the result is parsed
/// again; this way an override can reach into a nested section without
/// restating its siblings. Returns the typed configuration together with its
/// canonical JSON form, which is what every output file embeds.
pub fn load(path: &Path, overrides: &[String]) -> Result<(RunConfig, Value), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{} is not valid JSON: {e}", path.display())))?;
    let base: RunConfig = serde_json::from_value(value)
        .map_err(|e| CliError::Config(format!("invalid configuration: {e}")))?;
    let cfg = if overrides.is_empty() {
        base
    } else {
        let mut resolved = serde_json::to_value(&base).expect("a parsed configuration serializes");
        for item in overrides {
            apply_override(&mut resolved, item)?;
        }
        serde_json::from_value(resolved)
            .map_err(|e| CliError::Config(format!("invalid configuration after --set: {e}")))?
    };
    cfg.validate()?;
    let resolved = serde_json::to_value(&cfg).expect("a validated configuration serializes");
    Ok((cfg, resolved))
}

/// Applies one `key.path=value` override; the value is parsed as JSON and
/// falls back to a plain string, so `--set trap.type=harmonic` works without
/// inner quotes.
fn apply_override(root: &mut Value, item: &str) -> Result<(), CliError> {
    let (path, raw) = item
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("--set expects key=value, got '{item}'")))?;
    let segments: Vec<&str> = path.split('.').collect();
    if path.is_empty() || segments.iter().any(|s| s.is_empty()) {
        return Err(CliError::Config(format!("--set has an empty path segment in '{item}'")));
    }
    let parsed =
        serde_json::from_str::<Value>(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    for seg in &segments[..segments.len() - 1] {
        let map = node.as_object_mut().ok_or_else(|| {
            CliError::Config(format!("--set path '{path}' descends into a non-object at '{seg}'"))
        })?;
        node = map.entry(seg.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    let map = node.as_object_mut().ok_or_else(|| {
        CliError::Config(format!("--set path '{path}' ends inside a non-object"))
    })?;
    map.insert(segments[segments.len() - 1].to_string(), parsed);
    Ok(())
}

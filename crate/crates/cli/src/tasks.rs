//! The eight configuration-driven subcommands.

use monopole::adiabatic::{self, AdiabaticError};
use monopole::angular::{allowed_l, monopole_harmonic, HalfInt};
use monopole::fields::{eigensystem, rabi_at, Patch, OVERLAP_HALF_WIDTH};
use monopole::gauge::{
    connection_analytic, connection_numeric, monopole_flux, quantization_check,
    transition_holonomy,
};
use monopole::geometry::{self, Position};
use monopole::lanczos::LanczosOptions;
use monopole::numeric::gauss_legendre;
use monopole::spectrum::{
    analytic_levels, spectrum_numeric_checked, spectrum_numeric_with, NumericSpectrum,
    SpectrumLevel, TrapSpectrumParams,
};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::config::RunConfig;
use crate::output::{fmt, OutputWriter};
use crate::CliError;

pub fn fields(cfg: &RunConfig, out: &OutputWriter) -> Result<(), CliError> {
    let atom = cfg.atom_config();
    let t = &cfg.tasks.fields;
    if t.n_per_axis == 0 || !(t.extent > 0.0 && t.extent.is_finite()) {
        return Err(CliError::Config(
            "tasks.fields needs n_per_axis >= 1 and a positive extent".into(),
        ));
    }
    let h = 2.0 * t.extent / t.n_per_axis as f64;
    let mut rows = Vec::with_capacity(t.n_per_axis * t.n_per_axis);
    for i in 0..t.n_per_axis {
        let x = -t.extent + (i as f64 + 0.5) * h;
        for j in 0..t.n_per_axis {
            let z = -t.extent + (j as f64 + 0.5) * h;
            let pos = Position::new(x, 0.0, z);
            let (omega_p, omega_c) = rabi_at(&cfg.beam, &pos);
            let frame = eigensystem(&cfg.beam, &cfg.trap, &atom, &pos, Patch::A)?;
            let gap = frame.gap_plus.min(frame.gap_minus);
            rows.push(vec![
                fmt(x),
                fmt(0.0),
                fmt(z),
                fmt(omega_p.norm()),
                fmt(omega_c.norm()),
                fmt(frame.e0),
                fmt(frame.e_plus),
                fmt(frame.e_minus),
                fmt(gap),
            ]);
        }
    }
    out.write_csv(
        "fields.csv",
        "fields-v1",
        &["x", "y", "z", "omega_p_abs", "omega_c_abs", "e0", "e_plus", "e_minus", "gap"],
        &rows,
    )
}

pub fn gauge_map(cfg: &RunConfig, out: &OutputWriter) -> Result<(), CliError> {
    let t = &cfg.tasks.gauge_map;
    if t.n_theta == 0 || t.n_phi == 0 {
        return Err(CliError::Config("tasks.gauge_map needs nonzero grid counts".into()));
    }
    if !(t.radius > 0.0 && t.step_factor > 0.0 && t.step_factor < 0.1) {
        return Err(CliError::Config(
            "tasks.gauge_map needs radius > 0 and step_factor in (0, 0.1)".into(),
        ));
    }
    let margin = 0.1;
    let spans = [
        (Patch::A, margin, FRAC_PI_2 + OVERLAP_HALF_WIDTH - margin),
        (Patch::B, FRAC_PI_2 - OVERLAP_HALF_WIDTH + margin, PI - margin),
    ];
    // the stencil must resolve the optical phase as well as the sphere
    let scale_len = if cfg.beam.k > 0.0 { t.radius.min(cfg.beam.k.recip()) } else { t.radius };
    let mut rows = Vec::new();
    for (patch, lo, hi) in spans {
        for i in 0..t.n_theta {
            let theta = lo + (i as f64 + 0.5) * (hi - lo) / t.n_theta as f64;
            for j in 0..t.n_phi {
                let phi = TAU * j as f64 / t.n_phi as f64;
                let pos = Position::from_spherical(t.radius, theta, phi);
                let a = connection_analytic(&cfg.beam, &pos, patch, true)?;
                let n = connection_numeric(&cfg.beam, &pos, patch, t.step_factor * scale_len)?;
                let scale = geometry::norm(a).max(1.0 / t.radius);
                let rel = geometry::norm(geometry::sub(n, a)) / scale;
                rows.push(vec![
                    format!("{patch:?}"),
                    fmt(pos.x),
                    fmt(pos.y),
                    fmt(pos.z),
                    fmt(theta),
                    fmt(phi),
                    fmt(a[0]),
                    fmt(a[1]),
                    fmt(a[2]),
                    fmt(n[0]),
                    fmt(n[1]),
                    fmt(n[2]),
                    fmt(rel),
                ]);
            }
        }
    }
    out.write_csv(
        "gauge_map.csv",
        "gauge-map-v1",
        &[
            "patch",
            "x",
            "y",
            "z",
            "theta",
            "phi",
            "ax_analytic",
            "ay_analytic",
            "az_analytic",
            "ax_numeric",
            "ay_numeric",
            "az_numeric",
            "rel_diff",
        ],
        &rows,
    )
}

pub fn flux(cfg: &RunConfig, out: &OutputWriter) -> Result<(), CliError> {
    let t = &cfg.tasks.flux;
    if t.radii.is_empty() {
        return Err(CliError::Config("tasks.flux.radii must not be empty".into()));
    }
    if t.quadrature_order < 2 {
        return Err(CliError::Config("tasks.flux.quadrature_order must be at least 2".into()));
    }
    let mut reports = Vec::with_capacity(t.radii.len());
    for &radius in &t.radii {
        reports.push(monopole_flux(&cfg.beam, radius, t.quadrature_order)?);
    }
    let results = json!({
        "reports": reports,
        "charge_over_eta": f64::from(cfg.beam.g) / cfg.beam.eta,
        "quantization": quantization_check(cfg.beam.g, cfg.beam.eta),
    });
    out.write_json("flux.json", "flux-v1", results)
}

pub fn holonomy(cfg: &RunConfig, out: &OutputWriter) -> Result<(), CliError> {
    let t = &cfg.tasks.holonomy;
    if t.thetas.is_empty() || t.n_samples == 0 {
        return Err(CliError::Config(
            "tasks.holonomy needs at least one colatitude and one sample".into(),
        ));
    }
    let mut loops = Vec::with_capacity(t.thetas.len());
    for &theta in &t.thetas {
        let h = transition_holonomy(&cfg.beam, t.radius, theta, t.n_samples)?;
        loops.push(json!({"theta": theta, "holonomy": h, "winding": h / TAU}));
    }
    let results = json!({
        "radius": t.radius,
        "n_samples": t.n_samples,
        "loops": loops,
        "charge_over_eta": f64::from(cfg.beam.g) / cfg.beam.eta,
        "quantization": quantization_check(cfg.beam.g, cfg.beam.eta),
    });
    out.write_json("holonomy.json", "holonomy-v1", results)
}

fn harmonic_states(g: i32, l_count: usize) -> Vec<(HalfInt, HalfInt)> {
    let mut states = Vec::new();
    for l in allowed_l(g, l_count) {
        let ld = l.doubled();
        let mut md = -ld;
        while md <= ld {
            states.push((l, HalfInt::from_doubled(md)));
            md += 2;
        }
    }
    states
}

pub fn harmonics(cfg: &RunConfig, out: &OutputWriter) -> Result<(), CliError> {
    let t = &cfg.tasks.harmonics;
    if t.l_count == 0 || t.n_theta == 0 || t.n_phi == 0 {
        return Err(CliError::Config("tasks.harmonics needs nonzero counts".into()));
    }
    if t.quadrature_order < 8 {
        return Err(CliError::Config(
            "tasks.harmonics.quadrature_order must be at least 8".into(),
        ));
    }
    let q = HalfInt::half_of(cfg.beam.g);
    let states = harmonic_states(cfg.beam.g, t.l_count);

    let mut rows = Vec::with_capacity(states.len() * t.n_theta * t.n_phi);
    for &(l, m) in &states {
        for i in 0..t.n_theta {
            let theta = (i as f64 + 0.5) * PI / t.n_theta as f64;
            for j in 0..t.n_phi {
                let phi = TAU * j as f64 / t.n_phi as f64;
                let ya = monopole_harmonic(q, l, m, theta, phi, Patch::A)?;
                let yb = monopole_harmonic(q, l, m, theta, phi, Patch::B)?;
                rows.push(vec![
                    l.doubled().to_string(),
                    m.doubled().to_string(),
                    fmt(theta),
                    fmt(phi),
                    fmt(ya.re),
                    fmt(ya.im),
                    fmt(yb.re),
                    fmt(yb.im),
                    fmt(ya.norm()),
                ]);
            }
        }
    }
    out.write_csv(
        "harmonics_values.csv",
        "harmonics-values-v1",
        &["l2", "m2", "theta", "phi", "re_a", "im_a", "re_b", "im_b", "abs"],
        &rows,
    )?;

    let (nodes, weights) = gauss_legendre(t.quadrature_order);
    let n_phi = 2 * t.quadrature_order;
    let dphi = TAU / n_phi as f64;
    let mut tables: Vec<Vec<Complex64>> = Vec::with_capacity(states.len());
    for &(l, m) in &states {
        let mut table = Vec::with_capacity(nodes.len() * n_phi);
        for x in &nodes {
            let theta = x.clamp(-1.0, 1.0).acos();
            for j in 0..n_phi {
                let phi = dphi * j as f64;
                table.push(monopole_harmonic(q, l, m, theta, phi, Patch::A)?);
            }
        }
        tables.push(table);
    }
    let mut gram_rows = Vec::with_capacity(states.len() * states.len());
    for (a, &(la, ma)) in states.iter().enumerate() {
        for (b, &(lb, mb)) in states.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, w) in weights.iter().enumerate() {
                for j in 0..n_phi {
                    let p = i * n_phi + j;
                    acc += tables[a][p].conj() * tables[b][p] * (w * dphi);
                }
            }
            let expected = if a == b { 1.0 } else { 0.0 };
            let err = (acc - expected).norm();
            gram_rows.push(vec![
                la.doubled().to_string(),
                ma.doubled().to_string(),
                lb.doubled().to_string(),
                mb.doubled().to_string(),
                fmt(acc.re),
                fmt(acc.im),
                fmt(expected),
                fmt(err),
            ]);
        }
    }
    out.write_csv(
        "harmonics_gram.csv",
        "harmonics-gram-v1",
        &["l2_a", "m2_a", "l2_b", "m2_b", "re", "im", "expected", "abs_error"],
        &gram_rows,
    )
}

pub fn spectrum_analytic(cfg: &RunConfig, out: &OutputWriter) -> Result<(), CliError> {
    let t = &cfg.tasks.spectrum_analytic;
    let p = TrapSpectrumParams::new(cfg.atom_config(), &cfg.trap, cfg.beam.g)?;
    let mut sectors = Vec::with_capacity(t.m_list.len());
    for &m in &t.m_list {
        let levels = analytic_levels(&p, m, t.n_rho_max, t.n_z_max);
        sectors.push(json!({
            "m": m,
            "zero_point_term": p.zero_point_term(m),
            "levels": levels,
        }));
    }
    let results = json!({
        "params": p,
        "omega_tilde": p.omega_tilde(),
        "frequency_shift": p.frequency_shift(),
        "sectors": sectors,
    });
    out.write_json("spectrum_analytic.json", "spectrum-analytic-v1", results)
}

#[derive(Serialize)]
struct SpectrumSector {
    m: i32,
    numeric: NumericSpectrum,
    analytic: Vec<SpectrumLevel>,
    rel_delta: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    refinement: Option<Refinement>,
}

#[derive(Serialize)]
struct Refinement {
    extrapolated: Vec<f64>,
    estimated_rel_error: Vec<f64>,
}

pub fn spectrum_numeric(cfg: &RunConfig, out: &OutputWriter) -> Result<(), CliError> {
    let t = &cfg.tasks.spectrum_numeric;
    let p = TrapSpectrumParams::new(cfg.atom_config(), &cfg.trap, cfg.beam.g)?;
    let n_max = t.n_eigs as u32;
    let mut sectors = Vec::with_capacity(t.m_list.len());
    for &m in &t.m_list {
        let (numeric, refinement) = match t.check_rel_tol {
            Some(tol) => {
                let checked =
                    spectrum_numeric_checked(&p, m, t.potential, &t.grid, t.n_eigs, tol)?;
                let refinement = Refinement {
                    extrapolated: checked.extrapolated,
                    estimated_rel_error: checked.estimated_rel_error,
                };
                (checked.fine, Some(refinement))
            }
            None => {
                let opts = LanczosOptions { seed: cfg.seed, ..LanczosOptions::new(t.n_eigs) };
                (spectrum_numeric_with(&p, m, t.potential, &t.grid, &opts)?, None)
            }
        };
        let mut analytic = analytic_levels(&p, m, n_max, n_max);
        analytic.truncate(t.n_eigs);
        let rel_delta = numeric
            .energies
            .iter()
            .zip(analytic.iter())
            .map(|(e, level)| (e - level.energy) / level.energy)
            .collect();
        sectors.push(SpectrumSector { m, numeric, analytic, rel_delta, refinement });
    }
    let results = json!({
        "params": p,
        "potential": t.potential,
        "sectors": sectors,
    });
    out.write_json("spectrum_numeric.json", "spectrum-numeric-v1", results)
}

pub fn adiabatic(cfg: &RunConfig, out: &OutputWriter) -> Result<(), CliError> {
    let t = &cfg.tasks.adiabatic;
    let atom = cfg.atom_config();
    let mut thresholds = Vec::with_capacity(t.directions.len());
    for &direction in &t.directions {
        match adiabatic::threshold_radius(&cfg.beam, &atom, direction, t.criterion) {
            Ok(report) => thresholds.push(json!({
                "direction": direction,
                "status": "found",
                "radius": report.radius,
                "ratio_at_radius": report.ratio_at_radius,
            })),
            Err(AdiabaticError::NoThreshold { r_min, ratio, .. }) => thresholds.push(json!({
                "direction": direction,
                "status": "below_criterion_everywhere",
                "radius": null,
                "r_min": r_min,
                "ratio_at_r_min": ratio,
            })),
            Err(e) => return Err(e.into()),
        }
    }

    let map = adiabatic::region_map(&cfg.beam, &atom, &t.region, t.criterion)?;
    let rows: Vec<Vec<String>> = map
        .samples
        .iter()
        .map(|s| {
            vec![
                fmt(s.rho),
                fmt(s.z),
                fmt(s.lhs),
                fmt(s.rhs),
                fmt(s.ratio),
                (s.valid as u8).to_string(),
            ]
        })
        .collect();
    out.write_csv(
        "adiabatic_region.csv",
        "adiabatic-region-v1",
        &["rho", "z", "lhs", "rhs", "ratio", "valid"],
        &rows,
    )?;

    let results = json!({
        "criterion": t.criterion,
        "thresholds": thresholds,
        "region": {
            "n_rho": map.n_rho,
            "n_z": map.n_z,
            "rho_max": t.region.rho_max,
            "z_min": t.region.z_min,
            "z_max": t.region.z_max,
            "valid_fraction": map.valid_fraction,
            "table": "adiabatic_region.csv",
        },
    });
    out.write_json("adiabatic_thresholds.json", "adiabatic-v1", results)
}

//! Acceptance gate: one test per criterion, each printing a pass/fail line
//! with its measured figure next to the pinned tolerance. Run with
//! `cargo test --test acceptance -- --nocapture` to see every line.

use std::time::Instant;

use monopole::adiabatic::{region_map, threshold_radius, RegionGrid};
use monopole::angular::{allowed_l, free_radial, monopole_harmonic, mu_index, HalfInt};
use monopole::fields::{
    dark_state, eigenvalues, hamiltonian, AtomConfig, BeamConfig, Patch, TrapConfig,
    OVERLAP_HALF_WIDTH,
};
use monopole::gauge::{
    connection_analytic, connection_numeric, monopole_flux, quantization_check,
    transition_holonomy, Quantization, DEFAULT_STEP_FACTOR,
};
use monopole::geometry::{self, Position};
use monopole::spectrum::{
    analytic_levels, spectrum_numeric, GridSpec, PotentialKind, TrapSpectrumParams,
};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

fn report(n: u32, name: &str, ok: bool, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("acceptance {n:02} {name}: {tag} — {detail}");
    assert!(ok, "criterion {n:02} {name}: {detail}");
}

/// splitmix64 mapped to [0, 1).
struct Rng(u64);

impl Rng {
    fn next(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        ((z ^ (z >> 31)) >> 11) as f64 / (1u64 << 53) as f64
    }

    fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo * (hi / lo).powf(self.next())
    }
}

#[test]
fn criterion_01_internal_eigenstructure_oracle() {
    let t0 = Instant::now();
    let mut rng = Rng(0xACCE_01);
    let n = 10_000;
    let mut worst_eig = 0.0f64;
    let mut worst_dark = 0.0f64;
    for _ in 0..n {
        let omega_p = Complex64::from_polar(rng.log_uniform(1e2, 1e9), TAU * rng.next());
        let omega_c = Complex64::from_polar(rng.log_uniform(1e2, 1e9), TAU * rng.next());
        let delta = 2e9 * (rng.next() - 0.5);
        let v = 2e8 * (rng.next() - 0.5);
        let h = hamiltonian(omega_p, omega_c, delta, v);
        let m = nalgebra::Matrix3::from_fn(|i, j| h[i][j]);
        let scale = m.norm();
        let mut oracle: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        oracle.sort_by(f64::total_cmp);
        let closed = eigenvalues(omega_p.norm_sqr() + omega_c.norm_sqr(), delta, v);
        for (a, b) in closed.iter().zip(oracle.iter()) {
            worst_eig = worst_eig.max((a - b).abs() / scale);
        }
        let dark = dark_state(omega_p, omega_c).unwrap();
        let mut resid = 0.0f64;
        for row in 0..3 {
            let mut acc = -v * dark[row];
            for col in 0..3 {
                acc += h[row][col] * dark[col];
            }
            resid += acc.norm_sqr();
        }
        worst_dark = worst_dark.max(resid.sqrt() / scale);
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let ok = worst_eig <= 1e-12 && worst_dark <= 1e-10 && elapsed < 5.0;
    report(
        1,
        "internal eigenstructure oracle",
        ok,
        &format!(
            "{n} random couplings: closed-form levels within {worst_eig:.2e} of a dense \
             eigensolver (tol 1e-12), dark residual {worst_dark:.2e} of |H| (tol 1e-10), \
             {elapsed:.2} s (budget 5 s)"
        ),
    );
}

#[test]
fn criterion_02_connection_matches_finite_differences() {
    let t0 = Instant::now();
    let beam = BeamConfig { xi: 9.869604401089357e20, g: 10, eta: 1.0, k: 1e7, delta: 0.0 };
    let margin = 0.12;
    let spans = [
        (Patch::A, margin, FRAC_PI_2 + OVERLAP_HALF_WIDTH - margin),
        (Patch::B, FRAC_PI_2 - OVERLAP_HALF_WIDTH + margin, PI - margin),
    ];
    let mut worst = 0.0f64;
    let mut count = 0;
    for (patch, lo, hi) in spans {
        for i in 0..10 {
            let r = 1e-7 * (1e4f64).powf(i as f64 / 9.0);
            for j in 0..10 {
                let theta = lo + (j as f64 + 0.5) * (hi - lo) / 10.0;
                for l in 0..10 {
                    let phi = TAU * l as f64 / 10.0;
                    let pos = Position::from_spherical(r, theta, phi);
                    let analytic = connection_analytic(&beam, &pos, patch, true).unwrap();
                    let h = DEFAULT_STEP_FACTOR * r.min(beam.k.recip());
                    let numeric = connection_numeric(&beam, &pos, patch, h).unwrap();
                    let scale = geometry::norm(analytic).max(1.0 / r);
                    let rel = geometry::norm(geometry::sub(numeric, analytic)) / scale;
                    worst = worst.max(rel);
                    count += 1;
                }
            }
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let ok = worst <= 1e-6 && count == 2000 && elapsed < 30.0;
    report(
        2,
        "connection vs finite differences",
        ok,
        &format!(
            "{count} off-axis points over both patches, radii 1e-7..1e-3 m: worst relative \
             deviation {worst:.2e} (tol 1e-6), {elapsed:.2} s (budget 30 s)"
        ),
    );
}

#[test]
fn criterion_03_flux_is_quantized_and_radius_free() {
    let t0 = Instant::now();
    let mut worst_int = 0.0f64;
    let mut worst_val = 0.0f64;
    let mut signs_ok = true;
    for g in [1, 2, 5] {
        let beam = BeamConfig { xi: 1e18, g, eta: 1.0, k: 0.0, delta: 0.0 };
        for &radius in &[1e-6, 1e-5, 1e-4] {
            let rep = monopole_flux(&beam, radius, 64).unwrap();
            worst_int = worst_int.max((rep.chern - rep.chern.round()).abs());
            worst_val = worst_val.max((rep.flux + TAU * f64::from(g)).abs() / (TAU * f64::from(g)));
            signs_ok &= rep.chern.round() == -f64::from(g);
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let ok = worst_int <= 1e-6 && worst_val <= 1e-6 && signs_ok && elapsed < 10.0;
    report(
        3,
        "flux quantization across radii",
        ok,
        &format!(
            "g in {{1,2,5}}, spheres spanning two decades: flux = -2 pi g within {worst_val:.2e} \
             relative, |chern - nearest integer| <= {worst_int:.2e} (tol 1e-6), {elapsed:.2} s \
             (budget 10 s)"
        ),
    );
}

#[test]
fn criterion_04_holonomy_counts_the_winding() {
    let quantized = {
        let beam = BeamConfig { xi: 1e18, g: 3, eta: 1.0, k: 0.0, delta: 0.0 };
        let h = transition_holonomy(&beam, 1e-5, FRAC_PI_2, 256).unwrap();
        ((h / TAU - 3.0).abs(), quantization_check(beam.g, beam.eta))
    };
    let fractional = {
        let beam = BeamConfig { xi: 1e18, g: 3, eta: 2.0, k: 0.0, delta: 0.0 };
        let h = transition_holonomy(&beam, 1e-5, FRAC_PI_2, 256).unwrap();
        ((h - 3.0 * PI).abs() / (3.0 * PI), quantization_check(beam.g, beam.eta))
    };
    let even = {
        let beam = BeamConfig { xi: 1e18, g: 4, eta: 2.0, k: 0.0, delta: 0.0 };
        let h = transition_holonomy(&beam, 1e-5, FRAC_PI_2, 256).unwrap();
        ((h / TAU - 2.0).abs(), quantization_check(beam.g, beam.eta))
    };
    let ok = quantized.0 <= 1e-10
        && quantized.1 == Quantization::Quantized
        && fractional.0 <= 1e-10
        && fractional.1 == Quantization::NotQuantized
        && even.0 <= 1e-10
        && even.1 == Quantization::Quantized;
    report(
        4,
        "transition holonomy",
        ok,
        &format!(
            "g=3 eta=1: winding error {:.2e} and quantized; g=3 eta=2: holonomy = 3 pi within \
             {:.2e} relative and flagged not quantized; g=4 eta=2: winding 2 within {:.2e} \
             (tol 1e-10)",
            quantized.0, fractional.0, even.0
        ),
    );
}

#[test]
fn criterion_05_monopole_harmonics_are_orthonormal() {
    let order = 48;
    let (nodes, weights) = monopole::numeric::gauss_legendre(order);
    let n_phi = 2 * order;
    let dphi = TAU / n_phi as f64;
    let mut worst_gram = 0.0f64;
    let mut worst_moduli = 0.0f64;
    let mut worst_phase = 0.0f64;
    let mut lowest_ok = true;
    for g in [0, 1, 2, 4] {
        let q = HalfInt::half_of(g);
        let mut states = Vec::new();
        for l in allowed_l(g, 5) {
            if l.doubled() > 8 {
                break;
            }
            let mut md = -l.doubled();
            while md <= l.doubled() {
                states.push((l, HalfInt::from_doubled(md)));
                md += 2;
            }
        }
        lowest_ok &= allowed_l(g, 1)[0].doubled() == g.abs();

        let mut tables: Vec<Vec<Complex64>> = Vec::with_capacity(states.len());
        for &(l, m) in &states {
            let mut table = Vec::with_capacity(order * n_phi);
            for x in &nodes {
                let theta = x.clamp(-1.0, 1.0).acos();
                for j in 0..n_phi {
                    let phi = dphi * j as f64;
                    table.push(monopole_harmonic(q, l, m, theta, phi, Patch::A).unwrap());
                }
            }
            tables.push(table);
        }
        for a in 0..states.len() {
            for b in 0..states.len() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, w) in weights.iter().enumerate() {
                    for j in 0..n_phi {
                        let p = i * n_phi + j;
                        acc += tables[a][p].conj() * tables[b][p] * (w * dphi);
                    }
                }
                let expected = if a == b { 1.0 } else { 0.0 };
                worst_gram = worst_gram.max((acc - expected).norm());
            }
        }

        let mut probe = Rng(0xACCE_05 + g as u64);
        for &(l, m) in &states {
            for _ in 0..5 {
                let theta = 0.2 + 2.7 * probe.next();
                let phi = TAU * probe.next();
                let ya = monopole_harmonic(q, l, m, theta, phi, Patch::A).unwrap();
                let yb = monopole_harmonic(q, l, m, theta, phi, Patch::B).unwrap();
                worst_moduli = worst_moduli.max((ya.norm() - yb.norm()).abs());
                if ya.norm() > 1e-6 {
                    let phase = 0.37;
                    let a = monopole_harmonic(q, l, m, theta, phase, Patch::A).unwrap();
                    let b = monopole_harmonic(q, l, m, theta, phase, Patch::B).unwrap();
                    let wind = (a * b.conj()).arg();
                    let want = f64::from(q.doubled()) * phase;
                    let diff = (wind - want + PI).rem_euclid(TAU) - PI;
                    worst_phase = worst_phase.max(diff.abs());
                }
            }
        }
    }
    let ok = worst_gram <= 1e-8 && lowest_ok && worst_moduli <= 1e-12 && worst_phase <= 1e-10;
    report(
        5,
        "monopole harmonics",
        ok,
        &format!(
            "q in {{0, 1/2, 1, 2}}, all l <= 4: worst Gram deviation {worst_gram:.2e} (tol 1e-8); \
             ladders start at l = |g|/2; patch moduli agree within {worst_moduli:.2e}; the \
             section phases differ by 2 q phi within {worst_phase:.2e}"
        ),
    );
}

/// Neville extrapolation over (h, h/2, h/4) for an even error series.
fn extrap3(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    let a0 = f(h);
    let a1 = f(0.5 * h);
    let a2 = f(0.25 * h);
    let b1 = a1 + (a1 - a0) / 3.0;
    let b2 = a2 + (a2 - a1) / 3.0;
    b2 + (b2 - b1) / 15.0
}

#[test]
fn criterion_06_free_radial_solutions_satisfy_the_ode() {
    let atom = AtomConfig { mass_over_hbar: 1.0, energy_scale: 0.0 };
    let mut worst = 0.0f64;
    for (l2, g) in [(0, 0), (4, 2), (3, 1), (7, 3)] {
        let l = HalfInt::from_doubled(l2);
        for energy in [0.7f64, 2.3] {
            let k = (2.0 * energy).sqrt();
            let mu = mu_index(l, g).unwrap();
            let centrifugal = mu * mu - 0.25;
            let radial = |r: f64| free_radial(l, g, energy, &atom, r).unwrap();
            let pts: Vec<f64> =
                (0..40).map(|i| 0.1 / k * (100.0f64).powf(i as f64 / 39.0)).collect();
            let scale = pts.iter().map(|&r| radial(r).abs()).fold(0.0f64, f64::max) * k * k;
            for &r in &pts {
                let h = 2e-2 / k;
                let d2 = extrap3(|h| (radial(r + h) - 2.0 * radial(r) + radial(r - h)) / (h * h), h);
                let d1 = extrap3(|h| (radial(r + h) - radial(r - h)) / (2.0 * h), h);
                let residual = d2 + 2.0 / r * d1 + (k * k - centrifugal / (r * r)) * radial(r);
                worst = worst.max(residual.abs() / scale);
            }
        }
    }
    let ok = worst <= 1e-8;
    report(
        6,
        "free radial equation",
        ok,
        &format!(
            "integer and half-integer l over r in [0.1, 10]/k: worst residual {worst:.2e} of \
             k^2 max|R| (tol 1e-8)"
        ),
    );
}

#[test]
fn criterion_07_numeric_spectrum_matches_the_closed_form() {
    let t0 = Instant::now();
    let atom = AtomConfig { mass_over_hbar: 1.0, energy_scale: 0.0 };
    let trap = TrapConfig::Harmonic { omega: 1.0, omega_z: 1.3, z0: 2.0 };
    let grid = GridSpec { n_rho: 128, n_z: 128, rho_extent: 8.0, z_extent: 8.0 };
    let mut worst = 0.0f64;
    for g in [0, 2, 10] {
        let p = TrapSpectrumParams::new(atom, &trap, g).unwrap();
        for m in -2..=2 {
            let numeric = spectrum_numeric(&p, m, PotentialKind::ApproxF, &grid, 5).unwrap();
            let mut reference = analytic_levels(&p, m, 5, 5);
            reference.truncate(5);
            for (e, level) in numeric.energies.iter().zip(reference.iter()) {
                worst = worst.max((e - level.energy).abs() / level.energy);
            }
        }
    }

    let p10 = TrapSpectrumParams::new(atom, &trap, 10).unwrap();
    let exact = analytic_levels(&p10, 2, 0, 0)[0].energy;
    let mut errors = Vec::new();
    for n in [64usize, 128, 256] {
        let g = GridSpec { n_rho: n, n_z: n, rho_extent: 8.0, z_extent: 8.0 };
        let numeric = spectrum_numeric(&p10, 2, PotentialKind::ApproxF, &g, 1).unwrap();
        errors.push((numeric.energies[0] - exact).abs());
    }
    let slope_a = (errors[0] / errors[1]).log2();
    let slope_b = (errors[1] / errors[2]).log2();

    let p0 = TrapSpectrumParams::new(atom, &trap, 0).unwrap();
    let fine = GridSpec { n_rho: 512, n_z: 512, rho_extent: 8.0, z_extent: 8.0 };
    let ground = spectrum_numeric(&p0, 0, PotentialKind::ApproxF, &fine, 1).unwrap().energies[0];
    let ground_err = (ground - 1.65).abs() / 1.65;

    let elapsed = t0.elapsed().as_secs_f64();
    let slopes_ok = (1.6..=2.4).contains(&slope_a) && (1.6..=2.4).contains(&slope_b);
    let ok = worst <= 5e-3 && slopes_ok && ground_err <= 1e-3 && elapsed < 300.0;
    report(
        7,
        "numeric spectrum vs closed form",
        ok,
        &format!(
            "lowest 5 levels, m in -2..=2, g in {{0,2,10}}, 128x128 grid: worst deviation \
             {worst:.2e} (tol 5e-3); convergence slopes {slope_a:.2} and {slope_b:.2} (expect 2); \
             512x512 g=0 ground state off by {ground_err:.1e} (tol 1e-3); {elapsed:.0} s \
             (budget 300 s)"
        ),
    );
}

#[test]
fn criterion_08_stiff_axial_trap_with_the_exact_potential() {
    let t0 = Instant::now();
    let atom = AtomConfig { mass_over_hbar: 1.0, energy_scale: 0.0 };
    let trap = TrapConfig::Harmonic { omega: 1.0, omega_z: 1e4, z0: 50.0 };
    let p = TrapSpectrumParams::new(atom, &trap, 10_000).unwrap();
    let tilde_err = (p.omega_tilde() - 2.0f64.sqrt()).abs();
    let grid = GridSpec { n_rho: 96, n_z: 48, rho_extent: 8.0, z_extent: 8.0 };
    let mut worst = 0.0f64;
    for m in [0, 1] {
        let numeric = spectrum_numeric(&p, m, PotentialKind::ExactF, &grid, 3).unwrap();
        let mut reference = analytic_levels(&p, m, 3, 3);
        reference.truncate(3);
        for (e, level) in numeric.energies.iter().zip(reference.iter()) {
            worst = worst.max((e - level.energy).abs() / level.energy);
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    // the tolerance is dominated by the axial grid resolving the stiff
    // omega_z quanta; 5% is the documented bound for this 96x48 grid
    let ok = worst <= 5e-2 && tilde_err <= 1e-12;
    report(
        8,
        "stiff axial trap, exact potential",
        ok,
        &format!(
            "omega_z/omega = 1e4, g = 1e4 (omega_tilde = sqrt(2) within {tilde_err:.1e}): lowest \
             3 levels for m in {{0,1}} within {worst:.2e} of the closed form (documented tol \
             5e-2), {elapsed:.1} s"
        ),
    );
}

#[test]
fn criterion_09_case_study_thresholds_and_flagged_estimates() {
    let beam = BeamConfig { xi: 9.869604401089357e20, g: 10, eta: 1.0, k: 0.0, delta: 0.0 };
    let atom = AtomConfig::from_si(2.207e-25, 1e-26);
    let equator = threshold_radius(&beam, &atom, [1.0, 0.0, 0.0], 1.0).unwrap();
    let pole = threshold_radius(&beam, &atom, [0.0, 0.0, 1.0], 1.0).unwrap();
    let band_ok = [equator.radius, pole.radius].iter().all(|r| (1e-7..=1e-5).contains(r));
    let ratio_ok = (equator.ratio_at_radius - 1.0).abs() <= 1e-3
        && (pole.ratio_at_radius - 1.0).abs() <= 1e-3;

    let grid = RegionGrid { n_rho: 64, n_z: 64, rho_max: 1e-3, z_min: -1e-3, z_max: 1e-3 };
    let region = region_map(&beam, &atom, &grid, 1.0).unwrap();

    let report_doc = monopole_cli::repro::builtin_report().unwrap();
    let trapped = &report_doc.cases[1];
    let zero_point = trapped
        .items
        .iter()
        .find(|i| i.name == "zero_point_shift_m1_hz")
        .expect("the trapped case reports the zero-point shift");
    let magnitude_ok = zero_point.computed > 0.01 && zero_point.computed < 10.0;
    let flagged_ok = zero_point.verdict == "discrepant"
        && trapped
            .items
            .iter()
            .any(|i| i.name == "zero_point_shift_m10_hz" && i.verdict == "order_of_magnitude");

    let ok = band_ok && ratio_ok && region.valid_fraction >= 0.99 && magnitude_ok && flagged_ok;
    report(
        9,
        "published case studies",
        ok,
        &format!(
            "threshold radii {:.2e} m (equator) and {:.2e} m (pole) inside [1e-7, 1e-5] m; \
             {:.1}% of the millimetre-scale region is adiabatic (needs >= 99%); zero-point \
             shift {:.3} Hz vs the claimed 10 Hz is reported and flagged '{}' rather than \
             asserted",
            equator.radius,
            pole.radius,
            100.0 * region.valid_fraction,
            zero_point.computed,
            zero_point.verdict
        ),
    );
}

#[test]
fn criterion_10_outputs_are_identical_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let config_path = tmp.path().join("config.json");
    std::fs::write(
        &config_path,
        r#"{
  "atom": { "mass_kg": 2.207e-25, "energy_joule": 1e-26 },
  "beam": { "xi": 9.869604401089357e20, "g": 10000 },
  "trap": { "type": "harmonic", "omega": 628.3185307179587, "omega_z": 6283185.307179586, "z0": 1e-3 },
  "tasks": { "spectrum_numeric": { "m_list": [0, 1], "grid": { "n_rho": 64, "n_z": 64 }, "n_eigs": 3 } }
}"#,
    )
    .unwrap();

    let mut outputs = Vec::new();
    for threads in ["1", "2"] {
        let dir = tmp.path().join(format!("repro-{threads}"));
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_monopole"))
            .env("MONOPOLE_THREADS", threads)
            .args(["paper-repro", "--out"])
            .arg(&dir)
            .status()
            .unwrap();
        assert!(status.success());
        let spec_dir = tmp.path().join(format!("spec-{threads}"));
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_monopole"))
            .env("MONOPOLE_THREADS", threads)
            .args(["spectrum-numeric", "--config"])
            .arg(&config_path)
            .arg("--out")
            .arg(&spec_dir)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push((
            std::fs::read(dir.join("repro_report.json")).unwrap(),
            std::fs::read(spec_dir.join("spectrum_numeric.json")).unwrap(),
        ));
    }
    let repro_same = outputs[0].0 == outputs[1].0;
    let spectrum_same = outputs[0].1 == outputs[1].1;
    let ok = repro_same && spectrum_same;
    report(
        10,
        "determinism across thread counts",
        ok,
        &format!(
            "repro report byte-identical: {repro_same}; eigensolver output byte-identical: \
             {spectrum_same} (1 vs 2 worker threads, {} and {} bytes)",
            outputs[0].0.len(),
            outputs[0].1.len()
        ),
    );
}

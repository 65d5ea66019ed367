//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so every line is printed; exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use clap::Parser;
use dampedwig::langevin::{compare_to_propagator, simulate_ensemble, Scheme, SdeConfig};
use dampedwig::observables::{
    energy_generating_function, energy_weyl_symbol, gaussian_expectation, longtime_survival,
    nofriction_survival, survival_probability, thermal_angle_expectation, AngleFrame,
    AngleFunctional,
};
use dampedwig::phase::{
    canonical_phase_matrix, delta_matrix_element, phase_variance_diagonal, physical_phase_matrix,
    spectrum, thermal_levels_for, thermal_phase_variance, PhaseKind,
};
use dampedwig::quadrature::{integrate_2d, Tolerance};
use dampedwig::{evolve, propagator, thermal_state, DerivedParams, Gaussian2D, ModelParams};
use dampedwig_cli::validate::with_scaled_friction;
use dampedwig_cli::{cmd_validate, Cli, RunConfig, ValidationReport};
use nalgebra::Matrix2;

type Outcome = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn thermal(dd: f64, b: f64) -> DerivedParams {
    ModelParams::thermal_dimensionless(dd, b).derive().unwrap()
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn rel_norm(a: &Matrix2<f64>, b: &Matrix2<f64>) -> f64 {
    (a - b).norm() / b.norm()
}

fn frictionless_survival() -> Outcome {
    let start = Instant::now();
    let d = ModelParams::dimensionless(5.0, 1e-6, 0.25)
        .derive()
        .map_err(err)?;
    let mut worst = 0.0f64;
    for i in 0..300 {
        let t = 30.0 * i as f64 / 299.0;
        let exact = survival_probability(&d, t).map_err(err)?;
        worst = worst.max((exact / nofriction_survival(&d, t) - 1.0).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        worst < 1e-4 && secs < 5.0,
        format!("max rel gap {worst:.3e} on 300 points, {secs:.3} s"),
    ))
}

/// Least-squares slope of `ln y` against `x`.
fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = x.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn longtime_survival_check() -> Outcome {
    let d = thermal(5.0, 0.05);
    let beta = d.model.beta;
    let ts: Vec<f64> = (0..=500)
        .map(|i| (5.0 + 25.0 * i as f64 / 500.0) / beta)
        .collect();
    let mut exact = Vec::new();
    let mut long = Vec::new();
    for &t in &ts {
        exact.push(survival_probability(&d, t).map_err(err)?);
        long.push(longtime_survival(&d, t).map_err(err)?);
    }
    let gap = exact
        .iter()
        .zip(&long)
        .map(|(e, l)| (l / e - 1.0).abs())
        .fold(0.0, f64::max);
    let re = -log_slope(&ts, &exact) / beta - 1.0;
    let rl = -log_slope(&ts, &long) / beta - 1.0;
    Ok((
        gap < 0.01 && re.abs() < 0.005 && rl.abs() < 0.005,
        format!(
            "max rel gap {gap:.3e} for beta t in [5, 30]; fitted rate / beta - 1: exact {re:.3e}, long-time {rl:.3e}"
        ),
    ))
}

fn thermalisation() -> Outcome {
    let start = Instant::now();
    let d = thermal(5.0, 0.05);
    let t = 10.0 / d.model.beta;
    let tau = d.tau(t);
    let evolved = evolve(&Gaussian2D::ground_state(), &d, t).map_err(err)?;
    let half_d = 0.5 * d.temperature_d;
    let target = Matrix2::new(half_d * (2.0 * 10.0f64).exp(), 0.0, 0.0, half_d);
    let analytic_gap = rel_norm(&evolved.cov, &target);

    let dt = 0.005;
    let n_steps = (tau / dt).round() as usize;
    let cfg = SdeConfig {
        dt,
        n_steps,
        n_trajectories: 100_000,
        seed: 2024,
        scheme: Scheme::Heun,
        report_every: n_steps,
    };
    let rep = simulate_ensemble(&d, &cfg, &Gaussian2D::ground_state()).map_err(err)?;
    let last = rep.len() - 1;
    let exact = thermal_state(&d, t).map_err(err)?.physical_cov(&d);
    let (c, se) = (rep.cov[last], rep.cov_se[last]);
    let mut z_max = 0.0f64;
    for (i, j) in [(0, 0), (0, 1), (1, 1)] {
        z_max = z_max.max(((c[(i, j)] - exact[(i, j)]) / se[(i, j)]).abs());
    }
    for k in 0..2 {
        z_max = z_max.max((rep.mean[last][k] / rep.mean_se[last][k]).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        analytic_gap < 1e-6 && z_max < 3.0 && secs < 120.0,
        format!(
            "analytic canonical covariance rel gap {analytic_gap:.3e} (need 1e-6); Langevin max |z| {z_max:.3} (1e5 paths, dt 0.005); {secs:.1} s"
        ),
    ))
}

fn oracle_equivalence() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (seed, (dd, b)) in [(5.0, 0.05), (10.0, 0.1), (1000.0, 0.02)]
        .into_iter()
        .enumerate()
    {
        let model = ModelParams::thermal_dimensionless(dd, b);
        let d = model.derive().map_err(err)?;
        let cfg = SdeConfig {
            dt: 0.01,
            n_steps: 10_000,
            n_trajectories: 100_000,
            seed: 7 + seed as u64,
            scheme: Scheme::Heun,
            report_every: 100,
        };
        let rep = simulate_ensemble(&d, &cfg, &Gaussian2D::ground_state()).map_err(err)?;
        let good = compare_to_propagator(&rep, &d).map_err(err)?;
        let wrong = compare_to_propagator(&rep, &with_scaled_friction(&model, 1.1).map_err(err)?)
            .map_err(err)?;
        ok &= good.pass && !wrong.pass;
        parts.push(format!(
            "(D={dd}, B={b}) max|z| {:.2} / {:.2}, control max|z| {:.2} {}",
            good.max_abs_z,
            good.threshold,
            wrong.max_abs_z,
            if wrong.pass { "accepted" } else { "rejected" }
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn spectra() -> Outcome {
    let n = 150;
    let s = spectrum(&canonical_phase_matrix(n).map_err(err)?).map_err(err)?;
    let contained = s.eigenvalues.iter().all(|&l| l > -PI && l < PI);
    let lo = n / 10;
    let gaps: Vec<f64> = s.eigenvalues[lo..n - lo]
        .windows(2)
        .map(|w| w[1] - w[0])
        .collect();
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let var = gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (gaps.len() - 1) as f64;
    let cv = var.sqrt() / mean;
    let p = spectrum(&physical_phase_matrix(n, 5.0).map_err(err)?).map_err(err)?;
    let near = p
        .eigenvalues
        .iter()
        .filter(|&&l| (l.abs() - PI / 2.0).abs() < 0.3)
        .count();
    let frac = near as f64 / n as f64;
    Ok((
        contained && cv < 0.15 && frac >= 0.8,
        format!(
            "canonical range [{:.6}, {:.6}], central gap CV {cv:.4}; beta t = 5: {:.1}% within 0.3 of +-pi/2",
            s.eigenvalues[0],
            s.eigenvalues[n - 1],
            100.0 * frac
        ),
    ))
}

fn variance_limits() -> Outcome {
    let canon = PI * PI / 3.0;
    let mut values = Vec::new();
    for m in 0..=40 {
        values.push(
            phase_variance_diagonal(m, PhaseKind::Canonical, 4000)
                .map_err(err)?
                .value,
        );
    }
    let first_drop = values.windows(2).position(|w| w[1] <= w[0]);
    let increasing = first_drop.is_none();
    let v = phase_variance_diagonal(2000, PhaseKind::Canonical, 20_000).map_err(err)?;
    let canon_rel = (v.value - canon).abs() / canon + v.tail_bound / canon;
    let p =
        phase_variance_diagonal(2000, PhaseKind::Physical { beta_t: 1e3 }, 20_000).map_err(err)?;
    let phys = PI * PI / 4.0;
    let phys_rel = (p.value - phys).abs() / phys + p.tail_bound / phys;
    let levels = thermal_levels_for(1e4, 1e-4);
    let t = thermal_phase_variance(1e4, levels, 5000).map_err(err)?;
    let thermal_rel =
        (t.value - canon).abs() / canon + (t.remainder_bound + t.row_tail_bound) / canon;
    let mono = match first_drop {
        None => "increasing for m <= 40".to_string(),
        Some(m) => format!(
            "not increasing: V_{} = {:.6} <= V_{m} = {:.6}",
            m + 1,
            values[m + 1],
            values[m]
        ),
    };
    Ok((
        increasing && canon_rel < 0.02 && phys_rel < 0.02 && thermal_rel < 0.005,
        format!(
            "{mono}; V_2000 rel {canon_rel:.3e} (bound incl.); physical beta t = 1e3 rel {phys_rel:.3e}; thermal D = 1e4 rel {thermal_rel:.3e}"
        ),
    ))
}

fn energy_generating() -> Outcome {
    let d = thermal(5.0, 0.05);
    let mut closed_gap = 0.0f64;
    for bp in [0.1, 1.0, 10.0] {
        let classical = 1.0 / (1.0 + bp * d.model.theta);
        closed_gap = closed_gap
            .max((energy_generating_function(&d, bp, 10.0 / d.model.beta) / classical - 1.0).abs());
    }
    let mut quad_gap = 0.0f64;
    for bt in [0.5, 2.0, 10.0] {
        let t = bt / d.model.beta;
        let state = thermal_state(&d, t).map_err(err)?;
        for bp in [0.1, 1.0, 10.0] {
            let q = gaussian_expectation(
                &state,
                |x, y| energy_weyl_symbol(&d, bp, t, x, y),
                12.0,
                Tolerance::absolute(1e-12),
            )
            .map_err(err)?;
            quad_gap = quad_gap.max((q.value - energy_generating_function(&d, bp, t)).abs());
        }
    }
    Ok((
        closed_gap < 1e-6 && quad_gap < 1e-8,
        format!("closed form rel gap {closed_gap:.3e}; quadrature gap {quad_gap:.3e}"),
    ))
}

fn normalisation_suite() -> Outcome {
    let mut mass_gap = 0.0f64;
    for (dd, b, t) in [(5.0, 0.05, 10.0), (10.0, 0.1, 3.0), (1000.0, 0.02, 1.0)] {
        let p = propagator(&thermal(dd, b), t).map_err(err)?;
        let k = p.kernel_from(0.4, -1.1);
        let (sx, sy) = (k.cov[(0, 0)].sqrt(), k.cov[(1, 1)].sqrt());
        let q = integrate_2d(
            |x, y| p.transition_density(0.4, -1.1, x, y).unwrap_or(f64::NAN),
            (k.mean.x - 12.0 * sx, k.mean.x + 12.0 * sx),
            (k.mean.y - 12.0 * sy, k.mean.y + 12.0 * sy),
            Tolerance::absolute(1e-13),
        )
        .map_err(err)?;
        mass_gap = mass_gap.max((q.value - 1.0).abs());
    }
    let d = thermal(5.0, 0.05);
    let one = AngleFunctional::constant(1.0);
    let mut one_gap = 0.0f64;
    for bt in [0.1, 1.0, 5.0, 10.0, 30.0] {
        for frame in [AngleFrame::Canonical, AngleFrame::Physical] {
            let v = thermal_angle_expectation(&one, &d, bt / 0.05, frame).map_err(err)?;
            one_gap = one_gap.max((v - 1.0).abs());
        }
    }
    let mut delta_gap = 0.0f64;
    for i in 0..50 {
        let (r, phi) = (0.1 * i as f64, -3.0 + 0.12 * i as f64);
        let v = delta_matrix_element(0, 0, r, phi);
        delta_gap = delta_gap
            .max((v.re - 2.0 * (-r * r).exp()).abs())
            .max(v.im.abs());
    }
    let mut defect = 0.0f64;
    for n in [1, 2, 17, 150, 300] {
        defect = defect.max(canonical_phase_matrix(n).map_err(err)?.hermiticity_defect());
        for bt in [0.5, 2.0, 5.0] {
            defect = defect.max(
                physical_phase_matrix(n, bt)
                    .map_err(err)?
                    .hermiticity_defect(),
            );
        }
    }
    Ok((
        mass_gap < 1e-12 && one_gap < 1e-9 && delta_gap < 1e-12 && defect == 0.0,
        format!(
            "mass gap {mass_gap:.3e}; <1> gap {one_gap:.3e}; Delta_00 gap {delta_gap:.3e}; Hermiticity defect {defect:e}"
        ),
    ))
}

fn validate_with_threads(threads: usize) -> Result<ValidationReport, String> {
    let opts = Cli::parse_from([
        "dampedwig",
        "validate",
        "--trajectories",
        "5000",
        "--seed",
        "99",
    ]);
    let rc = RunConfig::from_cli(&opts).map_err(err)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(err)?;
    Ok(pool.install(|| cmd_validate(&rc)))
}

fn determinism() -> Outcome {
    let a = validate_with_threads(1)?;
    let b = validate_with_threads(4)?;
    let c = validate_with_threads(4)?;
    let same = a.text == b.text && b.text == c.text;
    Ok((
        same && a.passed(),
        format!(
            "validate report {} bytes, {}; 1 vs 4 threads {}, repeat {}",
            a.text.len(),
            if a.passed() {
                "all checks pass"
            } else {
                "checks fail"
            },
            if a.text == b.text {
                "identical"
            } else {
                "differ"
            },
            if b.text == c.text {
                "identical"
            } else {
                "differ"
            }
        ),
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("frictionless survival", frictionless_survival),
        ("long-time survival", longtime_survival_check),
        ("thermalisation", thermalisation),
        ("oracle equivalence", oracle_equivalence),
        ("phase spectra", spectra),
        ("phase variance limits", variance_limits),
        ("energy generating function", energy_generating),
        ("normalisation suite", normalisation_suite),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (ok, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        println!(
            "criterion {} {name}: {} -- {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            failed.push(i + 1);
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed.len(),
        criteria.len()
    );
    if !failed.is_empty() {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}

use std::f64::consts::PI;

use dampedwig::langevin::{compare_to_propagator, simulate_ensemble, ComparisonVerdict};
use dampedwig::observables::{
    energy_generating_function, survival_probability, thermal_angle_expectation, AngleFrame,
    AngleFunctional,
};
use dampedwig::phase::{
    canonical_phase_matrix, delta_matrix_element, phase_variance_diagonal, physical_phase_matrix,
    spectrum, PhaseKind,
};
use dampedwig::quadrature::{integrate_2d, Tolerance};
use dampedwig::{propagator, DerivedParams, Gaussian2D, ModelParams, Result};

use crate::commands::csv_document;
use crate::config::RunConfig;

/// Friction scale of the built-in negative control.
pub const SENSITIVITY_FACTOR: f64 = 1.1;
/// Level at which the diagonal phase variances are checked against their limits.
pub const VARIANCE_LEVEL: usize = 2000;
pub const VARIANCE_TAIL_CAP: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub text: String,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failing(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| c.status == Status::Fail)
            .map(|c| c.name)
            .collect()
    }
}

fn check(name: &'static str, outcome: Result<(bool, String)>) -> Check {
    match outcome {
        Ok((ok, detail)) => Check {
            name,
            status: if ok { Status::Pass } else { Status::Fail },
            detail,
        },
        Err(e) => Check {
            name,
            status: Status::Fail,
            detail: format!("error: {e}"),
        },
    }
}

fn skip(name: &'static str, why: &str) -> Check {
    Check {
        name,
        status: Status::Skip,
        detail: why.into(),
    }
}

/// The simulated model with friction scaled by `factor` and the noise held fixed.
pub fn with_scaled_friction(model: &ModelParams, factor: f64) -> Result<DerivedParams> {
    let mut m = *model;
    m.thermal_consistency = false;
    m.beta *= factor;
    m.derive()
}

fn describe(v: &ComparisonVerdict) -> String {
    let worst = v
        .worst
        .as_ref()
        .map(|w| format!(" worst={}@tau={}", w.quantity, w.tau))
        .unwrap_or_default();
    format!(
        "max|z|={:.3} threshold={:.3} deterministic_rel={:.3e} comparisons={} failures={}{}",
        v.max_abs_z, v.threshold, v.deterministic_max_rel, v.comparisons, v.failures, worst
    )
}

/// Runs every check and renders the report. Failures are reported as checks,
/// never as errors.
pub fn cmd_validate(rc: &RunConfig) -> ValidationReport {
    let d = &rc.derived;
    let noisy = d.noise_n0 > 0.0;
    let friction = d.model.beta > 0.0;
    let mut checks = Vec::new();

    // a point start keeps the noiseless run free of sampling error
    let initial = if noisy {
        Gaussian2D::ground_state()
    } else {
        Gaussian2D::point(1.0, 0.0, 0.0)
    };
    let report = simulate_ensemble(d, &rc.sde_config(), &initial);
    checks.push(check(
        "oracle",
        report.as_ref().map_err(Clone::clone).and_then(|rep| {
            let target = with_scaled_friction(&rc.model, rc.perturb_beta)?;
            let v = compare_to_propagator(rep, &target)?;
            Ok((v.pass, describe(&v)))
        }),
    ));
    if !(noisy && friction) {
        checks.push(skip("oracle_sensitivity", "needs noise and friction"));
    } else if rc.perturb_beta != 1.0 {
        checks.push(skip("oracle_sensitivity", "friction already perturbed"));
    } else {
        checks.push(check(
            "oracle_sensitivity",
            report.as_ref().map_err(Clone::clone).and_then(|rep| {
                let target = with_scaled_friction(&rc.model, SENSITIVITY_FACTOR)?;
                let v = compare_to_propagator(rep, &target)?;
                Ok((
                    !v.pass,
                    format!("must reject beta x {SENSITIVITY_FACTOR}: {}", describe(&v)),
                ))
            }),
        ));
    }

    if noisy {
        checks.push(check(
            "kernel_mass",
            kernel_mass(d, rc.tmax.max(rc.dt_out) / 2.0),
        ));
    } else {
        checks.push(skip("kernel_mass", "noiseless kernel is a point mass"));
    }
    checks.push(check("survival_bounds", survival_bounds(rc)));
    if friction {
        checks.push(check("thermal_normalisation", thermal_normalisation(d)));
        checks.push(check("energy_limit", energy_limit(d)));
    } else {
        checks.push(skip("thermal_normalisation", "requires friction"));
        checks.push(skip("energy_limit", "requires friction"));
    }
    checks.push(check("delta_ground", delta_ground()));
    checks.push(check("hermiticity", hermiticity(rc)));
    checks.push(check("canonical_spectrum", canonical_spectrum(rc.nmax)));
    checks.push(check(
        "variance_canonical",
        variance_limit(PhaseKind::Canonical, PI * PI / 3.0),
    ));
    checks.push(check(
        "variance_physical",
        variance_limit(PhaseKind::Physical { beta_t: 1e3 }, PI * PI / 4.0),
    ));

    let rows: Vec<Vec<String>> = checks
        .iter()
        .map(|c| {
            vec![
                c.name.to_string(),
                c.status.label().to_string(),
                c.detail.clone(),
            ]
        })
        .collect();
    let mut text = csv_document(rc, &["check", "status", "detail"], &rows);
    let failed = checks.iter().filter(|c| c.status == Status::Fail).count();
    let skipped = checks.iter().filter(|c| c.status == Status::Skip).count();
    text.push_str(&format!(
        "# result: {} ({} checks, {} failed, {} skipped)\n",
        if failed == 0 { "PASS" } else { "FAIL" },
        checks.len(),
        failed,
        skipped
    ));
    ValidationReport { checks, text }
}

fn kernel_mass(d: &DerivedParams, t: f64) -> Result<(bool, String)> {
    let p = propagator(d, t)?;
    let (x0, y0) = (0.4, -1.1);
    let k = p.kernel_from(x0, y0);
    let (sx, sy) = (k.cov[(0, 0)].sqrt(), k.cov[(1, 1)].sqrt());
    let q = integrate_2d(
        |x, y| p.transition_density(x0, y0, x, y).unwrap_or(f64::NAN),
        (k.mean.x - 12.0 * sx, k.mean.x + 12.0 * sx),
        (k.mean.y - 12.0 * sy, k.mean.y + 12.0 * sy),
        Tolerance::absolute(1e-13),
    )?;
    let gap = (q.value - 1.0).abs();
    Ok((
        gap < 1e-12,
        format!("|mass - 1| = {gap:.3e} at omega_t={t}"),
    ))
}

fn survival_bounds(rc: &RunConfig) -> Result<(bool, String)> {
    let d = &rc.derived;
    let at0 = survival_probability(d, 0.0)?;
    let mut worst = 1.0f64;
    let mut ok = at0 == 1.0;
    for t in rc.time_grid() {
        let p = survival_probability(d, t)?;
        ok &= p > 0.0 && p <= 1.0 + 1e-15;
        worst = worst.min(p);
    }
    Ok((ok, format!("P(0)={at0} min P={worst:.6e}")))
}

fn thermal_normalisation(d: &DerivedParams) -> Result<(bool, String)> {
    let one = AngleFunctional::constant(1.0);
    let mut worst = 0.0f64;
    for bt in [1.0, 5.0, 10.0] {
        let t = bt / d.model.beta;
        for frame in [AngleFrame::Canonical, AngleFrame::Physical] {
            worst = worst.max((thermal_angle_expectation(&one, d, t, frame)? - 1.0).abs());
        }
    }
    Ok((worst < 1e-9, format!("max |<1> - 1| = {worst:.3e}")))
}

fn energy_limit(d: &DerivedParams) -> Result<(bool, String)> {
    let t = 10.0 / d.model.beta;
    let mut worst = 0.0f64;
    for bp in [0.1, 1.0, 10.0] {
        let classical = 1.0 / (1.0 + bp * d.model.theta);
        worst = worst.max((energy_generating_function(d, bp, t) / classical - 1.0).abs());
    }
    Ok((
        worst < 1e-6,
        format!("max rel gap at beta_t=10: {worst:.3e}"),
    ))
}

fn delta_ground() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for &(r, phi) in &[(0.0, 0.0), (0.3, 1.0), (1.0, -2.0), (2.5, 3.0)] {
        let v = delta_matrix_element(0, 0, r, phi);
        worst = worst
            .max((v.re - 2.0 * (-r * r).exp()).abs())
            .max(v.im.abs());
    }
    Ok((worst < 1e-12, format!("max abs gap = {worst:.3e}")))
}

fn hermiticity(rc: &RunConfig) -> Result<(bool, String)> {
    let mut worst = canonical_phase_matrix(rc.nmax)?.hermiticity_defect();
    for &bt in &rc.beta_t {
        worst = worst.max(physical_phase_matrix(rc.nmax, bt)?.hermiticity_defect());
    }
    Ok((
        worst == 0.0,
        format!("max defect = {worst:e} at n={}", rc.nmax),
    ))
}

fn canonical_spectrum(n: usize) -> Result<(bool, String)> {
    let s = spectrum(&canonical_phase_matrix(n)?)?;
    let (lo, hi) = (s.eigenvalues[0], s.eigenvalues[n - 1]);
    Ok((
        lo > -PI && hi < PI,
        format!("range [{lo:.6}, {hi:.6}] residual {:.3e}", s.max_residual()),
    ))
}

fn variance_limit(kind: PhaseKind, limit: f64) -> Result<(bool, String)> {
    let v = phase_variance_diagonal(VARIANCE_LEVEL, kind, VARIANCE_TAIL_CAP)?;
    let rel = (v.value - limit).abs() / limit;
    Ok((
        rel + v.tail_bound / limit < 0.02,
        format!(
            "V_{VARIANCE_LEVEL} = {:.8} vs {limit:.8}: rel {rel:.3e}, tail bound {:.3e}",
            v.value, v.tail_bound
        ),
    ))
}

use dampedwig::observables::{
    angle_expectation, longtime_survival, nofriction_survival, survival_probability,
    AngleFunctional,
};
use dampedwig::phase::{canonical_phase_matrix, physical_phase_matrix, spectrum};
use dampedwig::quadrature::Tolerance;
use dampedwig::{evolve, DerivedParams, Gaussian2D, ModelParams, Result};
use rayon::prelude::*;

use crate::config::{RunConfig, PHASE_CURVES};

/// Shortest round-trip form, so output is exact and stable.
pub(crate) fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == 0.0 {
        "0".into()
    } else if (1e-5..1e16).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Header block, column names, then rows.
pub(crate) fn csv_document(rc: &RunConfig, columns: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(rc.header().into_bytes());
    w.write_record(columns).expect("writing to memory");
    for r in rows {
        w.write_record(r).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("utf-8 output")
}

/// Columns `omega_t, exact, longtime_approx, nofriction`. The long-time
/// column is `nan` without friction.
pub fn cmd_survival(rc: &RunConfig) -> Result<String> {
    let d = &rc.derived;
    let rows = rc
        .time_grid()
        .into_par_iter()
        .map(|t| {
            let exact = survival_probability(d, t)?;
            let long = if d.model.beta > 0.0 {
                longtime_survival(d, t)?
            } else {
                f64::NAN
            };
            Ok(vec![
                num(t),
                num(exact),
                num(long),
                num(nofriction_survival(d, t)),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(csv_document(
        rc,
        &["omega_t", "exact", "longtime_approx", "nofriction"],
        &rows,
    ))
}

/// The curves drawn by `phase-mean`: the three standard curves, or the
/// configured model alone when one was given.
pub fn phase_curves(rc: &RunConfig) -> Result<Vec<(String, DerivedParams)>> {
    if rc.custom_model {
        return Ok(vec![("custom".into(), rc.derived)]);
    }
    PHASE_CURVES
        .iter()
        .map(|&(name, dd, b)| {
            Ok((
                name.into(),
                ModelParams::thermal_dimensionless(dd, b).derive()?,
            ))
        })
        .collect()
}

/// Columns `curve, omega_t, phase_expectation`, starting from the ground state.
pub fn cmd_phase_mean(rc: &RunConfig) -> Result<String> {
    let phi = AngleFunctional::phase();
    let tol = Tolerance::absolute(rc.tol);
    let ground = Gaussian2D::ground_state();
    let grid = rc.time_grid();
    let mut rows = Vec::new();
    for (name, d) in phase_curves(rc)? {
        let part = grid
            .par_iter()
            .map(|&t| {
                let state = evolve(&ground, &d, t)?;
                let v = angle_expectation(&phi, &state, tol)?.value;
                Ok(vec![name.clone(), num(t), num(v)])
            })
            .collect::<Result<Vec<_>>>()?;
        rows.extend(part);
    }
    Ok(csv_document(
        rc,
        &["curve", "omega_t", "phase_expectation"],
        &rows,
    ))
}

/// Columns `beta_t, index, eigenvalue`; `beta_t = 0` is the canonical operator.
pub fn cmd_spectrum(rc: &RunConfig) -> Result<String> {
    let blocks = rc
        .beta_t
        .par_iter()
        .map(|&bt| {
            let a = if bt == 0.0 {
                canonical_phase_matrix(rc.nmax)?
            } else {
                physical_phase_matrix(rc.nmax, bt)?
            };
            let s = spectrum(&a)?;
            Ok(s.eigenvalues
                .iter()
                .enumerate()
                .map(|(i, &l)| vec![num(bt), i.to_string(), num(l)])
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<_> = blocks.into_iter().flatten().collect();
    Ok(csv_document(rc, &["beta_t", "index", "eigenvalue"], &rows))
}

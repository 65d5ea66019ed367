//! Browser bindings: survival curves, the phase expectation, and phase
//! operator spectra. Curves come back as flat row-major `Float64Array`s.

use dampedwig::observables::{
    angle_expectation, longtime_survival, nofriction_survival, survival_probability,
    AngleFunctional, ANGLE_TOL,
};
use dampedwig::phase::{canonical_phase_matrix, physical_phase_matrix, spectrum};
use dampedwig::quadrature::Tolerance;
use dampedwig::{evolve, DerivedParams, Error, Gaussian2D, ModelParams, Result};
use wasm_bindgen::prelude::*;

/// Largest spectrum the page may request; larger sizes stall the tab.
pub const MAX_DEMO_SIZE: usize = 400;
pub const MAX_POINTS: usize = 5000;

fn model(temperature_d: f64, friction_b: f64, noise_n0: Option<f64>) -> Result<DerivedParams> {
    match noise_n0 {
        Some(n0) => ModelParams::dimensionless(temperature_d, friction_b, n0),
        None => ModelParams::thermal_dimensionless(temperature_d, friction_b),
    }
    .derive()
}

fn grid(tmax: f64, points: usize) -> Result<Vec<f64>> {
    if !(tmax.is_finite() && tmax > 0.0) || !(2..=MAX_POINTS).contains(&points) {
        return Err(Error::InvalidConfig(format!(
            "need tmax > 0 and 2..={MAX_POINTS} points"
        )));
    }
    let step = tmax / (points - 1) as f64;
    Ok((0..points).map(|i| i as f64 * step).collect())
}

/// Rows `(omega_t, exact, longtime_approx, nofriction)`; the long-time
/// column is NaN without friction.
pub fn survival_rows(
    temperature_d: f64,
    friction_b: f64,
    noise_n0: Option<f64>,
    tmax: f64,
    points: usize,
) -> Result<Vec<f64>> {
    let d = model(temperature_d, friction_b, noise_n0)?;
    let mut out = Vec::with_capacity(4 * points);
    for t in grid(tmax, points)? {
        let long = if d.model.beta > 0.0 {
            longtime_survival(&d, t)?
        } else {
            f64::NAN
        };
        out.extend([
            t,
            survival_probability(&d, t)?,
            long,
            nofriction_survival(&d, t),
        ]);
    }
    Ok(out)
}

/// Rows `(omega_t, <phi>)` from the ground state with thermal noise.
pub fn phase_mean_rows(
    temperature_d: f64,
    friction_b: f64,
    tmax: f64,
    points: usize,
) -> Result<Vec<f64>> {
    let d = model(temperature_d, friction_b, None)?;
    let phi = AngleFunctional::phase();
    let ground = Gaussian2D::ground_state();
    let mut out = Vec::with_capacity(2 * points);
    for t in grid(tmax, points)? {
        let state = evolve(&ground, &d, t)?;
        out.extend([
            t,
            angle_expectation(&phi, &state, Tolerance::absolute(ANGLE_TOL))?.value,
        ]);
    }
    Ok(out)
}

/// Ascending eigenvalues of the `nmax`-level phase matrix at `beta t`;
/// `beta t = 0` is the canonical operator.
pub fn spectrum_values(nmax: usize, beta_t: f64) -> Result<Vec<f64>> {
    if nmax == 0 || nmax > MAX_DEMO_SIZE {
        return Err(Error::SizeTooLarge {
            size: nmax,
            limit: MAX_DEMO_SIZE,
        });
    }
    if !(beta_t.is_finite() && beta_t >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "beta t must be >= 0, got {beta_t}"
        )));
    }
    let a = if beta_t == 0.0 {
        canonical_phase_matrix(nmax)?
    } else {
        physical_phase_matrix(nmax, beta_t)?
    };
    Ok(spectrum(&a)?.eigenvalues)
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn survival_curve(
    temperature_d: f64,
    friction_b: f64,
    noise_n0: Option<f64>,
    tmax: f64,
    points: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    survival_rows(temperature_d, friction_b, noise_n0, tmax, points).map_err(js)
}

#[wasm_bindgen]
pub fn phase_mean_curve(
    temperature_d: f64,
    friction_b: f64,
    tmax: f64,
    points: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    phase_mean_rows(temperature_d, friction_b, tmax, points).map_err(js)
}

#[wasm_bindgen]
pub fn phase_spectrum(nmax: usize, beta_t: f64) -> std::result::Result<Vec<f64>, JsError> {
    spectrum_values(nmax, beta_t).map_err(js)
}

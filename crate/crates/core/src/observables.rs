//! Expectation values over Gaussian states: ground-state survival, angle
//! functionals, and the energy generating function.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::gaussian::{evolve, lower_factor, Gaussian2D};
use crate::params::DerivedParams;
use crate::quadrature::{integrate_2d, integrate_breaks, Quadrature, Tolerance};

/// Default absolute tolerance of angular quadratures.
pub const ANGLE_TOL: f64 = 1e-10;

/// Probability that a system prepared in the ground state is found there
/// after physical time `t`.
pub fn survival_probability(d: &DerivedParams, t: f64) -> Result<f64> {
    let evolved = evolve(&Gaussian2D::ground_state(), d, t)?;
    let m = evolved.cov + Matrix2::identity() * 0.5;
    Ok(1.0 / m.determinant().sqrt())
}

/// Survival against the fully thermalised propagator, valid for `beta t >> 1`.
pub fn longtime_survival(d: &DerivedParams, t: f64) -> Result<f64> {
    if d.model.beta == 0.0 {
        return Err(Error::RequiresFriction);
    }
    let bt = d.model.beta * t;
    let inv_d = 1.0 / d.temperature_d;
    Ok((-bt).exp() * 2.0 * inv_d / ((1.0 + inv_d) * (1.0 + inv_d * (-2.0 * bt).exp())).sqrt())
}

/// Survival without friction, for noise strength `N_o` at physical time `t`.
pub fn nofriction_survival(d: &DerivedParams, t: f64) -> f64 {
    let tau = d.tau(t);
    let n0 = d.noise_n0;
    let a = 1.0 + 0.5 * n0 * tau;
    let b = 0.5 * n0 * tau.sin();
    1.0 / ((a - b) * (a + b)).sqrt()
}

type AngleFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type FourierFn = Arc<dyn Fn(i64) -> Complex64 + Send + Sync>;

/// A function `Phi(phi)` of the polar angle on `[-pi, pi)`.
#[derive(Clone)]
pub struct AngleFunctional {
    eval: AngleFn,
    fourier: Option<FourierFn>,
    breaks: Vec<f64>,
    label: String,
}

impl fmt::Debug for AngleFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AngleFunctional")
            .field("label", &self.label)
            .field("closed_form_fourier", &self.fourier.is_some())
            .finish()
    }
}

impl AngleFunctional {
    pub fn new(
        label: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            eval: Arc::new(eval),
            fourier: None,
            breaks: Vec::new(),
            label: label.into(),
        }
    }

    /// Closed-form `c_j = (1/2 pi) int Phi(phi) e^{i j phi} dphi`.
    pub fn with_fourier(mut self, c: impl Fn(i64) -> Complex64 + Send + Sync + 'static) -> Self {
        self.fourier = Some(Arc::new(c));
        self
    }

    /// Interior points of `(-pi, pi)` where `Phi` is not smooth.
    pub fn with_breaks(mut self, breaks: Vec<f64>) -> Self {
        self.breaks = breaks;
        self
    }

    pub fn constant(value: f64) -> Self {
        Self::new(format!("const({value})"), move |_| value).with_fourier(move |j| {
            if j == 0 {
                Complex64::new(value, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// `Phi = phi`.
    pub fn phase() -> Self {
        Self::new("phi", |phi| phi).with_fourier(|j| {
            if j == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::new(0.0, -sign / j as f64)
            }
        })
    }

    /// `Phi = phi^p`.
    pub fn power(p: i32) -> Self {
        Self::new(format!("phi^{p}"), move |phi| phi.powi(p))
    }

    /// `Phi = phibar(phi)` with `tan phibar = e^{beta t} tan phi`, on the same branch.
    pub fn physical_phase(beta_t: f64) -> Self {
        let g = beta_t.exp();
        Self::new(format!("phibar(bt={beta_t})"), move |phi| {
            let (s, c) = phi.sin_cos();
            (g * s).atan2(c)
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, phi: f64) -> f64 {
        (self.eval)(phi)
    }

    pub fn has_closed_fourier(&self) -> bool {
        self.fourier.is_some()
    }

    /// `c_j`, from the closed form when present, otherwise by quadrature.
    pub fn fourier_coefficient(&self, j: i64, tol: Tolerance) -> Result<Complex64> {
        if let Some(c) = &self.fourier {
            return Ok(c(j));
        }
        let pts = self.break_points(&[]);
        let jf = j as f64;
        let re = integrate_breaks(|phi| self.eval(phi) * (jf * phi).cos(), &pts, tol)?.value;
        let im = integrate_breaks(|phi| self.eval(phi) * (jf * phi).sin(), &pts, tol)?.value;
        Ok(Complex64::new(re, im) / (2.0 * PI))
    }

    fn break_points(&self, extra: &[f64]) -> Vec<f64> {
        let mut pts = vec![-PI, -FRAC_PI_2, 0.0, FRAC_PI_2, PI];
        pts.extend(self.breaks.iter().copied());
        pts.extend(extra.iter().copied());
        let mut pts: Vec<f64> = pts.into_iter().filter(|p| (-PI..=PI).contains(p)).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
        pts
    }
}

/// Folds an angle into `[-pi, pi]`.
fn wrap(a: f64) -> f64 {
    let mut v = a % (2.0 * PI);
    if v > PI {
        v -= 2.0 * PI;
    } else if v < -PI {
        v += 2.0 * PI;
    }
    v
}

fn axis_breaks(cov: &Matrix2<f64>, mean: &Vector2<f64>) -> Vec<f64> {
    let (a, b, c) = (cov[(0, 0)], cov[(0, 1)], cov[(1, 1)]);
    let theta = 0.5 * (2.0 * b).atan2(a - c);
    let mut out = Vec::new();
    for k in -2..=2 {
        out.push(wrap(theta + k as f64 * FRAC_PI_2));
    }
    if mean.norm() > 0.0 {
        let m = mean.y.atan2(mean.x);
        out.push(m);
        out.push(wrap(m + PI));
    }
    out
}

/// `int_0^inf R exp(-q R^2/2 + l R - c/2) dR`, written so neither exponential overflows.
fn radial_moment(q: f64, l: f64, c: f64) -> f64 {
    let first = (-0.5 * c).exp() / q;
    if l == 0.0 {
        return first;
    }
    let gap = (c - l * l / q).max(0.0);
    first + (l / q) * (PI / (2.0 * q)).sqrt() * (-0.5 * gap).exp() * erfc(-l / (2.0 * q).sqrt())
}

/// `E[Phi(atan2(y, x))]` under `state`, reduced to one angular quadrature.
pub fn angle_expectation(
    phi: &AngleFunctional,
    state: &Gaussian2D,
    tol: Tolerance,
) -> Result<Quadrature> {
    if state.is_delta() {
        let m = state.mean;
        if m.x == 0.0 && m.y == 0.0 {
            return Err(Error::DegenerateCovariance(
                "angle undefined for a point mass at the origin",
            ));
        }
        return Ok(Quadrature {
            value: state.mass() * phi.eval(m.y.atan2(m.x)),
            error: 0.0,
            evaluations: 1,
            intervals: 0,
        });
    }
    let cov = state.cov;
    let det = cov.determinant();
    if !(det > 0.0) || state.is_degenerate() {
        return Err(Error::DegenerateCovariance(
            "angle expectation needs a full-rank covariance",
        ));
    }
    let inv = Matrix2::new(cov[(1, 1)], -cov[(0, 1)], -cov[(1, 0)], cov[(0, 0)]) / det;
    let mu = state.mean;
    let w = inv * mu;
    let c = mu.dot(&w);
    let norm = state.mass() / (2.0 * PI * det.sqrt());
    let pts = phi.break_points(&axis_breaks(&cov, &mu));
    let mut q = integrate_breaks(
        |ang| {
            let u = Vector2::new(ang.cos(), ang.sin());
            let qq = u.dot(&(inv * u));
            phi.eval(ang) * radial_moment(qq, u.dot(&w), c)
        },
        &pts,
        Tolerance {
            abs: tol.abs / norm.max(f64::MIN_POSITIVE),
            ..tol
        },
    )?;
    q.value *= norm;
    q.error *= norm;
    Ok(q)
}

/// Expected canonical phase after evolving `state0` for physical time `t`.
pub fn phase_expectation(state0: &Gaussian2D, d: &DerivedParams, t: f64) -> Result<f64> {
    let state = evolve(state0, d, t)?;
    Ok(angle_expectation(
        &AngleFunctional::phase(),
        &state,
        Tolerance::absolute(ANGLE_TOL),
    )?
    .value)
}

/// Angle with respect to which a thermal functional is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleFrame {
    /// `phi` of the canonical pair.
    Canonical,
    /// `phibar` of `(m qdot, q)`.
    Physical,
}

/// Weight `1/(2 pi (e^{-b} cos^2 + e^{b} sin^2))` of the canonical angle in
/// the long-time state, `b = beta t`.
pub fn thermal_angle_density(beta_t: f64, phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    1.0 / (2.0 * PI * ((-beta_t).exp() * c * c + beta_t.exp() * s * s))
}

/// Long-time expectation of `Phi` at physical time `t`.
pub fn thermal_angle_expectation(
    phi: &AngleFunctional,
    d: &DerivedParams,
    t: f64,
    frame: AngleFrame,
) -> Result<f64> {
    if d.model.beta == 0.0 {
        return Err(Error::RequiresFriction);
    }
    let tol = Tolerance::absolute(1e-12);
    match frame {
        AngleFrame::Physical => {
            let pts = phi.break_points(&[]);
            Ok(integrate_breaks(|a| phi.eval(a), &pts, tol)?.value / (2.0 * PI))
        }
        AngleFrame::Canonical => {
            // the weight is dphibar/dphi / 2 pi, so substitute phibar; its peaks
            // of width e^{-beta t} become a uniform measure
            let bt = d.model.beta * t;
            let (shrink, grow) = ((-bt).exp(), bt.exp());
            let mapped: Vec<f64> = phi
                .breaks
                .iter()
                .map(|&a| (grow * a.sin()).atan2(a.cos()))
                .collect();
            let pts = phi.break_points(&mapped);
            let f = |pb: f64| {
                let (s, c) = pb.sin_cos();
                phi.eval((shrink * s).atan2(c))
            };
            Ok(integrate_breaks(f, &pts, tol)?.value / (2.0 * PI))
        }
    }
}

/// Long-time `Tr(rho(t) exp(-b_param E_osc))` at physical time `t`, with
/// `b_param` an inverse energy.
pub fn energy_generating_function(d: &DerivedParams, b_param: f64, t: f64) -> f64 {
    let m = &d.model;
    let bt = m.beta * t;
    let half_h = 0.5 * m.hbar * m.omega * b_param * (-bt).exp();
    1.0 / (half_h.cosh() + d.temperature_d * bt.exp() * half_h.sinh())
}

/// Weyl symbol of `exp(-b_param E_osc)` at canonical `(x, y)` and physical time `t`.
pub fn energy_weyl_symbol(d: &DerivedParams, b_param: f64, t: f64, x: f64, y: f64) -> f64 {
    let m = &d.model;
    let bt = m.beta * t;
    let half_h = 0.5 * m.hbar * m.omega * b_param * (-bt).exp();
    let r2 = (-bt).exp() * x * x + bt.exp() * y * y;
    (-r2 * half_h.tanh()).exp() / half_h.cosh()
}

/// `E[f(x, y)]` under `state` by tensor quadrature over whitened coordinates
/// `z = mean + L w`, `w in [-span, span]^2`.
pub fn gaussian_expectation<F: FnMut(f64, f64) -> f64>(
    state: &Gaussian2D,
    mut f: F,
    span: f64,
    tol: Tolerance,
) -> Result<Quadrature> {
    let l = lower_factor(&state.cov);
    let mu = state.mean;
    let phi = |w: f64| (-0.5 * w * w).exp() / (2.0 * PI).sqrt();
    let mut q = integrate_2d(
        |w1, w2| {
            let z = mu + l * Vector2::new(w1, w2);
            f(z.x, z.y) * phi(w1) * phi(w2)
        },
        (-span, span),
        (-span, span),
        tol,
    )?;
    q.value *= state.mass();
    Ok(q)
}

//! Exact classical flow of the unforced underdamped oscillator and the
//! time-dependent generator that produces it.

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::params::DerivedParams;

/// Linear map between phase points at two instants.
///
/// `physical` acts on `(X, y)` with `X = P/(hbar alpha)`. The canonical
/// coordinate `x = X e^{B tau}` depends on the absolute epoch, so the flow
/// keeps both end points (in units of `omega t`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineFlow {
    pub physical: Matrix2<f64>,
    pub start: f64,
    pub end: f64,
    pub friction_b: f64,
}

impl AffineFlow {
    pub fn identity(epoch: f64, friction_b: f64) -> Self {
        Self {
            physical: Matrix2::identity(),
            start: epoch,
            end: epoch,
            friction_b,
        }
    }

    pub fn elapsed(&self) -> f64 {
        self.end - self.start
    }

    /// `e^{-B tau_start}`, converting canonical `x` to physical `X` at the start.
    pub fn start_damping(&self) -> f64 {
        (-self.friction_b * self.start).exp()
    }

    /// `e^{B tau_end}`, converting physical `X` to canonical `x` at the end.
    pub fn end_growth(&self) -> f64 {
        (self.friction_b * self.end).exp()
    }

    /// The same map written in canonical coordinates, `diag(e^{B t}, 1) M diag(e^{-B s}, 1)`.
    pub fn canonical(&self) -> Matrix2<f64> {
        let out = Matrix2::new(self.end_growth(), 0.0, 0.0, 1.0);
        let inp = Matrix2::new(self.start_damping(), 0.0, 0.0, 1.0);
        out * self.physical * inp
    }

    pub fn apply_physical(&self, v: Vector2<f64>) -> Vector2<f64> {
        self.physical * v
    }

    pub fn apply_canonical(&self, v: Vector2<f64>) -> Vector2<f64> {
        self.canonical() * v
    }

    /// `self` followed by `next`. Panics in debug builds if the epochs do not line up.
    pub fn then(&self, next: &AffineFlow) -> AffineFlow {
        debug_assert!((self.end - next.start).abs() <= 1e-9 * (1.0 + self.end.abs()));
        AffineFlow {
            physical: next.physical * self.physical,
            start: self.start,
            end: next.end,
            friction_b: self.friction_b,
        }
    }
}

/// Flow over `omega t in [0, tau]`, i.e. from the baseline epoch zero.
pub fn classical_flow(d: &DerivedParams, tau: f64) -> Result<AffineFlow> {
    classical_flow_between(d, 0.0, tau)
}

/// Flow from `omega s = start` to `omega t = end`; the physical matrix depends
/// only on the elapsed time.
pub fn classical_flow_between(d: &DerivedParams, start: f64, end: f64) -> Result<AffineFlow> {
    let elapsed = end - start;
    if !(elapsed >= 0.0) {
        return Err(Error::NegativeTime(elapsed));
    }
    Ok(AffineFlow {
        physical: physical_flow_matrix(d, elapsed),
        start,
        end,
        friction_b: d.friction_b,
    })
}

fn physical_flow_matrix(d: &DerivedParams, tau: f64) -> Matrix2<f64> {
    let w = d.frequency_ratio();
    let b = d.friction_b;
    let (s, c) = (w * tau).sin_cos();
    let k = 0.5 * b / w;
    let envelope = (-0.5 * b * tau).exp();
    // rows: (X_t, y_t); columns: (X_s, y_s)
    envelope * Matrix2::new(c - k * s, -s / w, s / w, c + k * s)
}

/// Quadratic time generator `H_t(p, q) = a p^2 + b q^2 + c q` in physical units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGenerator {
    pub p2: f64,
    pub q2: f64,
    pub q1: f64,
}

impl TimeGenerator {
    pub fn evaluate(&self, p: f64, q: f64) -> f64 {
        self.p2 * p * p + self.q2 * q * q + self.q1 * q
    }

    /// Hamilton's equations `(dq/dt, dp/dt) = (dH/dp, -dH/dq)`.
    pub fn velocity(&self, p: f64, q: f64) -> (f64, f64) {
        (2.0 * self.p2 * p, -(2.0 * self.q2 * q + self.q1))
    }
}

/// Weyl symbol of the time generator at physical time `t` under a force value `force`.
pub fn time_generator_weyl(d: &DerivedParams, t: f64, force: f64) -> TimeGenerator {
    let m = &d.model;
    let grow = (m.beta * t).exp();
    TimeGenerator {
        p2: (-m.beta * t).exp() / (2.0 * m.mass),
        q2: grow * 0.5 * m.mass * m.omega * m.omega,
        q1: -grow * force,
    }
}

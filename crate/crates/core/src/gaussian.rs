//! Bivariate Gaussian states and the ensemble-averaged Wigner propagator.
//!
//! States are stored in the canonical coordinates `(x, y)` at a definite
//! epoch `tau = omega t`; the physical `(X, y)` view rescales `x` by
//! `e^{-B tau}`. Densities integrate to `mass` over `dx dy`, and the Weyl
//! symbol is `2 pi` times the density, so the trace is `mass`.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::flow::{classical_flow_between, AffineFlow};
use crate::params::DerivedParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian2D {
    pub mean: Vector2<f64>,
    pub cov: Matrix2<f64>,
    pub log_mass: f64,
    /// Dimensionless time `omega t` at which the canonical coordinates apply.
    pub epoch: f64,
}

impl Gaussian2D {
    pub fn new(mean: Vector2<f64>, cov: Matrix2<f64>, epoch: f64) -> Result<Self> {
        let g = Self {
            mean,
            cov: symmetrize(cov),
            log_mass: 0.0,
            epoch,
        };
        g.check()?;
        Ok(g)
    }

    /// Oscillator ground state at `t = 0`: Weyl symbol `2 e^{-R^2}`.
    pub fn ground_state() -> Self {
        Self::coherent(0.0, 0.0)
    }

    /// Ground state displaced to `(x0, y0)` at `t = 0`.
    pub fn coherent(x0: f64, y0: f64) -> Self {
        Self {
            mean: Vector2::new(x0, y0),
            cov: Matrix2::identity() * 0.5,
            log_mass: 0.0,
            epoch: 0.0,
        }
    }

    /// Unit point mass at canonical `(x, y)`.
    pub fn point(x: f64, y: f64, epoch: f64) -> Self {
        Self {
            mean: Vector2::new(x, y),
            cov: Matrix2::zeros(),
            log_mass: 0.0,
            epoch,
        }
    }

    pub fn with_mass(mut self, mass: f64) -> Self {
        self.log_mass = mass.ln();
        self
    }

    pub fn mass(&self) -> f64 {
        self.log_mass.exp()
    }

    fn check(&self) -> Result<()> {
        let c = &self.cov;
        if !(self.mean.iter().all(|v| v.is_finite()) && c.iter().all(|v| v.is_finite())) {
            return Err(Error::DegenerateCovariance("non-finite moments"));
        }
        let tol = 1e-12 * (c[(0, 0)].abs() + c[(1, 1)].abs());
        if c[(0, 0)] < -tol || c[(1, 1)] < -tol || c.determinant() < -tol * tol.max(1e-300) {
            return Err(Error::DegenerateCovariance(
                "covariance is not positive semidefinite",
            ));
        }
        Ok(())
    }

    /// Zero covariance: the state is a point mass.
    pub fn is_delta(&self) -> bool {
        self.cov.iter().all(|&v| v == 0.0)
    }

    /// Covariance has no inverse (delta states included).
    pub fn is_degenerate(&self) -> bool {
        let c = &self.cov;
        c.determinant() <= 1e-14 * c[(0, 0)] * c[(1, 1)]
    }

    pub fn density(&self, x: f64, y: f64) -> f64 {
        gaussian_pdf(Vector2::new(x, y) - self.mean, &self.cov) * self.mass()
    }

    pub fn weyl_symbol(&self, x: f64, y: f64) -> f64 {
        2.0 * PI * self.density(x, y)
    }

    /// `Tr(rho_a rho_b) = (1/2 pi) int W_a W_b dx dy`.
    pub fn overlap(&self, other: &Gaussian2D) -> Result<f64> {
        let sum = self.cov + other.cov;
        if sum.determinant() <= 0.0 {
            return Err(Error::DegenerateCovariance(
                "overlap of two degenerate states",
            ));
        }
        Ok(2.0 * PI * self.mass() * other.mass() * gaussian_pdf(self.mean - other.mean, &sum))
    }

    /// Mean in physical coordinates `(X, y)`.
    pub fn physical_mean(&self, d: &DerivedParams) -> Vector2<f64> {
        let s = (-d.friction_b * self.epoch).exp();
        Vector2::new(self.mean.x * s, self.mean.y)
    }

    pub fn physical_cov(&self, d: &DerivedParams) -> Matrix2<f64> {
        let s = Matrix2::new((-d.friction_b * self.epoch).exp(), 0.0, 0.0, 1.0);
        s * self.cov * s
    }

    /// Builds a canonical state from physical moments at epoch `tau`.
    pub fn from_physical(
        mean: Vector2<f64>,
        cov: Matrix2<f64>,
        d: &DerivedParams,
        tau: f64,
    ) -> Result<Self> {
        let g = (d.friction_b * tau).exp();
        let s = Matrix2::new(g, 0.0, 0.0, 1.0);
        Self::new(Vector2::new(mean.x * g, mean.y), s * cov * s, tau)
    }

    /// Image under `(x, y) -> (x, -y)`.
    pub fn reflect(&self) -> Self {
        let mut r = *self;
        r.mean.y = -r.mean.y;
        r.cov[(0, 1)] = -r.cov[(0, 1)];
        r.cov[(1, 0)] = -r.cov[(1, 0)];
        r
    }

    /// Lower-triangular `L` with `L L^T = cov`; tolerates semidefinite input.
    pub fn cholesky(&self) -> Matrix2<f64> {
        lower_factor(&self.cov)
    }

    /// Draws a canonical phase point.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vector2<f64> {
        let z = Vector2::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        );
        self.mean + self.cholesky() * z
    }
}

fn symmetrize(c: Matrix2<f64>) -> Matrix2<f64> {
    let off = 0.5 * (c[(0, 1)] + c[(1, 0)]);
    Matrix2::new(c[(0, 0)], off, off, c[(1, 1)])
}

pub(crate) fn lower_factor(c: &Matrix2<f64>) -> Matrix2<f64> {
    let a = c[(0, 0)].max(0.0);
    if a == 0.0 {
        return Matrix2::new(0.0, 0.0, 0.0, c[(1, 1)].max(0.0).sqrt());
    }
    let l11 = a.sqrt();
    let l21 = c[(1, 0)] / l11;
    let l22 = (c[(1, 1)] - l21 * l21).max(0.0).sqrt();
    Matrix2::new(l11, 0.0, l21, l22)
}

fn gaussian_pdf(dev: Vector2<f64>, cov: &Matrix2<f64>) -> f64 {
    let det = cov.determinant();
    if det <= 0.0 {
        return if dev.iter().all(|&v| v == 0.0) {
            f64::INFINITY
        } else {
            0.0
        };
    }
    let inv = Matrix2::new(cov[(1, 1)], -cov[(0, 1)], -cov[(1, 0)], cov[(0, 0)]) / det;
    (-0.5 * dev.dot(&(inv * dev))).exp() / (2.0 * PI * det.sqrt())
}

/// Quadratic form `Q` over the dual variables `(a, b)` of the averaged
/// propagator's Fourier representation; the exponent is `-(1/2)(a,b) Q (a,b)^T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseQuadraticForm {
    pub q: Matrix2<f64>,
    /// Physical elapsed time.
    pub elapsed: f64,
}

impl NoiseQuadraticForm {
    pub fn exponent(&self, a: f64, b: f64) -> f64 {
        let v = Vector2::new(a, b);
        0.5 * v.dot(&(self.q * v))
    }

    /// Noise covariance of `(X, y)` accumulated over the elapsed time.
    pub fn physical_covariance(&self, d: &DerivedParams) -> Matrix2<f64> {
        let e2 = d.epsilon * d.epsilon;
        let xy = self.q[(0, 1)];
        Matrix2::new(e2 * self.q[(1, 1)], xy, xy, self.q[(0, 0)] / e2)
    }
}

/// `(int e^{-c th} cos^2, int e^{-c th} sin^2, int e^{-c th} sin cos)` over `[0, big_theta]`.
fn damped_trig_moments(c: f64, big_theta: f64) -> (f64, f64, f64) {
    if big_theta <= 1.0 {
        // one Kronrod panel is exact to rounding here and avoids the
        // cancellation of the closed form near zero
        let mut cc = 0.0;
        let mut ss = 0.0;
        let mut sc = 0.0;
        crate::quadrature::kronrod_nodes(0.0, big_theta, |th, w| {
            let e = (-c * th).exp() * w;
            let (s, co) = th.sin_cos();
            cc += e * co * co;
            ss += e * s * s;
            sc += e * s * co;
        });
        return (cc, ss, sc);
    }
    let i0 = if c == 0.0 {
        big_theta
    } else {
        -(-c * big_theta).exp_m1() / c
    };
    let z = Complex64::new(-c, 2.0);
    let j = ((z * big_theta).exp() - 1.0) / z;
    (0.5 * (i0 + j.re), 0.5 * (i0 - j.re), 0.5 * j.im)
}

/// Noise form accumulated over a physical duration `t`.
pub fn noise_form(d: &DerivedParams, t: f64) -> Result<NoiseQuadraticForm> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    let w = d.frequency_ratio();
    let c = d.friction_b / w;
    let k = 0.5 * c;
    let (cc, ss, sc) = damped_trig_moments(c, w * d.tau(t));
    let n = d.noise_n;
    let qaa = n * ss;
    let qab = n * (sc - k * ss);
    let qbb = n * (cc - 2.0 * k * sc + k * k * ss);
    Ok(NoiseQuadraticForm {
        q: Matrix2::new(qaa, qab, qab, qbb),
        elapsed: t,
    })
}

/// Ensemble-averaged Wigner kernel: the image of a point `(x0, y0)` is a
/// Gaussian with mean `flow.canonical() (x0, y0)` and `covariance`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagator {
    pub flow: AffineFlow,
    /// Canonical-coordinate covariance at the end epoch.
    pub covariance: Matrix2<f64>,
}

impl Propagator {
    /// Zero elapsed time, or no noise: the kernel is a delta function.
    pub fn is_delta(&self) -> bool {
        self.covariance.iter().all(|&v| v == 0.0)
    }

    /// Kernel as a density in the end point for a fixed start point.
    pub fn kernel_from(&self, x0: f64, y0: f64) -> Gaussian2D {
        self.apply(&Gaussian2D::point(x0, y0, self.flow.start))
    }

    /// `W(x, y, t | x0, y0, s)`.
    pub fn transition_density(&self, x0: f64, y0: f64, x: f64, y: f64) -> Result<f64> {
        if self.covariance.determinant() <= 0.0 {
            return Err(Error::DegenerateCovariance("delta kernel has no density"));
        }
        Ok(self.kernel_from(x0, y0).density(x, y))
    }

    pub fn apply(&self, state: &Gaussian2D) -> Gaussian2D {
        debug_assert!((state.epoch - self.flow.start).abs() <= 1e-9 * (1.0 + state.epoch.abs()));
        let a = self.flow.canonical();
        Gaussian2D {
            mean: a * state.mean,
            cov: symmetrize(a * state.cov * a.transpose() + self.covariance),
            log_mass: state.log_mass,
            epoch: self.flow.end,
        }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Propagator) -> Propagator {
        let a = next.flow.canonical();
        Propagator {
            flow: self.flow.then(&next.flow),
            covariance: symmetrize(a * self.covariance * a.transpose() + next.covariance),
        }
    }
}

/// Propagator from physical time `0` to `t`.
pub fn propagator(d: &DerivedParams, t: f64) -> Result<Propagator> {
    propagator_between(d, 0.0, t)
}

/// Propagator from physical time `s` to `t`. The noise is stationary, so only
/// the canonical rescaling depends on the absolute epochs.
pub fn propagator_between(d: &DerivedParams, s: f64, t: f64) -> Result<Propagator> {
    let flow = classical_flow_between(d, d.tau(s), d.tau(t))?;
    let c = noise_form(d, t - s)?.physical_covariance(d);
    let g = flow.end_growth();
    let scale = Matrix2::new(g, 0.0, 0.0, 1.0);
    Ok(Propagator {
        flow,
        covariance: symmetrize(scale * c * scale),
    })
}

/// Evolves `state` forward by the physical duration `t` from its own epoch.
pub fn evolve(state: &Gaussian2D, d: &DerivedParams, t: f64) -> Result<Gaussian2D> {
    let s = d.time_from_tau(state.epoch);
    Ok(propagator_between(d, s, s + t)?.apply(state))
}

/// Long-time limit at physical time `t`: Maxwell-Boltzmann in `(X, y)` with
/// variance `D/2`, i.e. canonical covariance `diag((D/2) e^{2 beta t}, D/2)`.
pub fn thermal_state(d: &DerivedParams, t: f64) -> Result<Gaussian2D> {
    if d.model.beta == 0.0 {
        return Err(Error::RequiresFriction);
    }
    let tau = d.tau(t);
    let v = d.thermal_variance();
    Ok(Gaussian2D {
        mean: Vector2::zeros(),
        cov: Matrix2::new(v * (2.0 * d.friction_b * tau).exp(), 0.0, 0.0, v),
        log_mass: 0.0,
        epoch: tau,
    })
}

//! Physical constants of the oscillator and the dimensionless groups derived
//! from them.
//!
//! Public entry points take physical units. Everything downstream works in
//! the natural unit system `hbar = omega = 1`, where time is measured as
//! `omega * t`, temperature as `D = 2 Theta / (hbar omega)` and friction as
//! `B = beta / omega`.

use crate::error::{Error, Result};

/// Physical parameters of a damped oscillator driven by Gaussian white noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub mass: f64,
    pub omega: f64,
    /// Friction rate `beta` (1/time).
    pub beta: f64,
    /// Temperature as an energy, `Theta = kT`.
    pub theta: f64,
    pub hbar: f64,
    /// White-noise strength `mu`, with `<F(t1) F(t2)> = mu delta(t1 - t2)`.
    pub mu: f64,
    /// When set, `derive` insists on `mu == 2 m beta Theta`.
    pub thermal_consistency: bool,
}

impl ModelParams {
    pub fn new(mass: f64, omega: f64, beta: f64, theta: f64, hbar: f64, mu: f64) -> Self {
        Self {
            mass,
            omega,
            beta,
            theta,
            hbar,
            mu,
            thermal_consistency: false,
        }
    }

    /// Noise strength fixed by the fluctuation-dissipation relation `mu = 2 m beta Theta`.
    pub fn thermal(mass: f64, omega: f64, beta: f64, theta: f64, hbar: f64) -> Self {
        Self {
            mass,
            omega,
            beta,
            theta,
            hbar,
            mu: 2.0 * mass * beta * theta,
            thermal_consistency: true,
        }
    }

    /// Natural units with explicit noise: `D = 2 Theta/(hbar omega)`, `B = beta/omega`,
    /// `N_o = mu/(m omega^2 hbar)`.
    pub fn dimensionless(temperature_d: f64, friction_b: f64, noise_n0: f64) -> Self {
        Self::new(1.0, 1.0, friction_b, 0.5 * temperature_d, 1.0, noise_n0)
    }

    /// Natural units with thermally consistent noise, so that `N_o = B D`.
    pub fn thermal_dimensionless(temperature_d: f64, friction_b: f64) -> Self {
        Self::thermal(1.0, 1.0, friction_b, 0.5 * temperature_d, 1.0)
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        if self.thermal_consistency {
            self.mu = 2.0 * self.mass * beta * self.theta;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        positive("mass", self.mass)?;
        positive("omega", self.omega)?;
        positive("hbar", self.hbar)?;
        non_negative("beta", self.beta)?;
        non_negative("theta", self.theta)?;
        non_negative("mu", self.mu)?;
        if self.beta >= 2.0 * self.omega {
            return Err(Error::OverdampedUnsupported {
                beta: self.beta,
                omega: self.omega,
            });
        }
        if self.thermal_consistency {
            let expected = 2.0 * self.mass * self.beta * self.theta;
            if self.mu != expected {
                return Err(Error::ThermalInconsistency {
                    mu: self.mu,
                    expected,
                });
            }
        }
        Ok(())
    }

    pub fn derive(&self) -> Result<DerivedParams> {
        derive(self)
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveParameter {
            name,
            requirement: "finite and > 0",
            value,
        })
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveParameter {
            name,
            requirement: "finite and >= 0",
            value,
        })
    }
}

/// Dimensionless groups of a validated [`ModelParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub model: ModelParams,
    /// Underdamped frequency `Omega = sqrt(omega^2 - beta^2/4)`.
    pub underdamped_frequency: f64,
    /// `sqrt(Omega/omega)`.
    pub epsilon: f64,
    /// `sqrt(m omega / hbar)`, inverse length.
    pub alpha: f64,
    /// `N = mu / (m Omega^2 hbar)`.
    pub noise_n: f64,
    /// `D = 2 Theta / (hbar omega)`.
    pub temperature_d: f64,
    /// `B = beta / omega`.
    pub friction_b: f64,
    /// `N_o = mu / (m omega^2 hbar)`.
    pub noise_n0: f64,
}

/// Validates `params` and computes the dimensionless groups.
pub fn derive(params: &ModelParams) -> Result<DerivedParams> {
    params.validate()?;
    let ModelParams {
        mass,
        omega,
        beta,
        theta,
        hbar,
        mu,
        ..
    } = *params;
    let half_b = 0.5 * beta / omega;
    // (1 - b/2)(1 + b/2) avoids cancellation for small friction
    let ratio = ((1.0 - half_b) * (1.0 + half_b)).sqrt();
    let underdamped_frequency = omega * ratio;
    Ok(DerivedParams {
        model: *params,
        underdamped_frequency,
        epsilon: ratio.sqrt(),
        alpha: (mass * omega / hbar).sqrt(),
        noise_n: mu / (mass * underdamped_frequency * underdamped_frequency * hbar),
        temperature_d: 2.0 * theta / (hbar * omega),
        friction_b: beta / omega,
        noise_n0: mu / (mass * omega * omega * hbar),
    })
}

impl DerivedParams {
    /// `Omega / omega`.
    pub fn frequency_ratio(&self) -> f64 {
        self.underdamped_frequency / self.model.omega
    }

    /// Converts a physical time to the dimensionless `omega t`.
    pub fn tau(&self, t: f64) -> f64 {
        self.model.omega * t
    }

    /// Converts a dimensionless `omega t` back to physical time.
    pub fn time_from_tau(&self, tau: f64) -> f64 {
        tau / self.model.omega
    }

    /// `Theta / (hbar omega)`, the thermal variance of each physical coordinate.
    pub fn thermal_variance(&self) -> f64 {
        0.5 * self.temperature_d
    }
}

/// A point of the dimensionless canonical phase plane: `x = p/(hbar alpha)`,
/// `y = alpha q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub x: f64,
    pub y: f64,
}

impl PhasePoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Builds the canonical point from physical `X = P/(hbar alpha)` at
    /// dimensionless time `tau`.
    pub fn from_physical(big_x: f64, y: f64, d: &DerivedParams, tau: f64) -> Self {
        Self {
            x: big_x * (d.friction_b * tau).exp(),
            y,
        }
    }

    /// Physical `X = x e^{-beta t}` at dimensionless time `tau`.
    pub fn physical_x(&self, d: &DerivedParams, tau: f64) -> f64 {
        self.x * (-d.friction_b * tau).exp()
    }

    pub fn momentum(&self, d: &DerivedParams) -> f64 {
        self.x * d.model.hbar * d.alpha
    }

    pub fn position(&self, d: &DerivedParams) -> f64 {
        self.y / d.alpha
    }

    pub fn radius(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// `atan2(y, x)`, so that `x + i y = R e^{i phi}`.
    pub fn angle(&self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn frictionless_limit() {
        let d = ModelParams::new(1.0, 1.0, 0.0, 1.0, 1.0, 0.3)
            .derive()
            .unwrap();
        assert_eq!(d.underdamped_frequency, 1.0);
        assert_eq!(d.epsilon, 1.0);
        assert_eq!(d.noise_n, d.noise_n0);
    }

    #[test]
    fn thermal_noise_is_b_times_d() {
        let d = ModelParams::thermal(1.0, 1.0, 0.05, 2.5, 1.0)
            .derive()
            .unwrap();
        assert_relative_eq!(d.temperature_d, 5.0);
        assert_relative_eq!(d.friction_b, 0.05);
        assert_relative_eq!(d.noise_n0, 0.25, max_relative = 1e-15);
    }

    #[test]
    fn underdamped_frequency_value() {
        let d = ModelParams::new(1.0, 1.0, 0.1, 0.0, 1.0, 0.0)
            .derive()
            .unwrap();
        assert_relative_eq!(
            d.underdamped_frequency,
            (1.0f64 - 0.0025).sqrt(),
            max_relative = 1e-15
        );
        assert_relative_eq!(d.underdamped_frequency, 0.998749, max_relative = 1e-6);
    }

    #[test]
    fn omega_squared_identity_holds() {
        for &(omega, beta) in &[(1.0, 0.1), (3.0, 5.9), (0.2, 1e-9), (7.0, 0.0)] {
            let d = ModelParams::new(2.0, omega, beta, 1.0, 1.0, 0.0)
                .derive()
                .unwrap();
            let lhs = d.underdamped_frequency * d.underdamped_frequency;
            let rhs = omega * omega - beta * beta / 4.0;
            assert!((lhs - rhs).abs() <= 4.0 * f64::EPSILON * omega * omega);
        }
    }

    #[test]
    fn rejects_overdamped_and_critical() {
        let err = ModelParams::new(1.0, 1.0, 2.0, 1.0, 1.0, 0.0)
            .derive()
            .unwrap_err();
        assert!(matches!(err, Error::OverdampedUnsupported { .. }));
        let err = ModelParams::new(1.0, 1.0, 3.0, 1.0, 1.0, 0.0)
            .derive()
            .unwrap_err();
        assert!(matches!(err, Error::OverdampedUnsupported { .. }));
    }

    #[test]
    fn rejects_bad_values() {
        for p in [
            ModelParams::new(0.0, 1.0, 0.1, 1.0, 1.0, 0.0),
            ModelParams::new(1.0, -1.0, 0.1, 1.0, 1.0, 0.0),
            ModelParams::new(1.0, 1.0, -0.1, 1.0, 1.0, 0.0),
            ModelParams::new(1.0, 1.0, 0.1, -1.0, 1.0, 0.0),
            ModelParams::new(1.0, 1.0, 0.1, 1.0, 0.0, 0.0),
            ModelParams::new(1.0, 1.0, 0.1, 1.0, 1.0, f64::NAN),
        ] {
            assert!(matches!(
                p.derive(),
                Err(Error::NonPositiveParameter { .. })
            ));
        }
    }

    #[test]
    fn thermal_consistency_flag() {
        let mut p = ModelParams::thermal(2.0, 1.5, 0.2, 0.7, 1.0);
        assert_eq!(p.mu, 2.0 * 2.0 * 0.2 * 0.7);
        p.derive().unwrap();
        p.mu *= 1.01;
        assert!(matches!(
            p.derive(),
            Err(Error::ThermalInconsistency { .. })
        ));
        let q = ModelParams::thermal_dimensionless(5.0, 0.05).with_beta(0.1);
        assert_relative_eq!(q.derive().unwrap().noise_n0, 0.5, max_relative = 1e-15);
    }

    #[test]
    fn physical_coordinate_ratio() {
        let d = ModelParams::thermal_dimensionless(5.0, 0.05)
            .derive()
            .unwrap();
        let p = PhasePoint::new(1.7, -0.3);
        let tau = 13.0;
        assert_eq!(p.physical_x(&d, tau) / p.x, (-0.05f64 * tau).exp());
        let back = PhasePoint::from_physical(p.physical_x(&d, tau), p.y, &d, tau);
        assert_relative_eq!(back.x, p.x, max_relative = 1e-14);
    }
}

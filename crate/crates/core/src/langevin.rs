//! Monte-Carlo integration of the noise-driven damped oscillator, used as an
//! independent check on the analytic propagator.
//!
//! In natural units the physical pair `(X, y)` obeys
//! `dX = (-y - B X) dtau + sqrt(N_o) dW`, `dy = X dtau`.
//! Each trajectory draws from its own ChaCha stream keyed by `(seed, index)`,
//! and trajectories are processed in fixed-size blocks whose partial sums are
//! merged in block order, so results do not depend on the thread count.

use nalgebra::{Matrix2, Vector2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::gaussian::{evolve, Gaussian2D};
use crate::params::DerivedParams;

const BLOCK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Weak order 1.
    EulerMaruyama,
    /// Predictor-corrector; weak order 2 for additive noise.
    Heun,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdeConfig {
    /// Step in units of `1/omega`.
    pub dt: f64,
    pub n_steps: usize,
    pub n_trajectories: usize,
    pub seed: u64,
    pub scheme: Scheme,
    /// Steps between recorded moments.
    pub report_every: usize,
}

impl Default for SdeConfig {
    fn default() -> Self {
        Self {
            dt: 0.005,
            n_steps: 2000,
            n_trajectories: 10_000,
            seed: 0x5eed,
            scheme: Scheme::Heun,
            report_every: 200,
        }
    }
}

impl SdeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.dt > 0.1 {
            return Err(Error::StepTooLarge(self.dt));
        }
        if self.n_trajectories < 2 {
            return Err(Error::InvalidConfig(
                "need at least two trajectories".into(),
            ));
        }
        if self.report_every == 0 {
            return Err(Error::InvalidConfig("report_every must be positive".into()));
        }
        Ok(())
    }

    pub fn n_reports(&self) -> usize {
        self.n_steps / self.report_every + 1
    }
}

/// Empirical moments of the physical pair `(X, y)` on the report grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub params: DerivedParams,
    pub config: SdeConfig,
    pub initial: Gaussian2D,
    /// Dimensionless report times `omega t`.
    pub tau: Vec<f64>,
    pub mean: Vec<Vector2<f64>>,
    pub cov: Vec<Matrix2<f64>>,
    pub mean_se: Vec<Vector2<f64>>,
    pub cov_se: Vec<Matrix2<f64>>,
}

impl MomentReport {
    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    fn growth(&self, i: usize) -> f64 {
        (self.params.friction_b * self.tau[i]).exp()
    }

    /// Mean in canonical coordinates, `x = X e^{B tau}`.
    pub fn canonical_mean(&self, i: usize) -> Vector2<f64> {
        let m = self.mean[i];
        Vector2::new(m.x * self.growth(i), m.y)
    }

    pub fn canonical_cov(&self, i: usize) -> Matrix2<f64> {
        let s = Matrix2::new(self.growth(i), 0.0, 0.0, 1.0);
        s * self.cov[i] * s
    }
}

fn drift(b: f64, s: Vector2<f64>) -> Vector2<f64> {
    Vector2::new(-s.y - b * s.x, s.x)
}

fn step(scheme: Scheme, b: f64, dt: f64, s: Vector2<f64>, kick: f64) -> Vector2<f64> {
    let noise = Vector2::new(kick, 0.0);
    let a0 = drift(b, s);
    match scheme {
        Scheme::EulerMaruyama => s + a0 * dt + noise,
        Scheme::Heun => {
            let pred = s + a0 * dt + noise;
            s + (a0 + drift(b, pred)) * (0.5 * dt) + noise
        }
    }
}

// per report: sum dX, sum dy, sum dX^2, sum dX dy, sum dy^2
type Sums = Vec<[f64; 5]>;

fn run_block(
    d: &DerivedParams,
    cfg: &SdeConfig,
    initial: &Gaussian2D,
    reference: &[Vector2<f64>],
    block: usize,
) -> Sums {
    let b = d.friction_b;
    let sigma = (d.noise_n0 * cfg.dt).sqrt();
    let damp0 = (-b * initial.epoch).exp();
    let mut sums = vec![[0.0; 5]; cfg.n_reports()];
    let lo = block * BLOCK;
    let hi = (lo + BLOCK).min(cfg.n_trajectories);
    for traj in lo..hi {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(traj as u64);
        let z0 = initial.sample(&mut rng);
        let mut s = Vector2::new(z0.x * damp0, z0.y);
        let record = |slot: &mut [f64; 5], s: Vector2<f64>, r: Vector2<f64>| {
            let dv = s - r;
            slot[0] += dv.x;
            slot[1] += dv.y;
            slot[2] += dv.x * dv.x;
            slot[3] += dv.x * dv.y;
            slot[4] += dv.y * dv.y;
        };
        record(&mut sums[0], s, reference[0]);
        for n in 1..=cfg.n_steps {
            let kick = if sigma > 0.0 {
                sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)
            } else {
                0.0
            };
            s = step(cfg.scheme, b, cfg.dt, s, kick);
            if n % cfg.report_every == 0 {
                let k = n / cfg.report_every;
                record(&mut sums[k], s, reference[k]);
            }
        }
    }
    sums
}

fn merge(into: &mut Sums, from: &Sums) {
    for (a, b) in into.iter_mut().zip(from) {
        for (x, y) in a.iter_mut().zip(b) {
            *x += y;
        }
    }
}

/// Simulates `cfg.n_trajectories` paths started from samples of `initial`
/// (a point mass gives identical starts) and reports the physical moments.
pub fn simulate_ensemble(
    d: &DerivedParams,
    cfg: &SdeConfig,
    initial: &Gaussian2D,
) -> Result<MomentReport> {
    cfg.validate()?;
    let b = d.friction_b;
    let n_reports = cfg.n_reports();
    // noise-free path of the mean; accumulating deviations from it keeps the
    // second-moment sums well conditioned
    let damp0 = (-b * initial.epoch).exp();
    let mut r = Vector2::new(initial.mean.x * damp0, initial.mean.y);
    let mut reference = Vec::with_capacity(n_reports);
    reference.push(r);
    for n in 1..=cfg.n_steps {
        r = step(cfg.scheme, b, cfg.dt, r, 0.0);
        if n % cfg.report_every == 0 {
            reference.push(r);
        }
    }

    let n_blocks = cfg.n_trajectories.div_ceil(BLOCK);
    #[cfg(feature = "parallel")]
    let partials: Vec<Sums> = {
        use rayon::prelude::*;
        (0..n_blocks)
            .into_par_iter()
            .map(|blk| run_block(d, cfg, initial, &reference, blk))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let partials: Vec<Sums> = (0..n_blocks)
        .map(|blk| run_block(d, cfg, initial, &reference, blk))
        .collect();

    let mut total = vec![[0.0; 5]; n_reports];
    for p in &partials {
        merge(&mut total, p);
    }

    let n = cfg.n_trajectories as f64;
    let mut report = MomentReport {
        params: *d,
        config: *cfg,
        initial: *initial,
        tau: Vec::with_capacity(n_reports),
        mean: Vec::with_capacity(n_reports),
        cov: Vec::with_capacity(n_reports),
        mean_se: Vec::with_capacity(n_reports),
        cov_se: Vec::with_capacity(n_reports),
    };
    for (k, s) in total.iter().enumerate() {
        let m1 = Vector2::new(s[0] / n, s[1] / n);
        let cxx = (s[2] - n * m1.x * m1.x) / (n - 1.0);
        let cxy = (s[3] - n * m1.x * m1.y) / (n - 1.0);
        let cyy = (s[4] - n * m1.y * m1.y) / (n - 1.0);
        let cov = Matrix2::new(cxx, cxy, cxy, cyy);
        report
            .tau
            .push(initial.epoch + (k * cfg.report_every) as f64 * cfg.dt);
        report.mean.push(reference[k] + m1);
        report.cov.push(cov);
        report.mean_se.push(Vector2::new(
            (cxx.max(0.0) / n).sqrt(),
            (cyy.max(0.0) / n).sqrt(),
        ));
        let se = |i: usize, j: usize| {
            ((cov[(i, i)] * cov[(j, j)] + cov[(i, j)] * cov[(i, j)]).max(0.0) / n).sqrt()
        };
        report
            .cov_se
            .push(Matrix2::new(se(0, 0), se(0, 1), se(1, 0), se(1, 1)));
    }
    Ok(report)
}

/// Exact mean and covariance of the discrete scheme itself, free of sampling
/// noise; the difference from the propagator is pure time-step bias.
pub fn discrete_moments(
    d: &DerivedParams,
    cfg: &SdeConfig,
    initial: &Gaussian2D,
) -> Result<Vec<(Vector2<f64>, Matrix2<f64>)>> {
    cfg.validate()?;
    let b = d.friction_b;
    let dt = cfg.dt;
    let f = Matrix2::new(-b, -1.0, 1.0, 0.0);
    let id = Matrix2::identity();
    let (a, g) = match cfg.scheme {
        Scheme::EulerMaruyama => (id + f * dt, Vector2::new(1.0, 0.0)),
        Scheme::Heun => (
            id + f * dt + f * f * (0.5 * dt * dt),
            (id + f * (0.5 * dt)) * Vector2::new(1.0, 0.0),
        ),
    };
    let q = g * g.transpose() * (d.noise_n0 * dt);
    let s0 = Matrix2::new((-b * initial.epoch).exp(), 0.0, 0.0, 1.0);
    let mut m = s0 * initial.mean;
    let mut c = s0 * initial.cov * s0;
    let mut out = vec![(m, c)];
    for n in 1..=cfg.n_steps {
        m = a * m;
        c = a * c * a.transpose() + q;
        if n % cfg.report_every == 0 {
            out.push((m, c));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Discrepancy {
    pub tau: f64,
    pub quantity: &'static str,
    pub empirical: f64,
    pub analytic: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonVerdict {
    pub pass: bool,
    /// Per-comparison `|z|` threshold after Bonferroni correction.
    pub threshold: f64,
    pub comparisons: usize,
    pub max_abs_z: f64,
    /// Largest relative error among comparisons with zero standard error.
    pub deterministic_max_rel: f64,
    pub worst: Option<Discrepancy>,
    pub failures: usize,
}

/// Single-test tail probability whose level the family-wise error is held to.
pub const FAMILY_Z: f64 = 3.0;
/// Tolerance for comparisons that carry no sampling error, relative to the
/// norm of the analytic mean vector or covariance matrix.
pub const DETERMINISTIC_RTOL: f64 = 1e-3;

/// `|z|` threshold holding the family-wise error of `k` two-sided tests at the
/// single-test `3 sigma` level.
pub fn bonferroni_threshold(k: usize) -> f64 {
    let normal = Normal::standard();
    let alpha = 2.0 * (1.0 - normal.cdf(FAMILY_Z));
    normal.inverse_cdf(1.0 - alpha / (2.0 * k.max(1) as f64))
}

/// Compares a report against the analytic propagator for `d`, which may
/// differ from the simulated model in friction and noise but not in units.
pub fn compare_to_propagator(
    report: &MomentReport,
    d: &DerivedParams,
) -> Result<ComparisonVerdict> {
    let (a, b) = (&report.params.model, &d.model);
    if a.mass != b.mass || a.omega != b.omega || a.hbar != b.hbar {
        return Err(Error::ParameterMismatch(format!(
            "report has (m, omega, hbar) = ({}, {}, {}), model has ({}, {}, {})",
            a.mass, a.omega, a.hbar, b.mass, b.omega, b.hbar
        )));
    }
    let mut rows = Vec::new();
    for i in 0..report.len() {
        let elapsed = d.time_from_tau(report.tau[i] - report.initial.epoch);
        let state = evolve(&report.initial, d, elapsed)?;
        let am = state.physical_mean(d);
        let ac = state.physical_cov(d);
        let em = report.mean[i];
        let ec = report.cov[i];
        let ms = report.mean_se[i];
        let cs = report.cov_se[i];
        let (mn, cn) = (am.norm(), ac.norm());
        rows.push(("mean_X", em.x, am.x, ms.x, mn, i));
        rows.push(("mean_y", em.y, am.y, ms.y, mn, i));
        rows.push(("cov_XX", ec[(0, 0)], ac[(0, 0)], cs[(0, 0)], cn, i));
        rows.push(("cov_Xy", ec[(0, 1)], ac[(0, 1)], cs[(0, 1)], cn, i));
        rows.push(("cov_yy", ec[(1, 1)], ac[(1, 1)], cs[(1, 1)], cn, i));
    }
    let stochastic = rows.iter().filter(|r| r.3 > 0.0).count();
    let threshold = bonferroni_threshold(stochastic);
    let mut verdict = ComparisonVerdict {
        pass: true,
        threshold,
        comparisons: rows.len(),
        max_abs_z: 0.0,
        deterministic_max_rel: 0.0,
        worst: None,
        failures: 0,
    };
    let mut worst_score = -1.0;
    for (name, emp, ana, se, norm, i) in rows {
        let (score, z, bad) = if se > 0.0 {
            let z = (emp - ana) / se;
            verdict.max_abs_z = verdict.max_abs_z.max(z.abs());
            (z.abs() / threshold, z, !(z.abs() < threshold))
        } else {
            // relative to the whole mean vector or covariance matrix, so
            // components passing through zero are not singled out
            let scale = norm.max(1e-300);
            let rel = (emp - ana).abs() / scale;
            verdict.deterministic_max_rel = verdict.deterministic_max_rel.max(rel);
            (rel / DETERMINISTIC_RTOL, 0.0, !(rel <= DETERMINISTIC_RTOL))
        };
        if bad {
            verdict.failures += 1;
            verdict.pass = false;
        }
        if score > worst_score {
            worst_score = score;
            verdict.worst = Some(Discrepancy {
                tau: report.tau[i],
                quantity: name,
                empirical: emp,
                analytic: ana,
                z,
            });
        }
    }
    Ok(verdict)
}

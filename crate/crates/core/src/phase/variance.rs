//! Diagonal elements `<h_m| phi^2 |h_m>` of squared phase operators and their
//! thermal average.
//!
//! `<h_m|phi^2|h_m> = sum_{n=1}^{m} g_{m-n,m}^2/n^2 + sum_{n>=1} g_{m,m+n}^2/n^2`
//! (with `gbar` for the physical operator). The first sum is finite. The second
//! is summed exactly up to `tail_cap` terms, then completed by an
//! Euler-Maclaurin estimate; the error report carries a rigorous bound on the
//! omitted tail, from `g^2_{m, n+2} <= g^2_{m, n} sqrt((n+2)/n)`.

use std::f64::consts::PI;

use super::gmatrix::{adjacent, column_step, g_squared_smooth, row_step};
use super::operators::physical_factor;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};

/// Which squared phase operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseKind {
    Canonical,
    Physical { beta_t: f64 },
}

impl PhaseKind {
    fn tanh_half(&self) -> f64 {
        match *self {
            PhaseKind::Canonical => 0.0,
            PhaseKind::Physical { beta_t } => (0.5 * beta_t).tanh(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceReport {
    /// `partial_sum + tail_estimate`.
    pub value: f64,
    pub partial_sum: f64,
    pub tail_estimate: f64,
    /// `0 <= exact tail <= tail_bound`.
    pub tail_bound: f64,
    pub terms: usize,
}

/// Smallest tail cap accepted; the Euler-Maclaurin step differences need it.
pub const MIN_TAIL_CAP: usize = 64;

/// `<h_m| phi^2 |h_m>` for the canonical or physical phase operator.
pub fn phase_variance_diagonal(
    m: usize,
    kind: PhaseKind,
    tail_cap: usize,
) -> Result<VarianceReport> {
    if tail_cap < MIN_TAIL_CAP {
        return Err(Error::InvalidConfig(format!(
            "tail_cap must be at least {MIN_TAIL_CAP}"
        )));
    }
    let th = kind.tanh_half();
    let head = head_sum(m, th);
    let (body, g_last) = row_sum(m, tail_cap, th);
    let big_n = tail_cap as f64;
    let mf = m as f64;
    let tail_bound = g_last * 2.0 * (mf + big_n).sqrt() / (big_n * (mf + big_n - 1.0).sqrt());
    let tail_estimate = tail_estimate(m, tail_cap, th)?;
    let partial_sum = head + body;
    Ok(VarianceReport {
        value: partial_sum + tail_estimate,
        partial_sum,
        tail_estimate,
        tail_bound,
        terms: tail_cap,
    })
}

/// `sum_{n=1}^{m} gbar_{m-n,m}^2 / n^2`, along the column chain.
fn head_sum(m: usize, th: f64) -> f64 {
    if m == 0 {
        return 0.0;
    }
    // two chains in l = m - n: starting at l = m (g = 1) and l = m - 1
    let mut sum = 0.0;
    for (start, mut g2) in [(m, 1.0), (m - 1, adjacent(m - 1).powi(2))] {
        let mut l = start;
        loop {
            let n = m - l;
            if n > 0 {
                sum += g2 * physical_factor(th, n).powi(2) / (n * n) as f64;
            }
            if l < 2 {
                break;
            }
            g2 *= column_step(l).powi(2);
            l -= 2;
        }
    }
    sum
}

/// `sum_{n=1}^{cap} gbar_{m,m+n}^2 / n^2` and `max g^2` over the last two terms.
fn row_sum(m: usize, cap: usize, th: f64) -> (f64, f64) {
    let mut sum = 0.0;
    let mut g2 = [1.0, adjacent(m).powi(2)];
    let mut last = [0.0, 0.0];
    for n in 1..=cap {
        let parity = n % 2;
        if n >= 2 {
            let ng = m + n - 2;
            g2[parity] *= row_step(m, ng).powi(2);
        }
        sum += g2[parity] * physical_factor(th, n).powi(2) / (n * n) as f64;
        last[parity] = g2[parity];
    }
    (sum, last[0].max(last[1]))
}

/// Euler-Maclaurin estimate of `sum_{n > cap}`, done separately over odd and
/// even `n` so the parity-dependent physical factor stays smooth.
fn tail_estimate(m: usize, cap: usize, th: f64) -> Result<f64> {
    let mut total = 0.0;
    for parity in 0..2usize {
        let f = |j: f64| {
            let n = 2.0 * j + parity as f64;
            let factor = if parity == 0 {
                1.0 - th.powf(0.5 * n)
            } else {
                1.0
            };
            g_squared_smooth(m, n) * factor * factor / (n * n)
        };
        // first j with 2j + parity > cap
        let j0 = ((cap + 2 - parity) / 2) as f64;
        let head = f(j0);
        let d1 = 0.5 * (f(j0 + 1.0) - f(j0 - 1.0));
        let d3 = 0.5 * (f(j0 + 2.0) - 2.0 * f(j0 + 1.0) + 2.0 * f(j0 - 1.0) - f(j0 - 2.0));
        // int_{j0}^inf f(j) dj with j = j0 / v^2
        let integral = integrate(
            |v| {
                if v <= 0.0 {
                    return 0.0;
                }
                f(j0 / (v * v)) * 2.0 * j0 / (v * v * v)
            },
            0.0,
            1.0,
            Tolerance {
                abs: 1e-18,
                rel: 1e-13,
                max_intervals: 2000,
            },
        )?
        .value;
        total += integral + 0.5 * head - d1 / 12.0 + d3 / 720.0;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalVariance {
    pub value: f64,
    /// Bound on the terms left out entirely: levels past `levels`, and the
    /// upper-level weights of pairs past `band`.
    pub remainder_bound: f64,
    /// Bound on the row tails past `band`, which are included through their
    /// Euler-Maclaurin estimate.
    pub row_tail_bound: f64,
    pub levels: usize,
    pub band: usize,
}

/// Weak-damping thermal limit of `<phi^2>`:
/// `(2/(D+1)) sum_m ((D-1)/(D+1))^m <h_m|phi^2|h_m>`.
///
/// Summed over pairs `(l, l + k)` with `l < levels`, each contributing
/// `g_{l,l+k}^2/k^2 (w_l + w_{l+k})`. Pairs with `k <= band` are summed
/// exactly; for larger `k` the `w_l` part uses the row tail estimate and the
/// `w_{l+k}` part is bounded. Levels past `levels` are bounded using
/// `<h_m|phi^2|h_m> <= pi^2`.
pub fn thermal_phase_variance(
    temperature_d: f64,
    levels: usize,
    band: usize,
) -> Result<ThermalVariance> {
    if !(temperature_d > 0.0 && temperature_d.is_finite()) {
        return Err(Error::NonPositiveParameter {
            name: "D",
            requirement: "finite and > 0",
            value: temperature_d,
        });
    }
    if levels == 0 || band < MIN_TAIL_CAP {
        return Err(Error::InvalidConfig(format!(
            "need levels >= 1 and band >= {MIN_TAIL_CAP}"
        )));
    }
    let r = (temperature_d - 1.0) / (temperature_d + 1.0);
    let ra = r.abs();
    let norm = 2.0 / (temperature_d + 1.0);
    let kf = band as f64;
    let mut value = 0.0;
    let mut row_tail_bound = 0.0;
    let mut upper_bound = 0.0;
    let mut wl = norm;
    for l in 0..levels {
        let mut g2 = [1.0, adjacent(l).powi(2)];
        let mut rk = 1.0;
        let mut acc = 0.0;
        for k in 1..=band {
            let parity = k % 2;
            if k >= 2 {
                g2[parity] *= row_step(l, l + k - 2).powi(2);
            }
            rk *= r;
            acc += g2[parity] / (k * k) as f64 * (1.0 + rk);
        }
        let lf = l as f64;
        let bound = g2[0].max(g2[1]) * 2.0 * (lf + kf).sqrt() / (kf * (lf + kf - 1.0).sqrt());
        value += wl * (acc + tail_estimate(l, band, 0.0)?);
        row_tail_bound += wl.abs() * bound;
        upper_bound += wl.abs() * ra.powi(band as i32) * bound;
        wl *= r;
    }
    let level_bound = if ra < 1.0 {
        PI * PI * norm * ra.powi(levels as i32) / (1.0 - ra)
    } else {
        f64::INFINITY
    };
    Ok(ThermalVariance {
        value,
        remainder_bound: level_bound + upper_bound,
        row_tail_bound,
        levels,
        band,
    })
}

/// Levels needed so the geometric remainder of [`thermal_phase_variance`] is below `tol`.
pub fn thermal_levels_for(temperature_d: f64, tol: f64) -> usize {
    let r = ((temperature_d - 1.0) / (temperature_d + 1.0)).abs();
    if r == 0.0 {
        return 1;
    }
    let norm = 2.0 / (temperature_d + 1.0);
    let need = (tol * (1.0 - r) / (PI * PI * norm)).ln() / r.ln();
    need.ceil().max(1.0) as usize
}

//! The real symmetric coefficients `g_{m,n}` shared by every angle operator.
//!
//! With `l = min(m, n)`, `g = max(m, n)`, `k = g - l` and `s = 1/2` (`l` even)
//! or `1` (`l` odd):
//!
//! `g_{m,n} = 2^{-k/2} Gamma(l/2 + s) / Gamma(g/2 + s) sqrt(g!/l!)`.
//!
//! Full matrices are built from two exact step-2 recurrences along each row,
//! which never forms a factorial; [`g_entry`] evaluates a single element
//! through Gamma-function ratios.

use crate::error::{Error, Result};
use crate::special::{half_integer_ratio, ln_gamma_ratio};

/// Largest dense truncation built by this module.
pub const MAX_SIZE: usize = 4096;

fn s_of(l: usize) -> f64 {
    if l.is_multiple_of(2) {
        0.5
    } else {
        1.0
    }
}

/// `g_{l, l+1}`.
pub fn adjacent(l: usize) -> f64 {
    std::f64::consts::FRAC_1_SQRT_2
        * half_integer_ratio(l.div_ceil(2) as u64)
        * ((l + 1) as f64).sqrt()
}

/// `g_{l, n+2} / g_{l, n}` for `n >= l`.
pub fn row_step(l: usize, n: usize) -> f64 {
    let nf = n as f64;
    ((nf + 1.0) * (nf + 2.0)).sqrt() / (nf + 2.0 * s_of(l))
}

/// `g_{l-2, n} / g_{l, n}` for `2 <= l <= n`.
pub fn column_step(l: usize) -> f64 {
    let lf = l as f64;
    (lf * (lf - 1.0)).sqrt() / (lf - 2.0 + 2.0 * s_of(l))
}

/// `ln g_{m,n}` for `m <= n`, also valid for real `n - m`, through Gamma ratios.
pub fn ln_g(m: usize, k: f64) -> f64 {
    let s = s_of(m);
    let lf = m as f64;
    -0.5 * k * std::f64::consts::LN_2 - ln_gamma_ratio(0.5 * lf + s, 0.5 * k)
        + 0.5 * ln_gamma_ratio(lf + 1.0, k)
}

/// A single `g_{m,n}`.
pub fn g_entry(m: usize, n: usize) -> f64 {
    let (l, g) = if m <= n { (m, n) } else { (n, m) };
    if l == g {
        return 1.0;
    }
    ln_g(l, (g - l) as f64).exp()
}

/// `ln rho(z)` with `rho(z) = Gamma(z + 1) / Gamma(z + 1/2)`.
fn ln_rho(z: f64) -> f64 {
    ln_gamma_ratio(z + 0.5, 0.5)
}

/// `g_{m, m+k}^2` for real `k >= 0`, via
/// `g^2 = (rho((m+k)/2) / rho(m/2))^{+-1}` (sign `+` for even `m`).
pub fn g_squared_smooth(m: usize, k: f64) -> f64 {
    let mf = m as f64;
    let d = ln_rho(0.5 * (mf + k)) - ln_rho(0.5 * mf);
    if m.is_multiple_of(2) {
        d.exp()
    } else {
        (-d).exp()
    }
}

/// Dense `size x size` truncation of `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct GMatrix {
    size: usize,
    data: Vec<f64>,
}

impl GMatrix {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidConfig(
                "g-matrix size must be at least 1".into(),
            ));
        }
        if size > MAX_SIZE {
            return Err(Error::SizeTooLarge {
                size,
                limit: MAX_SIZE,
            });
        }
        let mut data = vec![0.0; size * size];
        for l in 0..size {
            data[l * size + l] = 1.0;
            if l + 1 < size {
                data[l * size + l + 1] = adjacent(l);
            }
            for n in l..size.saturating_sub(2) {
                data[l * size + n + 2] = data[l * size + n] * row_step(l, n);
            }
            for n in l + 1..size {
                data[n * size + l] = data[l * size + n];
            }
        }
        Ok(Self { size, data })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.data[m * self.size + n]
    }
}

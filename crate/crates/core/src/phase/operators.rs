use nalgebra::DMatrix;
use num_complex::Complex64;

use super::gmatrix::GMatrix;
use crate::error::Result;
use crate::special::{laguerre_scaled, ln_gamma_ratio};

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixKind {
    Canonical,
    Physical { beta_t: f64 },
    Functional(String),
}

/// Dense Hermitian matrix in the oscillator number basis. Only the upper
/// triangle is computed; the lower one is its conjugate mirror, so `A = A^dagger`
/// holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    pub kind: MatrixKind,
    data: DMatrix<Complex64>,
}

/// `i^p`.
pub(crate) fn i_pow(p: i64) -> Complex64 {
    match p.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl HermitianMatrix {
    /// Fills from `upper(m, n)` for `m <= n`; diagonal imaginary parts are dropped.
    pub fn from_upper(
        size: usize,
        kind: MatrixKind,
        mut upper: impl FnMut(usize, usize) -> Complex64,
    ) -> Self {
        let mut data = DMatrix::zeros(size, size);
        for m in 0..size {
            data[(m, m)] = Complex64::new(upper(m, m).re, 0.0);
            for n in m + 1..size {
                let v = upper(m, n);
                data[(m, n)] = v;
                data[(n, m)] = v.conj();
            }
        }
        Self { kind, data }
    }

    pub fn size(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.data[(m, n)]
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    /// `max |A - A^dagger|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.size();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `sum_n |A_{m,n}|^2` over the truncation.
    pub fn row_norm_squared(&self, m: usize) -> f64 {
        self.data.row(m).iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Matrix of the Weyl-quantised angle function with Fourier coefficients
/// `c_j = (1/2 pi) int Phi e^{i j phi} dphi`: entry `(m, n) = i^{m-n} g_{m,n} c_{n-m}`.
pub fn angle_operator_matrix(
    coefficients: impl Fn(i64) -> Complex64,
    size: usize,
    label: impl Into<String>,
) -> Result<HermitianMatrix> {
    let g = GMatrix::new(size)?;
    Ok(HermitianMatrix::from_upper(
        size,
        MatrixKind::Functional(label.into()),
        |m, n| {
            let k = n as i64 - m as i64;
            i_pow(-k) * g.get(m, n) * coefficients(k)
        },
    ))
}

/// Canonical phase: `i^{n-m-1} g_{m,n} / (n - m)` off the diagonal.
pub fn canonical_phase_matrix(size: usize) -> Result<HermitianMatrix> {
    physical_like(size, MatrixKind::Canonical, |_| 1.0)
}

/// Physical phase at `beta t`: `g` replaced by
/// `g (1 - sigma_k tanh(beta t / 2)^{k/2})`, `sigma_k = 1` for even `k`, else 0.
pub fn physical_phase_matrix(size: usize, beta_t: f64) -> Result<HermitianMatrix> {
    let th = (0.5 * beta_t).tanh();
    physical_like(size, MatrixKind::Physical { beta_t }, move |k| {
        physical_factor(th, k)
    })
}

/// `1 - sigma_k tanh(beta t/2)^{k/2}` given `th = tanh(beta t / 2)`.
pub fn physical_factor(th: f64, k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0 - th.powf(0.5 * k as f64)
    } else {
        1.0
    }
}

fn physical_like(
    size: usize,
    kind: MatrixKind,
    factor: impl Fn(usize) -> f64,
) -> Result<HermitianMatrix> {
    let g = GMatrix::new(size)?;
    Ok(HermitianMatrix::from_upper(size, kind, |m, n| {
        if m == n {
            return Complex64::new(0.0, 0.0);
        }
        let k = n - m;
        i_pow(k as i64 - 1) * (g.get(m, n) * factor(k) / k as f64)
    }))
}

/// `<h_m| Delta(R, phi) |h_n>`, the number-basis elements of the Weyl kernel.
pub fn delta_matrix_element(m: usize, n: usize, r: f64, phi: f64) -> Complex64 {
    let (l, g) = if m <= n { (m, n) } else { (n, m) };
    let k = g - l;
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let phase = i_pow(k as i64) * Complex64::from_polar(1.0, (n as f64 - m as f64) * phi);
    if k > 0 && r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let (lag, lag_scale) = laguerre_scaled(l, k as f64, 2.0 * r * r);
    let kf = k as f64;
    let radial = if k > 0 { kf * r.ln() } else { 0.0 };
    let ln_mag = std::f64::consts::LN_2 * (1.0 + 0.5 * kf)
        - 0.5 * ln_gamma_ratio(l as f64 + 1.0, kf)
        + radial
        - r * r
        + lag_scale;
    phase * (sign * lag * ln_mag.exp())
}

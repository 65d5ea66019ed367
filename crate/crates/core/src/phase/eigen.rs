//! Dense Hermitian eigensolver: Householder reduction to a complex
//! tridiagonal, a diagonal unitary that makes it real, then implicit QL.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::operators::HermitianMatrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `|A v - lambda v|` for each unit eigenvector.
    pub residuals: Vec<f64>,
    pub size: usize,
    /// `max(0, max |lambda| - pi)`.
    pub slack: f64,
}

impl Spectrum {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Full eigen-decomposition of `a`; returns the spectrum.
pub fn spectrum(a: &HermitianMatrix) -> Result<Spectrum> {
    let (values, vectors) = eigh(a.as_matrix())?;
    let m = a.as_matrix();
    let residuals = (0..values.len())
        .map(|j| {
            let v = vectors.column(j);
            let r = m * v - v * Complex64::new(values[j], 0.0);
            r.norm()
        })
        .collect();
    let slack = values.iter().fold(0.0f64, |s, &l| s.max(l.abs() - PI));
    Ok(Spectrum {
        size: values.len(),
        eigenvalues: values,
        residuals,
        slack,
    })
}

/// Eigenvalues (ascending) and unit eigenvectors (columns) of a Hermitian matrix.
pub fn eigh(a: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let n = a.nrows();
    if n == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    let (diag, off, q) = tridiagonalize(a);

    // conj(ph_{k+1}) off_k ph_k = |off_k|
    let mut phases = vec![Complex64::new(1.0, 0.0); n];
    let mut e = vec![0.0; n];
    for k in 0..n - 1 {
        let mag = off[k].norm();
        phases[k + 1] = if mag > 0.0 {
            phases[k] * (off[k] / mag)
        } else {
            phases[k]
        };
        e[k] = mag;
    }
    let mut d = diag;
    let mut z = DMatrix::<f64>::identity(n, n);
    tql2(&mut d, &mut e, &mut z)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| d[i]).collect();
    let mut scaled = DMatrix::<Complex64>::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            scaled[(row, col)] = phases[row] * z[(row, src)];
        }
    }
    Ok((values, q * scaled))
}

/// Returns `(diag, off, Q)` with `A = Q T Q^dagger`, `T` tridiagonal with real
/// diagonal `diag` and subdiagonal `off[k] = T_{k+1,k}`.
fn tridiagonalize(a: &DMatrix<Complex64>) -> (Vec<f64>, Vec<Complex64>, DMatrix<Complex64>) {
    let n = a.nrows();
    let mut w = a.clone();
    let mut q = DMatrix::<Complex64>::identity(n, n);
    let mut off = vec![Complex64::new(0.0, 0.0); n.saturating_sub(1)];
    let zero = Complex64::new(0.0, 0.0);
    for k in 0..n.saturating_sub(1) {
        let len = n - k - 1;
        let x: Vec<Complex64> = (0..len).map(|i| w[(k + 1 + i, k)]).collect();
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            off[k] = x[0];
            continue;
        }
        let xnorm = (x[0].norm_sqr() + tail).sqrt();
        let unit = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -unit * xnorm;
        let mut v = x.clone();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // p = 2 A v over the trailing block
        let mut p = vec![zero; len];
        for (j, &vj) in v.iter().enumerate() {
            let col = w.column(k + 1 + j);
            for (i, pi) in p.iter_mut().enumerate() {
                *pi += col[k + 1 + i] * vj;
            }
        }
        for pi in p.iter_mut() {
            *pi *= 2.0;
        }
        let vp: Complex64 = v.iter().zip(&p).map(|(a, b)| a.conj() * b).sum();
        let wv: Vec<Complex64> = p.iter().zip(&v).map(|(pi, vi)| pi - vp * vi).collect();
        for j in 0..len {
            let (wj, vj) = (wv[j].conj(), v[j].conj());
            let mut col = w.column_mut(k + 1 + j);
            for i in 0..len {
                col[k + 1 + i] -= v[i] * wj + wv[i] * vj;
            }
        }
        off[k] = alpha;
        w[(k + 1, k)] = alpha;
        w[(k, k + 1)] = alpha.conj();
        for i in 1..len {
            w[(k + 1 + i, k)] = zero;
            w[(k, k + 1 + i)] = zero;
        }
        // Q <- Q H, H = I - 2 v v^dagger on rows/cols k+1..
        let mut qv = vec![zero; n];
        for (j, &vj) in v.iter().enumerate() {
            let col = q.column(k + 1 + j);
            for (r, acc) in qv.iter_mut().enumerate() {
                *acc += col[r] * vj;
            }
        }
        for (j, &vj) in v.iter().enumerate() {
            let c = vj.conj() * 2.0;
            let mut col = q.column_mut(k + 1 + j);
            for (r, acc) in qv.iter().enumerate() {
                col[r] -= acc * c;
            }
        }
    }
    let diag = (0..n).map(|i| w[(i, i)].re).collect();
    (diag, off, q)
}

/// Implicit QL on a real symmetric tridiagonal (`e[i] = T_{i+1,i}`, `e[n-1]`
/// ignored), accumulating rotations into `z`.
fn tql2(d: &mut [f64], e: &mut [f64], z: &mut DMatrix<f64>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_SWEEPS {
                    return Err(Error::ConvergenceFailure {
                        index: l,
                        iterations: MAX_SWEEPS,
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let zh = z[(k, i + 1)];
                        z[(k, i + 1)] = s * z[(k, i)] + c * zh;
                        z[(k, i)] = c * z[(k, i)] - s * zh;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Eigenvalues of the real `2n x 2n` embedding `[[Re, -Im], [Im, Re]]`; each
/// Hermitian eigenvalue appears twice. Independent of [`eigh`].
pub fn embedded_eigenvalues(a: &DMatrix<Complex64>) -> DVector<f64> {
    let n = a.nrows();
    let mut big = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = a[(i, j)];
            big[(i, j)] = z.re;
            big[(i + n, j + n)] = z.re;
            big[(i, j + n)] = -z.im;
            big[(i + n, j)] = z.im;
        }
    }
    big.symmetric_eigenvalues()
}

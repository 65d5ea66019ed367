//! Globally adaptive 15-point Gauss-Kronrod quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Kronrod abscissae, descending; odd positions are also Gauss-7 nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Self {
            abs,
            rel: 0.0,
            max_intervals: 4000,
        }
    }

    pub fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            max_intervals: 4000,
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::absolute(1e-10)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    floor: f64,
    seq: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Returns `(value, error, roundoff floor)`.
fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut gauss = fc * WG[3];
    let mut kron = fc * WGK[7];
    let mut res_abs = kron.abs();
    let mut fv = [(0.0, 0.0); 7];
    for (j, slot) in fv.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        *slot = (f1, f2);
        kron += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kron;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for (j, &(f1, f2)) in fv.iter().enumerate() {
        res_asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = kron * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((kron - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    (value, err, floor)
}

/// Visits the 15 Kronrod nodes of `[a, b]` with their weights.
pub(crate) fn kronrod_nodes<F: FnMut(f64, f64)>(a: f64, b: f64, mut visit: F) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    visit(center, WGK[7] * half);
    for j in 0..7 {
        let dx = half * XGK[j];
        visit(center - dx, WGK[j] * half);
        visit(center + dx, WGK[j] * half);
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Quadrature> {
    integrate_breaks(f, &[a, b], tol)
}

/// Integrates `f` over `[points[0], points[last]]`, with the interior points as
/// initial panel boundaries. `points` must be ascending.
pub fn integrate_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    tol: Tolerance,
) -> Result<Quadrature> {
    assert!(points.len() >= 2, "need at least two points");
    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    let mut evaluations = 0usize;
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    let mut frozen_floor = 0.0;
    for w in points.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (value, error, floor) = kronrod(&mut f, w[0], w[1]);
        evaluations += 15;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value,
            error,
            floor,
            seq,
        });
        seq += 1;
    }
    loop {
        let value: f64 = frozen_value + heap.iter().map(|p| p.value).sum::<f64>();
        let error: f64 = frozen_error + heap.iter().map(|p| p.error).sum::<f64>();
        // tolerances below the accumulated roundoff level cannot be met; every
        // panel's error is at least its own floor, so allow a factor of two
        let floor: f64 = frozen_floor + heap.iter().map(|p| p.floor).sum::<f64>();
        let target = tol.target(value).max(2.0 * floor);
        if error <= target || heap.is_empty() {
            if error <= target || frozen_error <= target {
                return Ok(Quadrature {
                    value,
                    error,
                    evaluations,
                    intervals: seq,
                });
            }
            return Err(Error::QuadratureNotConverged {
                estimate: value,
                error,
                tolerance: target,
                subdivisions: seq,
            });
        }
        if seq >= tol.max_intervals {
            return Err(Error::QuadratureNotConverged {
                estimate: value,
                error,
                tolerance: target,
                subdivisions: seq,
            });
        }
        let worst = heap.pop().expect("heap non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a) < 1e-14 * worst.a.abs().max(worst.b.abs())
        {
            frozen_value += worst.value;
            frozen_error += worst.error;
            frozen_floor += worst.floor;
            continue;
        }
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error, floor) = kronrod(&mut f, a, b);
            evaluations += 15;
            heap.push(Panel {
                a,
                b,
                value,
                error,
                floor,
                seq,
            });
            seq += 1;
        }
    }
}

/// Integrates `f` over `[a, inf)` through `u = a + s/(1-s)`.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    tol: Tolerance,
) -> Result<Quadrature> {
    integrate(
        |s| {
            if s >= 1.0 {
                return 0.0;
            }
            let r = 1.0 - s;
            let v = f(a + s / r) / (r * r);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        tol,
    )
}

/// Tensor-product adaptive quadrature over a rectangle. The inner integrals
/// run at a tenth of the outer tolerance.
pub fn integrate_2d<F: FnMut(f64, f64) -> f64>(
    mut f: F,
    x: (f64, f64),
    y: (f64, f64),
    tol: Tolerance,
) -> Result<Quadrature> {
    let inner_tol = Tolerance {
        abs: tol.abs / (10.0 * (x.1 - x.0).abs().max(1.0)),
        rel: tol.rel / 10.0,
        max_intervals: tol.max_intervals,
    };
    let mut evaluations = 0usize;
    let mut failure = None;
    let outer = integrate(
        |xv| {
            if failure.is_some() {
                // the result is discarded; stop evaluating
                return 0.0;
            }
            match integrate(|yv| f(xv, yv), y.0, y.1, inner_tol) {
                Ok(q) => {
                    evaluations += q.evaluations;
                    q.value
                }
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        x.0,
        x.1,
        tol,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let mut q = outer?;
    q.evaluations = evaluations;
    Ok(q)
}

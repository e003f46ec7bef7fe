//! Gauss–Kronrod (G7/K15) quadrature: globally adaptive bisection for
//! non-oscillatory integrands, and fixed panels for oscillatory ones.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

// published nodes and weights, kept at full printed precision
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// One application of the 15-point Kronrod rule on `[a, b]`.
/// Returns the Kronrod value and a QUADPACK-style error estimate.
pub fn gk15<T, F>(f: &F, a: f64, b: f64) -> (T, f64)
where
    T: QuadValue,
    F: Fn(f64) -> T + ?Sized,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut vals = [(T::zero(), T::zero()); 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (lo, hi) = (f(center - dx), f(center + dx));
        vals[j] = (lo, hi);
        let pair = lo + hi;
        kron = kron + pair * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    // spread of f about its mean, which scales the raw |K - G| difference
    let mean = kron * 0.5;
    let mut asc = WGK[7] * (fc - mean).magnitude();
    for j in 0..7 {
        asc += WGK[j] * ((vals[j].0 - mean).magnitude() + (vals[j].1 - mean).magnitude());
    }
    let asc = asc * half.abs();
    let mut err = ((kron - gauss) * half).magnitude();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    (kron * half, err)
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub intervals: usize,
    pub converged: bool,
}

struct Interval<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Interval<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Interval<T> {}
impl<T> PartialOrd for Interval<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Interval<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

const INITIAL_PANELS: usize = 16;

/// Globally adaptive G7/K15 quadrature over `[a, b]`, optionally split at
/// interior `breaks` (points where the integrand has kinks or jumps).
///
/// Stops once the summed error estimate is below
/// `max(abs_tol, rel_tol * |I|)` or `max_intervals` is reached.
pub fn integrate_adaptive<T, F>(
    f: &F,
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> QuadResult<T>
where
    T: QuadValue,
    F: Fn(f64) -> T + ?Sized,
{
    if a == b {
        return QuadResult {
            value: T::zero(),
            error: 0.0,
            intervals: 0,
            converged: true,
        };
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

    let mut nodes: Vec<f64> = Vec::with_capacity(breaks.len() + 2);
    nodes.push(lo);
    nodes.extend(breaks.iter().copied().filter(|&x| x > lo && x < hi));
    nodes.push(hi);
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();

    let mut heap = BinaryHeap::new();
    let mut total = T::zero();
    let mut total_err = 0.0;
    // a single wide panel can miss narrow features and report a tiny error
    for w in nodes.windows(2) {
        let h = (w[1] - w[0]) / INITIAL_PANELS as f64;
        for i in 0..INITIAL_PANELS {
            let p = w[0] + h * i as f64;
            let q = if i + 1 == INITIAL_PANELS { w[1] } else { p + h };
            let (value, error) = gk15(f, p, q);
            total = total + value;
            total_err += error;
            heap.push(Interval {
                a: p,
                b: q,
                value,
                error,
            });
        }
    }

    let mut converged = false;
    loop {
        let target = abs_tol.max(rel_tol * total.magnitude());
        if total_err <= target {
            converged = true;
            break;
        }
        if heap.len() >= max_intervals {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval can no longer be split in floating point
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(f, worst.a, mid);
        let (v2, e2) = gk15(f, mid, worst.b);
        total = total - worst.value + v1 + v2;
        total_err += e1 + e2 - worst.error;
        heap.push(Interval {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Interval {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }

    // re-sum to shed cancellation drift from the running total
    let mut value = T::zero();
    let mut error = 0.0;
    let intervals = heap.len();
    for iv in heap.into_iter() {
        value = value + iv.value;
        error += iv.error;
    }
    QuadResult {
        value: value * sign,
        error,
        intervals,
        converged,
    }
}

/// Fixed-panel G7/K15 quadrature: `[a, b]` is cut at `breaks` and then into
/// equal panels no wider than `max_width`.
pub fn integrate_panels<T, F>(f: &F, a: f64, b: f64, breaks: &[f64], max_width: f64) -> (T, f64)
where
    T: QuadValue,
    F: Fn(f64) -> T + ?Sized,
{
    let mut total = T::zero();
    let mut err = 0.0;
    for (p, q) in panel_edges(a, b, breaks, max_width) {
        let (v, e) = gk15(f, p, q);
        total = total + v;
        err += e;
    }
    (total, err)
}

/// Edges of the panels used by [`integrate_panels`], in increasing order.
pub fn panel_edges(a: f64, b: f64, breaks: &[f64], max_width: f64) -> Vec<(f64, f64)> {
    let mut nodes: Vec<f64> = vec![a];
    nodes.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    nodes.push(b);
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let mut out = Vec::new();
    for w in nodes.windows(2) {
        let n = ((w[1] - w[0]) / max_width).ceil().max(1.0) as usize;
        let h = (w[1] - w[0]) / n as f64;
        for i in 0..n {
            let p = w[0] + h * i as f64;
            let q = if i + 1 == n { w[1] } else { p + h };
            out.push((p, q));
        }
    }
    out
}

/// Kronrod nodes of the panel `[a, b]`, in increasing order, with their weights.
pub fn gk15_nodes(a: f64, b: f64) -> [(f64, f64); 15] {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = [(0.0, 0.0); 15];
    for j in 0..7 {
        out[j] = (center - half * XGK[j], half * WGK[j]);
        out[14 - j] = (center + half * XGK[j], half * WGK[j]);
    }
    out[7] = (center, half * WGK[7]);
    out
}

/// Roots of `g` on `[a, b]` found by bisecting every sign change on an
/// `n`-cell grid. Use them as `breaks` when integrating `|g|`-like kinks.
pub fn sign_changes<F: Fn(f64) -> f64 + ?Sized>(g: &F, a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    let h = (b - a) / n as f64;
    let mut out = Vec::new();
    let mut x0 = a;
    let mut g0 = g(a);
    for i in 1..=n {
        let x1 = if i == n { b } else { a + h * i as f64 };
        let g1 = g(x1);
        if g0 == 0.0 && x0 > a {
            out.push(x0);
        } else if g0 * g1 < 0.0 {
            let (mut lo, mut hi, mut glo) = (x0, x1, g0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let gm = g(mid);
                if gm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (gm < 0.0) == (glo < 0.0) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        x0 = x1;
        g0 = g1;
    }
    out
}

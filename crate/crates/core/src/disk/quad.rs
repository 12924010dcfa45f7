//! Radial and angular quadrature for integral norms on the disk.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use super::NumericsError;
use crate::symbol::{AnalyticSymbol, EvalError};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp;
        loop {
            // Three-term recurrence: p1 = P_n(x), p2 = P_{n-1}(x).
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j - 1) as f64 * x * p2 - (j - 1) as f64 * p3) / j as f64;
            }
            dp = n as f64 * (x * p1 - p2) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Trapezoidal mean of `|f(r e^{iθ})|^p` over `n` equispaced angles.
pub fn circle_mean(f: &AnalyticSymbol, r: f64, p: f64, n: usize) -> Result<f64, NumericsError> {
    if !(0.0..1.0).contains(&r) {
        return Err(NumericsError::InvalidParameter(format!("radius {r} outside [0, 1)")));
    }
    if n < 64 {
        return Err(NumericsError::InvalidParameter(format!(
            "circle mean needs at least 64 angles, got {n}"
        )));
    }
    let mut sum = 0.0;
    for k in 0..n {
        let z = Complex64::from_polar(r, TAU * k as f64 / n as f64);
        sum += f.evaluate(z)?.norm().powf(p);
    }
    Ok(sum / n as f64)
}

// Gauss–Kronrod 7/15 abscissae and weights.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
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
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> Result<f64, EvalError>>(f: &F, a: f64, b: f64) -> Result<(f64, f64), EvalError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx)? + f(c + dx)?;
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Ok((kron * h, ((kron - gauss) * h).abs()))
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive Gauss–Kronrod integration of a `2π`-periodic function
/// over one period, starting from 15 pieces centred on `center`.
fn periodic_adaptive<F>(f: &F, center: f64, rel_tol: f64, max_pieces: usize) -> Result<f64, EvalError>
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    const START: usize = 15;
    let lo = center - PI;
    let width = TAU / START as f64;
    let mut heap = BinaryHeap::new();
    let (mut total, mut err) = (0.0, 0.0);
    for i in 0..START {
        let a = lo + width * i as f64;
        let b = a + width;
        let (v, e) = gk15(f, a, b)?;
        total += v;
        err += e;
        heap.push(Piece { a, b, value: v, err: e });
    }
    while err > rel_tol * total.abs() && heap.len() < max_pieces {
        let worst = heap.pop().unwrap();
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk15(f, worst.a, mid)?;
        let (v2, e2) = gk15(f, mid, worst.b)?;
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.err;
        heap.push(Piece { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, err: e2 });
    }
    // Re-sum to shed drift from the running updates.
    Ok(heap.iter().map(|p| p.value).sum())
}

/// Mean of `|f(r e^{iθ})|^p` over the circle, to relative accuracy `rel_tol`.
///
/// Smooth integrands are settled by two trapezoid passes; integrands with
/// sharp peaks fall back to adaptive Gauss–Kronrod centred on the largest
/// trapezoid sample.
pub fn circle_mean_adaptive(f: &AnalyticSymbol, r: f64, p: f64, rel_tol: f64) -> Result<f64, NumericsError> {
    if !(0.0..1.0).contains(&r) {
        return Err(NumericsError::InvalidParameter(format!("radius {r} outside [0, 1)")));
    }
    let g = |t: f64| -> Result<f64, EvalError> { Ok(f.evaluate(Complex64::from_polar(r, t))?.norm().powf(p)) };
    const N0: usize = 64;
    let mut coarse = 0.0;
    let mut fine = 0.0;
    let mut peak = (f64::NEG_INFINITY, 0.0);
    for k in 0..2 * N0 {
        let t = PI * k as f64 / N0 as f64;
        let v = g(t)?;
        if v > peak.0 {
            peak = (v, t);
        }
        fine += v;
        if k % 2 == 0 {
            coarse += v;
        }
    }
    coarse /= N0 as f64;
    fine /= (2 * N0) as f64;
    if (fine - coarse).abs() <= 1e-14 * fine.abs() {
        return Ok(fine);
    }
    Ok(periodic_adaptive(&g, peak.1, rel_tol, 20_000)? / TAU)
}

/// Radial quadrature settings for Bergman integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadConfig {
    /// Integrate over `[0, 1 - 2^{-levels}]`.
    pub levels: u32,
    /// Gauss–Legendre nodes per dyadic interval.
    pub nodes: usize,
    /// Relative accuracy of each circle mean.
    pub angular_tol: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            levels: 40,
            nodes: 32,
            angular_tol: 1e-12,
        }
    }
}

/// `(α+1) ∫_D |f|^p (1-|z|^2)^α dA` with normalized area measure.
///
/// Computed as `2(α+1) ∫_0^{r_max} M_p(r) r (1-r^2)^α dr` with composite
/// Gauss–Legendre on the dyadic intervals `[1-2^{-l}, 1-2^{-l-1}]`.
pub fn bergman_integral(f: &AnalyticSymbol, p: f64, alpha: f64, quad: &QuadConfig) -> Result<f64, NumericsError> {
    if !(p >= 1.0) {
        return Err(NumericsError::InvalidParameter(format!("Bergman exponent p = {p} must be >= 1")));
    }
    if !(alpha > -1.0) {
        return Err(NumericsError::InvalidParameter(format!("Bergman weight alpha = {alpha} must be > -1")));
    }
    let (x, w) = gauss_legendre(quad.nodes);
    let mut total = 0.0;
    for l in 0..quad.levels {
        let d_hi = (-(l as f64)).exp2();
        let d_lo = 0.5 * d_hi;
        let half = 0.5 * (d_hi - d_lo);
        let mut piece = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            // depth = 1 - r, exact in the dyadic parametrisation
            let depth = d_lo + half * (1.0 - xi);
            let r = 1.0 - depth;
            let weight = r * (depth * (2.0 - depth)).powf(alpha);
            let m = circle_mean_adaptive(f, r, p, quad.angular_tol)?;
            piece += wi * m * weight;
        }
        total += piece * half;
    }
    Ok(2.0 * (alpha + 1.0) * total)
}

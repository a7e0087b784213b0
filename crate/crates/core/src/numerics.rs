//! Special functions and quadrature.
//!
//! Everything here is pure. Conventions:
//!
//! - Spherical harmonics and Clebsch-Gordan coefficients use the
//!   Condon-Shortley phase.
//! - Angular momenta are passed as `f64` and must be integers or
//!   half-integers; internally they are handled as doubled integers.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Nodes in strictly increasing order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Integral of `f` over [-1, 1].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }

    /// Integral of `f` over [a, b].
    pub fn integrate_on<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        half * self.integrate(|x| f(mid + half * x))
    }
}

/// Builds the `order`-point Gauss-Legendre rule by Newton iteration on P_n.
///
/// The rule is exact for polynomials of degree up to `2 * order - 1`.
pub fn gauss_legendre(order: usize) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(Error::ZeroQuadratureOrder);
    }
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Roots of P_n in decreasing order; the guess is accurate to O(n^-2).
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, p_prev) = legendre_pair(n, x);
            dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (p, p_prev) = legendre_pair(n, x);
        if p != 0.0 {
            dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // i-th largest root sits at position n-1-i; mirror into position i.
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule {
        order,
        nodes,
        weights,
    })
}

/// Below this endpoint width [`graded_gauss_legendre`] switches to panels.
pub const GRADING_THRESHOLD: f64 = 0.05;
const GRADING_RATIO: f64 = 6.0;

/// Composite rule on [-1, 1] for integrands with poles just outside both
/// endpoints, at distance ~`width`. Panels shrink geometrically toward each
/// end, from 1/2 down to `width`, and each carries an `order / 4`-point
/// Gauss rule (at least 8). Falls back to the plain rule when `width` is
/// not small.
pub fn graded_gauss_legendre(order: usize, width: f64) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(Error::ZeroQuadratureOrder);
    }
    if !(width < GRADING_THRESHOLD) || width <= 0.0 {
        return gauss_legendre_cached(order).map(|r| (*r).clone());
    }
    let panel = gauss_legendre_cached((order / 4).max(8))?;
    // distances from +1: 0, width, width*r, ..., 1/2
    let mut cuts = vec![0.0, width];
    while *cuts.last().unwrap() * GRADING_RATIO < 0.5 {
        let next = cuts.last().unwrap() * GRADING_RATIO;
        cuts.push(next);
    }
    cuts.push(0.5);
    let mut edges: Vec<f64> = cuts.iter().map(|d| -1.0 + d).collect();
    edges.extend(cuts.iter().rev().map(|d| 1.0 - d));
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, w) in panel.iter() {
            nodes.push(mid + half * x);
            weights.push(half * w);
        }
    }
    Ok(QuadratureRule {
        order,
        nodes,
        weights,
    })
}


/// Shared, lazily built rules. Rules are deterministic, so caching never
/// changes results.
pub fn gauss_legendre_cached(order: usize) -> Result<Arc<QuadratureRule>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<QuadratureRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().expect("quadrature cache poisoned").get(&order) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(gauss_legendre(order)?);
    cache
        .lock()
        .expect("quadrature cache poisoned")
        .entry(order)
        .or_insert_with(|| Arc::clone(&rule));
    Ok(rule)
}

// (P_n(x), P_{n-1}(x)) by the three-term recurrence, n >= 1.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for j in 2..=n {
        let jf = j as f64;
        let next = ((2.0 * jf - 1.0) * x * p - (jf - 1.0) * p_prev) / jf;
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}

/// Legendre polynomial P_l(x) on [-1, 1] by forward recursion.
pub fn legendre_p(l: u32, x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0) {
        return Err(Error::OutOfDomain {
            what: "x",
            value: x,
            domain: "|x| <= 1",
        });
    }
    Ok(legendre_p_unchecked(l, x))
}

pub(crate) fn legendre_p_unchecked(l: u32, x: f64) -> f64 {
    match l {
        0 => 1.0,
        _ => legendre_pair(l as usize, x).0,
    }
}

const Q_SERIES_THRESHOLD: f64 = 1.25;

/// Legendre function of the second kind Q_l(z) for real z > 1.
///
/// Uses the three-term recursion from Q_0 = ln((z+1)/(z-1))/2 below z = 1.25 and
/// the convergent hypergeometric series in 1/z^2 above, where forward
/// recursion cancels catastrophically.
pub fn legendre_q(l: u32, z: f64) -> Result<f64> {
    if !(z > 1.0) {
        return Err(Error::BranchPoint(z));
    }
    if z.is_infinite() {
        return Ok(0.0);
    }
    if z < Q_SERIES_THRESHOLD {
        // z - 1 is exact here, 1/z would not be
        let q0 = 0.5 * ((z + 1.0) / (z - 1.0)).ln();
        if l == 0 {
            return Ok(q0);
        }
        let mut q_prev = q0;
        let mut q = z * q0 - 1.0;
        for j in 2..=l {
            let jf = j as f64;
            let next = ((2.0 * jf - 1.0) * z * q - (jf - 1.0) * q_prev) / jf;
            q_prev = q;
            q = next;
        }
        Ok(q)
    } else {
        Ok(legendre_q_series(l, z))
    }
}

// Q_l(z) = l! / ((2l+1)!! z^(l+1)) * 2F1((l+1)/2, (l+2)/2; l+3/2; 1/z^2)
fn legendre_q_series(l: u32, z: f64) -> f64 {
    let lf = l as f64;
    let mut pref = 1.0 / z;
    for j in 1..=l {
        pref *= j as f64 / ((2 * j + 1) as f64 * z);
    }
    let (a, b, c) = ((lf + 1.0) / 2.0, (lf + 2.0) / 2.0, lf + 1.5);
    let w = 1.0 / (z * z);
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..2000 {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * w;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    pref * sum
}

/// Orthonormal spherical harmonic Y_lm(theta, phi), Condon-Shortley phase.
pub fn spherical_harmonic(l: u32, m: i32, theta: f64, phi: f64) -> Result<Complex64> {
    if m.unsigned_abs() > l {
        return Err(Error::InvalidProjection {
            j: l as f64,
            m: m as f64,
        });
    }
    let ma = m.unsigned_abs();
    let (st, ct) = theta.sin_cos();
    let plm = assoc_legendre(l, ma, ct, st);
    let norm = ((2 * l + 1) as f64 / (4.0 * PI) * factorial(l - ma) / factorial(l + ma)).sqrt();
    let y = Complex64::from_polar(norm * plm, ma as f64 * phi);
    if m >= 0 {
        Ok(y)
    } else if ma % 2 == 0 {
        Ok(y.conj())
    } else {
        Ok(-y.conj())
    }
}

// P_l^m(cos theta) with Condon-Shortley phase, m >= 0; `s` = sin theta.
fn assoc_legendre(l: u32, m: u32, x: f64, s: f64) -> f64 {
    let mut pmm = 1.0;
    for j in 1..=m {
        pmm *= -((2 * j - 1) as f64) * s;
    }
    if l == m {
        return pmm;
    }
    let mut p_prev = pmm;
    let mut p = x * (2 * m + 1) as f64 * pmm;
    for ll in (m + 2)..=l {
        let next = ((2 * ll - 1) as f64 * x * p - (ll + m - 1) as f64 * p_prev) / (ll - m) as f64;
        p_prev = p;
        p = next;
    }
    p
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn doubled(v: f64) -> Result<i64> {
    let t = 2.0 * v;
    if !t.is_finite() || (t - t.round()).abs() > 1e-9 {
        return Err(Error::NotHalfInteger(v));
    }
    Ok(t.round() as i64)
}

/// Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M> (Racah formula).
///
/// Returns 0 when `M != m1 + m2` or the triangle rule fails.
pub fn clebsch_gordan(j1: f64, m1: f64, j2: f64, m2: f64, j: f64, m: f64) -> Result<f64> {
    let (tj1, tm1, tj2, tm2, tj, tm) = (
        doubled(j1)?,
        doubled(m1)?,
        doubled(j2)?,
        doubled(m2)?,
        doubled(j)?,
        doubled(m)?,
    );
    for (tj, tm) in [(tj1, tm1), (tj2, tm2), (tj, tm)] {
        if tj < 0 || tm.abs() > tj || (tj + tm) % 2 != 0 {
            return Err(Error::InvalidProjection {
                j: tj as f64 / 2.0,
                m: tm as f64 / 2.0,
            });
        }
    }
    if tm != tm1 + tm2 {
        return Ok(0.0);
    }
    if tj < (tj1 - tj2).abs() || tj > tj1 + tj2 || (tj1 + tj2 + tj) % 2 != 0 {
        return Ok(0.0);
    }
    // All combinations below are even, so halving is exact.
    let h = |t: i64| -> i64 { t / 2 };
    let f = |n: i64| -> f64 { factorial(n as u32) };
    let delta = f(h(tj1 + tj2 - tj)) * f(h(tj1 - tj2 + tj)) * f(h(-tj1 + tj2 + tj))
        / f(h(tj1 + tj2 + tj) + 1);
    let norm = ((tj + 1) as f64
        * delta
        * f(h(tj + tm))
        * f(h(tj - tm))
        * f(h(tj1 - tm1))
        * f(h(tj1 + tm1))
        * f(h(tj2 - tm2))
        * f(h(tj2 + tm2)))
    .sqrt();

    let a = h(tj1 + tj2 - tj);
    let b = h(tj1 - tm1);
    let c = h(tj2 + tm2);
    let d = h(tj - tj2 + tm1);
    let e = h(tj - tj1 - tm2);
    let k_min = 0.max(-d).max(-e);
    let k_max = a.min(b).min(c);
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let denom = f(k) * f(a - k) * f(b - k) * f(c - k) * f(d + k) * f(e + k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign / denom;
    }
    Ok(norm * sum)
}

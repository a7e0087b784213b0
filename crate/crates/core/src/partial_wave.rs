//! Partial-wave projection and first-Born phase shifts.
//!
//! For a total-spin-zero amplitude that depends only on x = cos(theta):
//!
//! ```text
//! M_l(k)  = 1/(8 pi) * int_{-1}^{1} dx P_l(x) M(x)
//! delta_l = -1/2 * E_total * k * Re M_l(k)
//! ```
//!
//! Positive delta means attraction. The general (J, l, s) projection over
//! both solid angles is [`project_jl`]; it reduces to [`project_l`] at s = 0.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dirac_amplitude::method_b_singlet_amplitude;
use crate::error::{Error, Result};
use crate::kinematics::{
    build_kinematics, screened_denominator, Channel, ComKinematics, PhysicsConstants,
};
use crate::numerics::{
    clebsch_gordan, gauss_legendre_cached, graded_gauss_legendre, legendre_p_unchecked, legendre_q, spherical_harmonic,
    QuadratureRule,
};
use crate::operator_amplitude::{method_a_amplitude, AmplitudeMode, Channels};
use crate::vec3::Vec3;

/// Default number of Gauss-Legendre points for angular integrals.
pub const DEFAULT_QUAD_ORDER: usize = 64;
/// Relative change tolerated when the quadrature order is doubled.
pub const CONVERGENCE_RTOL: f64 = 1e-8;
/// Doubling stops here and reports non-convergence.
pub const MAX_QUAD_ORDER: usize = 4096;
/// Largest accepted |Im M_l| relative to the integrand scale.
pub const IM_RESIDUAL_LIMIT: f64 = 1e-8;
/// Rounding noise floor relative to the integrand scale. Projections that
/// vanish by parity sit at this level rather than at zero.
pub const NOISE_FLOOR: f64 = 1e-12;

/// hbar*c in MeV fm, rounded as in the usual back-of-envelope estimate.
pub const HBAR_C_ROUNDED: f64 = 197.0;

/// How the singlet amplitude is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    /// Total-spin eigenstate sandwich of the operator amplitude.
    A,
    /// z-polarized Dirac-spinor elements.
    B,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::A => "A",
            Method::B => "B",
        })
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Method::A),
            "B" | "b" => Ok(Method::B),
            _ => Err(Error::Invalid(format!("unknown method '{s}' (A|B)"))),
        }
    }
}

/// Partial wave with l = 0..3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Wave {
    S,
    P,
    D,
    F,
}

impl Wave {
    pub const ALL: [Wave; 4] = [Wave::S, Wave::P, Wave::D, Wave::F];

    pub fn l(self) -> u32 {
        self as u32
    }

    pub fn from_l(l: u32) -> Result<Self> {
        Wave::ALL
            .get(l as usize)
            .copied()
            .ok_or_else(|| Error::Invalid(format!("no wave label for l = {l}")))
    }

    /// (-1)^l.
    pub fn parity(self) -> i32 {
        if self.l() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn is_even(self) -> bool {
        self.parity() == 1
    }
}

impl fmt::Display for Wave {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Wave {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S" | "s" => Ok(Wave::S),
            "P" | "p" => Ok(Wave::P),
            "D" | "d" => Ok(Wave::D),
            "F" | "f" => Ok(Wave::F),
            _ => Err(Error::Invalid(format!("unknown wave '{s}' (S|P|D|F)"))),
        }
    }
}

/// One Born phase shift with its diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseShiftRecord {
    pub method: Method,
    pub mode: AmplitudeMode,
    pub wave: Wave,
    pub l: u32,
    #[serde(rename = "J")]
    pub j: u32,
    pub k: f64,
    pub alpha: f64,
    /// Radians.
    pub delta: f64,
    pub im_residual: f64,
    pub quad_order: usize,
}

/// A converged Legendre projection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projection {
    pub value: Complex64,
    /// (1/8pi) sum w |P_l| |M|: magnitude the rounding error scales with.
    pub scale: f64,
    pub order: usize,
}

impl Projection {
    /// |Im| relative to the integrand scale.
    pub fn im_residual(&self) -> f64 {
        if self.scale > 0.0 {
            self.value.im.abs() / self.scale
        } else {
            0.0
        }
    }

    /// True when the value is indistinguishable from rounding noise.
    pub fn is_noise(&self) -> bool {
        self.value.norm() <= NOISE_FLOOR * self.scale
    }
}

/// (1/8pi) sum_i w_i P_l(x_i) M(x_i) on a fixed rule.
pub fn project_l<F>(mut amplitude: F, l: u32, quad: &QuadratureRule) -> Result<Complex64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in quad.iter() {
        acc += amplitude(x)? * (w * legendre_p_unchecked(l, x));
    }
    Ok(acc / (8.0 * PI))
}

fn project_samples(rule: &QuadratureRule, samples: &[(Complex64, f64)], l: u32) -> (Complex64, f64) {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for ((x, w), (a, mag)) in rule.iter().zip(samples) {
        let wp = w * legendre_p_unchecked(l, x);
        acc += a * wp;
        scale += wp.abs() * mag;
    }
    (acc / (8.0 * PI), scale / (8.0 * PI))
}

fn converged(prev: Complex64, next: Complex64, scale: f64) -> bool {
    (next - prev).norm() <= CONVERGENCE_RTOL * next.norm() + NOISE_FLOOR * scale
}

/// Projects onto every l in `ls`, doubling the Gauss order from
/// `start_order` until each projection changes by less than
/// [`CONVERGENCE_RTOL`] relative (or sits at the noise floor).
pub fn project_waves_converged<F>(
    mut amplitude: F,
    ls: &[u32],
    start_order: usize,
) -> Result<Vec<Projection>>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    project_waves_scaled(|x| amplitude(x).map(|a| (a, a.norm())), ls, start_order, 1.0)
}

/// Like [`project_waves_converged`], but the closure also returns the size
/// of the pieces the amplitude was summed from. When the amplitude is a
/// near-cancellation this sets the rounding floor instead of |M|.
/// `pole_width` is the distance of the nearest pole beyond x = +-1; small
/// values switch to [`graded_gauss_legendre`].
pub fn project_waves_scaled<F>(
    mut amplitude: F,
    ls: &[u32],
    start_order: usize,
    pole_width: f64,
) -> Result<Vec<Projection>>
where
    F: FnMut(f64) -> Result<(Complex64, f64)>,
{
    let mut sample = |order: usize| -> Result<Vec<(Complex64, f64)>> {
        let rule = graded_gauss_legendre(order, pole_width)?;
        let samples = rule
            .nodes()
            .iter()
            .map(|&x| amplitude(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(ls.iter().map(|&l| project_samples(&rule, &samples, l)).collect())
    };

    let mut order = start_order.max(1);
    let mut prev = sample(order)?;
    loop {
        let next_order = order * 2;
        let next = sample(next_order)?;
        let all_done = prev
            .iter()
            .zip(next.iter())
            .all(|(a, b)| converged(a.0, b.0, b.1));
        if all_done {
            return Ok(next
                .into_iter()
                .map(|(value, scale)| Projection {
                    value,
                    scale,
                    order: next_order,
                })
                .collect());
        }
        if next_order >= MAX_QUAD_ORDER {
            let (i, (a, b)) = prev
                .iter()
                .zip(next.iter())
                .enumerate()
                .find(|(_, (a, b))| !converged(a.0, b.0, b.1))
                .expect("at least one projection failed to converge");
            return Err(Error::NonConvergence {
                l: ls[i],
                order: next_order,
                value: b.0.re,
                change: (b.0 - a.0).norm(),
            });
        }
        order = next_order;
        prev = next;
    }
}

/// Single-wave version of [`project_waves_converged`].
pub fn project_l_converged<F>(amplitude: F, l: u32, start_order: usize) -> Result<Projection>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    Ok(project_waves_converged(amplitude, &[l], start_order)?[0])
}

/// Product quadrature over one sphere: Gauss-Legendre in cos(theta) times
/// uniform azimuth. Exact for spherical harmonics of degree below
/// min(2 * theta_order, phi_count).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SphereGrid {
    pub theta_order: usize,
    pub phi_count: usize,
}

impl SphereGrid {
    pub fn new(theta_order: usize, phi_count: usize) -> Self {
        Self {
            theta_order,
            phi_count,
        }
    }

    fn points(&self) -> Result<Vec<(f64, f64, f64)>> {
        if self.phi_count == 0 {
            return Err(Error::ZeroQuadratureOrder);
        }
        let rule = gauss_legendre_cached(self.theta_order)?;
        let dphi = 2.0 * PI / self.phi_count as f64;
        let mut pts = Vec::with_capacity(self.theta_order * self.phi_count);
        for (ct, w) in rule.iter() {
            let theta = ct.acos();
            for j in 0..self.phi_count {
                pts.push((theta, j as f64 * dphi, w * dphi));
            }
        }
        Ok(pts)
    }
}

/// General (J, l, s, M) projection over both solid angles:
///
/// ```text
/// 1/(4pi)^2 sum_{m, m', ms, ms'} C(l m s ms | J M) C(l m' s ms' | J M)
///     int dW(p) dW(q) Y*_{l m'}(q) Y_{l m}(p) M(p, q; ms, ms')
/// ```
///
/// `amplitude(p_hat, q_hat, ms, ms')` is evaluated once per grid pair and
/// spin pair.
pub fn project_jl<F>(
    mut amplitude: F,
    j: u32,
    l: u32,
    s: u32,
    big_m: i32,
    grid: SphereGrid,
) -> Result<Complex64>
where
    F: FnMut(Vec3, Vec3, i32, i32) -> Result<Complex64>,
{
    if j < l.abs_diff(s) || j > l + s {
        return Err(Error::TriangleRule { l, s, j });
    }
    if big_m.unsigned_abs() > j {
        return Err(Error::InvalidProjection {
            j: j as f64,
            m: big_m as f64,
        });
    }
    let pts = grid.points()?;
    let dirs: Vec<Vec3> = pts.iter().map(|&(t, p, _)| Vec3::from_angles(t, p)).collect();
    let si = s as i32;
    let mut total = Complex64::new(0.0, 0.0);
    for ms in -si..=si {
        let m = big_m - ms;
        if m.unsigned_abs() > l {
            continue;
        }
        let c1 = clebsch_gordan(l as f64, m as f64, s as f64, ms as f64, j as f64, big_m as f64)?;
        if c1 == 0.0 {
            continue;
        }
        let y_p: Vec<Complex64> = pts
            .iter()
            .map(|&(t, p, w)| spherical_harmonic(l, m, t, p).map(|y| y * w))
            .collect::<Result<_>>()?;
        for ms_prime in -si..=si {
            let m_prime = big_m - ms_prime;
            if m_prime.unsigned_abs() > l {
                continue;
            }
            let c2 = clebsch_gordan(
                l as f64,
                m_prime as f64,
                s as f64,
                ms_prime as f64,
                j as f64,
                big_m as f64,
            )?;
            if c2 == 0.0 {
                continue;
            }
            let y_q: Vec<Complex64> = pts
                .iter()
                .map(|&(t, p, w)| spherical_harmonic(l, m_prime, t, p).map(|y| y.conj() * w))
                .collect::<Result<_>>()?;
            let mut acc = Complex64::new(0.0, 0.0);
            for (ip, p_hat) in dirs.iter().enumerate() {
                let mut inner = Complex64::new(0.0, 0.0);
                for (iq, q_hat) in dirs.iter().enumerate() {
                    inner += y_q[iq] * amplitude(*p_hat, *q_hat, ms, ms_prime)?;
                }
                acc += y_p[ip] * inner;
            }
            total += acc * (c1 * c2);
        }
    }
    Ok(total / (16.0 * PI * PI))
}

/// Upper bound on the size of the pieces summed into a singlet amplitude:
/// e^2 N (1/|D_direct| + 1/|D_exchange|) with N the largest singlet
/// expectation of the reduced operator.
pub fn amplitude_magnitude(kin: &ComKinematics, alpha: f64, channels: Channels) -> Result<f64> {
    let e2 = PhysicsConstants::default().e_squared;
    let r = kin.k * kin.k / (kin.e_single + kin.m).powi(2);
    let n = 1.0 + 6.0 * r + r * r;
    let mut inv = 1.0 / screened_denominator(kin, Channel::Direct, alpha)?.abs();
    if channels == Channels::Both {
        inv += 1.0 / screened_denominator(kin, Channel::Exchange, alpha)?.abs();
    }
    Ok(e2 * n * inv)
}

/// Smallest |delta| that is distinguishable from rounding error at this
/// point: [`NOISE_FLOOR`] times the phase shift built from the x-integral of
/// [`amplitude_magnitude`]. The integral is analytic,
/// `int dx / (2k^2 (1 -+ x) + alpha^2) = ln(1 + 4k^2/alpha^2) / 2k^2`.
pub fn delta_resolution(m: f64, k: f64, alpha: f64, channels: Channels) -> Result<f64> {
    check_alpha(alpha)?;
    let kin = build_kinematics(m, k, 0.0)?;
    let e2 = PhysicsConstants::default().e_squared;
    let r = k * k / (kin.e_single + m).powi(2);
    let n = 1.0 + 6.0 * r + r * r;
    let per_channel = (4.0 * k * k / (alpha * alpha)).ln_1p() / (2.0 * k * k);
    let count = match channels {
        Channels::Both => 2.0,
        Channels::DirectOnly => 1.0,
    };
    let scale = e2 * n * count * per_channel / (8.0 * PI);
    Ok(NOISE_FLOOR * born_phase_shift(kin.e_total, k, scale).abs())
}

/// Singlet amplitude as a function of x for the given method and mode.
pub fn singlet_amplitude(
    method: Method,
    mode: &AmplitudeMode,
    m: f64,
    k: f64,
    alpha: f64,
) -> impl Fn(f64) -> Result<Complex64> + '_ {
    move |x| {
        let kin = build_kinematics(m, k, x)?;
        match method {
            Method::A => method_a_amplitude(&kin, alpha, mode, 0, 0, 0),
            Method::B => method_b_singlet_amplitude(&kin, alpha, mode.vertex, mode.channels),
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha == 0.0 {
        return Err(Error::ZeroScreening);
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::OutOfDomain {
            what: "alpha",
            value: alpha,
            domain: "alpha > 0",
        });
    }
    Ok(())
}

/// delta = -1/2 * E_total * k * Re(projection).
pub fn born_phase_shift(e_total: f64, k: f64, projection: f64) -> f64 {
    -0.5 * e_total * k * projection
}

/// Born phase shifts for several waves at one (k, alpha) point, sharing the
/// amplitude samples between waves.
pub fn phase_shifts(
    method: Method,
    mode: &AmplitudeMode,
    waves: &[Wave],
    m: f64,
    k: f64,
    alpha: f64,
    quad_order: usize,
) -> Result<Vec<PhaseShiftRecord>> {
    check_alpha(alpha)?;
    let kin = build_kinematics(m, k, 0.0)?;
    let ls: Vec<u32> = waves.iter().map(|w| w.l()).collect();
    let amp = singlet_amplitude(method, mode, m, k, alpha);
    let projections = project_waves_scaled(
        |x| {
            let a = amp(x)?;
            let mag = amplitude_magnitude(&build_kinematics(m, k, x)?, alpha, mode.channels)?;
            Ok((a, mag.max(a.norm())))
        },
        &ls,
        quad_order,
        alpha * alpha / (2.0 * k * k),
    )?;
    waves
        .iter()
        .zip(projections)
        .map(|(&wave, proj)| {
            let im_residual = proj.im_residual();
            if im_residual >= IM_RESIDUAL_LIMIT {
                return Err(Error::ImaginaryResidual {
                    l: wave.l(),
                    residual: im_residual,
                    limit: IM_RESIDUAL_LIMIT,
                });
            }
            Ok(PhaseShiftRecord {
                method,
                mode: *mode,
                wave,
                l: wave.l(),
                j: wave.l(),
                k,
                alpha,
                delta: born_phase_shift(kin.e_total, k, proj.value.re),
                im_residual,
                quad_order: proj.order,
            })
        })
        .collect()
}

/// Born phase shift for one wave.
pub fn phase_shift(
    method: Method,
    mode: &AmplitudeMode,
    wave: Wave,
    m: f64,
    k: f64,
    alpha: f64,
    quad_order: usize,
) -> Result<PhaseShiftRecord> {
    Ok(phase_shifts(method, mode, &[wave], m, k, alpha, quad_order)?.remove(0))
}

/// First-Born phase shift of V(r) = A exp(-alpha r)/r with reduced mass mu:
/// `-(mu A / k) Q_l(1 + alpha^2 / 2k^2)`.
pub fn yukawa_born_oracle(l: u32, k: f64, alpha: f64, coupling: f64, mu: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::OutOfDomain {
            what: "k",
            value: k,
            domain: "k > 0",
        });
    }
    if !(alpha > 0.0) {
        return Err(Error::OutOfDomain {
            what: "alpha",
            value: alpha,
            domain: "alpha > 0",
        });
    }
    let z = 1.0 + alpha * alpha / (2.0 * k * k);
    Ok(-(mu * coupling / k) * legendre_q(l, z)?)
}

/// V = -(197)^3 * slope / (2 M): effective potential strength in eV from
/// the low-k slope d(delta)/dk, with M the electron mass in eV.
pub fn potential_estimate(ddelta_dk: f64, mass_ev: f64) -> f64 {
    -HBAR_C_ROUNDED.powi(3) * ddelta_dk / (2.0 * mass_ev)
}

/// Least-squares line through (k, delta).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// max |delta - fit| / max |delta| over the window.
    pub max_deviation: f64,
}

impl LinearFit {
    /// More than 10% deviation from a straight line.
    pub fn is_nonlinear(&self) -> bool {
        self.max_deviation > 0.1
    }
}

pub fn linear_fit(ks: &[f64], deltas: &[f64]) -> Result<LinearFit> {
    if ks.len() != deltas.len() || ks.len() < 2 {
        return Err(Error::Invalid(
            "linear fit needs at least two (k, delta) pairs of equal length".into(),
        ));
    }
    let n = ks.len() as f64;
    let mk = ks.iter().sum::<f64>() / n;
    let md = deltas.iter().sum::<f64>() / n;
    let sxx: f64 = ks.iter().map(|k| (k - mk).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Invalid("linear fit needs distinct k values".into()));
    }
    let sxy: f64 = ks.iter().zip(deltas).map(|(k, d)| (k - mk) * (d - md)).sum();
    let slope = sxy / sxx;
    let intercept = md - slope * mk;
    let peak = deltas.iter().fold(0.0f64, |a, d| a.max(d.abs()));
    let worst = ks
        .iter()
        .zip(deltas)
        .map(|(k, d)| (d - (slope * k + intercept)).abs())
        .fold(0.0f64, f64::max);
    Ok(LinearFit {
        slope,
        intercept,
        max_deviation: if peak > 0.0 { worst / peak } else { 0.0 },
    })
}

/// Potential estimate from a fitted window of phase shifts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialEstimate {
    pub fit: LinearFit,
    pub v_ev: f64,
}

impl PotentialEstimate {
    pub fn from_window(ks: &[f64], deltas: &[f64], mass_ev: f64) -> Result<Self> {
        let fit = linear_fit(ks, deltas)?;
        Ok(Self {
            fit,
            v_ev: potential_estimate(fit.slope, mass_ev),
        })
    }

    /// Set when the fit window is not linear to 10%.
    pub fn warning(&self) -> Option<String> {
        self.fit.is_nonlinear().then(|| {
            format!(
                "delta(k) deviates from linearity by {:.1}% over the fit window",
                100.0 * self.fit.max_deviation
            )
        })
    }
}

//! Polarized tree amplitudes from explicit Dirac spinors (method B).
//!
//! Spinors are `u(p, s) = N (chi_s, (sigma.p)/(E+m) chi_s)` with
//! `N = sqrt((E+m)/2E)`, so `u^dagger u = 1`. Gamma matrices are in the Dirac
//! representation and the metric is diag(+1, -1, -1, -1). Spin labels are
//! z-axis projections for every particle, including particle 2 which moves
//! along -z.
//!
//! Momentum assignment: p1 = p, p2 = -p, p3 = q, p4 = -q, where p and q come
//! from [`ComKinematics`]. A matrix element `<s3 s4| M |s1 s2>` is
//!
//! ```text
//! -e^2 [ (u3 g^mu u1)(u4 g_mu u2) / D_direct - (u3 g^mu u2)(u4 g_mu u1) / D_exchange ]
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kinematics::{screened_denominator, Channel, ComKinematics, PhysicsConstants};
use crate::operator_amplitude::{Channels, Vertex};
use crate::spin_algebra::Spin;
use crate::vec3::Vec3;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Metric diagonal g_{mu mu}.
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

pub type Mat4 = [[Complex64; 4]; 4];

/// gamma^0 .. gamma^3 in the Dirac representation.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaSet {
    pub gamma: [Mat4; 4],
}

impl Default for GammaSet {
    fn default() -> Self {
        Self::dirac()
    }
}

impl GammaSet {
    pub fn dirac() -> Self {
        let sigma: [[[Complex64; 2]; 2]; 3] = [
            [[ZERO, ONE], [ONE, ZERO]],
            [[ZERO, -I], [I, ZERO]],
            [[ONE, ZERO], [ZERO, -ONE]],
        ];
        let mut gamma = [[[ZERO; 4]; 4]; 4];
        gamma[0][0][0] = ONE;
        gamma[0][1][1] = ONE;
        gamma[0][2][2] = -ONE;
        gamma[0][3][3] = -ONE;
        for (i, s) in sigma.iter().enumerate() {
            for a in 0..2 {
                for b in 0..2 {
                    gamma[i + 1][a][b + 2] = s[a][b];
                    gamma[i + 1][a + 2][b] = -s[a][b];
                }
            }
        }
        Self { gamma }
    }

    /// max |{g^mu, g^nu} - 2 g^{mu nu} 1| over all entries.
    pub fn clifford_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for mu in 0..4 {
            for nu in 0..4 {
                let ac = add(
                    &matmul(&self.gamma[mu], &self.gamma[nu]),
                    &matmul(&self.gamma[nu], &self.gamma[mu]),
                );
                for (i, row) in ac.iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        let target = if mu == nu && i == j { 2.0 * METRIC[mu] } else { 0.0 };
                        worst = worst.max((v - target).norm());
                    }
                }
            }
        }
        worst
    }
}

fn matmul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn add(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = *a;
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] += b[i][j];
        }
    }
    out
}

/// Positive-energy Dirac spinor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiracSpinor {
    pub components: [Complex64; 4],
}

impl DiracSpinor {
    /// u^dagger u.
    pub fn density(&self) -> f64 {
        self.components.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// `u(p, spin)` for mass `m`.
pub fn dirac_spinor(p: Vec3, spin: Spin, m: f64) -> Result<DiracSpinor> {
    if !(m > 0.0) {
        return Err(Error::OutOfDomain {
            what: "m",
            value: m,
            domain: "m > 0",
        });
    }
    let e = p.norm().hypot(m);
    let n = ((e + m) / (2.0 * e)).sqrt();
    let chi = match spin {
        Spin::Up => [ONE, ZERO],
        Spin::Down => [ZERO, ONE],
    };
    // (sigma.p) chi
    let sp = [
        Complex64::new(p.z, 0.0) * chi[0] + Complex64::new(p.x, -p.y) * chi[1],
        Complex64::new(p.x, p.y) * chi[0] + Complex64::new(-p.z, 0.0) * chi[1],
    ];
    let lower = 1.0 / (e + m);
    Ok(DiracSpinor {
        components: [
            chi[0] * n,
            chi[1] * n,
            sp[0] * (n * lower),
            sp[1] * (n * lower),
        ],
    })
}

/// Vector current `ubar_a gamma^mu u_b` for mu = 0..3.
pub fn current(gammas: &GammaSet, a: &DiracSpinor, b: &DiracSpinor) -> [Complex64; 4] {
    // ubar = u^dagger gamma^0, and gamma^0 is diagonal.
    let g0 = [1.0, 1.0, -1.0, -1.0];
    let mut j = [ZERO; 4];
    for (mu, jm) in j.iter_mut().enumerate() {
        let g = &gammas.gamma[mu];
        let mut acc = ZERO;
        for i in 0..4 {
            let bra = a.components[i].conj() * g0[i];
            for (k, bk) in b.components.iter().enumerate() {
                acc += bra * g[i][k] * bk;
            }
        }
        *jm = acc;
    }
    j
}

/// g_{mu nu} j1^mu j2^nu, restricted to mu = 0 for [`Vertex::Gamma0Only`].
pub fn contract(j1: &[Complex64; 4], j2: &[Complex64; 4], vertex: Vertex) -> Complex64 {
    let upper = match vertex {
        Vertex::FullGammaMu => 4,
        Vertex::Gamma0Only => 1,
    };
    (0..upper).map(|mu| j1[mu] * j2[mu] * METRIC[mu]).sum()
}

/// Spin labels `(s1, s2, s3, s4)`: incoming 1, 2 and outgoing 3, 4.
pub type SpinLabels = (Spin, Spin, Spin, Spin);

struct ExternalSpinors {
    u1: DiracSpinor,
    u2: DiracSpinor,
    u3: DiracSpinor,
    u4: DiracSpinor,
}

fn external(kin: &ComKinematics, labels: SpinLabels) -> Result<ExternalSpinors> {
    let (s1, s2, s3, s4) = labels;
    Ok(ExternalSpinors {
        u1: dirac_spinor(kin.p_vec, s1, kin.m)?,
        u2: dirac_spinor(-kin.p_vec, s2, kin.m)?,
        u3: dirac_spinor(kin.q_vec, s3, kin.m)?,
        u4: dirac_spinor(-kin.q_vec, s4, kin.m)?,
    })
}

/// Direct and exchange numerators (without propagators or couplings).
pub fn bilinear_numerators(
    kin: &ComKinematics,
    labels: SpinLabels,
    vertex: Vertex,
) -> Result<(Complex64, Complex64)> {
    let g = GammaSet::dirac();
    let u = external(kin, labels)?;
    let direct = contract(&current(&g, &u.u3, &u.u1), &current(&g, &u.u4, &u.u2), vertex);
    let exchange = contract(&current(&g, &u.u3, &u.u2), &current(&g, &u.u4, &u.u1), vertex);
    Ok((direct, exchange))
}

/// Polarized matrix element `<s3 s4| M |s1 s2>`.
pub fn polarized_element(
    kin: &ComKinematics,
    labels: SpinLabels,
    alpha: f64,
    vertex: Vertex,
    channels: Channels,
) -> Result<Complex64> {
    let e2 = PhysicsConstants::default().e_squared;
    let (direct, exchange) = bilinear_numerators(kin, labels, vertex)?;
    let mut bracket = direct / screened_denominator(kin, Channel::Direct, alpha)?;
    if channels == Channels::Both {
        bracket -= exchange / screened_denominator(kin, Channel::Exchange, alpha)?;
    }
    Ok(bracket * -e2)
}

/// `<-+| M |-+> - <+-| M |-+>`, the z-polarized singlet amplitude.
pub fn method_b_singlet_amplitude(
    kin: &ComKinematics,
    alpha: f64,
    vertex: Vertex,
    channels: Channels,
) -> Result<Complex64> {
    use Spin::{Down, Up};
    let stay = polarized_element(kin, (Down, Up, Down, Up), alpha, vertex, channels)?;
    let swap = polarized_element(kin, (Down, Up, Up, Down), alpha, vertex, channels)?;
    Ok(stay - swap)
}

/// `1/2 (<+-| - <-+|) M (|+-> - |-+>)` from all four elements.
pub fn singlet_four_term(
    kin: &ComKinematics,
    alpha: f64,
    vertex: Vertex,
    channels: Channels,
) -> Result<Complex64> {
    use Spin::{Down, Up};
    // labels: (ket1, ket2, bra1, bra2)
    let el = |l| polarized_element(kin, l, alpha, vertex, channels);
    let pm_pm = el((Up, Down, Up, Down))?;
    let pm_mp = el((Down, Up, Up, Down))?;
    let mp_pm = el((Up, Down, Down, Up))?;
    let mp_mp = el((Down, Up, Down, Up))?;
    Ok((pm_pm - pm_mp - mp_pm + mp_mp) * 0.5)
}

/// |(p_in - p_out)_mu ubar_out gamma^mu u_in| for one vertex; vanishes for
/// on-shell spinors of equal energy.
pub fn current_conservation_residual(
    p_in: Vec3,
    s_in: Spin,
    p_out: Vec3,
    s_out: Spin,
    m: f64,
) -> Result<f64> {
    let g = GammaSet::dirac();
    let u_in = dirac_spinor(p_in, s_in, m)?;
    let u_out = dirac_spinor(p_out, s_out, m)?;
    let j = current(&g, &u_out, &u_in);
    let e_in = p_in.norm().hypot(m);
    let e_out = p_out.norm().hypot(m);
    let t = p_in - p_out;
    // Lower-index transfer: (E_in - E_out, -t).
    let t_lower = [e_in - e_out, -t.x, -t.y, -t.z];
    Ok(t_lower
        .iter()
        .zip(j.iter())
        .map(|(a, b)| b * *a)
        .sum::<Complex64>()
        .norm())
}

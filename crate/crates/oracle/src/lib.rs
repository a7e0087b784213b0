//! Slow, literal reference evaluations for cross-checking `pwshift-core`.
//!
//! Nothing here calls into the main crate. Two-spin operators are dense 4x4
//! Kronecker products of hand-written Pauli matrices; Dirac currents are
//! explicit index loops over hand-written gamma matrices. Only tests use it.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

pub type C = Complex64;
pub type V3 = [f64; 3];
type M2 = [[C; 2]; 2];
type M4 = [[C; 4]; 4];

const Z: C = C::new(0.0, 0.0);
const R: C = C::new(1.0, 0.0);
const IM: C = C::new(0.0, 1.0);

fn pauli() -> [M2; 3] {
    [
        [[Z, R], [R, Z]],
        [[Z, -IM], [IM, Z]],
        [[R, Z], [Z, -R]],
    ]
}

fn id2() -> M2 {
    [[R, Z], [Z, R]]
}

fn dot_sigma(v: V3) -> M2 {
    let s = pauli();
    let mut out = [[Z; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            out[a][b] = s[0][a][b] * v[0] + s[1][a][b] * v[1] + s[2][a][b] * v[2];
        }
    }
    out
}

fn kron(a: &M2, b: &M2) -> M4 {
    let mut out = [[Z; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn add4(a: &mut M4, b: &M4, c: C) {
    for i in 0..4 {
        for j in 0..4 {
            a[i][j] += b[i][j] * c;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnknownTerm(pub String);

impl fmt::Display for UnknownTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown spin term kind '{}'", self.0)
    }
}

impl std::error::Error for UnknownTerm {}

/// One term of a spin operator, named by a string kind:
/// `identity`, `sigma1.a`, `sigma2.a`, `sigma1.sigma2`, `product` (uses
/// `a` and `b`), `sum.a`.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleTerm {
    pub kind: String,
    pub coeff: C,
    pub a: V3,
    pub b: V3,
}

impl OracleTerm {
    pub fn new(kind: &str, coeff: C, a: V3, b: V3) -> Self {
        Self {
            kind: kind.to_string(),
            coeff,
            a,
            b,
        }
    }

    pub fn scalar(kind: &str, coeff: f64) -> Self {
        Self::new(kind, C::new(coeff, 0.0), [0.0; 3], [0.0; 3])
    }

    fn matrix(&self) -> Result<M4, UnknownTerm> {
        let m = match self.kind.as_str() {
            "identity" => kron(&id2(), &id2()),
            "sigma1.a" => kron(&dot_sigma(self.a), &id2()),
            "sigma2.a" => kron(&id2(), &dot_sigma(self.a)),
            "sigma1.sigma2" => {
                let s = pauli();
                let mut out = [[Z; 4]; 4];
                for si in &s {
                    add4(&mut out, &kron(si, si), R);
                }
                out
            }
            "product" => kron(&dot_sigma(self.a), &dot_sigma(self.b)),
            "sum.a" => {
                let mut out = kron(&dot_sigma(self.a), &id2());
                add4(&mut out, &kron(&id2(), &dot_sigma(self.a)), R);
                out
            }
            other => return Err(UnknownTerm(other.to_string())),
        };
        Ok(m)
    }
}

/// Dense matrix of a term list.
pub fn oracle_operator(terms: &[OracleTerm]) -> Result<M4, UnknownTerm> {
    let mut out = [[Z; 4]; 4];
    for t in terms {
        add4(&mut out, &t.matrix()?, t.coeff);
    }
    Ok(out)
}

/// Basis order: |uu>, |ud>, |du>, |dd>.
pub fn singlet_vector() -> [C; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [Z, C::new(h, 0.0), C::new(-h, 0.0), Z]
}

/// <bra| sum of terms |ket>.
pub fn oracle_spin_sandwich(terms: &[OracleTerm], bra: &[C; 4], ket: &[C; 4]) -> Result<C, UnknownTerm> {
    let m = oracle_operator(terms)?;
    let mut acc = Z;
    for i in 0..4 {
        for j in 0..4 {
            acc += bra[i].conj() * m[i][j] * ket[j];
        }
    }
    Ok(acc)
}

fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn neg(a: V3) -> V3 {
    [-a[0], -a[1], -a[2]]
}

/// CoM momenta: p along z, q in the xz-plane at cos(theta) = x.
pub fn com_momenta(k: f64, x: f64) -> (V3, V3) {
    let s = (1.0 - x * x).max(0.0).sqrt();
    ([0.0, 0.0, k], [k * s, 0.0, k * x])
}

/// Term list of the first (`exchange = false`) or second reduced operator.
/// `full` selects the gamma^mu vertex, otherwise gamma^0 only.
pub fn oracle_operator_terms(m: f64, p: V3, q: V3, full: bool, exchange: bool) -> Vec<OracleTerm> {
    let e = (dot(p, p) + m * m).sqrt();
    let c2 = 1.0 / ((e + m) * (e + m));
    let c4 = c2 * c2;
    let sg = if exchange { -1.0 } else { 1.0 };
    let qp = dot(q, p);
    let qxp = cross(q, p);
    let zero = [0.0; 3];
    let mut t = vec![OracleTerm::scalar("identity", 1.0)];
    t.push(OracleTerm::scalar("identity", sg * 2.0 * qp * c2));
    let so = if full { 3.0 } else { 1.0 };
    t.push(OracleTerm::new("sum.a", C::new(0.0, sg * so * c2), qxp, zero));
    if full {
        let q2 = dot(q, q);
        let p2 = dot(p, p);
        t.push(OracleTerm::scalar("identity", q2 * c2));
        t.push(OracleTerm::scalar("sigma1.sigma2", -q2 * c2));
        t.push(OracleTerm::new("product", C::new(c2, 0.0), q, q));
        t.push(OracleTerm::scalar("identity", sg * 2.0 * qp * c2));
        t.push(OracleTerm::scalar("sigma1.sigma2", sg * 2.0 * qp * c2));
        t.push(OracleTerm::new("product", C::new(-sg * c2, 0.0), p, q));
        t.push(OracleTerm::new("product", C::new(-sg * c2, 0.0), q, p));
        t.push(OracleTerm::scalar("identity", p2 * c2));
        t.push(OracleTerm::scalar("sigma1.sigma2", -p2 * c2));
        t.push(OracleTerm::new("product", C::new(c2, 0.0), p, p));
    }
    // (qp + i w.s1)(qp + i w.s2) = qp^2 + i qp w.(s1 + s2) - (w.s1)(w.s2)
    t.push(OracleTerm::scalar("identity", c4 * qp * qp));
    t.push(OracleTerm::new("sum.a", C::new(0.0, c4 * qp), qxp, zero));
    t.push(OracleTerm::new("product", C::new(-c4, 0.0), qxp, qxp));
    t
}

/// e^2 with alpha_em = 1/137.035999.
pub fn e_squared() -> f64 {
    4.0 * PI / 137.035999
}

/// Singlet operator-sandwich amplitude at (m, k, x):
/// -e^2 [<M1>/D_d - eta <M2>/D_e], eta = +1 (plain) or -1 (spin exchange).
pub fn oracle_method_a_amplitude(m: f64, k: f64, x: f64, alpha: f64, full: bool, spin_exchange: bool) -> C {
    let (p, q) = com_momenta(k, x);
    let s = singlet_vector();
    let m1 = oracle_spin_sandwich(&oracle_operator_terms(m, p, q, full, false), &s, &s).unwrap();
    let m2 = oracle_spin_sandwich(&oracle_operator_terms(m, p, q, full, true), &s, &s).unwrap();
    let dd = -(2.0 * k * k * (1.0 - x) + alpha * alpha);
    let de = -(2.0 * k * k * (1.0 + x) + alpha * alpha);
    let eta = if spin_exchange { -1.0 } else { 1.0 };
    -(m1 / dd - m2 * eta / de) * e_squared()
}

/// Dirac-representation gamma matrices, written out entry by entry.
pub fn oracle_gammas() -> [M4; 4] {
    let mut g = [[[Z; 4]; 4]; 4];
    g[0][0][0] = R;
    g[0][1][1] = R;
    g[0][2][2] = -R;
    g[0][3][3] = -R;
    // gamma^1
    g[1][0][3] = R;
    g[1][1][2] = R;
    g[1][2][1] = -R;
    g[1][3][0] = -R;
    // gamma^2
    g[2][0][3] = -IM;
    g[2][1][2] = IM;
    g[2][2][1] = IM;
    g[2][3][0] = -IM;
    // gamma^3
    g[3][0][2] = R;
    g[3][1][3] = -R;
    g[3][2][0] = -R;
    g[3][3][1] = R;
    g
}

/// u(p, s) normalized to u^dagger u = 1; `up` selects s_z = +1/2.
pub fn oracle_spinor(p: V3, up: bool, m: f64) -> [C; 4] {
    let e = (dot(p, p) + m * m).sqrt();
    let n = ((e + m) / (2.0 * e)).sqrt();
    let chi = if up { [R, Z] } else { [Z, R] };
    let sp = dot_sigma(p);
    let mut lower = [Z; 2];
    for a in 0..2 {
        for b in 0..2 {
            lower[a] += sp[a][b] * chi[b] / (e + m);
        }
    }
    [chi[0] * n, chi[1] * n, lower[0] * n, lower[1] * n]
}

/// ubar(a) gamma^mu u(b) for each mu.
pub fn oracle_current(a: &[C; 4], b: &[C; 4]) -> [C; 4] {
    let g = oracle_gammas();
    let g0 = [1.0, 1.0, -1.0, -1.0];
    let mut j = [Z; 4];
    for mu in 0..4 {
        for r in 0..4 {
            for c in 0..4 {
                j[mu] += a[r].conj() * g0[r] * g[mu][r][c] * b[c];
            }
        }
    }
    j
}

/// Direct and exchange numerators for spin labels (s1, s2, s3, s4), true
/// meaning up; incoming p, -p and outgoing q, -q. With `full = false` only
/// mu = 0 is summed.
pub fn oracle_bilinear_contraction(
    m: f64,
    k: f64,
    x: f64,
    labels: [bool; 4],
    full: bool,
) -> (C, C) {
    let (p, q) = com_momenta(k, x);
    let u1 = oracle_spinor(p, labels[0], m);
    let u2 = oracle_spinor(neg(p), labels[1], m);
    let u3 = oracle_spinor(q, labels[2], m);
    let u4 = oracle_spinor(neg(q), labels[3], m);
    let metric = [1.0, -1.0, -1.0, -1.0];
    let top = if full { 4 } else { 1 };
    let contract = |ja: [C; 4], jb: [C; 4]| {
        let mut s = Z;
        for mu in 0..top {
            s += ja[mu] * jb[mu] * metric[mu];
        }
        s
    };
    let direct = contract(oracle_current(&u3, &u1), oracle_current(&u4, &u2));
    let exchange = contract(oracle_current(&u3, &u2), oracle_current(&u4, &u1));
    (direct, exchange)
}

/// Polarized element with both channels.
pub fn oracle_polarized_element(m: f64, k: f64, x: f64, labels: [bool; 4], alpha: f64, full: bool) -> C {
    let (d, e) = oracle_bilinear_contraction(m, k, x, labels, full);
    let dd = -(2.0 * k * k * (1.0 - x) + alpha * alpha);
    let de = -(2.0 * k * k * (1.0 + x) + alpha * alpha);
    -(d / dd - e / de) * e_squared()
}

/// Comparison of a primary value against an oracle value.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub case_id: String,
    pub primary: C,
    pub oracle: C,
    pub abs_diff: f64,
    pub rel_diff: f64,
    pub pass: bool,
}

impl OracleReport {
    pub const ABS_FLOOR: f64 = 1e-14;

    pub fn compare(case_id: impl Into<String>, primary: C, oracle: C, tol: f64) -> Self {
        let abs_diff = (primary - oracle).norm();
        let denom = oracle.norm().max(primary.norm());
        let rel_diff = if denom > 0.0 { abs_diff / denom } else { 0.0 };
        Self {
            case_id: case_id.into(),
            primary,
            oracle,
            abs_diff,
            rel_diff,
            pass: rel_diff <= tol || abs_diff <= Self::ABS_FLOOR,
        }
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: primary {} oracle {} (abs {:.2e}, rel {:.2e})",
            if self.pass { "ok" } else { "MISMATCH" },
            self.case_id,
            self.primary,
            self.oracle,
            self.abs_diff,
            self.rel_diff
        )
    }
}

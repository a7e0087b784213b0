//! Operator-form tree amplitude for unpolarized total-spin states (method A).
//!
//! The direct and exchange spinor products of the Moller amplitude reduce in
//! the CoM frame to two-spin operators `M1` and `M2`:
//!
//! ```text
//! M1 = 1 + c2 [ 2q.p + 3i(q x p).(s1+s2) + q^2(1 - s1.s2) + (q.s1)(q.s2)
//!               + 2q.p(1 + s1.s2) - (p.s1)(q.s2) - (q.s1)(p.s2)
//!               + p^2(1 - s1.s2) + (p.s1)(p.s2) ]
//!        + c4 [q.p + i(q x p).s1][q.p + i(q x p).s2]
//! ```
//!
//! with `c2 = (E+m)^-2`, `c4 = (E+m)^-4` and `E` the single-electron energy.
//! `M2` flips the sign of the `q.p`, spin-orbit and cross terms. Keeping only
//! the time-like vertex drops the magnetic terms and turns `3i` into `i`.
//!
//! The full amplitude is
//! `-e^2 [<M1>/D_direct - eta <M2>/D_exchange]` with screened denominators.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{screened_denominator, Channel, ComKinematics, PhysicsConstants};
use crate::spin_algebra::{
    coupled_state, factorized_product, pauli_term, sandwich, singlet_expectation,
    singlet_product_expectation, PauliTerm, TwoSpinOperator,
};

/// Which gamma-matrix components the vertices keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    FullGammaMu,
    /// gamma_0 only: charge-charge interaction, no magnetic moments.
    Gamma0Only,
}

/// How the exchange term couples to the total-spin state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExchangeSpinTreatment {
    /// Sandwich `M2` between the same states as `M1`.
    PlainSandwich,
    /// Additionally apply the spin-exchange eigenvalue (-1 singlet, +1 triplet).
    ExchangeOperator,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channels {
    Both,
    /// Direct diagram only. For oracle comparisons.
    DirectOnly,
}

/// One of the eleven operator terms of `M1`/`M2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AmplitudeTerm {
    Identity = 0,
    ScalarQp = 1,
    SpinOrbit = 2,
    QSquared = 3,
    QQ = 4,
    QpSpinSpin = 5,
    CrossPQ = 6,
    CrossQP = 7,
    PSquared = 8,
    PP = 9,
    Quartic = 10,
}

impl AmplitudeTerm {
    pub const ALL: [AmplitudeTerm; 11] = [
        AmplitudeTerm::Identity,
        AmplitudeTerm::ScalarQp,
        AmplitudeTerm::SpinOrbit,
        AmplitudeTerm::QSquared,
        AmplitudeTerm::QQ,
        AmplitudeTerm::QpSpinSpin,
        AmplitudeTerm::CrossPQ,
        AmplitudeTerm::CrossQP,
        AmplitudeTerm::PSquared,
        AmplitudeTerm::PP,
        AmplitudeTerm::Quartic,
    ];

    pub fn bit(self) -> u16 {
        1 << (self as u16)
    }

    pub fn label(self) -> &'static str {
        match self {
            AmplitudeTerm::Identity => "1",
            AmplitudeTerm::ScalarQp => "2q.p",
            AmplitudeTerm::SpinOrbit => "i(qxp).(s1+s2)",
            AmplitudeTerm::QSquared => "q^2(1-s1.s2)",
            AmplitudeTerm::QQ => "(q.s1)(q.s2)",
            AmplitudeTerm::QpSpinSpin => "2q.p(1+s1.s2)",
            AmplitudeTerm::CrossPQ => "(p.s1)(q.s2)",
            AmplitudeTerm::CrossQP => "(q.s1)(p.s2)",
            AmplitudeTerm::PSquared => "p^2(1-s1.s2)",
            AmplitudeTerm::PP => "(p.s1)(p.s2)",
            AmplitudeTerm::Quartic => "[q.p+i(qxp).s1][q.p+i(qxp).s2]",
        }
    }

    /// Terms that survive the gamma_0 reduction.
    pub fn in_gamma0(self) -> bool {
        matches!(
            self,
            AmplitudeTerm::Identity
                | AmplitudeTerm::ScalarQp
                | AmplitudeTerm::SpinOrbit
                | AmplitudeTerm::Quartic
        )
    }
}

/// Bit set selecting which [`AmplitudeTerm`]s contribute; bit i = term i.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermMask(u16);

impl TermMask {
    pub const ALL: TermMask = TermMask(0x7ff);

    pub fn new(bits: u32) -> Result<Self> {
        if bits > 0x7ff {
            return Err(Error::InvalidTermMask(bits));
        }
        Ok(TermMask(bits as u16))
    }

    pub fn only(terms: &[AmplitudeTerm]) -> Self {
        TermMask(terms.iter().fold(0, |acc, t| acc | t.bit()))
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn contains(self, t: AmplitudeTerm) -> bool {
        self.0 & t.bit() != 0
    }
}

impl Default for TermMask {
    fn default() -> Self {
        TermMask::ALL
    }
}

/// Full specification of how the tree amplitude is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AmplitudeMode {
    pub vertex: Vertex,
    pub exchange: ExchangeSpinTreatment,
    pub channels: Channels,
    pub terms: TermMask,
}

impl Default for AmplitudeMode {
    fn default() -> Self {
        Self {
            vertex: Vertex::FullGammaMu,
            exchange: ExchangeSpinTreatment::PlainSandwich,
            channels: Channels::Both,
            terms: TermMask::ALL,
        }
    }
}

impl AmplitudeMode {
    pub fn new(vertex: Vertex, exchange: ExchangeSpinTreatment, channels: Channels) -> Self {
        Self {
            vertex,
            exchange,
            channels,
            terms: TermMask::ALL,
        }
    }

    pub fn with_terms(mut self, terms: TermMask) -> Self {
        self.terms = terms;
        self
    }
}

/// `full/plain/both`, with `/terms=0x...` appended when the mask is partial.
impl fmt::Display for AmplitudeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = match self.vertex {
            Vertex::FullGammaMu => "full",
            Vertex::Gamma0Only => "gamma0",
        };
        let e = match self.exchange {
            ExchangeSpinTreatment::PlainSandwich => "plain",
            ExchangeSpinTreatment::ExchangeOperator => "exchange",
        };
        let c = match self.channels {
            Channels::Both => "both",
            Channels::DirectOnly => "direct",
        };
        write!(f, "{v}/{e}/{c}")?;
        if self.terms != TermMask::ALL {
            write!(f, "/terms={:#05x}", self.terms.bits())?;
        }
        Ok(())
    }
}

impl FromStr for Vertex {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Vertex::FullGammaMu),
            "gamma0" => Ok(Vertex::Gamma0Only),
            _ => Err(Error::Invalid(format!("unknown vertex '{s}' (full|gamma0)"))),
        }
    }
}

impl FromStr for ExchangeSpinTreatment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(ExchangeSpinTreatment::PlainSandwich),
            "exchange" => Ok(ExchangeSpinTreatment::ExchangeOperator),
            _ => Err(Error::Invalid(format!(
                "unknown exchange treatment '{s}' (plain|exchange)"
            ))),
        }
    }
}

impl FromStr for Channels {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "both" => Ok(Channels::Both),
            "direct" => Ok(Channels::DirectOnly),
            _ => Err(Error::Invalid(format!("unknown channels '{s}' (both|direct)"))),
        }
    }
}

impl FromStr for AmplitudeMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('/').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(Error::Invalid(format!("malformed mode '{s}'")));
        }
        let mut mode = AmplitudeMode::new(parts[0].parse()?, parts[1].parse()?, parts[2].parse()?);
        if let Some(t) = parts.get(3) {
            let hex = t
                .strip_prefix("terms=0x")
                .ok_or_else(|| Error::Invalid(format!("malformed term mask in '{s}'")))?;
            let bits = u32::from_str_radix(hex, 16)
                .map_err(|_| Error::Invalid(format!("malformed term mask in '{s}'")))?;
            mode.terms = TermMask::new(bits)?;
        }
        Ok(mode)
    }
}

impl TryFrom<String> for AmplitudeMode {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<AmplitudeMode> for String {
    fn from(m: AmplitudeMode) -> String {
        m.to_string()
    }
}

/// Which of the two operators is being built.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Diagram {
    M1,
    M2,
}

impl Diagram {
    fn sign(self) -> f64 {
        match self {
            Diagram::M1 => 1.0,
            Diagram::M2 => -1.0,
        }
    }
}

enum Shape {
    Linear(Vec<(Complex64, PauliTerm)>),
    /// c * (a + i b.s1)(a + i b.s2)
    Factorized { c: f64, a: f64, b: crate::vec3::Vec3 },
}

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn term_shape(kin: &ComKinematics, vertex: Vertex, diagram: Diagram, t: AmplitudeTerm) -> Shape {
    use AmplitudeTerm::*;
    use PauliTerm::*;
    let s = diagram.sign();
    let (p, q) = (kin.p_vec, kin.q_vec);
    let qp = kin.p_dot_q();
    let qxp = kin.q_cross_p();
    let epm = kin.e_single + kin.m;
    let c2 = 1.0 / (epm * epm);
    let c4 = c2 * c2;
    let spin_orbit = match vertex {
        Vertex::FullGammaMu => 3.0,
        Vertex::Gamma0Only => 1.0,
    };
    match t {
        AmplitudeTerm::Identity => Shape::Linear(vec![(re(1.0), PauliTerm::Identity)]),
        ScalarQp => Shape::Linear(vec![(re(s * 2.0 * qp * c2), PauliTerm::Identity)]),
        SpinOrbit => Shape::Linear(vec![(
            Complex64::new(0.0, s * spin_orbit * c2),
            SumSigma(qxp),
        )]),
        QSquared => {
            let v = q.norm_sq() * c2;
            Shape::Linear(vec![(re(v), PauliTerm::Identity), (re(-v), Sigma1DotSigma2)])
        }
        QQ => Shape::Linear(vec![(re(c2), Product(q, q))]),
        QpSpinSpin => {
            let v = s * 2.0 * qp * c2;
            Shape::Linear(vec![(re(v), PauliTerm::Identity), (re(v), Sigma1DotSigma2)])
        }
        CrossPQ => Shape::Linear(vec![(re(-s * c2), Product(p, q))]),
        CrossQP => Shape::Linear(vec![(re(-s * c2), Product(q, p))]),
        PSquared => {
            let v = p.norm_sq() * c2;
            Shape::Linear(vec![(re(v), PauliTerm::Identity), (re(-v), Sigma1DotSigma2)])
        }
        PP => Shape::Linear(vec![(re(c2), Product(p, p))]),
        Quartic => Shape::Factorized {
            c: c4,
            a: qp,
            b: qxp,
        },
    }
}

fn active_terms(vertex: Vertex, mask: TermMask) -> impl Iterator<Item = AmplitudeTerm> {
    AmplitudeTerm::ALL
        .into_iter()
        .filter(move |t| mask.contains(*t) && (vertex == Vertex::FullGammaMu || t.in_gamma0()))
}

/// One term of `M1` or `M2` as a matrix.
pub fn term_operator(
    kin: &ComKinematics,
    vertex: Vertex,
    diagram: Diagram,
    term: AmplitudeTerm,
) -> TwoSpinOperator {
    if vertex == Vertex::Gamma0Only && !term.in_gamma0() {
        return TwoSpinOperator::zero();
    }
    match term_shape(kin, vertex, diagram, term) {
        Shape::Linear(parts) => parts
            .into_iter()
            .fold(TwoSpinOperator::zero(), |acc, (c, kind)| acc + pauli_term(kind, c)),
        Shape::Factorized { c, a, b } => factorized_product(a, b).scaled(re(c)),
    }
}

fn diagram_operator(
    kin: &ComKinematics,
    vertex: Vertex,
    mask: TermMask,
    diagram: Diagram,
) -> TwoSpinOperator {
    active_terms(vertex, mask).fold(TwoSpinOperator::zero(), |acc, t| {
        acc + term_operator(kin, vertex, diagram, t)
    })
}

/// Direct-diagram operator `M1`.
pub fn m1_operator(kin: &ComKinematics, vertex: Vertex, mask: TermMask) -> TwoSpinOperator {
    diagram_operator(kin, vertex, mask, Diagram::M1)
}

/// Exchange-diagram operator `M2`.
pub fn m2_operator(kin: &ComKinematics, vertex: Vertex, mask: TermMask) -> TwoSpinOperator {
    diagram_operator(kin, vertex, mask, Diagram::M2)
}

/// Singlet expectation of `M1`/`M2` from closed-form contractions, without
/// building any matrix. Cross-check for the matrix path.
pub fn singlet_sandwich_closed_form(
    kin: &ComKinematics,
    vertex: Vertex,
    mask: TermMask,
    diagram: Diagram,
) -> f64 {
    active_terms(vertex, mask)
        .map(|t| match term_shape(kin, vertex, diagram, t) {
            Shape::Linear(parts) => parts
                .into_iter()
                .map(|(c, kind)| {
                    // Every singlet contraction is real; imaginary
                    // coefficients only multiply vanishing ones.
                    let e = singlet_expectation(kind);
                    if e == 0.0 {
                        0.0
                    } else {
                        c.re * e
                    }
                })
                .sum::<f64>(),
            Shape::Factorized { c, a, b } => c * singlet_product_expectation(a, b),
        })
        .sum()
}

fn exchange_eta(exchange: ExchangeSpinTreatment, s: u32) -> f64 {
    match exchange {
        ExchangeSpinTreatment::PlainSandwich => 1.0,
        ExchangeSpinTreatment::ExchangeOperator => {
            if s == 0 {
                -1.0
            } else {
                1.0
            }
        }
    }
}

/// `<s m_s'| M |s m_s>` for the antisymmetrized, screened tree amplitude.
pub fn method_a_amplitude(
    kin: &ComKinematics,
    alpha: f64,
    mode: &AmplitudeMode,
    s: u32,
    m_s: i32,
    m_s_prime: i32,
) -> Result<Complex64> {
    let ket = coupled_state(s, m_s)?;
    let bra = coupled_state(s, m_s_prime)?;
    let e2 = PhysicsConstants::default().e_squared;

    let d_direct = screened_denominator(kin, Channel::Direct, alpha)?;
    let m1 = sandwich(&bra, &m1_operator(kin, mode.vertex, mode.terms), &ket);
    let mut bracket = m1 / d_direct;
    if mode.channels == Channels::Both {
        let d_exchange = screened_denominator(kin, Channel::Exchange, alpha)?;
        let m2 = sandwich(&bra, &m2_operator(kin, mode.vertex, mode.terms), &ket);
        bracket -= m2 * (exchange_eta(mode.exchange, s) / d_exchange);
    }
    Ok(bracket * -e2)
}

/// Singlet amplitude assembled from the closed-form contractions.
pub fn method_a_singlet_closed_form(
    kin: &ComKinematics,
    alpha: f64,
    mode: &AmplitudeMode,
) -> Result<f64> {
    let e2 = PhysicsConstants::default().e_squared;
    let d_direct = screened_denominator(kin, Channel::Direct, alpha)?;
    let m1 = singlet_sandwich_closed_form(kin, mode.vertex, mode.terms, Diagram::M1);
    let mut bracket = m1 / d_direct;
    if mode.channels == Channels::Both {
        let d_exchange = screened_denominator(kin, Channel::Exchange, alpha)?;
        let m2 = singlet_sandwich_closed_form(kin, mode.vertex, mode.terms, Diagram::M2);
        bracket -= exchange_eta(mode.exchange, 0) * m2 / d_exchange;
    }
    Ok(-e2 * bracket)
}

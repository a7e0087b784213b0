//! Two-electron Pauli spin space.
//!
//! The product basis is ordered `(|++>, |+->, |-+>, |-->)` with particle 1 as
//! the left tensor factor, so basis index = 2 * s1 + s2 with `+` = 0 and
//! `-` = 1. Spin labels refer to the z axis.
//!
//! Two evaluation routes exist: explicit 4x4 matrices ([`TwoSpinOperator`],
//! [`sandwich`]) and closed-form singlet contractions ([`singlet_expectation`],
//! [`singlet_product_expectation`]). The matrix route is authoritative; the
//! contractions exist to cross-check it.

use std::ops::{Add, AddAssign, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::vec3::Vec3;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// z-axis spin projection of one electron.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    pub fn flipped(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }

    /// +1 for up, -1 for down (twice the projection).
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }
}

type Mat2 = [[Complex64; 2]; 2];

fn sigma_dot(v: Vec3) -> Mat2 {
    [
        [Complex64::new(v.z, 0.0), Complex64::new(v.x, -v.y)],
        [Complex64::new(v.x, v.y), Complex64::new(-v.z, 0.0)],
    ]
}

const ID2: Mat2 = [[ONE, ZERO], [ZERO, ONE]];

fn kron(a: &Mat2, b: &Mat2) -> [[Complex64; 4]; 4] {
    let mut m = [[ZERO; 4]; 4];
    for (i1, row_a) in a.iter().enumerate() {
        for (j1, &aij) in row_a.iter().enumerate() {
            for (i2, row_b) in b.iter().enumerate() {
                for (j2, &bij) in row_b.iter().enumerate() {
                    m[2 * i1 + i2][2 * j1 + j2] = aij * bij;
                }
            }
        }
    }
    m
}

/// A state of two spin-1/2 particles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoSpinState {
    pub amplitudes: [Complex64; 4],
}

impl TwoSpinState {
    pub fn new(amplitudes: [Complex64; 4]) -> Self {
        Self { amplitudes }
    }

    /// Product basis state |s1 s2>.
    pub fn basis(s1: Spin, s2: Spin) -> Self {
        let mut amplitudes = [ZERO; 4];
        amplitudes[2 * s1.index() + s2.index()] = ONE;
        Self { amplitudes }
    }

    pub fn singlet() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_real([0.0, h, -h, 0.0])
    }

    fn from_real(a: [f64; 4]) -> Self {
        Self {
            amplitudes: a.map(|v| Complex64::new(v, 0.0)),
        }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &TwoSpinState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

impl Add for TwoSpinState {
    type Output = TwoSpinState;
    fn add(self, o: TwoSpinState) -> TwoSpinState {
        let mut a = self.amplitudes;
        for (x, y) in a.iter_mut().zip(o.amplitudes) {
            *x += y;
        }
        TwoSpinState::new(a)
    }
}

impl Mul<Complex64> for TwoSpinState {
    type Output = TwoSpinState;
    fn mul(self, c: Complex64) -> TwoSpinState {
        TwoSpinState::new(self.amplitudes.map(|a| a * c))
    }
}

/// Normalized total-spin eigenstate |s m_s> of two electrons.
pub fn coupled_state(s: u32, m_s: i32) -> Result<TwoSpinState> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match (s, m_s) {
        (0, 0) => Ok(TwoSpinState::singlet()),
        (1, 1) => Ok(TwoSpinState::from_real([1.0, 0.0, 0.0, 0.0])),
        (1, 0) => Ok(TwoSpinState::from_real([0.0, h, h, 0.0])),
        (1, -1) => Ok(TwoSpinState::from_real([0.0, 0.0, 0.0, 1.0])),
        _ => Err(Error::InvalidProjection {
            j: s as f64,
            m: m_s as f64,
        }),
    }
}

/// Operator on the two-spin space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoSpinOperator {
    pub matrix: [[Complex64; 4]; 4],
}

impl Default for TwoSpinOperator {
    fn default() -> Self {
        Self::zero()
    }
}

impl TwoSpinOperator {
    pub fn zero() -> Self {
        Self {
            matrix: [[ZERO; 4]; 4],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.matrix[i][i] = ONE;
        }
        m
    }

    pub fn scaled(mut self, c: Complex64) -> Self {
        for row in self.matrix.iter_mut() {
            for v in row.iter_mut() {
                *v *= c;
            }
        }
        self
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.matrix[i][j] = self.matrix[j][i].conj();
            }
        }
        out
    }

    /// Largest entry-wise deviation from Hermiticity.
    pub fn hermiticity_residual(&self) -> f64 {
        let adj = self.adjoint();
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.matrix[i][j] - adj.matrix[i][j]).norm());
            }
        }
        worst
    }

    pub fn apply(&self, ket: &TwoSpinState) -> TwoSpinState {
        let mut out = [ZERO; 4];
        for (o, row) in out.iter_mut().zip(self.matrix.iter()) {
            *o = row.iter().zip(ket.amplitudes.iter()).map(|(m, a)| m * a).sum();
        }
        TwoSpinState::new(out)
    }
}

impl Add for TwoSpinOperator {
    type Output = TwoSpinOperator;
    fn add(mut self, o: TwoSpinOperator) -> TwoSpinOperator {
        self += o;
        self
    }
}

impl AddAssign for TwoSpinOperator {
    fn add_assign(&mut self, o: TwoSpinOperator) {
        for (row, orow) in self.matrix.iter_mut().zip(o.matrix.iter()) {
            for (v, ov) in row.iter_mut().zip(orow.iter()) {
                *v += ov;
            }
        }
    }
}

impl Sub for TwoSpinOperator {
    type Output = TwoSpinOperator;
    fn sub(self, o: TwoSpinOperator) -> TwoSpinOperator {
        self + o.scaled(-ONE)
    }
}

impl Mul for TwoSpinOperator {
    type Output = TwoSpinOperator;
    fn mul(self, o: TwoSpinOperator) -> TwoSpinOperator {
        let mut out = TwoSpinOperator::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.matrix[i][j] = (0..4).map(|k| self.matrix[i][k] * o.matrix[k][j]).sum();
            }
        }
        out
    }
}

/// Operator shapes that appear in the two-electron Breit-type expansions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PauliTerm {
    Identity,
    /// a . sigma_1
    DotSigma1(Vec3),
    /// a . sigma_2
    DotSigma2(Vec3),
    /// sigma_1 . sigma_2
    Sigma1DotSigma2,
    /// (a . sigma_1)(b . sigma_2)
    Product(Vec3, Vec3),
    /// c . (sigma_1 + sigma_2)
    SumSigma(Vec3),
}

/// `coefficient` times the operator named by `kind`.
pub fn pauli_term(kind: PauliTerm, coefficient: Complex64) -> TwoSpinOperator {
    let matrix = match kind {
        PauliTerm::Identity => TwoSpinOperator::identity().matrix,
        PauliTerm::DotSigma1(a) => kron(&sigma_dot(a), &ID2),
        PauliTerm::DotSigma2(a) => kron(&ID2, &sigma_dot(a)),
        PauliTerm::Sigma1DotSigma2 => {
            let mut acc = TwoSpinOperator::zero();
            for e in [Vec3::X, Vec3::Y, Vec3::Z] {
                acc += TwoSpinOperator {
                    matrix: kron(&sigma_dot(e), &sigma_dot(e)),
                };
            }
            acc.matrix
        }
        PauliTerm::Product(a, b) => kron(&sigma_dot(a), &sigma_dot(b)),
        PauliTerm::SumSigma(c) => {
            (TwoSpinOperator {
                matrix: kron(&sigma_dot(c), &ID2),
            } + TwoSpinOperator {
                matrix: kron(&ID2, &sigma_dot(c)),
            })
            .matrix
        }
    };
    TwoSpinOperator { matrix }.scaled(coefficient)
}

/// <bra| op |ket>.
pub fn sandwich(bra: &TwoSpinState, op: &TwoSpinOperator, ket: &TwoSpinState) -> Complex64 {
    bra.inner(&op.apply(ket))
}

/// Closed-form <singlet| term |singlet>.
pub fn singlet_expectation(kind: PauliTerm) -> f64 {
    match kind {
        PauliTerm::Identity => 1.0,
        PauliTerm::DotSigma1(_) | PauliTerm::DotSigma2(_) | PauliTerm::SumSigma(_) => 0.0,
        PauliTerm::Sigma1DotSigma2 => -3.0,
        PauliTerm::Product(a, b) => -a.dot(b),
    }
}

/// Closed-form <singlet| (a + i b.sigma_1)(a + i b.sigma_2) |singlet> = a^2 + b.b.
pub fn singlet_product_expectation(a: f64, b: Vec3) -> f64 {
    a * a + b.norm_sq()
}

/// (a + i b.sigma_1)(a + i b.sigma_2) as a matrix.
pub fn factorized_product(a: f64, b: Vec3) -> TwoSpinOperator {
    let left = pauli_term(PauliTerm::Identity, Complex64::new(a, 0.0))
        + pauli_term(PauliTerm::DotSigma1(b), I);
    let right = pauli_term(PauliTerm::Identity, Complex64::new(a, 0.0))
        + pauli_term(PauliTerm::DotSigma2(b), I);
    left * right
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn sigma1_dot_sigma2_splits_triplet_and_singlet() {
        let op = pauli_term(PauliTerm::Sigma1DotSigma2, ONE);
        let singlet = coupled_state(0, 0).unwrap();
        let image = op.apply(&singlet);
        for (a, b) in image.amplitudes.iter().zip(singlet.amplitudes.iter()) {
            assert!(close(*a, b * -3.0));
        }
        for m in -1..=1 {
            let t = coupled_state(1, m).unwrap();
            let image = op.apply(&t);
            for (a, b) in image.amplitudes.iter().zip(t.amplitudes.iter()) {
                assert!(close(*a, *b));
            }
        }
    }

    #[test]
    fn dot_sigma1_z_is_sigma_z_tensor_identity() {
        let op = pauli_term(PauliTerm::DotSigma1(Vec3::Z), ONE);
        let diag = [1.0, 1.0, -1.0, -1.0];
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { c(diag[i]) } else { ZERO };
                assert_eq!(op.matrix[i][j], expect);
            }
        }
    }

    #[test]
    fn product_x_x_is_sigma_x_tensor_sigma_x() {
        let op = pauli_term(PauliTerm::Product(Vec3::X, Vec3::X), ONE);
        // sigma_x (x) sigma_x is the anti-diagonal of ones.
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i + j == 3 { ONE } else { ZERO };
                assert_eq!(op.matrix[i][j], expect);
            }
        }
    }

    #[test]
    fn coupled_states() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(
            coupled_state(0, 0).unwrap(),
            TwoSpinState::from_real([0.0, h, -h, 0.0])
        );
        assert_eq!(
            coupled_state(1, 1).unwrap(),
            TwoSpinState::basis(Spin::Up, Spin::Up)
        );
        assert_eq!(
            coupled_state(1, 0).unwrap(),
            TwoSpinState::from_real([0.0, h, h, 0.0])
        );
        assert!(coupled_state(0, 1).is_err());
        assert!(coupled_state(1, 2).is_err());
        assert!(coupled_state(2, 0).is_err());
    }

    #[test]
    fn singlet_sandwiches() {
        let s = TwoSpinState::singlet();
        let v = sandwich(&s, &pauli_term(PauliTerm::Sigma1DotSigma2, ONE), &s);
        assert!(close(v, c(-3.0)));
        let v = sandwich(&s, &pauli_term(PauliTerm::Product(Vec3::X, Vec3::X), ONE), &s);
        assert!(close(v, c(-1.0)));
        let v = sandwich(
            &s,
            &pauli_term(PauliTerm::SumSigma(Vec3::new(0.3, -2.0, 1.7)), ONE),
            &s,
        );
        assert!(close(v, ZERO));
    }

    #[test]
    fn coefficient_scales_the_operator() {
        let s = TwoSpinState::singlet();
        let coeff = Complex64::new(0.5, -2.0);
        let v = sandwich(&s, &pauli_term(PauliTerm::Sigma1DotSigma2, coeff), &s);
        assert!(close(v, coeff * -3.0));
    }

    #[test]
    fn factorized_product_matches_closed_form() {
        let s = TwoSpinState::singlet();
        let b = Vec3::new(0.2, -0.7, 1.3);
        let v = sandwich(&s, &factorized_product(0.9, b), &s);
        assert!(close(v, c(singlet_product_expectation(0.9, b))));
    }
}

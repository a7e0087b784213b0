use num_complex::Complex64;
use proptest::prelude::*;
use pwshift_core::spin_algebra::{
    coupled_state, factorized_product, pauli_term, sandwich, singlet_expectation,
    singlet_product_expectation, PauliTerm, TwoSpinOperator, TwoSpinState,
};
use pwshift_core::Vec3;
use pwshift_oracle::{oracle_spin_sandwich, singlet_vector, OracleTerm};

fn vec3() -> impl Strategy<Value = Vec3> {
    (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn singlet_of(op: &TwoSpinOperator) -> Complex64 {
    let s = TwoSpinState::singlet();
    sandwich(&s, op, &s)
}

fn to_oracle(kind: &PauliTerm, coeff: Complex64) -> OracleTerm {
    let z = [0.0; 3];
    match *kind {
        PauliTerm::Identity => OracleTerm::new("identity", coeff, z, z),
        PauliTerm::DotSigma1(a) => OracleTerm::new("sigma1.a", coeff, a.as_array(), z),
        PauliTerm::DotSigma2(a) => OracleTerm::new("sigma2.a", coeff, a.as_array(), z),
        PauliTerm::Sigma1DotSigma2 => OracleTerm::new("sigma1.sigma2", coeff, z, z),
        PauliTerm::Product(a, b) => OracleTerm::new("product", coeff, a.as_array(), b.as_array()),
        PauliTerm::SumSigma(a) => OracleTerm::new("sum.a", coeff, a.as_array(), z),
    }
}

#[test]
fn sigma_dot_sigma_is_minus_three() {
    let v = singlet_of(&pauli_term(PauliTerm::Sigma1DotSigma2, one()));
    assert!((v - Complex64::new(-3.0, 0.0)).norm() < 1e-12);
    assert_eq!(singlet_expectation(PauliTerm::Sigma1DotSigma2), -3.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn product_is_minus_dot(a in vec3(), b in vec3()) {
        let v = singlet_of(&pauli_term(PauliTerm::Product(a, b), one()));
        prop_assert!((v.re + a.dot(b)).abs() < 1e-12);
        prop_assert!(v.im.abs() < 1e-12);
        prop_assert!((singlet_expectation(PauliTerm::Product(a, b)) + a.dot(b)).abs() < 1e-12);
    }

    #[test]
    fn total_spin_vanishes(c in vec3()) {
        for kind in [PauliTerm::SumSigma(c), PauliTerm::DotSigma1(c), PauliTerm::DotSigma2(c)] {
            prop_assert!(singlet_of(&pauli_term(kind, one())).norm() < 1e-12);
        }
    }

    #[test]
    fn factorized_product_closed_form(a in -3.0..3.0f64, b in vec3()) {
        let v = singlet_of(&factorized_product(a, b));
        prop_assert!((v.re - singlet_product_expectation(a, b)).abs() < 1e-11);
        prop_assert!((v.re - (a * a + b.norm_sq())).abs() < 1e-11);
    }

    #[test]
    fn sandwich_conjugate_symmetry(a in vec3(), b in vec3(), re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let op = pauli_term(PauliTerm::Product(a, b), Complex64::new(re, im))
            + pauli_term(PauliTerm::DotSigma1(a), Complex64::new(im, re));
        let u = coupled_state(1, 1).unwrap();
        let w = coupled_state(0, 0).unwrap() + coupled_state(1, 0).unwrap();
        let lhs = sandwich(&u, &op, &w);
        let rhs = sandwich(&w, &op.adjoint(), &u).conj();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn real_combinations_are_hermitian(a in vec3(), b in vec3(), c in -2.0..2.0f64, d in -2.0..2.0f64) {
        let re = |x: f64| Complex64::new(x, 0.0);
        let op = pauli_term(PauliTerm::Identity, re(c))
            + pauli_term(PauliTerm::DotSigma1(a), re(d))
            + pauli_term(PauliTerm::Product(a, b), re(c * d))
            + pauli_term(PauliTerm::Sigma1DotSigma2, re(-d))
            + pauli_term(PauliTerm::SumSigma(b), re(1.5));
        prop_assert!(op.hermiticity_residual() < 1e-12);
        prop_assert!((op * op).hermiticity_residual() < 1e-11);
    }

    #[test]
    fn matches_dense_oracle(a in vec3(), b in vec3(), c in vec3(), k in 0usize..6) {
        let kinds = [
            PauliTerm::Identity,
            PauliTerm::DotSigma1(a),
            PauliTerm::DotSigma2(b),
            PauliTerm::Sigma1DotSigma2,
            PauliTerm::Product(a, c),
            PauliTerm::SumSigma(c),
        ];
        let coeff = Complex64::new(0.7, -0.3);
        let mut op = TwoSpinOperator::zero();
        let mut terms = Vec::new();
        for kind in kinds.iter().take(k + 1) {
            op += pauli_term(*kind, coeff);
            terms.push(to_oracle(kind, coeff));
        }
        let s = singlet_vector();
        let oracle = oracle_spin_sandwich(&terms, &s, &s).unwrap();
        prop_assert!((singlet_of(&op) - oracle).norm() < 1e-12);
        // off-diagonal elements between product states
        let t = coupled_state(1, 0).unwrap();
        let t_vec = t.amplitudes;
        let oracle_t = oracle_spin_sandwich(&terms, &s, &t_vec).unwrap();
        prop_assert!((sandwich(&TwoSpinState::singlet(), &op, &t) - oracle_t).norm() < 1e-12);
    }
}

#[test]
fn coupled_states_are_orthonormal() {
    let states: Vec<_> = [(0, 0), (1, -1), (1, 0), (1, 1)]
        .iter()
        .map(|&(s, m)| coupled_state(s, m).unwrap())
        .collect();
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((a.inner(b) - Complex64::new(want, 0.0)).norm() < 1e-15);
        }
    }
    assert!(coupled_state(0, 1).is_err());
    assert!(coupled_state(2, 0).is_err());
}

#[test]
fn sigma_dot_sigma_on_triplet() {
    let op = pauli_term(PauliTerm::Sigma1DotSigma2, one());
    for m in -1..=1 {
        let t = coupled_state(1, m).unwrap();
        assert!((sandwich(&t, &op, &t) - one()).norm() < 1e-14);
    }
}

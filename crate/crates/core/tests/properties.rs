use proptest::prelude::*;

use aqec::channels::{amplitude_damping_n, Pauli, PauliString};
use aqec::codes::leung_code;
use aqec::matkernel::{
    c, hermitian_eig, identity, max_abs, orthonormal_columns, polar_decompose, psd_power, support_projector,
    ComplexMatrix, RANK_TOL,
};
use aqec::metrics::{entanglement_fidelity, entanglement_fidelity_pairwise, petz_comparison, worst_case_fidelity};
use aqec::orthogonalizer::{orthogonalize, OrthogonalizeOptions};
use aqec::presets::leung_order;
use aqec::recovery::{petz, polar_recovery, syndrome_petz};

fn complex_matrix(n: usize, m: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * m)
        .prop_map(move |v| ComplexMatrix::from_iterator(n, m, v.into_iter().map(|(a, b)| c(a, b))))
}

fn square(max: usize) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max).prop_flat_map(|n| complex_matrix(n, n))
}

fn hermitian(max: usize) -> impl Strategy<Value = ComplexMatrix> {
    square(max).prop_map(|a| (&a + a.adjoint()) * c(0.5, 0.0))
}

/// Random PSD matrix with a chosen rank.
fn psd(max: usize) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max)
        .prop_flat_map(|n| (Just(n), 1..=n))
        .prop_flat_map(|(n, r)| complex_matrix(n, r))
        .prop_map(|b| &b * b.adjoint())
}

fn pauli_string(n: impl Into<prop::collection::SizeRange>) -> impl Strategy<Value = PauliString> {
    prop::collection::vec(0..4usize, n).prop_map(|v| {
        PauliString::new(v.into_iter().map(|i| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][i]).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hermitian_eig_reconstructs_with_orthonormal_vectors(h in hermitian(8)) {
        let eig = hermitian_eig(&h).unwrap();
        let v = &eig.eigenvectors;
        let n = h.nrows();
        prop_assert!(max_abs(&(v.adjoint() * v - identity(n))) < 1e-12);
        let rebuilt = eig.map(Some);
        prop_assert!(max_abs(&(rebuilt - &h)) < 1e-12);
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn pauli_dense_round_trip(p in pauli_string(1..=4)) {
        let back = PauliString::from_dense(&p.dense(), 1e-12).unwrap();
        prop_assert_eq!(back.word(), p.word());
        prop_assert!(max_abs(&(back.dense() - p.dense())) < 1e-12);
        let d = p.dense();
        prop_assert!(max_abs(&(&d * d.adjoint() - identity(p.dim()))) < 1e-12);
    }

    #[test]
    fn pauli_action_matches_dense(p in pauli_string(3), rho in complex_matrix(8, 8)) {
        let d = p.dense();
        prop_assert!(max_abs(&(p.action().conjugate(&rho) - &d * &rho * d.adjoint())) < 1e-12);
    }

    #[test]
    fn channel_application_is_linear(
        gamma in 0.0..0.3f64,
        a in complex_matrix(4, 4),
        b in complex_matrix(4, 4),
        s in -2.0..2.0f64,
    ) {
        let ch = amplitude_damping_n(gamma, 2).unwrap();
        let lhs = ch.apply(&(&a + &b * c(s, 0.0))).unwrap();
        let rhs = ch.apply(&a).unwrap() + ch.apply(&b).unwrap() * c(s, 0.0);
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-12);
    }

    #[test]
    fn polar_decomposition_reconstructs(a in square(6)) {
        let (u, s) = polar_decompose(&a, RANK_TOL).unwrap();
        let n = a.nrows();
        prop_assert!(max_abs(&(u.adjoint() * &u - identity(n))) < 1e-10);
        prop_assert!(max_abs(&(&u * &s - &a)) < 1e-10);
    }

    #[test]
    fn polar_decomposition_of_rank_deficient_input(b in psd(6)) {
        let (u, s) = polar_decompose(&b, RANK_TOL).unwrap();
        prop_assert!(max_abs(&(u.adjoint() * &u - identity(b.nrows()))) < 1e-9);
        prop_assert!(max_abs(&(&u * &s - &b)) < 1e-9 * max_abs(&b).max(1.0));
    }

    #[test]
    fn support_projector_is_an_idempotent_hermitian_cover(m in psd(7)) {
        let p = support_projector(&m, RANK_TOL).unwrap();
        prop_assert!(max_abs(&(&p * &p - &p)) < 1e-10);
        prop_assert!(max_abs(&(&p - p.adjoint())) < 1e-12);
        prop_assert!(max_abs(&(&p * &m - &m)) < 1e-9 * max_abs(&m).max(1.0));
    }

    #[test]
    fn pseudo_inverse_square_root_whitens_the_support(m in psd(6)) {
        let w = psd_power(&m, -0.5, RANK_TOL).unwrap();
        let p = support_projector(&m, RANK_TOL).unwrap();
        let cond = {
            let eig = hermitian_eig(&m).unwrap();
            let top = eig.spectral_norm();
            let low = eig.eigenvalues.iter().copied().find(|&l| l > RANK_TOL * top.max(1.0)).unwrap_or(top);
            top / low
        };
        prop_assume!(cond < 1e6);
        prop_assert!(max_abs(&(&w * &m * &w - &p)) < 1e-8);
    }

    #[test]
    fn orthonormal_columns_span_the_input(y in (1..6usize, 1..4usize).prop_flat_map(|(r, k)| complex_matrix(r + 2, k))) {
        let q = orthonormal_columns(&y, RANK_TOL).unwrap();
        prop_assert!(max_abs(&(q.adjoint() * &q - identity(q.ncols()))) < 1e-10);
        prop_assert!(max_abs(&(&q * q.adjoint() * &y - &y)) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn leung_recoveries_stay_certified(gamma in 0.001..0.3f64) {
        let code = leung_code();
        let noise = amplitude_damping_n(gamma, 4).unwrap();
        let orth = orthogonalize(&noise, &code, &OrthogonalizeOptions::with_order(&leung_order())).unwrap();
        prop_assert!(orth.certificates.subspace_orthogonality < 1e-10);
        for map in [petz(&code, &noise, RANK_TOL).unwrap(), syndrome_petz(&orth).unwrap(), polar_recovery(&orth).unwrap()] {
            map.certify().unwrap();
            let f = entanglement_fidelity(&map, &noise, &code).unwrap();
            let pairwise = entanglement_fidelity_pairwise(&map, &noise, &code).unwrap();
            prop_assert!((f - pairwise).abs() < 1e-12);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&f));
            let worst = worst_case_fidelity(&map, &noise, &code).unwrap().value;
            // The minimum cannot exceed the average fidelity (d F_ent + 1) / (d + 1).
            prop_assert!(worst <= (2.0 * f + 1.0) / 3.0 + 1e-9);
        }
        let t = petz_comparison(&code, &noise, &orth).unwrap();
        prop_assert!(t.holds, "{t:?}");
    }

    #[test]
    fn worst_case_is_a_lower_bound_on_sampled_states(gamma in 0.01..0.2f64, theta in 0.0..std::f64::consts::PI, phi in 0.0..std::f64::consts::TAU) {
        let code = leung_code();
        let noise = amplitude_damping_n(gamma, 4).unwrap();
        let map = petz(&code, &noise, RANK_TOL).unwrap();
        let t = aqec::metrics::LogicalTransfer::new(&code, &noise, &map).unwrap();
        let worst = aqec::metrics::worst_case_from_transfer(&t).unwrap();
        let sample = t.state_fidelity(&aqec::metrics::bloch_amplitudes(theta, phi));
        prop_assert!(worst.value <= sample + 1e-9);
    }
}

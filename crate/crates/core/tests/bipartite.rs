mod common;

use qmarg::bipartite::*;
use qmarg::{ComplexMatrix, Error, GaussianSource};

use common::{
    brute_force_full_support_freedom, displayed_rho, naive_trace_out_a, naive_trace_out_b,
    sym2_eigs,
};

const TOL: f64 = 1e-10;

fn rho() -> BipartiteState {
    validate_state(displayed_rho(), 2, 3, TOL).unwrap()
}

fn maximally_mixed(n: usize, m: usize) -> BipartiteState {
    let d = n * m;
    validate_state(ComplexMatrix::scaled_identity(d, 1.0 / d as f64), n, m, TOL).unwrap()
}

#[test]
fn displayed_state_is_valid_with_uniform_marginals() {
    let s = rho();
    assert!(partial_trace_b(&s).max_abs_diff(&ComplexMatrix::scaled_identity(2, 0.5)) < 1e-15);
    assert!(partial_trace_a(&s).max_abs_diff(&ComplexMatrix::scaled_identity(3, 1.0 / 3.0)) < 1e-15);
}

#[test]
fn shifting_mass_off_a_zero_diagonal_breaks_psd() {
    let shifted = &displayed_rho() - &ComplexMatrix::diag(&[0.5, 0.0, 0.0, 0.0, 0.0, 0.0]);
    match validate_state(shifted, 2, 3, TOL) {
        Err(Error::InvalidState(v)) => assert!(v
            .iter()
            .any(|x| matches!(x, Violation::NotPsd { min_eigenvalue } if (*min_eigenvalue + 0.5).abs() < 1e-12))),
        other => panic!("expected NotPsd, got {other:?}"),
    }
}

#[test]
fn partial_transpose_spectrum_matches_block_oracle() {
    // (1⊗T)ρ splits into [[0,c],[c,1/6]], [[1/6,c],[c,0]] and two 1/3 diagonal entries.
    let c = 1.0 / (3.0 * 2f64.sqrt());
    let mut expected: Vec<f64> = sym2_eigs(0.0, c, 1.0 / 6.0)
        .into_iter()
        .chain(sym2_eigs(1.0 / 6.0, c, 0.0))
        .chain([1.0 / 3.0, 1.0 / 3.0])
        .collect();
    expected.sort_by(f64::total_cmp);
    let r = ppt_check(&rho(), 1e-9).unwrap();
    for (x, y) in r.spectrum.iter().zip(&expected) {
        assert!((x - y).abs() < 1e-12, "{:?} vs {expected:?}", r.spectrum);
    }
    assert!((r.min_eigenvalue + 1.0 / 6.0).abs() < 1e-12);
    assert!(!r.is_ppt);
    assert_eq!(r.verdict, PptVerdict::Entangled);
}

#[test]
fn extremal_state_has_no_freedom_and_respects_bound() {
    let s = rho();
    assert_eq!(perturbation_freedom_dim(&s, 1e-8).unwrap(), 0);
    assert_eq!(parthasarathy_bound(2, 3), 3);
    assert!(check_rank_bound(&s, 1e-8));
}

#[test]
fn maximally_mixed_freedom_matches_brute_force() {
    // Frozen from the brute-force oracle: Herm(6) has real dimension 36 and
    // the two marginal maps impose 9 + 4 constraints sharing the trace.
    let oracle = brute_force_full_support_freedom(2, 3);
    assert_eq!(oracle, 24);
    assert_eq!(perturbation_freedom_dim(&maximally_mixed(2, 3), 1e-8).unwrap(), 24);
    assert_eq!(brute_force_full_support_freedom(2, 2), 16 - 7);
    assert_eq!(perturbation_freedom_dim(&maximally_mixed(2, 2), 1e-8).unwrap(), 9);
}

#[test]
fn maximally_mixed_violates_rank_bound() {
    let s = maximally_mixed(2, 3);
    assert_eq!(s.rank(1e-8), 6);
    assert!(!check_rank_bound(&s, 1e-8));
}

#[test]
fn maximally_entangled_marginals_for_random_bases() {
    let mut g = GaussianSource::new(2024);
    let half = ComplexMatrix::scaled_identity(2, 0.5);
    for _ in 0..20 {
        let u = g.unitary(2);
        let s = max_entangled_projector(&u, 1e-10).unwrap();
        assert!(partial_trace_b(&s).max_abs_diff(&half) < 1e-12);
        assert!(partial_trace_a(&s).max_abs_diff(&half) < 1e-12);
        assert_eq!(s.rank(1e-8), 1);
        assert_eq!(perturbation_freedom_dim(&s, 1e-8).unwrap(), 0);
    }
}

#[test]
fn mixture_of_orthogonal_bell_states_is_not_extreme() {
    let i2 = ComplexMatrix::identity(2);
    let z = ComplexMatrix::diag(&[1.0, -1.0]);
    let a = max_entangled_projector(&i2, 1e-10).unwrap();
    let b = max_entangled_projector(&z, 1e-10).unwrap();
    let mix = (&a.matrix().scale(0.5)) + &b.matrix().scale(0.5);
    let s = validate_state(mix, 2, 2, 1e-10).unwrap();
    assert_eq!(s.rank(1e-8), 2);
    assert!(perturbation_freedom_dim(&s, 1e-8).unwrap() > 0);
}

#[test]
fn random_separable_states_are_ppt() {
    for seed in 0..100 {
        let s = random_separable(2, 3, 1 + (seed as usize % 5), seed).unwrap();
        let r = ppt_check(&s, 1e-9).unwrap();
        assert!(r.is_ppt, "seed {seed}: min eigenvalue {}", r.min_eigenvalue);
        assert_eq!(r.verdict, PptVerdict::Separable);
    }
}

#[test]
fn single_term_separable_is_a_product() {
    let s = random_separable(2, 3, 1, 77).unwrap();
    let a = partial_trace_b(&s);
    let b = partial_trace_a(&s);
    assert!(s.matrix().max_abs_diff(&a.kron(&b)) < 1e-14);
}

#[test]
fn separable_is_never_claimed_outside_conclusive_dims() {
    for (n, m) in [(3, 3), (2, 4), (4, 2), (3, 4)] {
        for seed in 0..5 {
            let s = random_separable(n, m, 3, seed).unwrap();
            let r = ppt_check(&s, 1e-9).unwrap();
            assert!(r.is_ppt);
            assert_eq!(r.verdict, PptVerdict::Inconclusive);
        }
    }
    // PPT failure is decisive in any dimension
    let bell3 = max_entangled_projector(&ComplexMatrix::identity(3), 1e-10).unwrap();
    assert_eq!(ppt_check(&bell3, 1e-9).unwrap().verdict, PptVerdict::Entangled);
}

#[test]
fn partial_traces_agree_with_index_sums_and_have_unit_trace() {
    let mut g = GaussianSource::new(8);
    for (n, m) in [(2, 3), (3, 2), (2, 2), (3, 4)] {
        let s = validate_state(g.density_matrix(n * m), n, m, 1e-10).unwrap();
        let rb = partial_trace_b(&s);
        let ra = partial_trace_a(&s);
        assert!(rb.max_abs_diff(&naive_trace_out_b(s.matrix(), n, m)) < 1e-15);
        assert!(ra.max_abs_diff(&naive_trace_out_a(s.matrix(), n, m)) < 1e-15);
        assert!((rb.trace().re - 1.0).abs() < 1e-10);
        assert!((ra.trace().re - 1.0).abs() < 1e-10);
    }
}

#[test]
fn partial_trace_is_linear() {
    let mut g = GaussianSource::new(13);
    for _ in 0..20 {
        let a = validate_state(g.density_matrix(6), 2, 3, 1e-10).unwrap();
        let b = validate_state(g.density_matrix(6), 2, 3, 1e-10).unwrap();
        let alpha = g.uniform();
        let mix = &a.matrix().scale(alpha) + &b.matrix().scale(1.0 - alpha);
        let lhs = trace_out_b(&mix, 2, 3);
        let rhs = &partial_trace_b(&a).scale(alpha) + &partial_trace_b(&b).scale(1.0 - alpha);
        assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }
}

#[test]
fn expectation_values_are_compatible_with_marginals() {
    let mut g = GaussianSource::new(21);
    let s = validate_state(g.density_matrix(6), 2, 3, 1e-10).unwrap();
    let rho1 = partial_trace_b(&s);
    for _ in 0..50 {
        let x = g.ginibre(2, 2);
        let a1 = (&x + &x.adjoint()).scale(0.5);
        let lhs = (&a1 * &rho1).trace();
        let rhs = (&a1.kron(&ComplexMatrix::identity(3)) * s.matrix()).trace();
        assert!((lhs - rhs).norm() <= 1e-10 * a1.frobenius_norm());
    }
}

#[test]
fn partial_transpose_preserves_trace() {
    let mut g = GaussianSource::new(5);
    for _ in 0..20 {
        let s = validate_state(g.density_matrix(6), 2, 3, 1e-10).unwrap();
        let r = ppt_check(&s, 1e-9).unwrap();
        assert!((r.spectrum.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        let pt = partial_transpose_b(&s);
        assert!(pt.is_hermitian(1e-14));
    }
}

#[test]
fn degenerate_marginals_are_accepted() {
    // |0⟩⟨0| ⊗ ρ₂ has a rank-one first marginal
    let a = ComplexMatrix::diag(&[1.0, 0.0]);
    let b = GaussianSource::new(4).density_matrix(3);
    let s = product_state(&a, &b, 1e-10).unwrap();
    assert!(ppt_check(&s, 1e-9).unwrap().is_ppt);
    let pf = perturbation_freedom(&s, 1e-8).unwrap();
    assert_eq!(pf.state_rank, 3);
    assert_eq!(pf.parameters, 9);
}

#[test]
fn state_file_round_trip() {
    let s = rho();
    let json = serde_json::to_string(&s).unwrap();
    let back: StateFile = serde_json::from_str(&json).unwrap();
    assert_eq!(back.dim_a, 2);
    assert_eq!(back.validate(1e-10).unwrap(), s);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["matrix"]["rows"], 6);
    assert_eq!(v["matrix"]["entries"][7], serde_json::json!([1.0 / 6.0, 0.0]));
}

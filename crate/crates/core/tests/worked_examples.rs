use eginv::linalg::{frobenius, max_abs, real_matrix, ComplexMatrix};
use eginv::solver::{invert_omega, oracle_inverse, recover_data, solve_canonical, solve_general, SolveStatus};
use eginv::{build_omega, check_conditions, DataSet, Tolerances, TriangularAlgebra};

fn eighths(v: [f64; 9], sign: f64) -> ComplexMatrix {
    real_matrix(3, 3, &v.map(|x| sign * x / 8.0))
}

fn three_by_three() -> DataSet<TriangularAlgebra> {
    let alpha = eighths([-2.0, 2.0, 0.0, 0.0, -3.0, -4.0, 0.0, 0.0, 6.0], 1.0);
    let beta = eighths([-2.0, -6.0, 0.0, 0.0, 1.0, -4.0, 0.0, 0.0, -2.0], -1.0);
    let gamma = eighths([-2.0, 0.0, 0.0, -4.0, 1.0, 0.0, 0.0, -6.0, -2.0], -1.0);
    let delta = eighths([6.0, 0.0, 0.0, -4.0, -3.0, 0.0, 0.0, 2.0, -2.0], 1.0);
    DataSet::new(TriangularAlgebra::new(3).unwrap(), alpha, beta, gamma, delta).unwrap()
}

fn expected_g() -> ComplexMatrix {
    real_matrix(3, 3, &[1.0, 2.0, 0.0, 0.0, 1.0, 2.0, 0.0, 0.0, 1.0])
}

#[test]
fn three_by_three_both_methods() {
    let tol = Tolerances::default();
    let d = three_by_three();
    let c = check_conditions(&d, &tol);
    assert!(c.residuals[..3].iter().all(|r| r.unwrap() < 1e-12), "{:?}", c.residuals);
    let can = solve_canonical(&d, &tol).unwrap();
    assert_eq!(can.status, SolveStatus::Solved, "{}", can.message);
    assert!(max_abs(&(can.g.unwrap() - expected_g())) < 1e-12);
    let gen = solve_general(&d, None, &tol).unwrap();
    assert_eq!(gen.status, SolveStatus::Solved, "{}", gen.message);
    assert!(max_abs(&(gen.g.unwrap() - expected_g())) < 1e-12);
    let inv = invert_omega(&d, &expected_g(), None, &tol).unwrap();
    assert!(inv.omega_r_residual < 1e-12 && inv.r_omega_residual < 1e-12);
}

#[test]
fn three_by_three_perturbed_beta() {
    let tol = Tolerances::default();
    let d = three_by_three();
    let mut b = d.beta().clone();
    b[(0, 1)] += eginv::linalg::c(0.01, 0.0);
    let d = d.with_beta(b).unwrap();
    let rep = solve_canonical(&d, &tol).unwrap();
    assert_eq!(rep.status, SolveStatus::NoSolution);
    assert!(rep.diagnostics.canonical_mismatch.unwrap() > 1e-3);
    assert!(check_conditions(&d, &tol).max_residual() > 1e-3);
}

#[test]
fn two_by_two_singular_diagonal() {
    let tol = Tolerances::default();
    let alg = TriangularAlgebra::new(2).unwrap();
    let g = real_matrix(2, 2, &[1.0, 1.0, 0.0, 1.0]);
    let d = recover_data(&alg, &g, &tol).unwrap();
    let want = [
        (d.alpha(), [-1.0, -1.0, 0.0, 0.0]),
        (d.gamma(), [1.0, 0.0, 1.0, 1.0]),
        (d.beta(), [1.0, 1.0, 0.0, 1.0]),
        (d.delta(), [0.0, 0.0, -1.0, -1.0]),
    ];
    for (x, w) in want {
        assert!(max_abs(&(x - real_matrix(2, 2, &w))) < 1e-12, "{x}");
    }
    let c = check_conditions(&d, &tol);
    assert!(!c.a0_invertible);
    assert!(c.c123_pass());
    assert_eq!(solve_general(&d, None, &tol).unwrap().status, SolveStatus::Refused);
    let err = invert_omega(&d, &g, None, &tol).unwrap_err();
    assert!(err.to_string().contains("item (a) not satisfied"), "{err}");
    let om = build_omega(&alg, &g, 0).unwrap();
    let o = oracle_inverse(&om, &tol).unwrap();
    assert!(o.residual < 1e-12);
    assert!(frobenius(&o.inverse.matrix) > 0.0);
}

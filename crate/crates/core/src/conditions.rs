//! The six compatibility conditions on the data.
//!
//! C1-C3: Q* J Q = diag(a0, -d0), C4-C6: Q diag(a0^-1, -d0^-1) Q* = J,
//! with Q = [[alpha, beta], [gamma, delta]] and J = diag(e, -e).

use serde::Serialize;

use crate::algebra::{block_adjoint, block_mul, block_norm, block_sub, Algebra, BlockElement};
use crate::data::{DataSet, Tolerances};
use crate::linalg::C64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    /// Frobenius norm of the defect of C1..C6; None when not evaluable.
    pub residuals: [Option<f64>; 6],
    pub thresholds: [Option<f64>; 6],
    pub passed: [Option<bool>; 6],
    pub a0_invertible: bool,
    pub d0_invertible: bool,
    pub a0_condition: f64,
    pub d0_condition: f64,
}

impl CheckReport {
    pub fn c123_pass(&self) -> bool {
        self.passed[..3].iter().all(|p| *p == Some(true))
    }

    pub fn c456_pass(&self) -> bool {
        self.passed[3..].iter().all(|p| *p == Some(true))
    }

    pub fn all_pass(&self) -> bool {
        self.c123_pass() && self.c456_pass()
    }

    /// Largest evaluated residual.
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().flatten().copied().fold(0.0, f64::max)
    }

    /// First failing condition, 1-based.
    pub fn first_failure(&self) -> Option<usize> {
        self.passed.iter().position(|p| *p != Some(true)).map(|k| k + 1)
    }
}

pub fn check_conditions<A: Algebra>(data: &DataSet<A>, tol: &Tolerances) -> CheckReport {
    let alg = data.alg();
    let (p, q) = (alg.p(), alg.q());
    let qb = data.q_block();
    let qs = block_adjoint(alg, &qb);
    let (a0, d0) = (data.a0(), data.d0());
    let scale = block_norm(alg, &qb).powi(2).max(1.0);
    let neg = C64::new(-1.0, 0.0);

    let mut residuals = [None; 6];
    let mut thresholds = [None; 6];

    let j = BlockElement::diag(alg, alg.identity(p), alg.scale(&alg.identity(q), neg));
    let first = block_mul(alg, &qs, &block_mul(alg, &j, &qb).expect("J Q")).expect("Q* J Q");
    let target = BlockElement::diag(alg, a0.clone(), alg.scale(&d0, neg));
    let defect = block_sub(alg, &first, &target).expect("defect shapes");
    let t = tol.threshold(tol.condition, scale);
    for (k, x) in [&defect.a, &defect.d, &defect.b].into_iter().enumerate() {
        residuals[k] = Some(alg.norm(x));
        thresholds[k] = Some(t);
    }

    let a0_inv = alg.diag_inverse(&a0, tol.invertibility).ok();
    let d0_inv = alg.diag_inverse(&d0, tol.invertibility).ok();
    if let (Some(ai), Some(di)) = (&a0_inv, &d0_inv) {
        let jp = BlockElement::diag(alg, ai.clone(), alg.scale(di, neg));
        let second = block_mul(alg, &qb, &block_mul(alg, &jp, &qs).expect("J' Q*")).expect("Q J' Q*");
        let defect = block_sub(alg, &second, &j).expect("defect shapes");
        let t = tol.threshold(tol.condition, scale * block_norm(alg, &jp).max(1.0));
        for (k, x) in [&defect.a, &defect.d, &defect.b].into_iter().enumerate() {
            residuals[3 + k] = Some(alg.norm(x));
            thresholds[3 + k] = Some(t);
        }
    }

    let mut passed = [None; 6];
    for k in 0..6 {
        if let (Some(r), Some(t)) = (residuals[k], thresholds[k]) {
            passed[k] = Some(r <= t);
        }
    }
    CheckReport {
        residuals,
        thresholds,
        passed,
        a0_invertible: a0_inv.is_some(),
        d0_invertible: d0_inv.is_some(),
        a0_condition: alg.diag_condition(&a0),
        d0_condition: alg.diag_condition(&d0),
    }
}

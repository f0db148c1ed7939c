use serde::Serialize;

use crate::algebra::{Algebra, Block, InstanceKind, PartTag, Subspace};
use crate::data::DataSet;
use crate::error::{Error, Result};
use crate::linalg::{inverse, is_invertible};

use super::r_ops::ROperators;
use super::{compress_into, compress_truncated, Basis, BlockOperator, Segment, Window};

/// X+ on [0, w] and Y- on [-w, 0] (whole triangles for the matrix instance).
pub fn half_spaces<A: Algebra>(alg: &A, w: usize) -> (Segment, Segment) {
    match alg.kind() {
        InstanceKind::TriangularMatrix => (alg.segment(Subspace::XPlus, None), alg.segment(Subspace::YMinus, None)),
        InstanceKind::Sequence => {
            (alg.segment(Subspace::XPlus, Some(Window::plus(w))), alg.segment(Subspace::YMinus, Some(Window::minus(w))))
        }
    }
}

/// Half-width N = max degree of the data. Outside [0, N] / [-N, 0] every Hankel
/// block and every finite-rank correction in R vanishes, so the window solve is exact.
pub fn window_bound<A: Algebra>(data: &DataSet<A>) -> usize {
    data.degree()
}

/// Omega = [[I, H+g], [H-g*, I]] on X+ (+) Y-.
pub fn build_omega<A: Algebra>(alg: &A, g: &A::Elem, w: usize) -> Result<BlockOperator> {
    let r = alg.part_residual(g, PartTag::BPlus)?;
    if r != 0.0 {
        return Err(Error::NotInPart { what: "g".into(), part: PartTag::BPlus, residual: r });
    }
    let (xp, ym) = half_spaces(alg, w);
    let hg = compress_into(alg, g, Block::B, &ym, Subspace::XPlus, xp.window)?;
    let hgs = compress_into(alg, &alg.adjoint(g), Block::C, &xp, Subspace::YMinus, ym.window)?;
    BlockOperator::from_blocks(&[
        vec![BlockOperator::identity(Basis::single(xp)), hg],
        vec![hgs, BlockOperator::identity(Basis::single(ym))],
    ])
}

/// Shifts on the window: (V*+ on X+, V- on Y-, V*- on Y-, V+ on X+), i.e.
/// T+ of z^-1, multiplication by z^-1, T- of z, multiplication by z.
/// Sequence instance only.
pub fn shift_ops<A: Algebra>(alg: &A, w: usize) -> Result<[BlockOperator; 4]> {
    let (xp, ym) = half_spaces(alg, w);
    let (p, q) = (alg.p(), alg.q());
    let unit = |n: usize, k: i64| alg.shift_unit(n, k).ok_or_else(|| Error::Precondition("instance has no shift".into()));
    let zx = |k| unit(p, k);
    let zy = |k| unit(q, k);
    let vs_plus = compress_into(alg, &zx(-1)?, Block::A, &xp, Subspace::XPlus, xp.window)?;
    let v_minus = compress_truncated(alg, &zy(-1)?, Block::D, &ym, Subspace::YMinus, ym.window)?;
    let vs_minus = compress_into(alg, &zy(1)?, Block::D, &ym, Subspace::YMinus, ym.window)?;
    let v_plus = compress_truncated(alg, &zx(1)?, Block::A, &xp, Subspace::XPlus, xp.window)?;
    Ok([vs_plus, v_minus, vs_minus, v_plus])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntertwiningReport {
    /// ||R11 V*+ R12 - R12 V- R22||
    pub upper: f64,
    /// ||R22 V*- R21 - R21 V+ R11||
    pub lower: f64,
    /// ||V*+ R12 R22^-1 - R11^-1 R12 V-|| when R11, R22 are invertible
    pub certificate: Option<f64>,
}

impl IntertwiningReport {
    pub fn max(&self) -> f64 {
        self.upper.max(self.lower).max(self.certificate.unwrap_or(0.0))
    }
}

/// Shift intertwining of R on its window (sequence instance). The window must
/// contain the data degree so the dropped shift rows never meet the support of R12, R21.
pub fn check_shift_intertwining<A: Algebra>(alg: &A, r: &ROperators<A::Elem>, rel: f64) -> Result<IntertwiningReport> {
    let [vs_plus, v_minus, vs_minus, v_plus] = shift_ops(alg, r.window)?;
    let upper = r.r11.compose(&vs_plus)?.compose(&r.r12)?.sub(&r.r12.compose(&v_minus)?.compose(&r.r22)?)?.norm();
    let lower = r.r22.compose(&vs_minus)?.compose(&r.r21)?.sub(&r.r21.compose(&v_plus)?.compose(&r.r11)?)?.norm();
    let certificate = if is_invertible(&r.r11.matrix, rel) && is_invertible(&r.r22.matrix, rel) {
        let inv = |op: &BlockOperator| -> Result<BlockOperator> {
            let m = inverse(&op.matrix).ok_or_else(|| Error::Singular { what: "R block".into(), condition: f64::INFINITY })?;
            BlockOperator::new(m, op.codomain.clone(), op.domain.clone())
        };
        let (i11, i22) = (inv(&r.r11)?, inv(&r.r22)?);
        let lhs = vs_plus.compose(&r.r12)?.compose(&i22)?;
        let rhs = i11.compose(&r.r12)?.compose(&v_minus)?;
        Some(lhs.sub(&rhs)?.norm())
    } else {
        None
    };
    Ok(IntertwiningReport { upper, lower, certificate })
}

use crate::algebra::{Algebra, Block, Sign};
use crate::conditions::check_conditions;
use crate::data::{DataSet, Tolerances};
use crate::error::{Error, Result};
use crate::linalg::{C64, ComplexMatrix};

use super::omega::half_spaces;
use super::{apply, chain, BlockOperator, Kind, Segment};

/// R11: X+ -> X+, R12: Y- -> X+, R21: X+ -> Y-, R22: Y- -> Y- on a window.
#[derive(Clone, Debug, PartialEq)]
pub struct ROperators<E> {
    pub r11: BlockOperator,
    pub r12: BlockOperator,
    pub r21: BlockOperator,
    pub r22: BlockOperator,
    pub a0_inv: E,
    pub d0_inv: E,
    pub a0_condition: f64,
    pub d0_condition: f64,
    /// half-width of the window (0 for the matrix instance)
    pub window: usize,
    /// largest norm of image rows that fell outside the window when restricting products
    pub truncation: f64,
}

struct Ctx<'a, A: Algebra> {
    alg: &'a A,
    truncation: f64,
}

impl<A: Algebra> Ctx<'_, A> {
    fn term(&mut self, factors: &[(&A::Elem, Block, Kind)], from: Segment, to: Segment) -> Result<BlockOperator> {
        let op = chain(self.alg, factors, &from)?;
        let (op, dropped) = op.with_codomain(to)?;
        self.truncation = self.truncation.max(dropped);
        Ok(op)
    }
}

fn diag_inverses<A: Algebra>(data: &DataSet<A>, tol: &Tolerances) -> Result<(A::Elem, A::Elem, f64, f64)> {
    let alg = data.alg();
    let (a0, d0) = (data.a0(), data.d0());
    let (ca, cd) = (alg.diag_condition(&a0), alg.diag_condition(&d0));
    let a0_inv = alg
        .diag_inverse(&a0, tol.invertibility)
        .map_err(|_| Error::Singular { what: format!("a0 = diagonal part of alpha ({a0:?})"), condition: ca })?;
    let d0_inv = alg
        .diag_inverse(&d0, tol.invertibility)
        .map_err(|_| Error::Singular { what: format!("d0 = diagonal part of delta ({d0:?})"), condition: cd })?;
    Ok((a0_inv, d0_inv, ca, cd))
}

fn window_for<A: Algebra>(data: &DataSet<A>, window: Option<usize>) -> Result<usize> {
    let n = data.degree();
    let w = window.unwrap_or(n);
    if w < n {
        return Err(Error::Precondition(format!("window half-width {w} below data degree {n}")));
    }
    Ok(w)
}

/// R from the Toeplitz products: R11 = T+a a0^-1 T+a* - T+b d0^-1 T+b* and companions.
pub fn build_r<A: Algebra>(data: &DataSet<A>, window: Option<usize>, tol: &Tolerances) -> Result<ROperators<A::Elem>> {
    let alg = data.alg();
    let w = window_for(data, window)?;
    let (a0i, d0i, ca, cd) = diag_inverses(data, tol)?;
    let (al, be, ga, de) = (data.alpha(), data.beta(), data.gamma(), data.delta());
    let (als, bes, gas, des) = (alg.adjoint(al), alg.adjoint(be), alg.adjoint(ga), alg.adjoint(de));
    let (xp, ym) = half_spaces(alg, w);
    let mut cx = Ctx { alg, truncation: 0.0 };
    use Block::*;
    use Sign::{Minus as M, Plus as P};
    let (t, h) = (Kind::T, Kind::H);

    let r11 = cx
        .term(&[(al, A, t(P)), (&a0i, A, t(P)), (&als, A, t(P))], xp, xp)?
        .sub(&cx.term(&[(be, B, t(P)), (&d0i, D, t(P)), (&bes, C, t(P))], xp, xp)?)?;
    let r21 = cx
        .term(&[(ga, C, h(M)), (&a0i, A, t(P)), (&als, A, t(P))], xp, ym)?
        .sub(&cx.term(&[(de, D, h(M)), (&d0i, D, t(P)), (&bes, C, t(P))], xp, ym)?)?;
    let r12 = cx
        .term(&[(be, B, h(P)), (&d0i, D, t(M)), (&des, D, t(M))], ym, xp)?
        .sub(&cx.term(&[(al, A, h(P)), (&a0i, A, t(M)), (&gas, B, t(M))], ym, xp)?)?;
    let r22 = cx
        .term(&[(de, D, t(M)), (&d0i, D, t(M)), (&des, D, t(M))], ym, ym)?
        .sub(&cx.term(&[(ga, C, t(M)), (&a0i, A, t(M)), (&gas, B, t(M))], ym, ym)?)?;
    let truncation = cx.truncation;
    Ok(ROperators { r11, r12, r21, r22, a0_inv: a0i, d0_inv: d0i, a0_condition: ca, d0_condition: cd, window: w, truncation })
}

/// R from the finite-rank forms, e.g. R11 = I - H+a a0^-1 H-a* + H+b d0^-1 H-b*.
/// Valid under (C4)-(C6), which are checked first.
pub fn build_r_alt<A: Algebra>(data: &DataSet<A>, window: Option<usize>, tol: &Tolerances) -> Result<ROperators<A::Elem>> {
    let report = check_conditions(data, tol);
    if !report.c456_pass() {
        return Err(Error::ConditionsViolated { detail: format!("C4-C6 residuals {:?}", &report.residuals[3..]) });
    }
    let alg = data.alg();
    let w = window_for(data, window)?;
    let (a0i, d0i, ca, cd) = diag_inverses(data, tol)?;
    let (al, be, ga, de) = (data.alpha(), data.beta(), data.gamma(), data.delta());
    let (als, bes, gas, des) = (alg.adjoint(al), alg.adjoint(be), alg.adjoint(ga), alg.adjoint(de));
    let (xp, ym) = half_spaces(alg, w);
    let mut cx = Ctx { alg, truncation: 0.0 };
    use Block::*;
    use Sign::{Minus as M, Plus as P};
    let (t, h) = (Kind::T, Kind::H);
    let ix = BlockOperator::identity(super::Basis::single(xp));
    let iy = BlockOperator::identity(super::Basis::single(ym));

    let r11 = ix
        .sub(&cx.term(&[(al, A, h(P)), (&a0i, A, t(M)), (&als, A, h(M))], xp, xp)?)?
        .add(&cx.term(&[(be, B, h(P)), (&d0i, D, t(M)), (&bes, C, h(M))], xp, xp)?)?;
    let r21 = cx
        .term(&[(de, D, t(M)), (&d0i, D, t(M)), (&bes, C, h(M))], xp, ym)?
        .sub(&cx.term(&[(ga, C, t(M)), (&a0i, A, t(M)), (&als, A, h(M))], xp, ym)?)?;
    let r12 = cx
        .term(&[(al, A, t(P)), (&a0i, A, t(P)), (&gas, B, h(P))], ym, xp)?
        .sub(&cx.term(&[(be, B, t(P)), (&d0i, D, t(P)), (&des, D, h(P))], ym, xp)?)?;
    let r22 = iy
        .sub(&cx.term(&[(de, D, h(M)), (&d0i, D, t(P)), (&des, D, h(P))], ym, ym)?)?
        .add(&cx.term(&[(ga, C, h(M)), (&a0i, A, t(P)), (&gas, B, h(P))], ym, ym)?)?;
    let truncation = cx.truncation;
    Ok(ROperators { r11, r12, r21, r22, a0_inv: a0i, d0_inv: d0i, a0_condition: ca, d0_condition: cd, window: w, truncation })
}

impl<E> ROperators<E> {
    /// [[R11, R12], [R21, R22]] on X+ (+) Y-.
    pub fn assemble(&self) -> Result<BlockOperator> {
        BlockOperator::from_blocks(&[vec![self.r11.clone(), self.r12.clone()], vec![self.r21.clone(), self.r22.clone()]])
    }

    /// Largest blockwise Frobenius distance.
    pub fn distance(&self, other: &ROperators<E>) -> Result<f64> {
        Ok(self
            .r11
            .distance(&other.r11)?
            .max(self.r12.distance(&other.r12)?)
            .max(self.r21.distance(&other.r21)?)
            .max(self.r22.distance(&other.r22)?))
    }

    /// ||R11 - R11^H|| and ||R21 - R12^H||.
    pub fn hermitian_residuals(&self) -> Result<(f64, f64)> {
        Ok((self.r11.distance(&self.r11.adjoint())?, self.r21.distance(&self.r12.adjoint())?))
    }
}

impl<E: Clone> ROperators<E> {
    /// R11 e_A - alpha, R12 e_D - beta, R21 e_A - gamma, R22 e_D - delta.
    pub fn unit_residuals<A: Algebra<Elem = E>>(&self, data: &DataSet<A>) -> Result<[f64; 4]> {
        let alg = data.alg();
        let ea = alg.identity(alg.p());
        let ed = alg.identity(alg.q());
        let d = |op: &BlockOperator, e: &E, want: &E| -> Result<f64> { Ok(alg.norm(&alg.sub(&apply(alg, op, e)?, want)?)) };
        Ok([
            d(&self.r11, &ea, data.alpha())?,
            d(&self.r12, &ed, data.beta())?,
            d(&self.r21, &ea, data.gamma())?,
            d(&self.r22, &ed, data.delta())?,
        ])
    }
}

/// ||R diag(I, -I) R - diag(R11, -R22)||_F
pub fn r_involution_residual<E>(r: &ROperators<E>) -> Result<f64> {
    let full = r.assemble()?;
    let nx = r.r11.matrix.nrows();
    let n = full.matrix.nrows();
    let j = ComplexMatrix::from_fn(n, n, |i, k| {
        if i != k {
            C64::new(0.0, 0.0)
        } else if i < nx {
            C64::new(1.0, 0.0)
        } else {
            C64::new(-1.0, 0.0)
        }
    });
    let lhs = &full.matrix * &j * &full.matrix;
    let mut rhs = ComplexMatrix::zeros(n, n);
    rhs.view_mut((0, 0), (nx, nx)).copy_from(&r.r11.matrix);
    rhs.view_mut((nx, nx), (n - nx, n - nx)).copy_from(&(-&r.r22.matrix));
    Ok(crate::linalg::frobenius(&(lhs - rhs)))
}

//! Dense compressions of multiplication operators on coefficient windows.
//!
//! For rho in a corner K the multiplication x -> rho x maps K.domain() into
//! K.codomain(). Its four compressions are
//! T+ : dom+ -> cod+, T- : dom- -> cod-, H+ : dom- -> cod+, H- : dom+ -> cod-.

mod basis;
mod omega;
mod r_ops;

use serde::Serialize;

pub use basis::{Basis, BlockOperator, Segment, Window};
pub use omega::{build_omega, check_shift_intertwining, half_spaces, shift_ops, window_bound, IntertwiningReport};
pub use r_ops::{build_r, build_r_alt, r_involution_residual, ROperators};

use crate::algebra::{Algebra, Block, Sign, Subspace};
use crate::error::{Error, Result};
use crate::linalg::zeros;

/// Toeplitz-like (same sign) or Hankel-like (crossed) compression.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    T(Sign),
    H(Sign),
}

impl Kind {
    /// (domain half, codomain half) for a symbol of the given corner.
    pub fn halves(self, block: Block) -> (Subspace, Subspace) {
        let (din, dout) = match self {
            Kind::T(s) => (s, s),
            Kind::H(s) => (s.flip(), s),
        };
        (Subspace::new(block.domain(), din), Subspace::new(block.codomain(), dout))
    }
}

fn check_symbol<A: Algebra>(alg: &A, rho: &A::Elem, block: Block, domain: &Segment, target: Subspace) -> Result<()> {
    if domain.sub.letter() != block.domain() || target.letter() != block.codomain() {
        return Err(Error::NotComposable { block, segment: domain.to_string() });
    }
    let (r, c) = alg.shape(rho);
    let want_rows = match target.letter() {
        crate::algebra::Letter::X => alg.p(),
        crate::algebra::Letter::Y => alg.q(),
    };
    if c != domain.rows || r != want_rows {
        return Err(Error::DimensionMismatch { op: "compression symbol", left: (r, c), right: (want_rows, domain.rows) });
    }
    Ok(())
}

/// Matrix of x -> P_target(rho x) on `domain`, codomain sized to the exact image.
pub fn compress<A: Algebra>(alg: &A, rho: &A::Elem, block: Block, domain: &Segment, target: Subspace) -> Result<BlockOperator> {
    check_symbol(alg, rho, block, domain, target)?;
    let window = alg.image_window(rho, domain, target);
    build(alg, rho, domain, target, window)
}

/// As `compress`, onto a caller-chosen codomain window; errors when the image does not fit.
pub fn compress_into<A: Algebra>(
    alg: &A,
    rho: &A::Elem,
    block: Block,
    domain: &Segment,
    target: Subspace,
    window: Option<Window>,
) -> Result<BlockOperator> {
    check_symbol(alg, rho, block, domain, target)?;
    if let (Some(need), Some(given)) = (alg.image_window(rho, domain, target), window) {
        if !given.covers(&need) {
            return Err(Error::WindowTooSmall { required: need, given });
        }
    }
    build(alg, rho, domain, target, window)
}

/// P_window P_target L_rho restricted to `domain`; rows outside the window are discarded.
pub fn compress_truncated<A: Algebra>(
    alg: &A,
    rho: &A::Elem,
    block: Block,
    domain: &Segment,
    target: Subspace,
    window: Option<Window>,
) -> Result<BlockOperator> {
    let full = compress(alg, rho, block, domain, target)?;
    match window {
        Some(w) => {
            let seg = Segment { window: Some(w.clip(target)), ..*full.codomain.segment()? };
            Ok(full.with_codomain(seg)?.0)
        }
        None => Ok(full),
    }
}

fn build<A: Algebra>(alg: &A, rho: &A::Elem, domain: &Segment, target: Subspace, window: Option<Window>) -> Result<BlockOperator> {
    let rows = match target.letter() {
        crate::algebra::Letter::X => alg.p(),
        crate::algebra::Letter::Y => alg.q(),
    };
    let codomain = Segment { sub: target, rows, cols: domain.cols, window: window.map(|w| w.clip(target)) };
    let basis = alg.basis(domain);
    let mut m = zeros(codomain.dim(), basis.len());
    for (k, e) in basis.iter().enumerate() {
        let img = alg.project_mask(&alg.mul(rho, e)?, target.mask());
        m.set_column(k, &alg.coords(&codomain, &img)?);
    }
    BlockOperator::new(m, Basis::single(*domain), Basis::single(codomain))
}

/// T_{sign, rho} on the `sign` half of rho's domain, windowed by `window` (sequences).
pub fn toeplitz_op<A: Algebra>(alg: &A, rho: &A::Elem, block: Block, sign: Sign, window: Option<Window>) -> Result<BlockOperator> {
    let (din, dout) = Kind::T(sign).halves(block);
    compress(alg, rho, block, &domain_segment(alg, din, window), dout)
}

/// H_{sign, rho}: from the opposite half of rho's domain into the `sign` half of its codomain.
pub fn hankel_op<A: Algebra>(alg: &A, rho: &A::Elem, block: Block, sign: Sign, window: Option<Window>) -> Result<BlockOperator> {
    let (din, dout) = Kind::H(sign).halves(block);
    compress(alg, rho, block, &domain_segment(alg, din, window), dout)
}

/// Segment of the half with `cols = block_width`, rows from the letter.
pub fn domain_segment<A: Algebra>(alg: &A, sub: Subspace, window: Option<Window>) -> Segment {
    alg.segment(sub, window)
}

/// Compression of the given kind on an explicit domain segment.
pub fn compress_kind<A: Algebra>(alg: &A, rho: &A::Elem, block: Block, kind: Kind, domain: &Segment) -> Result<BlockOperator> {
    let (din, dout) = kind.halves(block);
    if din != domain.sub {
        return Err(Error::NotComposable { block, segment: domain.to_string() });
    }
    compress(alg, rho, block, domain, dout)
}

/// Product of compressions applied right to left, each sized to its exact image.
pub fn chain<A: Algebra>(alg: &A, factors: &[(&A::Elem, Block, Kind)], domain: &Segment) -> Result<BlockOperator> {
    let mut acc: Option<BlockOperator> = None;
    let mut seg = *domain;
    for &(rho, block, kind) in factors.iter().rev() {
        let op = compress_kind(alg, rho, block, kind, &seg)?;
        seg = *op.codomain.segment()?;
        acc = Some(match acc {
            None => op,
            Some(prev) => op.compose(&prev)?,
        });
    }
    acc.ok_or_else(|| Error::Precondition("empty chain".into()))
}

/// Pad (or trim) every operator's codomain to the hull of their windows.
pub fn common_codomain(ops: &[BlockOperator]) -> Result<Vec<BlockOperator>> {
    let segs: Vec<Segment> = ops.iter().map(|o| o.codomain.segment().copied()).collect::<Result<_>>()?;
    let first = segs.first().ok_or_else(|| Error::Precondition("no operators".into()))?;
    let hull = segs.iter().try_fold(first.window, |acc, s| match (acc, s.window) {
        (Some(a), Some(b)) => Ok(Some(a.hull(&b))),
        (None, None) => Ok(None),
        _ => Err(Error::BasisMismatch { left: first.to_string(), right: s.to_string() }),
    })?;
    let target = Segment { window: hull, ..*first };
    ops.iter().map(|o| Ok(o.with_codomain(target)?.0)).collect()
}

/// Residuals of the four product rules for rho after phi.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductRuleReport {
    /// T+(rho phi) - T+rho T+phi - H+rho H-phi
    pub t_plus: f64,
    /// H+(rho phi) - T+rho H+phi - H+rho T-phi
    pub h_plus: f64,
    /// H-(rho phi) - H-rho T+phi - T-rho H-phi
    pub h_minus: f64,
    /// T-(rho phi) - H-rho H+phi - T-rho T-phi
    pub t_minus: f64,
}

impl ProductRuleReport {
    pub fn max(&self) -> f64 {
        self.t_plus.max(self.h_plus).max(self.h_minus).max(self.t_minus)
    }
}

/// Checks the product rules as dense matrices on windows of half-width `w`.
/// Intermediate codomains hold full images, so both sides are exact compressions.
pub fn verify_product_rules<A: Algebra>(
    alg: &A,
    rho: &A::Elem,
    rho_block: Block,
    phi: &A::Elem,
    phi_block: Block,
    w: usize,
) -> Result<ProductRuleReport> {
    let prod_block = rho_block
        .product(phi_block)
        .filter(|_| rho_block.domain() == phi_block.codomain())
        .ok_or_else(|| Error::NotComposable { block: rho_block, segment: format!("{phi_block:?}") })?;
    let prod = alg.mul(rho, phi)?;
    let wide = Some(Window::new(-(w as i64), w as i64));
    let u_plus = alg.segment(Subspace::new(phi_block.domain(), Sign::Plus), wide);
    let u_minus = alg.segment(Subspace::new(phi_block.domain(), Sign::Minus), wide);

    let rule = |lhs: Kind, dom: &Segment, terms: [(Kind, Kind); 2]| -> Result<f64> {
        let mut ops = vec![compress_kind(alg, &prod, prod_block, lhs, dom)?];
        for (outer, inner) in terms {
            ops.push(chain(alg, &[(rho, rho_block, outer), (phi, phi_block, inner)], dom)?);
        }
        let ops = common_codomain(&ops)?;
        Ok(ops[0].sub(&ops[1])?.sub(&ops[2])?.norm())
    };
    use Sign::{Minus, Plus};
    Ok(ProductRuleReport {
        t_plus: rule(Kind::T(Plus), &u_plus, [(Kind::T(Plus), Kind::T(Plus)), (Kind::H(Plus), Kind::H(Minus))])?,
        h_plus: rule(Kind::H(Plus), &u_minus, [(Kind::T(Plus), Kind::H(Plus)), (Kind::H(Plus), Kind::T(Minus))])?,
        h_minus: rule(Kind::H(Minus), &u_plus, [(Kind::H(Minus), Kind::T(Plus)), (Kind::T(Minus), Kind::H(Minus))])?,
        t_minus: rule(Kind::T(Minus), &u_minus, [(Kind::H(Minus), Kind::H(Plus)), (Kind::T(Minus), Kind::T(Minus))])?,
    })
}

/// Apply a single-segment operator to an element, one column block at a time.
pub fn apply<A: Algebra>(alg: &A, op: &BlockOperator, x: &A::Elem) -> Result<A::Elem> {
    let dom = op.domain.segment()?;
    let cod = op.codomain.segment()?;
    let blocks = alg.column_blocks(x)?;
    let mut out = Vec::with_capacity(blocks.len());
    for b in &blocks {
        let v = alg.coords(dom, b)?;
        out.push(alg.from_coords(cod, &op.apply_vec(&v)?));
    }
    alg.hcat(&out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Mask;
    use crate::linalg::{c, frobenius, ComplexMatrix, ONE};
    use crate::matrix::TriangularAlgebra;
    use crate::sequence::{MatSeq, SequenceAlgebra};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scalar(j: i64, v: f64) -> MatSeq {
        MatSeq::monomial(j, ComplexMatrix::from_element(1, 1, c(v, 0.0)))
    }

    #[test]
    fn unit_symbol_gives_identity() {
        let alg = SequenceAlgebra::new(2, 1).unwrap();
        let t = toeplitz_op(&alg, &MatSeq::identity(2), Block::A, Sign::Plus, Some(Window::plus(3))).unwrap();
        assert_eq!(t.identity_residual().unwrap(), 0.0);
        let m = TriangularAlgebra::new(3).unwrap();
        let t = toeplitz_op(&m, &ComplexMatrix::identity(3, 3), Block::D, Sign::Minus, None).unwrap();
        assert_eq!(t.identity_residual().unwrap(), 0.0);
    }

    #[test]
    fn z_is_down_shift_on_coefficients() {
        let alg = SequenceAlgebra::new(1, 1).unwrap();
        let dom = alg.segment(Subspace::XPlus, Some(Window::plus(3)));
        let t = compress_into(&alg, &scalar(1, 1.0), Block::A, &dom, Subspace::XPlus, Some(Window::plus(4))).unwrap();
        for i in 0..5 {
            for j in 0..4 {
                let want = if i == j + 1 { ONE } else { c(0.0, 0.0) };
                assert_eq!(t.matrix[(i, j)], want);
            }
        }
        let err = compress_into(&alg, &scalar(1, 1.0), Block::A, &dom, Subspace::XPlus, Some(Window::plus(3)));
        assert!(matches!(err, Err(Error::WindowTooSmall { required, .. }) if required == Window::new(1, 4)));
    }

    #[test]
    fn hankel_of_single_coefficient_has_rank_two() {
        let alg = SequenceAlgebra::new(1, 1).unwrap();
        let h = hankel_op(&alg, &scalar(2, 1.0), Block::A, Sign::Plus, Some(Window::minus(4))).unwrap();
        assert_eq!(h.domain.segment().unwrap().window, Some(Window::new(-4, -1)));
        assert_eq!(h.codomain.segment().unwrap().window, Some(Window::new(0, 1)));
        let s = crate::linalg::singular_values(&h.matrix);
        assert_eq!(s.iter().filter(|&&x| x > 1e-12).count(), 2);
        // (H f)_k = g_{k-j} f_j over j < 0: only j = -2, -1 reach k = 0, 1
        let nz: Vec<(usize, usize)> = (0..h.matrix.nrows())
            .flat_map(|i| (0..h.matrix.ncols()).map(move |j| (i, j)))
            .filter(|&(i, j)| h.matrix[(i, j)] != c(0.0, 0.0))
            .collect();
        assert_eq!(nz, vec![(0, 2), (1, 3)]);
    }

    #[test]
    fn plus_symbols_have_zero_minus_hankel() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let alg = SequenceAlgebra::new(2, 3).unwrap();
        let b = alg.random(&mut rng, 2, 3, Mask::PLUS, 3);
        let h = hankel_op(&alg, &b, Block::B, Sign::Minus, Some(Window::plus(4))).unwrap();
        assert_eq!(frobenius(&h.matrix), 0.0);
        let cm = alg.random(&mut rng, 3, 2, Mask::MINUS, 3);
        let h = hankel_op(&alg, &cm, Block::C, Sign::Plus, Some(Window::new(-4, -1))).unwrap();
        assert_eq!(frobenius(&h.matrix), 0.0);
    }

    #[test]
    fn product_rules_random_sequences() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let alg = SequenceAlgebra::new(2, 3).unwrap();
        let pairs = [(Block::A, Block::A), (Block::B, Block::C), (Block::C, Block::A), (Block::D, Block::C), (Block::A, Block::B)];
        for (rb, pb) in pairs {
            let (rr, rc) = rb.shape(2, 3);
            let (pr, pc) = pb.shape(2, 3);
            let rho = alg.random(&mut rng, rr, rc, Mask::ALL, 3);
            let phi = alg.random(&mut rng, pr, pc, Mask::ALL, 3);
            let rep = verify_product_rules(&alg, &rho, rb, &phi, pb, 5).unwrap();
            assert!(rep.max() < 1e-12, "{rb:?}{pb:?}: {rep:?}");
        }
        assert!(verify_product_rules(&alg, &MatSeq::identity(2), Block::A, &MatSeq::identity(2), Block::D, 2).is_err());
    }

    #[test]
    fn product_rules_matrix_instance() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let alg = TriangularAlgebra::new(4).unwrap();
        let rho = alg.random(&mut rng, 4, 4, Mask::ALL, 0);
        let phi = alg.random(&mut rng, 4, 4, Mask::ALL, 0);
        let rep = verify_product_rules(&alg, &rho, Block::C, &phi, Block::B, 0).unwrap();
        assert!(rep.max() < 1e-12, "{rep:?}");
    }

    #[test]
    fn apply_splits_columns() {
        let alg = SequenceAlgebra::new(1, 2).unwrap();
        let g = MatSeq::monomial(1, ComplexMatrix::from_row_slice(1, 2, &[ONE, c(2.0, 0.0)]));
        let h = hankel_op(&alg, &g, Block::B, Sign::Plus, Some(Window::minus(1))).unwrap();
        let ed = MatSeq::identity(2);
        assert_eq!(apply(&alg, &h, &ed).unwrap(), g);
    }
}

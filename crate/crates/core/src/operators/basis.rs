use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{Mask, Subspace};
use crate::error::{Error, Result};
use crate::linalg::{frobenius, identity, zeros, ComplexMatrix, ComplexVector, C64};

/// Inclusive coefficient range [lo, hi]; empty when lo > hi.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Window {
        Window { lo, hi }
    }

    /// [0, n]
    pub fn plus(n: usize) -> Window {
        Window::new(0, n as i64)
    }

    /// [-n, 0]
    pub fn minus(n: usize) -> Window {
        Window::new(-(n as i64), 0)
    }

    pub fn len(&self) -> usize {
        if self.hi < self.lo {
            0
        } else {
            (self.hi - self.lo + 1) as usize
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, j: i64) -> bool {
        self.lo <= j && j <= self.hi
    }

    pub fn covers(&self, other: &Window) -> bool {
        other.is_empty() || (self.lo <= other.lo && other.hi <= self.hi)
    }

    pub fn hull(&self, other: &Window) -> Window {
        if self.is_empty() {
            *other
        } else if other.is_empty() {
            *self
        } else {
            Window::new(self.lo.min(other.lo), self.hi.max(other.hi))
        }
    }

    /// Clip to the index set of a signed half.
    pub fn clip(&self, sub: Subspace) -> Window {
        let (lo, hi) = sub.index_bounds();
        let nlo = lo.map_or(self.lo, |b| self.lo.max(b));
        let nhi = hi.map_or(self.hi, |b| self.hi.min(b));
        Window::new(nlo, nhi)
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "[]")
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

/// One vectorized half: which subspace, the shape of the column block, and the
/// coefficient window (sequences only).
///
/// Coordinates of a sequence segment run over j ascending, then row-major
/// entries of the rows x cols coefficient. Matrix segments enumerate the
/// entries of the mask row-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Segment {
    pub sub: Subspace,
    pub rows: usize,
    pub cols: usize,
    pub window: Option<Window>,
}

impl Segment {
    pub fn dim(&self) -> usize {
        match self.window {
            Some(w) => w.len() * self.rows * self.cols,
            None => self.matrix_entries().len(),
        }
    }

    /// Row-major entry list of a matrix segment.
    pub fn matrix_entries(&self) -> Vec<(usize, usize)> {
        let mask: Mask = self.sub.mask();
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if mask.keeps(j as i64 - i as i64) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn with_window(&self, window: Window) -> Segment {
        Segment { window: Some(window), ..*self }
    }

    fn same_space(&self, other: &Segment) -> bool {
        self.sub == other.sub && self.rows == other.rows && self.cols == other.cols
    }

    /// Position in `other` of each coordinate of `self`, when present.
    pub fn index_map(&self, other: &Segment) -> Result<Vec<Option<usize>>> {
        if !self.same_space(other) || self.window.is_some() != other.window.is_some() {
            return Err(Error::BasisMismatch { left: self.to_string(), right: other.to_string() });
        }
        match (self.window, other.window) {
            (Some(a), Some(b)) => {
                let per = self.rows * self.cols;
                let mut out = Vec::with_capacity(self.dim());
                for j in a.lo..=a.hi {
                    for k in 0..per {
                        out.push(if b.contains(j) { Some((j - b.lo) as usize * per + k) } else { None });
                    }
                }
                Ok(out)
            }
            _ => Ok((0..self.dim()).map(Some).collect()),
        }
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}x{})", self.sub, self.rows, self.cols)?;
        if let Some(w) = self.window {
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

/// Ordered direct sum of segments.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Basis {
    pub segments: Vec<Segment>,
}

impl Basis {
    pub fn single(seg: Segment) -> Basis {
        Basis { segments: vec![seg] }
    }

    pub fn pair(first: Segment, second: Segment) -> Basis {
        Basis { segments: vec![first, second] }
    }

    pub fn dim(&self) -> usize {
        self.segments.iter().map(Segment::dim).sum()
    }

    pub fn offset(&self, k: usize) -> usize {
        self.segments[..k].iter().map(Segment::dim).sum()
    }

    /// The only segment; errors for direct sums.
    pub fn segment(&self) -> Result<&Segment> {
        match self.segments.as_slice() {
            [s] => Ok(s),
            _ => Err(Error::Precondition(format!("expected a single segment, found {self}"))),
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, s) in self.segments.iter().enumerate() {
            if k > 0 {
                f.write_str(" (+) ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Dense matrix of a linear map between vectorized halves.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockOperator {
    pub matrix: ComplexMatrix,
    pub domain: Basis,
    pub codomain: Basis,
}

impl BlockOperator {
    pub fn new(matrix: ComplexMatrix, domain: Basis, codomain: Basis) -> Result<BlockOperator> {
        if matrix.nrows() != codomain.dim() || matrix.ncols() != domain.dim() {
            return Err(Error::DimensionMismatch {
                op: "BlockOperator::new",
                left: (matrix.nrows(), matrix.ncols()),
                right: (codomain.dim(), domain.dim()),
            });
        }
        Ok(BlockOperator { matrix, domain, codomain })
    }

    pub fn identity(basis: Basis) -> BlockOperator {
        let n = basis.dim();
        BlockOperator { matrix: identity(n), domain: basis.clone(), codomain: basis }
    }

    pub fn zero(domain: Basis, codomain: Basis) -> BlockOperator {
        BlockOperator { matrix: zeros(codomain.dim(), domain.dim()), domain, codomain }
    }

    fn require_same(&self, other: &BlockOperator) -> Result<()> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(Error::BasisMismatch {
                left: format!("{} -> {}", self.domain, self.codomain),
                right: format!("{} -> {}", other.domain, other.codomain),
            });
        }
        Ok(())
    }

    /// self after rhs.
    pub fn compose(&self, rhs: &BlockOperator) -> Result<BlockOperator> {
        if self.domain != rhs.codomain {
            return Err(Error::BasisMismatch { left: self.domain.to_string(), right: rhs.codomain.to_string() });
        }
        Ok(BlockOperator { matrix: &self.matrix * &rhs.matrix, domain: rhs.domain.clone(), codomain: self.codomain.clone() })
    }

    pub fn add(&self, other: &BlockOperator) -> Result<BlockOperator> {
        self.require_same(other)?;
        Ok(BlockOperator { matrix: &self.matrix + &other.matrix, ..self.clone() })
    }

    pub fn sub(&self, other: &BlockOperator) -> Result<BlockOperator> {
        self.require_same(other)?;
        Ok(BlockOperator { matrix: &self.matrix - &other.matrix, ..self.clone() })
    }

    pub fn scale(&self, s: C64) -> BlockOperator {
        BlockOperator { matrix: self.matrix.map(|z| z * s), ..self.clone() }
    }

    pub fn neg(&self) -> BlockOperator {
        self.scale(C64::new(-1.0, 0.0))
    }

    /// Conjugate transpose; the adjoint when both bases are orthonormal.
    pub fn adjoint(&self) -> BlockOperator {
        BlockOperator { matrix: self.matrix.adjoint(), domain: self.codomain.clone(), codomain: self.domain.clone() }
    }

    pub fn norm(&self) -> f64 {
        frobenius(&self.matrix)
    }

    /// Frobenius distance to another operator on the same bases.
    pub fn distance(&self, other: &BlockOperator) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    /// ||self - I||_F; self must be square with equal bases.
    pub fn identity_residual(&self) -> Result<f64> {
        if self.domain != self.codomain {
            return Err(Error::BasisMismatch { left: self.domain.to_string(), right: self.codomain.to_string() });
        }
        Ok(frobenius(&(&self.matrix - identity(self.matrix.nrows()))))
    }

    pub fn apply_vec(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if v.len() != self.domain.dim() {
            return Err(Error::DimensionMismatch { op: "apply", left: self.matrix.shape(), right: (v.len(), 1) });
        }
        Ok(&self.matrix * v)
    }

    /// Sub-operator from domain segment `j` to codomain segment `i`.
    pub fn block(&self, i: usize, j: usize) -> BlockOperator {
        let (r0, c0) = (self.codomain.offset(i), self.domain.offset(j));
        let (seg_i, seg_j) = (self.codomain.segments[i], self.domain.segments[j]);
        BlockOperator {
            matrix: self.matrix.view((r0, c0), (seg_i.dim(), seg_j.dim())).into_owned(),
            domain: Basis::single(seg_j),
            codomain: Basis::single(seg_i),
        }
    }

    /// Assemble from a grid of single-segment blocks.
    pub fn from_blocks(grid: &[Vec<BlockOperator>]) -> Result<BlockOperator> {
        let nrow = grid.len();
        let ncol = grid.first().map_or(0, Vec::len);
        if nrow == 0 || ncol == 0 || grid.iter().any(|r| r.len() != ncol) {
            return Err(Error::Precondition("block grid must be rectangular and nonempty".into()));
        }
        let rows: Vec<Segment> = grid.iter().map(|r| r[0].codomain.segment().copied()).collect::<Result<_>>()?;
        let cols: Vec<Segment> = grid[0].iter().map(|b| b.domain.segment().copied()).collect::<Result<_>>()?;
        let domain = Basis { segments: cols };
        let codomain = Basis { segments: rows };
        let mut m = zeros(codomain.dim(), domain.dim());
        for (i, row) in grid.iter().enumerate() {
            for (j, b) in row.iter().enumerate() {
                if *b.codomain.segment()? != codomain.segments[i] || *b.domain.segment()? != domain.segments[j] {
                    return Err(Error::BasisMismatch {
                        left: format!("block ({i},{j}) {} -> {}", b.domain, b.codomain),
                        right: format!("{} -> {}", domain.segments[j], codomain.segments[i]),
                    });
                }
                m.view_mut((codomain.offset(i), domain.offset(j)), (b.matrix.nrows(), b.matrix.ncols()))
                    .copy_from(&b.matrix);
            }
        }
        BlockOperator::new(m, domain, codomain)
    }

    /// Re-express the codomain on another window of the same half.
    /// Returns the operator and the norm of the rows that fell outside.
    pub fn with_codomain(&self, target: Segment) -> Result<(BlockOperator, f64)> {
        let from = *self.codomain.segment()?;
        let map = from.index_map(&target)?;
        let mut m = zeros(target.dim(), self.matrix.ncols());
        let mut dropped = 0.0;
        for (r, dest) in map.iter().enumerate() {
            match dest {
                Some(d) => m.row_mut(*d).copy_from(&self.matrix.row(r)),
                None => dropped += self.matrix.row(r).iter().map(|z| z.norm_sqr()).sum::<f64>(),
            }
        }
        Ok((BlockOperator { matrix: m, domain: self.domain.clone(), codomain: Basis::single(target) }, dropped.sqrt()))
    }

    /// Re-express the domain on another window; columns outside are dropped,
    /// new columns are zero. Returns the norm of dropped columns.
    pub fn with_domain(&self, target: Segment) -> Result<(BlockOperator, f64)> {
        let from = *self.domain.segment()?;
        let map = from.index_map(&target)?;
        let mut m = zeros(self.matrix.nrows(), target.dim());
        let mut dropped = 0.0;
        for (c, dest) in map.iter().enumerate() {
            match dest {
                Some(d) => m.column_mut(*d).copy_from(&self.matrix.column(c)),
                None => dropped += self.matrix.column(c).iter().map(|z| z.norm_sqr()).sum::<f64>(),
            }
        }
        Ok((BlockOperator { matrix: m, domain: Basis::single(target), codomain: self.codomain.clone() }, dropped.sqrt()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn seq(sub: Subspace, lo: i64, hi: i64) -> Segment {
        Segment { sub, rows: 2, cols: 1, window: Some(Window::new(lo, hi)) }
    }

    #[test]
    fn window_basics() {
        assert_eq!(Window::new(1, 0).len(), 0);
        assert_eq!(Window::plus(3).len(), 4);
        assert!(Window::plus(3).covers(&Window::new(1, 2)));
        assert_eq!(Window::new(-4, 5).clip(Subspace::YMinus), Window::new(-4, 0));
        assert_eq!(Window::new(-4, 5).clip(Subspace::YPlus), Window::new(1, 5));
    }

    #[test]
    fn matrix_segment_dims() {
        let up = Segment { sub: Subspace::XPlus, rows: 3, cols: 3, window: None };
        let sl = Segment { sub: Subspace::XMinus, rows: 3, cols: 3, window: None };
        assert_eq!(up.dim(), 6);
        assert_eq!(sl.dim(), 3);
        assert_eq!(up.matrix_entries()[..3], [(0, 0), (0, 1), (0, 2)]);
    }

    #[test]
    fn codomain_reindex_reports_drops() {
        let dom = seq(Subspace::XPlus, 0, 0);
        let big = seq(Subspace::XPlus, 0, 1);
        let m = ComplexMatrix::from_fn(4, 2, |i, j| c((i * 2 + j) as f64, 0.0));
        let op = BlockOperator::new(m, Basis::single(dom), Basis::single(big)).unwrap();
        let (small, dropped) = op.with_codomain(dom).unwrap();
        assert_eq!(small.matrix.nrows(), 2);
        assert!((dropped - (16.0f64 + 25.0 + 36.0 + 49.0).sqrt()).abs() < 1e-12);
        let (back, none) = small.with_codomain(big).unwrap();
        assert_eq!(none, 0.0);
        assert_eq!(back.matrix.row(3).iter().map(|z| z.norm()).sum::<f64>(), 0.0);
    }

    #[test]
    fn compose_checks_bases() {
        let a = BlockOperator::identity(Basis::single(seq(Subspace::XPlus, 0, 1)));
        let b = BlockOperator::identity(Basis::single(seq(Subspace::XPlus, 0, 2)));
        assert!(matches!(a.compose(&b), Err(Error::BasisMismatch { .. })));
        assert!(a.compose(&a).is_ok());
    }
}

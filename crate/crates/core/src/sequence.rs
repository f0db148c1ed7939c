//! Matrix trigonometric polynomials: finitely supported coefficient maps j -> C^{rows x cols}.
//!
//! The split is by index sign: minus0 = j < 0, diag = j = 0, plus0 = j > 0.
//! Vectors of X and Y are handled one column at a time.

use std::collections::BTreeMap;

use rand::RngCore;

use crate::algebra::{Algebra, InstanceKind, Mask, PartTag, Subspace};
use crate::error::{Error, Result};
use crate::linalg::{
    complex_gaussian, condition_number, eigenvalues, frobenius, inverse, is_invertible, zeros, ComplexMatrix, ComplexVector,
    C64, ONE,
};
use crate::operators::{Segment, Window};

#[derive(Clone, Debug, PartialEq)]
pub struct MatSeq {
    rows: usize,
    cols: usize,
    coeffs: BTreeMap<i64, ComplexMatrix>,
}

impl MatSeq {
    pub fn zero(rows: usize, cols: usize) -> MatSeq {
        MatSeq { rows, cols, coeffs: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> MatSeq {
        MatSeq::monomial(0, ComplexMatrix::identity(n, n))
    }

    pub fn constant(m: ComplexMatrix) -> MatSeq {
        MatSeq::monomial(0, m)
    }

    /// m z^j
    pub fn monomial(j: i64, m: ComplexMatrix) -> MatSeq {
        let mut s = MatSeq::zero(m.nrows(), m.ncols());
        s.insert(j, m);
        s
    }

    pub fn from_coeffs<I: IntoIterator<Item = (i64, ComplexMatrix)>>(rows: usize, cols: usize, items: I) -> Result<MatSeq> {
        let mut s = MatSeq::zero(rows, cols);
        for (j, m) in items {
            if m.shape() != (rows, cols) {
                return Err(Error::DimensionMismatch { op: "MatSeq coefficient", left: m.shape(), right: (rows, cols) });
            }
            s.accumulate(j, &m);
        }
        Ok(s)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Nonzero coefficients in increasing j.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &ComplexMatrix)> {
        self.coeffs.iter().map(|(j, m)| (*j, m))
    }

    pub fn coeff(&self, j: i64) -> ComplexMatrix {
        self.coeffs.get(&j).cloned().unwrap_or_else(|| zeros(self.rows, self.cols))
    }

    /// (lowest, highest) index with a nonzero coefficient.
    pub fn support(&self) -> Option<(i64, i64)> {
        Some((*self.coeffs.keys().next()?, *self.coeffs.keys().next_back()?))
    }

    /// Max |j| over the support (0 for the zero sequence).
    pub fn degree(&self) -> usize {
        self.support().map_or(0, |(lo, hi)| lo.unsigned_abs().max(hi.unsigned_abs()) as usize)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn insert(&mut self, j: i64, m: ComplexMatrix) {
        if m.iter().any(|z| *z != C64::new(0.0, 0.0)) {
            self.coeffs.insert(j, m);
        } else {
            self.coeffs.remove(&j);
        }
    }

    fn accumulate(&mut self, j: i64, m: &ComplexMatrix) {
        let next = match self.coeffs.get(&j) {
            Some(old) => old + m,
            None => m.clone(),
        };
        self.insert(j, next);
    }

    pub fn scale(&self, s: C64) -> MatSeq {
        let mut out = MatSeq::zero(self.rows, self.cols);
        for (j, m) in self.iter() {
            out.insert(j, m.map(|z| z * s));
        }
        out
    }

    pub fn add(&self, other: &MatSeq) -> Result<MatSeq> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch { op: "seq add", left: self.shape(), right: other.shape() });
        }
        let mut out = self.clone();
        for (j, m) in other.iter() {
            out.accumulate(j, m);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MatSeq) -> Result<MatSeq> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// l2 norm of all coefficients.
    pub fn norm(&self) -> f64 {
        self.coeffs.values().map(|m| frobenius(m).powi(2)).sum::<f64>().sqrt()
    }

    /// Value sum_j c_j z^j at a point z.
    pub fn eval(&self, z: C64) -> ComplexMatrix {
        let mut out = zeros(self.rows, self.cols);
        for (j, m) in self.iter() {
            out += m.map(|x| x * z.powi(j as i32));
        }
        out
    }

    /// Single column as its own sequence.
    pub fn column(&self, c: usize) -> MatSeq {
        let mut out = MatSeq::zero(self.rows, 1);
        for (j, m) in self.iter() {
            out.insert(j, ComplexMatrix::from_column_slice(self.rows, 1, m.column(c).as_slice()));
        }
        out
    }
}

/// (f g)_k = sum_j f_j g_{k-j}
pub fn seq_conv(f: &MatSeq, g: &MatSeq) -> Result<MatSeq> {
    if f.cols != g.rows {
        return Err(Error::DimensionMismatch { op: "seq_conv", left: f.shape(), right: g.shape() });
    }
    let mut out = MatSeq::zero(f.rows, g.cols);
    for (j1, m1) in f.iter() {
        for (j2, m2) in g.iter() {
            out.accumulate(j1 + j2, &(m1 * m2));
        }
    }
    Ok(out)
}

/// (f*)_j = (f_{-j})*
pub fn seq_adjoint(f: &MatSeq) -> MatSeq {
    let mut out = MatSeq::zero(f.cols, f.rows);
    for (j, m) in f.iter() {
        out.insert(-j, m.adjoint());
    }
    out
}

/// Index sets of the coefficient spaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SeqSpaceTag {
    /// j >= 0
    WPlus,
    /// j <= 0
    WMinus,
    /// j = 0
    WDiag,
    /// j >= 1
    WPlus0,
    /// j <= -1
    WMinus0,
}

impl SeqSpaceTag {
    pub fn mask(self) -> Mask {
        match self {
            SeqSpaceTag::WPlus => Mask::PLUS,
            SeqSpaceTag::WMinus => Mask::MINUS,
            SeqSpaceTag::WDiag => Mask::DIAG,
            SeqSpaceTag::WPlus0 => Mask::PLUS0,
            SeqSpaceTag::WMinus0 => Mask::MINUS0,
        }
    }
}

fn mask_seq(f: &MatSeq, mask: Mask) -> MatSeq {
    MatSeq { rows: f.rows, cols: f.cols, coeffs: f.coeffs.iter().filter(|(j, _)| mask.keeps(**j)).map(|(j, m)| (*j, m.clone())).collect() }
}

pub fn seq_project(f: &MatSeq, tag: SeqSpaceTag) -> MatSeq {
    mask_seq(f, tag.mask())
}

/// Multiply by z^k.
pub fn seq_shift(f: &MatSeq, k: i64) -> MatSeq {
    MatSeq { rows: f.rows, cols: f.cols, coeffs: f.coeffs.iter().map(|(j, m)| (j + k, m.clone())).collect() }
}

/// W^{p x p}, W^{p x q}, W^{q x p}, W^{q x q} with the index-sign splitting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SequenceAlgebra {
    p: usize,
    q: usize,
}

impl SequenceAlgebra {
    pub fn new(p: usize, q: usize) -> Result<SequenceAlgebra> {
        if p == 0 || q == 0 {
            return Err(Error::Instance("sequence instance needs p, q >= 1".into()));
        }
        Ok(SequenceAlgebra { p, q })
    }
}

/// Window used when a segment is requested without one: the index nearest zero.
fn default_window(sub: Subspace) -> Window {
    match sub {
        Subspace::XPlus | Subspace::YMinus => Window::new(0, 0),
        Subspace::XMinus => Window::new(-1, -1),
        Subspace::YPlus => Window::new(1, 1),
    }
}

impl Algebra for SequenceAlgebra {
    type Elem = MatSeq;

    fn kind(&self) -> InstanceKind {
        InstanceKind::Sequence
    }

    fn p(&self) -> usize {
        self.p
    }

    fn q(&self) -> usize {
        self.q
    }

    fn shape(&self, x: &MatSeq) -> (usize, usize) {
        x.shape()
    }

    fn zeros(&self, rows: usize, cols: usize) -> MatSeq {
        MatSeq::zero(rows, cols)
    }

    fn identity(&self, n: usize) -> MatSeq {
        MatSeq::identity(n)
    }

    fn add(&self, x: &MatSeq, y: &MatSeq) -> Result<MatSeq> {
        x.add(y)
    }

    fn sub(&self, x: &MatSeq, y: &MatSeq) -> Result<MatSeq> {
        x.sub(y)
    }

    fn scale(&self, x: &MatSeq, s: C64) -> MatSeq {
        x.scale(s)
    }

    fn mul(&self, x: &MatSeq, y: &MatSeq) -> Result<MatSeq> {
        seq_conv(x, y)
    }

    fn adjoint(&self, x: &MatSeq) -> MatSeq {
        seq_adjoint(x)
    }

    fn project_mask(&self, x: &MatSeq, mask: Mask) -> MatSeq {
        mask_seq(x, mask)
    }

    fn norm(&self, x: &MatSeq) -> f64 {
        x.norm()
    }

    fn degree(&self, x: &MatSeq) -> usize {
        x.degree()
    }

    fn block_width(&self) -> usize {
        1
    }

    fn column_blocks(&self, x: &MatSeq) -> Result<Vec<MatSeq>> {
        Ok((0..x.cols).map(|c| x.column(c)).collect())
    }

    fn hcat(&self, blocks: &[MatSeq]) -> Result<MatSeq> {
        let first = blocks.first().ok_or_else(|| Error::Precondition("hcat of nothing".into()))?;
        let rows = first.rows;
        if let Some(bad) = blocks.iter().find(|b| b.rows != rows) {
            return Err(Error::DimensionMismatch { op: "hcat", left: first.shape(), right: bad.shape() });
        }
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut idx: Vec<i64> = blocks.iter().flat_map(|b| b.coeffs.keys().copied()).collect();
        idx.sort_unstable();
        idx.dedup();
        let mut out = MatSeq::zero(rows, cols);
        for j in idx {
            let mut m = zeros(rows, cols);
            let mut c0 = 0;
            for b in blocks {
                m.view_mut((0, c0), (rows, b.cols)).copy_from(&b.coeff(j));
                c0 += b.cols;
            }
            out.insert(j, m);
        }
        Ok(out)
    }

    fn segment(&self, sub: Subspace, window: Option<Window>) -> Segment {
        let rows = match sub.letter() {
            crate::algebra::Letter::X => self.p,
            crate::algebra::Letter::Y => self.q,
        };
        let w = window.unwrap_or_else(|| default_window(sub)).clip(sub);
        Segment { sub, rows, cols: 1, window: Some(w) }
    }

    fn basis(&self, seg: &Segment) -> Vec<MatSeq> {
        let w = seg.window.unwrap_or_else(|| default_window(seg.sub));
        let mut out = Vec::with_capacity(seg.dim());
        for j in w.lo..=w.hi {
            for i in 0..seg.rows {
                for c in 0..seg.cols {
                    let mut e = zeros(seg.rows, seg.cols);
                    e[(i, c)] = ONE;
                    out.push(MatSeq::monomial(j, e));
                }
            }
        }
        out
    }

    fn coords(&self, seg: &Segment, x: &MatSeq) -> Result<ComplexVector> {
        if x.shape() != (seg.rows, seg.cols) {
            return Err(Error::DimensionMismatch { op: "coords", left: x.shape(), right: (seg.rows, seg.cols) });
        }
        let w = seg.window.unwrap_or_else(|| default_window(seg.sub));
        let outside: f64 = x.iter().filter(|(j, _)| !w.contains(*j)).map(|(_, m)| frobenius(m).powi(2)).sum();
        if outside != 0.0 {
            return Err(Error::OutsideSegment { segment: *seg, mass: outside.sqrt() });
        }
        let per = seg.rows * seg.cols;
        let mut v = ComplexVector::zeros(seg.dim());
        for (j, m) in x.iter() {
            let base = (j - w.lo) as usize * per;
            for i in 0..seg.rows {
                for c in 0..seg.cols {
                    v[base + i * seg.cols + c] = m[(i, c)];
                }
            }
        }
        Ok(v)
    }

    fn from_coords(&self, seg: &Segment, v: &ComplexVector) -> MatSeq {
        let w = seg.window.unwrap_or_else(|| default_window(seg.sub));
        let per = seg.rows * seg.cols;
        let mut out = MatSeq::zero(seg.rows, seg.cols);
        for (k, j) in (w.lo..=w.hi).enumerate() {
            let m = ComplexMatrix::from_fn(seg.rows, seg.cols, |i, c| v[k * per + i * seg.cols + c]);
            out.insert(j, m);
        }
        out
    }

    fn image_window(&self, rho: &MatSeq, domain: &Segment, target: Subspace) -> Option<Window> {
        let w = domain.window.unwrap_or_else(|| default_window(domain.sub));
        let empty = match target.index_bounds() {
            (Some(lo), _) => Window::new(lo, lo - 1),
            (None, Some(hi)) => Window::new(hi + 1, hi),
            (None, None) => Window::new(0, -1),
        };
        match rho.support() {
            Some((a, b)) if !w.is_empty() => {
                let img = Window::new(w.lo + a, w.hi + b).clip(target);
                Some(if img.is_empty() { empty } else { img })
            }
            _ => Some(empty),
        }
    }

    fn diag_inverse(&self, x: &MatSeq, rel: f64) -> Result<MatSeq> {
        let m0 = x.coeff(0);
        if !is_invertible(&m0, rel) {
            return Err(Error::Singular { what: "zeroth coefficient".into(), condition: condition_number(&m0) });
        }
        let inv = inverse(&m0).ok_or_else(|| Error::Singular { what: "zeroth coefficient".into(), condition: f64::INFINITY })?;
        Ok(MatSeq::constant(inv))
    }

    fn diag_condition(&self, x: &MatSeq) -> f64 {
        condition_number(&x.coeff(0))
    }

    /// Inverse in W+ exists iff det x(z) has no zero in the closed unit disk, i.e.
    /// the block companion matrix of the reversed polynomial has spectral radius < 1.
    fn invert_in_plus(&self, x: &MatSeq, degree: usize, rel: f64) -> Result<MatSeq> {
        let neg = mask_seq(x, Mask::MINUS0).norm();
        if neg != 0.0 {
            return Err(Error::NotInPart { what: "sequence".into(), part: PartTag::APlus, residual: neg });
        }
        let n = x.rows;
        if x.cols != n {
            return Err(Error::DimensionMismatch { op: "invert_in_plus", left: x.shape(), right: (n, n) });
        }
        let inv0 = self.diag_inverse(x, rel)?.coeff(0);
        let top = x.degree();
        if top > 0 {
            let size = n * top;
            let mut comp = zeros(size, size);
            for k in 1..=top {
                let a = -(&inv0 * x.coeff(k as i64));
                comp.view_mut((0, (k - 1) * n), (n, n)).copy_from(&a);
            }
            for k in 1..top {
                comp.view_mut((k * n, (k - 1) * n), (n, n)).copy_from(&ComplexMatrix::identity(n, n));
            }
            let radius = eigenvalues(&comp).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if radius >= 1.0 - rel {
                return Err(Error::Singular {
                    what: format!("symbol with a zero in the closed unit disk (companion spectral radius {radius:.6})"),
                    condition: f64::INFINITY,
                });
            }
        }
        let mut out: Vec<ComplexMatrix> = vec![inv0.clone()];
        for k in 1..=degree {
            let mut acc = zeros(n, n);
            for m in 1..=k.min(top) {
                acc += x.coeff(m as i64) * &out[k - m];
            }
            out.push(-(&inv0 * acc));
        }
        MatSeq::from_coeffs(n, n, out.into_iter().enumerate().map(|(k, m)| (k as i64, m)))
    }

    fn shift_unit(&self, n: usize, k: i64) -> Option<MatSeq> {
        Some(MatSeq::monomial(k, ComplexMatrix::identity(n, n)))
    }

    fn random(&self, rng: &mut dyn RngCore, rows: usize, cols: usize, mask: Mask, degree: usize) -> MatSeq {
        let mut out = MatSeq::zero(rows, cols);
        let d = degree as i64;
        for j in -d..=d {
            if mask.keeps(j) {
                let m = ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng));
                out.insert(j, m);
            }
        }
        out
    }
}

//! Square complex matrices split into strictly lower / diagonal / strictly upper parts.
//!
//! A = B = C = D = C^{p x p}. Plus halves keep i <= j (A+, B+), minus halves
//! keep i >= j (C-, D-), B- and C+ are the strict triangles.

use rand::RngCore;

use crate::algebra::{Algebra, InstanceKind, Mask, PartTag, Subspace};
use crate::error::{Error, Result};
use crate::linalg::{complex_gaussian, frobenius, zeros, ComplexMatrix, ComplexVector, C64, ONE};
use crate::operators::{Segment, Window};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TriangularAlgebra {
    p: usize,
}

impl TriangularAlgebra {
    pub fn new(p: usize) -> Result<TriangularAlgebra> {
        if p == 0 {
            return Err(Error::Instance("matrix instance needs p >= 1".into()));
        }
        Ok(TriangularAlgebra { p })
    }
}

/// x = strict_lower + diagonal + strict_upper.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangularPartition {
    pub strict_lower: ComplexMatrix,
    pub diagonal: ComplexMatrix,
    pub strict_upper: ComplexMatrix,
}

impl TriangularPartition {
    pub fn split(x: &ComplexMatrix) -> TriangularPartition {
        TriangularPartition {
            strict_lower: mask_matrix(x, Mask::MINUS0),
            diagonal: mask_matrix(x, Mask::DIAG),
            strict_upper: mask_matrix(x, Mask::PLUS0),
        }
    }

    pub fn join(&self) -> ComplexMatrix {
        &self.strict_lower + &self.diagonal + &self.strict_upper
    }
}

fn mask_matrix(x: &ComplexMatrix, mask: Mask) -> ComplexMatrix {
    ComplexMatrix::from_fn(x.nrows(), x.ncols(), |i, j| {
        if mask.keeps(j as i64 - i as i64) {
            x[(i, j)]
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Zero the entries outside the part's index set.
pub fn mat_project(x: &ComplexMatrix, part: PartTag) -> Result<ComplexMatrix> {
    if x.nrows() != x.ncols() {
        return Err(Error::WrongPart { part, shape: x.shape() });
    }
    Ok(mask_matrix(x, part.mask()))
}

/// Elementary matrices of the part, row-major over its index set.
pub fn mat_basis(part: PartTag, p: usize) -> Vec<ComplexMatrix> {
    let mask = part.mask();
    let mut out = Vec::new();
    for i in 0..p {
        for j in 0..p {
            if mask.keeps(j as i64 - i as i64) {
                let mut e = zeros(p, p);
                e[(i, j)] = ONE;
                out.push(e);
            }
        }
    }
    out
}

impl Algebra for TriangularAlgebra {
    type Elem = ComplexMatrix;

    fn kind(&self) -> InstanceKind {
        InstanceKind::TriangularMatrix
    }

    fn p(&self) -> usize {
        self.p
    }

    fn q(&self) -> usize {
        self.p
    }

    fn shape(&self, x: &ComplexMatrix) -> (usize, usize) {
        x.shape()
    }

    fn zeros(&self, rows: usize, cols: usize) -> ComplexMatrix {
        zeros(rows, cols)
    }

    fn identity(&self, n: usize) -> ComplexMatrix {
        ComplexMatrix::identity(n, n)
    }

    fn add(&self, x: &ComplexMatrix, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != y.shape() {
            return Err(Error::DimensionMismatch { op: "add", left: x.shape(), right: y.shape() });
        }
        Ok(x + y)
    }

    fn sub(&self, x: &ComplexMatrix, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != y.shape() {
            return Err(Error::DimensionMismatch { op: "sub", left: x.shape(), right: y.shape() });
        }
        Ok(x - y)
    }

    fn scale(&self, x: &ComplexMatrix, s: C64) -> ComplexMatrix {
        x.map(|z| z * s)
    }

    fn mul(&self, x: &ComplexMatrix, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.ncols() != y.nrows() {
            return Err(Error::DimensionMismatch { op: "mul", left: x.shape(), right: y.shape() });
        }
        Ok(x * y)
    }

    fn adjoint(&self, x: &ComplexMatrix) -> ComplexMatrix {
        x.adjoint()
    }

    fn project_mask(&self, x: &ComplexMatrix, mask: Mask) -> ComplexMatrix {
        mask_matrix(x, mask)
    }

    fn norm(&self, x: &ComplexMatrix) -> f64 {
        frobenius(x)
    }

    fn degree(&self, _x: &ComplexMatrix) -> usize {
        0
    }

    fn block_width(&self) -> usize {
        self.p
    }

    fn column_blocks(&self, x: &ComplexMatrix) -> Result<Vec<ComplexMatrix>> {
        if x.ncols() != self.p {
            return Err(Error::DimensionMismatch { op: "column_blocks", left: x.shape(), right: (x.nrows(), self.p) });
        }
        Ok(vec![x.clone()])
    }

    fn hcat(&self, blocks: &[ComplexMatrix]) -> Result<ComplexMatrix> {
        match blocks {
            [one] => Ok(one.clone()),
            _ => Err(Error::Precondition(format!("matrix instance joins exactly one block, got {}", blocks.len()))),
        }
    }

    fn segment(&self, sub: Subspace, _window: Option<Window>) -> Segment {
        Segment { sub, rows: self.p, cols: self.p, window: None }
    }

    fn basis(&self, seg: &Segment) -> Vec<ComplexMatrix> {
        seg.matrix_entries()
            .into_iter()
            .map(|(i, j)| {
                let mut e = zeros(seg.rows, seg.cols);
                e[(i, j)] = ONE;
                e
            })
            .collect()
    }

    fn coords(&self, seg: &Segment, x: &ComplexMatrix) -> Result<ComplexVector> {
        if x.shape() != (seg.rows, seg.cols) {
            return Err(Error::DimensionMismatch { op: "coords", left: x.shape(), right: (seg.rows, seg.cols) });
        }
        let outside = frobenius(&mask_matrix(x, seg.sub.mask().complement()));
        if outside != 0.0 {
            return Err(Error::OutsideSegment { segment: *seg, mass: outside });
        }
        let entries = seg.matrix_entries();
        Ok(ComplexVector::from_iterator(entries.len(), entries.iter().map(|&(i, j)| x[(i, j)])))
    }

    fn from_coords(&self, seg: &Segment, v: &ComplexVector) -> ComplexMatrix {
        let mut m = zeros(seg.rows, seg.cols);
        for (k, (i, j)) in seg.matrix_entries().into_iter().enumerate() {
            m[(i, j)] = v[k];
        }
        m
    }

    fn image_window(&self, _rho: &ComplexMatrix, _domain: &Segment, _target: Subspace) -> Option<Window> {
        None
    }

    fn diag_inverse(&self, x: &ComplexMatrix, rel: f64) -> Result<ComplexMatrix> {
        let n = x.nrows();
        let mags: Vec<f64> = (0..n).map(|i| x[(i, i)].norm()).collect();
        let hi = mags.iter().copied().fold(0.0, f64::max);
        let lo = mags.iter().copied().fold(f64::INFINITY, f64::min);
        if n > 0 && !(hi > 0.0 && lo > rel * hi) {
            return Err(Error::Singular { what: format!("diagonal {:?}", diag_entries(x)), condition: self.diag_condition(x) });
        }
        Ok(ComplexMatrix::from_fn(n, n, |i, j| if i == j { ONE / x[(i, i)] } else { C64::new(0.0, 0.0) }))
    }

    fn diag_condition(&self, x: &ComplexMatrix) -> f64 {
        let mags: Vec<f64> = (0..x.nrows()).map(|i| x[(i, i)].norm()).collect();
        let hi = mags.iter().copied().fold(0.0, f64::max);
        let lo = mags.iter().copied().fold(f64::INFINITY, f64::min);
        if mags.is_empty() {
            1.0
        } else if lo == 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }

    fn invert_in_plus(&self, x: &ComplexMatrix, _degree: usize, rel: f64) -> Result<ComplexMatrix> {
        let lower = frobenius(&mask_matrix(x, Mask::MINUS0));
        if lower != 0.0 {
            return Err(Error::NotInPart { what: "matrix".into(), part: PartTag::APlus, residual: lower });
        }
        self.diag_inverse(&mask_matrix(x, Mask::DIAG), rel)?;
        let inv = x
            .solve_upper_triangular(&ComplexMatrix::identity(x.nrows(), x.ncols()))
            .ok_or_else(|| Error::Singular { what: "upper triangular matrix".into(), condition: f64::INFINITY })?;
        Ok(mask_matrix(&inv, Mask::PLUS))
    }

    fn shift_unit(&self, _n: usize, _k: i64) -> Option<ComplexMatrix> {
        None
    }

    fn random(&self, rng: &mut dyn RngCore, rows: usize, cols: usize, mask: Mask, _degree: usize) -> ComplexMatrix {
        let mut m = zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if mask.keeps(j as i64 - i as i64) {
                    m[(i, j)] = complex_gaussian(rng);
                }
            }
        }
        m
    }
}

fn diag_entries(x: &ComplexMatrix) -> Vec<(f64, f64)> {
    (0..x.nrows()).map(|i| (x[(i, i)].re, x[(i, i)].im)).collect()
}

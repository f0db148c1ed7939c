//! Dense complex helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Real matrix lifted to complex, given row by row.
pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> ComplexMatrix {
    assert_eq!(data.len(), rows * cols);
    ComplexMatrix::from_fn(rows, cols, |i, j| c(data[i * cols + j], 0.0))
}

pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// sigma_max / sigma_min of a square matrix; infinite when singular, 1 for an empty matrix.
pub fn condition_number(m: &ComplexMatrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if m.nrows() == m.ncols() => {
            if lo == 0.0 {
                f64::INFINITY
            } else {
                hi / lo
            }
        }
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Square and sigma_min > rel * sigma_max.
pub fn is_invertible(m: &ComplexMatrix, rel: f64) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) => hi > 0.0 && lo > rel * hi,
        _ => true,
    }
}

pub fn inverse(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    if m.nrows() != m.ncols() {
        return None;
    }
    if m.nrows() == 0 {
        return Some(m.clone());
    }
    m.clone().lu().try_inverse()
}

pub fn solve(m: &ComplexMatrix, rhs: &ComplexMatrix) -> Option<ComplexMatrix> {
    if m.nrows() == 0 {
        return Some(rhs.clone());
    }
    m.clone().lu().solve(rhs)
}

/// Eigenvalues of a square complex matrix via the Schur form.
pub fn eigenvalues(m: &ComplexMatrix) -> Vec<C64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let t = m.clone().schur().unpack().1;
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Standard complex Gaussian, E|z|^2 = 1.
pub fn complex_gaussian(rng: &mut dyn RngCore) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condition_of_diagonal() {
        let m = real_matrix(2, 2, &[4.0, 0.0, 0.0, 0.5]);
        assert!((condition_number(&m) - 8.0).abs() < 1e-12);
        assert!(is_invertible(&m, 1e-8));
        let s = real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(!is_invertible(&s, 1e-8));
        assert!(condition_number(&s).is_infinite());
    }

    #[test]
    fn schur_eigenvalues_of_rotation() {
        let m = real_matrix(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let mut ev = eigenvalues(&m);
        ev.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((ev[0] - c(0.0, -1.0)).norm() < 1e-12);
        assert!((ev[1] - c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn inverse_and_solve_agree() {
        let m = ComplexMatrix::from_fn(3, 3, |i, j| c((i + 2 * j) as f64, if i == j { 3.0 } else { 0.0 }));
        let inv = inverse(&m).unwrap();
        let b = ComplexMatrix::from_fn(3, 2, |i, j| c(i as f64, j as f64));
        let x = solve(&m, &b).unwrap();
        assert!(frobenius(&(&inv * &b - &x)) < 1e-12);
    }
}

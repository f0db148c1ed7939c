//! Problem data {alpha, beta, gamma, delta} and numerical tolerances.

use serde::Serialize;

use crate::algebra::{Algebra, BlockElement, PartTag};
use crate::error::{Error, Result};
use crate::matrix::TriangularAlgebra;
use crate::sequence::SequenceAlgebra;

/// alpha in A+, beta in B+, gamma in C-, delta in D-.
#[derive(Clone, Debug, PartialEq)]
pub struct DataSet<A: Algebra> {
    alg: A,
    alpha: A::Elem,
    beta: A::Elem,
    gamma: A::Elem,
    delta: A::Elem,
}

impl<A: Algebra> DataSet<A> {
    /// Validates shapes and exact part membership.
    pub fn new(alg: A, alpha: A::Elem, beta: A::Elem, gamma: A::Elem, delta: A::Elem) -> Result<DataSet<A>> {
        for (name, x, part) in [
            ("alpha", &alpha, PartTag::APlus),
            ("beta", &beta, PartTag::BPlus),
            ("gamma", &gamma, PartTag::CMinus),
            ("delta", &delta, PartTag::DMinus),
        ] {
            let r = alg.part_residual(x, part)?;
            if r != 0.0 {
                return Err(Error::NotInPart { what: name.into(), part, residual: r });
            }
        }
        Ok(DataSet { alg, alpha, beta, gamma, delta })
    }

    /// alpha = e, beta = 0, gamma = 0, delta = e.
    pub fn unit(alg: A) -> DataSet<A> {
        let (p, q) = (alg.p(), alg.q());
        DataSet {
            alpha: alg.identity(p),
            beta: alg.zeros(p, q),
            gamma: alg.zeros(q, p),
            delta: alg.identity(q),
            alg,
        }
    }

    pub fn alg(&self) -> &A {
        &self.alg
    }

    pub fn alpha(&self) -> &A::Elem {
        &self.alpha
    }

    pub fn beta(&self) -> &A::Elem {
        &self.beta
    }

    pub fn gamma(&self) -> &A::Elem {
        &self.gamma
    }

    pub fn delta(&self) -> &A::Elem {
        &self.delta
    }

    pub fn a0(&self) -> A::Elem {
        self.alg.project_mask(&self.alpha, PartTag::ADiag.mask())
    }

    pub fn d0(&self) -> A::Elem {
        self.alg.project_mask(&self.delta, PartTag::DDiag.mask())
    }

    /// Q = [[alpha, beta], [gamma, delta]]
    pub fn q_block(&self) -> BlockElement<A::Elem> {
        BlockElement::new(self.alpha.clone(), self.beta.clone(), self.gamma.clone(), self.delta.clone())
    }

    /// Largest coefficient index over the four elements (0 for matrices).
    pub fn degree(&self) -> usize {
        [&self.alpha, &self.beta, &self.gamma, &self.delta].iter().map(|x| self.alg.degree(x)).max().unwrap_or(0)
    }

    /// Same data with beta replaced (membership re-validated).
    pub fn with_beta(&self, beta: A::Elem) -> Result<DataSet<A>> {
        DataSet::new(self.alg.clone(), self.alpha.clone(), beta, self.gamma.clone(), self.delta.clone())
    }
}

/// Data of either built-in instance.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyDataSet {
    Matrix(DataSet<TriangularAlgebra>),
    Sequence(DataSet<SequenceAlgebra>),
}

/// Numerical thresholds used throughout.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// relative tolerance for condition and identity residuals
    pub condition: f64,
    /// absolute floor under every relative tolerance
    pub floor: f64,
    /// invertible iff sigma_min > invertibility * sigma_max
    pub invertibility: f64,
    /// relative tolerance for the four inclusions of a solution
    pub inclusion: f64,
    /// dense oracle refuses beyond this condition number
    pub oracle_condition: f64,
    /// generator redraws beyond this condition number of Omega
    pub generator_condition: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            condition: 1e-9,
            floor: 1e-12,
            invertibility: 1e-8,
            inclusion: 1e-9,
            oracle_condition: 1e10,
            generator_condition: 1e6,
        }
    }
}

impl Tolerances {
    /// Override the condition and inclusion tolerances together.
    pub fn with_tolerance(tol: f64) -> Tolerances {
        Tolerances { condition: tol, inclusion: tol, ..Tolerances::default() }
    }

    /// max(rel * scale, floor)
    pub fn threshold(&self, rel: f64, scale: f64) -> f64 {
        (rel * scale).max(self.floor)
    }
}

//! Orthonormal polynomial evaluation and tensor-product bases.
//!
//! Univariate polynomials are evaluated by the forward three-term
//! recurrence in orthonormal normalization; no monomial coefficients are
//! ever formed. A basis couples a tensor measure with an index set and
//! exposes row evaluation in the set's graded-lex order.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::index_sets::IndexSet;
use crate::measures::{MeasureFamily1D, TensorMeasure};

/// Degree cap for univariate evaluation; high-degree Hermite/Laguerre
/// values overflow f64 well before recurrences lose accuracy.
pub const MAX_EVAL_DEGREE: usize = 200;

/// Value of the orthonormal polynomial of the given degree at `x`.
pub fn eval_univariate(fam: &MeasureFamily1D, degree: usize, x: f64) -> Result<f64> {
    let all = eval_univariate_all(fam, degree, x)?;
    Ok(all[degree])
}

/// Values of all orthonormal polynomials of degree 0..=max_degree at `x`,
/// from one pass of the recurrence.
pub fn eval_univariate_all(fam: &MeasureFamily1D, max_degree: usize, x: f64) -> Result<Vec<f64>> {
    if max_degree > MAX_EVAL_DEGREE {
        return Err(Error::InvalidParameter(format!(
            "degree {max_degree} exceeds the evaluation cap {MAX_EVAL_DEGREE}"
        )));
    }
    if !fam.contains(x) {
        return Err(Error::Domain(format!(
            "x = {x} outside the closed support of {}",
            fam.name()
        )));
    }
    let mut out = Vec::with_capacity(max_degree + 1);
    out.push(1.0);
    if max_degree == 0 {
        return Ok(out);
    }
    let mut prev = 0.0; // psi_{-1}
    let mut cur = 1.0; // psi_0
    let mut sqrt_b_k = 0.0; // sqrt(b_0) unused at k = 0
    for k in 0..max_degree {
        let (a_k, b_k) = fam.recurrence_coeffs(k);
        let (_, b_next) = fam.recurrence_coeffs(k + 1);
        let sqrt_b_next = b_next.sqrt();
        let next = ((x - a_k) * cur - sqrt_b_k * prev) / sqrt_b_next;
        out.push(next);
        prev = cur;
        cur = next;
        sqrt_b_k = sqrt_b_next;
        let _ = b_k;
    }
    Ok(out)
}

/// An ordered tensor-product orthonormal basis over an index set.
#[derive(Clone, Debug)]
pub struct OrthoBasis {
    measure: TensorMeasure,
    index_set: IndexSet,
    max_degree: Vec<u32>,
}

impl OrthoBasis {
    pub fn new(measure: TensorMeasure, index_set: IndexSet) -> Result<Self> {
        if measure.dim() != index_set.dim() {
            return Err(Error::DimensionMismatch {
                expected: measure.dim(),
                got: index_set.dim(),
            });
        }
        let max_degree = index_set.max_degree_per_dim();
        if max_degree.iter().any(|&d| d as usize > MAX_EVAL_DEGREE) {
            return Err(Error::InvalidParameter(format!(
                "index set degree exceeds the evaluation cap {MAX_EVAL_DEGREE}"
            )));
        }
        Ok(Self { measure, index_set, max_degree })
    }

    pub fn n(&self) -> usize {
        self.index_set.len()
    }

    pub fn dim(&self) -> usize {
        self.measure.dim()
    }

    pub fn measure(&self) -> &TensorMeasure {
        &self.measure
    }

    pub fn index_set(&self) -> &IndexSet {
        &self.index_set
    }

    pub fn max_degree_per_dim(&self) -> &[u32] {
        &self.max_degree
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree.iter().copied().max().unwrap_or(0)
    }

    /// Row (Psi_nu(x))_{nu in S} in index-set order.
    pub fn eval_row(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        let per_dim: Vec<Vec<f64>> = x
            .iter()
            .zip(self.measure.factors())
            .zip(&self.max_degree)
            .map(|((&xi, fam), &deg)| eval_univariate_all(fam, deg as usize, xi))
            .collect::<Result<_>>()?;
        let mut row = Vec::with_capacity(self.n());
        for idx in self.index_set.iter() {
            let mut v = 1.0;
            for (k, &nu_k) in idx.components().iter().enumerate() {
                v *= per_dim[k][nu_k as usize];
            }
            row.push(v);
        }
        Ok(row)
    }

    /// Quadrature Gram matrix; equals the identity when `q_per_dim`
    /// reaches the exactness threshold (max degree + 1).
    pub fn gram_matrix(&self, q_per_dim: usize) -> Result<DMatrix<f64>> {
        let quad = self.measure.tensor_gauss(q_per_dim)?;
        let n = self.n();
        let mut g = DMatrix::<f64>::zeros(n, n);
        for (node, &w) in quad.nodes.iter().zip(&quad.weights) {
            let row = self.eval_row(node)?;
            for i in 0..n {
                let wi = w * row[i];
                for j in i..n {
                    g[(i, j)] += wi * row[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                g[(i, j)] = g[(j, i)];
            }
        }
        Ok(g)
    }
}

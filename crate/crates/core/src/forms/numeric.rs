use nalgebra::{DMatrix, DVector};

use super::{bits, ChartRef, Form};
use crate::error::Result;
use crate::expr::{Compiled, Realizations};

/// A form whose coefficients are lowered for repeated numeric evaluation.
/// Values are passed in chart order.
#[derive(Clone, Debug)]
pub struct CompiledForm {
    chart: ChartRef,
    degree: usize,
    terms: Vec<(Vec<usize>, Compiled)>,
}

impl CompiledForm {
    pub fn new(form: &Form, real: &Realizations) -> Result<Self> {
        let chart = form.chart().clone();
        let terms = form
            .raw_terms()
            .iter()
            .map(|(m, c)| Ok((bits(*m).collect(), Compiled::new(c, chart.coords(), real)?)))
            .collect::<Result<_>>()?;
        Ok(CompiledForm { chart, degree: form.degree(), terms })
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient values keyed by coordinate positions.
    pub fn eval_terms(&self, x: &[f64]) -> Vec<(Vec<usize>, f64)> {
        self.terms.iter().map(|(i, c)| (i.clone(), c.eval(x))).collect()
    }

    /// A 1-form as a covector.
    pub fn covector(&self, x: &[f64]) -> DVector<f64> {
        assert_eq!(self.degree, 1);
        let mut v = DVector::zeros(self.chart.dim());
        for (idx, c) in &self.terms {
            v[idx[0]] = c.eval(x);
        }
        v
    }

    /// A 2-form as the antisymmetric matrix `A` with `ω(u, v) = uᵀ A v`.
    pub fn matrix(&self, x: &[f64]) -> DMatrix<f64> {
        assert_eq!(self.degree, 2);
        let n = self.chart.dim();
        let mut a = DMatrix::zeros(n, n);
        for (idx, c) in &self.terms {
            let v = c.eval(x);
            a[(idx[0], idx[1])] = v;
            a[(idx[1], idx[0])] = -v;
        }
        a
    }

    /// A 0-form or top form as its single scalar.
    pub fn scalar(&self, x: &[f64]) -> f64 {
        let full = self.chart.dim();
        self.terms
            .iter()
            .find(|(i, _)| i.len() == self.degree && (self.degree == 0 || self.degree == full))
            .map(|(_, c)| c.eval(x))
            .unwrap_or(0.0)
    }
}

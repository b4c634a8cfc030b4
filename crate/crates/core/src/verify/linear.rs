use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::expr::{Point, Realizations};
use crate::forms::{CompiledForm, Form};
use crate::report::VerificationReport;

/// Singular values below `RANK_THRESHOLD × σ_max` count as zero.
pub const RANK_THRESHOLD: f64 = 1e-10;

fn singular_values(m: &DMatrix<f64>) -> DVector<f64> {
    m.clone().svd(false, false).singular_values
}

/// Numeric rank with the relative cutoff `rel`.
pub fn numeric_rank(m: &DMatrix<f64>, rel: f64) -> usize {
    let s = singular_values(m);
    let max = s.max();
    if max == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > rel * max).count()
}

/// Unit vector spanning the kernel of an antisymmetric matrix. The sign is
/// fixed so that the largest component is positive.
pub fn kernel_direction(m: &DMatrix<f64>, rel: f64) -> Result<DVector<f64>> {
    let n = m.nrows();
    let svd = m.clone().svd(false, true);
    let s = &svd.singular_values;
    let max = s.max();
    if max == 0.0 {
        return Err(Error::KernelDimension(n));
    }
    let null = s.iter().filter(|&&v| v <= rel * max).count() + n.saturating_sub(s.len());
    if null != 1 {
        return Err(Error::KernelDimension(null));
    }
    let (k, _) = s.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    let vt = svd.v_t.expect("requested V^T");
    let mut v: DVector<f64> = vt.row(k).transpose();
    v /= v.norm();
    let lead = v.iter().fold(0.0f64, |a, &b| if b.abs() > a.abs() { b } else { a });
    if lead < 0.0 {
        v = -v;
    }
    Ok(v)
}

/// Null direction of a compiled 2-form at chart values `x`.
pub fn null_direction(tau: &CompiledForm, x: &[f64]) -> Result<DVector<f64>> {
    if tau.degree() != 2 {
        return Err(Error::WrongDegree { expected: 2, found: tau.degree() });
    }
    kernel_direction(&tau.matrix(x), RANK_THRESHOLD)
}

/// `‖ι_v τ‖` at `x`.
pub fn contraction_residual(tau: &CompiledForm, x: &[f64], v: &DVector<f64>) -> f64 {
    (tau.matrix(x).transpose() * v).norm()
}

/// Rank of `dη` restricted to `ker η` at `x`.
///
/// With `P` the orthogonal projector onto `ker η`, the restriction has the
/// same rank as `Pᵀ dη P`.
pub fn rank_on_kernel_at(eta: &CompiledForm, deta: &CompiledForm, x: &[f64], rel: f64) -> Result<usize> {
    let a = eta.covector(x);
    let norm2 = a.norm_squared();
    if norm2 == 0.0 || !norm2.is_finite() {
        return Err(Error::VanishingForm);
    }
    let n = a.len();
    let p = DMatrix::identity(n, n) - &a * a.transpose() / norm2;
    let b = deta.matrix(x);
    Ok(numeric_rank(&(p.transpose() * b * &p), rel))
}

pub fn rank_on_kernel(eta: &Form, real: &Realizations, p: &Point) -> Result<usize> {
    if eta.degree() != 1 {
        return Err(Error::WrongDegree { expected: 1, found: eta.degree() });
    }
    let x = eta.chart().values(p)?;
    let e = CompiledForm::new(eta, real)?;
    let de = CompiledForm::new(&eta.d(), real)?;
    rank_on_kernel_at(&e, &de, &x, RANK_THRESHOLD)
}

/// Straight path `base + s·tangent`, sampled at `s = lo + (hi-lo)·i/samples`
/// for `i = 1..=samples` (the start is skipped).
#[derive(Clone, Debug)]
pub struct Path {
    pub base: Vec<f64>,
    pub tangent: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
}

impl Path {
    pub fn samples(&self, n: usize) -> Vec<Vec<f64>> {
        (1..=n)
            .map(|i| {
                let s = self.lo + (self.hi - self.lo) * i as f64 / n as f64;
                self.base.iter().zip(&self.tangent).map(|(b, t)| b + s * t).collect()
            })
            .collect()
    }
}

/// Checks that the path tangent is orthogonal to `Null(τ)` at every sample.
/// With `span`, also records how far the null direction leaves the span of
/// the given coordinate axes.
pub fn accessibility_check(
    tau: &CompiledForm,
    path: &Path,
    samples: usize,
    tol: f64,
    span: Option<&[usize]>,
) -> VerificationReport {
    let start = Instant::now();
    let chart = tau.chart().clone();
    let mut r = VerificationReport::new("accessibility").param("samples", samples).param("tol", tol);
    r.passed = true;
    let (mut worst, mut worst_span, mut worst_null) = (0.0f64, 0.0f64, 0.0f64);
    let tangent = DVector::from_vec(path.tangent.clone());
    let tn = tangent.norm();
    if tn == 0.0 {
        r.fail("path tangent is zero");
        return r;
    }
    for x in path.samples(samples) {
        let v = match null_direction(tau, &x) {
            Ok(v) => v,
            Err(e) => {
                r.fail(format!("{e} at {:?}", chart.point(&x).0));
                continue;
            }
        };
        worst_null = worst_null.max(contraction_residual(tau, &x, &v));
        let res = v.dot(&tangent).abs() / tn;
        if res > worst {
            worst = res;
            r.witness = Some(chart.point(&x).0);
        }
        if let Some(span) = span {
            let outside: f64 = (0..v.len()).filter(|i| !span.contains(i)).map(|i| v[i] * v[i]).sum();
            worst_span = worst_span.max(outside.sqrt());
        }
    }
    r.residuals.insert("perpendicular".into(), worst);
    r.residuals.insert("contraction".into(), worst_null);
    if span.is_some() {
        r.residuals.insert("span".into(), worst_span);
        if worst_span >= tol {
            r.fail(format!("null direction leaves the span by {worst_span:e}"));
        }
    }
    if worst >= tol {
        r.fail(format!("tangent meets the null direction: residual {worst:e}"));
    }
    r.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    r
}

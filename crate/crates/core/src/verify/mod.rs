//! Contactness and confoliation checks, symbolic where the question is an
//! identity and grid-based where it is an inequality. Grid results are
//! evidence on the sampled points only; reports say so.

mod grid;
mod linear;

use std::collections::BTreeMap;
use std::str::FromStr;
use std::time::Instant;

pub use grid::Grid;
pub use linear::{
    accessibility_check, contraction_residual, kernel_direction, null_direction, numeric_rank, rank_on_kernel,
    rank_on_kernel_at, Path, RANK_THRESHOLD,
};

use crate::constructions::{Built, PiecewiseForm};
use crate::error::{Error, Result};
use crate::expr::{Compiled, Expr, Rational, Realizations};
use crate::forms::{ChartRef, Form};
use crate::report::VerificationReport;
use crate::Exec;

/// Stored singular samples are capped; the count is always reported.
const MAX_SAMPLES: usize = 64;

fn check_contact_shape(eta: &Form) -> Result<usize> {
    let n = eta.chart().dim();
    if n % 2 == 0 {
        return Err(Error::EvenDimension(n));
    }
    if eta.degree() != 1 {
        return Err(Error::WrongDegree { expected: 1, found: eta.degree() });
    }
    Ok((n - 1) / 2)
}

/// Top coefficient of `η ∧ (dη)^k` on a `(2k+1)`-chart.
pub fn contact_defect(eta: &Form) -> Result<Expr> {
    let k = check_contact_shape(eta)?;
    eta.wedge(&eta.d().wedge_power(k)?)?.top_coefficient()
}

/// `⋆(η ∧ (dη)^{k-1})`.
pub fn tau(eta: &Form) -> Result<Form> {
    check_contact_shape(eta)?;
    tau_with(eta, &eta.d())
}

/// `τ` from a given differential, for reproducing printed pipelines.
pub fn tau_with(eta: &Form, deta: &Form) -> Result<Form> {
    let k = check_contact_shape(eta)?;
    if deta.degree() != 2 {
        return Err(Error::WrongDegree { expected: 2, found: deta.degree() });
    }
    Ok(eta.wedge(&deta.wedge_power(k - 1)?)?.hodge_star())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    /// Pass iff the minimum exceeds `tol`.
    #[default]
    Contact,
    /// Pass iff the minimum is at least `-tol`.
    Confoliation,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Contact => "contact",
            Mode::Confoliation => "confoliation",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "contact" => Ok(Mode::Contact),
            "confoliation" => Ok(Mode::Confoliation),
            _ => Err(Error::Invalid(format!("unknown check mode `{s}`"))),
        }
    }
}

/// Values of a scalar on a grid, in grid order.
pub struct Scan {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl Scan {
    pub fn new(e: &Expr, real: &Realizations, grid: &Grid, exec: Exec) -> Result<Self> {
        let c = Compiled::new(e, grid.chart().coords(), real)?;
        Ok(Scan { grid: grid.clone(), values: grid.map(exec, |x| c.eval(x)) })
    }

    /// First index of the minimum; NaN counts as smaller than everything.
    pub fn argmin(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, &v) in self.values.iter().enumerate() {
            match best {
                None => best = Some(i),
                Some(b) => {
                    let bv = self.values[b];
                    if !bv.is_nan() && (v.is_nan() || v < bv) {
                        best = Some(i);
                    }
                }
            }
        }
        best
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.argmin().map(|i| self.values[i]).unwrap_or(f64::NAN)
    }
}

/// Grid points where `|defect| < tol`, with the coordinates that the samples
/// pin down.
#[derive(Clone, Debug)]
pub struct SingularLocus {
    pub chart: ChartRef,
    pub points: Vec<Vec<f64>>,
    /// Coordinates whose samples stay within one grid step, with their range.
    pub pinned: BTreeMap<String, [f64; 2]>,
    pub grid_points: usize,
    pub tol: f64,
}

impl SingularLocus {
    fn from_scan(scan: &Scan, tol: f64) -> Self {
        let grid = &scan.grid;
        let points: Vec<Vec<f64>> = scan
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() < tol)
            .map(|(i, _)| grid.point(i))
            .collect();
        let mut pinned = BTreeMap::new();
        if !points.is_empty() {
            for (i, name) in grid.chart().coords().iter().enumerate() {
                let Some(step) = grid.step(name) else { continue };
                let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p[i]), b.max(p[i])));
                if hi - lo <= step * (1.0 + 1e-9) {
                    pinned.insert(name.clone(), [lo, hi]);
                }
            }
        }
        SingularLocus { chart: grid.chart().clone(), points, pinned, grid_points: grid.len(), tol }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Range of a derived quantity (say `r = sqrt(x²+y²)`) over the samples.
    pub fn observe(&self, f: impl Fn(&[f64]) -> f64) -> Option<[f64; 2]> {
        if self.points.is_empty() {
            return None;
        }
        Some(self.points.iter().map(|p| f(p)).fold([f64::INFINITY, f64::NEG_INFINITY], |[a, b], v| [a.min(v), b.max(v)]))
    }
}

pub fn singular_locus(eta: &Form, real: &Realizations, grid: &Grid, tol: f64, exec: Exec) -> Result<SingularLocus> {
    let d = contact_defect(eta)?;
    let scan = Scan::new(&d, real, &on_chart(grid, eta)?, exec)?;
    Ok(SingularLocus::from_scan(&scan, tol))
}

fn on_chart(grid: &Grid, eta: &Form) -> Result<Grid> {
    if grid.chart().coords() != eta.chart().coords() {
        return Err(Error::ChartMismatch);
    }
    Ok(grid.clone())
}

/// Grid check of the sign of a scalar.
pub fn check_scalar(name: &str, e: &Expr, real: &Realizations, grid: &Grid, tol: f64, mode: Mode, exec: Exec) -> Result<VerificationReport> {
    let start = Instant::now();
    let scan = Scan::new(e, real, grid, exec)?;
    let mut r = VerificationReport::new(name)
        .param("mode", mode.name())
        .param("tol", tol)
        .param("grid", grid.to_string())
        .param("grid_points", grid.len());
    r.thresholds.insert("tol".into(), tol);
    let Some(i) = scan.argmin() else {
        r.fail("empty grid");
        return Ok(r);
    };
    let min = scan.values[i];
    r.min_value = Some(min);
    r.max_value = Some(scan.max());
    r.witness = Some(grid.chart().point(&grid.point(i)).0);
    let margin = match mode {
        Mode::Contact => min - tol,
        Mode::Confoliation => min + tol,
    };
    r.margin = Some(margin);
    let locus = SingularLocus::from_scan(&scan, tol);
    r.singular_samples = locus.points.iter().take(MAX_SAMPLES).map(|p| grid.chart().point(p).0).collect();
    r.pinned = locus.pinned.clone();
    r.params.insert("singular_count".into(), locus.len().into());
    r.passed = min.is_finite()
        && match mode {
            Mode::Contact => margin > 0.0,
            Mode::Confoliation => margin >= 0.0,
        };
    if min.is_nan() {
        r.detail("defect is not finite somewhere on the grid");
    }
    r.detail(format!("verified on grid of {} points ({grid})", grid.len()));
    r.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    Ok(r)
}

/// Evaluates the contact defect of `η` on the grid.
pub fn check_contact(eta: &Form, real: &Realizations, grid: &Grid, tol: f64, mode: Mode, exec: Exec) -> Result<VerificationReport> {
    let d = contact_defect(eta)?;
    check_scalar("contact", &d, real, &on_chart(grid, eta)?, tol, mode, exec)
}

/// Symbolic check of a builder's defect identity. With `expected`, the
/// fitted constants must also match.
pub fn check_identity(built: &Built, expected: Option<&[Rational]>) -> Result<VerificationReport> {
    let start = Instant::now();
    let id = built
        .identity
        .as_ref()
        .ok_or_else(|| Error::Invalid("the builder declares no identity".into()))?;
    let defect = contact_defect(&built.form)?;
    let (consts, rest) = id.resolve(&defect)?;
    let mut r = VerificationReport::new("identity").param("identity", id.name.clone());
    r.passed = true;
    for (t, c) in id.terms.iter().zip(&consts) {
        r.params.insert(format!("constant[{}]", t.label), c.to_string().into());
    }
    if !rest.is_zero() {
        r.fail(format!("remainder {rest}"));
    }
    for (name, f) in &id.vanishing {
        if !f.is_zero() {
            r.fail(format!("{name} does not vanish"));
        }
    }
    if let Some(exp) = expected {
        if exp != consts.as_slice() {
            let shown: Vec<String> = consts.iter().map(|c| c.to_string()).collect();
            r.fail(format!("constants {shown:?} differ from the expected ones"));
        }
    }
    r.details.extend(built.notes.iter().cloned());
    r.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    Ok(r)
}

/// Symbolic collar and normal-form checks, then a grid check of the defect
/// on every region in the given mode. The distinguished variable is sampled with `n` points
/// over each region's range; the other coordinates follow `base`.
pub fn check_piecewise(
    pw: &PiecewiseForm,
    real: &Realizations,
    base: &Grid,
    n: usize,
    tol: f64,
    mode: Mode,
    exec: Exec,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut all = pw.profiles.realizations();
    all.extend(real);
    let mut r = VerificationReport::new("piecewise")
        .param("variable", pw.var.clone())
        .param("tol", tol)
        .param("mode", mode.name());
    r.passed = true;
    for c in &pw.collars {
        let label = pw.collar_label(c);
        let diff = pw.collar_difference(c)?;
        r.residuals.insert(format!("collar {label}"), if diff.is_zero() { 0.0 } else { 1.0 });
        if !diff.is_zero() {
            r.fail(format!("collar {label}: difference {diff}"));
        }
    }
    for nf in &pw.normal_forms {
        let diff = pw.normal_form_difference(nf)?;
        r.residuals.insert(format!("normal form {}", nf.label), if diff.is_zero() { 0.0 } else { 1.0 });
        if !diff.is_zero() {
            r.fail(format!("normal form {}: difference {diff}", nf.label));
        }
    }
    let mut min = f64::INFINITY;
    for reg in &pw.regions {
        let (lo, hi) = reg.range();
        let g = base.clone().axis(&pw.var, lo, hi, n)?;
        let sub = check_contact(&reg.form, &all, &g, tol, mode, exec)?;
        let m = sub.min_value.unwrap_or(f64::NAN);
        r.residuals.insert(format!("region {} min", reg.name), m);
        if m < min || m.is_nan() {
            min = m;
            r.witness = sub.witness.clone();
        }
        if !sub.passed {
            r.fail(format!("region {}: minimum defect {m:e}", reg.name));
        }
    }
    r.min_value = Some(min);
    r.detail(format!("regions verified on grid ({base}) with {n} samples of {}", pw.var));
    r.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    Ok(r)
}

/// Smallest parameter in `[lo, hi]` (to within `step`) for which the
/// monotone predicate holds; `None` if it fails at `hi`.
pub fn bisect_threshold(mut lo: f64, mut hi: f64, step: f64, pred: impl Fn(f64) -> Result<bool>) -> Result<Option<f64>> {
    if !pred(hi)? {
        return Ok(None);
    }
    if pred(lo)? {
        return Ok(Some(lo));
    }
    while hi - lo > step {
        let mid = 0.5 * (lo + hi);
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

#[cfg(test)]
mod tests;

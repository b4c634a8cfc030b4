//! Exterior algebra on a flat chart.
//!
//! A basis monomial `d[c_i1]^...^d[c_ik]` with `i1 < ... < ik` is stored as a
//! bitmask over chart positions. Every form is homogeneous.

mod chart;
mod numeric;
mod parse;

pub use chart::{Chart, ChartRef, Domain};
pub use numeric::CompiledForm;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::expr::{Expr, Rational};

pub(crate) type Terms = BTreeMap<u64, Expr>;

#[inline]
fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

/// Sign of `e_a ^ e_b` relative to `e_{a|b}` (disjoint masks).
#[inline]
fn merge_sign(a: u64, b: u64) -> bool {
    let mut inv = 0u32;
    for j in bits(b) {
        inv += (a >> j >> 1).count_ones();
    }
    inv % 2 == 1
}

fn add_into(terms: &mut Terms, m: u64, c: Expr) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match terms.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            let s = std::mem::take(o.get_mut()) + c;
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

fn merge_all(parts: Vec<Terms>) -> Terms {
    let mut out = Terms::new();
    for part in parts {
        for (m, c) in part {
            add_into(&mut out, m, c);
        }
    }
    out
}

/// Homogeneous differential form with symbolic coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Form {
    chart: ChartRef,
    degree: usize,
    terms: Terms,
}

impl Form {
    pub fn zero(chart: &ChartRef, degree: usize) -> Form {
        Form { chart: chart.clone(), degree, terms: Terms::new() }
    }

    pub fn scalar(chart: &ChartRef, c: Expr) -> Form {
        let mut terms = Terms::new();
        add_into(&mut terms, 0, c);
        Form { chart: chart.clone(), degree: 0, terms }
    }

    /// `d[name]`.
    pub fn dx(chart: &ChartRef, name: &str) -> Result<Form> {
        let i = chart.index(name).ok_or_else(|| Error::UnknownCoordinate(name.to_string()))?;
        Ok(Form::basis(chart, 1u64 << i, Expr::one()))
    }

    pub(crate) fn basis(chart: &ChartRef, mask: u64, c: Expr) -> Form {
        let mut terms = Terms::new();
        add_into(&mut terms, mask, c);
        Form { chart: chart.clone(), degree: mask.count_ones() as usize, terms }
    }

    /// Builds a form from `(coordinate names, coefficient)` pairs; names may
    /// come in any order and the permutation sign is applied.
    pub fn from_terms<S: AsRef<str>>(chart: &ChartRef, degree: usize, terms: Vec<(Vec<S>, Expr)>) -> Result<Form> {
        let mut out = Form::zero(chart, degree);
        for (names, c) in terms {
            let mut f = Form::scalar(chart, c);
            for n in &names {
                f = f.wedge(&Form::dx(chart, n.as_ref())?)?;
            }
            out = out.add(&f)?;
        }
        Ok(out)
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms as (ascending coordinate positions, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, &Expr)> {
        self.terms.iter().map(|(m, c)| (bits(*m).collect(), c))
    }

    pub(crate) fn raw_terms(&self) -> &Terms {
        &self.terms
    }

    /// Coefficient of the basis monomial named by `names` (in any order,
    /// sign-adjusted to that order).
    pub fn coefficient<S: AsRef<str>>(&self, names: &[S]) -> Result<Expr> {
        let mut mask = 0u64;
        let mut idx = Vec::with_capacity(names.len());
        for n in names {
            let i = self
                .chart
                .index(n.as_ref())
                .ok_or_else(|| Error::UnknownCoordinate(n.as_ref().to_string()))?;
            if mask & (1 << i) != 0 {
                return Ok(Expr::zero());
            }
            mask |= 1 << i;
            idx.push(i);
        }
        let mut inversions = 0;
        for a in 0..idx.len() {
            for b in a + 1..idx.len() {
                if idx[a] > idx[b] {
                    inversions += 1;
                }
            }
        }
        let c = self.terms.get(&mask).cloned().unwrap_or_default();
        Ok(if inversions % 2 == 1 { -c } else { c })
    }

    fn same_chart(&self, other: &Form) -> Result<()> {
        if Arc::ptr_eq(&self.chart, &other.chart) || self.chart.same_coords(&other.chart) {
            Ok(())
        } else {
            Err(Error::ChartMismatch)
        }
    }

    pub fn add(&self, other: &Form) -> Result<Form> {
        self.same_chart(other)?;
        if self.degree != other.degree {
            return Err(Error::MixedDegree(self.degree, other.degree));
        }
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_into(&mut terms, *m, c.clone());
        }
        Ok(Form { chart: self.chart.clone(), degree: self.degree, terms })
    }

    pub fn sub(&self, other: &Form) -> Result<Form> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Form {
        self.map_coefficients(|c| -c)
    }

    pub fn scale(&self, c: &Expr) -> Form {
        self.map_coefficients(|x| x * c)
    }

    pub fn scale_rational(&self, c: &Rational) -> Form {
        self.map_coefficients(|x| x.scale(c))
    }

    pub fn map_coefficients(&self, f: impl Fn(&Expr) -> Expr) -> Form {
        let mut terms = Terms::new();
        for (m, c) in &self.terms {
            add_into(&mut terms, *m, f(c));
        }
        Form { chart: self.chart.clone(), degree: self.degree, terms }
    }

    pub fn wedge(&self, other: &Form) -> Result<Form> {
        self.wedge_with(other, Exec::default())
    }

    pub fn wedge_with(&self, other: &Form, exec: Exec) -> Result<Form> {
        self.same_chart(other)?;
        let degree = self.degree + other.degree;
        if degree > self.chart.dim() {
            return Err(Error::DegreeOverflow { degree, dim: self.chart.dim() });
        }
        let left: Vec<(&u64, &Expr)> = self.terms.iter().collect();
        let chunk = if left.len() * other.terms.len() > 64 { 1 } else { left.len().max(1) };
        let parts = exec.map_chunks(left.len(), chunk, |range| {
            let mut acc = Terms::new();
            for &(ma, ca) in &left[range] {
                for (mb, cb) in &other.terms {
                    if ma & mb != 0 {
                        continue;
                    }
                    let c = ca * cb;
                    add_into(&mut acc, ma | mb, if merge_sign(*ma, *mb) { -c } else { c });
                }
            }
            acc
        });
        Ok(Form { chart: self.chart.clone(), degree, terms: merge_all(parts) })
    }

    /// Exterior derivative.
    pub fn d(&self) -> Form {
        self.d_with(Exec::default())
    }

    pub fn d_with(&self, exec: Exec) -> Form {
        let dim = self.chart.dim();
        if self.degree >= dim {
            return Form::zero(&self.chart, dim.min(self.degree + 1));
        }
        let items: Vec<(&u64, &Expr)> = self.terms.iter().collect();
        let parts = exec.map(&items, |&(m, c)| {
            let mut acc = Terms::new();
            for i in 0..dim {
                if m & (1 << i) != 0 {
                    continue;
                }
                let dc = c.diff(self.chart.coord(i));
                if dc.is_zero() {
                    continue;
                }
                let below = (m & ((1u64 << i) - 1)).count_ones();
                add_into(&mut acc, m | (1 << i), if below % 2 == 1 { -dc } else { dc });
            }
            acc
        });
        Form { chart: self.chart.clone(), degree: self.degree + 1, terms: merge_all(parts) }
    }

    /// n-fold wedge power; even degrees use the multinomial expansion
    /// `ω^n = n! Σ_{i1<...<in} ω_i1 ^ ... ^ ω_in` over disjoint monomials.
    pub fn wedge_power(&self, n: usize) -> Result<Form> {
        self.wedge_power_with(n, Exec::default())
    }

    pub fn wedge_power_with(&self, n: usize, exec: Exec) -> Result<Form> {
        let degree = self.degree * n;
        if degree > self.chart.dim() {
            return Err(Error::DegreeOverflow { degree, dim: self.chart.dim() });
        }
        if n == 0 {
            return Ok(Form::scalar(&self.chart, Expr::one()));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        if self.degree == 0 {
            let c = self.terms.get(&0).cloned().unwrap_or_default();
            return Ok(Form::scalar(&self.chart, c.pow(n as u32)));
        }
        if self.degree % 2 == 1 {
            return Ok(Form::zero(&self.chart, degree));
        }
        let items: Vec<(u64, &Expr)> = self.terms.iter().map(|(m, c)| (*m, c)).collect();
        // Disjoint even-degree monomials commute, so each unordered choice
        // appears n! times in the expansion.
        fn dfs(items: &[(u64, &Expr)], start: usize, left: usize, mask: u64, coef: Expr, acc: &mut Terms) {
            if left == 0 {
                add_into(acc, mask, coef);
                return;
            }
            for j in start..items.len() {
                if items.len() - j < left {
                    break;
                }
                let (m, c) = items[j];
                if m & mask != 0 {
                    continue;
                }
                let next = &coef * c;
                let next = if merge_sign(mask, m) { -next } else { next };
                dfs(items, j + 1, left - 1, mask | m, next, acc);
            }
        }
        let parts = exec.map_range(items.len(), |first| {
            let mut acc = Terms::new();
            let (m, c) = items[first];
            dfs(&items, first + 1, n - 1, m, c.clone(), &mut acc);
            acc
        });
        let mut fact = Rational::from_integer(1.into());
        for k in 2..=n {
            fact *= Rational::from_integer((k as i64).into());
        }
        let terms = merge_all(parts);
        Ok(Form { chart: self.chart.clone(), degree, terms }.scale_rational(&fact))
    }

    /// Hodge star for the identity metric, oriented by chart order:
    /// `⋆e_I = sign(I, I^c) e_{I^c}`.
    pub fn hodge_star(&self) -> Form {
        let dim = self.chart.dim();
        let full = if dim == 64 { u64::MAX } else { (1u64 << dim) - 1 };
        let mut terms = Terms::new();
        for (m, c) in &self.terms {
            let comp = full & !m;
            let neg = merge_sign(*m, comp);
            add_into(&mut terms, comp, if neg { -c } else { c.clone() });
        }
        Form { chart: self.chart.clone(), degree: dim - self.degree, terms }
    }

    /// Interior product `ι_v ω`; degree-0 input gives the zero 0-form.
    pub fn interior(&self, v: &VectorField) -> Result<Form> {
        if !self.chart.same_coords(&v.chart) {
            return Err(Error::ChartMismatch);
        }
        if self.degree == 0 {
            return Ok(Form::zero(&self.chart, 0));
        }
        let mut terms = Terms::new();
        for (m, c) in &self.terms {
            for (pos, i) in bits(*m).enumerate() {
                if let Some(vi) = v.components.get(&i) {
                    let t = c * vi;
                    add_into(&mut terms, m & !(1 << i), if pos % 2 == 1 { -t } else { t });
                }
            }
        }
        Ok(Form { chart: self.chart.clone(), degree: self.degree - 1, terms })
    }

    /// Coefficient against the ascending volume monomial.
    pub fn top_coefficient(&self) -> Result<Expr> {
        let dim = self.chart.dim();
        if self.degree != dim {
            return Err(Error::WrongDegree { expected: dim, found: self.degree });
        }
        let full = (1u64 << dim) - 1;
        Ok(self.terms.get(&full).cloned().unwrap_or_default())
    }

    /// Pullback along `coord := expr`. Bound coordinates leave the chart;
    /// binding expressions may refer to other bound coordinates as long as
    /// the references are acyclic.
    pub fn substitute(&self, bindings: &BTreeMap<String, Expr>) -> Result<Form> {
        for name in bindings.keys() {
            if !self.chart.contains(name) {
                return Err(Error::UnknownCoordinate(name.clone()));
            }
        }
        let resolved = resolve_bindings(bindings)?;
        let bound: Vec<&str> = resolved.keys().map(String::as_str).collect();
        let reduced: ChartRef = Arc::new(self.chart.without(&bound));
        for e in resolved.values() {
            for v in e.free_vars() {
                if !reduced.contains(&v) && self.chart.contains(&v) {
                    return Err(Error::CyclicBindings);
                }
            }
        }
        let pulled: Vec<Form> = (0..self.chart.dim())
            .map(|i| {
                let name = self.chart.coord(i);
                match resolved.get(name) {
                    None => Form::dx(&reduced, name),
                    Some(e) => Ok(exact_differential(&reduced, e)),
                }
            })
            .collect::<Result<_>>()?;
        let mut out = Form::zero(&reduced, self.degree);
        for (m, c) in &self.terms {
            let mut f = Form::scalar(&reduced, c.substitute(&resolved));
            if f.is_zero() {
                continue;
            }
            for i in bits(*m) {
                f = f.wedge_with(&pulled[i], Exec::Sequential)?;
                if f.is_zero() {
                    break;
                }
            }
            out = out.add(&f)?;
        }
        Ok(out)
    }

    /// Pullback along constant values (restriction to a slice).
    pub fn restrict(&self, values: &[(&str, Expr)]) -> Result<Form> {
        let b: BTreeMap<String, Expr> = values.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        self.substitute(&b)
    }

    /// The same form on a chart with the same coordinate names in a
    /// possibly different order (signs follow the permutation).
    pub fn reorder(&self, chart: &ChartRef) -> Result<Form> {
        if chart.dim() != self.chart.dim() {
            return Err(Error::ChartMismatch);
        }
        self.embed(chart)
    }

    /// The same form on a chart containing every coordinate of this one.
    pub fn embed(&self, chart: &ChartRef) -> Result<Form> {
        let mut pos = Vec::with_capacity(self.chart.dim());
        for name in self.chart.coords() {
            pos.push(chart.index(name).ok_or(Error::ChartMismatch)?);
        }
        let mut out = Form::zero(chart, self.degree);
        for (idx, c) in self.terms() {
            let mut f = Form::scalar(chart, c.clone());
            for i in idx {
                f = f.wedge_with(&Form::basis(chart, 1 << pos[i], Expr::one()), Exec::Sequential)?;
            }
            out = out.add(&f)?;
        }
        Ok(out)
    }

    /// Rewrites every coefficient through [`Expr::map_funcs`].
    pub fn map_funcs(&self, f: &dyn Fn(&str, &[u32], &[Expr]) -> Option<Expr>) -> Form {
        self.map_coefficients(|c| c.map_funcs(f))
    }
}

fn exact_differential(chart: &ChartRef, e: &Expr) -> Form {
    let mut terms = Terms::new();
    for i in 0..chart.dim() {
        add_into(&mut terms, 1 << i, e.diff(chart.coord(i)));
    }
    Form { chart: chart.clone(), degree: 1, terms }
}

/// Substitutes bindings into each other until no bound name remains.
fn resolve_bindings(bindings: &BTreeMap<String, Expr>) -> Result<BTreeMap<String, Expr>> {
    let mut cur = bindings.clone();
    for _ in 0..=bindings.len() {
        let pending = cur
            .values()
            .any(|e| e.free_vars().iter().any(|v| bindings.contains_key(&**v)));
        if !pending {
            return Ok(cur);
        }
        cur = cur.iter().map(|(k, e)| (k.clone(), e.substitute(bindings))).collect();
    }
    Err(Error::CyclicBindings)
}

/// Vector field with symbolic components.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    chart: ChartRef,
    components: BTreeMap<usize, Expr>,
}

impl VectorField {
    pub fn new(chart: &ChartRef, components: &[(&str, Expr)]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, e) in components {
            let i = chart.index(n).ok_or_else(|| Error::UnknownCoordinate(n.to_string()))?;
            if !e.is_zero() {
                map.insert(i, e.clone());
            }
        }
        Ok(VectorField { chart: chart.clone(), components: map })
    }

    /// The coordinate field `∂/∂name`.
    pub fn coordinate(chart: &ChartRef, name: &str) -> Result<Self> {
        VectorField::new(chart, &[(name, Expr::one())])
    }

    pub fn component(&self, name: &str) -> Expr {
        self.chart
            .index(name)
            .and_then(|i| self.components.get(&i).cloned())
            .unwrap_or_default()
    }
}

#[cfg(test)]
mod tests;

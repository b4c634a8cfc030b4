use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::ToPrimitive;

use super::{Atom, Expr};
use crate::error::{Error, Result};

/// Numeric stand-in for an abstract function symbol.
pub trait Realization: Send + Sync + fmt::Debug {
    fn arity(&self) -> usize {
        1
    }

    /// Highest total derivative order `eval` supports.
    fn max_order(&self) -> u32;

    /// Value of the partial derivative with multi-index `deriv` at `args`.
    fn eval(&self, deriv: &[u32], args: &[f64]) -> f64;
}

/// Function name → realization.
#[derive(Clone, Debug, Default)]
pub struct Realizations {
    map: HashMap<String, Arc<dyn Realization>>,
}

impl Realizations {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, r: Arc<dyn Realization>) -> &mut Self {
        self.map.insert(name.to_string(), r);
        self
    }

    pub fn with(mut self, name: &str, r: Arc<dyn Realization>) -> Self {
        self.insert(name, r);
        self
    }

    pub fn get(&self, name: &str) -> Option<&Arc<dyn Realization>> {
        self.map.get(name)
    }

    pub fn extend(&mut self, other: &Realizations) {
        for (k, v) in &other.map {
            self.map.insert(k.clone(), v.clone());
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.map.keys().map(String::as_str)
    }
}

/// Coordinate assignment.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Point(pub BTreeMap<String, f64>);

impl Point {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Self {
        Point(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub fn set(&mut self, name: &str, v: f64) -> &mut Self {
        self.0.insert(name.to_string(), v);
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }
}

impl Expr {
    /// Evaluates at a point. Exact for rational subtrees up to the final
    /// conversion; floating for exponentials and function values.
    pub fn eval(&self, p: &Point, real: &Realizations) -> Result<f64> {
        let names: Vec<String> = p.0.keys().cloned().collect();
        let compiled = Compiled::new(self, &names, real)?;
        let values: Vec<f64> = p.0.values().copied().collect();
        Ok(compiled.eval(&values))
    }
}

#[derive(Clone, Debug)]
enum CAtom {
    Var(usize),
    Func {
        real: Arc<dyn Realization>,
        deriv: Vec<u32>,
        args: Vec<Compiled>,
    },
}

#[derive(Clone, Debug)]
struct CTerm {
    coeff: f64,
    factors: Vec<(CAtom, i32)>,
    exp: Option<Compiled>,
}

/// An expression lowered to slot-indexed form for repeated evaluation.
#[derive(Clone, Debug)]
pub struct Compiled {
    terms: Vec<CTerm>,
}

impl Compiled {
    /// `vars` fixes the slot order of the value vector passed to `eval`.
    pub fn new(e: &Expr, vars: &[String], real: &Realizations) -> Result<Self> {
        let mut terms = Vec::with_capacity(e.num_terms());
        for (m, c) in e.terms() {
            let mut factors = Vec::with_capacity(m.factors().len());
            for (a, p) in m.factors() {
                let ca = match a {
                    Atom::Var(v) => CAtom::Var(
                        vars.iter()
                            .position(|n| n.as_str() == &**v)
                            .ok_or_else(|| Error::MissingCoordinate(v.to_string()))?,
                    ),
                    Atom::Func { name, deriv, args } => {
                        let r = real
                            .get(name)
                            .ok_or_else(|| Error::MissingRealization(name.to_string()))?;
                        if r.arity() != args.len() {
                            return Err(Error::Invalid(format!(
                                "`{name}` is realized with {} arguments but used with {}",
                                r.arity(),
                                args.len()
                            )));
                        }
                        let order: u32 = deriv.iter().sum();
                        if order > r.max_order() {
                            return Err(Error::DerivativeOrder { name: name.to_string(), order });
                        }
                        CAtom::Func {
                            real: r.clone(),
                            deriv: deriv.clone(),
                            args: args
                                .iter()
                                .map(|x| Compiled::new(x, vars, real))
                                .collect::<Result<_>>()?,
                        }
                    }
                };
                factors.push((ca, *p as i32));
            }
            let exp = m.exp_arg().map(|a| Compiled::new(a, vars, real)).transpose()?;
            terms.push(CTerm {
                coeff: c.to_f64().unwrap_or(f64::NAN),
                factors,
                exp,
            });
        }
        Ok(Compiled { terms })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut sum = 0.0;
        let mut buf = [0.0f64; 4];
        for t in &self.terms {
            let mut v = t.coeff;
            for (a, p) in &t.factors {
                let base = match a {
                    CAtom::Var(i) => x[*i],
                    CAtom::Func { real, deriv, args } => {
                        if args.len() <= buf.len() {
                            for (slot, arg) in buf.iter_mut().zip(args) {
                                *slot = arg.eval(x);
                            }
                            real.eval(deriv, &buf[..args.len()])
                        } else {
                            let vals: Vec<f64> = args.iter().map(|a| a.eval(x)).collect();
                            real.eval(deriv, &vals)
                        }
                    }
                };
                v *= base.powi(*p);
            }
            if let Some(e) = &t.exp {
                v *= e.eval(x).exp();
            }
            sum += v;
        }
        sum
    }
}

/// Realization backed by a closed-form expression in the formal arguments
/// `args`; derivatives are taken symbolically up to `max_order`.
#[derive(Debug)]
pub struct ExprRealization {
    arity: usize,
    max_order: u32,
    table: HashMap<Vec<u32>, Compiled>,
}

impl ExprRealization {
    pub fn new(body: &Expr, args: &[&str], max_order: u32) -> Result<Self> {
        let names: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        let empty = Realizations::new();
        let mut table = HashMap::new();
        let mut frontier = vec![(vec![0u32; args.len()], body.clone())];
        while let Some((idx, e)) = frontier.pop() {
            if table.contains_key(&idx) {
                continue;
            }
            let order: u32 = idx.iter().sum();
            if order < max_order {
                for (i, a) in args.iter().enumerate() {
                    let mut next = idx.clone();
                    next[i] += 1;
                    if !table.contains_key(&next) {
                        frontier.push((next, e.diff(a)));
                    }
                }
            }
            table.insert(idx, Compiled::new(&e, &names, &empty)?);
        }
        Ok(ExprRealization { arity: args.len(), max_order, table })
    }
}

impl Realization for ExprRealization {
    fn arity(&self) -> usize {
        self.arity
    }

    fn max_order(&self) -> u32 {
        self.max_order
    }

    fn eval(&self, deriv: &[u32], args: &[f64]) -> f64 {
        self.table[deriv].eval(args)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Expr {
        s.parse().unwrap()
    }

    #[test]
    fn basic_values() {
        let none = Realizations::new();
        let pt = Point::from_pairs([("x", 3.0), ("y", 4.0)]);
        assert_eq!(p("x^2+y^2").eval(&pt, &none).unwrap(), 25.0);
        assert_eq!(p("exp(t)").eval(&Point::from_pairs([("t", 0.0)]), &none).unwrap(), 1.0);
        let origin = Point::from_pairs([("x", 0.0), ("y", 0.0)]);
        assert_eq!(p("2-(x^2+y^2)^2").eval(&origin, &none).unwrap(), 2.0);
        let unit = Point::from_pairs([("x", 1.0), ("y", 0.0)]);
        assert_eq!(p("2-(x^2+y^2)^2").eval(&unit, &none).unwrap(), 1.0);
    }

    #[test]
    fn missing_pieces_are_errors() {
        let none = Realizations::new();
        let pt = Point::from_pairs([("t", 0.5)]);
        assert!(matches!(p("f(t)").eval(&pt, &none), Err(Error::MissingRealization(_))));
        assert!(matches!(p("x").eval(&pt, &none), Err(Error::MissingCoordinate(_))));
        let r = Realizations::new().with(
            "f",
            Arc::new(ExprRealization::new(&p("s^3"), &["s"], 1).unwrap()),
        );
        assert!((p("f'(t)").eval(&pt, &r).unwrap() - 0.75).abs() < 1e-15);
        assert!(matches!(p("f''(t)").eval(&pt, &r), Err(Error::DerivativeOrder { .. })));
    }

    fn poly_exp() -> impl Strategy<Value = Expr> {
        let mono = (-3i64..4, 0u32..3, 0u32..3, -2i64..3).prop_map(|(c, a, b, k)| {
            Expr::int(c)
                * Expr::var("x").pow(a)
                * Expr::var("y").pow(b)
                * Expr::exp(Expr::int(k) * Expr::var("x") * Expr::var("y"))
        });
        prop::collection::vec(mono, 1..5).prop_map(|ms| ms.into_iter().fold(Expr::zero(), |a, b| a + b))
    }

    proptest! {
        #[test]
        fn derivative_matches_central_difference(
            e in poly_exp(), x in -0.9f64..0.9, y in -0.9f64..0.9
        ) {
            let vars = vec!["x".to_string(), "y".to_string()];
            let none = Realizations::new();
            let f = Compiled::new(&e, &vars, &none).unwrap();
            let df = Compiled::new(&e.diff("x"), &vars, &none).unwrap();
            let h = 1e-5;
            let fd = (f.eval(&[x + h, y]) - f.eval(&[x - h, y])) / (2.0 * h);
            let exact = df.eval(&[x, y]);
            let scale = exact.abs().max(1.0);
            prop_assert!((fd - exact).abs() <= 1e-6 * scale, "fd={fd} exact={exact}");
        }
    }
}

use std::fmt;

use super::{bits, ChartRef, Form};
use crate::error::{Error, ParseError, Result};
use crate::expr::{parse_syntax, BinOp, Expr, Node, Syntax};

impl Form {
    /// Parses form text on `chart`. Bare identifiers must be chart
    /// coordinates; function symbols such as `f(t)` are always accepted.
    pub fn parse(text: &str, chart: &ChartRef) -> Result<Form> {
        Form::parse_with(text, chart, true)
    }

    /// Like [`Form::parse`]; with `strict = false` unknown bare identifiers
    /// are kept as free symbols.
    pub fn parse_with(text: &str, chart: &ChartRef, strict: bool) -> Result<Form> {
        let node = parse_syntax(text)?;
        eval_node(&node, chart, strict)
    }
}

fn eval_node(node: &Node, chart: &ChartRef, strict: bool) -> Result<Form> {
    let is_coord = |n: &str| chart.contains(n);
    let scalar_mode: Option<&dyn Fn(&str) -> bool> = if strict { Some(&is_coord) } else { None };
    Ok(match &node.kind {
        Syntax::Num(_) | Syntax::Call { .. } | Syntax::Exp(_) => {
            Form::scalar(chart, node.to_scalar(scalar_mode)?)
        }
        Syntax::Ident(name) => {
            if strict && !chart.contains(name) {
                return Err(Error::UnknownIdentifier(name.clone()));
            }
            Form::scalar(chart, Expr::var(name))
        }
        Syntax::Diff(name) => Form::dx(chart, name)?,
        Syntax::Neg(a) => eval_node(a, chart, strict)?.neg(),
        Syntax::Bin(op, a, b) => {
            let x = eval_node(a, chart, strict)?;
            let y = eval_node(b, chart, strict)?;
            match op {
                BinOp::Add => x.add(&y)?,
                BinOp::Sub => x.sub(&y)?,
                BinOp::Mul | BinOp::Wedge => x.wedge(&y)?,
                BinOp::Div => {
                    if y.degree() != 0 {
                        return Err(ParseError::new(b.pos, "division by a form of positive degree").into());
                    }
                    let d = y.coefficient::<&str>(&[])?;
                    let inv = d
                        .inverse()
                        .map_err(|_| ParseError::new(b.pos, "division by a non-invertible expression"))?;
                    x.scale(&inv)
                }
            }
        }
        Syntax::Pow(a, n) => {
            let base = eval_node(a, chart, strict)?;
            if base.degree() == 0 {
                let c = base.coefficient::<&str>(&[])?;
                let p = c
                    .powi(*n)
                    .map_err(|_| ParseError::new(a.pos, "negative power of a non-invertible expression"))?;
                Form::scalar(chart, p)
            } else {
                if *n < 0 {
                    return Err(ParseError::new(node.pos, "negative wedge power").into());
                }
                base.wedge_power(*n as usize)?
            }
        }
    })
}

impl fmt::Display for Form {
    /// Terms in lexicographic order of their coordinate positions, e.g.
    /// `(2-x^4) d[t1]^d[z1] - 24*x d[x]^d[y]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        if self.degree == 0 {
            return write!(f, "{}", self.terms[&0]);
        }
        let mut entries: Vec<(Vec<usize>, &Expr)> =
            self.terms.iter().map(|(m, c)| (bits(*m).collect(), c)).collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        for (k, (idx, c)) in entries.iter().enumerate() {
            let basis: Vec<String> = idx.iter().map(|&i| format!("d[{}]", self.chart.coord(i))).collect();
            let basis = basis.join("^");
            let (neg, body) = if c.num_terms() == 1 {
                let (_, coef) = c.terms().next().unwrap();
                let neg = num_traits::Signed::is_negative(coef);
                (neg, if neg { -*c } else { (*c).clone() })
            } else {
                (false, (*c).clone())
            };
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if body.is_one() {
                f.write_str(&basis)?;
            } else if body.num_terms() > 1 {
                write!(f, "({body}) {basis}")?;
            } else {
                write!(f, "{body} {basis}")?;
            }
        }
        Ok(())
    }
}

use std::fmt::{self, Write};

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::{integer_content, Atom, Expr, Monomial, Rational};

fn write_atom(f: &mut impl Write, a: &Atom) -> fmt::Result {
    match a {
        Atom::Var(v) => f.write_str(v),
        Atom::Func { name, deriv, args } => {
            f.write_str(name)?;
            if args.len() == 1 {
                match deriv[0] {
                    0 => {}
                    k @ 1..=3 => f.write_str(&"'".repeat(k as usize))?,
                    k => write!(f, "'{{{k}}}")?,
                }
            } else if deriv.iter().any(|&k| k > 0) {
                let idx: Vec<String> = deriv.iter().map(u32::to_string).collect();
                write!(f, "'{{{}}}", idx.join(","))?;
            }
            f.write_char('(')?;
            for (i, arg) in args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{arg}")?;
            }
            f.write_char(')')
        }
    }
}

fn write_exp(f: &mut impl Write, arg: &Expr) -> fmt::Result {
    match integer_content(arg) {
        Some(k) if k > BigInt::one() => {
            let inner = arg.scale(&Rational::from_integer(k.clone()).recip());
            write!(f, "exp({inner})^{k}")
        }
        _ => write!(f, "exp({arg})"),
    }
}

/// Writes `|c| * monomial`, omitting a unit coefficient.
fn write_term(f: &mut impl Write, m: &Monomial, c: &Rational) -> fmt::Result {
    let c = c.abs();
    let mut first = true;
    if !c.is_one() || m.is_unit() {
        write!(f, "{c}")?;
        first = false;
    }
    for (a, p) in m.factors() {
        if !first {
            f.write_char('*')?;
        }
        first = false;
        write_atom(f, a)?;
        if *p > 1 {
            write!(f, "^{p}")?;
        }
    }
    if let Some(arg) = m.exp_arg() {
        if !first {
            f.write_char('*')?;
        }
        write_exp(f, arg)?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms().enumerate() {
            if c.is_negative() {
                f.write_char('-')?;
            } else if i > 0 {
                f.write_char('+')?;
            }
            write_term(f, m, c)?;
        }
        Ok(())
    }
}

impl Expr {
    /// True when printing needs parentheses to act as a factor.
    pub fn is_compound(&self) -> bool {
        if self.num_terms() > 1 {
            return true;
        }
        self.terms().next().is_some_and(|(_, c)| c.is_negative())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        s.parse().unwrap()
    }

    #[test]
    fn printing() {
        assert_eq!(p("2-(x^2+y^2)^2").to_string(), "2-2*x^2*y^2-x^4-y^4");
        assert_eq!(p("exp(t)*f'(t)").to_string(), "f'(t)*exp(t)");
        assert_eq!(p("f''''(s)").to_string(), "f'{4}(s)");
        assert_eq!(p("psi'{1,0}(x, y)").to_string(), "psi'{1,0}(x, y)");
        assert_eq!(p("exp(-2*t)/3").to_string(), "1/3*exp(-t)^2");
        assert_eq!(p("-x").to_string(), "-x");
        assert_eq!(p("0").to_string(), "0");
    }
}

use super::{Atom, Expr, Rational};

/// Unsimplified expression tree. Built by hand or by [`Expr::to_raw`];
/// [`simplify`] maps it to the canonical [`Expr`].
#[derive(Clone, Debug, PartialEq)]
pub enum RawExpr {
    Const(Rational),
    Var(String),
    Add(Vec<RawExpr>),
    Mul(Vec<RawExpr>),
    Pow(Box<RawExpr>, u32),
    Exp(Box<RawExpr>),
    Func {
        name: String,
        deriv: Vec<u32>,
        args: Vec<RawExpr>,
    },
}

pub fn simplify(e: &RawExpr) -> Expr {
    match e {
        RawExpr::Const(c) => Expr::constant(c.clone()),
        RawExpr::Var(v) => Expr::var(v),
        RawExpr::Add(xs) => xs.iter().fold(Expr::zero(), |acc, x| acc + simplify(x)),
        RawExpr::Mul(xs) => xs.iter().fold(Expr::one(), |acc, x| acc * simplify(x)),
        RawExpr::Pow(b, n) => simplify(b).pow(*n),
        RawExpr::Exp(a) => Expr::exp(simplify(a)),
        RawExpr::Func { name, deriv, args } => {
            Expr::func(name, deriv.clone(), args.iter().map(simplify).collect())
        }
    }
}

impl Expr {
    /// The canonical form as a raw tree (sum of products).
    pub fn to_raw(&self) -> RawExpr {
        let terms = self
            .terms()
            .map(|(m, c)| {
                let mut factors = vec![RawExpr::Const(c.clone())];
                for (a, p) in m.factors() {
                    let base = match a {
                        Atom::Var(v) => RawExpr::Var(v.to_string()),
                        Atom::Func { name, deriv, args } => RawExpr::Func {
                            name: name.to_string(),
                            deriv: deriv.clone(),
                            args: args.iter().map(Expr::to_raw).collect(),
                        },
                    };
                    factors.push(if *p == 1 { base } else { RawExpr::Pow(Box::new(base), *p) });
                }
                if let Some(arg) = m.exp_arg() {
                    factors.push(RawExpr::Exp(Box::new(arg.to_raw())));
                }
                RawExpr::Mul(factors)
            })
            .collect();
        RawExpr::Add(terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn leaf() -> impl Strategy<Value = RawExpr> {
        prop_oneof![
            (-3i64..4).prop_map(|n| RawExpr::Const(Rational::from_integer(n.into()))),
            prop::sample::select(vec!["x", "y", "t"]).prop_map(|v| RawExpr::Var(v.to_string())),
        ]
    }

    pub(crate) fn raw_strategy() -> impl Strategy<Value = RawExpr> {
        leaf().prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 1..3).prop_map(RawExpr::Add),
                prop::collection::vec(inner.clone(), 1..3).prop_map(RawExpr::Mul),
                (inner.clone(), 0u32..3).prop_map(|(b, n)| RawExpr::Pow(Box::new(b), n)),
                inner.clone().prop_map(|a| RawExpr::Exp(Box::new(a))),
                inner.prop_map(|a| RawExpr::Func {
                    name: "f".into(),
                    deriv: vec![0],
                    args: vec![a]
                }),
            ]
        })
    }

    proptest! {
        #[test]
        fn simplify_is_idempotent(e in raw_strategy()) {
            let once = simplify(&e);
            let twice = simplify(&once.to_raw());
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn product_rule(a in raw_strategy(), b in raw_strategy()) {
            let (a, b) = (simplify(&a), simplify(&b));
            let lhs = (&a * &b).diff("x");
            let rhs = &a.diff("x") * &b + &a * &b.diff("x");
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn print_parse_round_trip(e in raw_strategy()) {
            let e = simplify(&e);
            let back: Expr = e.to_string().parse().unwrap();
            prop_assert_eq!(back, e);
        }
    }
}

//! Recursive-descent parser shared by scalar and form input.
//!
//! ```text
//! sum     := ['+'|'-'] product (('+'|'-') product)*
//! product := unary (('*' | '/' | <juxtaposition>) unary)*
//! unary   := '-' unary | postfix
//! postfix := primary (('^' | '∧') (int | '(' '-'? int ')' | primary))*
//! primary := number | ident | call | 'd[' ident ']' | '(' sum ')'
//! call    := ident primes? ('{' int (',' int)* '}')? '(' sum (',' sum)* ')'
//! number  := digits ('.' digits)?
//! ```
//!
//! `^` followed by an integer is a power (a wedge power on forms of positive
//! degree); otherwise it is the wedge product. A call must follow its name
//! without whitespace, so `x (y+1)` is a product while `f(y+1)` is a call.
//! Primes count derivatives of a unary function; `psi'{1,0}(x, y)` gives an
//! explicit multi-index for several arguments. Decimals are read as exact
//! rationals.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{Expr, Rational};
use crate::error::{Error, ParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Wedge,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Syntax {
    Num(Rational),
    Ident(String),
    Call {
        name: String,
        deriv: Vec<u32>,
        args: Vec<Node>,
    },
    Exp(Box<Node>),
    Diff(String),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Pow(Box<Node>, i64),
}

/// Syntax tree node with the byte offset where it starts.
#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub pos: usize,
    pub kind: Syntax,
}

impl Node {
    fn new(pos: usize, kind: Syntax) -> Self {
        Node { pos, kind }
    }

    /// Evaluates a tree that contains no differentials. With `strict`, bare
    /// identifiers must satisfy the predicate (chart coordinates).
    pub fn to_scalar(&self, strict: Option<&dyn Fn(&str) -> bool>) -> Result<Expr, ParseError> {
        Ok(match &self.kind {
            Syntax::Num(c) => Expr::constant(c.clone()),
            Syntax::Ident(name) => {
                if let Some(ok) = strict {
                    if !ok(name) {
                        return Err(ParseError::new(
                            self.pos,
                            format!("unknown identifier `{name}`"),
                        ));
                    }
                }
                Expr::var(name)
            }
            Syntax::Call { name, deriv, args } => {
                let args = args
                    .iter()
                    .map(|a| a.to_scalar(strict))
                    .collect::<Result<Vec<_>, _>>()?;
                Expr::func(name, deriv.clone(), args)
            }
            Syntax::Exp(arg) => Expr::exp(arg.to_scalar(strict)?),
            Syntax::Diff(_) => {
                return Err(ParseError::new(
                    self.pos,
                    "differential in a scalar expression",
                ))
            }
            Syntax::Neg(a) => -a.to_scalar(strict)?,
            Syntax::Bin(op, a, b) => {
                let x = a.to_scalar(strict)?;
                let y = b.to_scalar(strict)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul | BinOp::Wedge => x * y,
                    BinOp::Div => x.div(&y).map_err(|_| {
                        ParseError::new(b.pos, "division by a non-invertible expression")
                    })?,
                }
            }
            Syntax::Pow(a, n) => a
                .to_scalar(strict)?
                .powi(*n)
                .map_err(|_| ParseError::new(a.pos, "negative power of a non-invertible expression"))?,
        })
    }
}

pub fn parse_syntax(text: &str) -> Result<Node, ParseError> {
    let mut p = Parser { src: text, pos: 0 };
    p.skip_ws();
    if p.at_end() {
        return Err(ParseError::new(0, "empty expression"));
    }
    let node = p.sum()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(ParseError::new(p.pos, format!("unexpected `{}`", p.peek_char().unwrap())));
    }
    Ok(node)
}

impl FromStr for Expr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(parse_syntax(s)?.to_scalar(None)?)
    }
}

impl Expr {
    /// Parses scalar text; with `coords`, bare identifiers outside the list
    /// are rejected.
    pub fn parse(text: &str, coords: Option<&[&str]>) -> Result<Expr, Error> {
        let node = parse_syntax(text)?;
        match coords {
            None => Ok(node.to_scalar(None)?),
            Some(cs) => {
                let ok = |n: &str| cs.contains(&n);
                Ok(node.to_scalar(Some(&ok))?)
            }
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek_char(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_char() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek_char() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(ParseError::new(self.pos, format!("expected `{c}`")))
        }
    }

    fn sum(&mut self) -> Result<Node, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let mut lhs = if self.eat('-') {
            let t = self.product()?;
            Node::new(start, Syntax::Neg(Box::new(t)))
        } else {
            self.eat('+');
            self.product()?
        };
        loop {
            self.skip_ws();
            let op = match self.peek_char() {
                Some('+') => BinOp::Add,
                Some('-') => BinOp::Sub,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.product()?;
            lhs = Node::new(start, Syntax::Bin(op, Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn starts_factor(&self) -> bool {
        match self.peek_char() {
            Some(c) => c.is_ascii_alphanumeric() || c == '_' || c == '(' || c == '.',
            None => false,
        }
    }

    fn product(&mut self) -> Result<Node, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let mut lhs = self.unary()?;
        loop {
            self.skip_ws();
            let op = match self.peek_char() {
                Some('*') => {
                    self.pos += 1;
                    BinOp::Mul
                }
                Some('/') => {
                    self.pos += 1;
                    BinOp::Div
                }
                _ if self.starts_factor() => BinOp::Mul,
                _ => break,
            };
            let rhs = self.unary()?;
            lhs = Node::new(start, Syntax::Bin(op, Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.eat('-') {
            let inner = self.unary()?;
            return Ok(Node::new(start, Syntax::Neg(Box::new(inner))));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Node, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let mut lhs = self.primary()?;
        loop {
            self.skip_ws();
            if !(self.eat('^') || self.eat('∧')) {
                break;
            }
            self.skip_ws();
            if let Some(n) = self.try_exponent()? {
                lhs = Node::new(start, Syntax::Pow(Box::new(lhs), n));
            } else {
                let rhs = self.primary()?;
                lhs = Node::new(start, Syntax::Bin(BinOp::Wedge, Box::new(lhs), Box::new(rhs)));
            }
        }
        Ok(lhs)
    }

    /// An integer exponent: `3` or `(-1)`.
    fn try_exponent(&mut self) -> Result<Option<i64>, ParseError> {
        let save = self.pos;
        let neg_paren = if self.rest().starts_with('(') {
            self.pos += 1;
            self.skip_ws();
            let neg = self.eat('-');
            self.skip_ws();
            Some(neg)
        } else {
            None
        };
        let digits: String = self.rest().chars().take_while(|c| c.is_ascii_digit()).collect();
        let after = self.rest()[digits.len()..].chars().next();
        if digits.is_empty() || after == Some('.') {
            self.pos = save;
            return Ok(None);
        }
        let at = self.pos;
        self.pos += digits.len();
        let mut n: i64 = digits
            .parse()
            .map_err(|_| ParseError::new(at, "exponent too large"))?;
        if let Some(neg) = neg_paren {
            if !self.eat(')') {
                self.pos = save;
                return Ok(None);
            }
            if neg {
                n = -n;
            }
        }
        Ok(Some(n))
    }

    fn ident(&mut self) -> Option<&'a str> {
        let rest = self.rest();
        let mut end = 0;
        for (i, c) in rest.char_indices() {
            let ok = if i == 0 {
                c.is_ascii_alphabetic() || c == '_'
            } else {
                c.is_ascii_alphanumeric() || c == '_'
            };
            if !ok {
                break;
            }
            end = i + c.len_utf8();
        }
        if end == 0 {
            return None;
        }
        self.pos += end;
        Some(&rest[..end])
    }

    fn number(&mut self) -> Result<Rational, ParseError> {
        let start = self.pos;
        let int: String = self.rest().chars().take_while(|c| c.is_ascii_digit()).collect();
        self.pos += int.len();
        let mut frac = String::new();
        if self.rest().starts_with('.') {
            self.pos += 1;
            frac = self.rest().chars().take_while(|c| c.is_ascii_digit()).collect();
            self.pos += frac.len();
        }
        if int.is_empty() && frac.is_empty() {
            return Err(ParseError::new(start, "malformed number"));
        }
        let digits = format!("{int}{frac}");
        let num: BigInt = digits.parse().unwrap();
        let den = num_traits::pow(BigInt::from(10), frac.len());
        Ok(Rational::new(num, den))
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek_char() {
            None => Err(ParseError::new(start, "unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let inner = self.sum()?;
                self.expect(')')?;
                Ok(Node::new(start, inner.kind))
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let v = self.number()?;
                Ok(Node::new(start, Syntax::Num(v)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let name = self.ident().unwrap();
                if name == "d" && self.rest().starts_with('[') {
                    self.pos += 1;
                    self.skip_ws();
                    let at = self.pos;
                    let coord = self
                        .ident()
                        .ok_or_else(|| ParseError::new(at, "expected coordinate name"))?;
                    self.expect(']')?;
                    return Ok(Node::new(start, Syntax::Diff(coord.to_string())));
                }
                self.call_or_ident(start, name)
            }
            Some(c) => Err(ParseError::new(start, format!("unexpected `{c}`"))),
        }
    }

    fn call_or_ident(&mut self, start: usize, name: &str) -> Result<Node, ParseError> {
        let mut primes = 0u32;
        while self.rest().starts_with('\'') {
            self.pos += 1;
            primes += 1;
        }
        let mut explicit: Option<Vec<u32>> = None;
        if self.rest().starts_with('{') {
            self.pos += 1;
            let mut idx = Vec::new();
            loop {
                self.skip_ws();
                let at = self.pos;
                let digits: String =
                    self.rest().chars().take_while(|c| c.is_ascii_digit()).collect();
                if digits.is_empty() {
                    return Err(ParseError::new(at, "expected derivative order"));
                }
                self.pos += digits.len();
                idx.push(
                    digits
                        .parse()
                        .map_err(|_| ParseError::new(at, "derivative order too large"))?,
                );
                if self.eat(',') {
                    continue;
                }
                self.expect('}')?;
                break;
            }
            explicit = Some(idx);
        }
        let is_call = self.rest().starts_with('(');
        if !is_call {
            if primes > 0 || explicit.is_some() {
                return Err(ParseError::new(self.pos, "expected `(` after derivative marks"));
            }
            return Ok(Node::new(start, Syntax::Ident(name.to_string())));
        }
        self.pos += 1;
        let mut args = vec![self.sum()?];
        while self.eat(',') {
            args.push(self.sum()?);
        }
        self.expect(')')?;
        if name == "exp" {
            if primes > 0 || explicit.is_some() || args.len() != 1 {
                return Err(ParseError::new(start, "exp takes one argument and no derivative marks"));
            }
            return Ok(Node::new(start, Syntax::Exp(Box::new(args.pop().unwrap()))));
        }
        let deriv = match explicit {
            Some(idx) => {
                if idx.len() != args.len() {
                    return Err(ParseError::new(
                        start,
                        format!("multi-index has {} entries for {} arguments", idx.len(), args.len()),
                    ));
                }
                if primes > 1 || (primes == 1 && idx.iter().all(|k| k.is_zero())) {
                    return Err(ParseError::new(start, "use either primes or a multi-index"));
                }
                idx
            }
            None => {
                if primes > 0 && args.len() != 1 {
                    return Err(ParseError::new(
                        start,
                        "primes need a unary function; use name'{i,j,..}(..)",
                    ));
                }
                let mut d = vec![0; args.len()];
                if primes > 0 {
                    d[0] = primes;
                }
                d
            }
        };
        Ok(Node::new(start, Syntax::Call { name: name.to_string(), deriv, args }))
    }
}

/// Exact decimal helper used by tests and scenario parsing.
pub fn rational_from_decimal(text: &str) -> Option<Rational> {
    let mut p = Parser { src: text.trim(), pos: 0 };
    let neg = p.eat('-');
    let v = p.number().ok()?;
    if !p.at_end() {
        return None;
    }
    Some(if neg { -v } else { v })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_and_polynomial() {
        assert_eq!(Expr::parse("x1", None).unwrap(), Expr::var("x1"));
        let e: Expr = "2-(x^2+y^2)^2".parse().unwrap();
        assert_eq!(e, "2 - x^4 - 2 x^2 y^2 - y^4".parse().unwrap());
    }

    #[test]
    fn derivative_symbols() {
        let e: Expr = "exp(t)*f'(t)".parse().unwrap();
        assert_eq!(
            e,
            Expr::exp(Expr::var("t")) * Expr::profile("f", 1, Expr::var("t"))
        );
        let m: Expr = "psi'{1,2}(x, y)".parse().unwrap();
        assert_eq!(m, Expr::func("psi", vec![1, 2], vec![Expr::var("x"), Expr::var("y")]));
        assert_eq!("f'''(t)".parse::<Expr>().unwrap(), Expr::profile("f", 3, Expr::var("t")));
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!("0.25".parse::<Expr>().unwrap(), Expr::constant(super::super::rational(1, 4)));
        assert_eq!(rational_from_decimal("-1.5"), Some(super::super::rational(-3, 2)));
    }

    #[test]
    fn juxtaposition_versus_call() {
        let a: Expr = "x (y+1)".parse().unwrap();
        assert_eq!(a, "x*y + x".parse().unwrap());
        let b: Expr = "x(y+1)".parse().unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_syntax("x + * y").unwrap_err();
        assert_eq!(err.pos, 4);
        let err = parse_syntax("(x + y").unwrap_err();
        assert_eq!(err.pos, 6);
        match Expr::parse("x + w", Some(&["x", "y"])) {
            Err(Error::Parse(e)) => assert_eq!(e.pos, 4),
            other => panic!("{other:?}"),
        }
        assert!("x / y".parse::<Expr>().is_err());
        assert!("f'(x, y)".parse::<Expr>().is_err());
    }

    #[test]
    fn negative_powers_of_units() {
        let e: Expr = "exp(t)^(-2) * 4^(-1)".parse().unwrap();
        assert_eq!(e, "1/4*exp(-2*t)".parse().unwrap());
    }
}

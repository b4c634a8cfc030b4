//! Smooth interpolation profiles with exact boundary segments.
//!
//! Symbolic forms only ever contain opaque symbols such as `f(t)` or
//! `h1(x^2+y^2)`. A [`ProfileFunction`] supplies the numeric realization of
//! one symbol, the list of constraints it is meant to satisfy, and the
//! sub-intervals on which it equals a closed-form template exactly. Those
//! templates let collar and seam checks run as symbolic identities.
//!
//! All blends use the step `S(x) = ψ(x) / (ψ(x) + ψ(1-x))` with
//! `ψ(x) = exp(-1/x)`.
//!
//! | kind | variable | exact segments |
//! |------|----------|----------------|
//! | `f`  | t on `[c-T, c+T]` | `e^{t-c}` for `t-c <= -T/2`, `e^{c-t}` for `t-c >= T/2` |
//! | `g`  | t on `[c-T, c+T]` | `1` for `t-c <= -T+wT`, `-1` for `t-c >= T-wT` |
//! | `h1` | r on `[0, R]` | `2-r^4` for `r <= r0` (quartic model), `e^{1-r}` on `[1, R]` |
//! | `h2` | r on `[0, R]` | `r^2` for `r <= r0`, `1` on `[1, R]` |
//! | `u`  | φ on `[0, 2πR]` | `0` on `[0, ε]`, `1` on `[2πR-ε, 2πR]` |
//! | `k`  | t on `[-1-ε, 1+ε]` | `e^{-1}`, `e^t` on `[-1+ε, 1-ε]`, `e` |
//! | `g1` | t on `[c-H, c-H/2]` | `1` near `c-H`, `e^{t-c}` near `c-H/2` |
//! | `g2` | t on `[c+H/2, c+H]` | `e^{c-t}` near `c+H/2`, `1` near `c+H` |
//!
//! with `r0 = 1 - 2w`. The outer segments extend one half-width past the
//! domain (the realizations continue exactly there), which lets adjacent
//! pieces of a construction overlap on collars. `h1` and `h2` can also be realized as functions of
//! `s = r^2` (for Cartesian disk charts), and `h2` as `h2(r)/r^2` in `s`.

pub mod jet;

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{FromPrimitive, ToPrimitive};
use serde_json::json;

use crate::error::{Error, Result};
use crate::expr::{ExprRealization, Expr, Rational, Realization, Realizations};
use crate::forms::Form;
use crate::report::{VerificationReport, Violation};
use jet::{step, Jet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProfileKind {
    F,
    G,
    H1,
    H2,
    U,
    K,
    G1,
    G2,
}

impl ProfileKind {
    pub const ALL: [ProfileKind; 8] = [
        ProfileKind::F,
        ProfileKind::G,
        ProfileKind::H1,
        ProfileKind::H2,
        ProfileKind::U,
        ProfileKind::K,
        ProfileKind::G1,
        ProfileKind::G2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProfileKind::F => "f",
            ProfileKind::G => "g",
            ProfileKind::H1 => "h1",
            ProfileKind::H2 => "h2",
            ProfileKind::U => "u",
            ProfileKind::K => "k",
            ProfileKind::G1 => "g1",
            ProfileKind::G2 => "g2",
        }
    }
}

impl FromStr for ProfileKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ProfileKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown profile kind `{s}`")))
    }
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Argument convention of the disk profiles `h1`, `h2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Variable {
    /// The profile is a function of r.
    #[default]
    Radius,
    /// The profile is a function of `s = r^2`.
    Square,
    /// `h(r)/r^2` as a function of `s` (only for `h2`); this is the
    /// coefficient of `x dy - y dx` in Cartesian coordinates.
    SquareQuotient,
}

impl FromStr for Variable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "r" => Ok(Variable::Radius),
            "s" => Ok(Variable::Square),
            "s_quot" => Ok(Variable::SquareQuotient),
            _ => Err(Error::Invalid(format!("unknown profile variable `{s}`"))),
        }
    }
}

/// Shape of `h1` near the axis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum H1Model {
    /// `2 - e^{1-1/r^2}`: every derivative vanishes at 0.
    #[default]
    Flat,
    /// `2 - r^4`, the C^3 polynomial model.
    Quartic,
}

impl FromStr for H1Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat" => Ok(H1Model::Flat),
            "quartic" => Ok(H1Model::Quartic),
            _ => Err(Error::Invalid(format!("unknown h1 model `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileParams {
    /// ε for `u` and `k`.
    pub eps: f64,
    /// R: outer disk radius for `h1`, `h2`; circle length factor for `u`.
    pub big_r: f64,
    /// Relative width of the constant end pieces (`g`, `g1`, `g2`) and of
    /// the disk blend (`r0 = 1 - 2 width`).
    pub width: f64,
    /// Half-width T of the t-interval of `f`, `g` (H for `g1`, `g2`).
    pub half_width: f64,
    pub center: f64,
    pub variable: Variable,
    pub h1_model: H1Model,
    /// φ-interval of `u`, default `[0, 2πR]`.
    pub interval: Option<(f64, f64)>,
}

impl Default for ProfileParams {
    fn default() -> Self {
        ProfileParams {
            eps: 0.1,
            big_r: 10.0,
            width: 0.1,
            half_width: 1.0,
            center: 0.0,
            variable: Variable::Radius,
            h1_model: H1Model::Flat,
            interval: None,
        }
    }
}

impl ProfileParams {
    fn u_interval(&self) -> (f64, f64) {
        self.interval.unwrap_or((0.0, 2.0 * PI * self.big_r))
    }

    fn s0(&self) -> f64 {
        let r0 = 1.0 - 2.0 * self.width;
        r0 * r0
    }
}

/// Built-in realization of a profile kind.
#[derive(Clone, Debug)]
pub struct Builtin {
    kind: ProfileKind,
    params: ProfileParams,
}

impl Builtin {
    pub fn jet(&self, x: Jet) -> Jet {
        let p = &self.params;
        let one = Jet::constant(1.0);
        match self.kind {
            ProfileKind::F => {
                let t = x - Jet::constant(p.center);
                let big_t = p.half_width;
                let (a, b, c) = (0.2 * big_t, 0.5 * big_t, 0.5 * big_t);
                let abs = if t.value() < 0.0 { -t } else { t };
                let w = step((abs - Jet::constant(a)).scale(1.0 / (b - a)));
                let quad = (t * t).scale(0.5 / c);
                (-((one - w) * quad + w * abs)).exp()
            }
            ProfileKind::G => {
                let t = x - Jet::constant(p.center);
                let big_t = p.half_width;
                let b = p.width * big_t;
                one - step((t + Jet::constant(big_t - b)).scale(0.5 / (big_t - b))).scale(2.0)
            }
            ProfileKind::H1 | ProfileKind::H2 => {
                let s = match p.variable {
                    Variable::Radius => x * x,
                    _ => x,
                };
                disk_profile(self.kind, p, s)
            }
            ProfileKind::U => {
                let (lo, hi) = p.u_interval();
                step((x - Jet::constant(lo + p.eps)).scale(1.0 / (hi - lo - 2.0 * p.eps)))
            }
            ProfileKind::K => {
                let e = p.eps;
                let big_k = if x.value() < 0.0 {
                    let t1 = x + one;
                    step(t1.scale(1.0 / e)) * t1 - one
                } else {
                    let s2 = step((x - Jet::constant(1.0 - e)).scale(1.0 / e));
                    (one - s2) * x + s2
                };
                big_k.exp()
            }
            ProfileKind::G1 => {
                let t = x - Jet::constant(p.center);
                let h = p.half_width;
                let a = p.width * h / 2.0;
                let sigma = (t + Jet::constant(h - a)).scale(1.0 / (h / 2.0 - 2.0 * a));
                (step(sigma) * t).exp()
            }
            ProfileKind::G2 => {
                let t = x - Jet::constant(p.center);
                let h = p.half_width;
                let a = p.width * h / 2.0;
                let sigma = (t - Jet::constant(h / 2.0 + a)).scale(1.0 / (h / 2.0 - 2.0 * a));
                ((one - step(sigma)) * (-t)).exp()
            }
        }
    }
}

/// `h1`, `h2` as functions of `s = r^2` (or `h2/s` for the quotient view).
fn disk_profile(kind: ProfileKind, p: &ProfileParams, s: Jet) -> Jet {
    let one = Jet::constant(1.0);
    let s0 = p.s0();
    let sv = s.value();
    let sigma = (s - Jet::constant(s0)).scale(1.0 / (1.0 - s0));
    let w = step(sigma);
    match kind {
        ProfileKind::H1 => {
            let inner = || match p.h1_model {
                H1Model::Flat => Jet::constant(2.0) - jet::flat(s).scale(E),
                H1Model::Quartic => Jet::constant(2.0) - s * s,
            };
            let outer = || (one - s.sqrt()).exp();
            if sv <= s0 {
                inner()
            } else if sv >= 1.0 {
                outer()
            } else {
                (one - w) * inner() + w * outer()
            }
        }
        _ => match p.variable {
            Variable::SquareQuotient => {
                if sv <= s0 {
                    one
                } else {
                    (one - w) + w * s.recip()
                }
            }
            _ => (one - w) * s + w,
        },
    }
}

impl Realization for Builtin {
    fn max_order(&self) -> u32 {
        jet::ORDER as u32
    }

    fn eval(&self, deriv: &[u32], args: &[f64]) -> f64 {
        self.jet(Jet::var(args[0])).derivative(deriv[0] as usize)
    }
}

/// Sub-interval on which a profile equals `template` (a function of `_`).
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub lo: Rational,
    pub hi: Rational,
    pub template: Expr,
}

/// Exact value of a derivative at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Fact {
    pub order: u32,
    pub at: Rational,
    pub value: Expr,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Monotone {
    Nondecreasing,
    Nonincreasing,
    /// Derivative strictly negative from `from` on; below it only
    /// non-positivity is checked (flat profiles underflow there).
    Decreasing { from: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Constraint {
    Positive,
    Nonnegative,
    Even,
    Odd,
    Range(f64, f64),
    Monotone { lo: f64, hi: f64, kind: Monotone },
    /// `sup |p'| <= bound`.
    SlopeBound(f64),
    /// `p(x) / x^2 -> 1` as `x -> 0`.
    QuadraticAtZero,
    Segments,
    Facts,
    /// Second derivative continuous across segment ends.
    SmoothSeams,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Positive => write!(f, "positive"),
            Constraint::Nonnegative => write!(f, "nonnegative"),
            Constraint::Even => write!(f, "even"),
            Constraint::Odd => write!(f, "odd"),
            Constraint::Range(a, b) => write!(f, "range [{a}, {b}]"),
            Constraint::Monotone { lo, hi, kind } => write!(f, "{kind:?} on [{lo}, {hi}]"),
            Constraint::SlopeBound(b) => write!(f, "|p'| <= {b}"),
            Constraint::QuadraticAtZero => write!(f, "p(x)/x^2 -> 1 at 0"),
            Constraint::Segments => write!(f, "exact segments"),
            Constraint::Facts => write!(f, "point values"),
            Constraint::SmoothSeams => write!(f, "C2 across seams"),
        }
    }
}

/// Largest value of the smooth-step derivative, `S'(1/2) = 2`.
pub const STEP_SLOPE_MAX: f64 = 2.0;

#[derive(Clone, Debug)]
pub struct ProfileFunction {
    name: String,
    kind: ProfileKind,
    params: ProfileParams,
    domain: (f64, f64),
    constraints: Vec<Constraint>,
    segments: Vec<Segment>,
    facts: Vec<Fact>,
    realization: Arc<dyn Realization>,
    custom: bool,
}

/// Segment bounds are rounded to 12 decimals and read back exactly, so
/// `1 - 0.1` becomes `9/10` rather than the nearest binary fraction.
pub(crate) fn exact(v: f64) -> Rational {
    let text = format!("{v:.12}");
    crate::expr::rational_from_decimal(&text).unwrap_or_else(|| Rational::from_f64(v).expect("finite parameter"))
}

fn hole() -> Expr {
    Expr::var("_")
}

/// Builds a profile of `kind` with the given parameters, named after the
/// kind.
pub fn make_profile(kind: ProfileKind, params: ProfileParams) -> Result<ProfileFunction> {
    ProfileFunction::new(kind.name(), kind, params)
}

impl ProfileFunction {
    pub fn new(name: &str, kind: ProfileKind, params: ProfileParams) -> Result<Self> {
        check_feasible(kind, &params)?;
        let p = &params;
        let c = p.center;
        let mut constraints = vec![Constraint::Segments, Constraint::Facts, Constraint::SmoothSeams];
        let mut segments = Vec::new();
        let mut facts = Vec::new();
        let seg = |lo: f64, hi: f64, template: Expr| Segment { lo: exact(lo), hi: exact(hi), template };
        let fact = |order: u32, at: f64, value: Expr| Fact { order, at: exact(at), value };
        let shifted = || hole() - Expr::constant(exact(c));
        let domain;
        match kind {
            ProfileKind::F => {
                let t = p.half_width;
                domain = (c - t, c + t);
                constraints.extend([
                    Constraint::Positive,
                    Constraint::Even,
                    Constraint::Monotone { lo: c - t, hi: c, kind: Monotone::Nondecreasing },
                    Constraint::Monotone { lo: c, hi: c + t, kind: Monotone::Nonincreasing },
                ]);
                segments.push(seg(c - 2.0 * t, c - t / 2.0, Expr::exp(shifted())));
                segments.push(seg(c + t / 2.0, c + 2.0 * t, Expr::exp(-shifted())));
                facts.push(fact(0, c, Expr::one()));
                facts.push(fact(1, c, Expr::zero()));
            }
            ProfileKind::G => {
                let t = p.half_width;
                let b = p.width * t;
                domain = (c - t, c + t);
                constraints.extend([
                    Constraint::Odd,
                    Constraint::Range(-1.0, 1.0),
                    Constraint::Monotone { lo: c - t, hi: c + t, kind: Monotone::Nonincreasing },
                    Constraint::Monotone {
                        lo: c - t + b,
                        hi: c + t - b,
                        kind: Monotone::Decreasing { from: f64::NEG_INFINITY },
                    },
                ]);
                segments.push(seg(c - 2.0 * t, c - t + b, Expr::one()));
                segments.push(seg(c + t - b, c + 2.0 * t, Expr::int(-1)));
                facts.push(fact(0, c, Expr::zero()));
            }
            ProfileKind::H1 | ProfileKind::H2 => {
                let r = p.big_r;
                let r0 = 1.0 - 2.0 * p.width;
                let square = p.variable != Variable::Radius;
                domain = if square { (0.0, r * r) } else { (0.0, r) };
                let (near, far) = if square { (r0 * r0, 1.0) } else { (r0, 1.0) };
                if kind == ProfileKind::H1 {
                    let strict_from = match p.h1_model {
                        H1Model::Quartic => 0.0,
                        H1Model::Flat => 0.05,
                    };
                    let strict_from = if square { strict_from * strict_from } else { strict_from };
                    constraints.extend([
                        Constraint::Positive,
                        Constraint::Monotone {
                            lo: domain.0,
                            hi: domain.1,
                            kind: Monotone::Decreasing { from: strict_from },
                        },
                    ]);
                    if p.h1_model == H1Model::Quartic {
                        let t = if square { Expr::int(2) - hole().pow(2) } else { Expr::int(2) - hole().pow(4) };
                        segments.push(seg(0.0, near, t));
                    }
                    if !square {
                        segments.push(seg(far, 2.0 * r, Expr::exp(Expr::one() - hole())));
                    }
                    facts.push(fact(0, 0.0, Expr::int(2)));
                    facts.push(fact(1, 0.0, Expr::zero()));
                } else {
                    constraints.extend([
                        Constraint::Nonnegative,
                        Constraint::Monotone { lo: domain.0, hi: domain.1, kind: Monotone::Nondecreasing },
                    ]);
                    match p.variable {
                        Variable::Radius => {
                            constraints.push(Constraint::QuadraticAtZero);
                            segments.push(seg(0.0, near, hole().pow(2)));
                            segments.push(seg(far, 2.0 * r, Expr::one()));
                            facts.push(fact(0, 0.0, Expr::zero()));
                            facts.push(fact(1, 0.0, Expr::zero()));
                        }
                        Variable::Square => {
                            segments.push(seg(0.0, near, hole()));
                            segments.push(seg(far, 4.0 * r * r, Expr::one()));
                            facts.push(fact(0, 0.0, Expr::zero()));
                            facts.push(fact(1, 0.0, Expr::one()));
                        }
                        Variable::SquareQuotient => {
                            constraints.retain(|c| !matches!(c, Constraint::Monotone { .. }));
                            segments.push(seg(0.0, near, Expr::one()));
                        }
                    }
                }
            }
            ProfileKind::U => {
                let (lo, hi) = p.u_interval();
                domain = (lo, hi);
                let bound = STEP_SLOPE_MAX / (hi - lo - 2.0 * p.eps);
                constraints.extend([
                    Constraint::Range(0.0, 1.0),
                    Constraint::Monotone { lo, hi, kind: Monotone::Nondecreasing },
                    Constraint::SlopeBound(bound),
                ]);
                segments.push(seg(lo, lo + p.eps, Expr::zero()));
                segments.push(seg(hi - p.eps, hi, Expr::one()));
            }
            ProfileKind::K => {
                let e = p.eps;
                domain = (-1.0 - e, 1.0 + e);
                constraints.extend([
                    Constraint::Positive,
                    Constraint::Range(E.recip(), E),
                    Constraint::Monotone { lo: domain.0, hi: domain.1, kind: Monotone::Nondecreasing },
                ]);
                segments.push(seg(-2.0 - e, -1.0, Expr::exp(Expr::int(-1))));
                segments.push(seg(-1.0 + e, 1.0 - e, Expr::exp(hole())));
                segments.push(seg(1.0, 2.0 + e, Expr::exp(Expr::one())));
            }
            ProfileKind::G1 => {
                let h = p.half_width;
                let a = p.width * h / 2.0;
                domain = (c - h, c - h / 2.0);
                constraints.push(Constraint::Positive);
                segments.push(seg(c - 2.0 * h, c - h + a, Expr::one()));
                segments.push(seg(c - h / 2.0 - a, c, Expr::exp(shifted())));
            }
            ProfileKind::G2 => {
                let h = p.half_width;
                let a = p.width * h / 2.0;
                domain = (c + h / 2.0, c + h);
                constraints.push(Constraint::Positive);
                segments.push(seg(c, c + h / 2.0 + a, Expr::exp(-shifted())));
                segments.push(seg(c + h - a, c + 2.0 * h, Expr::one()));
            }
        }
        let realization = Arc::new(Builtin { kind, params: params.clone() });
        Ok(ProfileFunction {
            name: name.to_string(),
            kind,
            params,
            domain,
            constraints,
            segments,
            facts,
            realization,
            custom: false,
        })
    }

    /// Replaces the numeric realization by a closed form in `var` while
    /// keeping the declared constraints (used for negative controls).
    pub fn with_realization(mut self, body: &Expr, var: &str) -> Result<Self> {
        self.realization = Arc::new(ExprRealization::new(body, &[var], jet::ORDER as u32)?);
        self.custom = true;
        Ok(self)
    }

    pub fn renamed(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn params(&self) -> &ProfileParams {
        &self.params
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn realization(&self) -> Arc<dyn Realization> {
        self.realization.clone()
    }

    /// The symbol `name(arg)`.
    pub fn at(&self, arg: Expr) -> Expr {
        Expr::profile(&self.name, 0, arg)
    }

    /// k-th derivative at a numeric point.
    pub fn eval(&self, k: u32, x: f64) -> f64 {
        self.realization.eval(&[k], &[x])
    }

    /// Rewrites `name^{(k)}(arg)` wherever `arg` is affine in `var` and
    /// stays inside one exact segment while `var` ranges over `[lo, hi]`,
    /// and wherever `arg` is a constant covered by a segment or a fact.
    pub fn rewrite(&self, e: &Expr, var: Option<(&str, &Rational, &Rational)>) -> Expr {
        e.map_funcs(&|name, deriv, args| {
            if name != self.name || args.len() != 1 {
                return None;
            }
            let k = deriv[0];
            let arg = &args[0];
            let (amin, amax) = match arg.as_constant() {
                Some(c) => {
                    for f in &self.facts {
                        if f.order == k && f.at == c {
                            return Some(f.value.clone());
                        }
                    }
                    (c.clone(), c)
                }
                None => affine_range(arg, var?)?,
            };
            let s = self.segments.iter().find(|s| s.lo <= amin && amax <= s.hi)?;
            let mut t = s.template.clone();
            for _ in 0..k {
                t = t.diff("_");
            }
            let mut b = BTreeMap::new();
            b.insert("_".to_string(), arg.clone());
            Some(t.substitute(&b))
        })
    }

    pub fn rewrite_form(&self, f: &Form, var: Option<(&str, &Rational, &Rational)>) -> Form {
        f.map_coefficients(|c| self.rewrite(c, var))
    }
}

/// Range of an affine expression `a*v + b` over `v ∈ [lo, hi]`.
fn affine_range(arg: &Expr, (v, lo, hi): (&str, &Rational, &Rational)) -> Option<(Rational, Rational)> {
    let poly = arg.polynomial_in(v)?;
    if poly.keys().any(|&k| k > 1) {
        return None;
    }
    let b = poly.get(&0).map(|e| e.as_constant()).unwrap_or(Some(Rational::from_integer(0.into())))?;
    let a = poly.get(&1).map(|e| e.as_constant()).unwrap_or(Some(Rational::from_integer(0.into())))?;
    let x = &a * lo + &b;
    let y = &a * hi + &b;
    Some(if x <= y { (x, y) } else { (y, x) })
}

fn check_feasible(kind: ProfileKind, p: &ProfileParams) -> Result<()> {
    let bad = |m: String| Err(Error::InfeasibleProfile(m));
    let finite = [p.eps, p.big_r, p.width, p.half_width, p.center].iter().all(|v| v.is_finite());
    if !finite {
        return bad("parameters must be finite".into());
    }
    match kind {
        ProfileKind::F | ProfileKind::G | ProfileKind::G1 | ProfileKind::G2 => {
            if p.half_width <= 0.0 {
                return bad(format!("half width {} must be positive", p.half_width));
            }
            if matches!(kind, ProfileKind::G | ProfileKind::G1 | ProfileKind::G2)
                && !(p.width > 0.0 && p.width < 0.5)
            {
                return bad(format!("smoothing width {} must lie in (0, 1/2)", p.width));
            }
        }
        ProfileKind::H1 | ProfileKind::H2 => {
            if p.big_r < 1.0 {
                return bad(format!("R = {} must be at least 1", p.big_r));
            }
            if !(p.width > 0.0 && p.width < 0.5) {
                return bad(format!("smoothing width {} must lie in (0, 1/2)", p.width));
            }
            if kind == ProfileKind::H1 && p.variable == Variable::SquareQuotient {
                return bad("the quotient view is only defined for h2".into());
            }
        }
        ProfileKind::U => {
            let (lo, hi) = p.u_interval();
            if p.big_r < 1.0 && p.interval.is_none() {
                return bad(format!("R = {} must be at least 1", p.big_r));
            }
            if !(p.eps > 0.0) || hi - lo <= 2.0 * p.eps {
                return bad(format!("ε = {} leaves no room to blend on [{lo}, {hi}]", p.eps));
            }
        }
        ProfileKind::K => {
            if !(p.eps > 0.0 && p.eps < 0.25) {
                return bad(format!("ε = {} must lie in (0, 1/4)", p.eps));
            }
        }
    }
    Ok(())
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let n = n.max(2);
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn violation(report: &mut VerificationReport, name: &str, constraint: &str, at: f64, value: f64) {
    report.passed = false;
    let same = report.violations.iter().filter(|v| v.constraint == constraint).count();
    if same < 16 {
        let mut m = BTreeMap::new();
        m.insert(name.to_string(), at);
        report.violations.push(Violation { constraint: constraint.to_string(), at: m, value });
    }
}

const TOL: f64 = 1e-12;

/// Evaluates every declared constraint of `p` on `grid` uniform points of
/// its domain (plus the segment interiors).
pub fn validate_profile(p: &ProfileFunction, grid_n: usize) -> VerificationReport {
    let mut rep = VerificationReport::new(format!("profile {}", p.name))
        .param("kind", p.kind.name())
        .param("grid", grid_n)
        .param("domain", json!([p.domain.0, p.domain.1]));
    rep.passed = true;
    let (lo, hi) = p.domain;
    let c = p.params.center;
    let var = "x";
    let pts: Vec<f64> = grid(lo, hi, grid_n).collect();
    let val = |x: f64| p.eval(0, x);
    let der = |x: f64| p.eval(1, x);
    let mut margin = f64::INFINITY;
    for con in &p.constraints {
        let label = con.to_string();
        match con {
            Constraint::Positive => {
                for &x in &pts {
                    let v = val(x);
                    margin = margin.min(v);
                    if !(v > 0.0) {
                        violation(&mut rep, var, &label, x, v);
                    }
                }
            }
            Constraint::Nonnegative => {
                for &x in &pts {
                    let v = val(x);
                    if !(v >= -TOL) {
                        violation(&mut rep, var, &label, x, v);
                    }
                }
            }
            Constraint::Even | Constraint::Odd => {
                let sign = if matches!(con, Constraint::Even) { 1.0 } else { -1.0 };
                for &x in &pts {
                    let d = val(2.0 * c - x) - sign * val(x);
                    if !(d.abs() <= TOL) {
                        violation(&mut rep, var, &label, x, d);
                    }
                }
            }
            Constraint::Range(a, b) => {
                for &x in &pts {
                    let v = val(x);
                    if !(v >= a - TOL && v <= b + TOL) {
                        violation(&mut rep, var, &label, x, v);
                    }
                }
            }
            Constraint::Monotone { lo: a, hi: b, kind } => {
                for &x in pts.iter().filter(|&&x| x >= *a && x <= *b) {
                    let d = der(x);
                    let ok = match kind {
                        Monotone::Nondecreasing => d >= -TOL,
                        Monotone::Nonincreasing => d <= TOL,
                        Monotone::Decreasing { from } => {
                            // Near blend ends the slope underflows to 0.
                            let gap = 1e-6 * (*b - *a);
                            if x >= *from && x > *a + gap && x < *b - gap {
                                margin = margin.min(-d);
                                d < 0.0
                            } else {
                                d <= TOL
                            }
                        }
                    };
                    if !ok {
                        violation(&mut rep, var, &label, x, d);
                    }
                }
            }
            Constraint::SlopeBound(bound) => {
                let sup = pts.iter().map(|&x| der(x).abs()).fold(0.0, f64::max);
                rep.thresholds.insert("slope_sup".into(), sup);
                rep.thresholds.insert("slope_bound".into(), *bound);
                if sup > *bound * (1.0 + 1e-9) {
                    violation(&mut rep, var, &label, f64::NAN, sup);
                }
            }
            Constraint::QuadraticAtZero => {
                let x = 1e-3 * (hi - lo).min(1.0);
                let ratio = val(x) / (x * x);
                rep.residuals.insert("h2/r^2 - 1".into(), (ratio - 1.0).abs());
                if (ratio - 1.0).abs() > 1e-6 {
                    violation(&mut rep, var, &label, x, ratio);
                }
            }
            Constraint::Segments => {
                for s in &p.segments {
                    let (slo, shi) = (ToPrimitive::to_f64(&s.lo).unwrap(), ToPrimitive::to_f64(&s.hi).unwrap());
                    let tmpl = ExprRealization::new(&s.template, &["_"], 1).expect("template compiles");
                    for x in grid(slo, shi, grid_n.max(11)) {
                        for k in 0..2 {
                            let want = tmpl.eval(&[k], &[x]);
                            let got = p.eval(k, x);
                            if !((got - want).abs() <= 1e-12 * (1.0 + want.abs())) {
                                violation(&mut rep, var, &format!("{label} (order {k})"), x, got - want);
                            }
                        }
                    }
                }
            }
            Constraint::Facts => {
                for f in &p.facts {
                    let at = ToPrimitive::to_f64(&f.at).unwrap();
                    let want = f.value.eval(&Default::default(), &Realizations::new()).unwrap_or(f64::NAN);
                    let got = p.eval(f.order, at);
                    if !((got - want).abs() <= 1e-12 * (1.0 + want.abs())) {
                        violation(&mut rep, var, &format!("{label} (order {})", f.order), at, got - want);
                    }
                }
            }
            Constraint::SmoothSeams => {
                let mut worst: f64 = 0.0;
                for s in &p.segments {
                    for end in [&s.lo, &s.hi] {
                        let x = ToPrimitive::to_f64(end).unwrap();
                        if x <= lo || x >= hi {
                            continue;
                        }
                        let h = 1e-9 * (1.0 + x.abs());
                        let jump = (p.eval(2, x + h) - p.eval(2, x - h)).abs();
                        worst = worst.max(jump);
                        if jump > 1e-6 {
                            violation(&mut rep, var, &label, x, jump);
                        }
                    }
                }
                rep.residuals.insert("second_derivative_jump".into(), worst);
            }
        }
    }
    if margin.is_finite() {
        rep.margin = Some(margin);
    }
    if !rep.passed {
        rep.detail(format!("{} constraint samples violated", rep.violations.len()));
    }
    rep
}

/// Checks the coupling inequality of a profile pair on `grid_n` points:
/// `f'g - g'f > 0` for (f, g) and `h1 h2' - h1' h2 > 0` for (h1, h2)
/// (the latter away from the axis).
pub fn validate_pair(a: &ProfileFunction, b: &ProfileFunction, grid_n: usize) -> VerificationReport {
    let mut rep = VerificationReport::new(format!("profile pair ({}, {})", a.name, b.name)).param("grid", grid_n);
    rep.passed = true;
    let (expr, lo, hi, skip_lo) = match (a.kind, b.kind) {
        (ProfileKind::F, ProfileKind::G) => ("f'g - g'f", a.domain.0, a.domain.1, false),
        (ProfileKind::H1, ProfileKind::H2) => {
            if a.params.variable != b.params.variable || a.params.variable == Variable::SquareQuotient {
                rep.fail("h1 and h2 must use the same variable (r or s)");
                return rep;
            }
            ("h1 h2' - h1' h2", a.domain.0, a.domain.1, true)
        }
        _ => {
            rep.fail(format!("no coupling constraint for ({}, {})", a.kind, b.kind));
            return rep;
        }
    };
    rep.params.insert("constraint".into(), expr.into());
    let mut min = f64::INFINITY;
    let mut arg = f64::NAN;
    for x in grid(lo, hi, grid_n) {
        if skip_lo && x <= lo {
            continue;
        }
        let v = match a.kind {
            ProfileKind::F => a.eval(1, x) * b.eval(0, x) - b.eval(1, x) * a.eval(0, x),
            _ => a.eval(0, x) * b.eval(1, x) - a.eval(1, x) * b.eval(0, x),
        };
        if v < min {
            min = v;
            arg = x;
        }
        if !(v > 0.0) {
            violation(&mut rep, "x", expr, x, v);
        }
    }
    rep.min_value = Some(min);
    let mut w = BTreeMap::new();
    w.insert("x".to_string(), arg);
    rep.witness = Some(w);
    rep.margin = Some(min);
    rep
}

/// Named profiles available to a computation.
#[derive(Clone, Debug, Default)]
pub struct ProfileSet {
    profiles: BTreeMap<String, ProfileFunction>,
}

impl ProfileSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, p: ProfileFunction) -> &mut Self {
        self.profiles.insert(p.name.clone(), p);
        self
    }

    pub fn with(mut self, p: ProfileFunction) -> Self {
        self.insert(p);
        self
    }

    pub fn get(&self, name: &str) -> Option<&ProfileFunction> {
        self.profiles.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ProfileFunction> {
        self.profiles.values()
    }

    pub fn realizations(&self) -> Realizations {
        let mut r = Realizations::new();
        for p in self.profiles.values() {
            r.insert(&p.name, p.realization());
        }
        r
    }

    /// Applies every profile's exact segments and facts.
    pub fn rewrite_form(&self, f: &Form, var: Option<(&str, &Rational, &Rational)>) -> Form {
        self.profiles.values().fold(f.clone(), |acc, p| p.rewrite_form(&acc, var))
    }

    pub fn rewrite(&self, e: &Expr, var: Option<(&str, &Rational, &Rational)>) -> Expr {
        self.profiles.values().fold(e.clone(), |acc, p| p.rewrite(&acc, var))
    }
}

#[cfg(test)]
mod tests;

use std::str::FromStr;

use num_traits::ToPrimitive;

use super::{product_chart, ContactModel};
use crate::error::{Error, Result};
use crate::expr::{rational, Expr, Rational};
use crate::forms::{ChartRef, Domain, Form};
use crate::profiles::{exact, ProfileFunction, ProfileKind, ProfileParams, ProfileSet};

/// One piece of a [`PiecewiseForm`]: a form used for `var ∈ [lo, hi]`.
#[derive(Clone, Debug)]
pub struct Region {
    pub name: String,
    pub form: Form,
    pub lo: Rational,
    pub hi: Rational,
}

impl Region {
    pub fn range(&self) -> (f64, f64) {
        (self.lo.to_f64().unwrap(), self.hi.to_f64().unwrap())
    }
}

/// Two regions that must agree on `var ∈ [lo, hi]`.
#[derive(Clone, Debug)]
pub struct Collar {
    pub left: usize,
    pub right: usize,
    pub lo: Rational,
    pub hi: Rational,
}

/// A region that must equal `expected` on `var ∈ [lo, hi]`.
#[derive(Clone, Debug)]
pub struct NormalForm {
    pub label: String,
    pub region: usize,
    pub lo: Rational,
    pub hi: Rational,
    pub expected: Form,
}

/// Forms on intervals of one distinguished coordinate, glued on collars.
/// Comparisons happen after replacing every profile by its exact template
/// on the collar, so equality is symbolic.
#[derive(Clone, Debug)]
pub struct PiecewiseForm {
    pub var: String,
    pub regions: Vec<Region>,
    pub collars: Vec<Collar>,
    pub normal_forms: Vec<NormalForm>,
    pub profiles: ProfileSet,
}

impl PiecewiseForm {
    pub fn chart(&self) -> &ChartRef {
        self.regions[0].form.chart()
    }

    /// Region `i` with profiles rewritten for `var ∈ [lo, hi]`.
    pub fn on_interval(&self, i: usize, lo: &Rational, hi: &Rational) -> Form {
        self.profiles.rewrite_form(&self.regions[i].form, Some((&self.var, lo, hi)))
    }

    pub fn collar_difference(&self, c: &Collar) -> Result<Form> {
        self.on_interval(c.left, &c.lo, &c.hi).sub(&self.on_interval(c.right, &c.lo, &c.hi))
    }

    pub fn normal_form_difference(&self, n: &NormalForm) -> Result<Form> {
        self.on_interval(n.region, &n.lo, &n.hi).sub(&n.expected)
    }

    pub fn collar_label(&self, c: &Collar) -> String {
        format!("{} | {} on {} ∈ [{}, {}]", self.regions[c.left].name, self.regions[c.right].name, self.var, c.lo, c.hi)
    }

    /// Errors with the first collar whose two sides differ.
    pub fn check_collars(&self) -> Result<()> {
        for c in &self.collars {
            if !self.collar_difference(c)?.is_zero() {
                return Err(Error::CollarMismatch(self.collar_label(c)));
            }
        }
        Ok(())
    }
}

/// Three pieces: `e^{-1} η̃|_{t≤-1}` (profiles at their left templates),
/// `k(t) η̃` and `e · η̃|_{t≥1}`. The outer pieces overlap the middle one on
/// `[-1-ε, -1]` and `[1, 1+ε]`, where `k` is constant.
pub fn asymmetric_scale(eta: &Form, profiles: &ProfileSet, k: &ProfileFunction, t: &str) -> Result<PiecewiseForm> {
    if k.kind() != ProfileKind::K {
        return Err(Error::Invalid(format!("`{}` is not a k-profile", k.name())));
    }
    if eta.chart().index(t).is_none() {
        return Err(Error::UnknownCoordinate(t.to_string()));
    }
    let eps = exact(k.params().eps);
    let one = rational(1, 1);
    let left = (-&one - &eps, -one.clone());
    let right = (one.clone(), &one + &eps);
    let outer = |lo: &Rational, hi: &Rational, c: i64| {
        profiles.rewrite_form(eta, Some((t, lo, hi))).scale(&Expr::exp(Expr::int(c)))
    };
    let regions = vec![
        Region { name: "W1".into(), form: outer(&left.0, &left.1, -1), lo: left.0.clone(), hi: left.1.clone() },
        Region { name: "N x I".into(), form: eta.scale(&k.at(Expr::var(t))), lo: left.0.clone(), hi: right.1.clone() },
        Region { name: "W2".into(), form: outer(&right.0, &right.1, 1), lo: right.0.clone(), hi: right.1.clone() },
    ];
    let collars = vec![
        Collar { left: 0, right: 1, lo: left.0.clone(), hi: left.1.clone() },
        Collar { left: 1, right: 2, lo: right.0.clone(), hi: right.1.clone() },
    ];
    let mut set = profiles.clone();
    set.insert(k.clone());
    Ok(PiecewiseForm { var: t.to_string(), regions, collars, normal_forms: vec![], profiles: set })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConcaveVariant {
    /// `α + e^{-t} λ` near `t = -1` to `α + e^t λ̂` near `t = 1`.
    Swap,
    /// Four pieces on `[0, 1]`: `e^t α + λ`, `e^{1/2-t} α + λ̂`,
    /// `e^{t-1/2} α̂ + λ̂`, `e^{1-t} α̂ + λ`, joined by a convex fold at 1/4,
    /// a swap at 1/2 and a convex fold at 3/4.
    FourPart,
}

impl FromStr for ConcaveVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "swap" => Ok(ConcaveVariant::Swap),
            "four_part" => Ok(ConcaveVariant::FourPart),
            _ => Err(Error::Invalid(format!("unknown concave variant `{s}`"))),
        }
    }
}

fn profile(name: &str, kind: ProfileKind, center: f64, half_width: f64) -> Result<ProfileFunction> {
    ProfileFunction::new(name, kind, ProfileParams { center, half_width, ..Default::default() })
}

struct Pieces {
    chart: ChartRef,
    t: Expr,
    alpha: ContactModel,
    lambda: ContactModel,
}

impl Pieces {
    fn e(&self, c: Expr) -> Expr {
        Expr::exp(c)
    }

    fn shift(&self, c: Rational) -> Expr {
        self.t.clone() - Expr::constant(c)
    }

    /// `f(t) a + horizontal(b) + s g(t) dz_b`: the convex fold that turns
    /// `e^{..} a + b` into `e^{..} a + b̂`.
    fn fold(&self, scale: Expr, a: &Form, b: &ContactModel, f: &ProfileFunction, g: &ProfileFunction) -> Result<Form> {
        let sign = if b.is_hatted() { -1 } else { 1 };
        let dz = Form::dx(&self.chart, b.reeb_coord())?;
        a.scale(&(scale * f.at(self.t.clone())))
            .add(&b.horizontal(&self.chart)?)?
            .add(&dz.scale(&(g.at(self.t.clone()) * Expr::int(sign))))
    }
}

/// Piecewise forms realizing the concave collar normal forms on
/// `(α-coordinates, λ-coordinates, t)`.
pub fn concave_collar_forms(alpha: &ContactModel, lambda: &ContactModel, variant: ConcaveVariant) -> Result<PiecewiseForm> {
    if alpha.is_hatted() || lambda.is_hatted() {
        return Err(Error::Invalid("pass the unhatted models; their hats are derived".into()));
    }
    let t = "t";
    let (lo, hi) = match variant {
        ConcaveVariant::Swap => (-1.0, 1.0),
        ConcaveVariant::FourPart => (0.0, 1.0),
    };
    let chart = product_chart(&[alpha.coords(), lambda.coords(), vec![t.into()]], &[(t, Domain::interval(lo, hi))])?;
    let p = Pieces { chart: chart.clone(), t: Expr::var(t), alpha: alpha.clone(), lambda: lambda.clone() };
    let a = p.alpha.form(&chart)?;
    let ah = p.alpha.hatted().form(&chart)?;
    let l = p.lambda.form(&chart)?;
    let lh = p.lambda.hatted().form(&chart)?;
    let q = |n: i64, d: i64| rational(n, d);
    let region = |name: &str, form: Form, lo: Rational, hi: Rational| Region { name: name.into(), form, lo, hi };
    let nf = |label: &str, region: usize, lo: Rational, hi: Rational, expected: Form| NormalForm {
        label: label.into(),
        region,
        lo,
        hi,
        expected,
    };
    let mut set = ProfileSet::new();
    match variant {
        ConcaveVariant::Swap => {
            let g1 = profile("g1", ProfileKind::G1, 0.0, 1.0)?;
            let g2 = profile("g2", ProfileKind::G2, 0.0, 1.0)?;
            let f = profile("f", ProfileKind::F, 0.0, 0.5)?;
            let g = profile("g", ProfileKind::G, 0.0, 0.5)?;
            let emt = p.e(-p.t.clone());
            let et = p.e(p.t.clone());
            let left = a.add(&l.scale(&emt))?;
            let right = a.add(&lh.scale(&et))?;
            let mid = p.fold(Expr::one(), &a, &p.lambda, &f, &g)?;
            let regions = vec![
                region("g1 collar", left.scale(&g1.at(p.t.clone())), q(-1, 1), q(-1, 2)),
                region("fold", mid, q(-11, 20), q(11, 20)),
                region("g2 collar", right.scale(&g2.at(p.t.clone())), q(1, 2), q(1, 1)),
            ];
            let collars = vec![
                Collar { left: 0, right: 1, lo: q(-11, 20), hi: q(-1, 2) },
                Collar { left: 1, right: 2, lo: q(1, 2), hi: q(11, 20) },
            ];
            let normal_forms = vec![
                nf("α + e^{-t}λ near t = -1", 0, q(-1, 1), q(-19, 20), left.clone()),
                nf("e^t α + λ near t = -1/2", 0, q(-11, 20), q(-1, 2), a.scale(&et).add(&l)?),
                nf("e^{-t} α + λ̂ near t = 1/2", 2, q(1, 2), q(11, 20), a.scale(&emt).add(&lh)?),
                nf("α + e^t λ̂ near t = 1", 2, q(19, 20), q(1, 1), right.clone()),
            ];
            for prof in [g1, g2, f, g] {
                set.insert(prof);
            }
            Ok(PiecewiseForm { var: t.into(), regions, collars, normal_forms, profiles: set })
        }
        ConcaveVariant::FourPart => {
            let fa = profile("fa", ProfileKind::F, 0.25, 0.125)?;
            let ga = profile("ga", ProfileKind::G, 0.25, 0.125)?;
            let g1 = profile("g1", ProfileKind::G1, 0.5, 0.125)?;
            let fb = profile("fb", ProfileKind::F, 0.5, 0.0625)?;
            let gb = profile("gb", ProfileKind::G, 0.5, 0.0625)?;
            let g2 = profile("g2", ProfileKind::G2, 0.5, 0.125)?;
            let fc = profile("fc", ProfileKind::F, 0.75, 0.125)?;
            let gc = profile("gc", ProfileKind::G, 0.75, 0.125)?;
            let quarter = p.e(Expr::constant(q(1, 4)));
            let lam_hat = p.lambda.hatted();
            let s = p.shift(q(1, 2));
            let first = a.scale(&p.e(p.t.clone())).add(&l)?;
            let second = a.scale(&p.e(-s.clone())).add(&lh)?;
            let third = ah.scale(&p.e(s.clone())).add(&lh)?;
            let last = ah.scale(&p.e(Expr::one() - p.t.clone())).add(&l)?;
            // The swap at 1/2 is the swap construction with α := λ̂ and λ := α.
            let swap_mid = p.fold(Expr::one(), &lh, &p.alpha, &fb, &gb)?;
            let regions = vec![
                region("e^t α + λ", first.clone(), q(0, 1), q(1, 8)),
                region("convex fold 1/4", p.fold(quarter.clone(), &a, &p.lambda, &fa, &ga)?, q(1, 8), q(3, 8)),
                region("g1 collar", lh.add(&a.scale(&p.e(-s.clone())))?.scale(&g1.at(p.t.clone())), q(3, 8), q(7, 16)),
                region("swap fold 1/2", swap_mid, q(7, 16), q(9, 16)),
                region("g2 collar", lh.add(&ah.scale(&p.e(s.clone())))?.scale(&g2.at(p.t.clone())), q(9, 16), q(5, 8)),
                region("convex fold 3/4", p.fold(quarter, &ah, &lam_hat, &fc, &gc)?, q(5, 8), q(7, 8)),
                region("e^{1-t} α̂ + λ", last.clone(), q(7, 8), q(1, 1)),
            ];
            let delta = q(1, 256);
            let seams = [q(1, 8), q(3, 8), q(7, 16), q(9, 16), q(5, 8), q(7, 8)];
            let collars = seams
                .iter()
                .enumerate()
                .map(|(i, s)| Collar { left: i, right: i + 1, lo: s - &delta, hi: s + &delta })
                .collect();
            let normal_forms = vec![
                nf("e^t α + λ near t = 0", 0, q(0, 1), q(1, 8), first),
                nf("e^{1/2-t} α + λ̂ left of 3/8", 1, q(3, 8) - &delta, q(3, 8), second),
                nf("e^{t-1/2} α̂ + λ̂ right of 5/8", 5, q(5, 8), q(5, 8) + &delta, third),
                nf("e^{1-t} α̂ + λ near t = 1", 6, q(7, 8), q(1, 1), last),
            ];
            for prof in [fa, ga, g1, fb, gb, g2, fc, gc] {
                set.insert(prof);
            }
            Ok(PiecewiseForm { var: t.into(), regions, collars, normal_forms, profiles: set })
        }
    }
}

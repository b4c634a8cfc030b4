//! Builders for the explicit contact and confoliation forms.
//!
//! Every builder works on a flattened product chart and returns the form
//! together with the defect identity it is expected to satisfy. An
//! [`Identity`] is a sum of terms `c_i * structure_i`; a term whose constant
//! is `None` gets it fitted from the defect (one monomial decides it, the
//! remaining monomials then have to agree).

mod piecewise;
mod potential;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::expr::{Expr, Rational};
use crate::forms::{Chart, ChartRef, Domain, Form};
use crate::profiles::{ProfileFunction, Variable};

pub use piecewise::{concave_collar_forms, asymmetric_scale, Collar, ConcaveVariant, NormalForm, PiecewiseForm, Region};
pub use potential::CollarPotential;

/// Darboux model `±dz + Σ x_i dy_i`; the hat reverses the sign of `dz`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContactModel {
    pairs: Vec<(String, String)>,
    z: String,
    hat: bool,
}

impl ContactModel {
    pub fn darboux<S: AsRef<str>>(xs: &[S], ys: &[S], z: &str) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Invalid("Darboux model needs as many x as y coordinates".into()));
        }
        let pairs = xs.iter().zip(ys).map(|(x, y)| (x.as_ref().to_string(), y.as_ref().to_string())).collect();
        let m = ContactModel { pairs, z: z.to_string(), hat: false };
        Chart::new(&m.coords())?;
        Ok(m)
    }

    /// `dz{s} + x{s} dy{s}`.
    pub fn standard(suffix: &str) -> Self {
        ContactModel {
            pairs: vec![(format!("x{suffix}"), format!("y{suffix}"))],
            z: format!("z{suffix}"),
            hat: false,
        }
    }

    pub fn hatted(&self) -> Self {
        ContactModel { hat: !self.hat, ..self.clone() }
    }

    pub fn is_hatted(&self) -> bool {
        self.hat
    }

    /// `x_1, y_1, ..., x_k, y_k, z`.
    pub fn coords(&self) -> Vec<String> {
        let mut v: Vec<String> = self.pairs.iter().flat_map(|(x, y)| [x.clone(), y.clone()]).collect();
        v.push(self.z.clone());
        v
    }

    pub fn reeb_coord(&self) -> &str {
        &self.z
    }

    /// n with `dim = 2n - 1`.
    pub fn half_dim(&self) -> usize {
        self.pairs.len() + 1
    }

    pub fn chart(&self) -> ChartRef {
        Chart::new(&self.coords()).expect("validated on construction").shared()
    }

    /// `Σ x_i dy_i`.
    pub fn horizontal(&self, chart: &ChartRef) -> Result<Form> {
        let mut out = Form::zero(chart, 1);
        for (x, y) in &self.pairs {
            out = out.add(&Form::dx(chart, y)?.scale(&Expr::var(x)))?;
        }
        Ok(out)
    }

    pub fn form(&self, chart: &ChartRef) -> Result<Form> {
        let dz = Form::dx(chart, &self.z)?;
        self.horizontal(chart)?.add(&if self.hat { dz.neg() } else { dz })
    }
}

impl std::str::FromStr for ContactModel {
    type Err = Error;

    /// `x1,y1,z1` or `x1,y1,x2,y2,z` (pairs then the Reeb coordinate), with
    /// an optional leading `^` for the hatted model.
    fn from_str(s: &str) -> Result<Self> {
        let (hat, body) = match s.trim().strip_prefix('^') {
            Some(rest) => (true, rest),
            None => (false, s.trim()),
        };
        let names: Vec<&str> = body.split(',').map(str::trim).collect();
        if names.len() % 2 == 0 || names.iter().any(|n| n.is_empty()) {
            return Err(Error::Invalid(format!("contact model `{s}` needs an odd coordinate list")));
        }
        let (pairs, z) = names.split_at(names.len() - 1);
        let xs: Vec<&str> = pairs.iter().step_by(2).copied().collect();
        let ys: Vec<&str> = pairs.iter().skip(1).step_by(2).copied().collect();
        let m = ContactModel::darboux(&xs, &ys, z[0])?;
        Ok(if hat { m.hatted() } else { m })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityTerm {
    pub label: String,
    pub structure: Expr,
    pub constant: Option<Rational>,
}

/// Expected shape of a contact defect.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Identity {
    pub name: String,
    pub terms: Vec<IdentityTerm>,
    /// Forms that have to vanish identically ("for dimensional reasons").
    pub vanishing: Vec<(String, Form)>,
}

impl Identity {
    fn new(name: &str) -> Self {
        Identity { name: name.to_string(), ..Default::default() }
    }

    fn term(mut self, label: &str, constant: Option<Rational>, structure: Expr) -> Self {
        self.terms.push(IdentityTerm { label: label.to_string(), structure, constant });
        self
    }

    /// Resolves the open constants against `defect` and returns them with
    /// `defect - Σ c_i structure_i`.
    pub fn resolve(&self, defect: &Expr) -> Result<(Vec<Rational>, Expr)> {
        let mut rest = defect.clone();
        let mut constants = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if let Some(c) = &t.constant {
                rest = rest - t.structure.scale(c);
            }
        }
        for (i, t) in self.terms.iter().enumerate() {
            let c = match &t.constant {
                Some(c) => c.clone(),
                None => {
                    let others: Vec<&Expr> =
                        self.terms.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, t)| &t.structure).collect();
                    let probe = t
                        .structure
                        .terms()
                        .find(|(m, _)| others.iter().all(|o| o.terms().all(|(om, _)| om != *m)))
                        .ok_or_else(|| Error::Invalid(format!("term `{}` has no distinguishing monomial", t.label)))?;
                    let found = rest.terms().find(|(m, _)| *m == probe.0).map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero);
                    let c = found / probe.1;
                    rest = rest - t.structure.scale(&c);
                    c
                }
            };
            constants.push(c);
        }
        Ok((constants, rest))
    }

    /// `Σ c_i structure_i` with the given constants.
    pub fn expected(&self, constants: &[Rational]) -> Expr {
        self.terms.iter().zip(constants).fold(Expr::zero(), |acc, (t, c)| acc + t.structure.scale(c))
    }
}

/// A built form and the identity its defect is expected to satisfy.
#[derive(Clone, Debug)]
pub struct Built {
    pub form: Form,
    pub identity: Option<Identity>,
    pub notes: Vec<String>,
}

impl Built {
    pub fn chart(&self) -> &ChartRef {
        self.form.chart()
    }
}

/// Concatenates coordinate lists into one chart and applies domains.
pub fn product_chart(parts: &[Vec<String>], domains: &[(&str, Domain)]) -> Result<ChartRef> {
    let names: Vec<String> = parts.iter().flatten().cloned().collect();
    let mut c = Chart::new(&names)?;
    for (n, d) in domains {
        c = c.with_domain(n, *d)?;
    }
    Ok(c.shared())
}

pub(crate) fn binomial(n: usize, k: usize) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Rational::from_integer(acc)
}

fn top(f: &Form) -> Result<Expr> {
    f.top_coefficient()
}

fn wedge_all(forms: &[&Form]) -> Result<Form> {
    let mut it = forms.iter();
    let first = (*it.next().expect("non-empty")).clone();
    it.try_fold(first, |acc, f| acc.wedge(f))
}

fn power(f: &Form, n: usize) -> Result<Form> {
    f.wedge_power(n)
}

fn profile_domain(p: &ProfileFunction) -> Domain {
    Domain::interval(p.domain().0, p.domain().1)
}

/// `α = f(t) λ + g(t) dφ` on `(t, λ-coordinates, φ)`.
///
/// Defect: `n · vol · f^{n-1} (f'g - f g')` where `dim λ = 2n-1` and `vol`
/// is the top coefficient of `dt ∧ λ ∧ dλ^{n-1} ∧ dφ`.
pub fn fold_circle_form(lambda: &ContactModel, f: &ProfileFunction, g: &ProfileFunction, t: &str, phi: &str) -> Result<Built> {
    let chart = product_chart(
        &[vec![t.to_string()], lambda.coords(), vec![phi.to_string()]],
        &[(t, profile_domain(f)), (phi, Domain::periodic(0.0, 2.0 * std::f64::consts::PI))],
    )?;
    let tv = Expr::var(t);
    let (fe, ge) = (f.at(tv.clone()), g.at(tv.clone()));
    let lam = lambda.form(&chart)?;
    let dphi = Form::dx(&chart, phi)?;
    let form = lam.scale(&fe).add(&dphi.scale(&ge))?;
    let n = lambda.half_dim();
    let vol = top(&wedge_all(&[&Form::dx(&chart, t)?, &lam, &power(&lam.d(), n - 1)?, &dphi])?)?;
    let c = vol.as_constant().ok_or_else(|| Error::Invalid("model volume is not constant".into()))?;
    let (f1, g1) = (fe.diff(t), ge.diff(t));
    let structure = fe.pow(n as u32 - 1) * (f1 * ge.clone() - fe.clone() * g1);
    let identity = Identity::new("fold circle").term("f^{n-1}(f'g - f g')", Some(c * Rational::from_integer(n.into())), structure);
    Ok(Built { form, identity: Some(identity), notes: vec![] })
}

/// `η = β + u(φ) dψ + l dφ` on `(page coordinates, φ)`, `ψ` an abstract
/// function of the page coordinates.
///
/// Defect: `dφ ∧ (l dβ^n - n u'(φ) β ∧ dβ^{n-1} ∧ dψ)`; the remaining
/// term `u dψ ∧ dβ^n` is a form on the page and vanishes.
pub fn open_book_form(beta: &Form, psi: &str, u: &ProfileFunction, l: &Rational, phi: &str) -> Result<Built> {
    let page = beta.chart();
    if page.dim() % 2 != 0 || beta.degree() != 1 {
        return Err(Error::Invalid("the page potential must be a 1-form on an even-dimensional chart".into()));
    }
    let (lo, hi) = u.domain();
    let chart = product_chart(&[page.coords().to_vec(), vec![phi.to_string()]], &[])?;
    let mut c = (*chart).clone().with_domain(phi, Domain::periodic(lo, hi))?;
    for (i, name) in page.coords().iter().enumerate() {
        c = c.with_domain(name, page.domain(i))?;
    }
    let chart = c.shared();
    let psi_e = Expr::func(psi, vec![0; page.dim()], page.coords().iter().map(|n| Expr::var(n)).collect());
    let ue = u.at(Expr::var(phi));
    let b = beta.embed(&chart)?;
    let db = b.d();
    let dpsi = Form::scalar(&chart, psi_e).d();
    let dphi = Form::dx(&chart, phi)?;
    let form = b.add(&dpsi.scale(&ue))?.add(&dphi.scale(&Expr::constant(l.clone())))?;
    let n = page.dim() / 2;
    let main = top(&dphi.wedge(&power(&db, n)?)?)?;
    let corr = ue.diff(phi) * top(&wedge_all(&[&dphi, &b, &power(&db, n - 1)?, &dpsi])?)?;
    let identity = Identity::new("open book")
        .term("l dφ dβ^n", Some(l.clone()), main)
        .term("u' dφ β dβ^{n-1} dψ", Some(-Rational::from_integer(n.into())), corr);
    let mut identity = identity;
    identity.vanishing.push(("dβ^n ∧ dψ".into(), power(&db, n)?.wedge(&dpsi)?));
    let mut notes = vec![];
    if l.is_zero() {
        notes.push("l = 0: confoliation only".into());
    }
    Ok(Built { form, identity: Some(identity), notes })
}

/// Coordinates on the disk factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Disk {
    /// `(r, φ)`; profiles take `r`.
    Polar { r: String, phi: String },
    /// `(x, y)` with `s = x^2 + y^2`; `h1` takes `s` and `h2` is given as
    /// `h2(r)/r^2` in `s`, so `h2 dφ = h2q(s) (x dy - y dx)`.
    Cartesian { x: String, y: String },
}

impl Disk {
    pub fn polar() -> Self {
        Disk::Polar { r: "r".into(), phi: "phi".into() }
    }

    pub fn cartesian() -> Self {
        Disk::Cartesian { x: "x".into(), y: "y".into() }
    }

    pub fn coords(&self) -> Vec<String> {
        match self {
            Disk::Polar { r, phi } => vec![r.clone(), phi.clone()],
            Disk::Cartesian { x, y } => vec![x.clone(), y.clone()],
        }
    }

    fn domains(&self, radius: f64) -> Vec<(String, Domain)> {
        match self {
            Disk::Polar { r, phi } => vec![
                (r.clone(), Domain::interval(0.0, radius)),
                (phi.clone(), Domain::periodic(0.0, 2.0 * std::f64::consts::PI)),
            ],
            Disk::Cartesian { x, y } => vec![
                (x.clone(), Domain::interval(-radius, radius)),
                (y.clone(), Domain::interval(-radius, radius)),
            ],
        }
    }

    fn check_profiles(&self, h1: &ProfileFunction, h2: &ProfileFunction) -> Result<()> {
        let (v1, v2) = (h1.params().variable, h2.params().variable);
        let ok = match self {
            Disk::Polar { .. } => v1 == Variable::Radius && v2 == Variable::Radius,
            Disk::Cartesian { .. } => v1 == Variable::Square && v2 == Variable::SquareQuotient,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid(format!(
                "disk profiles use variables ({v1:?}, {v2:?}); polar needs (r, r), Cartesian needs (s, s_quot)"
            )))
        }
    }

    /// `(h1, h2 dφ, d/dr-type pair term h1 h2' - h1' h2, h1' h2)` rewritten
    /// for this chart; the last two are already multiplied by the factor
    /// that turns `dr ∧ dφ` into the chart's area element.
    fn pieces(&self, chart: &ChartRef, h1: &ProfileFunction, h2: &ProfileFunction) -> Result<DiskPieces> {
        match self {
            Disk::Polar { r, phi } => {
                let rv = Expr::var(r);
                let (a, b) = (h1.at(rv.clone()), h2.at(rv.clone()));
                let (a1, b1) = (a.diff(r), b.diff(r));
                Ok(DiskPieces {
                    h1: a.clone(),
                    angular: Form::dx(chart, phi)?.scale(&b),
                    wronskian: a.clone() * b1 - a1.clone() * b.clone(),
                    cross: a1 * b,
                })
            }
            Disk::Cartesian { x, y } => {
                let (xv, yv) = (Expr::var(x), Expr::var(y));
                let s = xv.pow(2) + yv.pow(2);
                let sv = Expr::var("_s");
                let bind = |e: Expr| {
                    let mut m = std::collections::BTreeMap::new();
                    m.insert("_s".to_string(), s.clone());
                    e.substitute(&m)
                };
                let (a, b) = (h1.at(sv.clone()), h2.at(sv.clone()));
                let (a1, b1) = (a.diff("_s"), b.diff("_s"));
                let two = Expr::int(2);
                let wronskian = two.clone() * (a.clone() * (b.clone() + sv.clone() * b1) - sv.clone() * a1.clone() * b.clone());
                let cross = two * sv * a1 * b.clone();
                let rot = Form::dx(chart, y)?.scale(&xv).sub(&Form::dx(chart, x)?.scale(&yv))?;
                Ok(DiskPieces { h1: bind(a), angular: rot.scale(&bind(b)), wronskian: bind(wronskian), cross: bind(cross) })
            }
        }
    }
}

struct DiskPieces {
    h1: Expr,
    angular: Form,
    wronskian: Expr,
    cross: Expr,
}

/// `α = h1 ν + l h2 dφ` on `(ν-coordinates, disk)`.
///
/// Defect: `c · l · h1^{m-1} (h1 h2' - h1' h2)` with `dim ν = 2m-1`; the
/// constant is fitted.
pub fn binding_extension(nu: &ContactModel, h1: &ProfileFunction, h2: &ProfileFunction, l: &Rational, disk: &Disk) -> Result<Built> {
    disk.check_profiles(h1, h2)?;
    let doms = disk.domains(h1.params().big_r);
    let doms: Vec<(&str, Domain)> = doms.iter().map(|(n, d)| (n.as_str(), *d)).collect();
    let chart = product_chart(&[nu.coords(), disk.coords()], &doms)?;
    let p = disk.pieces(&chart, h1, h2)?;
    let le = Expr::constant(l.clone());
    let form = nu.form(&chart)?.scale(&p.h1).add(&p.angular.scale(&le))?;
    let m = nu.half_dim() as u32;
    let structure = le * p.h1.pow(m - 1) * p.wronskian;
    let identity = Identity::new("binding extension").term("l h1^{m-1}(h1 h2' - h1' h2)", None, structure);
    Ok(Built { form, identity: Some(identity), notes: vec![] })
}

/// `η̃ = h1 ν + f(t) λ + h2 g(t) dφ` on `(λ, ν, disk, t)`; this block order makes `c₁` positive.
///
/// Defect: `c₁ f^{n-1} h1^{m-1} (f'g (h1 h2' - h1' h2) + f g' h1' h2)`; the
/// constant is fitted and the factor `f^{n-1} h1^{m-1}` is positive.
pub fn product_fold_form(
    nu: &ContactModel,
    lambda: &ContactModel,
    fg: (&ProfileFunction, &ProfileFunction),
    h: (&ProfileFunction, &ProfileFunction),
    disk: &Disk,
    t: &str,
) -> Result<Built> {
    let (f, g) = fg;
    let (h1, h2) = h;
    disk.check_profiles(h1, h2)?;
    let mut doms = disk.domains(h1.params().big_r);
    doms.push((t.to_string(), profile_domain(f)));
    let doms: Vec<(&str, Domain)> = doms.iter().map(|(n, d)| (n.as_str(), *d)).collect();
    let chart = product_chart(&[lambda.coords(), nu.coords(), disk.coords(), vec![t.to_string()]], &doms)?;
    let p = disk.pieces(&chart, h1, h2)?;
    let tv = Expr::var(t);
    let (fe, ge) = (f.at(tv.clone()), g.at(tv));
    let form = nu
        .form(&chart)?
        .scale(&p.h1)
        .add(&lambda.form(&chart)?.scale(&fe))?
        .add(&p.angular.scale(&ge))?;
    let (m, n) = (nu.half_dim() as u32, lambda.half_dim() as u32);
    let (f1, g1) = (fe.diff(t), ge.diff(t));
    let structure = fe.pow(n - 1) * p.h1.pow(m - 1) * (f1 * ge * p.wronskian + fe * g1 * p.cross);
    let identity = Identity::new("product fold").term("f^{n-1} h1^{m-1}(f'g(h1h2'-h1'h2) + f g' h1' h2)", None, structure);
    Ok(Built { form, identity: Some(identity), notes: vec![] })
}

/// `η = R μ + β + u(t) dψ̃` on `(base, fiber)`, with `t` a base coordinate
/// and `ψ̃` an abstract function of every coordinate.
///
/// With `dim base = 2m-1`, `dim fiber = 2n` and `N = m+n-1` the defect is
///
/// ```text
/// C(N,m-1) R^m μ dμ^{m-1} dβ^n  +  C(N,m-1) R^{m-1} u dψ̃ dμ^{m-1} dβ^n
///   + N C(N-1,m-2) R^{m-1} u' μ dμ^{m-2} dβ^n dt dψ̃
///   + N C(N-1,m-1) R^{m-1} u' β dμ^{m-1} dβ^{n-1} dt dψ̃
/// ```
pub fn exact_bundle_form(mu: &ContactModel, beta: &Form, psi: &str, u: &ProfileFunction, scale: &Expr, t: &str) -> Result<Built> {
    let base = mu.coords();
    if !base.iter().any(|c| c == t) {
        return Err(Error::UnknownCoordinate(t.to_string()));
    }
    let fiber = beta.chart();
    if fiber.dim() % 2 != 0 || beta.degree() != 1 {
        return Err(Error::Invalid("the fiber potential must be a 1-form on an even-dimensional chart".into()));
    }
    let (lo, hi) = u.domain();
    let mut c = Chart::new(&[base.clone(), fiber.coords().to_vec()].concat())?.with_domain(t, Domain::interval(lo, hi))?;
    for (i, name) in fiber.coords().iter().enumerate() {
        c = c.with_domain(name, fiber.domain(i))?;
    }
    let chart = c.shared();
    let psi_e = Expr::func(psi, vec![0; chart.dim()], chart.coords().iter().map(|n| Expr::var(n)).collect());
    let ue = u.at(Expr::var(t));
    let mu_f = mu.form(&chart)?;
    let b = beta.embed(&chart)?;
    let dpsi = Form::scalar(&chart, psi_e).d();
    let form = mu_f.scale(scale).add(&b)?.add(&dpsi.scale(&ue))?;

    let (m, n) = (mu.half_dim(), fiber.dim() / 2);
    let big_n = m + n - 1;
    let (dmu, db, dt) = (mu_f.d(), b.d(), Form::dx(&chart, t)?);
    let u1 = ue.diff(t);
    let rp = |k: usize| scale.pow(k as u32);
    let nn = Rational::from_integer(big_n.into());
    let mut id = Identity::new("exact bundle")
        .term(
            "R^m μ dμ^{m-1} dβ^n",
            Some(binomial(big_n, m - 1)),
            rp(m) * top(&wedge_all(&[&mu_f, &power(&dmu, m - 1)?, &power(&db, n)?])?)?,
        )
        .term(
            "R^{m-1} u dψ dμ^{m-1} dβ^n",
            Some(binomial(big_n, m - 1)),
            rp(m - 1) * ue.clone() * top(&wedge_all(&[&dpsi, &power(&dmu, m - 1)?, &power(&db, n)?])?)?,
        );
    if m >= 2 {
        id = id.term(
            "R^{m-1} u' μ dμ^{m-2} dβ^n dt dψ",
            Some(&nn * binomial(big_n - 1, m - 2)),
            rp(m - 1) * u1.clone() * top(&wedge_all(&[&mu_f, &power(&dmu, m - 2)?, &power(&db, n)?, &dt, &dpsi])?)?,
        );
    }
    id = id.term(
        "R^{m-1} u' β dμ^{m-1} dβ^{n-1} dt dψ",
        Some(&nn * binomial(big_n - 1, m - 1)),
        rp(m - 1) * u1 * top(&wedge_all(&[&b, &power(&dmu, m - 1)?, &power(&db, n - 1)?, &dt, &dpsi])?)?,
    );
    Ok(Built { form, identity: Some(id), notes: vec![] })
}

/// `θ = K β + Σ w_s η_s` on the union of the base and fiber charts. The
/// weights must add up to 1 identically.
pub fn bundle_sum_form(beta: &Form, parts: &[(Expr, Form)], k: &Expr) -> Result<Built> {
    if parts.is_empty() {
        return Err(Error::Invalid("bundle sum needs at least one chart".into()));
    }
    let total = parts.iter().fold(Expr::zero(), |acc, (w, _)| acc + w.clone());
    if !total.is_one() {
        return Err(Error::NotPartition(total.to_string()));
    }
    let mut names: Vec<String> = beta.chart().coords().to_vec();
    let mut domains: Vec<(String, Domain)> =
        beta.chart().coords().iter().cloned().zip(beta.chart().domains().iter().copied()).collect();
    for (_, f) in parts {
        for (i, n) in f.chart().coords().iter().enumerate() {
            if !names.contains(n) {
                names.push(n.clone());
                domains.push((n.clone(), f.chart().domain(i)));
            }
        }
    }
    let mut c = Chart::new(&names)?;
    for (n, d) in &domains {
        c = c.with_domain(n, *d)?;
    }
    let chart = c.shared();
    let mut form = beta.embed(&chart)?.scale(k);
    for (w, f) in parts {
        form = form.add(&f.embed(&chart)?.scale(w))?;
    }
    Ok(Built { form, identity: None, notes: vec![] })
}

/// `d(e^t η) - e^t dt ∧ η - e^t dη`, identically zero.
pub fn scaling_derivative_defect(eta: &Form, t: &str) -> Result<Form> {
    let et = Expr::exp(Expr::var(t));
    let chart = eta.chart();
    let lhs = eta.scale(&et).d();
    let rhs = Form::dx(chart, t)?.wedge(eta)?.scale(&et).add(&eta.d().scale(&et))?;
    lhs.sub(&rhs)
}

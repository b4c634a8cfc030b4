//! Line-oriented scenario files.
//!
//! ```text
//! # comment
//! [chart]
//! coords = t, x, y, z, phi
//! domain t = -1:1
//! periodic phi = 0:6.283185307179586
//!
//! [profiles]
//! f = f half_width=1
//! g = g
//! psi = function args=a,b body="a b"
//!
//! [forms]
//! eta = d[z] + x d[y]
//! fold = @fold_circle lambda=x,y,z f=f g=g t=t phi=phi
//! tau = @tau eta
//!
//! [checks]
//! defect eta = 1
//! contact fold grid=t=-1:1:101 tol=1e-9
//! ```
//!
//! Indented lines continue the previous line. Declarations are evaluated in
//! order when the file is parsed, so unknown names and malformed forms are
//! input errors; checks run later and only fail.

mod checks;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::constructions::{
    asymmetric_scale, binding_extension, concave_collar_forms, exact_bundle_form, fold_circle_form, open_book_form,
    product_fold_form, Built, CollarPotential, ContactModel, Disk, PiecewiseForm,
};
use crate::error::Error;
use crate::expr::{rational_from_decimal, Expr, ExprRealization, Rational, Realization, Realizations};
use crate::forms::{Chart, ChartRef, Domain, Form};
use crate::profiles::{ProfileFunction, ProfileKind, ProfileParams, ProfileSet};
use crate::report::VerificationReport;
use crate::verify;

pub use checks::Check;

/// Version of the report bundle schema.
pub const REPORT_VERSION: u32 = 1;

/// Malformed scenario input, with the 1-based line it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioError {
    pub line: usize,
    pub msg: String,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.msg)
    }
}

impl std::error::Error for ScenarioError {}

type SResult<T> = std::result::Result<T, String>;

fn err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

/// A declared form: plain, produced by a builder (with its identity), or
/// piecewise.
#[derive(Clone, Debug)]
pub enum Value {
    Form(Form),
    Built(Built),
    Piecewise(PiecewiseForm),
}

impl Value {
    pub fn form(&self) -> Option<&Form> {
        match self {
            Value::Form(f) => Some(f),
            Value::Built(b) => Some(&b.form),
            Value::Piecewise(_) => None,
        }
    }
}

#[derive(Debug)]
pub struct Scenario {
    pub chart: Option<ChartRef>,
    pub profiles: ProfileSet,
    pub functions: Realizations,
    forms: Vec<(String, Value)>,
    pub checks: Vec<(usize, Check)>,
}

/// Everything a scenario run produced.
#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub version: u32,
    pub passed: bool,
    pub reports: Vec<VerificationReport>,
}

impl Outcome {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("outcome serializes")
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Chart,
    Profiles,
    Forms,
    Checks,
}

/// Splits on whitespace; double quotes group words and are dropped.
pub(crate) fn tokens(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let (mut quoted, mut any) = (false, false);
    for ch in s.chars() {
        match ch {
            '"' => {
                quoted = !quoted;
                any = true;
            }
            c if c.is_whitespace() && !quoted => {
                if any {
                    out.push(std::mem::take(&mut cur));
                    any = false;
                }
            }
            c => {
                cur.push(c);
                any = true;
            }
        }
    }
    if any {
        out.push(cur);
    }
    out
}

/// Positional words and `key=value` options of a token list.
pub(crate) struct Args {
    pub pos: Vec<String>,
    pub opts: BTreeMap<String, String>,
}

impl Args {
    pub fn parse(toks: &[String]) -> Self {
        let mut pos = Vec::new();
        let mut opts = BTreeMap::new();
        for t in toks {
            match t.split_once('=') {
                Some((k, v)) if !k.is_empty() && k.chars().all(|c| c.is_alphanumeric() || c == '_') => {
                    opts.insert(k.to_string(), v.to_string());
                }
                _ => pos.push(t.clone()),
            }
        }
        Args { pos, opts }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.opts.get(key).map(String::as_str)
    }

    pub fn req(&self, key: &str) -> SResult<&str> {
        self.get(key).ok_or_else(|| format!("missing `{key}=`"))
    }

    pub fn num(&self, key: &str) -> SResult<Option<f64>> {
        self.get(key).map(|v| v.parse::<f64>().map_err(|_| format!("`{key}` must be a number, got `{v}`"))).transpose()
    }

    pub fn int(&self, key: &str) -> SResult<Option<usize>> {
        self.get(key).map(|v| v.parse::<usize>().map_err(|_| format!("`{key}` must be a count, got `{v}`"))).transpose()
    }

    /// Rejects options outside `allowed`.
    pub fn only(&self, allowed: &[&str]) -> SResult<()> {
        match self.opts.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(format!("unknown option `{k}`")),
            None => Ok(()),
        }
    }
}

pub(crate) fn parse_rational(s: &str) -> SResult<Rational> {
    if let Some((n, d)) = s.split_once('/') {
        let n: Rational = n.trim().parse().map_err(|_| format!("bad rational `{s}`"))?;
        let d: Rational = d.trim().parse().map_err(|_| format!("bad rational `{s}`"))?;
        if d == Rational::from_integer(0.into()) {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(n / d);
    }
    rational_from_decimal(s.trim()).ok_or_else(|| format!("bad number `{s}`"))
}

fn interval(s: &str) -> SResult<(f64, f64)> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got `{s}`"))?;
    let lo = a.trim().parse::<f64>().map_err(|_| format!("bad number `{a}`"))?;
    let hi = b.trim().parse::<f64>().map_err(|_| format!("bad number `{b}`"))?;
    if !(lo < hi) {
        return Err(format!("empty interval `{s}`"));
    }
    Ok((lo, hi))
}

/// Joins continuation lines; returns (line number, text) pairs.
fn logical_lines(text: &str) -> Vec<(usize, String)> {
    let mut out: Vec<(usize, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let indented = line.starts_with(' ') || line.starts_with('\t');
        match out.last_mut() {
            Some((_, prev)) if indented && !prev.starts_with('[') => {
                prev.push(' ');
                prev.push_str(line.trim());
            }
            _ => out.push((i + 1, line.trim().to_string())),
        }
    }
    out
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario, ScenarioError> {
        let mut sc = Scenario {
            chart: None,
            profiles: ProfileSet::new(),
            functions: Realizations::new(),
            forms: Vec::new(),
            checks: Vec::new(),
        };
        let mut section = Section::None;
        let mut coords: Option<Chart> = None;
        for (line, text) in logical_lines(text) {
            let fail = |msg: String| ScenarioError { line, msg };
            if let Some(name) = text.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
                section = match name.trim() {
                    "chart" => Section::Chart,
                    "profiles" => Section::Profiles,
                    "forms" => Section::Forms,
                    "checks" => Section::Checks,
                    other => return Err(fail(format!("unknown section [{other}]"))),
                };
                continue;
            }
            if section != Section::Chart {
                if let Some(c) = coords.take() {
                    sc.chart = Some(c.shared());
                }
            }
            let res = match section {
                Section::None => Err("declaration outside a section".to_string()),
                Section::Chart => chart_line(&mut coords, &text),
                Section::Profiles => sc.profile_line(&text),
                Section::Forms => sc.form_line(&text),
                Section::Checks => sc.check_line(&text).map(|c| sc.checks.push((line, c))),
            };
            res.map_err(fail)?;
        }
        if let Some(c) = coords {
            sc.chart = Some(c.shared());
        }
        Ok(sc)
    }

    pub fn value(&self, name: &str) -> Option<&Value> {
        self.forms.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn form(&self, name: &str) -> SResult<&Form> {
        match self.value(name) {
            Some(v) => v.form().ok_or_else(|| format!("`{name}` is piecewise")),
            None => Err(format!("unknown form `{name}`")),
        }
    }

    pub fn profile(&self, name: &str) -> SResult<&ProfileFunction> {
        self.profiles.get(name).ok_or_else(|| format!("unknown profile `{name}`"))
    }

    /// Realizations of every declared profile and function.
    pub fn realizations(&self) -> Realizations {
        let mut r = self.profiles.realizations();
        r.extend(&self.functions);
        r
    }

    fn chart(&self) -> SResult<&ChartRef> {
        self.chart.as_ref().ok_or_else(|| "no [chart] declared".to_string())
    }

    fn profile_line(&mut self, text: &str) -> SResult<()> {
        let (name, rest) = text.split_once('=').ok_or("expected `name = kind options`")?;
        let name = name.trim();
        let toks = tokens(rest);
        let a = Args::parse(&toks);
        let kind = a.pos.first().ok_or("missing profile kind")?;
        match kind.as_str() {
            "function" | "collar_potential" => {
                let body: Expr = a.req("body")?.parse().map_err(err)?;
                let args: Vec<&str> = a.req("args")?.split(',').map(str::trim).collect();
                let r: Arc<dyn Realization> = if kind == "function" {
                    a.only(&["body", "args", "order"])?;
                    let order = a.int("order")?.unwrap_or(3) as u32;
                    Arc::new(ExprRealization::new(&body, &args, order).map_err(err)?)
                } else {
                    a.only(&["body", "args", "cutoff", "lo", "width"])?;
                    let lo = a.num("lo")?.unwrap_or(0.0);
                    let width = a.num("width")?.unwrap_or(1.0);
                    Arc::new(CollarPotential::new(&body, &args, a.req("cutoff")?, lo, width).map_err(err)?)
                };
                self.functions.insert(name, r);
                Ok(())
            }
            k => {
                let kind: ProfileKind = k.parse().map_err(err)?;
                a.only(&["eps", "R", "width", "half_width", "center", "variable", "model", "interval", "body", "var"])?;
                let mut p = ProfileParams::default();
                if let Some(v) = a.num("eps")? {
                    p.eps = v;
                }
                if let Some(v) = a.num("R")? {
                    p.big_r = v;
                }
                if let Some(v) = a.num("width")? {
                    p.width = v;
                }
                if let Some(v) = a.num("half_width")? {
                    p.half_width = v;
                }
                if let Some(v) = a.num("center")? {
                    p.center = v;
                }
                if let Some(v) = a.get("variable") {
                    p.variable = v.parse().map_err(err)?;
                }
                if let Some(v) = a.get("model") {
                    p.h1_model = v.parse().map_err(err)?;
                }
                if let Some(v) = a.get("interval") {
                    p.interval = Some(interval(v)?);
                }
                let mut prof = ProfileFunction::new(name, kind, p).map_err(err)?;
                if let Some(body) = a.get("body") {
                    let e: Expr = body.parse().map_err(err)?;
                    prof = prof.with_realization(&e, a.get("var").unwrap_or("x")).map_err(err)?;
                }
                self.profiles.insert(prof);
                Ok(())
            }
        }
    }

    fn form_line(&mut self, text: &str) -> SResult<()> {
        let (name, rest) = text.split_once('=').ok_or("expected `name = form`")?;
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(format!("bad form name `{name}`"));
        }
        let rest = rest.trim();
        let value = match rest.strip_prefix('@') {
            Some(cmd) => self.command(cmd)?,
            None => Value::Form(Form::parse(rest, self.chart()?).map_err(err)?),
        };
        self.forms.push((name.to_string(), value));
        Ok(())
    }

    fn model(s: &str) -> SResult<ContactModel> {
        s.parse().map_err(err)
    }

    fn command(&self, cmd: &str) -> SResult<Value> {
        if let Some(rest) = cmd.strip_prefix("on ") {
            let (chart, body) = rest.split_once(':').ok_or("expected `@on coords : form`")?;
            let c = Chart::parse_list(chart.trim()).map_err(err)?.shared();
            return Ok(Value::Form(Form::parse(body.trim(), &c).map_err(err)?));
        }
        let toks = tokens(cmd);
        let (op, rest) = toks.split_first().ok_or("empty command")?;
        let a = Args::parse(rest);
        let form = |i: usize| -> SResult<&Form> { self.form(a.pos.get(i).ok_or("missing form argument")?) };
        let prof = |k: &str| -> SResult<&ProfileFunction> { self.profile(a.req(k)?) };
        let built = |b: crate::Result<Built>| b.map(Value::Built).map_err(err);
        match op.as_str() {
            "d" => Ok(Value::Form(form(0)?.d())),
            "star" => Ok(Value::Form(form(0)?.hodge_star())),
            "tau" => {
                let f = form(0)?;
                let t = match a.pos.get(1) {
                    Some(d) => verify::tau_with(f, self.form(d)?),
                    None => verify::tau(f),
                };
                Ok(Value::Form(t.map_err(err)?))
            }
            "wedge" => {
                let mut acc = form(0)?.clone();
                for n in &a.pos[1..] {
                    acc = acc.wedge(self.form(n)?).map_err(err)?;
                }
                Ok(Value::Form(acc))
            }
            "power" => {
                let k: usize = a.pos.get(1).and_then(|k| k.parse().ok()).ok_or("expected `@power form k`")?;
                Ok(Value::Form(form(0)?.wedge_power(k).map_err(err)?))
            }
            "subst" => {
                let mut b = BTreeMap::new();
                for (k, v) in &a.opts {
                    b.insert(k.clone(), v.parse::<Expr>().map_err(err)?);
                }
                Ok(Value::Form(form(0)?.map_coefficients(|c| c.substitute(&b))))
            }
            "reorder" => {
                let c = Chart::parse_list(a.req("chart")?).map_err(err)?.shared();
                Ok(Value::Form(form(0)?.reorder(&c).map_err(err)?))
            }
            "fold_circle" => {
                a.only(&["lambda", "f", "g", "t", "phi"])?;
                built(fold_circle_form(
                    &Self::model(a.req("lambda")?)?,
                    prof("f")?,
                    prof("g")?,
                    a.get("t").unwrap_or("t"),
                    a.get("phi").unwrap_or("phi"),
                ))
            }
            "open_book" => {
                a.only(&["beta", "psi", "u", "l", "phi"])?;
                let beta = self.form(a.req("beta")?)?;
                let l = parse_rational(a.get("l").unwrap_or("1"))?;
                built(open_book_form(beta, a.get("psi").unwrap_or("psi"), prof("u")?, &l, a.get("phi").unwrap_or("phi")))
            }
            "binding" => {
                a.only(&["nu", "h1", "h2", "l", "disk"])?;
                let l = parse_rational(a.get("l").unwrap_or("1"))?;
                built(binding_extension(&Self::model(a.req("nu")?)?, prof("h1")?, prof("h2")?, &l, &disk(a.get("disk"))?))
            }
            "product_fold" => {
                a.only(&["nu", "lambda", "f", "g", "h1", "h2", "disk", "t"])?;
                built(product_fold_form(
                    &Self::model(a.req("nu")?)?,
                    &Self::model(a.req("lambda")?)?,
                    (prof("f")?, prof("g")?),
                    (prof("h1")?, prof("h2")?),
                    &disk(a.get("disk"))?,
                    a.get("t").unwrap_or("t"),
                ))
            }
            "exact_bundle" => {
                a.only(&["mu", "beta", "psi", "u", "R", "t"])?;
                let r: Expr = a.get("R").unwrap_or("R").parse().map_err(err)?;
                built(exact_bundle_form(
                    &Self::model(a.req("mu")?)?,
                    self.form(a.req("beta")?)?,
                    a.get("psi").unwrap_or("psi"),
                    prof("u")?,
                    &r,
                    a.req("t")?,
                ))
            }
            "asymmetric" => {
                a.only(&["eta", "profiles", "k", "t"])?;
                let mut set = ProfileSet::new();
                for n in a.req("profiles")?.split(',') {
                    set.insert(self.profile(n.trim())?.clone());
                }
                let pw = asymmetric_scale(self.form(a.req("eta")?)?, &set, prof("k")?, a.get("t").unwrap_or("t")).map_err(err)?;
                Ok(Value::Piecewise(pw))
            }
            "concave" => {
                a.only(&["alpha", "lambda", "variant"])?;
                let v = a.get("variant").unwrap_or("swap").parse().map_err(err)?;
                let pw = concave_collar_forms(&Self::model(a.req("alpha")?)?, &Self::model(a.req("lambda")?)?, v).map_err(err)?;
                Ok(Value::Piecewise(pw))
            }
            other => Err(format!("unknown command `@{other}`")),
        }
    }

    /// Runs every check in declaration order.
    pub fn run(&self, exec: crate::Exec, default_tol: f64) -> Outcome {
        let real = self.realizations();
        let reports: Vec<VerificationReport> = self
            .checks
            .iter()
            .map(|(line, c)| {
                let mut r = c.run(self, &real, exec, default_tol).unwrap_or_else(|e| {
                    let mut r = VerificationReport::new(c.kind());
                    r.fail(format!("evaluation error: {e}"));
                    r
                });
                r.params.insert("line".into(), (*line).into());
                r
            })
            .collect();
        Outcome { version: REPORT_VERSION, passed: reports.iter().all(|r| r.passed), reports }
    }
}

fn disk(s: Option<&str>) -> SResult<Disk> {
    match s.unwrap_or("polar") {
        "polar" => Ok(Disk::polar()),
        "cartesian" => Ok(Disk::cartesian()),
        o => Err(format!("unknown disk model `{o}`")),
    }
}

fn chart_line(chart: &mut Option<Chart>, text: &str) -> SResult<()> {
    let (key, value) = text.split_once('=').ok_or("expected `coords = ...` or `domain name = lo:hi`")?;
    let key: Vec<&str> = key.split_whitespace().collect();
    match key.as_slice() {
        ["coords"] => {
            *chart = Some(Chart::parse_list(value.trim()).map_err(err)?);
            Ok(())
        }
        [kind @ ("domain" | "periodic"), name] => {
            let c = chart.take().ok_or("declare coords before domains")?;
            let (lo, hi) = interval(value.trim())?;
            let d = if *kind == "domain" { Domain::interval(lo, hi) } else { Domain::periodic(lo, hi) };
            *chart = Some(c.with_domain(name, d).map_err(err)?);
            Ok(())
        }
        _ => Err(format!("unknown chart entry `{}`", text.trim())),
    }
}

impl From<Error> for ScenarioError {
    fn from(e: Error) -> Self {
        ScenarioError { line: 0, msg: e.to_string() }
    }
}

#[cfg(test)]
mod tests;

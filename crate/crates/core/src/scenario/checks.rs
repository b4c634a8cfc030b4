use std::time::Instant;

use super::{err, parse_rational, tokens, Args, SResult, Scenario, Value};
use crate::expr::{Expr, Rational, Realizations};
use crate::forms::{ChartRef, CompiledForm};
use crate::profiles::{validate_pair, validate_profile};
use crate::report::VerificationReport;
use crate::verify::{self, Grid, Mode, Path};
use crate::Exec;

/// One line of the `[checks]` section.
#[derive(Clone, Debug)]
pub enum Check {
    /// `equal a b`: canonical coefficient maps agree.
    Equal { a: String, b: String },
    /// `coefficient a x,z1 = expr`
    Coefficient { form: String, slots: Vec<String>, expected: Expr },
    /// `defect a = expr`
    Defect { form: String, expected: Expr },
    /// `identity a [constants=2,1/2]`
    Identity { form: String, constants: Option<Vec<Rational>> },
    /// `contact a grid=... [tol=..] [mode=contact|confoliation]`
    Contact { form: String, grid: Grid, tol: Option<f64>, mode: Mode },
    /// `singular a grid=... [tol=..] [pinned=x,y] [within=0.05]`
    Singular { form: String, grid: Grid, tol: Option<f64>, pinned: Vec<String>, within: Option<f64> },
    /// `rank a point=x=0,y=1 expect=4`
    Rank { form: String, point: Vec<f64>, expect: usize },
    /// `accessibility tau base=... tangent=... [samples=100] [lo=0] [hi=1] [span=y1,z1] [tol=..]`
    Accessibility { form: String, path: Path, samples: usize, span: Option<Vec<usize>>, tol: Option<f64> },
    /// `validate p [points=401]`
    Validate { profile: String, points: usize },
    /// `validate_pair p q [points=401]`
    ValidatePair { a: String, b: String, points: usize },
    /// `piecewise pw grid=... [samples=41] [tol=..] [mode=contact|confoliation]`
    Piecewise { form: String, grid: Grid, samples: usize, tol: Option<f64>, mode: Mode },
}

/// Values for every chart coordinate, zero unless given as `name=v`.
pub(crate) fn parse_point(chart: &ChartRef, text: &str) -> SResult<Vec<f64>> {
    let mut x = vec![0.0; chart.dim()];
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (n, v) = item.split_once('=').ok_or_else(|| format!("point entry `{item}` needs name=value"))?;
        let i = chart.index(n.trim()).ok_or_else(|| format!("unknown coordinate `{}`", n.trim()))?;
        x[i] = v.trim().parse().map_err(|_| format!("bad number in `{item}`"))?;
    }
    Ok(x)
}

fn expect_expr(rest: &str) -> SResult<(Vec<String>, Expr)> {
    let (lhs, rhs) = rest.split_once('=').ok_or("expected `... = expression`")?;
    Ok((tokens(lhs), rhs.trim().parse().map_err(err)?))
}

impl Check {
    pub fn kind(&self) -> &'static str {
        match self {
            Check::Equal { .. } => "equal",
            Check::Coefficient { .. } => "coefficient",
            Check::Defect { .. } => "defect",
            Check::Identity { .. } => "identity",
            Check::Contact { .. } => "contact",
            Check::Singular { .. } => "singular",
            Check::Rank { .. } => "rank",
            Check::Accessibility { .. } => "accessibility",
            Check::Validate { .. } => "validate",
            Check::ValidatePair { .. } => "validate_pair",
            Check::Piecewise { .. } => "piecewise",
        }
    }

    fn run_inner(&self, sc: &Scenario, real: &Realizations, exec: Exec, tol0: f64) -> SResult<VerificationReport> {
        let tol = |t: &Option<f64>| t.unwrap_or(tol0);
        Ok(match self {
            Check::Equal { a, b } => {
                let (fa, fb) = (sc.form(a)?, sc.form(b)?);
                let mut r = VerificationReport::new("equal").param("a", a.as_str()).param("b", b.as_str());
                r.passed = true;
                let sorted = |c: &ChartRef| {
                    let mut v = c.coords().to_vec();
                    v.sort();
                    v
                };
                if sorted(fa.chart()) != sorted(fb.chart()) {
                    r.fail("the forms live on different charts");
                } else {
                    let diff = fa.sub(&fb.reorder(fa.chart()).map_err(err)?).map_err(err)?;
                    r.residuals.insert("differing terms".into(), diff.num_terms() as f64);
                    if !diff.is_zero() {
                        r.fail(format!("difference: {}", truncate(&diff.to_string())));
                    }
                }
                r
            }
            Check::Coefficient { form, slots, expected } => {
                let names: Vec<&str> = slots.iter().map(String::as_str).collect();
                let got = sc.form(form)?.coefficient(&names).map_err(err)?;
                let mut r = VerificationReport::new("coefficient").param("form", form.as_str()).param("slot", slots.join("^"));
                r.passed = &got == expected;
                if !r.passed {
                    r.detail(format!("got {}", truncate(&got.to_string())));
                }
                r
            }
            Check::Defect { form, expected } => {
                let got = verify::contact_defect(sc.form(form)?).map_err(err)?;
                let mut r = VerificationReport::new("defect").param("form", form.as_str());
                r.passed = &got == expected;
                if !r.passed {
                    r.detail(format!("got {}", truncate(&got.to_string())));
                }
                r
            }
            Check::Identity { form, constants } => match sc.value(form) {
                Some(Value::Built(b)) => verify::check_identity(b, constants.as_deref()).map_err(err)?.param("form", form.as_str()),
                _ => return Err(format!("`{form}` was not produced by a builder")),
            },
            Check::Contact { form, grid, tol: t, mode } => {
                verify::check_contact(sc.form(form)?, real, grid, tol(t), *mode, exec).map_err(err)?.param("form", form.as_str())
            }
            Check::Singular { form, grid, tol: t, pinned, within } => {
                let start = Instant::now();
                let f = sc.form(form)?;
                let locus = verify::singular_locus(f, real, grid, tol(t), exec).map_err(err)?;
                let mut r = VerificationReport::new("singular").param("form", form.as_str()).param("grid", grid.to_string());
                r.params.insert("singular_count".into(), locus.len().into());
                r.passed = true;
                r.pinned = locus.pinned.clone();
                r.singular_samples = locus.points.iter().take(64).map(|p| f.chart().point(p).0).collect();
                for name in pinned {
                    match locus.pinned.get(name) {
                        Some([lo, hi]) => {
                            if let Some(w) = within {
                                if lo.abs().max(hi.abs()) >= *w {
                                    r.fail(format!("{name} pinned at [{lo}, {hi}], not within {w}"));
                                }
                            }
                        }
                        None => r.fail(format!("{name} is not pinned")),
                    }
                }
                if locus.is_empty() && !pinned.is_empty() {
                    r.fail("empty singular locus");
                }
                r.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
                r
            }
            Check::Rank { form, point, expect } => {
                let f = sc.form(form)?;
                let e = CompiledForm::new(f, real).map_err(err)?;
                let de = CompiledForm::new(&f.d(), real).map_err(err)?;
                let k = verify::rank_on_kernel_at(&e, &de, point, verify::RANK_THRESHOLD).map_err(err)?;
                let mut r = VerificationReport::new("rank").param("form", form.as_str());
                r.witness = Some(f.chart().point(point).0);
                r.ranks.insert("rank on kernel".into(), k);
                r.thresholds.insert("relative singular value".into(), verify::RANK_THRESHOLD);
                r.passed = k == *expect;
                if !r.passed {
                    r.detail(format!("expected rank {expect}, got {k}"));
                }
                r
            }
            Check::Accessibility { form, path, samples, span, tol: t } => {
                let c = CompiledForm::new(sc.form(form)?, real).map_err(err)?;
                verify::accessibility_check(&c, path, *samples, tol(t), span.as_deref()).param("form", form.as_str())
            }
            Check::Validate { profile, points } => validate_profile(sc.profile(profile)?, *points),
            Check::ValidatePair { a, b, points } => validate_pair(sc.profile(a)?, sc.profile(b)?, *points),
            Check::Piecewise { form, grid, samples, tol: t, mode } => match sc.value(form) {
                Some(Value::Piecewise(pw)) => {
                    verify::check_piecewise(pw, real, grid, *samples, tol(t), *mode, exec).map_err(err)?.param("form", form.as_str())
                }
                _ => return Err(format!("`{form}` is not piecewise")),
            },
        })
    }

    pub fn run(&self, sc: &Scenario, real: &Realizations, exec: Exec, tol: f64) -> SResult<VerificationReport> {
        let start = Instant::now();
        let mut r = self.run_inner(sc, real, exec, tol)?;
        if r.elapsed_ms.is_none() {
            r.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
        }
        Ok(r)
    }
}

fn truncate(s: &str) -> String {
    const MAX: usize = 400;
    match s.char_indices().nth(MAX) {
        Some((i, _)) => format!("{}...", &s[..i]),
        None => s.to_string(),
    }
}

impl Scenario {
    fn form_chart(&self, name: &str) -> SResult<ChartRef> {
        match self.value(name) {
            Some(Value::Piecewise(pw)) => Ok(pw.chart().clone()),
            Some(v) => Ok(v.form().expect("plain form").chart().clone()),
            None => Err(format!("unknown form `{name}`")),
        }
    }

    fn grid(&self, name: &str, a: &Args) -> SResult<Grid> {
        Grid::parse(&self.form_chart(name)?, a.get("grid").unwrap_or("")).map_err(err)
    }

    pub(super) fn check_line(&self, text: &str) -> SResult<Check> {
        let (kind, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
        let need_form = |n: &str| -> SResult<String> {
            self.value(n).map(|_| n.to_string()).ok_or_else(|| format!("unknown form `{n}`"))
        };
        match kind {
            "coefficient" | "defect" => {
                let (lhs, expected) = expect_expr(rest)?;
                let form = need_form(lhs.first().ok_or("missing form name")?)?;
                if kind == "defect" {
                    return Ok(Check::Defect { form, expected });
                }
                let slots: Vec<String> = lhs.get(1).ok_or("missing slot list")?.split(',').map(|s| s.trim().to_string()).collect();
                self.form(&form)?.coefficient(&slots.iter().map(String::as_str).collect::<Vec<_>>()).map_err(err)?;
                return Ok(Check::Coefficient { form, slots, expected });
            }
            _ => {}
        }
        let toks = tokens(rest);
        let a = Args::parse(&toks);
        let first = || -> SResult<String> { need_form(a.pos.first().ok_or("missing form name")?) };
        let points = a.int("points")?.unwrap_or(401);
        Ok(match kind {
            "equal" => {
                a.only(&[])?;
                let b = a.pos.get(1).ok_or("expected `equal a b`")?;
                Check::Equal { a: first()?, b: need_form(b)? }
            }
            "identity" => {
                a.only(&["constants"])?;
                let constants = a
                    .get("constants")
                    .map(|s| s.split(',').map(parse_rational).collect::<SResult<Vec<_>>>())
                    .transpose()?;
                Check::Identity { form: first()?, constants }
            }
            "contact" => {
                a.only(&["grid", "tol", "mode"])?;
                let form = first()?;
                let mode = a.get("mode").unwrap_or("contact").parse().map_err(err)?;
                Check::Contact { grid: self.grid(&form, &a)?, form, tol: a.num("tol")?, mode }
            }
            "singular" => {
                a.only(&["grid", "tol", "pinned", "within"])?;
                let form = first()?;
                let pinned = a.get("pinned").map(|s| s.split(',').map(|n| n.trim().to_string()).collect()).unwrap_or_default();
                Check::Singular { grid: self.grid(&form, &a)?, form, tol: a.num("tol")?, pinned, within: a.num("within")? }
            }
            "rank" => {
                a.only(&["point", "expect"])?;
                let form = first()?;
                let point = parse_point(&self.form_chart(&form)?, a.get("point").unwrap_or(""))?;
                Check::Rank { form, point, expect: a.int("expect")?.ok_or("missing `expect=`")? }
            }
            "accessibility" => {
                a.only(&["base", "tangent", "samples", "lo", "hi", "span", "tol"])?;
                let form = first()?;
                let chart = self.form_chart(&form)?;
                let path = Path {
                    base: parse_point(&chart, a.get("base").unwrap_or(""))?,
                    tangent: parse_point(&chart, a.req("tangent")?)?,
                    lo: a.num("lo")?.unwrap_or(0.0),
                    hi: a.num("hi")?.unwrap_or(1.0),
                };
                let span = a
                    .get("span")
                    .map(|s| {
                        s.split(',')
                            .map(|n| chart.index(n.trim()).ok_or_else(|| format!("unknown coordinate `{n}`")))
                            .collect::<SResult<Vec<_>>>()
                    })
                    .transpose()?;
                Check::Accessibility { form, path, samples: a.int("samples")?.unwrap_or(100), span, tol: a.num("tol")? }
            }
            "validate" => {
                a.only(&["points"])?;
                let p = a.pos.first().ok_or("missing profile name")?;
                self.profile(p)?;
                Check::Validate { profile: p.clone(), points }
            }
            "validate_pair" => {
                a.only(&["points"])?;
                let (p, q) = (a.pos.first().ok_or("missing profile")?, a.pos.get(1).ok_or("missing second profile")?);
                self.profile(p)?;
                self.profile(q)?;
                Check::ValidatePair { a: p.clone(), b: q.clone(), points }
            }
            "piecewise" => {
                a.only(&["grid", "samples", "tol", "mode"])?;
                let form = first()?;
                if !matches!(self.value(&form), Some(Value::Piecewise(_))) {
                    return Err(format!("`{form}` is not piecewise"));
                }
                let mode = a.get("mode").unwrap_or("contact").parse().map_err(err)?;
                Check::Piecewise {
                    grid: self.grid(&form, &a)?,
                    form,
                    samples: a.int("samples")?.unwrap_or(41),
                    tol: a.num("tol")?,
                    mode,
                }
            }
            other => return Err(format!("unknown check `{other}`")),
        })
    }
}

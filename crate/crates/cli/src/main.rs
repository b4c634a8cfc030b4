use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use contact_calculus::scenario::Scenario;
use contact_calculus::verify::{self, Grid, Mode};
use contact_calculus::{Chart, ChartRef, Exec, Expr, Form, Point, Realizations, VerificationReport};
use serde_json::json;

/// Exterior calculus and contact-condition checks for explicit forms.
#[derive(Parser)]
#[command(name = "contactcalc", version)]
struct Cli {
    /// Evaluate grids on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a form and print it in canonical order.
    Parse(Single),
    /// Exterior derivative.
    D(Single),
    /// Wedge product of all given forms, left to right.
    Wedge(Multi),
    /// Hodge star for the Euclidean metric of the chart.
    Star(Single),
    /// Contact defect of a 1-form on an odd-dimensional chart.
    Defect(Single),
    /// The (2k)-form ⋆(η ∧ (dη)^k).
    Tau(Single),
    /// Contact or confoliation check of a 1-form over a grid.
    Check(CheckArgs),
    /// Run a scenario file and emit its JSON report.
    Run(RunArgs),
}

#[derive(Args)]
struct Common {
    /// Ordered coordinates, e.g. `x,y,z`.
    #[arg(long)]
    chart: String,
    /// Evaluate at a point, e.g. `x=0.5,y=1`; unlisted coordinates are 0.
    #[arg(long)]
    point: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct Single {
    #[command(flatten)]
    common: Common,
    #[arg(long, allow_hyphen_values = true)]
    form: String,
}

#[derive(Args)]
struct Multi {
    #[command(flatten)]
    common: Common,
    /// Repeatable; `--forms` takes a `;`-separated list.
    #[arg(long, allow_hyphen_values = true)]
    form: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    forms: Option<String>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, allow_hyphen_values = true)]
    form: String,
    /// Axes such as `x=-1:1:21, y=0`; unlisted coordinates sit at 0.
    #[arg(long)]
    grid: String,
    #[arg(long, env = "CONTACTCALC_TOL", default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value = "contact")]
    mode: Mode,
}

#[derive(Args)]
struct RunArgs {
    path: PathBuf,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Default tolerance for checks without `tol=`.
    #[arg(long, env = "CONTACTCALC_TOL", default_value_t = 1e-9)]
    tol: f64,
}

enum Failure {
    Check,
    Input(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn chart(c: &Common) -> Result<ChartRef, Failure> {
    Ok(Chart::parse_list(&c.chart)?.shared())
}

fn point(chart: &ChartRef, text: &str) -> Result<Point, Failure> {
    let mut p = Point::from_pairs(chart.coords().iter().map(|c| (c.as_str(), 0.0)));
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (n, v) = item.split_once('=').ok_or_else(|| Failure::Input(format!("point entry `{item}` needs name=value")))?;
        let n = n.trim();
        if chart.index(n).is_none() {
            return Err(Failure::Input(format!("unknown coordinate `{n}`")));
        }
        p.set(n, v.trim().parse().map_err(|_| Failure::Input(format!("bad number in `{item}`")))?);
    }
    Ok(p)
}

fn form_json(f: &Form) -> serde_json::Value {
    let c = f.chart();
    let terms: Vec<_> = f
        .terms()
        .map(|(slots, e)| {
            let names: Vec<&str> = slots.iter().map(|&i| c.coords()[i].as_str()).collect();
            json!({ "slots": names, "coefficient": e.to_string() })
        })
        .collect();
    json!({ "chart": c.coords(), "degree": f.degree(), "form": f.to_string(), "terms": terms })
}

fn print_form(f: &Form, c: &Common) -> Outcome {
    match &c.point {
        Some(p) => {
            let p = point(f.chart(), p)?;
            let real = Realizations::new();
            let mut terms = Vec::new();
            for (slots, e) in f.terms() {
                let names: Vec<&str> = slots.iter().map(|&i| f.chart().coords()[i].as_str()).collect();
                terms.push((names.join("^"), e.eval(&p, &real)?));
            }
            if c.json {
                let m: serde_json::Map<_, _> = terms.into_iter().map(|(k, v)| (k, json!(v))).collect();
                println!("{}", serde_json::Value::Object(m));
            } else if terms.is_empty() {
                println!("0");
            } else {
                for (k, v) in terms {
                    println!("{} {v:e}", if k.is_empty() { "1" } else { &k });
                }
            }
        }
        None if c.json => println!("{}", form_json(f)),
        None => println!("{f}"),
    }
    Ok(())
}

fn print_scalar(e: &Expr, chart: &ChartRef, c: &Common) -> Outcome {
    match &c.point {
        Some(p) => {
            let v = e.eval(&point(chart, p)?, &Realizations::new())?;
            if c.json {
                println!("{}", json!({ "value": v }));
            } else {
                println!("{v:e}");
            }
        }
        None if c.json => println!("{}", json!({ "expr": e.to_string() })),
        None => println!("{e}"),
    }
    Ok(())
}

fn finish(r: &VerificationReport, json: bool) -> Outcome {
    if json {
        println!("{}", r.to_json());
    } else {
        let status = if r.passed { "pass" } else { "FAIL" };
        println!("{status} {}", r.check);
        if let Some(m) = r.min_value {
            let at: Vec<String> = r.witness.iter().flatten().map(|(k, v)| format!("{k}={v}")).collect();
            println!("  min {m:e} at {}", at.join(", "));
        }
        for d in &r.details {
            println!("  {d}");
        }
    }
    if r.passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn run(cli: Cli) -> Outcome {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    match cli.cmd {
        Cmd::Parse(a) => print_form(&Form::parse(&a.form, &chart(&a.common)?)?, &a.common),
        Cmd::D(a) => print_form(&Form::parse(&a.form, &chart(&a.common)?)?.d_with(exec), &a.common),
        Cmd::Star(a) => print_form(&Form::parse(&a.form, &chart(&a.common)?)?.hodge_star(), &a.common),
        Cmd::Tau(a) => print_form(&verify::tau(&Form::parse(&a.form, &chart(&a.common)?)?)?, &a.common),
        Cmd::Defect(a) => {
            let c = chart(&a.common)?;
            print_scalar(&verify::contact_defect(&Form::parse(&a.form, &c)?)?, &c, &a.common)
        }
        Cmd::Wedge(a) => {
            let c = chart(&a.common)?;
            let mut texts = a.form.clone();
            if let Some(list) = &a.forms {
                texts.extend(list.split(';').map(str::trim).filter(|s| !s.is_empty()).map(String::from));
            }
            let (first, rest) = texts.split_first().ok_or_else(|| Failure::Input("no forms given".into()))?;
            let mut acc = Form::parse(first, &c)?;
            for t in rest {
                acc = acc.wedge_with(&Form::parse(t, &c)?, exec)?;
            }
            print_form(&acc, &a.common)
        }
        Cmd::Check(a) => {
            let c = chart(&a.common)?;
            let eta = Form::parse(&a.form, &c)?;
            let grid = Grid::parse(&c, &a.grid)?;
            let real = Realizations::new();
            let mut r = verify::check_contact(&eta, &real, &grid, a.tol, a.mode, exec)?;
            if let Some(p) = &a.common.point {
                let rank = verify::rank_on_kernel(&eta, &real, &point(&c, p)?)?;
                r = r.param("rank_on_kernel", rank);
            }
            finish(&r, a.common.json)
        }
        Cmd::Run(a) => {
            let text = fs::read_to_string(&a.path).map_err(|e| Failure::Input(format!("{}: {e}", a.path.display())))?;
            let sc = Scenario::parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", a.path.display())))?;
            let outcome = sc.run(exec, a.tol);
            let json = outcome.to_json();
            match &a.out {
                Some(path) => {
                    fs::write(path, json + "\n")?;
                    for r in &outcome.reports {
                        let status = if r.passed { "pass" } else { "FAIL" };
                        eprintln!("{status} {} (line {})", r.check, r.params.get("line").map_or("?".into(), |v| v.to_string()));
                    }
                }
                None => println!("{json}"),
            }
            if outcome.passed {
                Ok(())
            } else {
                Err(Failure::Check)
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

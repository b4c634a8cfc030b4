use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use contact_calculus::constructions::{product_fold_form, ContactModel, Disk};
use contact_calculus::profiles::{H1Model, Variable};
use contact_calculus::verify::{contact_defect, Grid, Scan};
use contact_calculus::{make_profile, Chart, Exec, Expr, Form, ProfileKind, ProfileParams, ProfileSet, Realizations};

// Defect of the Cartesian product fold on a 4-dim slice of its 9-dim chart.
fn product_fold_defect() -> (Expr, Realizations, Grid) {
    let nu: ContactModel = "x1,y1,z1".parse().unwrap();
    let lam: ContactModel = "x2,y2,z2".parse().unwrap();
    let p = |k, params| make_profile(k, params).unwrap();
    let sq = ProfileParams { variable: Variable::Square, h1_model: H1Model::Quartic, ..Default::default() };
    let (f, g) = (p(ProfileKind::F, ProfileParams::default()), p(ProfileKind::G, ProfileParams::default()));
    let h1 = p(ProfileKind::H1, sq.clone());
    let h2 = p(ProfileKind::H2, ProfileParams { variable: Variable::SquareQuotient, ..sq });
    let b = product_fold_form(&nu, &lam, (&f, &g), (&h1, &h2), &Disk::cartesian(), "t").unwrap();
    let real = ProfileSet::new().with(f).with(g).with(h1).with(h2).realizations();
    let grid = Grid::parse(b.chart(), "x=-1:1:21, y=-1:1:21, t=-1:1:21, x1=-1:1:21").unwrap();
    (contact_defect(&b.form).unwrap(), real, grid)
}

fn scan(c: &mut Criterion) {
    let (defect, real, grid) = product_fold_defect();
    let mut group = c.benchmark_group("defect_scan_21^4");
    group.sample_size(10);
    for (name, exec) in [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| Scan::new(&defect, &real, &grid, exec).unwrap().min())
        });
    }
    group.finish();
}

fn symbolic(c: &mut Criterion) {
    let eta = Form::parse(
        "exp(t) d[z] + x^2 y d[y] - t x d[x] + (x + t)^2 d[t] + y d[w] + sin(x) d[v]",
        &Chart::parse_list("t,x,y,z,w,v,u").unwrap().shared(),
    )
    .unwrap();
    let mut group = c.benchmark_group("wedge_power_7d");
    for (name, exec) in [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)] {
        group.bench_function(name, |b| b.iter(|| eta.d().wedge_power_with(3, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, scan, symbolic);
criterion_main!(benches);

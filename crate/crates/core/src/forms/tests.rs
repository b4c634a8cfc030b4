use super::*;
use proptest::prelude::*;

fn chart(names: &str) -> ChartRef {
    Chart::parse_list(names).unwrap().shared()
}

fn form(text: &str, c: &ChartRef) -> Form {
    Form::parse(text, c).unwrap()
}

#[test]
fn parse_examples() {
    let c = chart("x1,y1,z1");
    let beta = form("d[z1]+x1 d[y1]", &c);
    assert_eq!(beta.coefficient(&["z1"]).unwrap(), Expr::one());
    assert_eq!(beta.coefficient(&["y1"]).unwrap(), Expr::var("x1"));
    let xy = chart("x,y");
    assert_eq!(form("d[y]^d[x]", &xy), form("-d[x]^d[y]", &xy));
    assert!(form("d[x]^d[x]", &xy).is_zero());
    assert_eq!(form("d[x]∧d[y]", &xy), form("d[x]^d[y]", &xy));
}

#[test]
fn parse_errors() {
    let c = chart("x,y,z");
    assert!(matches!(Form::parse("d[x] + x", &c), Err(Error::MixedDegree(1, 0))));
    assert!(matches!(Form::parse("d[w]", &c), Err(Error::UnknownCoordinate(_))));
    assert!(matches!(Form::parse("q d[x]", &c), Err(Error::UnknownIdentifier(_))));
    assert!(Form::parse_with("q d[x]", &c, false).is_ok());
    assert!(matches!(Form::parse("d[x] +", &c), Err(Error::Parse(_))));
    assert!(matches!(
        Form::parse("d[x]^d[y]^d[z]^d[x]^d[y]", &c),
        Err(Error::DegreeOverflow { .. })
    ));
}

#[test]
fn wedge_examples() {
    let c = chart("x,y,z");
    let dx = form("d[x]", &c);
    let dy = form("d[y]", &c);
    assert_eq!(dx.wedge(&dy).unwrap(), dy.wedge(&dx).unwrap().neg());
    let a = form("d[z]+x d[y]", &c);
    let vol = a.wedge(&dx).unwrap().wedge(&dy).unwrap();
    assert_eq!(vol.top_coefficient().unwrap(), Expr::one());
}

#[test]
fn derivative_examples() {
    let c = chart("x1,y1,z1");
    assert_eq!(form("x1 d[y1]", &c).d(), form("d[x1]^d[y1]", &c));
    let c = chart("x,y");
    assert_eq!(form("(2-(x^2+y^2)^2) d[y]", &c).d(), form("(-4 x^3 - 4 x y^2) d[x]^d[y]", &c));
}

#[test]
fn wedge_power_examples() {
    let c = chart("x1,y1,x2,y2");
    assert!(form("d[x1]^d[y1]", &c).wedge_power(2).unwrap().is_zero());
    let w = form("d[x1]^d[y1] + d[x2]^d[y2]", &c);
    assert_eq!(w.wedge_power(2).unwrap(), form("2 d[x1]^d[y1]^d[x2]^d[y2]", &c));
    assert_eq!(form("(d[x1]^d[y1] + d[x2]^d[y2])^2", &c), w.wedge_power(2).unwrap());
    assert!(matches!(w.wedge_power(3), Err(Error::DegreeOverflow { .. })));
}

#[test]
fn star_and_top_coefficient() {
    let c = chart("x,y,z");
    assert_eq!(form("d[x]", &c).hodge_star(), form("d[y]^d[z]", &c));
    assert_eq!(form("d[y]", &c).hodge_star(), form("-d[x]^d[z]", &c));
    assert_eq!(form("d[z]^d[x]^d[y]", &c).top_coefficient().unwrap(), Expr::one());
    assert!(matches!(form("d[x]", &c).top_coefficient(), Err(Error::WrongDegree { .. })));
    // star of dz + x dy, basis-wise: ⋆dz = dx^dy, ⋆dy = -dx^dz
    assert_eq!(form("d[z]+x d[y]", &c).hodge_star(), form("d[x]^d[y] - x d[x]^d[z]", &c));
}

#[test]
fn interior_examples() {
    let c = chart("x,y,z");
    let dz = VectorField::coordinate(&c, "z").unwrap();
    assert_eq!(form("d[z]+x d[y]", &c).interior(&dz).unwrap(), Form::scalar(&c, Expr::one()));
    let dx = VectorField::coordinate(&c, "x").unwrap();
    assert_eq!(form("d[x]^d[y]", &c).interior(&dx).unwrap(), form("d[y]", &c));
    assert!(Form::scalar(&c, Expr::var("x")).interior(&dx).unwrap().is_zero());
}

#[test]
fn substitution_examples() {
    let c = chart("x,y");
    let mut b = BTreeMap::new();
    b.insert("x".to_string(), "y^2".parse().unwrap());
    let pulled = form("d[x]", &c).substitute(&b).unwrap();
    assert_eq!(pulled.chart().coords(), ["y"]);
    assert_eq!(pulled, Form::parse("2 y d[y]", pulled.chart()).unwrap());

    let c = chart("x,y,z,t,phi");
    let w = form("f(t) (d[z] + x d[y]) + g(t) d[phi]", &c);
    let s = w.restrict(&[("t", Expr::zero())]).unwrap();
    let zeroed = s.map_funcs(&|name, d, _| (name == "g" && d == [0]).then(Expr::zero));
    assert_eq!(zeroed, Form::parse("f(0) (d[z] + x d[y])", zeroed.chart()).unwrap());

    let mut cyc = BTreeMap::new();
    cyc.insert("x".to_string(), "y+1".parse().unwrap());
    cyc.insert("y".to_string(), "x".parse().unwrap());
    assert!(matches!(form("d[x]", &chart("x,y,z")).substitute(&cyc), Err(Error::CyclicBindings)));
}

#[test]
fn display_round_trip() {
    let c = chart("t1,x,y,z1");
    let w = form("(2-x^4-2 x^2 y^2-y^4) d[t1]^d[z1] - 24 x d[x]^d[y] + f'(t1) d[y]^d[z1]", &c);
    let printed = w.to_string();
    assert_eq!(Form::parse(&printed, &c).unwrap(), w);
    assert!(printed.contains("d[t1]^d[z1]"));
}

#[test]
fn reorder_tracks_orientation() {
    let a = chart("x,y,z");
    let b = chart("z,y,x");
    let vol = form("d[x]^d[y]^d[z]", &a).reorder(&b).unwrap();
    assert_eq!(vol.top_coefficient().unwrap(), Expr::int(-1));
}

fn coeff_strategy(vars: Vec<String>) -> impl Strategy<Value = Expr> {
    let n = vars.len();
    prop::collection::vec((-3i64..4, 0..n, 0u32..3, 0..n, 0u32..2, any::<bool>()), 1..3).prop_map(
        move |ms| {
            ms.into_iter().fold(Expr::zero(), |acc, (c, i, p, j, q, fancy)| {
                let mut m = Expr::int(c) * Expr::var(&vars[i]).pow(p) * Expr::var(&vars[j]).pow(q);
                if fancy {
                    m = m * Expr::exp(Expr::var(&vars[j])) + Expr::profile("f", 0, Expr::var(&vars[i]));
                }
                acc + m
            })
        },
    )
}

fn form_strategy(dim: usize, degree: usize) -> impl Strategy<Value = Form> {
    let names: Vec<String> = (0..dim).map(|i| format!("u{i}")).collect();
    let c = Chart::new(&names).unwrap().shared();
    let masks: Vec<u64> = (0u64..(1 << dim)).filter(|m| m.count_ones() as usize == degree).collect();
    prop::collection::vec((prop::sample::select(masks), coeff_strategy(names)), 1..4).prop_map(move |ts| {
        let mut out = Form::zero(&c, degree);
        for (m, e) in ts {
            out = out.add(&Form::basis(&c, m, e)).unwrap();
        }
        out
    })
}

fn any_form(dim: usize) -> impl Strategy<Value = Form> {
    (0..=dim).prop_flat_map(move |k| form_strategy(dim, k))
}

fn pair(dim: usize) -> impl Strategy<Value = (Form, Form)> {
    (0..=dim).prop_flat_map(move |k| (0..=dim - k).prop_flat_map(move |l| (form_strategy(dim, k), form_strategy(dim, l))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn d_squared_vanishes(w in (3usize..6).prop_flat_map(any_form)) {
        prop_assert!(w.d().d().is_zero());
    }

    #[test]
    fn graded_leibniz((a, b) in (3usize..6).prop_flat_map(pair)) {
        prop_assume!(a.degree() + b.degree() < a.chart().dim());
        let lhs = a.wedge(&b).unwrap().d();
        let sign = if a.degree() % 2 == 1 { -1 } else { 1 };
        let rhs = a.d().wedge(&b).unwrap().add(&a.wedge(&b.d()).unwrap().scale(&Expr::int(sign))).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn graded_commutativity((a, b) in (3usize..6).prop_flat_map(pair)) {
        let sign = if a.degree() * b.degree() % 2 == 1 { -1 } else { 1 };
        prop_assert_eq!(a.wedge(&b).unwrap(), b.wedge(&a).unwrap().scale(&Expr::int(sign)));
    }

    #[test]
    fn interior_is_antiderivation((a, b) in (3usize..6).prop_flat_map(pair), k in 0usize..2) {
        prop_assume!(a.degree() > 0 && b.degree() > 0);
        let c = a.chart().clone();
        let v = VectorField::new(&c, &[
            (c.coord(k), Expr::var(c.coord(0)) + Expr::one()),
            (c.coord(k + 1), Expr::int(2)),
        ]).unwrap();
        let lhs = a.wedge(&b).unwrap().interior(&v).unwrap();
        let sign = if a.degree() % 2 == 1 { -1 } else { 1 };
        let rhs = a.interior(&v).unwrap().wedge(&b).unwrap()
            .add(&a.wedge(&b.interior(&v).unwrap()).unwrap().scale(&Expr::int(sign))).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn double_star(w in (3usize..8).prop_flat_map(any_form)) {
        let n = w.chart().dim();
        let k = w.degree();
        let sign = if (k * (n - k)) % 2 == 1 { -1 } else { 1 };
        prop_assert_eq!(w.hodge_star().hodge_star(), w.scale(&Expr::int(sign)));
    }

    #[test]
    fn wedge_power_matches_iteration(w in (4usize..7).prop_flat_map(|d| form_strategy(d, 2)), n in 0usize..4) {
        prop_assume!(2 * n <= w.chart().dim());
        let mut it = Form::scalar(w.chart(), Expr::one());
        for _ in 0..n {
            it = it.wedge(&w).unwrap();
        }
        prop_assert_eq!(w.wedge_power(n).unwrap(), it);
    }
}

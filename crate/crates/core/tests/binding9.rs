//! Golden reproduction of the nine-dimensional binding computation: the
//! 1-form `(2-(x^2+y^2)^2)(dz1 + x1 dy1) + dz2 + x2 dy2` at `t1 = 0`, its
//! differential, `η∧(dη)^3`, `τ = ⋆(η∧(dη)^3)` and `τ^4`.

use std::collections::BTreeMap;
use std::time::Instant;

use contact_calculus::{Expr, Form};

mod golden;
use golden::*;

fn at_t1_zero(f: &Form) -> Form {
    let mut b = BTreeMap::new();
    b.insert("t1".to_string(), Expr::zero());
    f.map_coefficients(|c| c.substitute(&b))
}

#[test]
fn printed_differential_differs_in_one_coefficient() {
    let c = alphabetical();
    let computed = at_t1_zero(&Form::parse(ETA, &c).unwrap().d());
    let printed = Form::parse(DETA1_PRINTED, &c).unwrap();
    assert_eq!(at_t1_zero(&Form::parse(ETA, &c).unwrap()), Form::parse(ETA1, &c).unwrap());
    let diff = printed.sub(&computed).unwrap();
    assert_eq!(diff.num_terms(), 1);
    let expected: Expr = "-4 x1 y (x^2+y^2) (x1-1)".parse().unwrap();
    assert_eq!(diff.coefficient(&["y", "y1"]).unwrap(), expected);
    assert_eq!(
        computed.coefficient(&["x", "z1"]).unwrap(),
        "-4 x^3-4 x y^2".parse::<Expr>().unwrap()
    );
}

#[test]
fn tau_and_tau_fourth_power() {
    let c = alphabetical();
    let start = Instant::now();
    let eta1 = Form::parse(ETA1, &c).unwrap();
    let deta1 = Form::parse(DETA1_PRINTED, &c).unwrap();
    let top = eta1.wedge(&deta1.wedge_power(3).unwrap()).unwrap();
    let tau = top.hodge_star();
    assert_eq!(tau, Form::parse(TAU, &c).unwrap());
    let tau4 = tau.wedge_power(4).unwrap();
    assert_eq!(tau4, Form::parse(TAU4, &c).unwrap());
    eprintln!("pipeline: {:?}", start.elapsed());
}

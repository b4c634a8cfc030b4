use super::*;
use crate::constructions::{fold_circle_form, ContactModel};
use crate::expr::{rational, Point};
use crate::forms::{Chart, CompiledForm};
use crate::profiles::{make_profile, ProfileKind, ProfileParams, ProfileSet};

fn xyz() -> ChartRef {
    Chart::parse_list("x,y,z").unwrap().shared()
}

fn form(text: &str) -> Form {
    Form::parse(text, &xyz()).unwrap()
}

fn cube(c: &ChartRef, n: usize) -> Grid {
    c.coords().iter().fold(Grid::new(c), |g, name| g.axis(name, -1.0, 1.0, n).unwrap())
}

#[test]
fn defect_examples() {
    assert!(contact_defect(&form("d[z] + x d[y]")).unwrap().is_one());
    assert!(contact_defect(&form("d[z]")).unwrap().is_zero());
    let even = Chart::parse_list("x,y").unwrap().shared();
    let f = Form::parse("x d[y]", &even).unwrap();
    assert_eq!(contact_defect(&f), Err(Error::EvenDimension(2)));
    assert!(matches!(contact_defect(&form("d[x]^d[y]")), Err(Error::WrongDegree { .. })));
}

#[test]
fn defect_scales_with_constants() {
    let eta = form("exp(x) d[z] + (x + y^2) d[y] + z d[x]");
    let c = Expr::constant(rational(3, 2));
    let scaled = contact_defect(&eta.scale(&c)).unwrap();
    assert_eq!(scaled, contact_defect(&eta).unwrap() * c.pow(2));
}

#[test]
fn tau_in_three_dimensions() {
    assert_eq!(tau(&form("d[z] + x d[y]")).unwrap(), form("d[x]^d[y] - x d[x]^d[z]"));
}

#[test]
fn null_directions() {
    let real = Realizations::new();
    let t = CompiledForm::new(&form("d[x]^d[y]"), &real).unwrap();
    let v = null_direction(&t, &[0.3, -0.2, 5.0]).unwrap();
    assert_eq!(v.as_slice(), &[0.0, 0.0, 1.0]);
    assert!(contraction_residual(&t, &[0.3, -0.2, 5.0], &v) < 1e-12);
    let zero = CompiledForm::new(&Form::zero(&xyz(), 2), &real).unwrap();
    assert_eq!(null_direction(&zero, &[0.0; 3]), Err(Error::KernelDimension(3)));
    let one = CompiledForm::new(&form("d[x]"), &real).unwrap();
    assert!(matches!(null_direction(&one, &[0.0; 3]), Err(Error::WrongDegree { .. })));
}

#[test]
fn rank_of_standard_form() {
    let real = Realizations::new();
    let p = Point::from_pairs([("x", 0.0), ("y", 0.0), ("z", 0.0)]);
    assert_eq!(rank_on_kernel(&form("d[z] + x d[y]"), &real, &p).unwrap(), 2);
    assert_eq!(rank_on_kernel(&form("d[z]"), &real, &p).unwrap(), 0);
    assert_eq!(rank_on_kernel(&form("x d[z]"), &real, &p), Err(Error::VanishingForm));
}

#[test]
fn grid_order_and_parsing() {
    let g = Grid::parse(&xyz(), "x=0:1:3, z=2").unwrap();
    assert_eq!(g.len(), 3);
    assert_eq!(g.point(1), vec![0.5, 0.0, 2.0]);
    assert_eq!(g.to_string(), "x=0:1:3, y=0, z=2");
    let h = Grid::parse(&xyz(), "x=0:1:2, y=0:1:2").unwrap();
    assert_eq!(h.point(1), vec![0.0, 1.0, 0.0]);
    assert!(Grid::parse(&xyz(), "w=1").is_err());
    assert!(Grid::parse(&xyz(), "x=1:0:3").is_err());
    assert!(Grid::parse(&xyz(), "x").is_err());
}

#[test]
fn contact_and_confoliation_checks() {
    let real = Realizations::new();
    let g = cube(&xyz(), 5);
    let std = check_contact(&form("d[z] + x d[y]"), &real, &g, 1e-9, Mode::Contact, Exec::Parallel).unwrap();
    assert!(std.passed);
    assert!(std.singular_samples.is_empty());
    // Negating the whole form leaves a 3-dim defect unchanged; the hatted
    // model reverses it.
    let same = check_contact(&form("-d[z] - x d[y]"), &real, &g, 1e-9, Mode::Contact, Exec::Parallel).unwrap();
    assert!(same.passed);
    let neg = check_contact(&form("d[z] - x d[y]"), &real, &g, 1e-9, Mode::Contact, Exec::Parallel).unwrap();
    assert!(!neg.passed);
    assert_eq!(neg.min_value, Some(-1.0));
    let closed = check_contact(&form("d[z]"), &real, &g, 1e-9, Mode::Confoliation, Exec::Parallel).unwrap();
    assert!(closed.passed);
    let locus = singular_locus(&form("d[z]"), &real, &g, 1e-9, Exec::Parallel).unwrap();
    assert_eq!(locus.len(), g.len());
    assert!(locus.pinned.is_empty());
    assert!(singular_locus(&form("d[z] + x d[y]"), &real, &g, 1e-9, Exec::Parallel).unwrap().is_empty());
}

#[test]
fn pinned_coordinates() {
    let real = Realizations::new();
    let g = cube(&xyz(), 11);
    let eta = form("d[z] + x^2 d[y]");
    let locus = singular_locus(&eta, &real, &g, 1e-9, Exec::Sequential).unwrap();
    assert_eq!(locus.len(), 11 * 11);
    assert_eq!(locus.pinned.get("x"), Some(&[0.0, 0.0]));
    assert!(!locus.pinned.contains_key("y"));
    assert_eq!(locus.observe(|p| p[0].abs()), Some([0.0, 0.0]));
}

#[test]
fn reports_do_not_depend_on_strategy() {
    let real = Realizations::new();
    let g = cube(&xyz(), 9);
    let eta = form("d[z] + (x^2 - y) d[y] + z d[x]");
    let a = check_contact(&eta, &real, &g, 1e-9, Mode::Confoliation, Exec::Parallel).unwrap();
    let b = check_contact(&eta, &real, &g, 1e-9, Mode::Confoliation, Exec::Sequential).unwrap();
    assert_eq!(a.to_stable_json(), b.to_stable_json());
}

#[test]
fn accessibility_negative_control() {
    let real = Realizations::new();
    let t = CompiledForm::new(&tau(&form("d[z] + x d[y]")).unwrap(), &real).unwrap();
    let along = Path { base: vec![0.0; 3], tangent: vec![0.0, 0.0, 1.0], lo: 0.0, hi: 0.0 };
    let bad = accessibility_check(&t, &along, 10, 1e-8, None);
    assert!(!bad.passed);
    assert!((bad.residuals["perpendicular"] - 1.0).abs() < 1e-12);
    let across = Path { base: vec![0.0; 3], tangent: vec![1.0, 0.0, 0.0], lo: 0.0, hi: 1.0 };
    let good = accessibility_check(&t, &across, 10, 1e-8, Some(&[1, 2]));
    assert!(good.passed, "{:?}", good.details);
}

#[test]
fn bisection() {
    let r = bisect_threshold(0.0, 100.0, 0.01, |x| Ok(x * x > 2.0)).unwrap().unwrap();
    assert!(r >= 2f64.sqrt() && r - 2f64.sqrt() <= 0.01);
    assert_eq!(bisect_threshold(0.0, 1.0, 0.01, |x| Ok(x > 2.0)).unwrap(), None);
    assert_eq!(bisect_threshold(3.0, 4.0, 0.01, |x| Ok(x > 2.0)).unwrap(), Some(3.0));
}

#[test]
fn fold_circle_checks() {
    let (f, g) = (
        make_profile(ProfileKind::F, ProfileParams::default()).unwrap(),
        make_profile(ProfileKind::G, ProfileParams::default()).unwrap(),
    );
    let lam: ContactModel = "x,y,z".parse().unwrap();
    let b = fold_circle_form(&lam, &f, &g, "t", "phi").unwrap();
    let id = check_identity(&b, Some(&[rational(2, 1)])).unwrap();
    assert!(id.passed, "{:?}", id.details);
    assert!(!check_identity(&b, Some(&[rational(3, 1)])).unwrap().passed);
    let real = ProfileSet::new().with(f).with(g).realizations();
    let grid = Grid::new(b.chart()).axis("t", -1.0, 1.0, 201).unwrap().axis("phi", 0.0, 6.0, 7).unwrap();
    let r = check_contact(&b.form, &real, &grid, 1e-12, Mode::Contact, Exec::Parallel).unwrap();
    assert!(r.passed, "min {:?} at {:?}", r.min_value, r.witness);
}

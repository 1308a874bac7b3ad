use veldkamp::correspondence::{cone, cone_op_law_violation, verify_cone_quotient};
use veldkamp::polar::LineSpace;
use veldkamp::presets;
use veldkamp::quotient::find_weeds;
use veldkamp::spaces::DEFAULT_VECTOR_CAP;

fn space(name: &str) -> LineSpace {
    presets::lambda(name)
        .unwrap()
        .enumerate_singular(DEFAULT_VECTOR_CAP)
        .unwrap()
        .line_space()
}

fn far_point(s: &LineSpace, d: usize) -> usize {
    (0..s.num_points()).find(|&e| !s.collinear(d, e)).unwrap()
}

#[test]
fn cone_over_hyperbolic_quadric() {
    let s = space("q5plus3");
    let c = cone(&s, 0).unwrap();
    assert_eq!(c.graph.points().len(), 48);
    assert!(c.graph.is_green());
    assert!(!c.graph.is_flat());
    assert_eq!(cone_op_law_violation(&s, &c), None);
    assert!(!find_weeds(&c.graph).unwrap().is_empty());
    let r = verify_cone_quotient(&s, &c, far_point(&s, 0)).unwrap();
    assert_eq!(r.s2.num_points(), 16);
    assert_eq!(r.quotient.point_classes.classes.len(), 16);
    assert!(r.canonical_map_ok);
}

#[test]
fn cone_over_symplectic_space() {
    let s = space("sp63");
    let c = cone(&s, 0).unwrap();
    assert_eq!(c.graph.points().len(), 120);
    let r = verify_cone_quotient(&s, &c, far_point(&s, 0)).unwrap();
    assert_eq!(r.s2.num_points(), 40);
    assert!(r.canonical_map_ok);
}

use veldkamp::algebra::Matrix;
use veldkamp::field::Elem;
use veldkamp::moufang::{certify_moufang, verify_commutator_relations, Family, Generators};
use veldkamp::presets;
use veldkamp::spaces::{LambdaSpace, TElem, DEFAULT_VECTOR_CAP};

fn anisotropic_line(p: u8) -> LambdaSpace {
    // q(a) = a² on a one-dimensional L
    let json = match p {
        2 => r#"{"case":"I","p":2,"d":1,"L":{"dim":1,"gram_f":[[0]],"q_table":[0,1]}}"#,
        3 => r#"{"case":"I","p":3,"d":1,"L":{"dim":1,"gram_f":[[2]],"q_table":[0,1,1]}}"#,
        _ => unreachable!(),
    };
    LambdaSpace::from_json(json).unwrap()
}

fn hyperbolic_line(p: u8) -> LambdaSpace {
    LambdaSpace::from_json(&format!(
        r#"{{"case":"I","p":{p},"d":1,"L":{{"dim":2,"blocks":["hyperbolic"]}}}}"#
    ))
    .unwrap()
}

#[test]
fn quadratic_relations_hold() {
    for l in [
        anisotropic_line(2),
        anisotropic_line(3),
        hyperbolic_line(2),
        hyperbolic_line(3),
    ] {
        let r = verify_commutator_relations(&l).unwrap();
        assert_eq!(r.families.len(), 6);
    }
}

#[test]
fn quadratic_relation_counts_cover_every_tuple() {
    // |L| = 9, |K| = 3
    let r = verify_commutator_relations(&hyperbolic_line(3)).unwrap();
    let counts: Vec<usize> = r.families.iter().map(|f| f.1).collect();
    assert_eq!(counts, vec![81, 27, 9, 27, 27, 27]);
}

#[test]
fn hermitian_and_symplectic_relations_hold() {
    for name in ["h34", "h54", "w3", "sp63"] {
        let r = verify_commutator_relations(&presets::lambda(name).unwrap()).unwrap();
        assert_eq!(r.families.len(), 6, "{name}");
    }
}

#[test]
fn relation_fails_when_a_generator_is_replaced() {
    // swapping the roles of γ and δ must break [x₂(a), x₄(b)⁻¹] = x₃(f(a,b))
    let l = hyperbolic_line(3);
    let g = Generators::new(&l).unwrap();
    let k = g.field();
    let a = TElem {
        a: vec![Elem(1), Elem(0)],
        t: Elem(0),
    };
    let b = TElem {
        a: vec![Elem(0), Elem(1)],
        t: Elem(0),
    };
    let c = Matrix::commutator(k, &g.beta(&a), &g.alpha(&b).inverse(k).unwrap()).unwrap();
    let fab = g.forms().f_l(&a.a, &b.a);
    assert_eq!(c, g.gamma(fab));
    assert_ne!(c, g.delta(fab));
}

#[test]
fn families_have_the_expected_orders() {
    let g = Generators::new(&presets::lambda("h54").unwrap()).unwrap();
    // T has |L| · |K₀| = 16 · 2 elements, K⁺ has 4
    let orders: Vec<usize> = Family::ALL.iter().map(|&f| g.family(f).len()).collect();
    assert_eq!(orders, vec![32, 32, 4, 4]);
    assert!(!g.group_t().is_abelian());
}

#[test]
fn moufang_certificates_for_small_spaces() {
    for name in ["h34", "q5plus3"] {
        let c = certify_moufang(&presets::lambda(name).unwrap(), DEFAULT_VECTOR_CAP).unwrap();
        assert!(c.passed, "{name}");
        assert_eq!(c.edge_orbit, c.edges);
        assert_eq!(c.transitivity.len(), 8);
    }
}

#[test]
fn moufang_certificates_for_rank_three_spaces() {
    for name in ["sp63", "h54"] {
        let c = certify_moufang(&presets::lambda(name).unwrap(), DEFAULT_VECTOR_CAP).unwrap();
        assert!(c.passed, "{name}");
        assert!(!c.t_abelian, "{name}");
    }
}

use veldkamp::d3::{verify_d3, D3Groups};
use veldkamp::field::Elem;

#[test]
fn d3_relations_over_gf5() {
    let r = verify_d3(5).unwrap();
    assert!(r.passed);
    // x₄(s, t) is sharp exactly when st ≠ 0
    assert_eq!(r.sharp.len(), 16);
    assert!(r.sharp.iter().all(|&(s, t)| s != 0 && t != 0));
    assert_eq!(r.invariant_subgroup_order, 5);
}

#[test]
fn mu_of_x4_swaps_the_outer_groups() {
    // conjugation by μ(x₄(1,1)) sends x₁(u) to x₃(u)
    let g = D3Groups::new(3).unwrap();
    let k = g.field().clone();
    let mu = g.mu4(Elem::ONE, Elem::ONE);
    for u in k.elements() {
        let c = veldkamp::algebra::Matrix::conjugate(&k, &g.x1(u), &mu).unwrap();
        assert_eq!(c, g.x3(u));
    }
}

#[test]
fn axis_subgroup_misses_sharp_elements() {
    let g = D3Groups::new(5).unwrap();
    for u in 1..5 {
        assert!(g.sharp_witnesses(Elem(u), Elem(0)).is_empty());
        assert!(g.sharp_witnesses(Elem(0), Elem(u)).is_empty());
    }
}

#[test]
fn non_prime_or_even_fields_are_rejected() {
    assert!(verify_d3(2).is_err());
    assert!(verify_d3(4).is_err());
}

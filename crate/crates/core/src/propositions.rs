//! Exhaustive checks of the structural facts about Veldkamp quadrangles
//! and their weeds, run as a suite on one graph.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::quotient::{
    all_weeds, flat_quotient, line_partition, phi, point_partition, require_green_quadrangle,
};
use crate::veldkamp::VeldkampGraph;

/// One proposition checked over every instance in a graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropositionCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Number of instances examined.
    pub checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<u32>>,
}

impl PropositionCheck {
    fn new(name: &'static str, checked: u64, witness: Option<Vec<u32>>) -> Self {
        PropositionCheck {
            name,
            passed: witness.is_none(),
            checked,
            witness,
        }
    }
}

/// First counterexample over `0..n` in index order, searched in parallel, and the instance count.
fn scan(
    n: usize,
    f: impl Fn(usize) -> (u64, Option<Vec<u32>>) + Sync + Send,
) -> (u64, Option<Vec<u32>>) {
    let results: Vec<(u64, Option<Vec<u32>>)> = (0..n).into_par_iter().map(f).collect();
    let count = results.iter().map(|r| r.0).sum();
    (count, results.into_iter().find_map(|r| r.1))
}

/// Opposite `x`, `y` and `z ∈ Γ_y`: exactly one root from `x` to `y` through `z`.
pub fn unique_roots(g: &VeldkampGraph) -> PropositionCheck {
    let (count, w) = scan(g.n(), |s| {
        let mut per_end: std::collections::HashMap<(u32, u32), u32> = Default::default();
        for r in g.roots_from(s) {
            *per_end.entry((r[4], r[3])).or_default() += 1;
        }
        let mut checked = 0;
        for t in g.op_vertices(s) {
            for &z in g.neighbors(t as usize) {
                checked += 1;
                let k = per_end.get(&(t, z)).copied().unwrap_or(0);
                if k != 1 {
                    return (checked, Some(vec![s as u32, z, t]));
                }
            }
        }
        (checked, None)
    });
    PropositionCheck::new(
        "unique root through each neighbour of an opposite end",
        count,
        w,
    )
}

/// Vertices at even distance have a common opposite.
pub fn common_opposites(g: &VeldkampGraph) -> PropositionCheck {
    let (count, w) = scan(g.n(), |u| {
        let mut checked = 0;
        for v in u..g.n() {
            if g.dist(u, v).is_some_and(|d| d % 2 == 0) {
                checked += 1;
                if g.op_set(u).is_disjoint(g.op_set(v)) {
                    return (checked, Some(vec![u as u32, v as u32]));
                }
            }
        }
        (checked, None)
    });
    PropositionCheck::new("vertices at even distance share an opposite", count, w)
}

/// Two roots with the same ends start opposite iff they finish opposite.
pub fn root_end_opposition(g: &VeldkampGraph) -> PropositionCheck {
    let (count, w) = scan(g.n(), |s| {
        let mut roots = g.roots_from(s);
        roots.sort_by_key(|r| r[4]);
        let mut checked = 0;
        for group in roots.chunk_by(|a, b| a[4] == b[4]) {
            let t = group[0][4] as usize;
            for (i, r) in group.iter().enumerate() {
                for q in &group[i + 1..] {
                    checked += 1;
                    let start = r[1] != q[1] && g.opposite(s, r[1] as usize, q[1] as usize);
                    let end = r[3] != q[3] && g.opposite(t, r[3] as usize, q[3] as usize);
                    if start != end {
                        return (
                            checked,
                            r.iter().chain(q).copied().collect::<Vec<_>>().into(),
                        );
                    }
                }
            }
        }
        (checked, None)
    });
    PropositionCheck::new(
        "roots with common ends start opposite iff they end opposite",
        count,
        w,
    )
}

/// Every straight path extends by one edge: each vertex has a neighbour,
/// and each incoming edge has an opposite outgoing one.
pub fn straight_extension(g: &VeldkampGraph) -> PropositionCheck {
    let (count, w) = scan(g.n(), |v| {
        if g.degree(v) == 0 {
            return (1, Some(vec![v as u32]));
        }
        let nb = g.neighbors(v);
        for (i, &u) in nb.iter().enumerate() {
            if !nb
                .iter()
                .enumerate()
                .any(|(j, _)| j != i && g.opposite_at(v, i, j))
            {
                return (i as u64 + 1, Some(vec![u, v as u32]));
            }
        }
        (nb.len() as u64, None)
    });
    PropositionCheck::new("every straight path extends by one edge", count, w)
}

/// A trivial relation at `v` forces trivial relations at even distance from `v`.
pub fn trivial_relations_spread(g: &VeldkampGraph) -> PropositionCheck {
    let (count, w) = scan(g.n(), |v| {
        if !g.is_trivial_at(v) {
            return (0, None);
        }
        let mut checked = 0;
        for u in 0..g.n() {
            if g.dist(v, u).is_some_and(|d| d % 2 == 0) {
                checked += 1;
                if !g.is_trivial_at(u) {
                    return (checked, Some(vec![v as u32, u as u32]));
                }
            }
        }
        (checked, None)
    });
    PropositionCheck::new("trivial opposition spreads to even distance", count, w)
}

pub fn no_four_circuits(g: &VeldkampGraph) -> PropositionCheck {
    // a 4-circuit is two vertices with two common neighbours
    let (count, w) = scan(g.n(), |v| {
        let mut seen = HashSet::new();
        for &u in g.neighbors(v) {
            for &w in g.neighbors(u as usize) {
                if w as usize > v && !seen.insert(w) {
                    return (1, Some(vec![v as u32, w]));
                }
            }
        }
        (1, None)
    });
    PropositionCheck::new("no circuits of length 4", count, w)
}

/// No 6-circuit passes through a straight 2-path centred at a point.
pub fn no_straight_hexagon_corner(g: &VeldkampGraph) -> PropositionCheck {
    let points = g.points();
    let (count, w) = scan(points.len(), |i| {
        let a = points[i] as usize;
        let mut checked = 0;
        for (x, y) in g.opposite_pairs(a) {
            checked += 1;
            for &b in g.neighbors(x as usize) {
                for &c in g.neighbors(y as usize) {
                    if b as usize != a
                        && c as usize != a
                        && b != c
                        && g.dist(b as usize, c as usize) == Some(2)
                    {
                        return (checked, Some(vec![x, a as u32, y, b, c]));
                    }
                }
            }
        }
        (checked, None)
    });
    PropositionCheck::new(
        "no 6-circuit through a straight point-centred 2-path",
        count,
        w,
    )
}

pub fn opposite_points_at_distance_four(g: &VeldkampGraph) -> PropositionCheck {
    let points = g.points();
    let (count, w) = scan(points.len(), |i| {
        let a = points[i] as usize;
        let ops = g.op_vertices(a);
        let bad = ops.iter().find(|&&b| g.dist(a, b as usize) != Some(4));
        (ops.len() as u64, bad.map(|&b| vec![a as u32, b]))
    });
    PropositionCheck::new("opposite points are at distance 4", count, w)
}

pub fn diameter_four(g: &VeldkampGraph) -> PropositionCheck {
    let d = g.diameter();
    PropositionCheck::new(
        "the diameter is 4",
        1,
        (d != Some(4)).then(|| vec![d.map_or(u32::MAX, |d| d as u32)]),
    )
}

fn second_neighbourhood(g: &VeldkampGraph, a: usize) -> fixedbitset::FixedBitSet {
    g.sphere(a, 2)
}

/// Points at distance 4 that are not opposite share op-sets and second neighbourhoods.
pub fn far_non_opposite_points(g: &VeldkampGraph) -> PropositionCheck {
    let points = g.points();
    let (count, w) = scan(points.len(), |i| {
        let a = points[i] as usize;
        let mut checked = 0;
        for &b in &points[i + 1..] {
            let b = b as usize;
            if g.dist(a, b) == Some(4) && !g.is_opposite(a, b) {
                checked += 1;
                if g.op_set(a) != g.op_set(b)
                    || second_neighbourhood(g, a) != second_neighbourhood(g, b)
                {
                    return (checked, Some(vec![a as u32, b as u32]));
                }
            }
        }
        (checked, None)
    });
    PropositionCheck::new(
        "far non-opposite points share op-sets and second neighbourhoods",
        count,
        w,
    )
}

/// On a flat graph, points are opposite iff they are at distance 4.
pub fn flat_opposition_is_distance(g: &VeldkampGraph) -> PropositionCheck {
    let points = g.points();
    let (count, w) = scan(points.len(), |i| {
        let a = points[i] as usize;
        let bad = points
            .iter()
            .find(|&&b| g.is_opposite(a, b as usize) != (g.dist(a, b as usize) == Some(4)));
        (points.len() as u64, bad.map(|&b| vec![a as u32, b]))
    });
    PropositionCheck::new(
        "on a flat graph, opposite points are exactly those at distance 4",
        count,
        w,
    )
}

/// Runs every applicable check. The graph must be a green Veldkamp
/// quadrangle as far as the straight-path axioms go; the flat-only check
/// runs only on flat graphs.
pub fn run_suite(g: &VeldkampGraph) -> Result<Vec<PropositionCheck>> {
    require_green_quadrangle(g)?;
    let mut out = vec![
        unique_roots(g),
        common_opposites(g),
        root_end_opposition(g),
        straight_extension(g),
        trivial_relations_spread(g),
        no_four_circuits(g),
        no_straight_hexagon_corner(g),
        opposite_points_at_distance_four(g),
        diameter_four(g),
        far_non_opposite_points(g),
    ];
    let flat = g.is_flat();
    if flat {
        out.push(flat_opposition_is_distance(g));
    }
    out.extend(weed_checks(g, flat)?);
    Ok(out)
}

fn partition_check(
    name: &'static str,
    r: Result<crate::quotient::Partition>,
    n: usize,
) -> (PropositionCheck, Option<crate::quotient::Partition>) {
    match r {
        Ok(p) => (PropositionCheck::new(name, n as u64, None), Some(p)),
        Err(crate::Error::TheoremViolation { witness, .. }) => (
            PropositionCheck::new(
                name,
                n as u64,
                Some(witness.into_iter().map(|v| v as u32).collect()),
            ),
            None,
        ),
        Err(_) => (PropositionCheck::new(name, n as u64, Some(vec![])), None),
    }
}

fn weed_checks(g: &VeldkampGraph, flat: bool) -> Result<Vec<PropositionCheck>> {
    let weeds = all_weeds(g);
    let mut out = Vec::new();

    out.push(PropositionCheck::new(
        "flat iff there are no weeds",
        1,
        (flat != weeds.is_empty()).then(|| weeds.first().map(|w| w.to_vec()).unwrap_or_default()),
    ));

    let (c, points) = partition_check(
        "points are joined by a weed iff their op-sets agree",
        point_partition(g, &weeds),
        g.points().len(),
    );
    out.push(c);
    let (c, lines) = partition_check(
        "lines are chained by weeds iff their op-sets agree",
        line_partition(g, &weeds),
        g.lines().len(),
    );
    out.push(c);

    if let Some(points) = &points {
        let mut checked = 0;
        let mut bad = None;
        for class in &points.classes {
            let s2 = second_neighbourhood(g, class[0] as usize);
            for &b in &class[1..] {
                checked += 1;
                if bad.is_none() && second_neighbourhood(g, b as usize) != s2 {
                    bad = Some(vec![class[0], b]);
                }
            }
        }
        out.push(PropositionCheck::new(
            "weed-joined points share second neighbourhoods",
            checked,
            bad,
        ));
    }

    // lines in a common weed, as unordered pairs
    let related: HashSet<(u32, u32)> = weeds
        .iter()
        .map(|w| (w[1].min(w[3]), w[1].max(w[3])))
        .collect();
    let related_fn = |x: u32, y: u32| related.contains(&(x.min(y), x.max(y)));

    // x opposite y at a and y ∼ z force x opposite z at a
    let (count, w) = scan(weeds.len(), |i| {
        let [_, y, a, z, _] = weeds[i];
        let mut checked = 0;
        for &x in g.neighbors(a as usize) {
            for (y, z) in [(y, z), (z, y)] {
                if x != y && x != z && g.opposite(a as usize, x as usize, y as usize) {
                    checked += 1;
                    if !g.opposite(a as usize, x as usize, z as usize) {
                        return (checked, Some(vec![a, x, y, z]));
                    }
                }
            }
        }
        (checked, None)
    });
    out.push(PropositionCheck::new(
        "opposition at a point is stable under weed-related lines",
        count,
        w,
    ));

    if let Some(lines) = &lines {
        let mut class_of = vec![u32::MAX; g.n()];
        for (k, c) in lines.classes.iter().enumerate() {
            for &x in c {
                class_of[x as usize] = k as u32;
            }
        }
        let points_list = g.points();
        let (count, w) = scan(points_list.len(), |i| {
            let a = points_list[i];
            let nb = g.neighbors(a as usize);
            let mut checked = 0;
            for (j, &x) in nb.iter().enumerate() {
                for &y in &nb[j + 1..] {
                    checked += 1;
                    if related_fn(x, y) != (class_of[x as usize] == class_of[y as usize]) {
                        return (checked, Some(vec![a, x, y]));
                    }
                }
            }
            (checked, None)
        });
        out.push(PropositionCheck::new(
            "through a point, weed-related lines are exactly the equivalent ones",
            count,
            w,
        ));
    }

    // the weed maps between related lines are mutually inverse bijections
    let mut pairs: Vec<(u32, u32)> = related.iter().copied().collect();
    pairs.sort_unstable();
    let (count, w) = scan(pairs.len(), |i| {
        let (x, y) = pairs[i];
        let forward = phi(g, x as usize, y as usize);
        let back = phi(g, y as usize, x as usize);
        let ok = match (forward, back) {
            (Ok(f), Ok(b)) => {
                let inv: std::collections::HashMap<u32, u32> = b.into_iter().collect();
                let images: HashSet<u32> = f.iter().map(|&(_, c)| c).collect();
                images.len() == g.degree(y as usize)
                    && f.iter().all(|&(a, c)| inv.get(&c) == Some(&a))
            }
            _ => false,
        };
        (1, (!ok).then(|| vec![x, y]))
    });
    out.push(PropositionCheck::new(
        "weed maps between related lines are inverse bijections",
        count,
        w,
    ));

    let q = flat_quotient(g);
    let w = match &q {
        Ok(q) => {
            let injective = g.points().iter().all(|&a| {
                let imgs: HashSet<u32> = g
                    .neighbors(a as usize)
                    .iter()
                    .map(|&x| q.pi[x as usize])
                    .collect();
                imgs.len() == g.degree(a as usize)
            });
            (injective != flat).then(Vec::new)
        }
        Err(_) => Some(vec![]),
    };
    out.push(PropositionCheck::new(
        "the projection is injective on every point star iff flat",
        1,
        w,
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::veldkamp::tests::gq22;

    #[test]
    fn suite_passes_on_a_generalized_quadrangle() {
        let g = gq22();
        let checks = run_suite(&g).unwrap();
        for c in &checks {
            assert!(c.passed, "{c:?}");
        }
        assert!(checks.iter().any(|c| c.name.contains("flat graph")));
    }
}

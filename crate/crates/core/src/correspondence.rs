//! Polar spaces ↔ flat green Veldkamp quadrangles, the cone over a point,
//! and isomorphism search for small graphs.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polar::LineSpace;
use crate::quotient::{flat_quotient, QuotientResult};
use crate::veldkamp::{LocalOpposition, VeldkampGraph};

/// A vertex bijection `g1 → g2` (`map[v]` is the image of `v`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IsoWitness {
    pub map: Vec<u32>,
}

/// The incidence graph of `s` (points `0..n`, then lines) with the polar
/// opposition: two lines through a point are opposite there iff they do not
/// span a singular plane; lines carry the trivial relation.
///
/// Requires a thick non-degenerate polar space with at least one line.
pub fn polar_to_veldkamp(s: &LineSpace) -> Result<VeldkampGraph> {
    if s.num_lines() == 0 {
        return Err(Error::precondition("the polar space has no lines"));
    }
    if !s.is_thick() {
        return Err(Error::precondition("the polar space is not thick"));
    }
    if let Some((a, x)) = s.one_or_all_violation() {
        return Err(Error::precondition(format!(
            "point {a} sees neither one nor all points of line {x}"
        )));
    }
    if !s.is_nondegenerate() {
        return Err(Error::precondition("the polar space is degenerate"));
    }
    Ok(build_incidence(s, true))
}

/// The incidence graph of any line space, with trivial opposition everywhere.
pub fn incidence_graph(s: &LineSpace) -> VeldkampGraph {
    build_incidence(s, false)
}

fn build_incidence(s: &LineSpace, polar: bool) -> VeldkampGraph {
    let np = s.num_points();
    let n = np + s.num_lines();
    let mut adj = vec![Vec::new(); n];
    for (x, line) in s.lines().iter().enumerate() {
        for &a in line {
            adj[a as usize].push((np + x) as u32);
            adj[np + x].push(a);
        }
    }
    let opp = (0..n)
        .map(|v| {
            if v >= np || !polar {
                return LocalOpposition::Trivial;
            }
            let through = s.lines_through(v);
            let mut pairs = Vec::new();
            for (i, &x) in through.iter().enumerate() {
                for &y in &through[i + 1..] {
                    // ⟨x ∪ y⟩ is singular iff every point of x sees every point of y
                    let ly = s.line(y as usize);
                    let singular = s
                        .line(x as usize)
                        .iter()
                        .all(|&b| ly.iter().all(|&c| s.collinear(b as usize, c as usize)));
                    if !singular {
                        pairs.push(((np as u32) + x, (np as u32) + y));
                    }
                }
            }
            LocalOpposition::Pairs(pairs)
        })
        .collect();
    VeldkampGraph::new((0..n).map(|v| v >= np).collect(), adj, opp)
        .expect("incidence graph is well formed")
}

/// The line space on the points of `g` whose lines are the neighbourhoods of
/// line vertices. Points are renumbered by their index among the points.
///
/// Requires `g` flat and green; the result is checked to be a thick
/// non-degenerate polar space with at least one line.
pub fn veldkamp_to_polar(g: &VeldkampGraph) -> Result<LineSpace> {
    if !g.is_green() {
        return Err(Error::precondition("graph is not green"));
    }
    if let Some((u, v)) = g.flatness_witness() {
        return Err(Error::precondition(format!(
            "graph is not flat: {u} and {v} share op-sets"
        )));
    }
    let lines = g
        .lines()
        .iter()
        .map(|&x| {
            g.neighbors(x as usize)
                .iter()
                .map(|&a| g.class_index(a as usize) as u32)
                .collect()
        })
        .collect();
    let s = LineSpace::new(g.points().len(), lines)?;
    if s.num_lines() == 0 || !s.is_thick() || !s.check_one_or_all() || !s.is_nondegenerate() {
        return Err(Error::violation(
            "a flat green Veldkamp quadrangle yields a thick non-degenerate polar space",
            "result fails thickness, the one-or-all axiom or non-degeneracy",
            vec![],
        ));
    }
    Ok(s)
}

fn sorted_lines(s: &LineSpace) -> Vec<Vec<u32>> {
    let mut lines = s.lines().to_vec();
    lines.sort();
    lines
}

/// Going to the graph and back returns the same line space, and going back
/// to the graph again returns the same graph.
pub fn roundtrip_check(s: &LineSpace) -> Result<bool> {
    let g = polar_to_veldkamp(s)?;
    let back = veldkamp_to_polar(&g)?;
    if back.num_points() != s.num_points() || sorted_lines(&back) != sorted_lines(s) {
        return Err(Error::violation(
            "the two constructions are mutually inverse",
            "line space changed after the round trip",
            vec![],
        ));
    }
    let again = polar_to_veldkamp(&back)?;
    if again != g {
        return Err(Error::violation(
            "the two constructions are mutually inverse",
            "graph changed after the round trip",
            vec![],
        ));
    }
    Ok(true)
}

/// The cone at `d`: the subgraph of `Γ_S` spanned by the points of
/// `d^⊥ ∖ {d}` and the lines inside that set.
#[derive(Clone, Debug)]
pub struct Cone {
    pub graph: VeldkampGraph,
    /// Apex, as a point of `S`.
    pub apex: usize,
    /// `vertices[v]`: the vertex of `Γ_S` behind cone vertex `v`.
    pub vertices: Vec<u32>,
}

/// Requires `S` thick, non-degenerate and of rank at least 3.
pub fn cone(s: &LineSpace, d: usize) -> Result<Cone> {
    if d >= s.num_points() {
        return Err(Error::invalid(format!("no point {d}")));
    }
    let gamma = polar_to_veldkamp(s)?;
    let rank = s.rank()?;
    if rank < 3 {
        return Err(Error::precondition(format!("rank {rank} < 3")));
    }
    Ok(cone_in(s, &gamma, d))
}

/// [`cone`] for a caller that already holds `Γ_S` and knows the rank is at least 3.
pub fn cone_in(s: &LineSpace, gamma: &VeldkampGraph, d: usize) -> Cone {
    let np = s.num_points();
    let mut p1 = s.perp(d).clone();
    p1.set(d, false);
    let mut keep = FixedBitSet::with_capacity(gamma.n());
    keep.union_with(&p1);
    keep.grow(gamma.n());
    for (x, line) in s.lines().iter().enumerate() {
        if line.iter().all(|&a| p1.contains(a as usize)) {
            keep.insert(np + x);
        }
    }
    let (graph, vertices) = gamma.induced(&keep);
    Cone {
        graph,
        apex: d,
        vertices,
    }
}

/// Two cone points have equal op-sets iff they are collinear with the apex.
/// Returns the first pair where this fails.
pub fn cone_op_law_violation(s: &LineSpace, c: &Cone) -> Option<(u32, u32)> {
    let g = &c.graph;
    let pts = g.points();
    for (i, &a) in pts.iter().enumerate() {
        for &b in &pts[i..] {
            let (sa, sb) = (
                c.vertices[a as usize] as usize,
                c.vertices[b as usize] as usize,
            );
            let equal = g.op_set(a as usize) == g.op_set(b as usize);
            let on_line = sa == sb
                || s.line_through(sa, sb)
                    .is_some_and(|x| s.line(x).binary_search(&(c.apex as u32)).is_ok());
            if equal != on_line {
                return Some((a, b));
            }
        }
    }
    None
}

/// Outcome of comparing the flat quotient of a cone with `Γ_{S₂}`.
#[derive(Clone, Debug)]
pub struct ConeQuotientReport {
    pub quotient: QuotientResult,
    /// `S₂ = e^⊥ ∩ d^⊥ ∖ {d}` with the lines inside it.
    pub s2: LineSpace,
    /// Points of `S` behind the points of `S₂`.
    pub s2_points: Vec<u32>,
    /// Whether the canonical map `[a] ↦ (line ad) ∩ S₂` is an isomorphism.
    pub canonical_map_ok: bool,
    pub witness: IsoWitness,
}

/// Builds `S₂` for a point `e` opposite `d`, the flat quotient of the cone
/// at `d`, and an isomorphism from the quotient onto `Γ_{S₂}`. The canonical
/// map is tried first; a general search runs only if it fails.
pub fn verify_cone_quotient(s: &LineSpace, c: &Cone, e: usize) -> Result<ConeQuotientReport> {
    let d = c.apex;
    if s.collinear(d, e) {
        return Err(Error::precondition(format!(
            "{e} is collinear with the apex {d}"
        )));
    }
    let mut p2 = s.perp(e).clone();
    p2.intersect_with(s.perp(d));
    let sub = s.induced(&p2);
    let s2 = sub.space;
    if s2.num_lines() == 0 || !s2.is_thick() || !s2.check_one_or_all() || !s2.is_nondegenerate() {
        return Err(Error::violation(
            "S₂ is a thick non-degenerate polar space with lines",
            format!("{} points, {} lines", s2.num_points(), s2.num_lines()),
            vec![d, e],
        ));
    }
    let quotient = flat_quotient(&c.graph)?;
    let target = polar_to_veldkamp(&s2)?;

    let canonical = canonical_cone_map(s, c, &quotient, &sub.points, &s2);
    let (ok, witness) = match canonical {
        Some(w) if is_isomorphism(&quotient.graph, &target, &w.map) => (true, w),
        _ => (
            false,
            graph_isomorphic(&quotient.graph, &target).ok_or_else(|| {
                Error::violation(
                    "the flat quotient of the cone is isomorphic to Γ of S₂",
                    "no isomorphism found",
                    vec![d, e],
                )
            })?,
        ),
    };
    Ok(ConeQuotientReport {
        quotient,
        s2,
        s2_points: sub.points,
        canonical_map_ok: ok,
        witness,
    })
}

/// `[a] ↦ ` the point of `S₂` on the line `ad`; `[x] ↦ ` the line of `S₂`
/// through the images of the points of `x`.
fn canonical_cone_map(
    s: &LineSpace,
    c: &Cone,
    q: &QuotientResult,
    s2_points: &[u32],
    s2: &LineSpace,
) -> Option<IsoWitness> {
    let np2 = s2.num_points();
    let local: HashMap<u32, u32> = s2_points
        .iter()
        .enumerate()
        .map(|(i, &a)| (a, i as u32))
        .collect();
    let image_of_point = |cone_v: usize| -> Option<u32> {
        let a = c.vertices[cone_v] as usize;
        let x = s.line_through(a, c.apex)?;
        let hits: Vec<u32> = s
            .line(x)
            .iter()
            .filter_map(|b| local.get(b).copied())
            .collect();
        (hits.len() == 1).then(|| hits[0])
    };
    let mut map = vec![u32::MAX; q.graph.n()];
    for v in 0..c.graph.n() {
        let cls = q.pi[v] as usize;
        let img = if c.graph.is_line(v) {
            let pts: Vec<u32> = c
                .graph
                .neighbors(v)
                .iter()
                .map(|&a| image_of_point(a as usize))
                .collect::<Option<_>>()?;
            let x = s2.line_through(pts[0] as usize, *pts.get(1)? as usize)?;
            (np2 + x) as u32
        } else {
            image_of_point(v)?
        };
        if map[cls] != u32::MAX && map[cls] != img {
            return None;
        }
        map[cls] = img;
    }
    map.iter()
        .all(|&x| x != u32::MAX)
        .then_some(IsoWitness { map })
}

/// Whether `map` is a bijection preserving classes, adjacency and local opposition.
pub fn is_isomorphism(g1: &VeldkampGraph, g2: &VeldkampGraph, map: &[u32]) -> bool {
    if g1.n() != g2.n() || map.len() != g1.n() || g1.num_edges() != g2.num_edges() {
        return false;
    }
    let mut seen = FixedBitSet::with_capacity(g2.n());
    for &m in map {
        if m as usize >= g2.n() || seen.put(m as usize) {
            return false;
        }
    }
    (0..g1.n()).all(|v| {
        let fv = map[v] as usize;
        if g1.is_line(v) != g2.is_line(fv) || g1.degree(v) != g2.degree(fv) {
            return false;
        }
        let nb = g1.neighbors(v);
        if !nb
            .iter()
            .all(|&u| g2.adjacent(fv, map[u as usize] as usize))
        {
            return false;
        }
        (0..nb.len()).all(|i| {
            (i + 1..nb.len()).all(|j| {
                g1.opposite_at(v, i, j)
                    == g2.opposite(
                        fv,
                        map[nb[i] as usize] as usize,
                        map[nb[j] as usize] as usize,
                    )
            })
        })
    })
}

/// Colour refinement seeded by (class, degree, opposite-pair count), iterated to a fixpoint.
fn refine(g: &VeldkampGraph) -> Vec<u64> {
    use std::collections::hash_map::DefaultHasher;
    use std::hash::{Hash, Hasher};
    let n = g.n();
    let mut colour: Vec<u64> = (0..n)
        .map(|v| {
            let mut h = DefaultHasher::new();
            (g.is_line(v), g.degree(v), g.opposite_pairs(v).len()).hash(&mut h);
            h.finish()
        })
        .collect();
    let mut classes = 0;
    loop {
        let next: Vec<u64> = (0..n)
            .map(|v| {
                let mut around: Vec<u64> =
                    g.neighbors(v).iter().map(|&u| colour[u as usize]).collect();
                around.sort_unstable();
                let mut h = DefaultHasher::new();
                (colour[v], around).hash(&mut h);
                h.finish()
            })
            .collect();
        let count = {
            let mut c = next.clone();
            c.sort_unstable();
            c.dedup();
            c.len()
        };
        colour = next;
        if count == classes {
            return colour;
        }
        classes = count;
    }
}

/// An isomorphism `g1 → g2` preserving classes, adjacency and local
/// opposition, found by colour refinement and backtracking; `None` if none exists.
pub fn graph_isomorphic(g1: &VeldkampGraph, g2: &VeldkampGraph) -> Option<IsoWitness> {
    let n = g1.n();
    if n != g2.n() || g1.num_edges() != g2.num_edges() || g1.points().len() != g2.points().len() {
        return None;
    }
    if n == 0 {
        return Some(IsoWitness { map: vec![] });
    }
    let (c1, c2) = (refine(g1), refine(g2));
    let (mut s1, mut s2) = (c1.clone(), c2.clone());
    s1.sort_unstable();
    s2.sort_unstable();
    if s1 != s2 {
        return None;
    }
    // breadth-first order so every vertex after the first of its component has a mapped neighbour
    let mut order = Vec::with_capacity(n);
    let mut placed = FixedBitSet::with_capacity(n);
    for root in 0..n {
        if placed.put(root) {
            continue;
        }
        order.push(root);
        let mut head = order.len() - 1;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &u in g1.neighbors(v) {
                if !placed.put(u as usize) {
                    order.push(u as usize);
                }
            }
        }
    }
    let mut by_colour: HashMap<u64, Vec<u32>> = HashMap::new();
    for (v, &c) in c2.iter().enumerate() {
        by_colour.entry(c).or_default().push(v as u32);
    }
    let mut map = vec![u32::MAX; n];
    let mut used = FixedBitSet::with_capacity(n);
    let colours = (c1.as_slice(), c2.as_slice());
    if extend_iso(g1, g2, &order, 0, colours, &by_colour, &mut map, &mut used) {
        Some(IsoWitness { map })
    } else {
        None
    }
}

#[allow(clippy::too_many_arguments)]
fn extend_iso(
    g1: &VeldkampGraph,
    g2: &VeldkampGraph,
    order: &[usize],
    depth: usize,
    (c1, c2): (&[u64], &[u64]),
    by_colour: &HashMap<u64, Vec<u32>>,
    map: &mut Vec<u32>,
    used: &mut FixedBitSet,
) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    let mapped_nb: Vec<u32> = g1
        .neighbors(v)
        .iter()
        .copied()
        .filter(|&u| map[u as usize] != u32::MAX)
        .collect();
    let candidates: Vec<u32> = match mapped_nb.first() {
        Some(&u) => g2
            .neighbors(map[u as usize] as usize)
            .iter()
            .copied()
            .filter(|&w| c1[v] == c2[w as usize])
            .collect(),
        None => by_colour.get(&c1[v]).cloned().unwrap_or_default(),
    };
    for w in candidates {
        let w = w as usize;
        if used.contains(w) || !consistent(g1, g2, map, used, v, w) {
            continue;
        }
        map[v] = w as u32;
        used.insert(w);
        if extend_iso(g1, g2, order, depth + 1, (c1, c2), by_colour, map, used) {
            return true;
        }
        map[v] = u32::MAX;
        used.set(w, false);
    }
    false
}

/// Mapping `v ↦ w` agrees with every already-mapped vertex on adjacency and
/// with every already-mapped 2-path through `v` or centred next to it on opposition.
fn consistent(
    g1: &VeldkampGraph,
    g2: &VeldkampGraph,
    map: &[u32],
    used: &FixedBitSet,
    v: usize,
    w: usize,
) -> bool {
    if g1.degree(v) != g2.degree(w) || g1.is_line(v) != g2.is_line(w) {
        return false;
    }
    let mut mapped_nb = Vec::new();
    for &u in g1.neighbors(v) {
        let fu = map[u as usize];
        if fu != u32::MAX {
            if !g2.adjacent(w, fu as usize) {
                return false;
            }
            mapped_nb.push((u as usize, fu as usize));
        }
    }
    // adjacency must also hold in reverse: mapped neighbours of w come from neighbours of v
    let mapped_count = g2
        .neighbors(w)
        .iter()
        .filter(|&&x| used.contains(x as usize))
        .count();
    if mapped_count != mapped_nb.len() {
        return false;
    }
    // opposition at v among mapped neighbours
    for (i, &(a, fa)) in mapped_nb.iter().enumerate() {
        for &(b, fb) in &mapped_nb[i + 1..] {
            if g1.opposite(v, a, b) != g2.opposite(w, fa, fb) {
                return false;
            }
        }
        // opposition at the mapped neighbour a between v and a's other mapped neighbours
        for &c in g1.neighbors(a) {
            let fc = map[c as usize];
            if c as usize != v
                && fc != u32::MAX
                && g1.opposite(a, v, c as usize) != g2.opposite(fa, w, fc as usize)
            {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::spaces::DEFAULT_VECTOR_CAP;

    fn space(name: &str) -> LineSpace {
        presets::lambda(name)
            .unwrap()
            .enumerate_singular(DEFAULT_VECTOR_CAP)
            .unwrap()
            .line_space()
    }

    #[test]
    fn w3_graph_and_roundtrip() {
        let s = space("w3");
        let g = polar_to_veldkamp(&s).unwrap();
        assert_eq!(g.n(), 80);
        assert!(g.is_generalized_polygon().unwrap());
        assert!(roundtrip_check(&s).unwrap());
    }

    #[test]
    fn grid_graph_is_small_quadrangle() {
        let s = space("grid");
        let g = polar_to_veldkamp(&s).unwrap();
        assert_eq!(g.n(), 24);
        assert!(g.is_generalized_polygon().unwrap());
    }

    #[test]
    fn isomorphism_search() {
        let s = space("w3");
        let g = polar_to_veldkamp(&s).unwrap();
        let w = graph_isomorphic(&g, &g).unwrap();
        assert!(is_isomorphism(&g, &g, &w.map));
        let grid = polar_to_veldkamp(&space("grid")).unwrap();
        assert!(graph_isomorphic(&g, &grid).is_none());
        assert!(is_isomorphism(&g, &g, &(0..80).collect::<Vec<_>>()));
    }

    #[test]
    fn preconditions() {
        let s = space("w3");
        assert!(cone(&s, 0).is_err());
        let empty = LineSpace::new(3, vec![]).unwrap();
        assert!(polar_to_veldkamp(&empty).is_err());
    }
}

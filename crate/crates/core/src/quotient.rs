//! Weeds, the point and line equivalences they generate, and the canonical
//! flat quotient of a green Veldkamp quadrangle.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::union_find::UnionFind;
use crate::veldkamp::{Check, LocalOpposition, VeldkampGraph};

/// A weed `(a, x, b, y, c)`: a non-straight 4-path between points at distance 4.
pub type Weed = [u32; 5];

/// Whether the 2-path `(u, v, w)` is straight.
fn straight2(g: &VeldkampGraph, u: u32, v: u32, w: u32) -> bool {
    u != w && g.opposite(v as usize, u as usize, w as usize)
}

pub(crate) fn require_green_quadrangle(g: &VeldkampGraph) -> Result<()> {
    if !g.is_green() {
        return Err(Error::precondition("graph is not green"));
    }
    let r = g.check_axioms();
    for (name, c) in [
        ("connected and bipartite", &r.connected_bipartite),
        ("unique short straight paths", &r.unique_straight_paths),
        ("straight 5-path closure", &r.straight_closure),
    ] {
        if !c.passed {
            return Err(Error::precondition(format!(
                "axiom '{name}' fails, witness {:?}",
                c.witness.as_deref().unwrap_or(&[])
            )));
        }
    }
    Ok(())
}

fn weeds_from(g: &VeldkampGraph, a: u32) -> Vec<Weed> {
    let mut out = Vec::new();
    for &x in g.neighbors(a as usize) {
        for &b in g.neighbors(x as usize) {
            if b == a {
                continue;
            }
            for &y in g.neighbors(b as usize) {
                if y == x {
                    continue;
                }
                for &c in g.neighbors(y as usize) {
                    if c == b || g.dist(a as usize, c as usize) != Some(4) {
                        continue;
                    }
                    if !(straight2(g, a, x, b) && straight2(g, x, b, y) && straight2(g, b, y, c)) {
                        out.push([a, x, b, y, c]);
                    }
                }
            }
        }
    }
    out
}

/// Every weed of `g`, ordered by first vertex and then lexicographically.
/// Requires a green Veldkamp quadrangle.
pub fn find_weeds(g: &VeldkampGraph) -> Result<Vec<Weed>> {
    require_green_quadrangle(g)?;
    Ok(all_weeds(g))
}

pub(crate) fn all_weeds(g: &VeldkampGraph) -> Vec<Weed> {
    g.points()
        .par_iter()
        .map(|&a| weeds_from(g, a))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Vertex classes of one side of the graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    /// Classes of vertex ids, each sorted, ordered by smallest member.
    pub classes: Vec<Vec<u32>>,
}

impl Partition {
    pub fn is_discrete(&self) -> bool {
        self.classes.iter().all(|c| c.len() == 1)
    }

    /// Sorted class sizes with multiplicities, e.g. `{3: 13}`.
    pub fn histogram(&self) -> std::collections::BTreeMap<usize, usize> {
        let mut h = std::collections::BTreeMap::new();
        for c in &self.classes {
            *h.entry(c.len()).or_insert(0) += 1;
        }
        h
    }
}

/// Classes of `members` under the pairs, numbered by smallest member.
fn close(g: &VeldkampGraph, members: &[u32], pairs: impl Iterator<Item = (u32, u32)>) -> Partition {
    let mut uf = UnionFind::new(members.len());
    for (u, v) in pairs {
        uf.union(g.class_index(u as usize), g.class_index(v as usize));
    }
    Partition {
        classes: uf
            .classes()
            .into_iter()
            .map(|c| c.into_iter().map(|i| members[i as usize]).collect())
            .collect(),
    }
}

/// The partition of `members` by equal op-sets, in the same normal form.
fn op_partition(g: &VeldkampGraph, members: &[u32]) -> Partition {
    let mut by_set: std::collections::HashMap<&FixedBitSet, usize> = Default::default();
    let mut classes: Vec<Vec<u32>> = Vec::new();
    for &v in members {
        let slot = *by_set.entry(g.op_set(v as usize)).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[slot].push(v);
    }
    Partition { classes }
}

fn compare_partitions(claim: &str, weeds: &Partition, ops: &Partition) -> Result<()> {
    if weeds == ops {
        return Ok(());
    }
    // smallest element whose two classes differ
    let find = |p: &Partition, v: u32| {
        p.classes
            .iter()
            .find(|c| c.contains(&v))
            .cloned()
            .unwrap_or_default()
    };
    for c in &weeds.classes {
        for &v in c {
            let other = find(ops, v);
            if &other != c {
                let w = c
                    .iter()
                    .chain(&other)
                    .copied()
                    .find(|u| !(c.contains(u) && other.contains(u)));
                return Err(Error::violation(
                    claim,
                    format!("class of {v}: {c:?} from weeds vs {other:?} from op-sets"),
                    vec![v as usize, w.unwrap_or(v) as usize],
                ));
            }
        }
    }
    unreachable!("partitions differ but every class agrees")
}

pub(crate) fn point_partition(g: &VeldkampGraph, weeds: &[Weed]) -> Result<Partition> {
    let p = close(g, g.points(), weeds.iter().map(|w| (w[0], w[4])));
    compare_partitions(
        "points are joined by a weed iff they have the same op-set",
        &p,
        &op_partition(g, g.points()),
    )?;
    Ok(p)
}

pub(crate) fn line_partition(g: &VeldkampGraph, weeds: &[Weed]) -> Result<Partition> {
    let p = close(g, g.lines(), weeds.iter().map(|w| (w[1], w[3])));
    compare_partitions(
        "lines are linked by a chain of weeds iff they have the same op-set",
        &p,
        &op_partition(g, g.lines()),
    )?;
    Ok(p)
}

/// Points modulo "equal or joined by a weed", checked against equal op-sets.
pub fn point_classes(g: &VeldkampGraph) -> Result<Partition> {
    point_partition(g, &find_weeds(g)?)
}

/// Lines modulo the closure of "in a common weed", checked against equal op-sets.
pub fn line_classes(g: &VeldkampGraph) -> Result<Partition> {
    line_partition(g, &find_weeds(g)?)
}

/// The map `Γ_x → Γ_y` fixing `b = x ∧ y` and sending `a ≠ b` to the unique
/// `c` with `(a, x, b, y, c)` a weed, as pairs `(a, c)` sorted by `a`.
/// Requires a green quadrangle and lines `x`, `y` lying in a common weed (or `x = y`).
pub fn phi(g: &VeldkampGraph, x: usize, y: usize) -> Result<Vec<(u32, u32)>> {
    if x >= g.n() || y >= g.n() || !g.is_line(x) || !g.is_line(y) {
        return Err(Error::invalid(format!("{x} and {y} must both be lines")));
    }
    if x == y {
        return Ok(g.neighbors(x).iter().map(|&a| (a, a)).collect());
    }
    require_green_quadrangle(g)?;
    let b = g
        .neighbors(x)
        .iter()
        .copied()
        .find(|&b| g.adjacent(b as usize, y))
        .ok_or_else(|| Error::precondition(format!("lines {x} and {y} share no point")))?;
    let (x32, y32) = (x as u32, y as u32);
    let ends: Vec<(u32, Vec<u32>)> = g
        .neighbors(x)
        .iter()
        .map(|&a| {
            if a == b {
                return (a, vec![b]);
            }
            let cs = g
                .neighbors(y)
                .iter()
                .copied()
                .filter(|&c| {
                    c != b
                        && g.dist(a as usize, c as usize) == Some(4)
                        && !(straight2(g, a, x32, b)
                            && straight2(g, x32, b, y32)
                            && straight2(g, b, y32, c))
                })
                .collect();
            (a, cs)
        })
        .collect();
    if ends.iter().all(|(a, cs)| *a == b || cs.is_empty()) {
        return Err(Error::precondition(format!(
            "lines {x} and {y} lie in no common weed"
        )));
    }
    let mut out = Vec::with_capacity(ends.len());
    for (a, cs) in ends {
        if cs.len() != 1 {
            return Err(Error::violation(
                "lines in a common weed induce a unique weed map",
                format!("{} weed ends for {a}", cs.len()),
                vec![a as usize, x, b as usize, y],
            ));
        }
        out.push((a, cs[0]));
    }
    Ok(out)
}

/// The flat quotient `Γ̄` with its projection.
#[derive(Clone, Debug)]
pub struct QuotientResult {
    pub graph: VeldkampGraph,
    /// `pi[v]`: the quotient vertex of `v`.
    pub pi: Vec<u32>,
    pub point_classes: Partition,
    pub line_classes: Partition,
    pub weed_count: usize,
}

#[derive(Serialize)]
struct QuotientJson<'a> {
    pi: &'a [u32],
    point_classes: &'a [Vec<u32>],
    line_classes: &'a [Vec<u32>],
    weeds: usize,
}

impl QuotientResult {
    /// The class maps and projection as JSON (the quotient graph is exported separately).
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&QuotientJson {
            pi: &self.pi,
            point_classes: &self.point_classes.classes,
            line_classes: &self.line_classes.classes,
            weeds: self.weed_count,
        })?)
    }

    /// Members of the class behind quotient vertex `q`.
    pub fn preimage(&self, q: usize) -> Vec<u32> {
        (0..self.pi.len() as u32)
            .filter(|&v| self.pi[v as usize] as usize == q)
            .collect()
    }
}

/// Builds `Γ̄` from the weed classes and checks that it is a flat green
/// Veldkamp quadrangle and that `π` lifts paths and preserves straightness
/// in both directions. Requires a green quadrangle; plumpness of the
/// quotient is checked only to the extent the input has it.
pub fn flat_quotient(g: &VeldkampGraph) -> Result<QuotientResult> {
    require_green_quadrangle(g)?;
    let weeds = all_weeds(g);
    let points = point_partition(g, &weeds)?;
    let lines = line_partition(g, &weeds)?;

    // quotient vertices are numbered by their smallest member
    let mut classes: Vec<&Vec<u32>> = points.classes.iter().chain(&lines.classes).collect();
    classes.sort_by_key(|c| c[0]);
    let mut pi = vec![u32::MAX; g.n()];
    for (q, c) in classes.iter().enumerate() {
        for &v in c.iter() {
            pi[v as usize] = q as u32;
        }
    }
    let m = classes.len();
    let mut adj: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); m];
    for v in 0..g.n() {
        for &u in g.neighbors(v) {
            adj[pi[v] as usize].insert(pi[u as usize]);
        }
    }
    let is_line: Vec<bool> = classes.iter().map(|c| g.is_line(c[0] as usize)).collect();
    let opp: Vec<LocalOpposition> = (0..m)
        .map(|q| {
            if is_line[q] {
                return LocalOpposition::Trivial;
            }
            let nb: Vec<u32> = adj[q].iter().copied().collect();
            let mut pairs = Vec::new();
            for (i, &cx) in nb.iter().enumerate() {
                for &cy in &nb[i + 1..] {
                    // some b in [a] with every line of Γ_b ∩ [x] opposite every line of Γ_b ∩ [y]
                    let holds = classes[q].iter().any(|&b| {
                        let gb = g.neighbors(b as usize);
                        gb.iter().filter(|&&x| pi[x as usize] == cx).all(|&x| {
                            gb.iter()
                                .filter(|&&y| pi[y as usize] == cy)
                                .all(|&y| g.opposite(b as usize, x as usize, y as usize))
                        })
                    });
                    if holds {
                        pairs.push((cx, cy));
                    }
                }
            }
            LocalOpposition::Pairs(pairs)
        })
        .collect();
    let graph = VeldkampGraph::new(
        is_line,
        adj.into_iter().map(|s| s.into_iter().collect()).collect(),
        opp,
    )
    .map_err(|e| Error::violation("the quotient is a well-formed graph", e.to_string(), vec![]))?;

    let result = QuotientResult {
        graph,
        pi,
        point_classes: points,
        line_classes: lines,
        weed_count: weeds.len(),
    };
    postcheck(g, &result)?;
    Ok(result)
}

fn fail(claim: &str, detail: String, witness: &[u32]) -> Error {
    Error::violation(claim, detail, witness.iter().map(|&v| v as usize).collect())
}

fn postcheck(g: &VeldkampGraph, q: &QuotientResult) -> Result<()> {
    let h = &q.graph;
    let pi = &q.pi;

    // every vertex's neighbourhood maps onto the neighbourhood of its image; on lines bijectively
    for v in 0..g.n() {
        let image: BTreeSet<u32> = g.neighbors(v).iter().map(|&u| pi[u as usize]).collect();
        let target: BTreeSet<u32> = h.neighbors(pi[v] as usize).iter().copied().collect();
        if image != target {
            return Err(fail(
                "π maps each neighbourhood onto the neighbourhood of the image",
                format!("{image:?} vs {target:?}"),
                &[v as u32],
            ));
        }
        if g.is_line(v) && image.len() != g.degree(v) {
            return Err(fail(
                "π is injective on the points of each line",
                String::new(),
                &[v as u32],
            ));
        }
    }

    // straightness of 2-paths is preserved and reflected
    for v in 0..g.n() {
        let nb = g.neighbors(v);
        for (i, &u) in nb.iter().enumerate() {
            for &w in &nb[i + 1..] {
                let up = straight2(g, u, v as u32, w);
                let (pu, pv, pw) = (pi[u as usize], pi[v], pi[w as usize]);
                let down = pu != pw && h.opposite(pv as usize, pu as usize, pw as usize);
                if up != down {
                    return Err(fail(
                        "a path is straight iff its image is a straight path",
                        format!("straight upstairs: {up}"),
                        &[u, v as u32, w],
                    ));
                }
            }
        }
    }

    // each member of an incident class meets the other class
    for qv in 0..h.n() {
        let members = q.preimage(qv);
        for &qu in h.neighbors(qv) {
            for &b in &members {
                if !g
                    .neighbors(b as usize)
                    .iter()
                    .any(|&x| pi[x as usize] == qu)
                {
                    return Err(fail(
                        "every member of an incident class has a neighbour in the other class",
                        String::new(),
                        &[b, qu],
                    ));
                }
            }
        }
    }

    let input = g.check_axioms();
    let output = h.check_axioms();
    let named = [
        (
            "the quotient is connected and bipartite",
            &output.connected_bipartite,
        ),
        (
            "the quotient has unique short straight paths",
            &output.unique_straight_paths,
        ),
        (
            "the quotient satisfies straight 5-path closure",
            &output.straight_closure,
        ),
    ];
    for (claim, c) in named {
        check_to_result(claim, c)?;
    }
    if input.plump2.passed {
        check_to_result("the quotient of a 2-plump graph is 2-plump", &output.plump2)?;
    }
    if !h.is_green() {
        return Err(fail("the quotient is green", String::new(), &[]));
    }
    if let Some((u, v)) = h.flatness_witness() {
        return Err(fail(
            "the quotient is flat",
            "two vertices share an op-set".into(),
            &[u, v],
        ));
    }
    if g.is_plump(3) && !h.is_plump(3) {
        return Err(fail(
            "the quotient of a 3-plump graph is 3-plump",
            String::new(),
            &h.plump_violation(3).unwrap_or_default(),
        ));
    }
    Ok(())
}

fn check_to_result(claim: &str, c: &Check) -> Result<()> {
    if c.passed {
        Ok(())
    } else {
        Err(fail(
            claim,
            String::new(),
            c.witness.as_deref().unwrap_or(&[]),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::veldkamp::tests::gq22;

    #[test]
    fn flat_graph_is_its_own_quotient() {
        let g = gq22();
        assert!(find_weeds(&g).unwrap().is_empty());
        let q = flat_quotient(&g).unwrap();
        assert_eq!(q.graph, g);
        assert_eq!(q.pi, (0..g.n() as u32).collect::<Vec<_>>());
        assert!(q.point_classes.is_discrete() && q.line_classes.is_discrete());
        let x = g.lines()[0] as usize;
        assert_eq!(phi(&g, x, x).unwrap().len(), 3);
        let y = g
            .neighbors(g.neighbors(x)[0] as usize)
            .iter()
            .find(|&&y| y as usize != x)
            .copied()
            .unwrap();
        assert!(matches!(
            phi(&g, x, y as usize),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn non_green_input_is_rejected() {
        // a line with an explicit relation missing one pair
        let g = gq22();
        let mut opp: Vec<LocalOpposition> = (0..g.n()).map(|_| LocalOpposition::Trivial).collect();
        let x = g.lines()[0] as usize;
        let nb = g.neighbors(x);
        opp[x] = LocalOpposition::Pairs(vec![(nb[0], nb[1])]);
        let h = VeldkampGraph::new(
            (0..g.n()).map(|v| g.is_line(v)).collect(),
            (0..g.n()).map(|v| g.neighbors(v).to_vec()).collect(),
            opp,
        )
        .unwrap();
        assert!(matches!(flat_quotient(&h), Err(Error::Precondition(_))));
    }
}

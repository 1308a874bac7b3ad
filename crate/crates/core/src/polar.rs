//! Line spaces and polar spaces: collinearity, perps, spans, singular
//! subspaces, the one-or-all axiom, non-degeneracy and rank.

use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest rank explored by [`LineSpace::rank`].
pub const MAX_RANK: usize = 5;

/// A set of points with lines given as point sets (every line has ≥ 2 points).
#[derive(Clone, Debug)]
pub struct LineSpace {
    n: usize,
    lines: Vec<Vec<u32>>,
    point_lines: Vec<Vec<u32>>,
    perp: Vec<FixedBitSet>,
}

#[derive(Serialize, Deserialize)]
struct LineSpaceJson {
    points: usize,
    lines: Vec<Vec<u32>>,
}

/// A line space induced on a subset of the points of a larger one.
#[derive(Clone, Debug)]
pub struct InducedSpace {
    pub space: LineSpace,
    /// `points[i]` is the id, in the ambient space, of local point `i`.
    pub points: Vec<u32>,
}

impl PartialEq for LineSpace {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.lines == other.lines
    }
}

impl Eq for LineSpace {}

impl LineSpace {
    /// Points are `0..n`; each line is stored sorted.
    pub fn new(n: usize, lines: Vec<Vec<u32>>) -> Result<Self> {
        let mut lines = lines;
        let mut point_lines = vec![Vec::new(); n];
        let mut perp: Vec<FixedBitSet> = (0..n)
            .map(|a| {
                let mut b = FixedBitSet::with_capacity(n);
                b.insert(a);
                b
            })
            .collect();
        for (i, line) in lines.iter_mut().enumerate() {
            line.sort_unstable();
            if line.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("line {i} repeats a point")));
            }
            if line.len() < 2 {
                return Err(Error::invalid(format!("line {i} has fewer than 2 points")));
            }
            if let Some(&bad) = line.iter().find(|&&a| a as usize >= n) {
                return Err(Error::invalid(format!(
                    "line {i} mentions point {bad} ≥ {n}"
                )));
            }
            for &a in line.iter() {
                point_lines[a as usize].push(i as u32);
                for &b in line.iter() {
                    perp[a as usize].insert(b as usize);
                }
            }
        }
        Ok(LineSpace {
            n,
            lines,
            point_lines,
            perp,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: LineSpaceJson = serde_json::from_str(text)?;
        LineSpace::new(j.points, j.lines)
    }

    /// `{points: n, lines: [[ids]]}`.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&LineSpaceJson {
            points: self.n,
            lines: self.lines.clone(),
        })?)
    }

    pub fn num_points(&self) -> usize {
        self.n
    }

    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn lines(&self) -> &[Vec<u32>] {
        &self.lines
    }

    pub fn line(&self, x: usize) -> &[u32] {
        &self.lines[x]
    }

    pub fn lines_through(&self, a: usize) -> &[u32] {
        &self.point_lines[a]
    }

    /// `a^⊥`: all points collinear with `a`, including `a`.
    pub fn perp(&self, a: usize) -> &FixedBitSet {
        &self.perp[a]
    }

    pub fn collinear(&self, a: usize, b: usize) -> bool {
        self.perp[a].contains(b)
    }

    /// `X^⊥ = ⋂_{a ∈ X} a^⊥` (all points when `X` is empty).
    pub fn perp_of(&self, xs: impl IntoIterator<Item = usize>) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.n);
        out.insert_range(..);
        for a in xs {
            out.intersect_with(&self.perp[a]);
        }
        out
    }

    /// The line containing both points, if any (first one found).
    pub fn line_through(&self, a: usize, b: usize) -> Option<usize> {
        self.point_lines[a]
            .iter()
            .map(|&x| x as usize)
            .find(|&x| self.lines[x].binary_search(&(b as u32)).is_ok())
    }

    pub fn is_thick(&self) -> bool {
        self.lines.iter().all(|l| l.len() >= 3)
    }

    /// A point–line pair where `a` sees more than one but not all points of `x`,
    /// or none at all.
    pub fn one_or_all_violation(&self) -> Option<(usize, usize)> {
        for a in 0..self.n {
            for (x, line) in self.lines.iter().enumerate() {
                let seen = line
                    .iter()
                    .filter(|&&b| self.perp[a].contains(b as usize))
                    .count();
                if seen != 1 && seen != line.len() {
                    return Some((a, x));
                }
            }
        }
        None
    }

    /// Every point is collinear with exactly one or with all points of every line.
    pub fn check_one_or_all(&self) -> bool {
        self.one_or_all_violation().is_none()
    }

    /// No point is collinear with every point.
    pub fn is_nondegenerate(&self) -> bool {
        (0..self.n).all(|a| self.perp[a].count_ones(..) < self.n)
    }

    /// Any two points lie on at most one common line.
    pub fn is_partially_linear(&self) -> bool {
        let mut seen = FixedBitSet::with_capacity(self.n);
        for a in 0..self.n {
            seen.clear();
            for &x in &self.point_lines[a] {
                for &b in &self.lines[x as usize] {
                    let b = b as usize;
                    if b == a {
                        continue;
                    }
                    if seen.contains(b) {
                        return false;
                    }
                    seen.insert(b);
                }
            }
        }
        true
    }

    /// A thick, non-degenerate polar space in which two points share at most one line.
    pub fn is_thick_nondegenerate_polar(&self) -> bool {
        self.is_thick()
            && self.check_one_or_all()
            && self.is_nondegenerate()
            && self.is_partially_linear()
    }

    /// Every line meets `X` in at most one point or lies inside it.
    pub fn is_subspace(&self, xs: &FixedBitSet) -> bool {
        self.lines.iter().all(|l| {
            let inside = l.iter().filter(|&&a| xs.contains(a as usize)).count();
            inside <= 1 || inside == l.len()
        })
    }

    /// The smallest subspace containing `X`: lines meeting the set in two
    /// points are added until nothing changes.
    pub fn span(&self, xs: &FixedBitSet) -> FixedBitSet {
        let mut set = xs.clone();
        set.grow(self.n);
        let mut queue: Vec<usize> = set.ones().collect();
        while let Some(a) = queue.pop() {
            for &x in &self.point_lines[a] {
                let line = &self.lines[x as usize];
                let inside = line.iter().filter(|&&b| set.contains(b as usize)).count();
                if inside >= 2 && inside < line.len() {
                    for &b in line {
                        if !set.put(b as usize) {
                            queue.push(b as usize);
                        }
                    }
                }
            }
        }
        set
    }

    pub fn span_of(&self, pts: impl IntoIterator<Item = usize>) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.n);
        set.extend(pts);
        self.span(&set)
    }

    /// Every two points of `X` are collinear.
    pub fn is_singular(&self, xs: &FixedBitSet) -> bool {
        xs.ones().all(|a| xs.is_subset(&self.perp[a]))
    }

    /// One more than the largest projective dimension of a singular
    /// subspace, found by exhaustive search over chains
    /// `{a} ⊂ ⟨a, b⟩ ⊂ ⟨a, b, c⟩ ⊂ …` of singular spans (capped at [`MAX_RANK`]).
    ///
    /// The result is cross-checked against the characterisations "rank 1 iff
    /// there are no lines" and "rank 2 iff lines are maximal singular".
    pub fn rank(&self) -> Result<usize> {
        if self.n == 0 {
            return Ok(0);
        }
        let mut seen: HashSet<FixedBitSet> = HashSet::new();
        let mut best = 0;
        for a in 0..self.n {
            let start = self.span_of([a]);
            best = best.max(self.chain_depth(start, 1, &mut seen));
            if best >= MAX_RANK {
                break;
            }
        }
        let no_lines = self.lines.is_empty();
        if (best == 1) != no_lines {
            return Err(Error::violation(
                "rank 1 iff there are no lines",
                format!("computed rank {best}, {} lines", self.lines.len()),
                vec![],
            ));
        }
        if !no_lines {
            let lines_maximal = self.lines.iter().all(|l| {
                let lp = self.perp_of(l.iter().map(|&a| a as usize));
                lp.count_ones(..) == l.len()
            });
            if (best == 2) != lines_maximal {
                return Err(Error::violation(
                    "rank 2 iff lines are maximal singular subspaces",
                    format!("computed rank {best}"),
                    vec![],
                ));
            }
        }
        Ok(best)
    }

    fn chain_depth(&self, y: FixedBitSet, depth: usize, seen: &mut HashSet<FixedBitSet>) -> usize {
        if depth >= MAX_RANK || !seen.insert(y.clone()) {
            return depth;
        }
        let mut candidates = self.perp_of(y.ones());
        candidates.difference_with(&y);
        let mut best = depth;
        while let Some(c) = candidates.minimum() {
            let mut next = y.clone();
            next.insert(c);
            let z = self.span(&next);
            // every point of z \ y spans the same z together with y
            candidates.difference_with(&z);
            if !self.is_singular(&z) {
                continue;
            }
            best = best.max(self.chain_depth(z, depth + 1, seen));
            if best >= MAX_RANK {
                break;
            }
        }
        best
    }

    /// A point collinear with neither `a` nor `b`.
    pub fn point_far_from(&self, a: usize, b: usize) -> Result<usize> {
        if !self.is_nondegenerate() {
            return Err(Error::precondition("the space is degenerate"));
        }
        let mut near = self.perp[a].clone();
        near.union_with(&self.perp[b]);
        (0..self.n).find(|&c| !near.contains(c)).ok_or_else(|| {
            Error::violation(
                "some point is collinear with neither of two given points",
                "every point is collinear with one of them",
                vec![a, b],
            )
        })
    }

    /// The line space induced on `pts`: its lines are the lines inside `pts`.
    pub fn induced(&self, pts: &FixedBitSet) -> InducedSpace {
        let points: Vec<u32> = pts.ones().map(|a| a as u32).collect();
        let mut local = vec![u32::MAX; self.n];
        for (i, &a) in points.iter().enumerate() {
            local[a as usize] = i as u32;
        }
        let lines = self
            .lines
            .iter()
            .filter(|l| l.iter().all(|&a| pts.contains(a as usize)))
            .map(|l| l.iter().map(|&a| local[a as usize]).collect())
            .collect();
        InducedSpace {
            space: LineSpace::new(points.len(), lines).expect("induced lines are valid"),
            points,
        }
    }

    /// The space `a^⊥ ∩ b^⊥` for non-collinear `a`, `b`, checked to be a
    /// thick non-degenerate polar space.
    pub fn perp_polar(&self, a: usize, b: usize) -> Result<InducedSpace> {
        if self.collinear(a, b) {
            return Err(Error::precondition(format!(
                "points {a} and {b} are collinear"
            )));
        }
        let mut pts = self.perp[a].clone();
        pts.intersect_with(&self.perp[b]);
        let sub = self.induced(&pts);
        if !sub.space.is_thick() || !sub.space.check_one_or_all() || !sub.space.is_nondegenerate() {
            return Err(Error::violation(
                "the common perp of two non-collinear points is a thick non-degenerate polar space",
                "induced space fails",
                vec![a, b],
            ));
        }
        Ok(sub)
    }

    /// The singular planes (as point sets) containing line `x`.
    pub fn singular_planes_on(&self, x: usize) -> Vec<FixedBitSet> {
        let line: Vec<usize> = self.lines[x].iter().map(|&a| a as usize).collect();
        let mut candidates = self.perp_of(line.iter().copied());
        for &a in &line {
            candidates.set(a, false);
        }
        let mut planes = Vec::new();
        while let Some(c) = candidates.minimum() {
            let plane = self.span_of(line.iter().copied().chain([c]));
            candidates.difference_with(&plane);
            if self.is_singular(&plane) {
                planes.push(plane);
            }
        }
        planes
    }

    /// For line `x`, a line `y` with `x ∩ y^⊥ = ∅` whose common perp with `x`
    /// is a thick non-degenerate polar space meeting every singular plane on
    /// `x` in exactly one point. Returns `None` when no such line exists.
    pub fn far_line(&self, x: usize) -> Option<usize> {
        let xl: Vec<usize> = self.lines[x].iter().map(|&a| a as usize).collect();
        let xperp = self.perp_of(xl.iter().copied());
        let planes = self.singular_planes_on(x);
        (0..self.lines.len()).find(|&y| {
            let yl = self.lines[y].iter().map(|&a| a as usize);
            let yperp = self.perp_of(yl);
            if xl.iter().any(|&a| yperp.contains(a)) {
                return false;
            }
            let mut both = xperp.clone();
            both.intersect_with(&yperp);
            let s2 = self.induced(&both).space;
            s2.is_thick()
                && s2.check_one_or_all()
                && s2.is_nondegenerate()
                && planes.iter().all(|e| e.intersection_count(&both) == 1)
        })
    }

    /// For line `x` and singular planes `E`, `F` on it, a third plane `G` on
    /// `x` such that neither `⟨E ∪ G⟩` nor `⟨F ∪ G⟩` is singular. Returns the
    /// first pair `(E, F)` (as indices into [`Self::singular_planes_on`]) for
    /// which no such `G` exists.
    pub fn plane_separation_failure(&self, x: usize) -> Option<(usize, usize)> {
        let planes = self.singular_planes_on(x);
        // ⟨E ∪ G⟩ is singular iff E ⊆ G^⊥
        let compatible: Vec<Vec<bool>> = planes
            .iter()
            .map(|e| {
                planes
                    .iter()
                    .map(|g| {
                        let gperp = self.perp_of(g.ones());
                        e.is_subset(&gperp)
                    })
                    .collect()
            })
            .collect();
        for e in 0..planes.len() {
            for f in e..planes.len() {
                let ok = (0..planes.len()).any(|g| !compatible[e][g] && !compatible[f][g]);
                if !ok {
                    return Some((e, f));
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The (k+1)×(k+1) grid: points (i, j), lines rows and columns.
    fn grid(k: u32) -> LineSpace {
        let s = k + 1;
        let mut lines = Vec::new();
        for i in 0..s {
            lines.push((0..s).map(|j| i * s + j).collect());
            lines.push((0..s).map(|j| j * s + i).collect());
        }
        LineSpace::new((s * s) as usize, lines).unwrap()
    }

    #[test]
    fn grid_basics() {
        let g = grid(3);
        assert_eq!(g.num_points(), 16);
        assert_eq!(g.num_lines(), 8);
        assert!((0..16).all(|a| g.perp(a).count_ones(..) == 7));
        assert!(g.check_one_or_all());
        assert!(g.is_nondegenerate());
        assert!(g.is_partially_linear());
        assert_eq!(g.rank().unwrap(), 2);
    }

    #[test]
    fn degenerate_and_broken_spaces() {
        let single = LineSpace::new(1, vec![]).unwrap();
        assert_eq!(single.perp(0).ones().collect::<Vec<_>>(), vec![0]);

        let one_line = LineSpace::new(3, vec![vec![0, 1, 2]]).unwrap();
        assert!(!one_line.is_nondegenerate());

        let two_disjoint = LineSpace::new(6, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        assert!(!two_disjoint.check_one_or_all());

        assert!(LineSpace::new(2, vec![vec![0]]).is_err());
        assert!(LineSpace::new(2, vec![vec![0, 5]]).is_err());
    }

    #[test]
    fn spans_in_the_grid() {
        let g = grid(2);
        // one line spans itself
        let row = g.span_of([0, 1]);
        assert_eq!(row.ones().collect::<Vec<_>>(), vec![0, 1, 2]);
        // two non-collinear points span nothing more
        let pair = g.span_of([0, 4]);
        assert_eq!(pair.count_ones(..), 2);
        assert!(!g.is_singular(&pair));
        assert!(g.is_subspace(&pair));
    }

    #[test]
    fn far_points_and_perp_polar() {
        let g = grid(3);
        let far = g.point_far_from(0, 5).unwrap();
        assert!(!g.collinear(far, 0) && !g.collinear(far, 5));
        // in a grid the common perp of two opposite points is two points, no lines
        let sub = g.induced(&{
            let mut p = g.perp(0).clone();
            p.intersect_with(g.perp(5));
            p
        });
        assert_eq!(sub.space.num_points(), 2);
        assert!(g.perp_polar(0, 1).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let g = grid(2);
        let back = LineSpace::from_json(&g.to_json().unwrap()).unwrap();
        assert_eq!(g, back);
    }
}

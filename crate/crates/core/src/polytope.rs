//! The lattice polytope `Ω(G) ⊂ Z^V` and box-window checks of polytope
//! identities.
//!
//! `Ω(G)` is invariant under translation along `(1, ..., 1)` and all its
//! constraints are pairwise differences, so identities between polytopes of
//! graphs on a common vertex set are checked pointwise on a finite cube. The
//! default window radius is `Σ_e |A(e)| + |V|`, taken over every graph in the
//! identity.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::{Edge, Graph, VertexId};

pub use crate::feasibility::feasible;

/// An integer scale index per vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(pub BTreeMap<VertexId, i64>);

impl LatticePoint {
    pub fn get(&self, v: VertexId) -> Option<i64> {
        self.0.get(&v).copied()
    }

    /// Adds `c` to every coordinate.
    pub fn translated(&self, c: i64) -> LatticePoint {
        LatticePoint(self.0.iter().map(|(v, j)| (*v, j + c)).collect())
    }
}

impl FromIterator<(VertexId, i64)> for LatticePoint {
    fn from_iter<I: IntoIterator<Item = (VertexId, i64)>>(iter: I) -> Self {
        LatticePoint(iter.into_iter().collect())
    }
}

/// The cube `{k : |j_v - center_v| <= radius for all v}`; missing center
/// coordinates are zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeBox {
    pub radius: u64,
    #[serde(default)]
    pub center: BTreeMap<VertexId, i64>,
}

impl LatticeBox {
    pub fn centered(radius: u64) -> Self {
        LatticeBox { radius, center: BTreeMap::new() }
    }

    pub fn range(&self, v: VertexId) -> (i64, i64) {
        let c = self.center.get(&v).copied().unwrap_or(0);
        let r = self.radius as i64;
        (c - r, c + r)
    }

    pub fn contains(&self, k: &LatticePoint) -> bool {
        k.0.iter().all(|(v, j)| {
            let (lo, hi) = self.range(*v);
            (lo..=hi).contains(j)
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationLimits {
    /// Largest admissible raw box size `(2R + 1)^|V|`.
    pub max_box_points: u128,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits { max_box_points: 1u128 << 48 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolytopeError {
    KeyMismatch,
    VertexSetMismatch,
    CapExceeded { points: u128, cap: u128 },
}

impl fmt::Display for PolytopeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolytopeError::KeyMismatch => write!(f, "lattice point keys differ from the vertex set"),
            PolytopeError::VertexSetMismatch => write!(f, "graphs are on different vertex sets"),
            PolytopeError::CapExceeded { points, cap } => {
                write!(f, "box has {points} lattice points, above the cap {cap}")
            }
        }
    }
}

/// `Σ_e |A(e)| + |V|`.
pub fn canonical_radius(g: &Graph) -> u64 {
    g.edges().iter().map(|e| e.weight.unsigned_abs()).sum::<u64>() + g.order() as u64
}

/// The zero-centred cube whose radius is the largest canonical radius among
/// `graphs`.
pub fn canonical_box<'a>(graphs: impl IntoIterator<Item = &'a Graph>) -> LatticeBox {
    LatticeBox::centered(graphs.into_iter().map(canonical_radius).max().unwrap_or(0))
}

pub fn member(g: &Graph, k: &LatticePoint) -> Result<bool, PolytopeError> {
    if k.0.len() != g.order() || !g.vertices().iter().all(|v| k.0.contains_key(v)) {
        return Err(PolytopeError::KeyMismatch);
    }
    Ok(g.edges().iter().all(|e| e.holds(k.0[&e.src], k.0[&e.dst])))
}

/// Edges rewritten against positions in a fixed vertex order.
#[derive(Clone, Debug)]
struct Compiled {
    edges: Vec<(usize, usize, i64)>,
}

impl Compiled {
    fn new(g: &Graph, index: &BTreeMap<VertexId, usize>) -> Self {
        Compiled { edges: g.edges().iter().map(|e| (index[&e.src], index[&e.dst], e.weight)).collect() }
    }

    fn holds(&self, pt: &[i64]) -> bool {
        self.edges.iter().all(|&(s, d, a)| pt[s] >= pt[d] + a)
    }
}

/// Lower/upper bound contributions of one edge to a later position.
#[derive(Clone, Copy, Debug)]
enum Bound {
    /// `j_here >= j_other + a`
    Lower { other: usize, a: i64 },
    /// `j_here <= j_other - a`
    Upper { other: usize, a: i64 },
    /// self-loop at this position with weight > 0
    Empty,
}

/// Depth-first enumeration of `Ω(g) ∩ box` in lexicographic order of the
/// coordinate tuple (vertices by increasing id), pruning partial assignments
/// that already violate a constraint.
#[derive(Clone, Debug)]
pub struct Members {
    ids: Vec<VertexId>,
    ranges: Vec<(i64, i64)>,
    bounds: Vec<Vec<Bound>>,
    coords: Vec<i64>,
    hi: Vec<i64>,
    level: usize,
    started: bool,
    done: bool,
}

impl Members {
    fn new(g: &Graph, ranges: Vec<(i64, i64)>) -> Self {
        let ids: Vec<VertexId> = g.vertices().iter().copied().collect();
        let index: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut bounds = alloc::vec![Vec::new(); ids.len()];
        for e in g.edges() {
            let (s, d) = (index[&e.src], index[&e.dst]);
            if s == d {
                if e.weight > 0 {
                    bounds[s].push(Bound::Empty);
                }
            } else if s > d {
                bounds[s].push(Bound::Lower { other: d, a: e.weight });
            } else {
                bounds[d].push(Bound::Upper { other: s, a: e.weight });
            }
        }
        let n = ids.len();
        Members {
            ids,
            ranges,
            bounds,
            coords: alloc::vec![0; n],
            hi: alloc::vec![0; n],
            level: 0,
            started: false,
            done: false,
        }
    }

    /// Sets up `level` for iteration given the coordinates below it.
    fn open(&mut self, level: usize) {
        let (mut lo, mut hi) = self.ranges[level];
        for b in &self.bounds[level] {
            match *b {
                Bound::Lower { other, a } => lo = lo.max(self.coords[other] + a),
                Bound::Upper { other, a } => hi = hi.min(self.coords[other] - a),
                Bound::Empty => hi = lo - 1,
            }
        }
        self.coords[level] = lo - 1;
        self.hi[level] = hi;
    }

    /// Advances to the next member; the coordinates are `self.coords`.
    fn advance(&mut self) -> bool {
        let n = self.ids.len();
        if self.done {
            return false;
        }
        if !self.started {
            self.started = true;
            if n == 0 {
                self.done = true;
                return true;
            }
            self.level = 0;
            self.open(0);
        }
        loop {
            let l = self.level;
            self.coords[l] += 1;
            if self.coords[l] > self.hi[l] {
                if l == 0 {
                    self.done = true;
                    return false;
                }
                self.level -= 1;
                continue;
            }
            if l + 1 == n {
                return true;
            }
            self.level += 1;
            self.open(l + 1);
        }
    }

    fn point(&self) -> LatticePoint {
        self.ids.iter().copied().zip(self.coords.iter().copied()).collect()
    }
}

impl Iterator for Members {
    type Item = LatticePoint;

    fn next(&mut self) -> Option<LatticePoint> {
        if self.advance() {
            Some(self.point())
        } else {
            None
        }
    }
}

fn box_points(order: usize, b: &LatticeBox) -> u128 {
    let side = 2 * b.radius as u128 + 1;
    let mut total: u128 = 1;
    for _ in 0..order {
        total = total.saturating_mul(side);
    }
    total
}

fn ranges_for(g: &Graph, b: &LatticeBox) -> Vec<(i64, i64)> {
    g.vertices().iter().map(|v| b.range(*v)).collect()
}

/// Members of `Ω(g) ∩ b` in lexicographic order.
pub fn enumerate_box(
    g: &Graph,
    b: &LatticeBox,
    limits: &EnumerationLimits,
) -> Result<Members, PolytopeError> {
    let points = box_points(g.order(), b);
    if points > limits.max_box_points {
        return Err(PolytopeError::CapExceeded { points, cap: limits.max_box_points });
    }
    Ok(Members::new(g, ranges_for(g, b)))
}

/// Members of `Ω(g)` with each coordinate inside its own inclusive range
/// (keyed by vertex; every vertex must be present).
pub fn enumerate_ranges(
    g: &Graph,
    ranges: &BTreeMap<VertexId, (i64, i64)>,
) -> Result<Members, PolytopeError> {
    if ranges.len() != g.order() || !g.vertices().iter().all(|v| ranges.contains_key(v)) {
        return Err(PolytopeError::KeyMismatch);
    }
    Ok(Members::new(g, g.vertices().iter().map(|v| ranges[v]).collect()))
}

/// Count of `Ω(g) ∩ b`.
pub fn count_in_box(g: &Graph, b: &LatticeBox, limits: &EnumerationLimits) -> Result<u64, PolytopeError> {
    let mut m = enumerate_box(g, b, limits)?;
    let mut n = 0;
    while m.advance() {
        n += 1;
    }
    Ok(n)
}

/// Outcome of checking `Ω(whole) = ⊎ Ω(parts)` on a box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitReport {
    pub radius: u64,
    pub whole: u64,
    pub parts: Vec<u64>,
    /// members of the whole lying in more than one part
    pub overlap: u64,
    /// members of the whole lying in no part
    pub uncovered: u64,
    /// members of some part outside the whole
    pub stray: u64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<LatticePoint>,
}

/// Pointwise check of `Ω(whole) ∩ b = ⊎_i (Ω(parts[i]) ∩ b)` (disjoint union).
/// With a single part this is equality.
pub fn check_partition(
    whole: &Graph,
    parts: &[&Graph],
    b: &LatticeBox,
    limits: &EnumerationLimits,
) -> Result<SplitReport, PolytopeError> {
    if parts.iter().any(|p| p.vertices() != whole.vertices()) {
        return Err(PolytopeError::VertexSetMismatch);
    }
    let ids: Vec<VertexId> = whole.vertices().iter().copied().collect();
    let index: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let whole_c = Compiled::new(whole, &index);
    let parts_c: Vec<Compiled> = parts.iter().map(|p| Compiled::new(p, &index)).collect();

    let mut report = SplitReport {
        radius: b.radius,
        whole: 0,
        parts: alloc::vec![0; parts.len()],
        overlap: 0,
        uncovered: 0,
        stray: 0,
        pass: true,
        counterexample: None,
    };
    let mut m = enumerate_box(whole, b, limits)?;
    while m.advance() {
        report.whole += 1;
        let hits = parts_c.iter().filter(|p| p.holds(&m.coords)).count();
        if hits != 1 {
            if hits == 0 {
                report.uncovered += 1;
            } else {
                report.overlap += 1;
            }
            if report.counterexample.is_none() {
                report.counterexample = Some(m.point());
            }
        }
    }
    for (i, p) in parts.iter().enumerate() {
        let mut m = enumerate_box(p, b, limits)?;
        while m.advance() {
            report.parts[i] += 1;
            if !whole_c.holds(&m.coords) {
                report.stray += 1;
                if report.counterexample.is_none() {
                    report.counterexample = Some(m.point());
                }
            }
        }
    }
    report.pass = report.overlap == 0 && report.uncovered == 0 && report.stray == 0;
    Ok(report)
}

/// Checks `Ω(V, E) = Ω(V, E ∪ {e}) ⊎ Ω(V, E ∪ {e*})` on the box.
pub fn verify_split(g: &Graph, e: Edge, b: &LatticeBox) -> Result<SplitReport, PolytopeError> {
    let with = g.with_edge(e).map_err(|_| PolytopeError::KeyMismatch)?;
    let with_dual = g.with_edge(e.dual()).map_err(|_| PolytopeError::KeyMismatch)?;
    check_partition(g, &[&with, &with_dual], b, &EnumerationLimits::default())
}

/// Whether removing one copy of `e` leaves `Ω(g) ∩ b` unchanged.
pub fn edge_redundant(g: &Graph, e: Edge, b: &LatticeBox) -> Result<bool, PolytopeError> {
    let without = g.without_edge(e).map_err(|_| PolytopeError::KeyMismatch)?;
    Ok(check_partition(&without, &[g], b, &EnumerationLimits::default())?.pass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pt(vals: &[(VertexId, i64)]) -> LatticePoint {
        vals.iter().copied().collect()
    }

    #[test]
    fn member_examples() {
        let g = Graph::new([1, 2], [Edge::new(1, 2, 5)]).unwrap();
        assert!(member(&g, &pt(&[(1, 7), (2, 2)])).unwrap());
        assert!(!member(&g, &pt(&[(1, 6), (2, 2)])).unwrap());
        assert_eq!(member(&g, &pt(&[(1, 6)])), Err(PolytopeError::KeyMismatch));
    }

    #[test]
    fn enumerate_examples() {
        let lim = EnumerationLimits::default();
        let g = Graph::edgeless([0, 1]);
        let all: Vec<_> = enumerate_box(&g, &LatticeBox::centered(1), &lim).unwrap().collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0], pt(&[(0, -1), (1, -1)]));
        assert_eq!(all[8], pt(&[(0, 1), (1, 1)]));

        let empty = Graph::new([0, 1], [Edge::new(0, 1, 1), Edge::new(1, 0, 0)]).unwrap();
        assert_eq!(enumerate_box(&empty, &LatticeBox::centered(3), &lim).unwrap().count(), 0);

        let half = Graph::new([1, 2], [Edge::new(1, 2, 0)]).unwrap();
        let pts: Vec<_> = enumerate_box(&half, &LatticeBox::centered(1), &lim).unwrap().collect();
        assert_eq!(pts.len(), 6);
        assert!(pts.iter().all(|p| p.get(1) >= p.get(2)));
        let mut sorted = pts.clone();
        sorted.sort_by_key(|p| (p.get(1), p.get(2)));
        assert_eq!(sorted, pts);
    }

    #[test]
    fn cap_is_enforced() {
        let g = Graph::edgeless([0, 1, 2]);
        let lim = EnumerationLimits { max_box_points: 26 };
        assert!(matches!(
            enumerate_box(&g, &LatticeBox::centered(1), &lim),
            Err(PolytopeError::CapExceeded { points: 27, cap: 26 })
        ));
    }

    #[test]
    fn zero_vertex_graph_has_one_point() {
        let g = Graph::edgeless([]);
        assert_eq!(count_in_box(&g, &LatticeBox::centered(4), &EnumerationLimits::default()).unwrap(), 1);
    }

    #[test]
    fn split_counts_on_five_by_five() {
        let g = Graph::edgeless([1, 2]);
        let r = verify_split(&g, Edge::new(1, 2, 0), &LatticeBox::centered(2)).unwrap();
        assert!(r.pass);
        assert_eq!(r.whole, 25);
        assert_eq!(r.parts, vec![15, 10]);
        assert_eq!(r.overlap, 0);
    }

    #[test]
    fn split_with_edge_already_present() {
        let e = Edge::new(0, 1, 2);
        let g = Graph::new([0, 1], [e]).unwrap();
        let r = verify_split(&g, e, &canonical_box([&g])).unwrap();
        assert!(r.pass);
        assert_eq!(r.parts[0], r.whole);
        assert_eq!(r.parts[1], 0);
    }

    #[test]
    fn redundancy_examples() {
        let e = Edge::new(0, 1, 1);
        let dup = Graph::new([0, 1], [e, e]).unwrap();
        assert!(edge_redundant(&dup, e, &canonical_box([&dup])).unwrap());

        let tri = Graph::new([0, 1, 2], [Edge::new(0, 1, 1), Edge::new(1, 2, 1), Edge::new(0, 2, 2)]).unwrap();
        assert!(edge_redundant(&tri, Edge::new(0, 2, 2), &canonical_box([&tri])).unwrap());
        assert!(!edge_redundant(&tri, Edge::new(0, 1, 1), &canonical_box([&tri])).unwrap());

        let single = Graph::new([0, 1], [e]).unwrap();
        assert!(!edge_redundant(&single, e, &canonical_box([&single])).unwrap());
    }

    #[test]
    fn broken_partition_reports_counterexample() {
        let g = Graph::edgeless([0, 1]);
        let a = g.with_edge(Edge::new(0, 1, 0)).unwrap();
        let wrong = g.with_edge(Edge::new(1, 0, 2)).unwrap(); // should be (1, 0, 1)
        let r = check_partition(&g, &[&a, &wrong], &LatticeBox::centered(2), &EnumerationLimits::default()).unwrap();
        assert!(!r.pass);
        assert!(r.uncovered > 0);
        let c = r.counterexample.unwrap();
        assert_eq!(c.get(1).unwrap() - c.get(0).unwrap(), 1);
    }

    #[test]
    fn feasible_on_empty_edge_set() {
        assert!(feasible(&Graph::edgeless([0, 1, 2])));
        let g = Graph::new([0, 1], [Edge::new(0, 1, 1), Edge::new(1, 0, 0)]).unwrap();
        assert!(!feasible(&g));
    }
}

//! Rooted hierarchies: trees hanging from a dominant vertex with unique
//! positive-weight paths, avoiding the distinguished vertex.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::graph::{Edge, Graph, VertexId, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HierarchyEntry {
    /// Number of edges on the path from the root.
    pub ranking: usize,
    /// Last edge on the path from the root.
    pub link: Option<Edge>,
    /// Total weight of the path from the root.
    pub depth: i64,
    /// Initial vertex of the link.
    pub superior: Option<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hierarchy {
    graph: Graph,
    root: VertexId,
    vstar: VertexId,
    entries: BTreeMap<VertexId, HierarchyEntry>,
}

/// Validates `g` as a hierarchy with root `v0` and distinguished vertex
/// `vstar`, filling in rankings, links, depths and superiors.
///
/// Rejects graphs with an edge at `vstar`, a vertex of `V - {v0}` without a
/// unique directed path from `v0`, or a non-positive depth.
pub fn hierarchy_analyze(g: &Graph, v0: VertexId, vstar: VertexId) -> Option<Hierarchy> {
    if v0 == vstar || !g.contains_vertex(v0) || !g.contains_vertex(vstar) {
        return None;
    }
    if g.edges().iter().any(|e| e.touches(vstar)) {
        return None;
    }
    // unique walks from the root <=> root has in-degree 0, every other vertex
    // in-degree 1, and everything reachable
    let mut incoming: BTreeMap<VertexId, Edge> = BTreeMap::new();
    for e in g.edges() {
        if e.dst == v0 || incoming.insert(e.dst, *e).is_some() {
            return None;
        }
    }
    let mut entries = BTreeMap::new();
    entries.insert(v0, HierarchyEntry { ranking: 0, link: None, depth: 0, superior: None });
    let mut frontier = alloc::vec![v0];
    while let Some(v) = frontier.pop() {
        let base = entries[&v];
        for e in g.edges().iter().filter(|e| e.src == v) {
            let entry = HierarchyEntry {
                ranking: base.ranking + 1,
                link: Some(*e),
                depth: base.depth + e.weight,
                superior: Some(v),
            };
            if entry.depth <= 0 || entries.insert(e.dst, entry).is_some() {
                return None;
            }
            frontier.push(e.dst);
        }
    }
    let expected = g.vertices().len() - 1;
    if entries.len() != expected {
        return None;
    }
    Some(Hierarchy { graph: g.clone(), root: v0, vstar, entries })
}

/// The star `{(v0, v, 1) : v in V - {v0}}` on `V ∪ {vstar}`.
pub fn star_edges(vertices: &VertexSet, v0: VertexId, vstar: VertexId) -> Vec<Edge> {
    vertices
        .iter()
        .filter(|&&v| v != v0 && v != vstar)
        .map(|&v| Edge::new(v0, v, 1))
        .collect()
}

impl Hierarchy {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn vstar(&self) -> VertexId {
        self.vstar
    }

    pub fn entry(&self, v: VertexId) -> Option<&HierarchyEntry> {
        self.entries.get(&v)
    }

    pub fn ranking(&self, v: VertexId) -> usize {
        self.entries[&v].ranking
    }

    pub fn depth(&self, v: VertexId) -> i64 {
        self.entries[&v].depth
    }

    pub fn link(&self, v: VertexId) -> Option<Edge> {
        self.entries[&v].link
    }

    pub fn superior(&self, v: VertexId) -> Option<VertexId> {
        self.entries[&v].superior
    }

    /// The edges of `p(v)` from the root to `v`.
    pub fn path(&self, v: VertexId) -> Vec<Edge> {
        let mut out = Vec::new();
        let mut cur = v;
        while let Some(e) = self.entries[&cur].link {
            out.push(e);
            cur = e.src;
        }
        out.reverse();
        out
    }

    /// Whether `a` lies on `p(b)`, the root and `b` included.
    pub fn on_path(&self, a: VertexId, b: VertexId) -> bool {
        let mut cur = Some(b);
        while let Some(v) = cur {
            if v == a {
                return true;
            }
            cur = self.entries[&v].superior;
        }
        false
    }

    /// Sum of rankings over the vertices in `adjacent`.
    pub fn total_ranking(&self, adjacent: &VertexSet) -> usize {
        adjacent.iter().filter_map(|v| self.entries.get(v)).map(|e| e.ranking).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_is_a_hierarchy() {
        let vs: VertexSet = [0, 1, 2, 3, 9].into_iter().collect();
        let g = Graph::new(vs.clone(), star_edges(&vs, 0, 9)).unwrap();
        let h = hierarchy_analyze(&g, 0, 9).unwrap();
        for v in [1, 2, 3] {
            assert_eq!(h.ranking(v), 1);
            assert_eq!(h.depth(v), 1);
            assert_eq!(h.superior(v), Some(0));
        }
        assert_eq!(h.ranking(0), 0);
    }

    #[test]
    fn chain_depths() {
        let ok = Graph::new([0, 1, 2, 9], [Edge::new(0, 1, 2), Edge::new(1, 2, -1)]).unwrap();
        let h = hierarchy_analyze(&ok, 0, 9).unwrap();
        assert_eq!(h.depth(2), 1);
        assert_eq!(h.ranking(2), 2);
        assert_eq!(h.path(2), alloc::vec![Edge::new(0, 1, 2), Edge::new(1, 2, -1)]);
        assert!(h.on_path(1, 2));
        assert!(!h.on_path(2, 1));

        let bad = Graph::new([0, 1, 2, 9], [Edge::new(0, 1, 1), Edge::new(1, 2, -1)]).unwrap();
        assert!(hierarchy_analyze(&bad, 0, 9).is_none());
    }

    #[test]
    fn rejects_edges_at_vstar_and_non_unique_paths() {
        let at_star = Graph::new([0, 1, 9], [Edge::new(0, 1, 1), Edge::new(9, 1, 1)]).unwrap();
        assert!(hierarchy_analyze(&at_star, 0, 9).is_none());
        let two = Graph::new(
            [0, 1, 2, 9],
            [Edge::new(0, 1, 1), Edge::new(0, 2, 1), Edge::new(1, 2, 1)],
        )
        .unwrap();
        assert!(hierarchy_analyze(&two, 0, 9).is_none());
        let unreachable = Graph::new([0, 1, 2, 9], [Edge::new(0, 1, 1)]).unwrap();
        assert!(hierarchy_analyze(&unreachable, 0, 9).is_none());
        let into_root = Graph::new([0, 1, 9], [Edge::new(0, 1, 1), Edge::new(1, 0, 1)]).unwrap();
        assert!(hierarchy_analyze(&into_root, 0, 9).is_none());
    }
}

//! Certificate data model: rewrite rules, node phases, induction measures
//! and the deterministic replay of every rule.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::classify::{graph_to_standard_form, Classification};
use crate::feasibility::DirectedCircuit;
use crate::graph::{Edge, Graph, VertexId, VertexSet};
use crate::hierarchy::{hierarchy_analyze, star_edges, Hierarchy};
use crate::identity::{check_identity, IdentityReport};
use crate::polytope::PolytopeError;

pub const CERTIFICATE_FORMAT_VERSION: u32 = 1;

/// Undirected identity of an edge, shared with its dual.
pub type EdgeKey = (VertexId, VertexId, i64);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum RewriteRule {
    /// `Ω(G) = Ω(G ∪ {e}) ⊎ Ω(G ∪ {e*})`.
    SplitEdge { edge: Edge },
    /// `Ω(G - e) = Ω(G) ⊎ Ω(G - e ∪ {e*})`.
    SplitEdgeAlt { edge: Edge },
    /// As [`RewriteRule::SplitEdgeAlt`], used to orient an edge.
    ReverseEdge { edge: Edge },
    DropRedundant { edge: Edge },
    StandardForm { v1: VertexId, v2: VertexId },
    /// Split on the zero edge `edge` between `v` and `w`.
    ZeroEdgeSaturate { v: VertexId, w: VertexId, edge: Edge },
    /// Adjoin the star hierarchy rooted at the dominant vertex.
    AdjoinHierarchy { root: VertexId },
    SepChain { e1: Edge, e2: Edge, e3: Edge },
    HierarchyCase1 { edge: Edge, link: Edge },
    HierarchyCase2 { edge: Edge, link: Edge, bridge: Edge },
}

/// How the node polytope relates to the child polytopes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdentityShape {
    /// `Ω(P) = Ω(C0)`
    Equal,
    /// `Ω(P) = Ω(C0) ⊎ Ω(C1)`
    Split,
    /// `Ω(C0) = Ω(P) ⊎ Ω(C1)`
    Inverted,
}

impl RewriteRule {
    pub fn identity_shape(&self) -> IdentityShape {
        match self {
            RewriteRule::DropRedundant { .. } | RewriteRule::StandardForm { .. } | RewriteRule::AdjoinHierarchy { .. } => {
                IdentityShape::Equal
            }
            RewriteRule::SplitEdge { .. } | RewriteRule::ZeroEdgeSaturate { .. } | RewriteRule::HierarchyCase2 { .. } => {
                IdentityShape::Split
            }
            RewriteRule::SplitEdgeAlt { .. }
            | RewriteRule::ReverseEdge { .. }
            | RewriteRule::SepChain { .. }
            | RewriteRule::HierarchyCase1 { .. } => IdentityShape::Inverted,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RewriteRule::SplitEdge { .. } => "SplitEdge",
            RewriteRule::SplitEdgeAlt { .. } => "SplitEdgeAlt",
            RewriteRule::ReverseEdge { .. } => "ReverseEdge",
            RewriteRule::DropRedundant { .. } => "DropRedundant",
            RewriteRule::StandardForm { .. } => "StandardForm",
            RewriteRule::ZeroEdgeSaturate { .. } => "ZeroEdgeSaturate",
            RewriteRule::AdjoinHierarchy { .. } => "AdjoinHierarchy",
            RewriteRule::SepChain { .. } => "SepChain",
            RewriteRule::HierarchyCase1 { .. } => "HierarchyCase1",
            RewriteRule::HierarchyCase2 { .. } => "HierarchyCase2",
        }
    }
}

/// The rewriting context of a node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "phase")]
pub enum Phase {
    /// Before a dominant or competing frequency is established.
    Generic,
    /// Standard form with competing frequencies `v1`, `v2`.
    Competing { v1: VertexId, v2: VertexId },
    /// Dominant frequency `root`; `hierarchy` is a sub-multiset of the
    /// edges forming a hierarchy. `focus` names the edge to treat next.
    Dominant {
        root: VertexId,
        hierarchy: Vec<Edge>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        focus: Option<EdgeKey>,
    },
    /// Leaves.
    Terminal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VanishReason {
    PositiveCircuit,
    DominantNonMaximal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum LeafKind {
    Good { classification: Classification },
    Vanish {
        reason: VanishReason,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        circuit: Option<DirectedCircuit>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dominant: Option<VertexId>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "node")]
pub enum NodeBody {
    Internal {
        rule: RewriteRule,
        children: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        identity: Option<IdentityReport>,
    },
    Leaf {
        leaf: LeafKind,
    },
    /// Not expanded; only present in partial certificates.
    Open,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertNode {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<usize>,
    pub depth: usize,
    pub graph: Graph,
    pub phase: Phase,
    pub measure: Vec<i64>,
    /// edge count including hierarchy edges
    pub complexity: usize,
    /// edge count without hierarchy edges
    pub free_complexity: usize,
    pub body: NodeBody,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateStats {
    pub node_count: usize,
    pub leaf_count: usize,
    pub good_leaves: usize,
    pub vanishing_leaves: usize,
    pub max_depth: usize,
    pub max_complexity: usize,
    pub max_free_complexity: usize,
    pub rule_counts: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub format_version: u32,
    pub root: Graph,
    pub nodes: Vec<CertNode>,
    pub stats: CertificateStats,
}

impl Certificate {
    pub fn leaves(&self) -> impl Iterator<Item = &CertNode> {
        self.nodes.iter().filter(|n| matches!(n.body, NodeBody::Leaf { .. }))
    }

    /// Node ids from the root down to `id`.
    pub fn path_to(&self, id: usize) -> Vec<usize> {
        let mut out = alloc::vec![id];
        let mut cur = id;
        while let Some(p) = self.nodes.get(cur).and_then(|n| n.parent) {
            out.push(p);
            cur = p;
        }
        out.reverse();
        out
    }

    pub fn compute_stats(&self) -> CertificateStats {
        let mut s = CertificateStats { node_count: self.nodes.len(), ..Default::default() };
        for n in &self.nodes {
            s.max_depth = s.max_depth.max(n.depth);
            s.max_complexity = s.max_complexity.max(n.complexity);
            s.max_free_complexity = s.max_free_complexity.max(n.free_complexity);
            match &n.body {
                NodeBody::Leaf { leaf } => {
                    s.leaf_count += 1;
                    match leaf {
                        LeafKind::Good { .. } => s.good_leaves += 1,
                        LeafKind::Vanish { .. } => s.vanishing_leaves += 1,
                    }
                }
                NodeBody::Internal { rule, .. } => {
                    *s.rule_counts.entry(String::from(rule.name())).or_default() += 1;
                }
                NodeBody::Open => {}
            }
        }
        s
    }
}

// ---------------------------------------------------------------------------
// Phase states and measures

/// Where a dominant-phase node stands.
#[derive(Clone, Debug)]
pub enum DominantStage {
    /// `G` has an undirected circuit; `reversals` orient it positively.
    Circuit { reversals: Vec<Edge> },
    /// `G` has an edge inside `V`: `present` as stored, `oriented` so that
    /// `A + depth(src) > depth(dst)`.
    Inner { present: Edge, oriented: Edge },
    /// Every edge of `G` touches `v_*`. `chosen` is the edge to the
    /// smallest-id neighbour of positive ranking, stored and oriented away
    /// from `v_*`.
    Outer { total_ranking: usize, chosen: Option<(Edge, Edge)> },
}

#[derive(Clone, Debug)]
pub struct DominantState {
    pub hierarchy: Hierarchy,
    /// `P - H`
    pub free: Graph,
    pub stage: DominantStage,
}

fn hierarchy_graph(g: &Graph, hierarchy: &[Edge]) -> Result<Graph, String> {
    Graph::new(g.vertices().iter().copied(), hierarchy.iter().copied()).map_err(|e| format!("{e}"))
}

pub fn dominant_state(
    g: &Graph,
    root: VertexId,
    hierarchy: &[Edge],
    focus: Option<EdgeKey>,
) -> Result<DominantState, String> {
    let vstar = g.distinguished().ok_or("dominant phase without a distinguished vertex")?;
    let h = hierarchy_analyze(&hierarchy_graph(g, hierarchy)?, root, vstar)
        .ok_or_else(|| String::from("hierarchy fails validation"))?;
    let free = g.remove_edges(hierarchy).map_err(|_| String::from("hierarchy is not contained in the graph"))?;
    let loopless = Graph::new(
        free.vertices().iter().copied(),
        free.edges().iter().copied().filter(|e| !e.is_loop()),
    )
    .expect("same vertices");
    if let Some(c) = loopless.find_undirected_circuit() {
        let (_, reversals) = c.positive_orientation();
        return Ok(DominantState { hierarchy: h, free, stage: DominantStage::Circuit { reversals } });
    }
    let inner: Vec<Edge> = loopless.edges().iter().copied().filter(|e| !e.touches(vstar)).collect();
    if !inner.is_empty() {
        let by_focus = focus.and_then(|k| inner.iter().copied().find(|e| e.undirected_key() == k));
        let present = by_focus.unwrap_or_else(|| {
            *inner.iter().min_by_key(|e| (e.undirected_key(), **e)).expect("non-empty")
        });
        let oriented = if present.weight + h.depth(present.src) > h.depth(present.dst) {
            present
        } else {
            present.dual()
        };
        return Ok(DominantState { hierarchy: h, free, stage: DominantStage::Inner { present, oriented } });
    }
    let nbrs = loopless.neighbours(vstar);
    let total_ranking = h.total_ranking(&nbrs);
    let chosen = nbrs.iter().copied().find(|&v| h.ranking(v) > 0).map(|v| {
        let present = *loopless.edges().iter().find(|e| e.touches(v)).expect("neighbour edge");
        let oriented = if present.src == vstar { present } else { present.dual() };
        (present, oriented)
    });
    Ok(DominantState { hierarchy: h, free, stage: DominantStage::Outer { total_ranking, chosen } })
}

#[derive(Clone, Debug)]
pub enum CompetingStage {
    /// `G - {v2}` has an undirected circuit.
    Circuit { reversals: Vec<Edge> },
    /// `G - {v2}` is a tree with `v_*` a leaf; `path` runs from `v_*` to
    /// `v1`. `edges[i]` joins `path[i]` and `path[i + 1]` as stored.
    Path { path: Vec<VertexId>, edges: Vec<Edge> },
    /// Neither; such nodes are separable or semi-direct.
    Other,
}

pub fn competing_state(g: &Graph, v1: VertexId, v2: VertexId) -> Result<CompetingStage, String> {
    let vstar = g.distinguished().ok_or("competing phase without a distinguished vertex")?;
    let t = g.remove_vertices(&VertexSet::from([v2])).map_err(|e| format!("{e}"))?;
    let t = Graph::new(t.vertices().iter().copied(), t.edges().iter().copied().filter(|e| !e.is_loop()))
        .expect("same vertices");
    if let Some(c) = t.find_undirected_circuit() {
        let (_, reversals) = c.positive_orientation();
        return Ok(CompetingStage::Circuit { reversals });
    }
    let connected = t.components(t.vertices()).len() == 1;
    if !connected || t.degree(vstar) != 1 {
        return Ok(CompetingStage::Other);
    }
    let path = t.undirected_path(vstar, v1).ok_or("tree is connected")?;
    let edges = path
        .windows(2)
        .map(|w| *t.edges().iter().find(|e| e.touches(w[0]) && e.touches(w[1])).expect("tree edge"))
        .collect();
    Ok(CompetingStage::Path { path, edges })
}

/// Number of feasible relations among `<, =, >` summed over pairs of free
/// vertices.
pub fn relation_count(g: &Graph) -> usize {
    let vs: Vec<VertexId> = g.free_vertices().into_iter().collect();
    let mut total = 0;
    for (i, &a) in vs.iter().enumerate() {
        for &b in &vs[i + 1..] {
            total += crate::classify::feasible_relations(g, a, b).iter().filter(|x| **x).count();
        }
    }
    total
}

/// Lexicographic induction measure of a node. Every rule application
/// strictly decreases it.
pub fn measure(g: &Graph, phase: &Phase) -> Result<Vec<i64>, String> {
    let order = 2 * g.free_vertices().len() as i64 + 1;
    Ok(match phase {
        Phase::Terminal => alloc::vec![order, 0],
        Phase::Generic => alloc::vec![order, 3, relation_count(g) as i64, g.complexity() as i64],
        Phase::Dominant { root, hierarchy, focus } => {
            let st = dominant_state(g, *root, hierarchy, *focus)?;
            let (stage, a, b) = match &st.stage {
                DominantStage::Circuit { reversals } => (0, reversals.len() as i64, 0),
                DominantStage::Inner { present, oriented } => {
                    (1, st.hierarchy.ranking(oriented.dst) as i64, (present != oriented) as i64)
                }
                DominantStage::Outer { total_ranking, chosen } => {
                    let b = chosen.map_or(0, |(p, o)| (p != o) as i64);
                    (2, *total_ranking as i64, b)
                }
            };
            alloc::vec![order, 2, st.free.complexity() as i64, stage, a, b]
        }
        Phase::Competing { v1, v2 } => {
            let sentinel = g.order() as i64 + 2;
            let (d, p) = match competing_state(g, *v1, *v2)? {
                CompetingStage::Circuit { reversals } => (sentinel, reversals.len() as i64),
                CompetingStage::Path { path, edges } => {
                    let mut wrong = 0;
                    if edges.len() >= 2 {
                        wrong += (edges[0].src != path[0]) as i64 + (edges[1].src != path[1]) as i64;
                    }
                    (edges.len() as i64, wrong)
                }
                CompetingStage::Other => (0, 0),
            };
            alloc::vec![order, 1, g.complexity() as i64, d, p]
        }
    })
}

// ---------------------------------------------------------------------------
// Replay

fn err<T>(msg: String) -> Result<T, String> {
    Err(msg)
}

fn count(edges: &[Edge], e: &Edge) -> usize {
    edges.iter().filter(|x| *x == e).count()
}

/// After dropping one copy of `dropped`, keeps the hierarchy inside the
/// graph by promoting the strongest parallel edge.
fn rehome_hierarchy(child: &Graph, hierarchy: &[Edge], dropped: Edge) -> Result<Vec<Edge>, String> {
    if count(hierarchy, &dropped) <= child.multiplicity(&dropped) {
        return Ok(hierarchy.to_vec());
    }
    let replacement = child
        .edges()
        .iter()
        .filter(|e| e.src == dropped.src && e.dst == dropped.dst && e.weight >= dropped.weight)
        .max_by_key(|e| e.weight)
        .copied()
        .ok_or_else(|| format!("hierarchy edge {dropped} dropped without a stronger parallel edge"))?;
    let mut h: Vec<Edge> = hierarchy.to_vec();
    let i = h.iter().position(|e| *e == dropped).expect("counted above");
    h[i] = replacement;
    h.sort_unstable();
    Ok(h)
}

fn swap_hierarchy_edge(hierarchy: &[Edge], out: Edge, inn: Edge) -> Result<Vec<Edge>, String> {
    let mut h = hierarchy.to_vec();
    let i = h.iter().position(|e| *e == out).ok_or_else(|| format!("{out} is not a hierarchy edge"))?;
    h[i] = inn;
    h.sort_unstable();
    Ok(h)
}

fn require_free(g: &Graph, phase: &Phase, e: Edge) -> Result<(), String> {
    if !g.contains_edge(&e) {
        return err(format!("edge {e} is not in the graph"));
    }
    if let Phase::Dominant { hierarchy, .. } = phase {
        if g.multiplicity(&e) <= count(hierarchy, &e) {
            return err(format!("edge {e} belongs to the hierarchy"));
        }
    }
    Ok(())
}

fn ge<T>(r: Result<T, crate::graph::GraphError>) -> Result<T, String> {
    r.map_err(|e| format!("{e}"))
}

/// The children `(graph, intended phase)` produced by applying `rule` at a
/// node. Children whose intended phase is [`Phase::Terminal`] must be good.
pub fn apply_rule(g: &Graph, phase: &Phase, rule: &RewriteRule) -> Result<Vec<(Graph, Phase)>, String> {
    let vstar = g.distinguished();
    match rule {
        RewriteRule::SplitEdge { edge } => Ok(alloc::vec![
            (ge(g.with_edge(*edge))?, phase.clone()),
            (ge(g.with_edge(edge.dual()))?, phase.clone()),
        ]),
        RewriteRule::ZeroEdgeSaturate { v, w, edge } => {
            let ok = edge.weight == 0 && ((edge.src, edge.dst) == (*v, *w) || (edge.src, edge.dst) == (*w, *v));
            if !ok || v == w {
                return err(format!("{edge} is not a zero edge between {v} and {w}"));
            }
            if *phase != Phase::Generic {
                return err(String::from("zero-edge saturation outside the generic phase"));
            }
            Ok(alloc::vec![
                (ge(g.with_edge(*edge))?, Phase::Generic),
                (ge(g.with_edge(edge.dual()))?, Phase::Generic),
            ])
        }
        RewriteRule::SplitEdgeAlt { edge } | RewriteRule::ReverseEdge { edge } => {
            require_free(g, phase, *edge)?;
            let without = ge(g.without_edge(*edge))?;
            let reversed = ge(without.with_edge(edge.dual()))?;
            Ok(alloc::vec![(without, phase.clone()), (reversed, phase.clone())])
        }
        RewriteRule::DropRedundant { edge } => {
            let child = ge(g.without_edge(*edge))?;
            let next = match phase {
                Phase::Dominant { root, hierarchy, focus } => Phase::Dominant {
                    root: *root,
                    hierarchy: rehome_hierarchy(&child, hierarchy, *edge)?,
                    focus: *focus,
                },
                other => other.clone(),
            };
            Ok(alloc::vec![(child, next)])
        }
        RewriteRule::StandardForm { v1, v2 } => {
            if *phase != Phase::Generic {
                return err(String::from("standard form outside the generic phase"));
            }
            let child = graph_to_standard_form(g, *v1, *v2).map_err(|e| format!("{e}"))?;
            Ok(alloc::vec![(child, Phase::Competing { v1: *v1, v2: *v2 })])
        }
        RewriteRule::AdjoinHierarchy { root } => {
            if *phase != Phase::Generic {
                return err(String::from("hierarchy adjoined outside the generic phase"));
            }
            let vstar = vstar.ok_or("no distinguished vertex")?;
            if *root == vstar || !g.contains_vertex(*root) {
                return err(format!("invalid hierarchy root {root}"));
            }
            let star = star_edges(g.vertices(), *root, vstar);
            let child = ge(g.union_edges(&star))?;
            Ok(alloc::vec![(child, Phase::Dominant { root: *root, hierarchy: star, focus: None })])
        }
        RewriteRule::SepChain { e1, e2, e3 } => {
            if !matches!(phase, Phase::Competing { .. }) {
                return err(String::from("chain split outside the competing phase"));
            }
            if e1.dst != e2.src || *e3 != Edge::new(e1.src, e2.dst, e1.weight + e2.weight) {
                return err(format!("{e3} is not the composite of {e1} and {e2}"));
            }
            let c1 = ge(ge(g.without_edge(*e2))?.with_edge(*e3))?;
            let c2 = ge(ge(g.remove_edges(&[*e1, *e2]))?.union_edges(&[e2.dual(), *e3]))?;
            Ok(alloc::vec![(c1, Phase::Terminal), (c2, phase.clone())])
        }
        RewriteRule::HierarchyCase1 { edge, link } => {
            let Phase::Dominant { root, hierarchy, .. } = phase else {
                return err(String::from("hierarchy step outside the dominant phase"));
            };
            require_free(g, phase, *edge)?;
            if link.dst != edge.dst || count(hierarchy, link) == 0 {
                return err(format!("{link} is not the hierarchy link of {}", edge.dst));
            }
            let h = swap_hierarchy_edge(hierarchy, *link, *edge)?;
            let a = ge(g.without_edge(*link))?;
            let b = ge(a.with_edge(link.dual()))?;
            Ok(alloc::vec![
                (a, Phase::Dominant { root: *root, hierarchy: h.clone(), focus: None }),
                (b, Phase::Dominant { root: *root, hierarchy: h, focus: Some(link.undirected_key()) }),
            ])
        }
        RewriteRule::HierarchyCase2 { edge, link, bridge } => {
            let Phase::Dominant { root, hierarchy, .. } = phase else {
                return err(String::from("hierarchy step outside the dominant phase"));
            };
            require_free(g, phase, *edge)?;
            let vstar = vstar.ok_or("no distinguished vertex")?;
            let shape_ok = edge.src == vstar
                && link.dst == edge.dst
                && *bridge == Edge::new(vstar, link.src, edge.weight - link.weight)
                && count(hierarchy, link) > 0;
            if !shape_ok {
                return err(format!("bad hierarchy bridge {edge}, {link}, {bridge}"));
            }
            let c1 = ge(ge(g.without_edge(*edge))?.with_edge(*bridge))?;
            let c2 = ge(ge(g.without_edge(*link))?.with_edge(bridge.dual()))?;
            Ok(alloc::vec![
                (c1, Phase::Dominant { root: *root, hierarchy: hierarchy.clone(), focus: None }),
                (c2, Phase::Terminal),
            ])
        }
    }
}

/// Checks the polytope identity claimed by `rule` between a node graph and
/// its child graphs.
pub fn check_rule_identity(
    rule: &RewriteRule,
    parent: &Graph,
    children: &[&Graph],
    enumeration_cap: u128,
) -> Result<IdentityReport, PolytopeError> {
    match (rule.identity_shape(), children) {
        (IdentityShape::Equal, [c0]) => check_identity(parent, &[c0], enumeration_cap),
        (IdentityShape::Split, [c0, c1]) => check_identity(parent, &[c0, c1], enumeration_cap),
        (IdentityShape::Inverted, [c0, c1]) => check_identity(c0, &[parent, c1], enumeration_cap),
        _ => Err(PolytopeError::VertexSetMismatch),
    }
}

/// Hierarchy-free edge count of a node.
pub fn free_complexity(g: &Graph, phase: &Phase) -> usize {
    match phase {
        Phase::Dominant { hierarchy, .. } => g.complexity().saturating_sub(hierarchy.len()),
        _ => g.complexity(),
    }
}

/// Partial certificate carried by a budget error.
pub type PartialCertificate = Box<Certificate>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measures_are_lexicographic_vectors() {
        let g = Graph::new([0, 1, 9], [Edge::new(0, 1, 1)]).unwrap().with_distinguished(9).unwrap();
        let m = measure(&g, &Phase::Generic).unwrap();
        assert_eq!(m, alloc::vec![5, 3, 1, 1]);
        assert!(measure(&g, &Phase::Terminal).unwrap() < m);
    }

    #[test]
    fn reverse_edge_replay() {
        let g = Graph::new([0, 1, 9], [Edge::new(0, 1, 3)]).unwrap().with_distinguished(9).unwrap();
        let kids = apply_rule(&g, &Phase::Generic, &RewriteRule::ReverseEdge { edge: Edge::new(0, 1, 3) }).unwrap();
        assert_eq!(kids[0].0.complexity(), 0);
        assert_eq!(kids[1].0.edges(), &[Edge::new(1, 0, -2)]);
        assert!(apply_rule(&g, &Phase::Generic, &RewriteRule::ReverseEdge { edge: Edge::new(1, 0, 3) }).is_err());
    }

    #[test]
    fn drop_redundant_rehomes_hierarchy() {
        let g = Graph::new([0, 1, 9], [Edge::new(0, 1, 1), Edge::new(0, 1, 4)])
            .unwrap()
            .with_distinguished(9)
            .unwrap();
        let phase = Phase::Dominant { root: 0, hierarchy: alloc::vec![Edge::new(0, 1, 1)], focus: None };
        let kids = apply_rule(&g, &phase, &RewriteRule::DropRedundant { edge: Edge::new(0, 1, 1) }).unwrap();
        match &kids[0].1 {
            Phase::Dominant { hierarchy, .. } => assert_eq!(hierarchy, &alloc::vec![Edge::new(0, 1, 4)]),
            _ => panic!(),
        }
        assert!(measure(&kids[0].0, &kids[0].1).unwrap() < measure(&g, &phase).unwrap());
    }
}

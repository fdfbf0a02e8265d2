//! Structural predicates of (maximal) paraproducts: dominant and competing
//! frequencies, standard form, separability, semi-directness.
//!
//! Forced relations between scales are decided exactly by feasibility of an
//! augmented graph: `j_a > j_b` holds on all of `Ω(G)` iff `G ∪ {(b, a, 0)}`
//! is infeasible.

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::feasibility::feasible;
use crate::graph::{Edge, Graph, GraphError, VertexId, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassifyError {
    MissingDistinguished,
    NoFreeVertices,
    DistinguishedVertex(VertexId),
    UnknownVertex(VertexId),
    NotCompeting(VertexId, VertexId),
    Graph(GraphError),
}

impl fmt::Display for ClassifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifyError::MissingDistinguished => write!(f, "maximal spec needs a distinguished vertex"),
            ClassifyError::NoFreeVertices => write!(f, "maximal spec needs at least one free vertex"),
            ClassifyError::DistinguishedVertex(v) => {
                write!(f, "vertex {v} is the distinguished vertex and carries no frequency")
            }
            ClassifyError::UnknownVertex(v) => write!(f, "vertex {v} is not in the graph"),
            ClassifyError::NotCompeting(a, b) => write!(f, "vertices {a} and {b} are not competing frequencies"),
            ClassifyError::Graph(e) => write!(f, "{e}"),
        }
    }
}

impl From<GraphError> for ClassifyError {
    fn from(e: GraphError) -> Self {
        ClassifyError::Graph(e)
    }
}

/// Half-integer order `|V| + 1/2` of a maximal paraproduct, stored doubled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfOrder(pub u32);

impl HalfOrder {
    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 1 {
            write!(f, "{}.5", self.0 / 2)
        } else {
            write!(f, "{}", self.0 / 2)
        }
    }
}

/// A graph on `V ⊎ {v_*}` with the distinguished vertex marked.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Graph", into = "Graph")]
pub struct MaxParaproductSpec {
    graph: Graph,
}

impl TryFrom<Graph> for MaxParaproductSpec {
    type Error = ClassifyError;

    fn try_from(graph: Graph) -> Result<Self, ClassifyError> {
        MaxParaproductSpec::new(graph)
    }
}

impl From<MaxParaproductSpec> for Graph {
    fn from(s: MaxParaproductSpec) -> Graph {
        s.graph
    }
}

impl MaxParaproductSpec {
    pub fn new(graph: Graph) -> Result<Self, ClassifyError> {
        if graph.distinguished().is_none() {
            return Err(ClassifyError::MissingDistinguished);
        }
        if graph.free_vertices().is_empty() {
            return Err(ClassifyError::NoFreeVertices);
        }
        Ok(MaxParaproductSpec { graph })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    pub fn vstar(&self) -> VertexId {
        self.graph.distinguished().expect("checked at construction")
    }

    /// `V`, the vertices carrying functions.
    pub fn free_vertices(&self) -> VertexSet {
        self.graph.free_vertices()
    }

    pub fn order(&self) -> HalfOrder {
        HalfOrder(2 * self.free_vertices().len() as u32 + 1)
    }

    pub fn complexity(&self) -> usize {
        self.graph.complexity()
    }
}

/// Whether `j_a > j_b` on every point of `Ω(g)`.
pub fn forced_greater(g: &Graph, a: VertexId, b: VertexId) -> bool {
    !feasible(&g.with_edge(Edge::new(b, a, 0)).expect("vertices in graph"))
}

/// Whether `j_a >= j_b` on every point of `Ω(g)`.
pub fn forced_at_least(g: &Graph, a: VertexId, b: VertexId) -> bool {
    !feasible(&g.with_edge(Edge::new(b, a, 1)).expect("vertices in graph"))
}

/// Whether `j_a = j_b` on every point of `Ω(g)`.
pub fn forced_equal(g: &Graph, a: VertexId, b: VertexId) -> bool {
    forced_at_least(g, a, b) && forced_at_least(g, b, a)
}

/// Which of `j_a < j_b`, `j_a = j_b`, `j_a > j_b` are attained on `Ω(g)`.
pub fn feasible_relations(g: &Graph, a: VertexId, b: VertexId) -> [bool; 3] {
    let less = feasible(&g.with_edge(Edge::new(b, a, 1)).expect("vertices in graph"));
    let equal = feasible(
        &g.union_edges(&[Edge::new(a, b, 0), Edge::new(b, a, 0)]).expect("vertices in graph"),
    );
    let greater = feasible(&g.with_edge(Edge::new(a, b, 1)).expect("vertices in graph"));
    [less, equal, greater]
}

/// Dominant-frequency test on a graph; the distinguished vertex, if any, is
/// excluded from the comparison set.
pub fn graph_has_dominant_frequency(g: &Graph, v0: VertexId) -> bool {
    g.free_vertices().iter().filter(|&&v| v != v0).all(|&v| forced_greater(g, v0, v))
}

pub fn has_dominant_frequency(spec: &MaxParaproductSpec, v0: VertexId) -> Result<bool, ClassifyError> {
    if v0 == spec.vstar() {
        return Err(ClassifyError::DistinguishedVertex(v0));
    }
    if !spec.graph.contains_vertex(v0) {
        return Err(ClassifyError::UnknownVertex(v0));
    }
    Ok(graph_has_dominant_frequency(&spec.graph, v0))
}

/// The dominant frequency, if some free vertex is one. When `Ω` is empty
/// every vertex qualifies vacuously and the smallest is returned.
pub fn dominant_frequency(g: &Graph) -> Option<VertexId> {
    g.free_vertices().into_iter().find(|&v| graph_has_dominant_frequency(g, v))
}

/// All pairs `v1 < v2` of free vertices with `j_v1 = j_v2` forced, in
/// lexicographic order.
pub fn competing_pairs(g: &Graph) -> Vec<(VertexId, VertexId)> {
    let vs: Vec<VertexId> = g.free_vertices().into_iter().collect();
    let mut out = Vec::new();
    for (i, &a) in vs.iter().enumerate() {
        for &b in &vs[i + 1..] {
            if forced_equal(g, a, b) {
                out.push((a, b));
            }
        }
    }
    out
}

pub fn find_competing_frequencies(spec: &MaxParaproductSpec) -> Option<(VertexId, VertexId)> {
    competing_pairs(&spec.graph).into_iter().next()
}

/// `{v2}` is not adjacent to `V - {v1, v2}` (together with `v_*` when the
/// graph has one).
pub fn is_standard_form(g: &Graph, v1: VertexId, v2: VertexId) -> bool {
    let rest: VertexSet = g.vertices().iter().copied().filter(|&v| v != v1 && v != v2).collect();
    !g.adjacent(&VertexSet::from([v2]), &rest).unwrap_or(true)
}

/// Moves every edge at `v2` onto `v1` and adds `(v1, v2, 0)`, `(v2, v1, 0)`.
/// Edges between `v1` and `v2` become self-loops at `v1`.
pub fn graph_to_standard_form(g: &Graph, v1: VertexId, v2: VertexId) -> Result<Graph, ClassifyError> {
    if !forced_equal(g, v1, v2) || v1 == v2 {
        return Err(ClassifyError::NotCompeting(v1, v2));
    }
    let moved: Vec<Edge> = g
        .edges()
        .iter()
        .map(|e| {
            let src = if e.src == v2 { v1 } else { e.src };
            let dst = if e.dst == v2 { v1 } else { e.dst };
            Edge::new(src, dst, e.weight)
        })
        .chain([Edge::new(v1, v2, 0), Edge::new(v2, v1, 0)])
        .collect();
    let out = Graph::new(g.vertices().iter().copied(), moved)?;
    Ok(match g.distinguished() {
        Some(d) => out.with_distinguished(d)?,
        None => out,
    })
}

pub fn to_standard_form(
    spec: &MaxParaproductSpec,
    v1: VertexId,
    v2: VertexId,
) -> Result<MaxParaproductSpec, ClassifyError> {
    for v in [v1, v2] {
        if v == spec.vstar() {
            return Err(ClassifyError::DistinguishedVertex(v));
        }
    }
    MaxParaproductSpec::new(graph_to_standard_form(&spec.graph, v1, v2)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrequencyKind {
    DominantFrequency(VertexId),
    CompetingFrequencies(VertexId, VertexId),
    Neither,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Goodness {
    Separable(VertexSet, VertexSet),
    SemiDirectDominant,
    SemiDirectCompeting,
    NotGood,
}

impl Goodness {
    pub fn is_good(&self) -> bool {
        !matches!(self, Goodness::NotGood)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    /// `Ω(G)` is empty; the other fields are then not meaningful.
    pub empty_omega: bool,
    pub kind: FrequencyKind,
    pub goodness: Goodness,
}

/// A split `V = V1 ⊎ V2` into non-empty, non-adjacent parts, if one exists:
/// `V1` is the component of the smallest free vertex.
pub fn separable_split(g: &Graph) -> Option<(VertexSet, VertexSet)> {
    let free = g.free_vertices();
    let comps = g.components(&free);
    if comps.len() < 2 {
        return None;
    }
    let first = comps[0].clone();
    let rest: VertexSet = free.difference(&first).copied().collect();
    Some((first, rest))
}

fn vstar_not_adjacent(g: &Graph, excluded: &[VertexId]) -> bool {
    let Some(vstar) = g.distinguished() else { return true };
    let rest: VertexSet = g.free_vertices().into_iter().filter(|v| !excluded.contains(v)).collect();
    !g.adjacent(&VertexSet::from([vstar]), &rest).unwrap_or(true)
}

/// Classification of a graph with a distinguished vertex.
///
/// Goodness is tested in the order semi-direct dominant, semi-direct
/// competing (over every competing pair), separable. The reported kind is
/// the one that witnesses the goodness when there is one.
pub fn classify_graph(g: &Graph) -> Classification {
    if !feasible(g) {
        return Classification { empty_omega: true, kind: FrequencyKind::Neither, goodness: Goodness::NotGood };
    }
    let dominant = dominant_frequency(g);
    let pairs = competing_pairs(g);
    if let Some(v0) = dominant {
        if vstar_not_adjacent(g, &[v0]) {
            return Classification {
                empty_omega: false,
                kind: FrequencyKind::DominantFrequency(v0),
                goodness: Goodness::SemiDirectDominant,
            };
        }
    }
    if let Some(&(v1, v2)) = pairs.iter().find(|(a, b)| vstar_not_adjacent(g, &[*a, *b])) {
        return Classification {
            empty_omega: false,
            kind: FrequencyKind::CompetingFrequencies(v1, v2),
            goodness: Goodness::SemiDirectCompeting,
        };
    }
    let kind = match (dominant, pairs.first()) {
        (Some(v0), _) => FrequencyKind::DominantFrequency(v0),
        (None, Some(&(a, b))) => FrequencyKind::CompetingFrequencies(a, b),
        (None, None) => FrequencyKind::Neither,
    };
    let goodness = match separable_split(g) {
        Some((a, b)) => Goodness::Separable(a, b),
        None => Goodness::NotGood,
    };
    Classification { empty_omega: false, kind, goodness }
}

pub fn classify(spec: &MaxParaproductSpec) -> Classification {
    classify_graph(&spec.graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{canonical_box, check_partition, EnumerationLimits};

    const STAR: VertexId = 9;

    fn spec(vs: &[VertexId], es: &[(VertexId, VertexId, i64)]) -> MaxParaproductSpec {
        let g = Graph::new(vs.iter().copied(), es.iter().map(|&(a, b, w)| Edge::new(a, b, w)))
            .unwrap()
            .with_distinguished(STAR)
            .unwrap();
        MaxParaproductSpec::new(g).unwrap()
    }

    #[test]
    fn order_is_half_integer() {
        let s = spec(&[0, 1, 2, STAR], &[]);
        assert_eq!(s.order(), HalfOrder(7));
        assert_eq!(alloc::format!("{}", s.order()), "3.5");
    }

    #[test]
    fn dominant_examples() {
        let s = spec(&[0, 1, 2, STAR], &[(0, 1, 1), (0, 2, 1), (1, 2, 4)]);
        assert!(has_dominant_frequency(&s, 0).unwrap());
        assert!(!has_dominant_frequency(&s, 1).unwrap());
        let edgeless = spec(&[0, 1, STAR], &[]);
        assert!(!has_dominant_frequency(&edgeless, 0).unwrap());
        let empty = spec(&[0, 1, STAR], &[(0, 1, 1), (1, 0, 0)]);
        assert!(has_dominant_frequency(&empty, 1).unwrap());
        assert_eq!(has_dominant_frequency(&s, STAR), Err(ClassifyError::DistinguishedVertex(STAR)));
    }

    #[test]
    fn competing_examples() {
        let s = spec(&[1, 2, STAR], &[(1, 2, 0), (2, 1, 0)]);
        assert_eq!(find_competing_frequencies(&s), Some((1, 2)));
        assert_eq!(find_competing_frequencies(&spec(&[1, 2, 3, STAR], &[])), None);
        let cyc = spec(&[1, 2, 3, STAR], &[(1, 2, 0), (2, 3, 0), (3, 1, 0)]);
        assert_eq!(find_competing_frequencies(&cyc), Some((1, 2)));
        assert_eq!(competing_pairs(cyc.graph()).len(), 3);
    }

    #[test]
    fn standard_form_rehomes_edges_of_v2() {
        let s = spec(&[1, 2, 3, STAR], &[(1, 2, 0), (2, 1, 0), (2, 3, 4), (STAR, 2, -1)]);
        assert!(!is_standard_form(s.graph(), 1, 2));
        let t = to_standard_form(&s, 1, 2).unwrap();
        assert!(is_standard_form(t.graph(), 1, 2));
        assert!(t.graph().contains_edge(&Edge::new(1, 3, 4)));
        assert!(t.graph().contains_edge(&Edge::new(STAR, 1, -1)));
        let b = canonical_box([s.graph(), t.graph()]);
        let r = check_partition(s.graph(), &[t.graph()], &b, &EnumerationLimits::default()).unwrap();
        assert!(r.pass);
        assert_eq!(
            to_standard_form(&spec(&[1, 2, STAR], &[]), 1, 2),
            Err(ClassifyError::NotCompeting(1, 2))
        );
    }

    #[test]
    fn classify_examples() {
        let sep = spec(&[0, 1, 2, 3, STAR], &[(0, 1, 2), (2, 3, 1), (STAR, 0, 0), (STAR, 2, 0)]);
        assert!(matches!(classify(&sep).goodness, Goodness::Separable(_, _)));

        let semi = spec(&[0, 1, 2, STAR], &[(0, 1, 1), (0, 2, 1), (STAR, 0, 3)]);
        let c = classify(&semi);
        assert_eq!(c.goodness, Goodness::SemiDirectDominant);
        assert_eq!(c.kind, FrequencyKind::DominantFrequency(0));

        let comp = spec(&[1, 2, 3, STAR], &[(1, 2, 0), (2, 1, 0), (1, 3, 2), (STAR, 1, 0)]);
        let c = classify(&comp);
        assert_eq!(c.goodness, Goodness::SemiDirectCompeting);
        assert_eq!(c.kind, FrequencyKind::CompetingFrequencies(1, 2));

        let bad = spec(&[0, 1, STAR], &[(0, 1, 0), (STAR, 0, 0), (STAR, 1, 0)]);
        let c = classify(&bad);
        assert_eq!(c.goodness, Goodness::NotGood);
        assert_eq!(c.kind, FrequencyKind::Neither);

        let empty = spec(&[0, 1, STAR], &[(0, 1, 1), (1, 0, 0)]);
        assert!(classify(&empty).empty_omega);
    }

    #[test]
    fn order_one_and_a_half_is_good() {
        let s = spec(&[0, STAR], &[(STAR, 0, 2), (0, STAR, -5)]);
        assert_eq!(classify(&s).goodness, Goodness::SemiDirectDominant);
    }
}

//! Weighted directed graphs over small integer vertex ids.
//!
//! An edge `(src, dst, A)` stands for the difference constraint
//! `j_src >= j_dst + A`. Edges form a multiset; the edge list of a [`Graph`]
//! is always kept sorted by `(src, dst, weight)` so every traversal is
//! deterministic.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

pub type VertexId = u32;

/// A set of vertex ids.
pub type VertexSet = BTreeSet<VertexId>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub src: VertexId,
    pub dst: VertexId,
    pub weight: i64,
}

impl Edge {
    pub const fn new(src: VertexId, dst: VertexId, weight: i64) -> Self {
        Edge { src, dst, weight }
    }

    /// The complementary constraint `j_dst >= j_src - A + 1`.
    pub const fn dual(self) -> Self {
        Edge { src: self.dst, dst: self.src, weight: 1 - self.weight }
    }

    pub const fn is_loop(&self) -> bool {
        self.src == self.dst
    }

    pub const fn touches(&self, v: VertexId) -> bool {
        self.src == v || self.dst == v
    }

    /// The endpoint opposite to `v`, if `v` is an endpoint.
    pub fn other(&self, v: VertexId) -> Option<VertexId> {
        if self.src == v {
            Some(self.dst)
        } else if self.dst == v {
            Some(self.src)
        } else {
            None
        }
    }

    /// Identity of the edge up to replacement by its dual.
    ///
    /// `e` and `e.dual()` share the key, so any choice made by key is stable
    /// under edge reversal.
    pub fn undirected_key(&self) -> (VertexId, VertexId, i64) {
        if self.src <= self.dst {
            (self.src, self.dst, self.weight)
        } else {
            (self.dst, self.src, 1 - self.weight)
        }
    }

    /// Whether the constraint holds at the given coordinates.
    pub fn holds(&self, j_src: i64, j_dst: i64) -> bool {
        j_src >= j_dst.saturating_add(self.weight)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.src, self.dst, self.weight)
    }
}

pub fn dual(e: Edge) -> Edge {
    e.dual()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphError {
    UnknownVertex(VertexId),
    AbsentEdge(Edge),
    OverlappingSets(VertexId),
    DistinguishedNotInGraph(VertexId),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::UnknownVertex(v) => write!(f, "vertex {v} is not in the graph"),
            GraphError::AbsentEdge(e) => write!(f, "edge {e} is not in the graph"),
            GraphError::OverlappingSets(v) => write!(f, "vertex sets overlap at {v}"),
            GraphError::DistinguishedNotInGraph(v) => {
                write!(f, "distinguished vertex {v} is not in the graph")
            }
        }
    }
}

/// A finite weighted directed multigraph, optionally with one distinguished
/// vertex (the maximal index `v_*`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct Graph {
    vertices: VertexSet,
    edges: Vec<Edge>,
    distinguished: Option<VertexId>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    vertices: Vec<VertexId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    distinguished: Option<VertexId>,
    edges: Vec<Edge>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = GraphError;

    fn try_from(raw: RawGraph) -> Result<Self, Self::Error> {
        let g = Graph::new(raw.vertices, raw.edges)?;
        match raw.distinguished {
            Some(v) => g.with_distinguished(v),
            None => Ok(g),
        }
    }
}

impl From<Graph> for RawGraph {
    fn from(g: Graph) -> Self {
        RawGraph {
            vertices: g.vertices.into_iter().collect(),
            distinguished: g.distinguished,
            edges: g.edges,
        }
    }
}

impl Graph {
    pub fn new(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self, GraphError> {
        let vertices: VertexSet = vertices.into_iter().collect();
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        for e in &edges {
            for v in [e.src, e.dst] {
                if !vertices.contains(&v) {
                    return Err(GraphError::UnknownVertex(v));
                }
            }
        }
        edges.sort_unstable();
        Ok(Graph { vertices, edges, distinguished: None })
    }

    /// Edgeless graph on the given vertices.
    pub fn edgeless(vertices: impl IntoIterator<Item = VertexId>) -> Self {
        Graph { vertices: vertices.into_iter().collect(), edges: Vec::new(), distinguished: None }
    }

    pub fn with_distinguished(mut self, v: VertexId) -> Result<Self, GraphError> {
        if !self.vertices.contains(&v) {
            return Err(GraphError::DistinguishedNotInGraph(v));
        }
        self.distinguished = Some(v);
        Ok(self)
    }

    pub fn without_distinguished(mut self) -> Self {
        self.distinguished = None;
        self
    }

    pub fn vertices(&self) -> &VertexSet {
        &self.vertices
    }

    /// Vertices other than the distinguished one.
    pub fn free_vertices(&self) -> VertexSet {
        let mut vs = self.vertices.clone();
        if let Some(d) = self.distinguished {
            vs.remove(&d);
        }
        vs
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn distinguished(&self) -> Option<VertexId> {
        self.distinguished
    }

    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    pub fn complexity(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.edges.binary_search(e).is_ok()
    }

    pub fn multiplicity(&self, e: &Edge) -> usize {
        self.edges.iter().filter(|x| *x == e).count()
    }

    /// `G|_{keep}`: the vertices in `keep` and the edges with both endpoints
    /// in `keep`. The distinguished mark survives only if its vertex does.
    pub fn restrict(&self, keep: &VertexSet) -> Result<Graph, GraphError> {
        if let Some(v) = keep.iter().find(|v| !self.vertices.contains(v)) {
            return Err(GraphError::UnknownVertex(*v));
        }
        Ok(Graph {
            vertices: keep.clone(),
            edges: self
                .edges
                .iter()
                .filter(|e| keep.contains(&e.src) && keep.contains(&e.dst))
                .copied()
                .collect(),
            distinguished: self.distinguished.filter(|d| keep.contains(d)),
        })
    }

    /// `G - V'`, the restriction to the complement of `drop`.
    pub fn remove_vertices(&self, drop: &VertexSet) -> Result<Graph, GraphError> {
        if let Some(v) = drop.iter().find(|v| !self.vertices.contains(v)) {
            return Err(GraphError::UnknownVertex(*v));
        }
        let keep: VertexSet = self.vertices.difference(drop).copied().collect();
        self.restrict(&keep)
    }

    /// `G ∪ E'`; multiplicities add up.
    pub fn union_edges(&self, extra: &[Edge]) -> Result<Graph, GraphError> {
        let mut g = self.clone();
        for e in extra {
            for v in [e.src, e.dst] {
                if !g.vertices.contains(&v) {
                    return Err(GraphError::UnknownVertex(v));
                }
            }
            let at = g.edges.partition_point(|x| x < e);
            g.edges.insert(at, *e);
        }
        Ok(g)
    }

    pub fn with_edge(&self, e: Edge) -> Result<Graph, GraphError> {
        self.union_edges(&[e])
    }

    /// `G - E'`; removes one copy per listed edge.
    pub fn remove_edges(&self, drop: &[Edge]) -> Result<Graph, GraphError> {
        let mut g = self.clone();
        for e in drop {
            match g.edges.binary_search(e) {
                Ok(at) => {
                    g.edges.remove(at);
                }
                Err(_) => return Err(GraphError::AbsentEdge(*e)),
            }
        }
        Ok(g)
    }

    pub fn without_edge(&self, e: Edge) -> Result<Graph, GraphError> {
        self.remove_edges(&[e])
    }

    /// First edge whose removal leaves the polytope unchanged for purely local
    /// reasons: a self-loop of non-positive weight, or a parallel edge with a
    /// weight no larger than another edge between the same ordered pair.
    pub fn dominated_edge(&self) -> Option<Edge> {
        for (i, e) in self.edges.iter().enumerate() {
            if e.is_loop() && e.weight <= 0 {
                return Some(*e);
            }
            // sorted order: a later edge with the same (src, dst) has weight >= e.weight
            if let Some(next) = self.edges.get(i + 1) {
                if next.src == e.src && next.dst == e.dst {
                    return Some(*e);
                }
            }
        }
        None
    }

    /// Removes every dominated edge; returns the reduced graph and the
    /// removed edges in removal order.
    pub fn dedupe(&self) -> (Graph, Vec<Edge>) {
        let mut g = self.clone();
        let mut removed = Vec::new();
        while let Some(e) = g.dominated_edge() {
            g = g.without_edge(e).expect("dominated edge is present");
            removed.push(e);
        }
        (g, removed)
    }

    /// Whether some edge has one endpoint in `a` and the other in `b`.
    pub fn adjacent(&self, a: &VertexSet, b: &VertexSet) -> Result<bool, GraphError> {
        for v in a.iter().chain(b.iter()) {
            if !self.vertices.contains(v) {
                return Err(GraphError::UnknownVertex(*v));
            }
        }
        if let Some(v) = a.intersection(b).next() {
            return Err(GraphError::OverlappingSets(*v));
        }
        Ok(self.edges.iter().any(|e| {
            (a.contains(&e.src) && b.contains(&e.dst)) || (b.contains(&e.src) && a.contains(&e.dst))
        }))
    }

    /// Undirected neighbours of `v` (without multiplicity, excluding `v`).
    pub fn neighbours(&self, v: VertexId) -> VertexSet {
        self.edges.iter().filter_map(|e| e.other(v)).filter(|w| *w != v).collect()
    }

    /// Undirected degree of `v`, counting edge multiplicity.
    pub fn degree(&self, v: VertexId) -> usize {
        self.edges.iter().filter(|e| e.touches(v) && !e.is_loop()).count()
            + 2 * self.edges.iter().filter(|e| e.is_loop() && e.src == v).count()
    }

    /// Connected components of the undirected graph on `within`, using only
    /// edges with both endpoints in `within`. Components are listed by
    /// smallest member.
    pub fn components(&self, within: &VertexSet) -> Vec<VertexSet> {
        let mut seen = VertexSet::new();
        let mut out = Vec::new();
        for &start in within {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = VertexSet::new();
            let mut queue = VecDeque::from([start]);
            seen.insert(start);
            while let Some(v) = queue.pop_front() {
                comp.insert(v);
                for e in &self.edges {
                    if let Some(w) = e.other(v) {
                        if within.contains(&w) && seen.insert(w) {
                            queue.push_back(w);
                        }
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// Shortest undirected path from `from` to `to` as a vertex sequence.
    /// Ties are broken towards smaller vertex ids.
    pub fn undirected_path(&self, from: VertexId, to: VertexId) -> Option<Vec<VertexId>> {
        let mut parent: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        let mut queue = VecDeque::from([from]);
        let mut seen = VertexSet::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                let mut path = alloc::vec![to];
                let mut cur = to;
                while let Some(&p) = parent.get(&cur) {
                    path.push(p);
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            for w in self.neighbours(v) {
                if seen.insert(w) {
                    parent.insert(w, v);
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// Some undirected circuit (self-loops and antiparallel or parallel pairs
    /// included), or `None` if the undirected multigraph is a forest.
    ///
    /// The search visits edges by [`Edge::undirected_key`], so reversing edges
    /// never changes which circuit is reported.
    pub fn find_undirected_circuit(&self) -> Option<UndirectedCircuit> {
        let mut order: Vec<Edge> = self.edges.clone();
        order.sort_by_key(|e| (e.undirected_key(), *e));
        // forest built so far, as adjacency lists of edges
        let mut forest: Vec<Edge> = Vec::new();
        let mut uf = UnionFind::new(&self.vertices);
        for e in order {
            if e.is_loop() {
                return Some(UndirectedCircuit { vertices: alloc::vec![e.src], edges: alloc::vec![e] });
            }
            if uf.union(e.src, e.dst) {
                forest.push(e);
                continue;
            }
            // e closes a cycle: find the forest path dst -> src
            let tree = Graph { vertices: self.vertices.clone(), edges: forest.clone(), distinguished: None };
            let path = tree.undirected_path(e.dst, e.src).expect("endpoints share a component");
            let mut edges = Vec::with_capacity(path.len());
            for w in path.windows(2) {
                let step = *forest
                    .iter()
                    .find(|x| (x.src == w[0] && x.dst == w[1]) || (x.src == w[1] && x.dst == w[0]))
                    .expect("forest edge on path");
                edges.push(step);
            }
            edges.push(e);
            return Some(UndirectedCircuit { vertices: path, edges }.canonical());
        }
        None
    }

    /// Whether the undirected multigraph on all vertices has no circuit.
    pub fn is_forest(&self) -> bool {
        self.find_undirected_circuit().is_none()
    }

    /// Multiset difference `self - other` on edges. Errors if `other` is not
    /// contained in `self`.
    pub fn edge_difference(&self, other: &[Edge]) -> Result<Vec<Edge>, GraphError> {
        Ok(self.remove_edges(other)?.edges)
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vertices:")?;
        for v in &self.vertices {
            if Some(*v) == self.distinguished {
                write!(f, " *{v}")?;
            } else {
                write!(f, " {v}")?;
            }
        }
        for e in &self.edges {
            write!(f, "; {e}")?;
        }
        Ok(())
    }
}

/// A circuit of the underlying undirected multigraph.
///
/// `edges[i]` joins `vertices[i]` and `vertices[(i + 1) % len]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndirectedCircuit {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<Edge>,
}

impl UndirectedCircuit {
    /// Rotates to start at the smallest vertex and picks the traversal
    /// direction by comparing undirected keys, so the result depends only on
    /// the edges up to reversal.
    fn canonical(mut self) -> Self {
        let n = self.vertices.len();
        let start = (0..n).min_by_key(|&i| self.vertices[i]).unwrap_or(0);
        self.vertices.rotate_left(start);
        self.edges.rotate_left(start);
        if n >= 2 && self.edges[n - 1].undirected_key() < self.edges[0].undirected_key() {
            self.vertices[1..].reverse();
            self.edges.reverse();
        }
        self
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Total weight when every edge is oriented along the traversal direction
    /// (`forward`) or against it, replacing misoriented edges by their duals.
    pub fn oriented_weight(&self, forward: bool) -> i64 {
        self.edges_to_reverse(forward).1
    }

    /// Edges that disagree with the chosen traversal direction, and the total
    /// weight after reversing them.
    pub fn edges_to_reverse(&self, forward: bool) -> (Vec<Edge>, i64) {
        let n = self.vertices.len();
        let mut reverse = Vec::new();
        let mut total = 0i64;
        for (i, e) in self.edges.iter().enumerate() {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
            let (from, _to) = if forward { (a, b) } else { (b, a) };
            if e.is_loop() || e.src == from {
                total += e.weight;
            } else {
                total += 1 - e.weight;
                reverse.push(*e);
            }
        }
        (reverse, total)
    }

    /// The orientation with positive total weight (forward preferred) and the
    /// edges that must be reversed to realise it.
    ///
    /// The forward and backward totals sum to the circuit length, so at least
    /// one of them is positive.
    pub fn positive_orientation(&self) -> (bool, Vec<Edge>) {
        let (fwd, w) = self.edges_to_reverse(true);
        if w > 0 {
            return (true, fwd);
        }
        let (bwd, w2) = self.edges_to_reverse(false);
        debug_assert!(w2 > 0);
        (false, bwd)
    }
}

struct UnionFind {
    parent: BTreeMap<VertexId, VertexId>,
}

impl UnionFind {
    fn new(vs: &VertexSet) -> Self {
        UnionFind { parent: vs.iter().map(|&v| (v, v)).collect() }
    }

    fn find(&mut self, v: VertexId) -> VertexId {
        let mut root = v;
        while self.parent[&root] != root {
            root = self.parent[&root];
        }
        let mut cur = v;
        while self.parent[&cur] != root {
            let next = self.parent[&cur];
            self.parent.insert(cur, root);
            cur = next;
        }
        root
    }

    /// Returns false if already joined.
    fn union(&mut self, a: VertexId, b: VertexId) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent.insert(hi, lo);
        true
    }
}

/// Sum of edge weights along `path`, or `None` if consecutive edges do not
/// chain head to tail.
pub fn path_weight(path: &[Edge]) -> Option<i64> {
    for w in path.windows(2) {
        if w[0].dst != w[1].src {
            return None;
        }
    }
    Some(path.iter().map(|e| e.weight).sum())
}

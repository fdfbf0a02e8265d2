//! Rewriting maximal paraproducts into good pieces and vanishing terms.
//!
//! Nodes are expanded breadth-first. At each node the engine, in order:
//! emits a vanishing leaf when `Ω` is empty, emits a good leaf when the
//! classifier accepts the node, drops one locally redundant edge, or applies
//! the rule dictated by the node phase.
//!
//! * Generic: adjoin a star hierarchy at a dominant frequency; otherwise pass
//!   to standard form at the first competing pair; otherwise split on a zero
//!   edge for the first pair of vertices with an undetermined order.
//! * Competing: orient undirected circuits of `G - {v2}` into positive
//!   directed circuits; then walk `v_*` towards `v1` by chain splits.
//! * Dominant: orient circuits of the non-hierarchy edges; rehome inner edges
//!   into the hierarchy, climbing the ancestor chain of the displaced link;
//!   finally lower the total ranking of the neighbours of `v_*`.

use alloc::boxed::Box;
use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::certificate::{
    apply_rule, check_rule_identity, competing_state, dominant_state, free_complexity, measure, CertNode, Certificate,
    CompetingStage, DominantStage, LeafKind, NodeBody, Phase, RewriteRule, VanishReason, CERTIFICATE_FORMAT_VERSION,
};
use crate::classify::{
    classify_graph, competing_pairs, dominant_frequency, feasible_relations, graph_has_dominant_frequency,
    is_standard_form, forced_equal, MaxParaproductSpec,
};
use crate::feasibility::{feasible, find_positive_circuit};
use crate::graph::{Edge, Graph, VertexId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecomposeConfig {
    /// Hard cap on the number of certificate nodes.
    pub node_budget: usize,
    /// Record an identity report at every internal node.
    pub check_identities: bool,
    /// Largest canonical box, in lattice points, that is also enumerated.
    pub enumeration_cap: u128,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        DecomposeConfig { node_budget: 100_000, check_identities: true, enumeration_cap: 1 << 14 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DecomposeError {
    Precondition(String),
    BudgetExceeded { budget: usize, partial: Box<Certificate> },
    /// A step the theory rules out; indicates a defect.
    Internal { node: usize, message: String },
}

impl fmt::Display for DecomposeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecomposeError::Precondition(m) => write!(f, "precondition violated: {m}"),
            DecomposeError::BudgetExceeded { budget, partial } => write!(
                f,
                "node budget {budget} exceeded ({} nodes built, {} open)",
                partial.nodes.len(),
                partial.nodes.iter().filter(|n| matches!(n.body, NodeBody::Open)).count()
            ),
            DecomposeError::Internal { node, message } => write!(f, "internal error at node {node}: {message}"),
        }
    }
}

struct Builder<'a> {
    cfg: &'a DecomposeConfig,
    nodes: Vec<CertNode>,
    queue: VecDeque<usize>,
}

impl<'a> Builder<'a> {
    fn push(&mut self, graph: Graph, phase: Phase, parent: Option<usize>) -> usize {
        let id = self.nodes.len();
        let depth = parent.map_or(0, |p| self.nodes[p].depth + 1);
        self.nodes.push(CertNode {
            id,
            parent,
            depth,
            complexity: graph.complexity(),
            free_complexity: free_complexity(&graph, &phase),
            graph,
            phase,
            measure: Vec::new(),
            body: NodeBody::Open,
        });
        self.queue.push_back(id);
        id
    }

    fn internal(&self, node: usize, message: String) -> DecomposeError {
        DecomposeError::Internal { node, message }
    }

    fn leaf(&mut self, id: usize, leaf: LeafKind) {
        let n = &mut self.nodes[id];
        n.phase = Phase::Terminal;
        n.free_complexity = n.complexity;
        n.measure = measure(&n.graph, &Phase::Terminal).expect("terminal measure");
        n.body = NodeBody::Leaf { leaf };
    }

    fn expand(&mut self, id: usize) -> Result<(), DecomposeError> {
        let g = self.nodes[id].graph.clone();
        let phase = self.nodes[id].phase.clone();
        if !feasible(&g) {
            let circuit = find_positive_circuit(&g);
            self.leaf(id, LeafKind::Vanish { reason: VanishReason::PositiveCircuit, circuit, dominant: None });
            return Ok(());
        }
        let classification = classify_graph(&g);
        if classification.goodness.is_good() {
            self.leaf(id, LeafKind::Good { classification });
            return Ok(());
        }
        if phase == Phase::Terminal {
            return Err(self.internal(id, format!("expected a good leaf, got {:?}", classification.goodness)));
        }
        let rule = match g.dominated_edge() {
            Some(edge) => RewriteRule::DropRedundant { edge },
            None => self.step(id, &g, &phase)?,
        };
        let children = apply_rule(&g, &phase, &rule).map_err(|m| self.internal(id, m))?;
        let parent_measure = measure(&g, &phase).map_err(|m| self.internal(id, m))?;
        let identity = if self.cfg.check_identities {
            let refs: Vec<&Graph> = children.iter().map(|(c, _)| c).collect();
            Some(
                check_rule_identity(&rule, &g, &refs, self.cfg.enumeration_cap)
                    .map_err(|e| self.internal(id, format!("{e}")))?,
            )
        } else {
            None
        };
        self.nodes[id].measure = parent_measure;
        let mut ids = Vec::with_capacity(children.len());
        for (c, p) in children {
            ids.push(self.push(c, p, Some(id)));
        }
        self.nodes[id].body = NodeBody::Internal { rule, children: ids, identity };
        Ok(())
    }

    fn step(&self, id: usize, g: &Graph, phase: &Phase) -> Result<RewriteRule, DecomposeError> {
        let vstar = g.distinguished().ok_or_else(|| self.internal(id, String::from("no distinguished vertex")))?;
        match phase {
            Phase::Generic => {
                if let Some(root) = dominant_frequency(g) {
                    return Ok(RewriteRule::AdjoinHierarchy { root });
                }
                if let Some(&(v1, v2)) = competing_pairs(g).first() {
                    return Ok(RewriteRule::StandardForm { v1, v2 });
                }
                let vs: Vec<VertexId> = g.free_vertices().into_iter().collect();
                for (i, &v) in vs.iter().enumerate() {
                    for &w in &vs[i + 1..] {
                        let rel = feasible_relations(g, v, w);
                        if rel.iter().filter(|x| **x).count() >= 2 {
                            // j_v < j_w attainable: split on j_v >= j_w
                            let edge = if rel[0] { Edge::new(v, w, 0) } else { Edge::new(w, v, 0) };
                            return Ok(RewriteRule::ZeroEdgeSaturate { v, w, edge });
                        }
                    }
                }
                Err(self.internal(id, String::from("total order without a dominant or competing vertex")))
            }
            Phase::Competing { v1, v2 } => match competing_state(g, *v1, *v2).map_err(|m| self.internal(id, m))? {
                CompetingStage::Circuit { reversals } => match reversals.first() {
                    Some(&edge) => Ok(RewriteRule::ReverseEdge { edge }),
                    None => Err(self.internal(id, String::from("positive circuit in a feasible graph"))),
                },
                CompetingStage::Path { path, edges } if edges.len() >= 2 => {
                    if edges[0].src != path[0] {
                        return Ok(RewriteRule::ReverseEdge { edge: edges[0] });
                    }
                    if edges[1].src != path[1] {
                        return Ok(RewriteRule::ReverseEdge { edge: edges[1] });
                    }
                    let (e1, e2) = (edges[0], edges[1]);
                    let e3 = Edge::new(vstar, e2.dst, e1.weight + e2.weight);
                    Ok(RewriteRule::SepChain { e1, e2, e3 })
                }
                other => Err(self.internal(id, format!("competing node is not good: {other:?}"))),
            },
            Phase::Dominant { root, hierarchy, focus } => {
                let st = dominant_state(g, *root, hierarchy, *focus).map_err(|m| self.internal(id, m))?;
                match st.stage {
                    DominantStage::Circuit { reversals } => match reversals.first() {
                        Some(&edge) => Ok(RewriteRule::ReverseEdge { edge }),
                        None => Err(self.internal(id, String::from("positive circuit in a feasible graph"))),
                    },
                    DominantStage::Inner { present, oriented } => {
                        if present != oriented {
                            return Ok(RewriteRule::ReverseEdge { edge: present });
                        }
                        if st.hierarchy.on_path(oriented.dst, oriented.src) {
                            return Err(self.internal(id, String::from("edge into an ancestor in a feasible graph")));
                        }
                        let link = st.hierarchy.link(oriented.dst).expect("non-root vertex has a link");
                        Ok(RewriteRule::HierarchyCase1 { edge: oriented, link })
                    }
                    DominantStage::Outer { chosen, .. } => {
                        let Some((present, oriented)) = chosen else {
                            return Err(self.internal(id, String::from("total ranking zero but not semi-direct")));
                        };
                        if present != oriented {
                            return Ok(RewriteRule::ReverseEdge { edge: present });
                        }
                        let link = st.hierarchy.link(oriented.dst).expect("positive ranking has a link");
                        let bridge = Edge::new(vstar, link.src, oriented.weight - link.weight);
                        Ok(RewriteRule::HierarchyCase2 { edge: oriented, link, bridge })
                    }
                }
            }
            Phase::Terminal => Err(self.internal(id, String::from("terminal node expanded"))),
        }
    }

    fn finish(self, root: Graph) -> Certificate {
        let mut cert = Certificate { format_version: CERTIFICATE_FORMAT_VERSION, root, nodes: self.nodes, stats: Default::default() };
        for n in cert.nodes.iter_mut().filter(|n| n.measure.is_empty()) {
            n.measure = measure(&n.graph, &n.phase).unwrap_or_default();
        }
        cert.stats = cert.compute_stats();
        cert
    }
}

fn run(root: Graph, phase: Phase, cfg: &DecomposeConfig) -> Result<Certificate, DecomposeError> {
    let mut b = Builder { cfg, nodes: Vec::new(), queue: VecDeque::new() };
    b.push(root.clone(), phase, None);
    while let Some(id) = b.queue.pop_front() {
        if b.nodes.len() > cfg.node_budget {
            let budget = cfg.node_budget;
            return Err(DecomposeError::BudgetExceeded { budget, partial: Box::new(b.finish(root)) });
        }
        b.expand(id)?;
    }
    Ok(b.finish(root))
}

fn check_complexity(spec: &MaxParaproductSpec) -> Result<(), DecomposeError> {
    let (deduped, _) = spec.graph().dedupe();
    let n = spec.free_vertices().len();
    if deduped.complexity() > (n + 1) * (n + 1) {
        return Err(DecomposeError::Precondition(format!(
            "complexity {} exceeds {} after removing redundant edges",
            deduped.complexity(),
            (n + 1) * (n + 1)
        )));
    }
    Ok(())
}

/// Rewrites `spec` into good maximal paraproducts and vanishing terms.
pub fn decompose(spec: &MaxParaproductSpec, cfg: &DecomposeConfig) -> Result<Certificate, DecomposeError> {
    check_complexity(spec)?;
    run(spec.graph().clone(), Phase::Generic, cfg)
}

/// The competing-frequency recursion alone, for a spec in standard form.
pub fn competing_case(
    spec: &MaxParaproductSpec,
    v1: VertexId,
    v2: VertexId,
    cfg: &DecomposeConfig,
) -> Result<Certificate, DecomposeError> {
    let g = spec.graph();
    if v1 == spec.vstar() || v2 == spec.vstar() || !forced_equal(g, v1, v2) || v1 == v2 {
        return Err(DecomposeError::Precondition(format!("{v1}, {v2} are not competing frequencies")));
    }
    if !is_standard_form(g, v1, v2) {
        return Err(DecomposeError::Precondition(format!("not in standard form for {v1}, {v2}")));
    }
    run(g.clone(), Phase::Competing { v1, v2 }, cfg)
}

/// The dominant-frequency recursion, starting from adjoining the star
/// hierarchy at `v0`.
pub fn dominant_case(spec: &MaxParaproductSpec, v0: VertexId, cfg: &DecomposeConfig) -> Result<Certificate, DecomposeError> {
    let g = spec.graph();
    if v0 == spec.vstar() || !g.contains_vertex(v0) || !graph_has_dominant_frequency(g, v0) {
        return Err(DecomposeError::Precondition(format!("{v0} is not a dominant frequency")));
    }
    run(g.clone(), Phase::Generic, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::Goodness;

    const STAR: VertexId = 9;

    fn spec(vs: &[VertexId], es: &[(VertexId, VertexId, i64)]) -> MaxParaproductSpec {
        let g = Graph::new(vs.iter().copied(), es.iter().map(|&(a, b, w)| Edge::new(a, b, w)))
            .unwrap()
            .with_distinguished(STAR)
            .unwrap();
        MaxParaproductSpec::new(g).unwrap()
    }

    fn assert_sound(cert: &Certificate) {
        for n in &cert.nodes {
            if let NodeBody::Internal { children, identity, .. } = &n.body {
                assert!(identity.as_ref().unwrap().pass, "identity at node {}", n.id);
                for &c in children {
                    assert!(cert.nodes[c].measure < n.measure, "measure at {} -> {}", n.id, c);
                }
            }
            assert!(!matches!(n.body, NodeBody::Open));
        }
    }

    #[test]
    fn good_spec_is_a_single_leaf() {
        let cert = decompose(&spec(&[0, 1, STAR], &[(0, 1, 1), (STAR, 0, 0)]), &Default::default()).unwrap();
        assert_eq!(cert.nodes.len(), 1);
        assert_eq!(cert.stats.leaf_count, 1);
    }

    #[test]
    fn order_one_and_a_half_is_a_leaf() {
        let cert = decompose(&spec(&[0, STAR], &[(STAR, 0, 3), (0, STAR, -7)]), &Default::default()).unwrap();
        assert_eq!(cert.nodes.len(), 1);
    }

    #[test]
    fn dominant_chain_to_vstar() {
        // v0 > 1 > 2 and v_* tied to 2
        let s = spec(&[0, 1, 2, STAR], &[(0, 1, 1), (1, 2, 1), (STAR, 2, 0), (2, STAR, 0)]);
        let cert = decompose(&s, &Default::default()).unwrap();
        assert_sound(&cert);
        assert!(cert.stats.rule_counts.contains_key("HierarchyCase1"));
    }

    #[test]
    fn competing_chain() {
        let s = spec(&[1, 2, 3, 4, STAR], &[(1, 2, 0), (2, 1, 0), (1, 3, 1), (3, 4, 2), (STAR, 4, -1)]);
        let cert = decompose(&s, &Default::default()).unwrap();
        assert_sound(&cert);
        assert!(cert.stats.rule_counts.contains_key("SepChain"));
    }

    #[test]
    fn unordered_vertices_are_saturated() {
        let s = spec(&[0, 1, 2, STAR], &[(STAR, 0, 0), (STAR, 1, 0), (STAR, 2, 0), (0, 1, -2)]);
        let cert = decompose(&s, &Default::default()).unwrap();
        assert_sound(&cert);
        for leaf in cert.leaves() {
            if let NodeBody::Leaf { leaf: LeafKind::Good { classification } } = &leaf.body {
                assert_ne!(classification.goodness, Goodness::NotGood);
            }
        }
    }

    #[test]
    fn budget_is_reported() {
        let s = spec(&[0, 1, 2, STAR], &[(STAR, 0, 0), (STAR, 1, 0), (STAR, 2, 0), (0, 1, -2), (1, 2, -2)]);
        let cfg = DecomposeConfig { node_budget: 2, ..Default::default() };
        match decompose(&s, &cfg) {
            Err(DecomposeError::BudgetExceeded { partial, .. }) => {
                assert!(partial.nodes.iter().any(|n| matches!(n.body, NodeBody::Open)))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn competing_case_requires_standard_form() {
        let s = spec(&[1, 2, 3, STAR], &[(1, 2, 0), (2, 1, 0), (2, 3, 1)]);
        assert!(matches!(competing_case(&s, 1, 2, &Default::default()), Err(DecomposeError::Precondition(_))));
    }
}

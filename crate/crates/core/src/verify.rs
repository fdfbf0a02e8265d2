//! Independent replay of certificates.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::certificate::{
    apply_rule, check_rule_identity, dominant_state, measure, Certificate, LeafKind, NodeBody, Phase, RewriteRule,
    VanishReason,
};
use crate::classify::{classify_graph, forced_equal, graph_has_dominant_frequency, is_standard_form};
use crate::feasibility::feasible;
use crate::graph::Graph;
use crate::identity::IdentityReport;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    /// Identities whose canonical box has at most this many lattice points
    /// are also checked by enumeration.
    pub enumeration_cap: u128,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { enumeration_cap: 1 << 16 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "failure")]
pub enum FailureKind {
    Structure { message: String },
    MeasureMismatch { recorded: Vec<i64>, recomputed: Vec<i64> },
    MeasureNotDecreasing { child: usize, parent: Vec<i64>, child_measure: Vec<i64> },
    Replay { message: String },
    Identity { report: IdentityReport },
    Hierarchy { message: String },
    Precondition { message: String },
    Leaf { message: String },
    Open,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub node: usize,
    /// node ids from the root to the failing node
    pub path: Vec<usize>,
    pub kind: FailureKind,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub pass: bool,
    pub nodes_checked: usize,
    pub identities_checked: usize,
    pub identities_enumerated: usize,
    pub failures: Vec<Failure>,
}

/// Per-node outcome; see [`verify_node`].
#[derive(Clone, Debug, Default)]
pub struct NodeCheck {
    pub identity_checked: bool,
    pub identity_enumerated: bool,
    pub failures: Vec<FailureKind>,
}

fn structure(message: String) -> FailureKind {
    FailureKind::Structure { message }
}

/// Checks one node against its recorded children. Nodes are independent of
/// one another, so this may be run in any order or in parallel.
pub fn verify_node(cert: &Certificate, id: usize, cfg: &VerifyConfig) -> NodeCheck {
    let mut out = NodeCheck::default();
    let Some(node) = cert.nodes.get(id) else {
        out.failures.push(structure(format!("node {id} does not exist")));
        return out;
    };
    let f = &mut out.failures;
    if node.id != id {
        f.push(structure(format!("node at index {id} carries id {}", node.id)));
    }
    match (id, node.parent) {
        (0, None) => {
            if node.graph != cert.root {
                f.push(structure(String::from("root node graph differs from the certificate root")));
            }
        }
        (0, Some(_)) => f.push(structure(String::from("root has a parent"))),
        (_, None) => f.push(structure(String::from("non-root node without a parent"))),
        (_, Some(p)) => {
            let listed = match cert.nodes.get(p).map(|n| &n.body) {
                Some(NodeBody::Internal { children, .. }) => children.contains(&id),
                _ => false,
            };
            if p >= id || !listed {
                f.push(structure(format!("parent {p} does not list this node")));
            }
            if cert.nodes.get(p).map(|n| n.depth + 1) != Some(node.depth) {
                f.push(structure(String::from("depth is not parent depth plus one")));
            }
        }
    }
    if node.complexity != node.graph.complexity() {
        f.push(structure(String::from("recorded complexity differs from the graph")));
    }
    match measure(&node.graph, &node.phase) {
        Ok(m) if m != node.measure => f.push(FailureKind::MeasureMismatch { recorded: node.measure.clone(), recomputed: m }),
        Ok(_) => {}
        Err(message) => f.push(FailureKind::Hierarchy { message }),
    }
    if let Phase::Competing { v1, v2 } = node.phase {
        if !matches!(node.body, NodeBody::Leaf { .. })
            && feasible(&node.graph)
            && (!forced_equal(&node.graph, v1, v2) || !is_standard_form(&node.graph, v1, v2))
        {
            f.push(FailureKind::Precondition {
                message: format!("{v1}, {v2} are not competing frequencies in standard form"),
            });
        }
    }
    match &node.body {
        NodeBody::Open => f.push(FailureKind::Open),
        NodeBody::Leaf { leaf } => {
            if node.phase != Phase::Terminal {
                f.push(FailureKind::Leaf { message: String::from("leaf not in the terminal phase") });
            }
            check_leaf(&node.graph, leaf, f);
        }
        NodeBody::Internal { rule, children, .. } => {
            if node.phase == Phase::Terminal {
                f.push(FailureKind::Replay { message: String::from("terminal node has children") });
            }
            let kids: Vec<_> = children.iter().filter_map(|&c| cert.nodes.get(c)).collect();
            if kids.len() != children.len() {
                f.push(structure(String::from("child id out of range")));
                return out;
            }
            match apply_rule(&node.graph, &node.phase, rule) {
                Err(message) => f.push(FailureKind::Replay { message }),
                Ok(expected) if expected.len() != kids.len() => f.push(FailureKind::Replay {
                    message: format!("rule yields {} children, {} recorded", expected.len(), kids.len()),
                }),
                Ok(expected) => {
                    for ((g, p), kid) in expected.iter().zip(&kids) {
                        if *g != kid.graph {
                            f.push(FailureKind::Replay { message: format!("child {} graph differs from replay", kid.id) });
                        }
                        let is_leaf = matches!(kid.body, NodeBody::Leaf { .. });
                        let phase_ok = *p == kid.phase || (is_leaf && kid.phase == Phase::Terminal);
                        if !phase_ok {
                            f.push(FailureKind::Replay { message: format!("child {} phase differs from replay", kid.id) });
                        }
                        if *p == Phase::Terminal && !is_leaf {
                            f.push(FailureKind::Replay { message: format!("child {} should be a leaf", kid.id) });
                        }
                    }
                }
            }
            for kid in &kids {
                if kid.measure >= node.measure {
                    f.push(FailureKind::MeasureNotDecreasing {
                        child: kid.id,
                        parent: node.measure.clone(),
                        child_measure: kid.measure.clone(),
                    });
                }
            }
            check_preconditions(&node.graph, &node.phase, rule, &kids.iter().map(|k| &k.graph).collect::<Vec<_>>(), f);
            let graphs: Vec<&Graph> = kids.iter().map(|k| &k.graph).collect();
            match check_rule_identity(rule, &node.graph, &graphs, cfg.enumeration_cap) {
                Ok(report) => {
                    out.identity_checked = true;
                    out.identity_enumerated = report.enumeration.is_some();
                    if !report.pass {
                        out.failures.push(FailureKind::Identity { report });
                    }
                }
                Err(e) => out.failures.push(FailureKind::Replay { message: format!("{e}") }),
            }
        }
    }
    out
}

fn check_leaf(g: &Graph, leaf: &LeafKind, f: &mut Vec<FailureKind>) {
    match leaf {
        LeafKind::Good { classification } => {
            let again = classify_graph(g);
            if !again.goodness.is_good() || again.empty_omega {
                f.push(FailureKind::Leaf { message: String::from("leaf is not good") });
            } else if again != *classification {
                f.push(FailureKind::Leaf { message: String::from("recorded classification differs") });
            }
        }
        LeafKind::Vanish { reason: VanishReason::PositiveCircuit, circuit, .. } => {
            if !circuit.as_ref().is_some_and(|c| c.certifies_empty(g)) {
                f.push(FailureKind::Leaf { message: String::from("vanishing leaf without a valid positive circuit") });
            }
        }
        LeafKind::Vanish { reason: VanishReason::DominantNonMaximal, dominant, .. } => {
            let ok = g.distinguished().is_none() && dominant.is_some_and(|v| graph_has_dominant_frequency(g, v));
            if !ok {
                f.push(FailureKind::Leaf { message: String::from("no dominant frequency in a non-maximal leaf") });
            }
        }
    }
}

fn check_preconditions(g: &Graph, phase: &Phase, rule: &RewriteRule, kids: &[&Graph], f: &mut Vec<FailureKind>) {
    let mut fail = |message: String| f.push(FailureKind::Precondition { message });
    match rule {
        RewriteRule::AdjoinHierarchy { root } => {
            if !graph_has_dominant_frequency(g, *root) {
                fail(format!("{root} is not a dominant frequency"));
            }
        }
        RewriteRule::StandardForm { v1, v2 } => {
            if !forced_equal(g, *v1, *v2) {
                fail(format!("{v1}, {v2} are not competing"));
            }
            if kids.len() == 1 && !is_standard_form(kids[0], *v1, *v2) {
                fail(String::from("child is not in standard form"));
            }
        }
        RewriteRule::SepChain { e1, .. } => {
            if Some(e1.src) != g.distinguished() {
                fail(format!("chain does not start at the distinguished vertex: {e1}"));
            }
        }
        RewriteRule::HierarchyCase1 { edge, link } => {
            let Phase::Dominant { root, hierarchy, focus } = phase else { return };
            let Ok(st) = dominant_state(g, *root, hierarchy, *focus) else { return };
            let h = &st.hierarchy;
            if edge.weight + h.depth(edge.src) <= h.depth(edge.dst) {
                fail(format!("{edge} does not raise the depth of {}", edge.dst));
            }
            if h.link(edge.dst) != Some(*link) {
                fail(format!("{link} is not the link of {}", edge.dst));
            }
            if h.on_path(edge.dst, edge.src) {
                fail(format!("{edge} points to an ancestor"));
            }
            let mut new_h: Vec<_> = hierarchy.iter().copied().filter(|e| e != link).collect();
            new_h.push(*edge);
            if let Some(kid) = kids.first() {
                match dominant_state(kid, *root, &new_h, None) {
                    Ok(k) => {
                        let shallower = g.vertices().iter().filter(|v| Some(**v) != g.distinguished()).any(|&v| {
                            k.hierarchy.entry(v).map(|e| e.depth) < h.entry(v).map(|e| e.depth)
                        });
                        if shallower {
                            fail(String::from("rehoming decreased a depth"));
                        }
                    }
                    Err(m) => fail(m),
                }
            }
        }
        RewriteRule::HierarchyCase2 { edge, link, .. } => {
            let Phase::Dominant { root, hierarchy, focus } = phase else { return };
            let Ok(st) = dominant_state(g, *root, hierarchy, *focus) else { return };
            if st.hierarchy.link(edge.dst) != Some(*link) {
                fail(format!("{link} is not the link of {}", edge.dst));
            }
        }
        _ => {}
    }
}

/// Replays every node: rules, polytope identities, hierarchy axioms,
/// induction measures and leaf classifications.
pub fn verify_certificate(cert: &Certificate) -> VerificationReport {
    verify_certificate_with(cert, &VerifyConfig::default())
}

pub fn verify_certificate_with(cert: &Certificate, cfg: &VerifyConfig) -> VerificationReport {
    let checks: Vec<NodeCheck> = (0..cert.nodes.len()).map(|i| verify_node(cert, i, cfg)).collect();
    assemble(cert, checks)
}

/// Builds the report from per-node checks listed by node id.
pub fn assemble(cert: &Certificate, checks: Vec<NodeCheck>) -> VerificationReport {
    let mut report = VerificationReport { nodes_checked: checks.len(), ..Default::default() };
    if cert.nodes.is_empty() {
        report.failures.push(Failure { node: 0, path: Vec::new(), kind: structure(String::from("no nodes")) });
    }
    if cert.stats != cert.compute_stats() {
        report.failures.push(Failure { node: 0, path: alloc::vec![0], kind: structure(String::from("recorded statistics differ")) });
    }
    for (id, c) in checks.into_iter().enumerate() {
        report.identities_checked += c.identity_checked as usize;
        report.identities_enumerated += c.identity_enumerated as usize;
        for kind in c.failures {
            report.failures.push(Failure { node: id, path: cert.path_to(id), kind });
        }
    }
    report.pass = report.failures.is_empty();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::MaxParaproductSpec;
    use crate::decompose::{decompose, DecomposeConfig};
    use crate::graph::Edge;

    fn spec(es: &[(u32, u32, i64)]) -> MaxParaproductSpec {
        let g = Graph::new([0, 1, 2, 9], es.iter().map(|&(a, b, w)| Edge::new(a, b, w)))
            .unwrap()
            .with_distinguished(9)
            .unwrap();
        MaxParaproductSpec::new(g).unwrap()
    }

    #[test]
    fn single_leaf_passes() {
        let cert = decompose(&spec(&[(0, 1, 1), (0, 2, 1)]), &DecomposeConfig::default()).unwrap();
        let r = verify_certificate(&cert);
        assert!(r.pass, "{r:?}");
        assert_eq!(r.nodes_checked, 1);
    }

    #[test]
    fn perturbed_child_is_located() {
        let s = spec(&[(0, 1, 1), (1, 2, 1), (9, 2, 0), (2, 9, 0)]);
        let mut cert = decompose(&s, &DecomposeConfig::default()).unwrap();
        assert!(verify_certificate(&cert).pass);
        let (pid, kid) = cert
            .nodes
            .iter()
            .find_map(|n| match &n.body {
                NodeBody::Internal { rule: RewriteRule::HierarchyCase1 { .. }, children, .. } => Some((n.id, children[0])),
                _ => None,
            })
            .unwrap();
        let g = cert.nodes[kid].graph.clone();
        // strengthen an edge that actually constrains the child polytope
        let mutated = g
            .edges()
            .iter()
            .map(|e| g.without_edge(*e).unwrap().with_edge(Edge::new(e.src, e.dst, e.weight + 1)).unwrap())
            .find(|m| crate::identity::exact_partition(&g, &[m]).unwrap().is_some())
            .unwrap();
        cert.nodes[kid].graph = mutated;
        let r = verify_certificate(&cert);
        assert!(!r.pass);
        let located = r.failures.iter().any(|f| {
            f.node == pid
                && matches!(&f.kind, FailureKind::Identity { report } if report.counterexample.is_some())
        });
        assert!(located, "{:?}", r.failures);
    }

    #[test]
    fn measure_tampering_is_caught() {
        let s = spec(&[(9, 0, 0), (9, 1, 0), (9, 2, 0), (0, 1, -2), (1, 2, -2)]);
        let mut cert = decompose(&s, &DecomposeConfig::default()).unwrap();
        cert.nodes[0].measure[1] = 0;
        let r = verify_certificate(&cert);
        assert!(r.failures.iter().any(|f| matches!(f.kind, FailureKind::MeasureMismatch { .. })));
    }
}

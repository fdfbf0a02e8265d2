//! Reduction plan for non-maximal paraproducts.
//!
//! Zero-edge saturation splits `Ω(G)` into pieces on which either one vertex
//! dominates (the form vanishes identically) or two vertices are forced
//! equal; the latter reduce to a maximal paraproduct of lower order on
//! `G|_{V - {v2}}` with `v1` distinguished.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::certificate::VanishReason;
use crate::classify::{competing_pairs, dominant_frequency, feasible_relations, graph_to_standard_form, MaxParaproductSpec};
use crate::feasibility::{find_positive_circuit, DirectedCircuit};
use crate::graph::{Edge, Graph, VertexId, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome")]
pub enum Reduction {
    Vanish {
        reason: VanishReason,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        circuit: Option<DirectedCircuit>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dominant: Option<VertexId>,
    },
    /// Competing pair with nothing else: bounded by the two functions alone.
    Terminal { v1: VertexId, v2: VertexId },
    /// Competing pair reduced to a maximal paraproduct.
    Maximal { v1: VertexId, v2: VertexId, spec: MaxParaproductSpec },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub graph: Graph,
    /// zero edges added by saturation, in order
    pub splits: Vec<Edge>,
    pub reduction: Reduction,
}

pub fn reduce_nonmaximal(g: &Graph) -> Result<Vec<Piece>, String> {
    if let Some(v) = g.distinguished() {
        return Err(format!("graph has distinguished vertex {v}"));
    }
    let mut out = Vec::new();
    let mut stack = alloc::vec![(g.clone(), Vec::new())];
    while let Some((h, splits)) = stack.pop() {
        if let Some(circuit) = find_positive_circuit(&h) {
            let reduction = Reduction::Vanish { reason: VanishReason::PositiveCircuit, circuit: Some(circuit), dominant: None };
            out.push(Piece { graph: h, splits, reduction });
            continue;
        }
        if let Some(v0) = dominant_frequency(&h) {
            let reduction = Reduction::Vanish { reason: VanishReason::DominantNonMaximal, circuit: None, dominant: Some(v0) };
            out.push(Piece { graph: h, splits, reduction });
            continue;
        }
        if let Some(&(v1, v2)) = competing_pairs(&h).first() {
            let rest: VertexSet = h.vertices().iter().copied().filter(|&v| v != v1 && v != v2).collect();
            let reduction = if rest.is_empty() {
                Reduction::Terminal { v1, v2 }
            } else {
                let std = graph_to_standard_form(&h, v1, v2).map_err(|e| format!("{e}"))?;
                let keep: VertexSet = h.vertices().iter().copied().filter(|&v| v != v2).collect();
                let (sub, _) = std.restrict(&keep).map_err(|e| format!("{e}"))?.dedupe();
                let spec = MaxParaproductSpec::new(sub.with_distinguished(v1).map_err(|e| format!("{e}"))?)
                    .map_err(|e| format!("{e}"))?;
                Reduction::Maximal { v1, v2, spec }
            };
            out.push(Piece { graph: h, splits, reduction });
            continue;
        }
        let split = undetermined_pair(&h).ok_or("total order without a dominant or competing vertex")?;
        // push the dual branch first so the primary branch is reported first
        for e in [split.dual(), split] {
            let mut s = splits.clone();
            s.push(e);
            stack.push((h.with_edge(e).map_err(|e| format!("{e}"))?, s));
        }
    }
    Ok(out)
}

fn undetermined_pair(h: &Graph) -> Option<Edge> {
    let vs: Vec<VertexId> = h.vertices().iter().copied().collect();
    for (i, &v) in vs.iter().enumerate() {
        for &w in &vs[i + 1..] {
            let rel = feasible_relations(h, v, w);
            if rel.iter().filter(|x| **x).count() >= 2 {
                return Some(if rel[0] { Edge::new(v, w, 0) } else { Edge::new(w, v, 0) });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::HalfOrder;

    #[test]
    fn pair_is_terminal() {
        let g = Graph::new([1, 2], [Edge::new(1, 2, 0), Edge::new(2, 1, 0)]).unwrap();
        let p = reduce_nonmaximal(&g).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].reduction, Reduction::Terminal { v1: 1, v2: 2 });
    }

    #[test]
    fn dominant_piece_vanishes() {
        let g = Graph::new([0, 1, 2], [Edge::new(0, 1, 1), Edge::new(0, 2, 3)]).unwrap();
        let p = reduce_nonmaximal(&g).unwrap();
        assert!(matches!(p[0].reduction, Reduction::Vanish { reason: VanishReason::DominantNonMaximal, dominant: Some(0), .. }));
    }

    #[test]
    fn three_chain_competing_piece() {
        let g = Graph::new([1, 2, 3], [Edge::new(1, 2, 0), Edge::new(2, 1, 0), Edge::new(2, 3, 2)]).unwrap();
        let p = reduce_nonmaximal(&g).unwrap();
        assert_eq!(p.len(), 1);
        match &p[0].reduction {
            Reduction::Maximal { v1: 1, v2: 2, spec } => {
                assert_eq!(spec.order(), HalfOrder(3));
                assert_eq!(spec.graph().edges(), &[Edge::new(1, 3, 2)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn edgeless_pair_splits() {
        // j0 > j1, j0 = j1, j0 < j1
        let p = reduce_nonmaximal(&Graph::edgeless([0, 1])).unwrap();
        assert_eq!(p.len(), 3);
        assert!(p.iter().all(|x| matches!(x.reduction, Reduction::Vanish { .. } | Reduction::Terminal { .. })));
    }
}

//! Emptiness of `Ω(G)` via difference-constraint feasibility.
//!
//! The constraint `j_src >= j_dst + A` is the shortest-path edge
//! `src -> dst` of length `-A`. A negative cycle there is a directed circuit
//! of positive weight in `G`; without one, the Bellman-Ford potentials from a
//! virtual source are a lattice point of `Ω(G)`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::graph::{Edge, Graph, VertexId};

/// A closed directed walk `edges[0], edges[1], ...` with `edges[i].dst ==
/// edges[i + 1].src` and total weight `weight`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectedCircuit {
    pub edges: Vec<Edge>,
    pub weight: i64,
}

impl DirectedCircuit {
    /// Whether this is a closed directed walk of positive weight whose edges
    /// all occur in `g` (with multiplicity).
    pub fn certifies_empty(&self, g: &Graph) -> bool {
        if self.edges.is_empty() || self.weight <= 0 {
            return false;
        }
        let n = self.edges.len();
        let closed = (0..n).all(|i| self.edges[i].dst == self.edges[(i + 1) % n].src);
        let sum: i64 = self.edges.iter().map(|e| e.weight).sum();
        if !closed || sum != self.weight {
            return false;
        }
        let mut need: BTreeMap<Edge, usize> = BTreeMap::new();
        for e in &self.edges {
            *need.entry(*e).or_default() += 1;
        }
        need.iter().all(|(e, k)| g.multiplicity(e) >= *k)
    }
}

struct Relaxation {
    ids: Vec<VertexId>,
    dist: Vec<i64>,
    pred: Vec<Option<usize>>,
    /// vertex relaxed in the final round, if any
    witness: Option<usize>,
}

fn relax(g: &Graph) -> Relaxation {
    let ids: Vec<VertexId> = g.vertices().iter().copied().collect();
    let index: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let edges: Vec<(usize, usize, i64)> =
        g.edges().iter().map(|e| (index[&e.src], index[&e.dst], e.weight)).collect();
    let n = ids.len();
    let mut dist = alloc::vec![0i64; n];
    let mut pred: Vec<Option<usize>> = alloc::vec![None; n];
    let mut witness = None;
    for round in 0..=n {
        let mut changed = None;
        for (k, &(s, d, a)) in edges.iter().enumerate() {
            let cand = dist[s] - a;
            if cand < dist[d] {
                dist[d] = cand;
                pred[d] = Some(k);
                changed = Some(d);
            }
        }
        match changed {
            None => break,
            Some(d) if round == n => witness = Some(d),
            Some(_) => {}
        }
    }
    Relaxation { ids, dist, pred, witness }
}

/// A directed circuit of positive total weight, if `g` has one.
pub fn find_positive_circuit(g: &Graph) -> Option<DirectedCircuit> {
    let r = relax(g);
    let start = r.witness?;
    let index: BTreeMap<VertexId, usize> = r.ids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    // walk predecessors n times to land on the cycle
    let mut v = start;
    for _ in 0..r.ids.len() {
        let k = r.pred[v].expect("relaxed vertex has a predecessor");
        v = index[&g.edges()[k].src];
    }
    let anchor = v;
    let mut rev = Vec::new();
    loop {
        let k = r.pred[v].expect("cycle vertex has a predecessor");
        let e = g.edges()[k];
        rev.push(e);
        v = index[&e.src];
        if v == anchor {
            break;
        }
    }
    rev.reverse();
    let weight = rev.iter().map(|e| e.weight).sum();
    Some(DirectedCircuit { edges: rev, weight })
}

/// Whether `Ω(g)` is non-empty.
pub fn feasible(g: &Graph) -> bool {
    relax(g).witness.is_none()
}

/// A lattice point of `Ω(g)` with all coordinates in `[-Σ|A|, 0]`, or `None`
/// when `Ω(g)` is empty.
pub fn feasible_point(g: &Graph) -> Option<BTreeMap<VertexId, i64>> {
    let r = relax(g);
    if r.witness.is_some() {
        return None;
    }
    Some(r.ids.into_iter().zip(r.dist).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cycle_examples() {
        let g = Graph::new([0, 1], [Edge::new(0, 1, 1), Edge::new(1, 0, 0)]).unwrap();
        let c = find_positive_circuit(&g).unwrap();
        assert_eq!(c.weight, 1);
        assert_eq!(c.edges.len(), 2);
        assert!(c.certifies_empty(&g));
        assert!(!feasible(&g));

        let g = Graph::new([0, 1], [Edge::new(0, 1, 1), Edge::new(1, 0, -1)]).unwrap();
        assert_eq!(find_positive_circuit(&g), None);
        assert!(feasible(&g));
    }

    #[test]
    fn positive_loop_is_a_circuit() {
        let g = Graph::new([3], [Edge::new(3, 3, 2)]).unwrap();
        let c = find_positive_circuit(&g).unwrap();
        assert_eq!(c.edges, alloc::vec![Edge::new(3, 3, 2)]);
    }

    #[test]
    fn feasible_point_satisfies_constraints() {
        let g = Graph::new(
            [0, 1, 2],
            [Edge::new(0, 1, 3), Edge::new(1, 2, -2), Edge::new(2, 0, -4)],
        )
        .unwrap();
        let p = feasible_point(&g).unwrap();
        for e in g.edges() {
            assert!(e.holds(p[&e.src], p[&e.dst]));
        }
        let total: i64 = g.edges().iter().map(|e| e.weight.abs()).sum();
        assert!(p.values().all(|x| (-total..=0).contains(x)));
    }

    #[test]
    fn empty_edge_set_is_feasible() {
        assert!(feasible(&Graph::edgeless([0, 1, 2])));
        assert!(feasible(&Graph::edgeless([])));
    }
}

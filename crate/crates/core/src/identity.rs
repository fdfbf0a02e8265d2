//! Exact decision of polytope partition identities.
//!
//! For graphs `W, P_1, ..., P_m` on one vertex set the identity
//! `Ω(W) = Ω(P_1) ⊎ ... ⊎ Ω(P_m)` fails iff one of the following
//! difference-constraint systems is feasible:
//!
//! * `P_i ∪ {f*}` for an edge `f` of `W` (a point of `P_i` outside `W`);
//! * `P_i ∪ P_k` for `i < k` (a point in two parts);
//! * `W ∪ {f_1*, ..., f_m*}` with `f_i` an edge of `P_i` not in `W` (a point
//!   of `W` in no part).
//!
//! Each system is decided by [`feasible_point`], which also yields the
//! counterexample. On small boxes the result is cross-checked by explicit
//! enumeration.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::feasibility::feasible_point;
use crate::graph::{Edge, Graph};
use crate::polytope::{canonical_box, check_partition, EnumerationLimits, LatticePoint, PolytopeError, SplitReport};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdentityViolation {
    /// a point of the part outside the whole
    Stray { part: usize },
    /// a point of the whole lying in both parts
    Overlap { first: usize, second: usize },
    /// a point of the whole lying in no part
    Uncovered,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    /// radius of the canonical box of the identity
    pub radius: u64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<IdentityViolation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<LatticePoint>,
    /// explicit enumeration over the canonical box, when it was small enough
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enumeration: Option<SplitReport>,
}

/// Shifts a point along the diagonal so its coordinates straddle zero.
fn centred(p: alloc::collections::BTreeMap<u32, i64>) -> LatticePoint {
    let lo = p.values().copied().min().unwrap_or(0);
    let hi = p.values().copied().max().unwrap_or(0);
    LatticePoint(p).translated(-(lo + hi).div_euclid(2))
}

fn witness(g: &Graph, extra: &[Edge]) -> Option<LatticePoint> {
    let h = g.union_edges(extra).expect("edges on the same vertex set");
    feasible_point(&h).map(centred)
}

/// Decides `Ω(whole) = ⊎ Ω(parts)` over all of `Z^V`.
pub fn exact_partition(whole: &Graph, parts: &[&Graph]) -> Result<Option<(IdentityViolation, LatticePoint)>, PolytopeError> {
    if parts.iter().any(|p| p.vertices() != whole.vertices()) {
        return Err(PolytopeError::VertexSetMismatch);
    }
    for (i, p) in parts.iter().enumerate() {
        for f in dedup(whole.edges()) {
            if let Some(pt) = witness(p, &[f.dual()]) {
                return Ok(Some((IdentityViolation::Stray { part: i }, pt)));
            }
        }
    }
    for i in 0..parts.len() {
        for k in i + 1..parts.len() {
            if let Some(pt) = witness(parts[i], parts[k].edges()) {
                return Ok(Some((IdentityViolation::Overlap { first: i, second: k }, pt)));
            }
        }
    }
    let extras: Vec<Vec<Edge>> = parts
        .iter()
        .map(|p| dedup(&p.edges().iter().copied().filter(|f| !whole.contains_edge(f)).collect::<Vec<_>>()))
        .collect();
    if extras.iter().any(|x| x.is_empty()) {
        // some part contains the whole, so every point is covered
        return Ok(None);
    }
    let mut choice = alloc::vec![0usize; parts.len()];
    loop {
        let duals: Vec<Edge> = choice.iter().zip(&extras).map(|(&c, x)| x[c].dual()).collect();
        if let Some(pt) = witness(whole, &duals) {
            return Ok(Some((IdentityViolation::Uncovered, pt)));
        }
        let mut k = 0;
        loop {
            if k == choice.len() {
                return Ok(None);
            }
            choice[k] += 1;
            if choice[k] < extras[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn dedup(edges: &[Edge]) -> Vec<Edge> {
    let mut v = edges.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Exact check of `Ω(whole) = ⊎ Ω(parts)`, plus enumeration over the
/// canonical box when that box has at most `enumeration_cap` points.
pub fn check_identity(whole: &Graph, parts: &[&Graph], enumeration_cap: u128) -> Result<IdentityReport, PolytopeError> {
    let b = canonical_box(core::iter::once(whole).chain(parts.iter().copied()));
    let exact = exact_partition(whole, parts)?;
    let limits = EnumerationLimits { max_box_points: enumeration_cap };
    let enumeration = match check_partition(whole, parts, &b, &limits) {
        Ok(r) => Some(r),
        Err(PolytopeError::CapExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let (violation, counterexample) = match exact {
        Some((v, p)) => (Some(v), Some(p)),
        None => (None, enumeration.as_ref().and_then(|r| r.counterexample.clone())),
    };
    let pass = violation.is_none() && enumeration.as_ref().is_none_or(|r| r.pass);
    Ok(IdentityReport { radius: b.radius, pass, violation, counterexample, enumeration })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::member;

    fn g(es: &[(u32, u32, i64)]) -> Graph {
        Graph::new([0, 1, 2], es.iter().map(|&(a, b, w)| Edge::new(a, b, w))).unwrap()
    }

    #[test]
    fn split_identity_passes() {
        let w = g(&[(0, 1, 2)]);
        let e = Edge::new(1, 2, -1);
        let a = w.with_edge(e).unwrap();
        let b = w.with_edge(e.dual()).unwrap();
        let r = check_identity(&w, &[&a, &b], 1 << 20).unwrap();
        assert!(r.pass);
        assert!(r.enumeration.unwrap().pass);
    }

    #[test]
    fn each_violation_is_located() {
        let w = g(&[(0, 1, 2)]);
        let e = Edge::new(1, 2, -1);
        let a = w.with_edge(e).unwrap();
        let b = w.with_edge(e.dual()).unwrap();

        let loose = g(&[(0, 1, 1), (1, 2, -1)]);
        let r = check_identity(&w, &[&loose, &b], 1 << 20).unwrap();
        assert_eq!(r.violation, Some(IdentityViolation::Stray { part: 0 }));
        let p = r.counterexample.unwrap();
        assert!(member(&loose, &p).unwrap() && !member(&w, &p).unwrap());

        let r = check_identity(&w, &[&a, &w], 1 << 20).unwrap();
        assert_eq!(r.violation, Some(IdentityViolation::Overlap { first: 0, second: 1 }));

        let tight = w.with_edge(Edge::new(2, 1, 3)).unwrap();
        let r = check_identity(&w, &[&a, &tight], 1 << 20).unwrap();
        assert_eq!(r.violation, Some(IdentityViolation::Uncovered));
        let p = r.counterexample.unwrap();
        assert!(member(&w, &p).unwrap() && !member(&a, &p).unwrap() && !member(&tight, &p).unwrap());
        assert!(!r.enumeration.unwrap().pass);
    }

    #[test]
    fn equality_with_redundant_edge() {
        let w = g(&[(0, 1, 2), (1, 2, 3)]);
        let implied = w.with_edge(Edge::new(0, 2, 4)).unwrap();
        assert!(check_identity(&w, &[&implied], 0).unwrap().pass);
        let not_implied = w.with_edge(Edge::new(0, 2, 6)).unwrap();
        assert!(!check_identity(&w, &[&not_implied], 0).unwrap().pass);
    }
}

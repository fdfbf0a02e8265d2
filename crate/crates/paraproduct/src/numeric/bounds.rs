use paraproduct_core::classify::{classify, competing_pairs, is_standard_form, separable_split};
use paraproduct_core::{Goodness, MaxParaproductSpec, VertexId, VertexSet};
use serde::{Deserialize, Serialize};

use super::lambda::{max_lambda_on, Families, Functions, ScaleBox};
use super::operators::square_function_samples;
use super::NumericError;

pub const POINTWISE_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    /// product of the two restricted maximal paraproducts
    Separable,
    /// `S_{v1} S_{v2}` times the maximal paraproduct of the remaining vertices
    Competing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub kind: BoundKind,
    pub points: usize,
    /// largest `lhs - rhs` over the grid
    pub max_excess: f64,
    /// grid indices where `lhs > rhs + slack (1 + rhs)`
    pub violations: Vec<usize>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl BoundsReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

fn grid_len(fs: &Functions) -> Result<usize, NumericError> {
    fs.values().next().map(|f| f.len()).ok_or(NumericError::Precondition("no functions".into()))
}

fn report(kind: BoundKind, lhs: Vec<f64>, rhs: Vec<f64>) -> BoundsReport {
    let mut max_excess = f64::NEG_INFINITY;
    let mut violations = Vec::new();
    for (i, (l, r)) in lhs.iter().zip(&rhs).enumerate() {
        max_excess = max_excess.max(l - r);
        if *l > r + POINTWISE_SLACK * (1.0 + r) {
            violations.push(i);
        }
    }
    BoundsReport { kind, points: lhs.len(), max_excess, violations, lhs, rhs }
}

fn with_vstar(part: &VertexSet, vstar: VertexId) -> VertexSet {
    let mut s = part.clone();
    s.insert(vstar);
    s
}

/// Checks the pointwise estimate that makes a good maximal paraproduct
/// bounded: the product estimate for separable ones and the Cauchy–Schwarz
/// estimate for semi-direct ones with two competing frequencies in standard
/// form.
pub fn check_pointwise_bounds(spec: &MaxParaproductSpec, families: &Families, fs: &Functions, bx: &ScaleBox) -> Result<BoundsReport, NumericError> {
    let n = grid_len(fs)?;
    let g = spec.graph();
    let vstar = spec.vstar();
    let lhs = max_lambda_on(g, vstar, families, fs, bx, n)?;
    if let Goodness::SemiDirectCompeting = classify(spec).goodness {
        let (v1, v2) = standard_pair(spec).ok_or(NumericError::Precondition("competing pair not in standard form".into()))?;
        let mut s = vec![1.0; n];
        for v in [v1, v2] {
            let fam = families.get(&v).ok_or(NumericError::MissingFamily(v))?;
            let f = fs.get(&v).ok_or(NumericError::MissingFunction(v))?;
            let sq = square_function_samples(fam, f)?;
            s.iter_mut().zip(sq).for_each(|(a, b)| *a *= b);
        }
        let rest: VertexSet = g.free_vertices().into_iter().filter(|v| *v != v1 && *v != v2).collect();
        if !rest.is_empty() {
            let sub = g
                .restrict(&with_vstar(&rest, v1))
                .map_err(|e| NumericError::Precondition(e.to_string()))?
                .without_distinguished()
                .with_distinguished(v1)
                .map_err(|e| NumericError::Precondition(e.to_string()))?;
            let m = max_lambda_on(&sub, v1, families, fs, bx, n)?;
            s.iter_mut().zip(m).for_each(|(a, b)| *a *= b);
        }
        return Ok(report(BoundKind::Competing, lhs, s));
    }
    let (v1s, v2s) = separable_split(g).ok_or(NumericError::Precondition("neither separable nor semi-direct competing".into()))?;
    let mut rhs = vec![1.0; n];
    for part in [v1s, v2s] {
        let sub = g.restrict(&with_vstar(&part, vstar)).map_err(|e| NumericError::Precondition(e.to_string()))?;
        let m = max_lambda_on(&sub, vstar, families, fs, bx, n)?;
        rhs.iter_mut().zip(m).for_each(|(a, b)| *a *= b);
    }
    Ok(report(BoundKind::Separable, lhs, rhs))
}

/// A competing pair `(v1, v2)` in standard form with `v_*` adjacent to
/// neither of the other vertices.
pub fn standard_pair(spec: &MaxParaproductSpec) -> Option<(VertexId, VertexId)> {
    let g = spec.graph();
    let vstar = VertexSet::from([spec.vstar()]);
    competing_pairs(g).into_iter().flat_map(|(a, b)| [(a, b), (b, a)]).find(|&(v1, v2)| {
        let rest: VertexSet = g.free_vertices().into_iter().filter(|v| *v != v1 && *v != v2).collect();
        is_standard_form(g, v1, v2) && !g.adjacent(&vstar, &rest).unwrap_or(true)
    })
}

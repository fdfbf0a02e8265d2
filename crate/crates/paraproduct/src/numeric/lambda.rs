//! Grid evaluation of paraproduct forms and maximal paraproducts.

use std::collections::BTreeMap;

use num_complex::Complex64;
use paraproduct_core::polytope::enumerate_ranges;
use paraproduct_core::{Graph, MaxParaproductSpec, VertexId};

use super::grid::{inverse, mean, GridFunction};
use super::symbol::{Mask, SymbolFamily};
use super::NumericError;

/// Inclusive scale range per vertex.
pub type ScaleBox = BTreeMap<VertexId, (i64, i64)>;

pub type Families = BTreeMap<VertexId, SymbolFamily>;
pub type Functions = BTreeMap<VertexId, GridFunction>;

pub fn apply_multiplier(mask: &Mask, f: &GridFunction) -> Result<GridFunction, NumericError> {
    if mask.len() != f.len() {
        return Err(NumericError::SizeMismatch { expected: f.len(), found: mask.len() });
    }
    let spec: Vec<Complex64> = mask.0.iter().zip(f.spectrum()).map(|(m, c)| m * c).collect();
    GridFunction::from_spectrum(spec)
}

/// `Q_j f` sampled in time, for every scale of the family.
pub type Pieces = BTreeMap<i64, Vec<Complex64>>;

pub fn pieces(family: &SymbolFamily, f: &GridFunction) -> Result<Pieces, NumericError> {
    let mut out = BTreeMap::new();
    for (j, m) in &family.masks {
        if m.len() != f.len() {
            return Err(NumericError::SizeMismatch { expected: f.len(), found: m.len() });
        }
        if m.is_zero() {
            continue;
        }
        let spec: Vec<Complex64> = m.0.iter().zip(f.spectrum()).map(|(m, c)| m * c).collect();
        out.insert(*j, inverse(&spec));
    }
    Ok(out)
}

/// The box spanned by the nonzero scales of each family.
pub fn family_box(families: &Families) -> ScaleBox {
    families.iter().map(|(v, f)| (*v, f.scale_range().unwrap_or((0, -1)))).collect()
}

fn check_coverage(families: &Families, bx: &ScaleBox, vertices: impl IntoIterator<Item = VertexId>) -> Result<(), NumericError> {
    for v in vertices {
        let fam = families.get(&v).ok_or(NumericError::MissingFamily(v))?;
        let &(lo, hi) = bx.get(&v).ok_or(NumericError::MissingRange(v))?;
        if let Some((j, _)) = fam.masks.iter().find(|(j, m)| !(lo..=hi).contains(*j) && !m.is_zero()) {
            return Err(NumericError::BoxInsufficient { vertex: v, scale: *j });
        }
    }
    Ok(())
}

fn range_map(g: &Graph, bx: &ScaleBox) -> Result<BTreeMap<VertexId, (i64, i64)>, NumericError> {
    g.vertices().iter().map(|v| bx.get(v).map(|r| (*v, *r)).ok_or(NumericError::MissingRange(*v))).collect()
}

fn all_pieces(families: &Families, fs: &Functions, vs: impl IntoIterator<Item = VertexId>) -> Result<BTreeMap<VertexId, Pieces>, NumericError> {
    let mut out = BTreeMap::new();
    for v in vs {
        let fam = families.get(&v).ok_or(NumericError::MissingFamily(v))?;
        let f = fs.get(&v).ok_or(NumericError::MissingFunction(v))?;
        out.insert(v, pieces(fam, f)?);
    }
    Ok(out)
}

/// `Σ_{k ∈ Ω(g) ∩ box} ∫ Π_v (Q_{k_v}^v f_v)` from precomputed pieces; any
/// distinguished vertex is ignored.
pub fn lambda_from_pieces(g: &Graph, pieces: &BTreeMap<VertexId, Pieces>, bx: &ScaleBox) -> Result<Complex64, NumericError> {
    let g = g.clone().without_distinguished();
    let members = enumerate_ranges(&g, &range_map(&g, bx)?).map_err(|e| NumericError::Polytope(e.to_string()))?;
    let n = pieces.values().flat_map(|p| p.values()).map(Vec::len).next().unwrap_or(0);
    let mut total = Complex64::new(0.0, 0.0);
    let mut prod = vec![Complex64::new(0.0, 0.0); n];
    'points: for k in members {
        prod.iter_mut().for_each(|x| *x = Complex64::new(1.0, 0.0));
        for (v, j) in &k.0 {
            let Some(q) = pieces[v].get(j) else { continue 'points };
            prod.iter_mut().zip(q).for_each(|(a, b)| *a *= b);
        }
        total += mean(&prod);
    }
    Ok(total)
}

/// Non-maximal paraproduct: every vertex carries a function.
pub fn evaluate_lambda(g: &Graph, families: &Families, fs: &Functions, bx: &ScaleBox) -> Result<Complex64, NumericError> {
    if g.distinguished().is_some() {
        return Err(NumericError::Precondition("non-maximal form on a graph with a distinguished vertex".into()));
    }
    check_coverage(families, bx, g.vertices().iter().copied())?;
    let p = all_pieces(families, fs, g.vertices().iter().copied())?;
    lambda_from_pieces(g, &p, bx)
}

/// For each `j_*` in the box range of the distinguished vertex, the inner sum
/// `Σ_{k ∈ Ω(g), k_{v*} = j_*} Π_{v ≠ v*} Q_{k_v}^v f_v` as samples.
pub fn inner_sums_from_pieces(
    g: &Graph,
    vstar: VertexId,
    pieces: &BTreeMap<VertexId, Pieces>,
    bx: &ScaleBox,
    n: usize,
) -> Result<BTreeMap<i64, Vec<Complex64>>, NumericError> {
    let plain = g.clone().without_distinguished();
    let ranges = range_map(&plain, bx)?;
    let (lo, hi) = ranges[&vstar];
    let mut out: BTreeMap<i64, Vec<Complex64>> = (lo..=hi).map(|j| (j, vec![Complex64::new(0.0, 0.0); n])).collect();
    let members = enumerate_ranges(&plain, &ranges).map_err(|e| NumericError::Polytope(e.to_string()))?;
    let mut prod = vec![Complex64::new(0.0, 0.0); n];
    'points: for k in members {
        prod.iter_mut().for_each(|x| *x = Complex64::new(1.0, 0.0));
        for (v, j) in &k.0 {
            if *v == vstar {
                continue;
            }
            let Some(q) = pieces[v].get(j) else { continue 'points };
            prod.iter_mut().zip(q).for_each(|(a, b)| *a *= b);
        }
        let acc = out.get_mut(&k.0[&vstar]).expect("scale inside range");
        acc.iter_mut().zip(&prod).for_each(|(a, b)| *a += b);
    }
    Ok(out)
}

pub fn sup_abs(sums: &BTreeMap<i64, Vec<Complex64>>, n: usize) -> Vec<f64> {
    let mut out = vec![0.0f64; n];
    for s in sums.values() {
        out.iter_mut().zip(s).for_each(|(o, x)| *o = o.max(x.norm()));
    }
    out
}

fn max_lambda_samples(g: &Graph, vstar: VertexId, families: &Families, fs: &Functions, bx: &ScaleBox) -> Result<Vec<f64>, NumericError> {
    let free: Vec<VertexId> = g.vertices().iter().copied().filter(|v| *v != vstar).collect();
    check_coverage(families, bx, free.iter().copied())?;
    let n = fs.values().next().map(GridFunction::len).ok_or(NumericError::Precondition("no functions".into()))?;
    let p = all_pieces(families, fs, free)?;
    Ok(sup_abs(&inner_sums_from_pieces(g, vstar, &p, bx, n)?, n))
}

/// `sup_{j_*} |Σ_{k ∈ Ω, k_{v*} = j_*} Π_{v ≠ v*} Q_{k_v}^v f_v|` with `j_*`
/// ranging over the box range of `v*`.
pub fn evaluate_max_lambda(spec: &MaxParaproductSpec, families: &Families, fs: &Functions, bx: &ScaleBox) -> Result<GridFunction, NumericError> {
    let s = max_lambda_samples(spec.graph(), spec.vstar(), families, fs, bx)?;
    GridFunction::from_real(&s)
}

/// Maximal paraproduct on a graph with an explicit distinguished vertex;
/// with no other vertex the inner sum is the constant 1 on non-empty slices.
pub fn max_lambda_on(g: &Graph, vstar: VertexId, families: &Families, fs: &Functions, bx: &ScaleBox, n: usize) -> Result<Vec<f64>, NumericError> {
    if g.order() == 1 {
        let p = BTreeMap::new();
        return Ok(sup_abs(&inner_sums_from_pieces(g, vstar, &p, bx, n)?, n));
    }
    max_lambda_samples(g, vstar, families, fs, bx)
}

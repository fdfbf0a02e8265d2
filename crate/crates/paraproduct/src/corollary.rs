//! Reduction of `Σ_j ε_j ∫ Π_i π_{j,i} f_i` to constrained paraproducts whose
//! symbols all vanish at the origin.
//!
//! The pipeline is exact on the grid:
//!
//! 1. [`pigeonhole`] groups the scales `j` by the least slot whose symbol
//!    vanishes at the origin and swaps that slot to the last position;
//! 2. [`normalize_shift`] re-indexes so that the last shift is zero;
//! 3. [`absorb_eps`] moves `ε_j` into the last slot;
//! 4. [`absorb_and_split`] writes `m = m(0) φ + (m - m(0) φ)` in every other
//!    slot and moves the scalars `m(0)` into the last slot;
//! 5. [`telescope`] expands `φ_s = Σ_{J0 <= k <= s} (φ_k - φ_{k-1}) + φ_{J0-1}`;
//! 6. [`reduce_to_theorem`] groups terms by branch pattern into graph
//!    instances and carries every term containing `φ_{J0-1}` as a residual.
//!
//! Here `φ_s` is the unit ball bump `ψ(ξ / 2^s)`, so `φ_s(0) = 1`. On the
//! grid `φ_s` is the indicator of frequency zero for `s <= 0`, which makes
//! the cutoff `J0 = 1` exact and every residual a multiple of the means of
//! the inputs.

use std::collections::BTreeMap;

use num_complex::Complex64;
use paraproduct_core::{Edge, Graph, VertexId};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::write_graph;
use crate::numeric::grid::mean;
use crate::numeric::lambda::{evaluate_lambda, family_box, Families, Functions};
use crate::numeric::symbol::{build_symbol, Mask, SymbolFamily, SymbolSpec};
use crate::numeric::{apply_multiplier, GridFunction, NumericError};

pub const SIDECAR_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorollaryError {
    #[error("scale {0}: no slot vanishes at the origin")]
    NoVanishingSlot(i64),
    #[error("empty telescope: cutoff {cutoff} above top scale {top}")]
    EmptyTelescope { cutoff: i64, top: i64 },
    #[error("malformed instance: {0}")]
    Malformed(String),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// Linear combination of sampled symbols.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Symbol {
    pub terms: Vec<(Complex64, SymbolSpec)>,
}

impl Symbol {
    pub fn single(spec: SymbolSpec) -> Self {
        Symbol { terms: vec![(Complex64::new(1.0, 0.0), spec)] }
    }

    /// Unit ball bump `φ_s`.
    pub fn phi(s: i64) -> Self {
        Symbol::single(SymbolSpec::ball(s, false))
    }

    /// `φ_k - φ_{k-1}`.
    pub fn lacunary_difference(k: i64) -> Self {
        Symbol {
            terms: vec![(Complex64::new(1.0, 0.0), SymbolSpec::ball(k, false)), (Complex64::new(-1.0, 0.0), SymbolSpec::ball(k - 1, false))],
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Symbol { terms: self.terms.iter().map(|(a, s)| (a * c, s.clone())).collect() }
    }

    pub fn minus(&self, other: &Symbol) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|(a, s)| (-a, s.clone())));
        Symbol { terms }
    }

    pub fn build(&self, n: usize) -> Result<Mask, NumericError> {
        let masks: Vec<Mask> = self.terms.iter().map(|(_, s)| build_symbol(s, n)).collect::<Result<_, _>>()?;
        let pairs: Vec<(Complex64, &Mask)> = self.terms.iter().map(|t| t.0).zip(&masks).collect();
        if pairs.is_empty() {
            return Ok(Mask::zeros(n));
        }
        Mask::combination(&pairs)
    }
}

/// One summand family `Σ_j ε_j ∫ Π_i π_{j,i} f_i`; slot `i` carries
/// function `i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorollaryInstance {
    pub grid_size: usize,
    /// `M_i`
    pub shifts: Vec<i64>,
    /// `m_{j,i}` by scale `j`, one entry per slot
    pub symbols: BTreeMap<i64, Vec<Symbol>>,
    /// `ε_j`, one per scale
    pub eps: BTreeMap<i64, Complex64>,
}

impl CorollaryInstance {
    pub fn slots(&self) -> usize {
        self.shifts.len()
    }

    pub fn validate(&self) -> Result<(), CorollaryError> {
        let n = self.slots();
        if n < 2 {
            return Err(CorollaryError::Malformed("need at least two slots".into()));
        }
        if self.symbols.keys().ne(self.eps.keys()) {
            return Err(CorollaryError::Malformed("ε and symbols cover different scales".into()));
        }
        for (j, row) in &self.symbols {
            if row.len() != n {
                return Err(CorollaryError::Malformed(format!("scale {j}: {} symbols for {n} slots", row.len())));
            }
        }
        if self.eps.values().any(|e| e.norm() > 1.0 + 1e-12) {
            return Err(CorollaryError::Malformed("|ε_j| must be at most 1".into()));
        }
        Ok(())
    }

    /// `Σ_j ε_j ∫ Π_i (m_{j,i} f_i)`.
    pub fn evaluate(&self, fs: &[GridFunction]) -> Result<Complex64, CorollaryError> {
        let mut total = Complex64::new(0.0, 0.0);
        for (j, row) in &self.symbols {
            total += self.eps[j] * product_integral(row, fs, self.grid_size)?;
        }
        Ok(total)
    }
}

fn product_integral(slots: &[Symbol], fs: &[GridFunction], n: usize) -> Result<Complex64, CorollaryError> {
    if fs.len() != slots.len() {
        return Err(CorollaryError::Malformed(format!("{} functions for {} slots", fs.len(), slots.len())));
    }
    let mut prod = vec![Complex64::new(1.0, 0.0); n];
    for (s, f) in slots.iter().zip(fs) {
        let q = apply_multiplier(&s.build(n)?, f)?;
        prod.iter_mut().zip(q.samples()).for_each(|(a, b)| *a *= b);
    }
    Ok(mean(&prod))
}

fn origin_value(s: &Symbol, n: usize) -> Result<Complex64, NumericError> {
    Ok(s.build(n)?.at_origin())
}

/// A pigeonhole class: the scales whose least vanishing slot is `slot`, with
/// that slot swapped to the last position.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PigeonholeClass {
    pub slot: usize,
    /// `perm[k]` is the original slot now at position `k`
    pub perm: Vec<usize>,
    pub instance: CorollaryInstance,
}

impl PigeonholeClass {
    /// Inputs reordered to the class's slot order.
    pub fn permute<T: Clone>(&self, xs: &[T]) -> Vec<T> {
        self.perm.iter().map(|&k| xs[k].clone()).collect()
    }
}

pub fn pigeonhole(inst: &CorollaryInstance) -> Result<Vec<PigeonholeClass>, CorollaryError> {
    inst.validate()?;
    let n = inst.slots();
    let mut classes: BTreeMap<usize, CorollaryInstance> = BTreeMap::new();
    for (j, row) in &inst.symbols {
        let mut least = None;
        for (i, s) in row.iter().enumerate() {
            if origin_value(s, inst.grid_size)? == Complex64::new(0.0, 0.0) {
                least = Some(i);
                break;
            }
        }
        let i = least.ok_or(CorollaryError::NoVanishingSlot(*j))?;
        let c = classes.entry(i).or_insert_with(|| CorollaryInstance {
            grid_size: inst.grid_size,
            shifts: swapped(&inst.shifts, i, n - 1),
            symbols: BTreeMap::new(),
            eps: BTreeMap::new(),
        });
        c.symbols.insert(*j, swapped(row, i, n - 1));
        c.eps.insert(*j, inst.eps[j]);
    }
    Ok(classes
        .into_iter()
        .map(|(slot, instance)| PigeonholeClass { slot, perm: swapped(&(0..n).collect::<Vec<_>>(), slot, n - 1), instance })
        .collect())
}

fn swapped<T: Clone>(xs: &[T], a: usize, b: usize) -> Vec<T> {
    let mut v = xs.to_vec();
    v.swap(a, b);
    v
}

/// Re-indexes `j ↦ j + M_n` and `M_i ↦ M_i - M_n`; returns the offset
/// `M_n`. Each symbol keeps its own support `|ξ| <= 2^{j + M_i}`.
pub fn normalize_shift(inst: &CorollaryInstance) -> (CorollaryInstance, i64) {
    let n = inst.slots();
    let off = inst.shifts[n - 1];
    let out = CorollaryInstance {
        grid_size: inst.grid_size,
        shifts: inst.shifts.iter().map(|m| m - off).collect(),
        symbols: inst.symbols.iter().map(|(j, r)| (j + off, r.clone())).collect(),
        eps: inst.eps.iter().map(|(j, e)| (j + off, *e)).collect(),
    };
    (out, off)
}

/// Multiplies the last slot by `ε_j` and sets `ε_j = 1`.
pub fn absorb_eps(inst: &CorollaryInstance) -> CorollaryInstance {
    let n = inst.slots();
    let mut out = inst.clone();
    for (j, row) in out.symbols.iter_mut() {
        row[n - 1] = row[n - 1].scaled(inst.eps[j]);
    }
    out.eps.values_mut().for_each(|e| *e = Complex64::new(1.0, 0.0));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// the slot is `φ_{j + M_i}`
    Phi,
    /// the slot vanishes at the origin
    Remainder,
}

/// One product term after splitting; `slots` has one symbol per slot and
/// `pattern` one branch per slot except the last.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecomposedTerm {
    pub j: i64,
    pub pattern: Vec<Branch>,
    pub slots: Vec<Symbol>,
}

/// Splits every slot but the last; branches with a zero coefficient or an
/// identically zero remainder are omitted. Requires `ε_j = 1` and a last slot
/// vanishing at the origin.
pub fn absorb_and_split(inst: &CorollaryInstance) -> Result<Vec<DecomposedTerm>, CorollaryError> {
    inst.validate()?;
    let n = inst.slots();
    let grid = inst.grid_size;
    let one = Complex64::new(1.0, 0.0);
    let mut out = Vec::new();
    for (j, row) in &inst.symbols {
        if inst.eps[j] != one {
            return Err(CorollaryError::Malformed(format!("scale {j}: ε not absorbed")));
        }
        if origin_value(&row[n - 1], grid)? != Complex64::new(0.0, 0.0) {
            return Err(CorollaryError::Malformed(format!("scale {j}: last slot does not vanish at the origin")));
        }
        // (branch, symbol, scalar moved into the last slot) per slot
        let mut options: Vec<Vec<(Branch, Symbol, Complex64)>> = Vec::new();
        for (i, m) in row[..n - 1].iter().enumerate() {
            let m0 = origin_value(m, grid)?;
            let phi = Symbol::phi(j + inst.shifts[i]);
            let rem = m.minus(&phi.scaled(m0));
            let mut opts = Vec::new();
            if m0 != Complex64::new(0.0, 0.0) {
                opts.push((Branch::Phi, phi, m0));
            }
            if !rem.build(grid)?.is_zero() {
                opts.push((Branch::Remainder, rem, one));
            }
            options.push(opts);
        }
        let mut choice = vec![0usize; n - 1];
        if options.iter().any(|o| o.is_empty()) {
            continue;
        }
        loop {
            let picked: Vec<&(Branch, Symbol, Complex64)> = choice.iter().zip(&options).map(|(&c, o)| &o[c]).collect();
            let scalar: Complex64 = picked.iter().map(|p| p.2).product();
            let mut slots: Vec<Symbol> = picked.iter().map(|p| p.1.clone()).collect();
            slots.push(row[n - 1].scaled(scalar));
            out.push(DecomposedTerm { j: *j, pattern: picked.iter().map(|p| p.0).collect(), slots });
            let mut k = 0;
            loop {
                if k == choice.len() {
                    break;
                }
                choice[k] += 1;
                if choice[k] < options[k].len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == choice.len() {
                break;
            }
        }
    }
    Ok(out)
}

/// The least `k` with `φ_k - φ_{k-1}` not identically zero on the grid.
pub fn telescope_cutoff(n: usize) -> Result<i64, NumericError> {
    for k in -8..=64 {
        if !Symbol::lacunary_difference(k).build(n)?.is_zero() {
            return Ok(k);
        }
    }
    Err(NumericError::Precondition("no nonzero lacunary difference on the grid".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Telescope {
    /// `(k, φ_k - φ_{k-1})` for `J0 <= k <= top`, each vanishing at the origin
    pub pieces: Vec<(i64, Symbol)>,
    /// `φ_{J0 - 1}`
    pub residual: Symbol,
}

/// `φ_top = Σ_{cutoff <= k <= top} (φ_k - φ_{k-1}) + φ_{cutoff - 1}`.
pub fn telescope(top: i64, cutoff: i64) -> Result<Telescope, CorollaryError> {
    if cutoff > top {
        return Err(CorollaryError::EmptyTelescope { cutoff, top });
    }
    Ok(Telescope { pieces: (cutoff..=top).map(|k| (k, Symbol::lacunary_difference(k))).collect(), residual: Symbol::phi(cutoff - 1) })
}

/// A constrained paraproduct `Σ_{k ∈ Ω(graph)} ∫ Π_v Q^v_{k_v} f_{perm[v-1]}`
/// with vertex `i` for slot `i` (one-based) and vertex `n` the last slot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremInstance {
    pub class_slot: usize,
    pub perm: Vec<usize>,
    pub offset: i64,
    pub pattern: Vec<Branch>,
    pub graph: Graph,
    pub families: BTreeMap<VertexId, BTreeMap<i64, Symbol>>,
}

impl TheoremInstance {
    pub fn masks(&self, n: usize) -> Result<Families, NumericError> {
        self.families
            .iter()
            .map(|(v, fam)| {
                let masks = fam.iter().map(|(k, s)| Ok((*k, s.build(n)?))).collect::<Result<Vec<_>, NumericError>>()?;
                Ok((*v, SymbolFamily::from_masks(masks)))
            })
            .collect()
    }

    pub fn evaluate(&self, fs: &[GridFunction], n: usize) -> Result<Complex64, NumericError> {
        let fam = self.masks(n)?;
        let funcs: Functions = self.perm.iter().enumerate().map(|(k, &o)| (k as VertexId + 1, fs[o].clone())).collect();
        evaluate_lambda(&self.graph, &fam, &funcs, &family_box(&fam))
    }
}

/// A term containing at least one `φ_{J0-1}` slot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualTerm {
    pub perm: Vec<usize>,
    pub j: i64,
    pub slots: Vec<Symbol>,
}

impl ResidualTerm {
    pub fn evaluate(&self, fs: &[GridFunction], n: usize) -> Result<Complex64, CorollaryError> {
        let p: Vec<GridFunction> = self.perm.iter().map(|&k| fs[k].clone()).collect();
        product_integral(&self.slots, &p, n)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReduction {
    pub cutoff: i64,
    pub instances: Vec<TheoremInstance>,
    pub residuals: Vec<ResidualTerm>,
}

impl TheoremReduction {
    pub fn evaluate_instances(&self, fs: &[GridFunction], n: usize) -> Result<Complex64, NumericError> {
        self.instances.iter().map(|t| t.evaluate(fs, n)).sum()
    }

    pub fn evaluate_residuals(&self, fs: &[GridFunction], n: usize) -> Result<Complex64, CorollaryError> {
        self.residuals.iter().map(|t| t.evaluate(fs, n)).sum()
    }

    /// Every emitted symbol is exactly zero at frequency zero.
    pub fn all_vanish_at_origin(&self, n: usize) -> Result<bool, NumericError> {
        for t in &self.instances {
            for fam in t.masks(n)?.values() {
                if fam.masks.values().any(|m| m.at_origin() != Complex64::new(0.0, 0.0)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// JSON sidecar: per instance the graph text and the symbol assignment.
    pub fn sidecar(&self) -> String {
        #[derive(Serialize)]
        struct Entry<'a> {
            graph: String,
            class_slot: usize,
            perm: &'a [usize],
            offset: i64,
            pattern: &'a [Branch],
            families: &'a BTreeMap<VertexId, BTreeMap<i64, Symbol>>,
        }
        #[derive(Serialize)]
        struct Sidecar<'a> {
            format_version: u32,
            cutoff: i64,
            instances: Vec<Entry<'a>>,
            residuals: &'a [ResidualTerm],
        }
        let s = Sidecar {
            format_version: SIDECAR_FORMAT_VERSION,
            cutoff: self.cutoff,
            instances: self
                .instances
                .iter()
                .map(|t| Entry {
                    graph: write_graph(&t.graph),
                    class_slot: t.class_slot,
                    perm: &t.perm,
                    offset: t.offset,
                    pattern: &t.pattern,
                    families: &t.families,
                })
                .collect(),
            residuals: &self.residuals,
        };
        let mut out = serde_json::to_string_pretty(&s).expect("sidecar serializes");
        out.push('\n');
        out
    }
}

fn class_reduction(class: &PigeonholeClass, cutoff: i64) -> Result<(Vec<TheoremInstance>, Vec<ResidualTerm>), CorollaryError> {
    let (shifted, offset) = normalize_shift(&class.instance);
    let inst = absorb_eps(&shifted);
    let n = inst.slots();
    let last = n as VertexId;
    let terms = absorb_and_split(&inst)?;
    let mut by_pattern: BTreeMap<Vec<Branch>, Vec<DecomposedTerm>> = BTreeMap::new();
    for t in terms {
        by_pattern.entry(t.pattern.clone()).or_default().push(t);
    }
    let mut instances = Vec::new();
    let mut residuals = Vec::new();
    for (pattern, terms) in by_pattern {
        let mut edges = Vec::new();
        let mut families: BTreeMap<VertexId, BTreeMap<i64, Symbol>> = BTreeMap::new();
        for (i, b) in pattern.iter().enumerate() {
            let v = i as VertexId + 1;
            let m = inst.shifts[i];
            edges.push(Edge::new(last, v, -m));
            if *b == Branch::Remainder {
                edges.push(Edge::new(v, last, m));
            }
            families.insert(v, BTreeMap::new());
        }
        families.insert(last, BTreeMap::new());
        for t in &terms {
            families.get_mut(&last).expect("last vertex").insert(t.j, t.slots[n - 1].clone());
            let mut phi_slots = Vec::new();
            for (i, b) in pattern.iter().enumerate() {
                let v = i as VertexId + 1;
                let top = t.j + inst.shifts[i];
                match b {
                    Branch::Remainder => {
                        families.get_mut(&v).expect("vertex").insert(top, t.slots[i].clone());
                    }
                    Branch::Phi => {
                        if let Ok(tel) = telescope(top, cutoff) {
                            let fam = families.get_mut(&v).expect("vertex");
                            for (k, s) in tel.pieces {
                                fam.insert(k, s);
                            }
                        }
                        phi_slots.push(i);
                    }
                }
            }
            // every product in which some telescoped slot takes the residual φ_{J0-1}
            for mask in 1u32..(1 << phi_slots.len()) {
                let mut slots = t.slots.clone();
                let mut empty = false;
                for (b, &i) in phi_slots.iter().enumerate() {
                    let top = t.j + inst.shifts[i];
                    if mask & (1 << b) != 0 {
                        slots[i] = Symbol::phi(cutoff - 1);
                    } else {
                        match telescope(top, cutoff) {
                            Ok(tel) => {
                                slots[i] = tel.pieces.into_iter().fold(Symbol { terms: vec![] }, |mut acc, (_, s)| {
                                    acc.terms.extend(s.terms);
                                    acc
                                })
                            }
                            Err(_) => empty = true,
                        }
                    }
                }
                if !empty {
                    residuals.push(ResidualTerm { perm: class.perm.clone(), j: t.j, slots });
                }
            }
        }
        let graph = Graph::new(1..=last, edges).expect("vertices 1..=n");
        instances.push(TheoremInstance { class_slot: class.slot, perm: class.perm.clone(), offset, pattern, graph, families });
    }
    Ok((instances, residuals))
}

/// Runs the whole pipeline; classes are processed in parallel and merged in
/// class order.
pub fn reduce_to_theorem(inst: &CorollaryInstance) -> Result<TheoremReduction, CorollaryError> {
    let cutoff = telescope_cutoff(inst.grid_size)?;
    let classes = pigeonhole(inst)?;
    let parts: Vec<(Vec<TheoremInstance>, Vec<ResidualTerm>)> =
        classes.par_iter().map(|c| class_reduction(c, cutoff)).collect::<Result<_, _>>()?;
    let mut instances = Vec::new();
    let mut residuals = Vec::new();
    for (i, r) in parts {
        instances.extend(i);
        residuals.extend(r);
    }
    Ok(TheoremReduction { cutoff, instances, residuals })
}

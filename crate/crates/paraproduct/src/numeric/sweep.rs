//! Empirical uniformity of `|Λ| / Π ‖f_v‖_{p_v}` over a one-parameter
//! family of constraint sets.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use paraproduct_core::VertexId;

use super::grid::{check_size, frequency, GridFunction};
use super::lambda::{family_box, lambda_from_pieces, pieces, Families, Functions, Pieces};
use super::NumericError;
use crate::format::GraphTemplate;

pub const CSV_FORMAT_VERSION: u32 = 1;

/// Exponents `p_v` of the inputs and, for maximal forms, `p_*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentTuple {
    pub p: Vec<f64>,
    #[serde(default)]
    pub p_star: Option<f64>,
}

impl ExponentTuple {
    pub fn new(p: Vec<f64>) -> Result<Self, NumericError> {
        let t = ExponentTuple { p, p_star: None };
        t.validate()?;
        Ok(t)
    }

    pub fn maximal(p: Vec<f64>, p_star: f64) -> Result<Self, NumericError> {
        let t = ExponentTuple { p, p_star: Some(p_star) };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), NumericError> {
        let open = |x: f64| x > 1.0 && x.is_finite();
        if self.p.is_empty() || !self.p.iter().all(|&x| open(x)) {
            return Err(NumericError::InvalidExponents("every exponent must lie in (1, ∞)".into()));
        }
        let target = match self.p_star {
            None => 1.0,
            Some(q) if open(q) => 1.0 / q,
            Some(_) => return Err(NumericError::InvalidExponents("p_* must lie in (1, ∞)".into())),
        };
        let s: f64 = self.p.iter().map(|x| 1.0 / x).sum();
        if (s - target).abs() > 1e-12 {
            return Err(NumericError::InvalidExponents(format!("Σ 1/p = {s}, expected {target}")));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        self.p.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(";")
    }
}

/// Deterministic ensemble member `index` for `count` functions: even indices
/// are random trigonometric polynomials, odd indices modulated bumps at a
/// common scale whose first two members are conjugate-matched.
pub fn ensemble_member(seed: u64, index: u64, count: usize, n: usize) -> Result<Vec<GridFunction>, NumericError> {
    check_size(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    if index.is_multiple_of(2) {
        (0..count).map(|_| trig_polynomial(&mut rng, n)).collect()
    } else {
        modulated_bumps(&mut rng, count, n)
    }
}

fn trig_polynomial(rng: &mut ChaCha8Rng, n: usize) -> Result<GridFunction, NumericError> {
    let spec: Vec<Complex64> = (0..n)
        .map(|k| {
            let xi = frequency(k, n);
            if xi == 0 {
                return Complex64::new(0.0, 0.0);
            }
            let w = 1.0 / (1.0 + (xi.abs() as f64).sqrt());
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * w
        })
        .collect();
    GridFunction::from_spectrum(spec)
}

fn bump(n: usize, centre: f64, width: f64, freq: f64, phase: f64) -> Vec<Complex64> {
    (0..n)
        .map(|m| {
            let x = m as f64 / n as f64;
            let d = (x - centre + 0.5).rem_euclid(1.0) - 0.5;
            let env = (-(d / width).powi(2)).exp();
            Complex64::from_polar(env, 2.0 * PI * freq * x + phase)
        })
        .collect()
}

fn modulated_bumps(rng: &mut ChaCha8Rng, count: usize, n: usize) -> Result<Vec<GridFunction>, NumericError> {
    let top = (n / 2).trailing_zeros() as i32;
    let s = rng.gen_range(1..=top.max(1));
    let lo = 2f64.powi(s - 1);
    let xi = rng.gen_range(lo..=2.0 * lo).round();
    let centre: f64 = rng.gen_range(0.0..1.0);
    let width = rng.gen_range(2.0..8.0) / xi.max(1.0);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let samples = match i {
            0 => bump(n, centre, width, xi, 0.0),
            1 => bump(n, centre, width, -xi, rng.gen_range(0.0..2.0 * PI)),
            _ => {
                let f = rng.gen_range(-2.0 * lo..=2.0 * lo).round();
                bump(n, rng.gen_range(0.0..1.0), rng.gen_range(0.02..0.3), f, 0.0)
            }
        };
        out.push(GridFunction::from_samples(samples)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub a_values: Vec<i64>,
    pub ensemble_size: usize,
    pub seed: u64,
    /// worker threads; 0 means the global default
    pub jobs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub a: i64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub exponents: ExponentTuple,
    pub ensemble_size: usize,
    pub seed: u64,
    pub grid_size: usize,
    pub rows: Vec<SweepRow>,
}

/// As [`SweepTable::to_csv`], values with 12 significant digits.
pub fn format_value(x: f64) -> String {
    format!("{x:.11e}")
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "# format-version: {CSV_FORMAT_VERSION}\n# seed: {} ensemble-size: {} grid-size: {}\nA,p,ensemble_size,seed,ratio\n",
            self.seed, self.ensemble_size, self.grid_size
        );
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{},{},{}", r.a, self.exponents.label(), self.ensemble_size, self.seed, format_value(r.ratio));
        }
        s
    }

    /// `max_A r(A) / min_{A : r(A) > 0} r(A)`.
    pub fn spread(&self) -> Option<f64> {
        let pos: Vec<f64> = self.rows.iter().map(|r| r.ratio).filter(|r| *r > 0.0).collect();
        let min = pos.iter().copied().fold(f64::INFINITY, f64::min);
        let max = pos.iter().copied().fold(0.0, f64::max);
        (!pos.is_empty()).then(|| max / min)
    }

    /// Least-squares slope of `ln r(A)` against `A` over rows with `r > 0`.
    pub fn log_slope(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self.rows.iter().filter(|r| r.ratio > 0.0).map(|r| (r.a as f64, r.ratio.ln())).collect();
        if pts.len() < 2 {
            return None;
        }
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        Some(sxy / sxx)
    }
}

fn member_ratios(
    template: &GraphTemplate,
    families: &Families,
    exponents: &ExponentTuple,
    fs: &[GridFunction],
    a_values: &[i64],
) -> Result<Vec<f64>, NumericError> {
    let vs: Vec<VertexId> = template.vertices.clone();
    let fmap: Functions = vs.iter().copied().zip(fs.iter().cloned()).collect();
    let denom: f64 = fs.iter().zip(&exponents.p).map(|(f, p)| f.lp_norm(*p)).product();
    let mut pc: BTreeMap<VertexId, Pieces> = BTreeMap::new();
    for v in &vs {
        pc.insert(*v, pieces(&families[v], &fmap[v])?);
    }
    let bx = family_box(families);
    a_values
        .iter()
        .map(|&a| {
            if denom == 0.0 {
                return Ok(0.0);
            }
            Ok(lambda_from_pieces(&template.instantiate(a), &pc, &bx)?.norm() / denom)
        })
        .collect()
}

/// For each `A`, the supremum over the ensemble of
/// `|Λ_{g_A}(f)| / Π ‖f_v‖_{p_v}`; rows in the order of `a_values`.
pub fn uniformity_sweep(
    template: &GraphTemplate,
    families: &Families,
    exponents: &ExponentTuple,
    grid_size: usize,
    cfg: &SweepConfig,
) -> Result<SweepTable, NumericError> {
    exponents.validate()?;
    let nv = template.vertices.len();
    if template.distinguished.is_some() {
        return Err(NumericError::Precondition("sweep templates carry no distinguished vertex".into()));
    }
    if exponents.p.len() != nv {
        return Err(NumericError::InvalidExponents(format!("{} exponents for {nv} vertices", exponents.p.len())));
    }
    if cfg.ensemble_size == 0 {
        return Err(NumericError::Precondition("ensemble size must be at least 1".into()));
    }
    for v in &template.vertices {
        if !families.contains_key(v) {
            return Err(NumericError::MissingFamily(*v));
        }
    }
    let run = || -> Result<Vec<Vec<f64>>, NumericError> {
        (0..cfg.ensemble_size as u64)
            .into_par_iter()
            .map(|m| {
                let fs = ensemble_member(cfg.seed, m, nv, grid_size)?;
                member_ratios(template, families, exponents, &fs, &cfg.a_values)
            })
            .collect()
    };
    let per_member = if cfg.jobs == 0 {
        run()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| NumericError::Precondition(e.to_string()))?
            .install(run)?
    };
    let rows = cfg
        .a_values
        .iter()
        .enumerate()
        .map(|(i, &a)| SweepRow { a, ratio: per_member.iter().map(|r| r[i]).fold(0.0, f64::max) })
        .collect();
    Ok(SweepTable { exponents: exponents.clone(), ensemble_size: cfg.ensemble_size, seed: cfg.seed, grid_size, rows })
}

//! Oracles and random generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use paraproduct::corollary::{CorollaryInstance, Symbol};
use paraproduct::numeric::symbol::SymbolSpec;
use paraproduct::numeric::{GridFunction, Mask};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_function(rng: &mut ChaCha8Rng, n: usize) -> GridFunction {
    GridFunction::from_samples((0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()).unwrap()
}

pub fn mean_zero(rng: &mut ChaCha8Rng, n: usize) -> GridFunction {
    let mut spec: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    spec[0] = Complex64::new(0.0, 0.0);
    GridFunction::from_spectrum(spec).unwrap()
}

/// Inverse DFT by direct summation.
pub fn direct_inverse(spec: &[Complex64]) -> Vec<Complex64> {
    let n = spec.len();
    (0..n)
        .map(|m| (0..n).map(|k| spec[k] * Complex64::from_polar(1.0, 2.0 * PI * (k * m) as f64 / n as f64)).sum())
        .collect()
}

/// `(f * K)(x_m) = (1/N) Σ_l f(x_l) K(x_{m-l})` with `K` the kernel of the mask.
pub fn direct_convolution(mask: &Mask, f: &[Complex64]) -> Vec<Complex64> {
    let n = f.len();
    let kernel = direct_inverse(&mask.0);
    (0..n).map(|m| (0..n).map(|l| f[l] * kernel[(m + n - l) % n]).sum::<Complex64>() / n as f64).collect()
}

pub fn plain(j: i64, m: i64, amp: f64, rho: f64) -> Symbol {
    Symbol::single(SymbolSpec::shifted_ball(j, m, false).with_amplitude(amp).with_dilation(rho))
}

/// Random instance on a grid of at least 128 points: shifts in [-2, 2],
/// scales chosen so every support fits, at least one vanishing slot per scale.
pub fn random_corollary_instance(rng: &mut ChaCha8Rng, slots: usize, grid: usize) -> CorollaryInstance {
    let shifts: Vec<i64> = (0..slots).map(|_| rng.gen_range(-2..=2)).collect();
    let hi = 6 - shifts.iter().max().unwrap();
    let mut symbols = BTreeMap::new();
    let mut eps = BTreeMap::new();
    for j in hi - 5..=hi {
        let forced = rng.gen_range(0..slots);
        let row: Vec<Symbol> = (0..slots)
            .map(|i| {
                if i == forced || rng.gen_bool(0.3) {
                    Symbol::single(SymbolSpec::shifted_ball(j, shifts[i], true).with_amplitude(rng.gen_range(-1.0..1.0)).with_dilation([1.0, 0.75][rng.gen_range(0..2)]))
                } else {
                    plain(j, shifts[i], rng.gen_range(-1.0..1.0), [1.0, 0.75, 0.5][rng.gen_range(0..3)])
                }
            })
            .collect();
        symbols.insert(j, row);
        let e = if rng.gen_bool(0.5) {
            Complex64::new(if rng.gen_bool(0.5) { 1.0 } else { -1.0 }, 0.0)
        } else {
            Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..TAU))
        };
        eps.insert(j, e);
    }
    CorollaryInstance { grid_size: grid, shifts, symbols, eps }
}

mod common;

use num_complex::Complex64;
use paraproduct::corollary::*;
use paraproduct::numeric::symbol::SymbolSpec;
use paraproduct::numeric::GridFunction;
use paraproduct_core::Edge;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{mean_zero, plain, random_corollary_instance};

const N: usize = 128;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn vanishing(j: i64, m: i64) -> Symbol {
    Symbol::single(SymbolSpec::shifted_ball(j, m, true).with_amplitude(0.7))
}

fn instance(shifts: Vec<i64>, rows: Vec<(i64, Vec<Symbol>)>) -> CorollaryInstance {
    let eps = rows.iter().map(|(j, _)| (*j, one())).collect();
    CorollaryInstance { grid_size: N, shifts, symbols: rows.into_iter().collect(), eps }
}

#[test]
fn pigeonhole_single_class_when_last_slot_vanishes() {
    let inst = instance(vec![0, 1], (1..4).map(|j| (j, vec![plain(j, 0, 0.5, 1.0), vanishing(j, 1)])).collect());
    let cl = pigeonhole(&inst).unwrap();
    assert_eq!(cl.len(), 1);
    assert_eq!(cl[0].slot, 1);
    assert_eq!(cl[0].perm, vec![0, 1]);
    assert_eq!(cl[0].instance, inst);
}

#[test]
fn pigeonhole_alternating_slots_give_two_classes() {
    let rows = (1..5)
        .map(|j| {
            let r = if j % 2 == 0 { vec![vanishing(j, 0), plain(j, 1, 0.5, 1.0)] } else { vec![plain(j, 0, 0.5, 1.0), vanishing(j, 1)] };
            (j, r)
        })
        .collect();
    let inst = instance(vec![0, 1], rows);
    let cl = pigeonhole(&inst).unwrap();
    assert_eq!(cl.len(), 2);
    assert_eq!(cl[0].slot, 0);
    assert_eq!(cl[0].perm, vec![1, 0]);
    assert_eq!(cl[0].instance.shifts, vec![1, 0]);
    let total: usize = cl.iter().map(|c| c.instance.symbols.len()).sum();
    assert_eq!(total, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let fs = vec![mean_zero(&mut rng, N), mean_zero(&mut rng, N)];
    let whole = inst.evaluate(&fs).unwrap();
    let parts: Complex64 = cl.iter().map(|c| c.instance.evaluate(&c.permute(&fs)).unwrap()).sum();
    assert!((whole - parts).norm() < 1e-14 * whole.norm().max(1.0));
}

#[test]
fn pigeonhole_rejects_missing_vanishing_slot() {
    let inst = instance(vec![0, 0], vec![(1, vec![plain(1, 0, 0.5, 1.0), plain(1, 0, 0.2, 1.0)])]);
    assert_eq!(pigeonhole(&inst), Err(CorollaryError::NoVanishingSlot(1)));
}

#[test]
fn shift_normalization_and_absorption_preserve_the_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let inst = random_corollary_instance(&mut rng, 3, N);
    let fs: Vec<GridFunction> = (0..3).map(|_| mean_zero(&mut rng, N)).collect();
    for c in pigeonhole(&inst).unwrap() {
        let fs = c.permute(&fs);
        let (s, off) = normalize_shift(&c.instance);
        assert_eq!(s.shifts[2], 0);
        assert_eq!(off, c.instance.shifts[2]);
        let a = absorb_eps(&s);
        assert!(a.eps.values().all(|e| *e == one()));
        let v0 = c.instance.evaluate(&fs).unwrap();
        let v1 = a.evaluate(&fs).unwrap();
        assert!((v0 - v1).norm() < 1e-13 * v0.norm().max(1.0));
    }
}

#[test]
fn split_branches() {
    let inst = instance(vec![0, 0], vec![(2, vec![vanishing(2, 0), vanishing(2, 0)])]);
    let t = absorb_and_split(&inst).unwrap();
    assert_eq!(t.len(), 1);
    assert_eq!(t[0].pattern, vec![Branch::Remainder]);

    let inst = instance(vec![1, 0], vec![(2, vec![Symbol::phi(3), vanishing(2, 0)])]);
    let t = absorb_and_split(&inst).unwrap();
    assert_eq!(t.len(), 1);
    assert_eq!(t[0].pattern, vec![Branch::Phi]);
    assert_eq!(t[0].slots[1], vanishing(2, 0).scaled(one()));

    let m = plain(2, 1, -0.4, 0.75);
    let inst = instance(vec![1, 0], vec![(2, vec![m.clone(), vanishing(2, 0)])]);
    let t = absorb_and_split(&inst).unwrap();
    assert_eq!(t.len(), 2);
    let m0 = Complex64::new(-0.4, 0.0);
    let phi = t[0].slots[0].build(N).unwrap();
    let rem = t[1].slots[0].build(N).unwrap();
    assert_eq!(rem.at_origin(), Complex64::new(0.0, 0.0));
    let orig = m.build(N).unwrap();
    for k in 0..N {
        assert!((m0 * phi.0[k] + rem.0[k] - orig.0[k]).norm() <= 1e-14);
    }
    let last0 = t[0].slots[1].build(N).unwrap();
    let base = vanishing(2, 0).build(N).unwrap();
    assert!((0..N).all(|k| (last0.0[k] - m0 * base.0[k]).norm() <= 1e-15));
}

#[test]
fn telescope_identities() {
    let cutoff = telescope_cutoff(N).unwrap();
    assert_eq!(cutoff, 1);
    for top in cutoff..=6 {
        let t = telescope(top, cutoff).unwrap();
        let mut sum = t.residual.build(N).unwrap();
        for (_, p) in &t.pieces {
            let m = p.build(N).unwrap();
            assert_eq!(m.at_origin(), Complex64::new(0.0, 0.0));
            sum.0.iter_mut().zip(&m.0).for_each(|(a, b)| *a += b);
        }
        let phi = Symbol::phi(top).build(N).unwrap();
        assert!((0..N).all(|k| (sum.0[k] - phi.0[k]).norm() <= 1e-14));
    }
    assert_eq!(telescope(4, 4).unwrap().pieces.len(), 1);
    assert_eq!(telescope(3, 4), Err(CorollaryError::EmptyTelescope { cutoff: 4, top: 3 }));
    let r = telescope(3, 1).unwrap().residual.build(N).unwrap();
    assert_eq!(r.at_origin(), one());
    assert!(r.0[1..].iter().all(|x| *x == Complex64::new(0.0, 0.0)));
}

#[test]
fn hand_traced_two_slot_reduction() {
    let m1 = 2;
    let inst = instance(vec![m1, 0], (1..4).map(|j| (j, vec![Symbol::phi(j + m1), vanishing(j, 0)])).collect());
    let r = reduce_to_theorem(&inst).unwrap();
    assert_eq!(r.instances.len(), 1);
    let t = &r.instances[0];
    assert_eq!(t.pattern, vec![Branch::Phi]);
    assert_eq!(t.graph.edges(), &[Edge::new(2, 1, -m1)]);
    assert_eq!(t.families[&1].keys().copied().collect::<Vec<_>>(), (1..=5).collect::<Vec<_>>());
    assert!(r.all_vanish_at_origin(N).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let fs = vec![mean_zero(&mut rng, N), mean_zero(&mut rng, N)];
    let whole = inst.evaluate(&fs).unwrap();
    let got = r.evaluate_instances(&fs, N).unwrap();
    assert!((whole - got).norm() <= 1e-10 * whole.norm());
    assert_eq!(r.evaluate_residuals(&fs, N).unwrap(), Complex64::new(0.0, 0.0));
}

#[test]
fn all_vanishing_is_a_diagonal_instance() {
    let inst = instance(vec![1, -1, 0], (1..4).map(|j| (j, vec![vanishing(j, 1), vanishing(j, -1), vanishing(j, 0)])).collect());
    let r = reduce_to_theorem(&inst).unwrap();
    assert_eq!(r.instances.len(), 1);
    assert!(r.residuals.is_empty());
    let mut e = r.instances[0].graph.edges().to_vec();
    e.sort();
    // slot 1 is swapped last, then shifts (0, -1, 1) are normalized to (-1, -2, 0)
    assert_eq!(r.instances[0].perm, vec![2, 1, 0]);
    let mut want = vec![Edge::new(1, 3, -1), Edge::new(3, 1, 1), Edge::new(2, 3, -2), Edge::new(3, 2, 2)];
    want.sort();
    assert_eq!(e, want);
}

#[test]
fn random_instances_resum_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..12 {
        let n = 2 + case % 2;
        let inst = random_corollary_instance(&mut rng, n, N);
        let fs: Vec<GridFunction> = (0..n).map(|_| mean_zero(&mut rng, N)).collect();
        let r = reduce_to_theorem(&inst).unwrap();
        assert!(r.all_vanish_at_origin(N).unwrap());
        assert!(r.instances.len() <= n * (1 << (n - 1)));
        let whole = inst.evaluate(&fs).unwrap();
        let got = r.evaluate_instances(&fs, N).unwrap();
        let res = r.evaluate_residuals(&fs, N).unwrap();
        assert_eq!(res, Complex64::new(0.0, 0.0));
        assert!((whole - got).norm() <= 1e-10 * whole.norm(), "case {case}: {whole} vs {got}");
    }
}

#[test]
fn residuals_carry_the_means() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let inst = random_corollary_instance(&mut rng, 3, N);
    let fs: Vec<GridFunction> = (0..3)
        .map(|_| {
            let f = mean_zero(&mut rng, N);
            GridFunction::from_samples(f.samples().iter().map(|x| x + Complex64::new(0.3, -0.1)).collect()).unwrap()
        })
        .collect();
    let r = reduce_to_theorem(&inst).unwrap();
    let whole = inst.evaluate(&fs).unwrap();
    let got = r.evaluate_instances(&fs, N).unwrap() + r.evaluate_residuals(&fs, N).unwrap();
    assert!((whole - got).norm() <= 1e-10 * whole.norm());
}

#[test]
fn instance_count_ignores_shift_values() {
    let mk = |shifts: Vec<i64>| {
        let rows = (2..5)
            .map(|j| (j, vec![plain(j, shifts[0], 0.5, 0.75), vanishing(j, shifts[1]), plain(j, shifts[2], -0.3, 1.0)]))
            .collect();
        instance(shifts, rows)
    };
    let a = reduce_to_theorem(&mk(vec![0, 0, 0])).unwrap();
    let b = reduce_to_theorem(&mk(vec![1, -2, 1])).unwrap();
    assert_eq!(a.instances.len(), b.instances.len());
    assert_eq!(a.instances.len(), 2);
}

#[test]
fn sidecar_is_versioned_json() {
    let inst = instance(vec![1, 0], (1..3).map(|j| (j, vec![plain(j, 1, 0.5, 0.75), vanishing(j, 0)])).collect());
    let r = reduce_to_theorem(&inst).unwrap();
    let s = r.sidecar();
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    assert_eq!(v["format_version"], 1);
    assert_eq!(v["instances"].as_array().unwrap().len(), r.instances.len());
    assert!(v["instances"][0]["graph"].as_str().unwrap().starts_with("# format-version: 1"));
}

//! Simulator invariants: the impulse response, the Taylor coefficients, and
//! the symmetrized words tell one story; the recurrence is linear and
//! shift-stationary.

mod common;

use common::*;
use lsds::lattice::{impulse_response, simulate, LatticeSignal};
use lsds::matrix::C64;
use lsds::multipower::{polynomial_coefficient, sym_power, SymPowerKind};
use lsds::transfer::taylor_coeff;
use lsds::tuple::MultiIndex;
use rand::Rng;

#[test]
fn impulse_equals_taylor_equals_words() {
    for seed in 0..6u64 {
        let n = 1 + (seed as usize % 3);
        let mut r = rng(seed);
        let alpha = random_dissipative(n, 2, 2, 2, 0.9, &mut r);
        let level = 4usize;
        let resp = impulse_response(&alpha, level).unwrap();
        for s in MultiIndex::up_to_degree(n, level, false) {
            let from_lattice = resp.get(&s).expect("octant point computed");
            let from_transfer = taylor_coeff(&alpha, &s).unwrap();
            let gap = from_lattice.sub(&from_transfer).max_abs();
            assert!(gap <= 1e-10, "seed {seed} s {:?}: lattice vs transfer {gap}", s.components());
            if s.degree() >= 2 {
                let cs = polynomial_coefficient(&s).unwrap() as f64;
                let word = sym_power(
                    SymPowerKind::FlatSharp,
                    alpha.a(),
                    Some(alpha.b()),
                    Some(alpha.c()),
                    &s,
                )
                .unwrap()
                .scale(C64::new(cs, 0.0));
                let gap = from_lattice.sub(&word).max_abs();
                assert!(gap <= 1e-10, "seed {seed} s {:?}: lattice vs words {gap}", s.components());
            }
        }
    }
}

#[test]
fn simulation_is_linear_in_the_input() {
    let mut r = rng(12);
    let alpha = random_dissipative(2, 2, 1, 1, 0.9, &mut r);
    let levels = 3usize;
    let bound = levels as i64;
    let window_points = |level: i64| -> Vec<Vec<i64>> {
        let mut pts = Vec::new();
        for a in -bound..=bound {
            for b in -bound..=bound {
                if a + b == level {
                    pts.push(vec![a, b]);
                }
            }
        }
        pts
    };
    let x0 = LatticeSignal::zero_fill(2, 2, window_points(0));
    let mut u1 = LatticeSignal::new(2, 1);
    let mut u2 = LatticeSignal::new(2, 1);
    let mut sum = LatticeSignal::new(2, 1);
    for level in 0..levels as i64 {
        for p in window_points(level) {
            let a = C64::new(gaussian(&mut r), gaussian(&mut r));
            let b = C64::new(gaussian(&mut r), gaussian(&mut r));
            u1.insert(p.clone(), vec![a]).unwrap();
            u2.insert(p.clone(), vec![b]).unwrap();
            sum.insert(p, vec![a + b]).unwrap();
        }
    }
    let (_, y1) = simulate(&alpha, &x0, &u1, levels).unwrap();
    let (_, y2) = simulate(&alpha, &x0, &u2, levels).unwrap();
    let (_, ysum) = simulate(&alpha, &x0, &sum, levels).unwrap();
    for (p, v) in ysum.iter() {
        let a = y1.get(p).unwrap();
        let b = y2.get(p).unwrap();
        for ((s, x), y) in v.iter().zip(a).zip(b) {
            assert!((s - (x + y)).norm() <= 1e-12);
        }
    }
}

#[test]
fn responses_shift_with_the_impulse() {
    let mut r = rng(13);
    let alpha = random_dissipative(3, 2, 2, 1, 0.9, &mut r);
    let levels = 2usize;
    let bound = 2i64;
    let run = |tau: &[i64]| {
        let base: i64 = tau.iter().sum();
        let pts = |level: i64| -> Vec<Vec<i64>> {
            let mut out = Vec::new();
            for a in -bound + tau[0]..=bound + tau[0] {
                for b in -bound + tau[1]..=bound + tau[1] {
                    for c in -bound + tau[2]..=bound + tau[2] {
                        if a + b + c == level {
                            out.push(vec![a, b, c]);
                        }
                    }
                }
            }
            out
        };
        let x0 = LatticeSignal::zero_fill(3, 2, pts(base));
        let mut input = LatticeSignal::new(3, 2);
        for level in 0..levels as i64 {
            for p in pts(base + level) {
                let impulse = p == tau;
                input
                    .insert(
                        p,
                        vec![
                            C64::new(if impulse { 1.0 } else { 0.0 }, 0.0),
                            C64::new(if impulse { 0.5 } else { 0.0 }, 0.0),
                        ],
                    )
                    .unwrap();
            }
        }
        simulate(&alpha, &x0, &input, levels).unwrap().1
    };
    let base = run(&[0, 0, 0]);
    let tau = [1i64, 0, 2];
    let shifted = run(&tau);
    for (p, v) in base.iter() {
        let q: Vec<i64> = p.iter().zip(&tau).map(|(a, b)| a + b).collect();
        if let Some(w) = shifted.get(&q) {
            for (a, b) in v.iter().zip(w) {
                assert!((a - b).norm() <= 1e-15, "mismatch at {p:?} -> {q:?}");
            }
        }
    }
    let _ = r.gen::<f64>();
}

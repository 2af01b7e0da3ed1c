//! The symmetrized multipower recursion against the literal enumeration
//! oracle, the commutative collapse, and the binomial identity connecting
//! pencil powers to symmetrized coefficients.

mod common;

use common::*;
use lsds::matrix::{C64, CMatrix};
use lsds::multipower::{polynomial_coefficient, sym_power, sym_power_oracle, SymPowerKind};
use lsds::pencil::eval_pencil;
use lsds::tuple::{MultiIndex, OperatorTuple};

#[test]
fn recursion_matches_oracle_all_kinds() {
    for seed in 0..6u64 {
        for n in 1..=3usize {
            let mut r = rng(seed * 31 + n as u64);
            let a = random_tuple(n, 3, 3, &mut r);
            let b = random_tuple(n, 3, 2, &mut r);
            let c = random_tuple(n, 2, 3, &mut r);
            for s in MultiIndex::up_to_degree(n, 5, true) {
                for kind in [
                    SymPowerKind::Plain,
                    SymPowerKind::SharpB,
                    SymPowerKind::FlatC,
                    SymPowerKind::FlatSharp,
                ] {
                    let fast = sym_power(kind, &a, Some(&b), Some(&c), &s);
                    let slow = sym_power_oracle(kind, &a, Some(&b), Some(&c), &s);
                    match (fast, slow) {
                        (Ok(f), Ok(o)) => {
                            let gap = f.sub(&o).max_abs();
                            assert!(
                                gap <= 1e-12 * (1.0 + o.max_abs()),
                                "{kind:?} at {:?}: gap {gap}",
                                s.components()
                            );
                        }
                        (Err(_), Err(_)) => {} // both reject out-of-domain indices
                        (f, o) => panic!(
                            "{kind:?} at {:?}: recursion {:?} oracle {:?}",
                            s.components(),
                            f.is_ok(),
                            o.is_ok()
                        ),
                    }
                }
            }
        }
    }
}

#[test]
fn commuting_tuples_collapse_to_usual_multipowers() {
    for seed in 0..8u64 {
        let n = 1 + (seed as usize % 3);
        let mut r = rng(seed);
        let u = lsds::pencil::random_unitary(3, &mut r);
        // commuting family: simultaneously diagonalized
        let mats: Vec<CMatrix> = (0..n)
            .map(|_| {
                let d = CMatrix::from_fn(3, 3, |i, j| {
                    if i == j {
                        C64::new(gaussian(&mut r), gaussian(&mut r))
                    } else {
                        C64::new(0.0, 0.0)
                    }
                });
                u.matmul(&d).matmul(&u.adjoint())
            })
            .collect();
        let a = OperatorTuple::new(mats.clone()).unwrap();
        for s in MultiIndex::up_to_degree(n, 4, true) {
            let sym = sym_power(SymPowerKind::Plain, &a, None, None, &s).unwrap();
            let mut plain = CMatrix::identity(3);
            for (k, m) in mats.iter().enumerate() {
                for _ in 0..s.component(k) {
                    plain = plain.matmul(m);
                }
            }
            let gap = sym.sub(&plain).max_abs();
            assert!(gap <= 1e-10 * (1.0 + plain.max_abs()), "seed {seed} s {:?}", s.components());
        }
    }
}

#[test]
fn pencil_power_binomial_identity() {
    // (zA)^n = sum_{|s|=n} c_s z^s A^s
    for seed in 0..4u64 {
        for n_params in 1..=3usize {
            let mut r = rng(seed * 17 + n_params as u64);
            let a = random_tuple(n_params, 3, 3, &mut r);
            for degree in 1..=5usize {
                for _ in 0..20 {
                    let z = random_polydisc_point(n_params, &mut r);
                    let za = eval_pencil(&a, &z).unwrap();
                    let mut power = CMatrix::identity(3);
                    for _ in 0..degree {
                        power = power.matmul(&za);
                    }
                    let mut sum = CMatrix::zeros(3, 3);
                    for s in MultiIndex::with_degree(n_params, degree) {
                        let cs = polynomial_coefficient(&s).unwrap() as f64;
                        let mut zs = C64::new(cs, 0.0);
                        for k in 0..n_params {
                            for _ in 0..s.component(k) {
                                zs *= z[k];
                            }
                        }
                        sum = sum
                            .add(&sym_power(SymPowerKind::Plain, &a, None, None, &s).unwrap().scale(zs));
                    }
                    let gap = power.sub(&sum).max_abs();
                    assert!(gap <= 1e-10 * (1.0 + power.max_abs()));
                }
            }
        }
    }
}

#[test]
fn word_sums_independent_of_summand_order() {
    // reversing the tuple and the index reverses the recursion's summand
    // order; values agree to rounding
    for seed in 0..6u64 {
        let n = 2 + (seed as usize % 2);
        let mut r = rng(seed + 5);
        let a = random_tuple(n, 3, 3, &mut r);
        let rev = OperatorTuple::new(a.mats().iter().rev().cloned().collect()).unwrap();
        for s in MultiIndex::up_to_degree(n, 5, false) {
            let s_rev = MultiIndex::new(s.components().iter().rev().copied().collect());
            let forward = sym_power(SymPowerKind::Plain, &a, None, None, &s).unwrap();
            let backward = sym_power(SymPowerKind::Plain, &rev, None, None, &s_rev).unwrap();
            let gap = forward.sub(&backward).max_abs();
            assert!(gap <= 1e-13 * (1.0 + forward.max_abs()));
        }
    }
}

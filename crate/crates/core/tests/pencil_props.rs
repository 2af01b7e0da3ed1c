//! Pencil-level invariants: the algebraic conservativity criterion against
//! sampled unitarity, the averaged necessary condition, the maximum
//! principle, and search homogeneity.

mod common;

use common::*;
use lsds::matrix::C64;
use lsds::pencil::{
    eval_pencil, is_conservative_algebraic, random_conservative_pencil, random_torus_points,
    torus_norm_max, Verdict,
};

#[test]
fn conservative_iff_unitary_on_samples() {
    for seed in 0..10u64 {
        let n = 1 + (seed as usize % 4);
        let dim = 3 + (seed as usize % 5);
        let g = random_conservative_pencil(n, dim, seed);
        assert!(is_conservative_algebraic(&g, 1e-10).pass);
        for zeta in random_torus_points(n, 200, seed.wrapping_add(1)) {
            let defect = eval_pencil(&g, zeta.coords()).unwrap().unitarity_defect().unwrap();
            assert!(defect <= 1e-8, "seed {seed}: defect {defect}");
        }

        // perturbed: algebraic check fails and some sample sees the defect
        let mut r = rng(seed.wrapping_add(99));
        let noisy = g.map(|m| {
            m.add(&random_matrix(m.rows(), m.cols(), &mut r).scale(C64::new(1e-4, 0.0)))
        });
        assert!(!is_conservative_algebraic(&noisy, 1e-10).pass);
        let worst = random_torus_points(n, 200, seed.wrapping_add(2))
            .iter()
            .map(|zeta| {
                eval_pencil(&noisy, zeta.coords()).unwrap().unitarity_defect().unwrap()
            })
            .fold(0.0f64, f64::max);
        assert!(worst > 1e-8, "seed {seed}: perturbation invisible, worst {worst}");
    }
}

#[test]
fn dissipative_verdict_implies_necessary_bound() {
    for seed in 0..12u64 {
        let n = 1 + (seed as usize % 3);
        let mut r = rng(seed);
        let g = random_tuple(n, 3, 3, &mut r);
        let sum: f64 = g.mats().iter().map(|m| m.spectral_norm()).sum();
        let g = g.scale(C64::new(0.95 / sum, 0.0));
        let report = torus_norm_max(&g, 8, 4, seed).unwrap();
        assert_eq!(report.verdict, Verdict::Dissipative);
        assert!(report.necessary_bound <= 1.0 + 1e-8);
        // torus max dominates the averaged bound
        assert!(report.torus_max.powi(2) + 1e-9 >= report.necessary_bound);
    }
}

#[test]
fn violation_verdict_is_witnessed() {
    for seed in 0..6u64 {
        let n = 2 + (seed as usize % 2);
        let g = random_conservative_pencil(n, 4, seed).scale(C64::new(1.05, 0.0));
        let report = torus_norm_max(&g, 8, 4, seed).unwrap();
        assert_eq!(report.verdict, Verdict::ViolationFound);
        // the witness point re-evaluates above the margin
        let at_witness = eval_pencil(&g, report.argmax.coords()).unwrap().spectral_norm();
        assert!(at_witness > 1.0 + 1e-9);
    }
}

#[test]
fn interior_never_beats_torus() {
    for seed in 0..8u64 {
        let n = 1 + (seed as usize % 3);
        let mut r = rng(seed.wrapping_add(7));
        let g = random_tuple(n, 3, 4, &mut r);
        let report = torus_norm_max(&g, 10, 6, seed).unwrap();
        for _ in 0..200 {
            let z = random_polydisc_point(n, &mut r);
            let inner = eval_pencil(&g, &z).unwrap().spectral_norm();
            assert!(
                inner <= report.torus_max + 1e-9,
                "seed {seed}: interior {inner} vs torus {}",
                report.torus_max
            );
        }
    }
}

#[test]
fn torus_max_is_homogeneous() {
    for seed in 0..6u64 {
        let n = 1 + (seed as usize % 3);
        let mut r = rng(seed.wrapping_add(31));
        let g = random_tuple(n, 3, 3, &mut r);
        let c = C64::new(-0.7, 1.9);
        let scaled = g.scale(c);
        let base = torus_norm_max(&g, 8, 3, seed).unwrap().torus_max;
        let big = torus_norm_max(&scaled, 8, 3, seed).unwrap().torus_max;
        assert!(
            (big - c.norm() * base).abs() <= 1e-9 * (1.0 + big),
            "seed {seed}: {big} vs {}",
            c.norm() * base
        );
    }
}

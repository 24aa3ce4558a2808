use std::collections::HashMap;
use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smol_core::{
    apply_extinction, compute_cvt_centroids, Archive, Centroids, Descriptor, Genome, InsertOutcome, ScaledArm,
    ScaledArmParams, Solution, Task,
};

fn centroids(k: usize) -> Arc<Centroids> {
    Arc::new(compute_cvt_centroids(k, 2, 10 * k, 1).unwrap())
}

fn arm_archive(c: Arc<Centroids>, n: usize, sigma: f64, seed: u64) -> (ScaledArm, Archive) {
    let arm = ScaledArm::new(ScaledArmParams::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = Archive::new(c);
    for _ in 0..n {
        let g = Genome::new((0..8).map(|_| rng.random_range(-sigma..sigma)).collect()).unwrap();
        let (f, d) = arm.evaluate(&g, 1.0);
        a.try_insert(Solution::from_evaluation(g, f, d).unwrap()).unwrap();
    }
    (arm, a)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn insertions_match_a_shadow_archive(ops in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0, -5i32..5), 1..300)) {
        let c = centroids(16);
        let mut archive = Archive::new(Arc::clone(&c));
        let mut shadow: HashMap<usize, f64> = HashMap::new();
        for (x, y, f) in ops {
            let f = f64::from(f);
            let s = Solution { genome: Genome::zeros(1), fitness: f, descriptor: Descriptor::new(vec![x, y]).unwrap() };
            // Brute-force nearest cell.
            let cell = (0..c.len())
                .map(|i| (c.point(i).iter().zip([x, y]).map(|(p, q)| (p - q) * (p - q)).sum::<f64>(), i))
                .fold((f64::INFINITY, 0), |b, t| if t.0 < b.0 { t } else { b }).1;
            let expected = match shadow.get(&cell) {
                None => InsertOutcome::AddedToEmptyCell,
                Some(&old) if f > old => InsertOutcome::ReplacedIncumbent,
                Some(_) => InsertOutcome::Rejected,
            };
            let before = archive.get(cell).map(|s| s.fitness);
            prop_assert_eq!(archive.try_insert(s).unwrap(), expected);
            if expected != InsertOutcome::Rejected {
                shadow.insert(cell, f);
            }
            let after = archive.get(cell).unwrap().fitness;
            prop_assert!(before.is_none_or(|b| after >= b));
        }
        prop_assert_eq!(archive.occupied(), shadow.len());
        for (cell, s) in archive.iter() {
            prop_assert_eq!(shadow[&cell], s.fitness);
            prop_assert_eq!(c.assign_cell(&s.descriptor).unwrap(), cell);
        }
    }
}

#[test]
fn transfer_at_unchanged_alpha_is_identity() {
    let (arm, a) = arm_archive(centroids(256), 2000, 2.0, 4);
    let t = a.reevaluate_and_transfer(&arm, 1.0).unwrap();
    assert_eq!(t.discarded, 0);
    assert_eq!(t.reevaluated, a.occupied());
    let before: Vec<_> = a.iter().collect();
    let after: Vec<_> = t.archive.iter().collect();
    assert_eq!(before, after);
}

#[test]
fn weakening_never_increases_arm_coverage() {
    let c = centroids(256);
    let arm = ScaledArm::new(ScaledArmParams::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut a = Archive::new(Arc::clone(&c));
    while a.occupied() < 50 {
        let g = Genome::new((0..8).map(|_| rng.random_range(-3.0..3.0)).collect()).unwrap();
        let (f, d) = arm.evaluate(&g, 1.5);
        a.try_insert(Solution::from_evaluation(g, f, d).unwrap()).unwrap();
    }
    let t = a.reevaluate_and_transfer(&arm, 1.0).unwrap();
    // Independent count: re-run both evaluations and count distinct cells.
    let cells_at = |alpha: f64| {
        let mut cells: Vec<usize> = a
            .iter()
            .map(|(_, s)| c.assign_cell(&arm.evaluate(&s.genome, alpha).1).unwrap())
            .collect();
        cells.sort();
        cells.dedup();
        cells.len()
    };
    assert_eq!(cells_at(1.5), 50);
    assert_eq!(t.archive.occupied(), cells_at(1.0));
    assert!(t.archive.occupied() <= a.occupied());
    // Survivors reproduce their stored values when re-evaluated.
    for (cell, s) in t.archive.iter() {
        let (f, d) = arm.evaluate(&s.genome, 1.0);
        assert_eq!(f, s.fitness);
        assert_eq!(&d[..], &s.descriptor[..]);
        assert_eq!(c.assign_cell(&d).unwrap(), cell);
    }
}

#[test]
fn extinction_edge_cases() {
    let (_, a) = arm_archive(centroids(256), 2000, 2.0, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut none = a.clone();
    assert_eq!(apply_extinction(&mut none, 0.0, &mut rng).unwrap(), 0);
    assert_eq!(none.iter().collect::<Vec<_>>(), a.iter().collect::<Vec<_>>());
    let mut all = a.clone();
    apply_extinction(&mut all, 1.0, &mut rng).unwrap();
    assert!(all.is_empty());
    assert_eq!(all.centroids(), a.centroids());
    assert!(apply_extinction(&mut all, 1.5, &mut rng).is_err());
}

#[test]
fn extinction_survivors_follow_binomial() {
    let c = Arc::new(Centroids::from_points(1, (0..1000).map(|i| i as f64 / 999.0).collect()).unwrap());
    let mut full = Archive::new(Arc::clone(&c));
    for i in 0..1000 {
        full.try_insert(Solution {
            genome: Genome::zeros(1),
            fitness: 0.0,
            descriptor: Descriptor::new(c.point(i).to_vec()).unwrap(),
        })
        .unwrap();
    }
    assert_eq!(full.occupied(), 1000);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let sd = (1000.0f64 * 0.25).sqrt();
    for _ in 0..100 {
        let mut a = full.clone();
        let removed = apply_extinction(&mut a, 0.5, &mut rng).unwrap();
        assert_eq!(a.occupied(), 1000 - removed);
        assert!((a.occupied() as f64 - 500.0).abs() <= 3.0 * sd, "{}", a.occupied());
    }
}

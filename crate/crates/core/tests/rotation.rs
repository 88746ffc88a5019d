mod common;

use common::{line_angle_deg, random_polynomial};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rotgrid::anova::{objective, AnovaObjective, Polynomial};
use rotgrid::rotation::{
    cg_run, fd_gradient, line_search, optimize, parallel_transport, retract, OptimizerConfig, StiefelPoint,
    TangentDirection,
};

fn ridge() -> Polynomial {
    // (x₁ + x₂)²
    Polynomial::from_terms(2, [(vec![2, 0], 1.0), (vec![1, 1], 2.0), (vec![0, 2], 1.0)]).unwrap()
}

fn random_matrix(d: usize, k: usize, seed: u64) -> DMatrix<f64> {
    StiefelPoint::random(d, k, seed).unwrap().into_matrix() * 0.7
        + StiefelPoint::random(d, k, seed.wrapping_add(1)).unwrap().into_matrix() * 1.3
}

fn skew_defect(q: &StiefelPoint, m: &TangentDirection) -> f64 {
    let s = q.matrix().transpose() * m.matrix();
    (&s + s.transpose()).norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transport_lands_in_tangent_space(d in 1usize..=6, k in 1usize..=6, seed in any::<u64>()) {
        let k = k.min(d);
        let q = StiefelPoint::random(d, k, seed).unwrap();
        let m = TangentDirection::new(random_matrix(d, k, seed ^ 7));
        prop_assert!(skew_defect(&q, &parallel_transport(&m, &q)) < 1e-10);
    }

    #[test]
    fn transport_fixes_tangent_vectors(d in 1usize..=6, k in 1usize..=6, seed in any::<u64>()) {
        let k = k.min(d);
        let q = StiefelPoint::random(d, k, seed).unwrap();
        let m = q.project_tangent(&random_matrix(d, k, seed ^ 9));
        let moved = parallel_transport(&m, &q);
        prop_assert!((moved.matrix() - m.matrix()).norm() < 1e-10);
    }

    #[test]
    fn retraction_stays_on_manifold(d in 1usize..=6, k in 1usize..=6, delta in 0.0f64..3.0, seed in any::<u64>()) {
        let k = k.min(d);
        let q = StiefelPoint::random(d, k, seed).unwrap();
        let m = q.project_tangent(&random_matrix(d, k, seed ^ 3));
        let next = retract(&q, delta, &m).unwrap();
        prop_assert!(next.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn forward_gradient_matches_central_difference(d in 1usize..=5, k in 1usize..=3, seed in any::<u64>()) {
        let k = k.min(d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_polynomial(&mut rng, d, 3);
        let q = StiefelPoint::random(d, k, seed ^ 1).unwrap();
        let g = fd_gradient(&p, &q, 1e-6).unwrap();
        let obj = AnovaObjective::new(&p, k).unwrap();
        let h = 1e-5;
        let central = DMatrix::from_fn(d, k, |i, j| {
            let mut plus = q.matrix().clone();
            let mut minus = q.matrix().clone();
            plus[(i, j)] += h;
            minus[(i, j)] -= h;
            (obj.value_unchecked(&plus) - obj.value_unchecked(&minus)) / (2.0 * h)
        });
        let err = (g.matrix() - &central).norm();
        prop_assert!(err <= 1e-3 * central.norm().max(1e-6), "err {err} vs |g| {}", central.norm());
    }
}

#[test]
fn iterates_orthonormal_and_values_monotone() {
    let cfg = OptimizerConfig::default();
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = 2 + (seed as usize % 4);
        let k = 1 + (seed as usize % d.min(3));
        let p = random_polynomial(&mut rng, d, 3);
        let obj = AnovaObjective::new(&p, k).unwrap();
        let run = cg_run(&obj, StiefelPoint::random(d, k, seed).unwrap(), &cfg);
        assert!(run.defects.iter().all(|&e| e < 1e-10));
        assert!(run.values.windows(2).all(|w| w[1] >= w[0]), "{:?}", run.values);
    }
}

#[test]
fn ridge_optimum_found() {
    let res = optimize(&ridge(), 1, &OptimizerConfig::default()).unwrap();
    let angle = line_angle_deg(&res.frame.column(0), &[1.0, 1.0]);
    assert!(angle < 1.0, "angle {angle}");
    assert!((res.value - 8.0 * (-1f64).exp()).abs() < 1e-4);
}

#[test]
fn axis_ridge_in_three_dimensions() {
    let p = Polynomial::from_terms(3, [(vec![2, 0, 0], 1.0)]).unwrap();
    let res = optimize(&p, 1, &OptimizerConfig::default()).unwrap();
    assert!(line_angle_deg(&res.frame.column(0), &[1.0, 0.0, 0.0]) < 1.0);
}

#[test]
fn square_optimum_dominates_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let p = random_polynomial(&mut rng, 3, 3);
    let res = optimize(&p, 3, &OptimizerConfig::default()).unwrap();
    let id = objective(&p, &StiefelPoint::identity(3, 3).unwrap(), 3).unwrap();
    assert!(res.value >= id);
}

#[test]
fn line_search_from_axis_improves_ridge() {
    let p = ridge();
    let q = StiefelPoint::identity(2, 1).unwrap();
    let base = objective(&p, &q, 1).unwrap();
    assert!((base - 2.0 * (-1f64).exp()).abs() < 1e-12);
    let cfg = OptimizerConfig::default();
    let g = q.project_tangent(fd_gradient(&p, &q, cfg.fd_step).unwrap().matrix());
    let delta = line_search(&p, &q, &g, &cfg).unwrap();
    assert!(delta > 0.0);
    assert!(objective(&p, &retract(&q, delta, &g).unwrap(), 1).unwrap() > base);
    assert_eq!(line_search(&p, &q, &g.neg(), &cfg).unwrap(), 0.0);
}

#[test]
fn constant_surrogate_rejected() {
    assert!(optimize(&Polynomial::constant(2, 3.0), 1, &OptimizerConfig::default()).is_err());
}

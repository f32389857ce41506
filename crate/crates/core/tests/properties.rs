use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use loo_witness::criteria::{concurrence_lower_bounds, concurrence_pure, max_concurrence, CriterionScores, Criterion};
use loo_witness::linalg::RMatrix;
use loo_witness::loo::{canonical_basis_for, rotate, OrthogonalRotation};
use loo_witness::oracle::sampled_max_trace;
use loo_witness::qstate::{schmidt, DensityMatrix};
use loo_witness::sample::{haar_orthogonal, haar_pure, random_local_unitary, random_mixed_state};
use loo_witness::witness::{correlation_matrix, covariance_matrix, lmax_pure, optimal_nonlinear_min};
use loo_witness::ExecMode;

const DIMS: [(usize, usize); 4] = [(2, 2), (2, 3), (3, 2), (3, 3)];

fn seeded_state(seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (da, db) = DIMS[rng.random_range(0..DIMS.len())];
    random_mixed_state(da, db, &mut rng)
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn singular_value_sums_do_not_depend_on_the_starting_bases(seed in any::<u64>()) {
        let rho = seeded_state(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
        let (ga, gb) = (canonical_basis_for(rho.dim_a()), canonical_basis_for(rho.dim_b()));
        let ra = OrthogonalRotation::new(haar_orthogonal(ga.len(), &mut rng)).unwrap();
        let rb = OrthogonalRotation::new(haar_orthogonal(gb.len(), &mut rng)).unwrap();
        let (ha, hb) = (rotate(&ga, &ra).unwrap(), rotate(&gb, &rb).unwrap());
        for (x, y) in [
            (correlation_matrix(&rho, &ga, &gb).unwrap(), correlation_matrix(&rho, &ha, &hb).unwrap()),
            (covariance_matrix(&rho, &ga, &gb).unwrap(), covariance_matrix(&rho, &ha, &hb).unwrap()),
        ] {
            prop_assert!((x.singular_value_sum() - y.singular_value_sum()).abs() < 1e-9);
        }
    }

    #[test]
    fn lmax_bound_dominates_realign_bound(seed in any::<u64>()) {
        let rho = seeded_state(seed);
        let b = concurrence_lower_bounds(&rho).unwrap();
        prop_assert!(b.bound_lmax >= b.bound_realign - 1e-9);
        let cap = max_concurrence(b.dim_min);
        for x in [b.bound_ppt, b.bound_realign, b.bound_lmax, b.bound_combined] {
            prop_assert!((0.0..=cap + 1e-12).contains(&x));
        }
        let max = b.bound_ppt.max(b.bound_realign).max(b.bound_lmax);
        prop_assert!((b.bound_combined - max).abs() <= 1e-12);
    }

    #[test]
    fn verdict_scores_are_local_unitary_invariant(seed in any::<u64>()) {
        let rho = seeded_state(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.rotate_left(17));
        let moved = rho.conjugated(&random_local_unitary(rho.dim_a(), rho.dim_b(), &mut rng));
        let (s0, s1) = (CriterionScores::compute(&rho).unwrap(), CriterionScores::compute(&moved).unwrap());
        for c in Criterion::ALL {
            prop_assert!((s0.score(c) - s1.score(c)).abs() < 1e-8, "{c}");
        }
    }

    #[test]
    fn pure_state_bounds_are_valid(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (da, db) = DIMS[rng.random_range(0..DIMS.len())];
        let psi = haar_pure(da * db, &mut rng);
        let rho = DensityMatrix::from_pure(da, db, &psi).unwrap();
        let c = concurrence_pure(&psi, da, db).unwrap();
        let b = concurrence_lower_bounds(&rho).unwrap();
        for x in [b.bound_ppt, b.bound_realign, b.bound_lmax] {
            prop_assert!(x <= c + 1e-8, "bound {x} exceeds concurrence {c}");
        }
        let coeffs = schmidt(&psi, da, db).unwrap().coefficients;
        let lmax = optimal_nonlinear_min(&rho).unwrap().l_max();
        prop_assert!((lmax_pure(&coeffs).unwrap() - lmax).abs() < 1e-9);
    }
}

#[test]
fn oracle_never_beats_rectangular_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let m = RMatrix::from_fn(4, 9, |_, _| rng.random::<f64>() - 0.5);
    let report = sampled_max_trace(&m, 100_000, 7, ExecMode::default()).unwrap();
    assert!(report.gap >= -1e-9, "gap {}", report.gap);
    assert!(report.gap <= report.analytic_value);
}

#[test]
fn oracle_gap_median_shrinks_with_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut gaps: [Vec<f64>; 3] = Default::default();
    for t in 0..24 {
        let (da, db) = DIMS[t % DIMS.len()];
        let rho = random_mixed_state(da, db, &mut rng);
        let mu = correlation_matrix(&rho, &canonical_basis_for(da), &canonical_basis_for(db)).unwrap();
        for (slot, n) in [100, 1_000, 10_000].into_iter().enumerate() {
            let r = sampled_max_trace(&mu.matrix, n, t as u64, ExecMode::default()).unwrap();
            assert!(r.gap >= -1e-9 && r.gap <= r.analytic_value);
            gaps[slot].push(r.gap);
        }
    }
    let [g2, g3, g4] = gaps.map(median);
    assert!(g3 <= g2 && g4 <= g3, "medians {g2} {g3} {g4}");
}

#[test]
fn oracle_is_schedule_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let m = RMatrix::from_fn(9, 9, |_, _| rng.random::<f64>());
    let a = sampled_max_trace(&m, 3000, 1, ExecMode::Sequential).unwrap();
    let b = sampled_max_trace(&m, 3000, 1, ExecMode::Parallel).unwrap();
    assert_eq!(a.best_sampled.to_bits(), b.best_sampled.to_bits());
}

use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use qsle_core::ent_time::{entanglement_from_time, tau_from_entanglement};
use qsle_core::oracle::{brute_force_overlap, schmidt_overlap};
use qsle_core::qsl::{build_h_opt, evolve_opt, DenseHamiltonian};
use qsle_core::separable::alternating_ascent;
use qsle_core::{
    assemble, contract_except, geometric_entanglement, haar_random_state, inner_product, tau_m, OptConfig,
    Partition, ProductState, PureState, C64,
};

fn small_dims() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(2usize..=3, 2..=3)
}

fn random_partition(k: usize, seed: u64) -> Partition {
    let mut rgs = vec![0usize];
    let mut s = seed;
    for i in 1..k {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let top = rgs.iter().max().unwrap() + 1;
        rgs.push(((s >> 33) as usize) % (top + 1).min(i + 1));
    }
    Partition::from_rgs(&rgs).unwrap()
}

fn random_product(dims: &[usize], p: &Partition, seed: u64) -> ProductState {
    let factors = p
        .block_dims(dims)
        .into_iter()
        .enumerate()
        .map(|(j, bd)| haar_random_state(&bd, seed.wrapping_add(j as u64 * 7919)).unwrap())
        .collect();
    ProductState::new(p.clone(), factors).unwrap()
}

fn random_unitary(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let g = DMatrix::from_fn(d, d, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    g.qr().q()
}

fn quick() -> OptConfig {
    OptConfig {
        restarts: 6,
        ..OptConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn assembled_products_are_normalized(dims in small_dims(), pseed in any::<u64>(), seed in any::<u64>()) {
        let p = random_partition(dims.len(), pseed);
        let phi = assemble(&random_product(&dims, &p, seed));
        prop_assert!((phi.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn contraction_reproduces_overlap(dims in small_dims(), pseed in any::<u64>(), seed in any::<u64>()) {
        let p = random_partition(dims.len(), pseed);
        let prod = random_product(&dims, &p, seed);
        let psi = haar_random_state(&dims, seed ^ 0xabcdef).unwrap();
        let full = inner_product(&assemble(&prod), &psi).unwrap();
        for j in 0..p.num_blocks() {
            let Ok(v) = contract_except(&psi, &prod, j) else { continue };
            let partial: C64 = prod.factors()[j]
                .amplitudes()
                .iter()
                .zip(&v)
                .map(|(a, b)| a.conj() * b)
                .sum();
            prop_assert!((partial - full).norm() < 1e-12);
        }
    }

    #[test]
    fn ascent_is_monotone(dims in small_dims(), pseed in any::<u64>(), seed in any::<u64>()) {
        let p = random_partition(dims.len(), pseed);
        let psi = haar_random_state(&dims, seed).unwrap();
        let start = random_product(&dims, &p, seed.wrapping_add(1));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let run = alternating_ascent(&psi, &start, 200, 1e-12, &mut rng).unwrap();
        for w in run.history.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12, "{:?}", run.history);
        }
        prop_assert!(run.overlap <= 1.0 + 1e-12);
    }

    #[test]
    fn entanglement_in_unit_interval_and_phase_invariant(dims in small_dims(), seed in any::<u64>(), theta in 0.0..std::f64::consts::TAU) {
        let psi = haar_random_state(&dims, seed).unwrap();
        let rotated = psi.with_phase(C64::from_polar(1.0, theta));
        for m in 2..=dims.len() {
            let a = geometric_entanglement(&psi, m, &quick()).unwrap().value;
            let b = geometric_entanglement(&rotated, m, &quick()).unwrap().value;
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn time_and_entanglement_invert(e in 0.0f64..=1.0, omega in 1e-3f64..1e3) {
        let tau = tau_from_entanglement(e, omega).unwrap();
        prop_assert!(tau >= 0.0 && omega * tau <= std::f64::consts::FRAC_PI_2 + 1e-15);
        prop_assert!((entanglement_from_time(tau, omega).unwrap() - e).abs() < 1e-12);
    }
}

#[test]
fn products_are_separable() {
    for seed in 0..10u64 {
        let dims = [2, 3, 2];
        let p = random_partition(3, seed);
        let phi = assemble(&random_product(&dims, &Partition::finest(3), seed));
        let g = geometric_entanglement(&phi, 3, &quick()).unwrap();
        assert!(g.value < 1e-12, "seed {seed}: {}", g.value);
        if p.num_blocks() >= 2 {
            let m = p.num_blocks();
            assert!(geometric_entanglement(&phi, m, &quick()).unwrap().value < 1e-12);
        }
    }
}

#[test]
fn local_unitaries_leave_full_separability_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for seed in 0..6u64 {
        let dims = vec![2, 2, 3];
        let psi = haar_random_state(&dims, seed).unwrap();
        let mut moved = psi.clone();
        for (site, &d) in dims.iter().enumerate() {
            moved = moved.apply_local(site, &random_unitary(d, &mut rng)).unwrap();
        }
        let a = geometric_entanglement(&psi, 3, &OptConfig::default()).unwrap().value;
        let b = geometric_entanglement(&moved, 3, &OptConfig::default()).unwrap().value;
        assert_abs_diff_eq!(a, b, epsilon = 1e-7);
    }
}

#[test]
fn optimizer_bracketed_by_oracle_and_explicit_products() {
    for seed in 0..5u64 {
        let dims = [2, 2, 2];
        let psi = haar_random_state(&dims, seed).unwrap();
        let p = Partition::finest(3);
        let g = geometric_entanglement(&psi, 3, &OptConfig::default()).unwrap();
        let found = 1.0 - g.value;
        let grid = brute_force_overlap(&psi, &p, 32).unwrap();
        assert!((found.sqrt() - grid).abs() < 1e-8, "seed {seed}: {} vs {grid}", found.sqrt());
        for s in 0..20u64 {
            let phi = assemble(&random_product(&dims, &p, s * 31 + seed));
            let o = inner_product(&psi, &phi).unwrap().norm();
            assert!(o <= found.sqrt() + 1e-12);
        }
        let bip = Partition::new(3, vec![vec![0], vec![1, 2]]).unwrap();
        assert!(schmidt_overlap(&psi, &bip).unwrap() <= 1.0 + 1e-12);
    }
}

#[test]
fn entangled_states_take_positive_time() {
    for seed in 0..8u64 {
        let psi = haar_random_state(&[2, 3], seed).unwrap();
        let r = tau_m(&psi, 2, 1.0, &quick()).unwrap();
        assert!(r.e_m > 1e-9);
        assert!(r.tau_internal > 0.0);
    }
}

#[test]
fn evolution_stays_unitary_for_long_times() {
    let psi = haar_random_state(&[2, 2, 2], 3).unwrap();
    let phi = haar_random_state(&[2, 2, 2], 4).unwrap();
    let h = build_h_opt(&psi, &phi, 1.3).unwrap();
    let dense = h.dense().propagator();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let gue = DenseHamiltonian::random(8, &mut rng).propagator();
    for t in [0.1, 1.0, 10.0, 100.0, 1000.0] {
        assert_abs_diff_eq!(evolve_opt(&h, t).norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dense.evolve(&psi, t).unwrap().norm(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(gue.evolve(&psi, t).unwrap().norm(), 1.0, epsilon = 1e-10);
    }
}

#[test]
fn rejects_unnormalizable_input() {
    assert!(PureState::new(vec![2, 2], vec![C64::new(0.0, 0.0); 4]).is_err());
    assert!(PureState::new(vec![1, 2], vec![C64::new(1.0, 0.0); 2]).is_err());
}

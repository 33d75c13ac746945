//! Fast (orbit DFT) path against the dense eigendecomposition oracle.

use std::sync::Arc;

use minglab_core::dense::dense_orbits;
use minglab_core::orbit::orbit_representatives;
use minglab_core::state::norm_sqr;
use minglab_core::{
    build_dense_hamiltonian, f_n, orbit, ApparatusSpec, Basis, CockedPolicy, CombinedState, DensePropagator,
    IncidentState, OrbitPropagator, Pattern, Propagator, SectorState,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(rng: &mut impl Rng, basis: Basis) -> SectorState {
    let raw = (0..basis.dim())
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    SectorState::normalized(basis, raw).unwrap()
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn every_orbit_agrees_with_dense_evolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xfeed);
    for n in [3, 4, 5, 6, 7, 8] {
        let spec = ApparatusSpec::with_size(n).unwrap();
        let dense = DensePropagator::new(&build_dense_hamiltonian(spec).unwrap());
        for rep in orbit_representatives(n) {
            let basis = Arc::new(orbit(&Pattern::from_index(rep, n).unwrap()));
            let fast = OrbitPropagator::new(spec, basis.clone()).unwrap();
            let state = random_state(&mut rng, Basis::Orbit(basis));
            for _ in 0..5 {
                let t = rng.random_range(-3.0..3.0);
                let a = fast.evolve(&state, t).unwrap().to_dense();
                let b = dense.evolve(&state.to_dense(), t).unwrap();
                assert!(
                    max_diff(a.amplitudes(), b.amplitudes()) < 1e-10,
                    "n={n} rep={rep} t={t}"
                );
            }
        }
    }
}

#[test]
fn dense_path_on_general_superpositions_is_unitary_and_periodic() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in [5, 9] {
        let spec = ApparatusSpec::with_size(n).unwrap();
        let dense = DensePropagator::new(&build_dense_hamiltonian(spec).unwrap());
        let state = random_state(&mut rng, Basis::Dense { n });
        for _ in 0..10 {
            let t = rng.random_range(-2.0..2.0);
            let a = dense.evolve(&state, t).unwrap();
            assert!((norm_sqr(a.amplitudes()).sqrt() - 1.0).abs() < 1e-12);
            let b = dense.evolve(&state, t + 1.0).unwrap();
            assert!(max_diff(a.amplitudes(), b.amplitudes()) < 1e-10);
            let s = rng.random_range(-1.0..1.0);
            let two = dense.evolve(&dense.evolve(&state, s).unwrap(), t).unwrap();
            let one = dense.evolve(&state, s + t).unwrap();
            assert!(max_diff(two.amplitudes(), one.amplitudes()) < 1e-11);
        }
    }
}

#[test]
fn pointer_fast_and_dense_agree_on_random_orbit_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let policy = CockedPolicy::default();
    for n in [5, 7, 11] {
        let spec = ApparatusSpec::with_size(n).unwrap();
        let dense = DensePropagator::new(&build_dense_hamiltonian(spec).unwrap());
        // orbits of different weight, so some contain cocked members and some not
        for rep in [
            "1".repeat(n / 2) + &"0".repeat(n - n / 2),
            "1".to_string() + &"0".repeat(n - 1),
        ] {
            let basis = Arc::new(orbit(&rep.parse().unwrap()));
            let fast = OrbitPropagator::new(spec, basis.clone()).unwrap();
            let s0 = random_state(&mut rng, Basis::Orbit(basis.clone()));
            let s1 = random_state(&mut rng, Basis::Orbit(basis));
            for _ in 0..20 {
                let incident =
                    IncidentState::from_detection_probability(rng.random(), rng.random_range(0.0..6.0)).unwrap();
                let t = rng.random_range(0.0..1.0);
                let cs = CombinedState::new(incident, s0.clone(), fast.evolve(&s1, t).unwrap()).unwrap();
                let cd = CombinedState::new(incident, s0.to_dense(), dense.evolve(&s1.to_dense(), t).unwrap()).unwrap();
                let (a, b) = (f_n(&cs, &policy).unwrap(), f_n(&cd, &policy).unwrap());
                assert!((a - b).abs() < 1e-10, "n={n} t={t}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn dense_spectrum_on_every_full_orbit() {
    for n in [5, 7] {
        let spec = ApparatusSpec::with_size(n).unwrap();
        let h = build_dense_hamiltonian(spec).unwrap();
        for members in dense_orbits(n).into_iter().filter(|m| m.len() == n) {
            for (k, e) in h.block_spectrum(&members).iter().enumerate() {
                assert!((e - k as f64 * spec.h_n()).abs() < 1e-10);
            }
        }
    }
}

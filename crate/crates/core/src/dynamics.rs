//! Exact time evolution on a single shift orbit.
//!
//! Restricted to an orbit of period `ℓ`, one device step is the cyclic
//! translation `members[j] ↦ members[j+1]`. Translation is diagonal in the
//! orbit DFT: with `V_k = Σ_j v_j e^{−2πijk/ℓ}`, one step multiplies `V_k` by
//! `e^{−2πik/ℓ}`. Mode `k` carries energy `k·(n/ℓ)·h_n`, so on a full-period
//! orbit the spectrum is `0, h_n, …, (n−1)h_n`. Evolution for time `t`
//! multiplies mode `k` by `e^{−2πi·k·(n/ℓ)·t}`: one step every `1/n`, the
//! identity at `t = 1`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::orbit::{ApparatusSpec, OrbitBasis};
use crate::state::{Basis, CombinedState, SectorState};

/// Map from eigen-energies to phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseConvention {
    /// `e^{−2πi·q·t}` for integer frequency `q = k·n/ℓ`; one shift per `1/n`.
    #[default]
    Standard,
    /// `e^{−i·q·t}`, the evolution law read without the factor 2π. Does not
    /// reproduce the shift dynamics; kept as a negative control.
    Literal,
}

impl PhaseConvention {
    /// Phase factor for integer frequency `q` at time `t`.
    #[inline]
    pub fn phase(self, q: usize, t: f64) -> Complex64 {
        match self {
            PhaseConvention::Standard => {
                // reduce q·t mod 1 before scaling to keep large-t phases exact
                let turns = (q as f64 * t).rem_euclid(1.0);
                Complex64::from_polar(1.0, -std::f64::consts::TAU * turns)
            }
            PhaseConvention::Literal => Complex64::from_polar(1.0, -(q as f64) * t),
        }
    }

    /// Angular scale applied to `E/h_n` in the generator.
    pub fn scale(self) -> f64 {
        match self {
            PhaseConvention::Standard => std::f64::consts::TAU,
            PhaseConvention::Literal => 1.0,
        }
    }
}

/// Anything that evolves a sector state in time.
pub trait Propagator: Sync {
    fn n(&self) -> usize;

    fn evolve(&self, state: &SectorState, t: f64) -> Result<SectorState>;
}

/// DFT-diagonalised propagator on one orbit.
#[derive(Clone)]
pub struct OrbitPropagator {
    orbit: Arc<OrbitBasis>,
    spec: ApparatusSpec,
    convention: PhaseConvention,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for OrbitPropagator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrbitPropagator")
            .field("n", &self.spec.n())
            .field("period", &self.orbit.period())
            .field("convention", &self.convention)
            .finish()
    }
}

impl OrbitPropagator {
    pub fn new(spec: ApparatusSpec, orbit: Arc<OrbitBasis>) -> Result<Self> {
        if orbit.n() != spec.n() {
            return Err(Error::LengthMismatch {
                expected: spec.n(),
                found: orbit.n(),
            });
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(orbit.period());
        let inverse = planner.plan_fft_inverse(orbit.period());
        Ok(Self {
            orbit,
            spec,
            convention: PhaseConvention::Standard,
            forward,
            inverse,
        })
    }

    pub fn with_convention(mut self, convention: PhaseConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn orbit(&self) -> &Arc<OrbitBasis> {
        &self.orbit
    }

    pub fn spec(&self) -> &ApparatusSpec {
        &self.spec
    }

    pub fn convention(&self) -> PhaseConvention {
        self.convention
    }

    pub fn period(&self) -> usize {
        self.orbit.period()
    }

    /// Integer frequency `k·n/ℓ` of mode `k`.
    #[inline]
    pub fn frequency(&self, k: usize) -> usize {
        k * (self.spec.n() / self.orbit.period())
    }

    /// Renormalised energies `E_k = k·(n/ℓ)·h_n`.
    pub fn energies(&self) -> Vec<f64> {
        (0..self.period())
            .map(|k| self.frequency(k) as f64 * self.spec.h_n())
            .collect()
    }

    /// Unnormalised forward DFT of the amplitudes.
    pub fn spectrum(&self, amplitudes: &[Complex64]) -> Vec<Complex64> {
        let mut buf = amplitudes.to_vec();
        self.forward.process(&mut buf);
        buf
    }

    /// Amplitudes at time `t` given the forward DFT of the initial state.
    pub fn amplitudes_from_spectrum(&self, spectrum: &[Complex64], t: f64) -> Vec<Complex64> {
        let l = self.period();
        let scale = 1.0 / l as f64;
        let mut buf: Vec<Complex64> = spectrum
            .iter()
            .enumerate()
            .map(|(k, s)| s * self.convention.phase(self.frequency(k), t) * scale)
            .collect();
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.inverse.get_inplace_scratch_len()];
        self.inverse.process_with_scratch(&mut buf, &mut scratch);
        buf
    }

    pub fn evolve_amplitudes(&self, amplitudes: &[Complex64], t: f64) -> Vec<Complex64> {
        self.amplitudes_from_spectrum(&self.spectrum(amplitudes), t)
    }

    fn check(&self, state: &SectorState) -> Result<()> {
        match state.basis() {
            Basis::Dense { .. } => Err(Error::MixedRepresentation),
            Basis::Orbit(o) if Arc::ptr_eq(o, &self.orbit) || **o == *self.orbit => Ok(()),
            Basis::Orbit(_) => Err(Error::OrbitMismatch),
        }
    }
}

impl Propagator for OrbitPropagator {
    fn n(&self) -> usize {
        self.spec.n()
    }

    fn evolve(&self, state: &SectorState, t: f64) -> Result<SectorState> {
        self.check(state)?;
        Ok(state.with_amplitudes(self.evolve_amplitudes(state.amplitudes(), t)))
    }
}

/// Evolves an orbit-supported state for time `t`.
pub fn evolve_orbit(spec: ApparatusSpec, state: &SectorState, t: f64) -> Result<SectorState> {
    match state.basis() {
        Basis::Orbit(o) => OrbitPropagator::new(spec, o.clone())?.evolve(state, t),
        Basis::Dense { .. } => Err(Error::MixedRepresentation),
    }
}

/// Evolves the combined system. The ψ₀ sector and both incident amplitudes
/// are constants of motion; only the ψ₁ sector moves.
pub fn evolve_combined<P>(propagator: &P, cs: &CombinedState, t: f64) -> Result<CombinedState>
where
    P: Propagator + ?Sized,
{
    let sector1 = propagator.evolve(cs.sector1(), t)?;
    Ok(cs.with_sector1(sector1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::orbit;
    use crate::pattern::{make_cocked_pattern, Pattern};
    use crate::state::{norm_sqr, IncidentState};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cocked_propagator(n: usize) -> OrbitPropagator {
        let spec = ApparatusSpec::with_size(n).unwrap();
        let o = Arc::new(orbit(&make_cocked_pattern(n).unwrap()));
        OrbitPropagator::new(spec, o).unwrap()
    }

    fn random_amplitudes(rng: &mut impl Rng, len: usize) -> Vec<Complex64> {
        let mut v: Vec<Complex64> = (0..len)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let norm = norm_sqr(&v).sqrt();
        v.iter_mut().for_each(|c| *c /= norm);
        v
    }

    /// Direct O(ℓ²) sum `c_j(t) = (1/ℓ) Σ_k Σ_m v_m e^{2πik(j−m)/ℓ} e^{−2πi·q_k·t}`.
    fn naive_evolve(v: &[Complex64], n: usize, t: f64) -> Vec<Complex64> {
        let l = v.len();
        let step = n / l;
        (0..l)
            .map(|j| {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..l {
                    let ph = Complex64::from_polar(1.0, -std::f64::consts::TAU * (k * step) as f64 * t);
                    for (m, vm) in v.iter().enumerate() {
                        let w = Complex64::from_polar(
                            1.0,
                            std::f64::consts::TAU * (k as f64) * (j as f64 - m as f64) / l as f64,
                        );
                        acc += vm * w * ph;
                    }
                }
                acc / l as f64
            })
            .collect()
    }

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn zero_time_is_identity() {
        let p = cocked_propagator(7);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = random_amplitudes(&mut rng, 7);
        assert!(max_diff(&p.evolve_amplitudes(&v, 0.0), &v) < 1e-14);
    }

    #[test]
    fn one_fifth_moves_one_member() {
        let p = cocked_propagator(5);
        let s = SectorState::orbit_basis_vector(p.orbit().clone(), 0);
        let out = p.evolve(&s, 1.0 / 5.0).unwrap();
        assert_eq!(p.orbit().member(1).to_string(), "01100");
        assert!((out.amplitudes()[1] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let off: f64 = out
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != 1)
            .map(|(_, c)| c.norm_sqr())
            .sum();
        assert!(off < 1e-20, "off-pattern mass {off}");
    }

    #[test]
    fn unit_time_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [5, 6, 12, 101] {
            let p = cocked_propagator(n);
            let v = random_amplitudes(&mut rng, p.period());
            assert!(max_diff(&p.evolve_amplitudes(&v, 1.0), &v) < 1e-12, "n={n}");
        }
    }

    #[test]
    fn matches_naive_dft_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (n, rep) in [(7, "1100000"), (6, "110110"), (12, "100100100100"), (11, "10110000000")] {
            let spec = ApparatusSpec::with_size(n).unwrap();
            let o = Arc::new(orbit(&rep.parse::<Pattern>().unwrap()));
            let prop = OrbitPropagator::new(spec, o).unwrap();
            let v = random_amplitudes(&mut rng, prop.period());
            for _ in 0..10 {
                let t = rng.random_range(-3.0..3.0);
                assert!(max_diff(&prop.evolve_amplitudes(&v, t), &naive_evolve(&v, n, t)) < 1e-12);
            }
        }
    }

    #[test]
    fn short_period_orbit_steps_every_one_over_n() {
        // 1010 has period 2: one step per 1/4 still means members[0] -> members[1]
        let spec = ApparatusSpec::with_size(4).unwrap();
        let o = Arc::new(orbit(&"1010".parse().unwrap()));
        let prop = OrbitPropagator::new(spec, o.clone()).unwrap();
        let out = prop.evolve(&SectorState::orbit_basis_vector(o, 0), 0.25).unwrap();
        assert!((out.amplitudes()[1].norm() - 1.0).abs() < 1e-12);
        assert_eq!(prop.energies(), vec![0.0, 2.0 * spec.h_n()]);
    }

    #[test]
    fn spectrum_of_full_orbit() {
        let p = cocked_propagator(5);
        let h = p.spec().h_n();
        let expected: Vec<f64> = (0..5).map(|k| k as f64 * h).collect();
        assert_eq!(p.energies(), expected);
    }

    #[test]
    fn literal_convention_breaks_shift() {
        let p = cocked_propagator(5).with_convention(PhaseConvention::Literal);
        let s = SectorState::orbit_basis_vector(p.orbit().clone(), 0);
        let out = p.evolve(&s, 0.2).unwrap();
        assert!(out.amplitudes()[1].norm() < 0.9);
    }

    #[test]
    fn wrong_basis_rejected() {
        let p = cocked_propagator(5);
        let other = Arc::new(orbit(&"10000".parse().unwrap()));
        let s = SectorState::orbit_basis_vector(other, 0);
        assert!(matches!(p.evolve(&s, 0.1), Err(Error::OrbitMismatch)));
        let dense = SectorState::dense_basis_vector(&make_cocked_pattern(5).unwrap());
        assert!(matches!(p.evolve(&dense, 0.1), Err(Error::MixedRepresentation)));
    }

    #[test]
    fn combined_evolution_freezes_trivial_sector() {
        let p = cocked_propagator(9);
        let s = SectorState::orbit_basis_vector(p.orbit().clone(), 0);
        let cs = CombinedState::product(IncidentState::absent(), s.clone()).unwrap();
        for t in [0.1, 0.37, 5.2] {
            let out = evolve_combined(&p, &cs, t).unwrap();
            assert_eq!(out.sector0().amplitudes(), s.amplitudes());
            assert_eq!(out.incident(), cs.incident());
        }
        // a0 = 0: m exact steps land on the m-fold shift
        let cs = CombinedState::product(IncidentState::present(), s).unwrap();
        for m in 0..9 {
            let out = evolve_combined(&p, &cs, m as f64 / 9.0).unwrap();
            assert!((out.sector1().amplitudes()[m].norm() - 1.0).abs() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn unitary_periodic_and_a_group(seed in any::<u64>(), n in 3usize..40, s in -5.0f64..5.0, t in -5.0f64..5.0, a1_sq in 0.0f64..1.0) {
            let p = cocked_propagator(n);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v = random_amplitudes(&mut rng, p.period());

            let out = p.evolve_amplitudes(&v, t);
            prop_assert!((norm_sqr(&out).sqrt() - 1.0).abs() < 1e-12);

            let wrapped = p.evolve_amplitudes(&v, t.rem_euclid(1.0));
            prop_assert!(max_diff(&out, &wrapped) < 1e-12);

            let two_step = p.evolve_amplitudes(&p.evolve_amplitudes(&v, s), t);
            prop_assert!(max_diff(&two_step, &p.evolve_amplitudes(&v, s + t)) < 1e-11);

            let incident = IncidentState::from_detection_probability(a1_sq, s).unwrap();
            let sector = SectorState::new(Basis::Orbit(p.orbit().clone()), v).unwrap();
            let cs = CombinedState::product(incident, sector).unwrap();
            let moved = evolve_combined(&p, &cs, t).unwrap();
            prop_assert!((moved.norm() - 1.0).abs() < 1e-12);
        }
    }
}

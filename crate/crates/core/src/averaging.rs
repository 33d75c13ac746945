//! Time averages of the pointer observable along a trajectory.
//!
//! The evolution has period 1, and along a trajectory started from a single
//! orbit the cocked mass is a trigonometric polynomial in `t` whose
//! frequencies are differences of `k·n/ℓ`, all below `n` in magnitude. An
//! `M`-point equispaced rule on `[0, 1)` therefore reproduces the
//! infinite-time average exactly once `M ≥ n`; the default `M = 2n+1` keeps
//! the variance exact as well.
//!
//! Two equivalent evaluation orders are provided:
//!
//! * [`QuadratureStrategy::PerTime`]: evolve the ψ₁ sector to every sample
//!   time (one inverse FFT of length `ℓ` per sample).
//! * [`QuadratureStrategy::PerMember`]: for each cocked orbit member, the
//!   amplitude at `t_j = j/M` is a length-`M` DFT over the mode index, so one
//!   FFT per cocked member yields the whole time series.
//!
//! The closed form follows from the initial basis vector having a flat orbit
//! spectrum: each member is occupied `1/ℓ` of the time, giving
//! `⟨f_n⟩ = |a₁|²(1 − κ_n/n)` from the cocked pattern.

use std::sync::Arc;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;
use rustfft::FftPlanner;

use crate::dense::{build_dense_hamiltonian, DensePropagator};
use crate::dynamics::{evolve_combined, OrbitPropagator, Propagator};
use crate::error::{Error, Result};
use crate::exec::{pairwise_sum, Execution};
use crate::observable::{clamp_unit, cocked_shift_count_with, is_cocked, CockedPolicy, PointerObservable};
use crate::orbit::{orbit, ApparatusSpec};
use crate::pattern::{make_cocked_pattern, Pattern};
use crate::state::{Basis, CombinedState, IncidentState, SectorState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuadratureStrategy {
    /// Whichever of the two is cheaper for the given sizes.
    #[default]
    Auto,
    PerTime,
    PerMember,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AverageMethod {
    Quadrature,
    ClosedForm,
}

impl AverageMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            AverageMethod::Quadrature => "quadrature",
            AverageMethod::ClosedForm => "closed-form",
        }
    }
}

/// Sample count per apparatus size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SampleRule {
    /// `2n + 1`, the exactness threshold.
    #[default]
    Auto,
    Fixed(usize),
}

impl SampleRule {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            SampleRule::Auto => 2 * n + 1,
            SampleRule::Fixed(m) => m,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryAverage {
    pub n: usize,
    pub alpha: f64,
    pub a1_sq: f64,
    pub mean: f64,
    /// Time variance of `f_n`; `None` for the closed form.
    pub variance: Option<f64>,
    /// Quadrature points (0 for the closed form).
    pub samples: usize,
    pub method: AverageMethod,
}

/// Mean and population variance of a sample vector.
pub fn mean_and_variance(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = pairwise_sum(values) / m;
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    (mean, pairwise_sum(&sq) / m)
}

/// Flips `defects` distinct random sites of `p`.
pub fn perturb_pattern<R: Rng + ?Sized>(p: &Pattern, defects: usize, rng: &mut R) -> Result<Pattern> {
    let n = p.len();
    if defects > n {
        return Err(Error::TooManyDefects { defects, n });
    }
    let mut out = p.clone();
    let mut sites: Vec<usize> = sample(rng, n, defects).into_vec();
    sites.sort_unstable();
    for pos in sites {
        out.flip(pos);
    }
    Ok(out)
}

const MEMBER_CHUNK: usize = 32;

/// A trajectory of the combined system on the fast (orbit) path.
#[derive(Debug, Clone)]
pub struct Trajectory {
    spec: ApparatusSpec,
    policy: CockedPolicy,
    initial: CombinedState,
    initial_pattern: Option<Pattern>,
    propagator: OrbitPropagator,
    observable: PointerObservable,
    spectrum1: Vec<Complex64>,
    sector0_mass: f64,
    exec: Execution,
}

impl Trajectory {
    /// `v₀ ⊗ |11…100…0⟩`.
    pub fn cocked(spec: ApparatusSpec, policy: CockedPolicy, incident: IncidentState) -> Result<Self> {
        Self::from_pattern(spec, policy, incident, make_cocked_pattern(spec.n())?)
    }

    /// `v₀ ⊗ |p⟩` for an arbitrary starting pattern.
    pub fn from_pattern(
        spec: ApparatusSpec,
        policy: CockedPolicy,
        incident: IncidentState,
        p: Pattern,
    ) -> Result<Self> {
        if p.len() != spec.n() {
            return Err(Error::LengthMismatch {
                expected: spec.n(),
                found: p.len(),
            });
        }
        let basis = Arc::new(orbit(&p));
        let state = SectorState::orbit_basis_vector(basis, 0);
        let cs = CombinedState::product(incident, state)?;
        let mut t = Self::from_state(spec, policy, cs)?;
        t.initial_pattern = Some(p);
        Ok(t)
    }

    /// Any orbit-supported combined state.
    pub fn from_state(spec: ApparatusSpec, policy: CockedPolicy, initial: CombinedState) -> Result<Self> {
        Self::build(spec, policy, initial, Execution::default())
    }

    fn build(spec: ApparatusSpec, policy: CockedPolicy, initial: CombinedState, exec: Execution) -> Result<Self> {
        let orbit1 = match initial.sector1().basis() {
            Basis::Orbit(o) => o.clone(),
            Basis::Dense { .. } => return Err(Error::MixedRepresentation),
        };
        let propagator = OrbitPropagator::new(spec, orbit1)?;
        let observable = PointerObservable::for_state(&initial, policy, exec)?;
        let spectrum1 = propagator.spectrum(initial.sector1().amplitudes());
        let sector0_mass = observable.sector0_set().mass(initial.sector0());
        Ok(Self {
            spec,
            policy,
            initial,
            initial_pattern: None,
            propagator,
            observable,
            spectrum1,
            sector0_mass,
            exec,
        })
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn spec(&self) -> &ApparatusSpec {
        &self.spec
    }

    pub fn initial(&self) -> &CombinedState {
        &self.initial
    }

    pub fn propagator(&self) -> &OrbitPropagator {
        &self.propagator
    }

    pub fn observable(&self) -> &PointerObservable {
        &self.observable
    }

    pub fn state_at(&self, t: f64) -> Result<CombinedState> {
        evolve_combined(&self.propagator, &self.initial, t)
    }

    /// `f_n` at time `t`; the ψ₀ contribution is fixed at construction.
    pub fn f_at(&self, t: f64) -> f64 {
        let amps = self.propagator.amplitudes_from_spectrum(&self.spectrum1, t);
        let terms: Vec<f64> = self
            .observable
            .sector1_set()
            .indices()
            .iter()
            .map(|&i| amps[i].norm_sqr())
            .collect();
        self.pointer(pairwise_sum(&terms))
    }

    fn pointer(&self, sector1_mass: f64) -> f64 {
        let v = self.initial.incident();
        clamp_unit(1.0 - v.p0() * self.sector0_mass - v.p1() * sector1_mass)
    }

    fn resolve(&self, samples: usize, strategy: QuadratureStrategy) -> QuadratureStrategy {
        match strategy {
            QuadratureStrategy::Auto => {
                let l = self.propagator.period() as f64;
                let m = samples as f64;
                let per_time = m * l * (l + 1.0).log2();
                let members = self.observable.sector1_set().len() as f64;
                let per_member = members * (m * (m + 1.0).log2() + l);
                if per_member < per_time {
                    QuadratureStrategy::PerMember
                } else {
                    QuadratureStrategy::PerTime
                }
            }
            s => s,
        }
    }

    /// `f_n(j/M)` for `j = 0..M`.
    pub fn samples(&self, samples: usize, strategy: QuadratureStrategy) -> Result<Vec<f64>> {
        if samples == 0 {
            return Err(Error::NoSamples);
        }
        Ok(match self.resolve(samples, strategy) {
            QuadratureStrategy::PerMember => self.samples_per_member(samples),
            _ => self.exec.map(samples, |j| self.f_at(j as f64 / samples as f64)),
        })
    }

    fn samples_per_member(&self, samples: usize) -> Vec<f64> {
        let l = self.propagator.period();
        let cocked = self.observable.sector1_set().indices();
        let fft = FftPlanner::new().plan_fft_forward(samples);
        let chunks: Vec<&[usize]> = cocked.chunks(MEMBER_CHUNK).collect();
        let partial = self.exec.map_slice(&chunks, |chunk| {
            let mut acc = vec![0.0f64; samples];
            let mut g = vec![Complex64::new(0.0, 0.0); samples];
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            for &member in chunk.iter() {
                g.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
                for (k, s) in self.spectrum1.iter().enumerate() {
                    let turns = ((k * member) % l) as f64 / l as f64;
                    let w = Complex64::from_polar(1.0 / l as f64, std::f64::consts::TAU * turns);
                    g[self.propagator.frequency(k) % samples] += s * w;
                }
                fft.process_with_scratch(&mut g, &mut scratch);
                for (a, c) in acc.iter_mut().zip(&g) {
                    *a += c.norm_sqr();
                }
            }
            acc
        });
        let mut mass = vec![0.0f64; samples];
        for chunk in &partial {
            for (m, c) in mass.iter_mut().zip(chunk) {
                *m += c;
            }
        }
        mass.into_iter().map(|m| self.pointer(m)).collect()
    }

    pub fn average(&self, samples: usize) -> Result<TrajectoryAverage> {
        self.average_with(samples, QuadratureStrategy::Auto)
    }

    pub fn average_with(&self, samples: usize, strategy: QuadratureStrategy) -> Result<TrajectoryAverage> {
        let values = self.samples(samples, strategy)?;
        let (mean, variance) = mean_and_variance(&values);
        Ok(TrajectoryAverage {
            n: self.spec.n(),
            alpha: self.policy.alpha(),
            a1_sq: self.initial.incident().p1(),
            mean,
            variance: Some(variance),
            samples,
            method: AverageMethod::Quadrature,
        })
    }

    /// Closed form for a trajectory started from a single pattern:
    /// `|a₀|²·(1 − [p ∈ C]) + |a₁|²·(1 − κ(p)/n)`.
    pub fn closed_form(&self) -> Result<TrajectoryAverage> {
        let p = self.initial_pattern.as_ref().ok_or(Error::OrbitMismatch)?;
        let n = self.spec.n();
        let period = self.propagator.period();
        if period < n {
            return Err(Error::ShiftInvariantPattern { period, n });
        }
        let kappa = self.observable.sector1_set().len();
        let in_c = is_cocked(p, &self.policy)?.is_member;
        let v = self.initial.incident();
        let mean = v.p0() * if in_c { 0.0 } else { 1.0 } + v.p1() * (1.0 - kappa as f64 / n as f64);
        Ok(TrajectoryAverage {
            n,
            alpha: self.policy.alpha(),
            a1_sq: v.p1(),
            mean,
            variance: None,
            samples: 0,
            method: AverageMethod::ClosedForm,
        })
    }
}

/// Quadrature average from `v₀ ⊗ |cocked⟩` with `samples` points.
pub fn time_average_quadrature(
    spec: ApparatusSpec,
    policy: CockedPolicy,
    incident: IncidentState,
    samples: usize,
) -> Result<TrajectoryAverage> {
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    Trajectory::cocked(spec, policy, incident)?.average(samples)
}

/// `|a₁|²(1 − κ_n/n)` without any time evolution.
pub fn time_average_closed_form(
    spec: ApparatusSpec,
    policy: CockedPolicy,
    incident: IncidentState,
) -> Result<TrajectoryAverage> {
    let n = spec.n();
    let period = orbit(&make_cocked_pattern(n)?).period();
    if period < n {
        return Err(Error::ShiftInvariantPattern { period, n });
    }
    let kappa = cocked_shift_count_with(&spec, &policy, Execution::default())?;
    Ok(TrajectoryAverage {
        n,
        alpha: policy.alpha(),
        a1_sq: incident.p1(),
        mean: incident.p1() * (1.0 - kappa as f64 / n as f64),
        variance: None,
        samples: 0,
        method: AverageMethod::ClosedForm,
    })
}

/// The thermodynamic-limit value `|a₁|²`.
pub fn limit_value(incident: &IncidentState) -> f64 {
    incident.p1()
}

/// Mean and variance of `f_n` over one period for each size.
pub fn time_variance_scan(
    specs: &[ApparatusSpec],
    policy: CockedPolicy,
    incident: IncidentState,
    rule: SampleRule,
) -> Result<Vec<TrajectoryAverage>> {
    Execution::default()
        .map_slice(specs, |spec| {
            Trajectory::cocked(*spec, policy, incident)?.average(rule.resolve(spec.n()))
        })
        .into_iter()
        .collect()
}

/// The same trajectory on the dense oracle path.
pub struct DenseTrajectory {
    initial: CombinedState,
    propagator: DensePropagator,
    observable: PointerObservable,
    policy: CockedPolicy,
}

impl DenseTrajectory {
    pub fn cocked(spec: ApparatusSpec, policy: CockedPolicy, incident: IncidentState) -> Result<Self> {
        let cocked = make_cocked_pattern(spec.n())?;
        let state = SectorState::dense_basis_vector(&cocked);
        Self::from_state(spec, policy, CombinedState::product(incident, state)?)
    }

    pub fn from_state(spec: ApparatusSpec, policy: CockedPolicy, initial: CombinedState) -> Result<Self> {
        if !initial.is_dense() {
            return Err(Error::MixedRepresentation);
        }
        let propagator = DensePropagator::new(&build_dense_hamiltonian(spec)?);
        let observable = PointerObservable::for_state(&initial, policy, Execution::Sequential)?;
        Ok(Self {
            initial,
            propagator,
            observable,
            policy,
        })
    }

    pub fn propagator(&self) -> &DensePropagator {
        &self.propagator
    }

    pub fn state_at(&self, t: f64) -> Result<CombinedState> {
        evolve_combined(&self.propagator, &self.initial, t)
    }

    pub fn f_at(&self, t: f64) -> Result<f64> {
        self.observable.eval(&self.state_at(t)?)
    }

    pub fn average(&self, samples: usize) -> Result<TrajectoryAverage> {
        if samples == 0 {
            return Err(Error::NoSamples);
        }
        let values = Execution::default()
            .map(samples, |j| self.f_at(j as f64 / samples as f64))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let (mean, variance) = mean_and_variance(&values);
        Ok(TrajectoryAverage {
            n: self.propagator.n(),
            alpha: self.policy.alpha(),
            a1_sq: self.initial.incident().p1(),
            mean,
            variance: Some(variance),
            samples,
            method: AverageMethod::Quadrature,
        })
    }
}

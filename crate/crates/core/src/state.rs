//! State vectors of the device and of the combined incident-particle system.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::orbit::OrbitBasis;
use crate::pattern::Pattern;

/// Tolerance for the unit-norm invariants.
pub const NORM_TOL: f64 = 1e-12;

/// Which basis a [`SectorState`] is expanded in.
#[derive(Debug, Clone)]
pub enum Basis {
    /// The members of a single cyclic orbit (fast path).
    Orbit(Arc<OrbitBasis>),
    /// All `2^n` patterns, indexed by [`Pattern::to_index`].
    Dense { n: usize },
}

impl Basis {
    pub fn n(&self) -> usize {
        match self {
            Basis::Orbit(o) => o.n(),
            Basis::Dense { n } => *n,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Basis::Orbit(o) => o.period(),
            Basis::Dense { n } => 1 << n,
        }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self, Basis::Dense { .. })
    }

    pub fn same_as(&self, other: &Basis) -> bool {
        match (self, other) {
            (Basis::Orbit(a), Basis::Orbit(b)) => Arc::ptr_eq(a, b) || a == b,
            (Basis::Dense { n: a }, Basis::Dense { n: b }) => a == b,
            _ => false,
        }
    }
}

/// An apparatus state in one sector of the combined system.
#[derive(Debug, Clone)]
pub struct SectorState {
    basis: Basis,
    amplitudes: Vec<Complex64>,
}

pub fn norm_sqr(amplitudes: &[Complex64]) -> f64 {
    amplitudes.iter().map(|c| c.norm_sqr()).sum()
}

impl SectorState {
    /// Wraps amplitudes, requiring norm 1 (or an exact zero vector).
    pub fn new(basis: Basis, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: amplitudes.len(),
            });
        }
        let norm = norm_sqr(&amplitudes).sqrt();
        if norm != 0.0 && (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Unnormalized { norm });
        }
        Ok(Self { basis, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(basis: Basis, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = norm_sqr(&amplitudes).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Unnormalized { norm });
        }
        amplitudes.iter_mut().for_each(|c| *c /= norm);
        Self::new(basis, amplitudes)
    }

    /// `members[j]` of the orbit as a unit vector.
    pub fn orbit_basis_vector(orbit: Arc<OrbitBasis>, j: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); orbit.period()];
        amplitudes[j % orbit.period()] = Complex64::new(1.0, 0.0);
        Self {
            basis: Basis::Orbit(orbit),
            amplitudes,
        }
    }

    pub fn dense_basis_vector(p: &Pattern) -> Self {
        let n = p.len();
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[p.to_index()] = Complex64::new(1.0, 0.0);
        Self {
            basis: Basis::Dense { n },
            amplitudes,
        }
    }

    /// The same vector expanded over all `2^n` patterns.
    pub fn to_dense(&self) -> Self {
        match &self.basis {
            Basis::Dense { .. } => self.clone(),
            Basis::Orbit(orbit) => {
                let n = orbit.n();
                let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
                for (j, a) in self.amplitudes.iter().enumerate() {
                    amplitudes[orbit.member(j).to_index()] += a;
                }
                Self {
                    basis: Basis::Dense { n },
                    amplitudes,
                }
            }
        }
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amplitudes).sqrt()
    }

    /// Replaces the amplitudes after an evolution step. Norm is the caller's
    /// responsibility.
    pub(crate) fn with_amplitudes(&self, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), self.amplitudes.len());
        Self {
            basis: self.basis.clone(),
            amplitudes,
        }
    }
}

/// Incident-particle state `a₀ψ₀ + a₁ψ₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidentState {
    pub a0: Complex64,
    pub a1: Complex64,
}

impl IncidentState {
    pub fn new(a0: Complex64, a1: Complex64) -> Result<Self> {
        let weight = a0.norm_sqr() + a1.norm_sqr();
        if (weight - 1.0).abs() > NORM_TOL {
            return Err(Error::IncidentUnnormalized { weight });
        }
        Ok(Self { a0, a1 })
    }

    /// `a₀ = √(1−p)`, `a₁ = √p·e^{iφ}` with `p = |a₁|²`.
    pub fn from_detection_probability(a1_sq: f64, phase: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a1_sq) {
            return Err(Error::InvalidProbability(a1_sq));
        }
        Ok(Self {
            a0: Complex64::new((1.0 - a1_sq).sqrt(), 0.0),
            a1: Complex64::from_polar(a1_sq.sqrt(), phase),
        })
    }

    pub fn absent() -> Self {
        Self {
            a0: Complex64::new(1.0, 0.0),
            a1: Complex64::new(0.0, 0.0),
        }
    }

    pub fn present() -> Self {
        Self {
            a0: Complex64::new(0.0, 0.0),
            a1: Complex64::new(1.0, 0.0),
        }
    }

    pub fn balanced() -> Self {
        Self {
            a0: Complex64::new(FRAC_1_SQRT_2, 0.0),
            a1: Complex64::new(FRAC_1_SQRT_2, 0.0),
        }
    }

    pub fn p0(&self) -> f64 {
        self.a0.norm_sqr()
    }

    pub fn p1(&self) -> f64 {
        self.a1.norm_sqr()
    }
}

/// `a₀ψ₀⊗u₀ + a₁ψ₁⊗u₁` in `C² ⊗ H_n`.
#[derive(Debug, Clone)]
pub struct CombinedState {
    incident: IncidentState,
    sector0: SectorState,
    sector1: SectorState,
}

impl CombinedState {
    pub fn new(incident: IncidentState, sector0: SectorState, sector1: SectorState) -> Result<Self> {
        if sector0.basis.is_dense() != sector1.basis.is_dense() {
            return Err(Error::MixedRepresentation);
        }
        if sector0.basis.n() != sector1.basis.n() {
            return Err(Error::DimensionMismatch {
                expected: sector0.basis.n(),
                found: sector1.basis.n(),
            });
        }
        for (amp, sector) in [(incident.a0, &sector0), (incident.a1, &sector1)] {
            if amp.norm_sqr() > 0.0 && sector.norm() == 0.0 {
                return Err(Error::Unnormalized { norm: 0.0 });
            }
        }
        Ok(Self {
            incident,
            sector0,
            sector1,
        })
    }

    /// `v₀ ⊗ u`: the same apparatus state in both sectors.
    pub fn product(incident: IncidentState, apparatus: SectorState) -> Result<Self> {
        Self::new(incident, apparatus.clone(), apparatus)
    }

    pub fn incident(&self) -> IncidentState {
        self.incident
    }

    pub fn sector0(&self) -> &SectorState {
        &self.sector0
    }

    pub fn sector1(&self) -> &SectorState {
        &self.sector1
    }

    pub fn is_dense(&self) -> bool {
        self.sector0.basis.is_dense()
    }

    pub fn n(&self) -> usize {
        self.sector0.basis.n()
    }

    pub fn norm(&self) -> f64 {
        (self.incident.p0() * norm_sqr(&self.sector0.amplitudes)
            + self.incident.p1() * norm_sqr(&self.sector1.amplitudes))
        .sqrt()
    }

    pub(crate) fn with_sector1(&self, sector1: SectorState) -> Self {
        Self {
            incident: self.incident,
            sector0: self.sector0.clone(),
            sector1,
        }
    }
}

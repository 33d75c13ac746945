//! The cocked set `C` and the pointer observable `f_n = 1 − Σ_{c∈C} |c|²`.
//!
//! "Negligible" is made concrete by a per-half defect budget
//! `b(n) = ⌊n^α⌋`. A pattern is cocked when at most `b(n)` of its first
//! `⌊n/2⌋` sites are 0 and at most `b(n)` of the remaining sites are 1. The
//! incident-particle index is not constrained.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exec::{pairwise_sum, Execution};
use crate::orbit::{ApparatusSpec, OrbitBasis};
use crate::pattern::{make_cocked_pattern, Pattern};
use crate::state::{Basis, CombinedState, SectorState};

/// Tolerance on the combined norm accepted by [`f_n`].
pub const F_NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CockedPolicy {
    alpha: f64,
}

impl Default for CockedPolicy {
    fn default() -> Self {
        Self { alpha: 0.5 }
    }
}

impl CockedPolicy {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidAlpha(alpha));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `⌊n^α⌋`, snapping values within 1e-9 of an integer first.
    pub fn raw_budget(&self, n: usize) -> usize {
        let x = (n as f64).powf(self.alpha);
        let r = x.round();
        if (x - r).abs() < 1e-9 {
            r as usize
        } else {
            x.floor() as usize
        }
    }

    /// Budget at size `n`, rejecting sizes where it reaches `n/2`.
    pub fn budget(&self, n: usize) -> Result<usize> {
        let b = self.raw_budget(n);
        if 2 * b >= n {
            return Err(Error::BudgetTooLarge { n, budget: b });
        }
        Ok(b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CockedMembership {
    pub first_half_defects: usize,
    pub second_half_defects: usize,
    pub budget: usize,
    pub is_member: bool,
}

/// Defect counts of `p` against `|1^{⌊n/2⌋} 0^{n−⌊n/2⌋}⟩`.
pub fn defects(p: &Pattern) -> (usize, usize) {
    let n = p.len();
    let half = n / 2;
    (half - p.count_ones_in(0, half), p.count_ones_in(half, n))
}

pub fn is_cocked(p: &Pattern, policy: &CockedPolicy) -> Result<CockedMembership> {
    let budget = policy.budget(p.len())?;
    Ok(membership(p, budget))
}

fn membership(p: &Pattern, budget: usize) -> CockedMembership {
    let (first, second) = defects(p);
    CockedMembership {
        first_half_defects: first,
        second_half_defects: second,
        budget,
        is_member: first <= budget && second <= budget,
    }
}

/// `κ_n`: how many of the `n` rotations of the cocked pattern stay cocked.
pub fn cocked_shift_count(spec: &ApparatusSpec, policy: &CockedPolicy) -> Result<usize> {
    cocked_shift_count_with(spec, policy, Execution::default())
}

pub fn cocked_shift_count_with(spec: &ApparatusSpec, policy: &CockedPolicy, exec: Execution) -> Result<usize> {
    let n = spec.n();
    let budget = policy.budget(n)?;
    let cocked = make_cocked_pattern(n)?;
    let hits = exec.map(n, |m| membership(&cocked.rotate_right(m), budget).is_member);
    Ok(hits.into_iter().filter(|&b| b).count())
}

/// Indices of the cocked basis vectors of a sector basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CockedSet {
    indices: Vec<usize>,
}

impl CockedSet {
    pub fn for_orbit(orbit: &OrbitBasis, policy: &CockedPolicy, exec: Execution) -> Result<Self> {
        let budget = policy.budget(orbit.n())?;
        let hits = exec.map(orbit.period(), |j| membership(&orbit.member(j), budget).is_member);
        Ok(Self::from_flags(&hits))
    }

    pub fn for_dense(n: usize, policy: &CockedPolicy) -> Result<Self> {
        let budget = policy.budget(n)?;
        let hits: Vec<bool> = (0..1usize << n)
            .map(|i| Pattern::from_index(i, n).map(|p| membership(&p, budget).is_member))
            .collect::<Result<_>>()?;
        Ok(Self::from_flags(&hits))
    }

    pub fn for_basis(basis: &Basis, policy: &CockedPolicy, exec: Execution) -> Result<Self> {
        match basis {
            Basis::Orbit(o) => Self::for_orbit(o, policy, exec),
            Basis::Dense { n } => Self::for_dense(*n, policy),
        }
    }

    fn from_flags(flags: &[bool]) -> Self {
        Self {
            indices: flags.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `Σ_{i∈C} |amplitude_i|²`.
    pub fn mass(&self, state: &SectorState) -> f64 {
        let amps = state.amplitudes();
        let terms: Vec<f64> = self.indices.iter().map(|&i| amps[i].norm_sqr()).collect();
        pairwise_sum(&terms)
    }
}

/// Pointer observable with the cocked sets of both sector bases cached.
#[derive(Debug, Clone)]
pub struct PointerObservable {
    policy: CockedPolicy,
    sector0: (Basis, Arc<CockedSet>),
    sector1: (Basis, Arc<CockedSet>),
}

impl PointerObservable {
    /// Prepares the cocked sets for the bases used by `cs`.
    pub fn for_state(cs: &CombinedState, policy: CockedPolicy, exec: Execution) -> Result<Self> {
        let b0 = cs.sector0().basis().clone();
        let b1 = cs.sector1().basis().clone();
        let set0 = Arc::new(CockedSet::for_basis(&b0, &policy, exec)?);
        let set1 = if b1.same_as(&b0) {
            set0.clone()
        } else {
            Arc::new(CockedSet::for_basis(&b1, &policy, exec)?)
        };
        Ok(Self {
            policy,
            sector0: (b0, set0),
            sector1: (b1, set1),
        })
    }

    pub fn policy(&self) -> &CockedPolicy {
        &self.policy
    }

    pub fn sector0_set(&self) -> &CockedSet {
        &self.sector0.1
    }

    pub fn sector1_set(&self) -> &CockedSet {
        &self.sector1.1
    }

    /// Evaluates `f_n(cs)`. The state's bases must match the cached ones.
    pub fn eval(&self, cs: &CombinedState) -> Result<f64> {
        let norm = cs.norm();
        if (norm - 1.0).abs() > F_NORM_TOL {
            return Err(Error::Unnormalized { norm });
        }
        for (sector, (basis, _)) in [(cs.sector0(), &self.sector0), (cs.sector1(), &self.sector1)] {
            if sector.basis().is_dense() != basis.is_dense() {
                return Err(Error::MixedRepresentation);
            }
            if !sector.basis().same_as(basis) {
                return Err(Error::OrbitMismatch);
            }
        }
        let v = cs.incident();
        let cocked = v.p0() * self.sector0.1.mass(cs.sector0()) + v.p1() * self.sector1.1.mass(cs.sector1());
        Ok(clamp_unit(1.0 - cocked))
    }
}

pub(crate) fn clamp_unit(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// `f_n(cs)` computed from scratch.
pub fn f_n(cs: &CombinedState, policy: &CockedPolicy) -> Result<f64> {
    PointerObservable::for_state(cs, *policy, Execution::Sequential)?.eval(cs)
}

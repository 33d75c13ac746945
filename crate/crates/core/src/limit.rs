//! The two-point classical limit system and finite-size extrapolation.

use crate::error::{Error, Result};
use crate::state::{IncidentState, NORM_TOL};

/// Pointer positions of the limiting classical apparatus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitPoint {
    /// Cocked; no detection.
    P0,
    /// Excitation travelling away from the cocked state; detection.
    P1,
}

/// `Ω_∞ = {P₀, P₁}` with the mixed state `X_{v₀}` and pointer variable
/// `F = χ_{P₁}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalLimitSystem {
    w0: f64,
    w1: f64,
}

impl ClassicalLimitSystem {
    pub fn from_weights(w0: f64, w1: f64) -> Result<Self> {
        for w in [w0, w1] {
            if !(0.0..=1.0).contains(&w) {
                return Err(Error::InvalidProbability(w));
            }
        }
        if (w0 + w1 - 1.0).abs() > NORM_TOL {
            return Err(Error::IncidentUnnormalized { weight: w0 + w1 });
        }
        Ok(Self { w0, w1 })
    }

    pub fn weight(&self, point: LimitPoint) -> f64 {
        match point {
            LimitPoint::P0 => self.w0,
            LimitPoint::P1 => self.w1,
        }
    }

    /// `F = χ_{P₁}`.
    pub fn pointer(point: LimitPoint) -> f64 {
        match point {
            LimitPoint::P0 => 0.0,
            LimitPoint::P1 => 1.0,
        }
    }
}

/// Weights `(|a₀|², |a₁|²)`.
pub fn build_classical_system(incident: &IncidentState) -> ClassicalLimitSystem {
    ClassicalLimitSystem {
        w0: incident.p0(),
        w1: incident.p1(),
    }
}

/// `∫ F dX = w₁`.
pub fn classical_expectation(system: &ClassicalLimitSystem) -> f64 {
    [LimitPoint::P0, LimitPoint::P1]
        .into_iter()
        .map(|p| ClassicalLimitSystem::pointer(p) * system.weight(p))
        .sum()
}

/// One finite-size data point: `(n, ⟨f_n⟩, κ_n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitSample {
    pub n: usize,
    pub mean: f64,
    pub kappa: usize,
}

impl LimitSample {
    fn design(&self) -> f64 {
        1.0 - self.kappa as f64 / self.n as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitFit {
    pub samples: Vec<LimitSample>,
    pub estimate: f64,
    /// `max |⟨f_n⟩ − L̂·(1 − κ_n/n)|`.
    pub residual: f64,
}

/// Least squares for `L` in `⟨f_n⟩ = L·(1 − κ_n/n)`.
pub fn extrapolate_limit(samples: &[LimitSample]) -> Result<LimitFit> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples(samples.len()));
    }
    let first = samples[0].kappa as f64 / samples[0].n as f64;
    if samples.iter().all(|s| s.kappa as f64 / s.n as f64 == first) {
        return Err(Error::DegenerateDesign);
    }
    let sxy: f64 = samples.iter().map(|s| s.design() * s.mean).sum();
    let sxx: f64 = samples.iter().map(|s| s.design() * s.design()).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateDesign);
    }
    let estimate = sxy / sxx;
    let residual = samples
        .iter()
        .map(|s| (s.mean - estimate * s.design()).abs())
        .fold(0.0, f64::max);
    Ok(LimitFit {
        samples: samples.to_vec(),
        estimate,
        residual,
    })
}

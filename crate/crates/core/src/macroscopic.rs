//! Sampled diagnostic for macroscopicity of an observable family.
//!
//! A family `f_N` is macroscopic when its large-`N` value on product states
//! `v_o ⊗ v_{n_o+1} ⊗ … ⊗ v_N` does not depend on the finite prefix
//! `(n_o, v_o)`. The check draws random product prefixes and random tails,
//! evaluates the family over a grid of tail lengths and reports the spread
//! across prefixes. Finite sampling cannot prove the property, so every
//! verdict here is a heuristic.
//!
//! Each qubit of a product state is summarised by `P(bit = 1)`; the incident
//! particle likewise. Tails are aligned with the cocked pattern of the total
//! size, with defect probability `u_i / i²` at absolute site `i` (`u_i`
//! uniform), so the expected number of tail defects stays bounded.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::observable::CockedPolicy;

/// An observable family that can be evaluated on product states.
pub trait ProductFamily: Sync {
    fn name(&self) -> &str;

    /// `incident_p1 = P(π₀ = 1)`, `sites[i] = P(π_{i+1} = 1)`.
    fn eval(&self, incident_p1: f64, sites: &[f64]) -> Result<f64>;
}

/// `f_N ≡ c`.
#[derive(Debug, Clone, Copy)]
pub struct ConstantFamily(pub f64);

impl ProductFamily for ConstantFamily {
    fn name(&self) -> &str {
        "constant"
    }

    fn eval(&self, _: f64, _: &[f64]) -> Result<f64> {
        Ok(self.0)
    }
}

/// Amplitude mass on basis states whose first apparatus bit is 1. Local, so
/// not macroscopic.
#[derive(Debug, Clone, Copy)]
pub struct FirstSiteFamily;

impl ProductFamily for FirstSiteFamily {
    fn name(&self) -> &str {
        "first-site"
    }

    fn eval(&self, _: f64, sites: &[f64]) -> Result<f64> {
        Ok(sites[0])
    }
}

/// The pointer observable `f_N` on product states.
#[derive(Debug, Clone, Copy)]
pub struct PointerFamily(pub CockedPolicy);

impl ProductFamily for PointerFamily {
    fn name(&self) -> &str {
        "pointer"
    }

    fn eval(&self, _: f64, sites: &[f64]) -> Result<f64> {
        let n = sites.len();
        let budget = self.0.budget(n)?;
        let half = n / 2;
        let first = at_most(sites[..half].iter().map(|p| 1.0 - p), budget);
        let second = at_most(sites[half..].iter().copied(), budget);
        Ok((1.0 - first * second).clamp(0.0, 1.0))
    }
}

/// `P(Σ Bernoulli(p_i) ≤ budget)` by a DP truncated at `budget + 1`.
fn at_most<I: Iterator<Item = f64>>(probs: I, budget: usize) -> f64 {
    let mut dist = vec![0.0f64; budget + 1];
    dist[0] = 1.0;
    for p in probs {
        for k in (0..=budget).rev() {
            let stay = dist[k] * (1.0 - p);
            let up = if k > 0 { dist[k - 1] * p } else { 0.0 };
            dist[k] = stay + up;
        }
    }
    dist.iter().sum()
}

#[derive(Debug, Clone)]
pub struct MacroCheckConfig {
    /// Tail lengths `n` (total size is `n_o + n`).
    pub grid: Vec<usize>,
    pub prefixes: usize,
    pub max_prefix_len: usize,
    pub tails: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for MacroCheckConfig {
    fn default() -> Self {
        Self {
            grid: vec![16, 64, 256, 1024, 4096],
            prefixes: 4,
            max_prefix_len: 4,
            tails: 3,
            tol: 1e-2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MacroRow {
    pub n: usize,
    pub prefix_id: usize,
    /// Value averaged over tails.
    pub estimate: f64,
    /// Worst spread across prefixes over tails, at this `n`.
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MacroReport {
    pub family: String,
    pub rows: Vec<MacroRow>,
    /// Spread per grid entry, in grid order.
    pub spreads: Vec<(usize, f64)>,
    pub passed: bool,
}

impl MacroReport {
    pub fn final_spread(&self) -> f64 {
        self.spreads.last().map_or(0.0, |s| s.1)
    }

    pub fn verdict(&self) -> &'static str {
        if self.passed {
            "heuristic-pass"
        } else {
            "heuristic-fail"
        }
    }
}

struct Prefix {
    incident_p1: f64,
    sites: Vec<f64>,
}

pub fn macroscopicity_check(family: &dyn ProductFamily, config: &MacroCheckConfig) -> Result<MacroReport> {
    if config.grid.is_empty() || config.prefixes == 0 || config.tails == 0 || config.max_prefix_len == 0 {
        return Err(Error::NoSamples);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let prefixes: Vec<Prefix> = (0..config.prefixes)
        .map(|_| {
            let len = rng.random_range(1..=config.max_prefix_len);
            Prefix {
                incident_p1: rng.random(),
                sites: (0..len).map(|_| rng.random()).collect(),
            }
        })
        .collect();
    let max_total = config.grid.iter().max().unwrap() + config.max_prefix_len;
    let tails: Vec<Vec<f64>> = (0..config.tails)
        .map(|_| {
            // u_i for absolute sites 1..=max_total
            (0..max_total).map(|_| rng.random::<f64>()).collect()
        })
        .collect();

    let per_n = Execution::default().map_slice(&config.grid, |&n| -> Result<(Vec<f64>, f64)> {
        let mut sums = vec![0.0; prefixes.len()];
        let mut spread: f64 = 0.0;
        for u in &tails {
            let values = prefixes
                .iter()
                .map(|prefix| {
                    let total = prefix.sites.len() + n;
                    let half = total / 2;
                    let mut sites = prefix.sites.clone();
                    sites.extend((prefix.sites.len()..total).map(|i| {
                        let d = u[i] / ((i + 1) * (i + 1)) as f64;
                        if i < half {
                            1.0 - d
                        } else {
                            d
                        }
                    }));
                    family.eval(prefix.incident_p1, &sites)
                })
                .collect::<Result<Vec<f64>>>()?;
            let hi = values.iter().cloned().fold(f64::MIN, f64::max);
            let lo = values.iter().cloned().fold(f64::MAX, f64::min);
            spread = spread.max(hi - lo);
            for (s, v) in sums.iter_mut().zip(values) {
                *s += v;
            }
        }
        let estimates = sums.into_iter().map(|s| s / tails.len() as f64).collect();
        Ok((estimates, spread))
    });

    let mut rows = Vec::new();
    let mut spreads = Vec::new();
    for (&n, result) in config.grid.iter().zip(per_n) {
        let (estimates, spread) = result?;
        spreads.push((n, spread));
        rows.extend(estimates.into_iter().enumerate().map(|(prefix_id, estimate)| MacroRow {
            n,
            prefix_id,
            estimate,
            spread,
        }));
    }
    let passed = spreads.last().is_some_and(|s| s.1 < config.tol);
    Ok(MacroReport {
        family: family.name().to_string(),
        rows,
        spreads,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncated_dp_matches_enumeration() {
        let probs = [0.1, 0.7, 0.3, 0.9, 0.5];
        for budget in 0..=5 {
            let mut brute = 0.0;
            for mask in 0..32u32 {
                if mask.count_ones() as usize <= budget {
                    brute += (0..5)
                        .map(|i| if mask >> i & 1 == 1 { probs[i] } else { 1.0 - probs[i] })
                        .product::<f64>();
                }
            }
            assert!((at_most(probs.iter().copied(), budget) - brute).abs() < 1e-14);
        }
    }

    #[test]
    fn pointer_on_basis_product_states() {
        let fam = PointerFamily(CockedPolicy::default());
        // exact cocked pattern of length 25
        let sites: Vec<f64> = (0..25).map(|i| if i < 12 { 1.0 } else { 0.0 }).collect();
        assert_eq!(fam.eval(0.5, &sites).unwrap(), 0.0);
        let zeros = vec![0.0; 25];
        assert_eq!(fam.eval(0.5, &zeros).unwrap(), 1.0);
    }

    #[test]
    fn constant_family_passes() {
        let r = macroscopicity_check(&ConstantFamily(0.3), &MacroCheckConfig::default()).unwrap();
        assert!(r.passed);
        assert!(r.spreads.iter().all(|s| s.1 == 0.0));
        assert_eq!(r.verdict(), "heuristic-pass");
    }

    #[test]
    fn local_family_fails() {
        let r = macroscopicity_check(&FirstSiteFamily, &MacroCheckConfig::default()).unwrap();
        assert!(!r.passed);
        assert!(r.final_spread() > 0.1, "{:?}", r.spreads);
    }

    #[test]
    fn pointer_family_spread_shrinks() {
        let cfg = MacroCheckConfig {
            seed: 11,
            ..MacroCheckConfig::default()
        };
        let r = macroscopicity_check(&PointerFamily(CockedPolicy::default()), &cfg).unwrap();
        let first = r.spreads.first().unwrap().1;
        assert!(r.final_spread() < first, "{:?}", r.spreads);
        assert!(r.passed, "{:?}", r.spreads);
        assert_eq!(r.rows.len(), cfg.grid.len() * cfg.prefixes);
    }

    #[test]
    fn empty_grid_rejected() {
        let cfg = MacroCheckConfig {
            grid: vec![],
            ..MacroCheckConfig::default()
        };
        assert!(macroscopicity_check(&ConstantFamily(0.0), &cfg).is_err());
    }
}

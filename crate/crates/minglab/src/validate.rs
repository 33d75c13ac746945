//! Dense-oracle validation suite for small `n`.

use std::sync::Arc;

use minglab_core::dense::{build_dense_hamiltonian_capped, dense_orbits};
use minglab_core::orbit::{count_orbits_burnside, count_orbits_enumerated};
use minglab_core::state::norm_sqr;
use minglab_core::{
    f_n, fermat_orbit_count, make_cocked_pattern, orbit, ApparatusSpec, Basis, CockedPolicy, CombinedState,
    DensePropagator, DenseTrajectory, IncidentState, OrbitPropagator, PhaseConvention, Propagator, SectorState,
    Trajectory,
};
use num_complex::Complex64;
use rand::Rng;

use crate::commands::{common_cells, rng_for, Outcome, RunError};
use crate::config::ExperimentConfig;
use crate::table::{Cell, Table};

pub const UNITARITY_TOL: f64 = 1e-12;
pub const SHIFT_MASS_TOL: f64 = 1e-20;
pub const PATH_TOL: f64 = 1e-10;
pub const SPECTRUM_TOL: f64 = 1e-10;
pub const SELF_ADJOINT_TOL: f64 = 1e-12;

const RANDOM_TIMES: usize = 20;
const RANDOM_INCIDENTS: usize = 10;

struct Check {
    name: &'static str,
    n: usize,
    error: f64,
    tol: f64,
    /// Exact comparisons pass only at zero error.
    strict: bool,
}

impl Check {
    fn passed(&self) -> bool {
        if self.strict {
            self.error == 0.0
        } else {
            self.error < self.tol
        }
    }
}

fn random_state(rng: &mut impl Rng, basis: Basis) -> SectorState {
    let raw = (0..basis.dim())
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    SectorState::normalized(basis, raw).expect("random vector is nonzero")
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Off-target mass, or 1 if the target amplitude is not unimodular.
fn shift_error(amps: &[Complex64], target: usize) -> f64 {
    if (amps[target].norm() - 1.0).abs() > UNITARITY_TOL {
        return 1.0;
    }
    amps.iter()
        .enumerate()
        .filter(|(i, _)| *i != target)
        .map(|(_, c)| c.norm_sqr())
        .sum()
}

fn checks_for(config: &ExperimentConfig, n: usize) -> Result<Vec<Check>, RunError> {
    let spec = ApparatusSpec::new(n, config.h0)?;
    let policy = CockedPolicy::new(config.alpha)?;
    let convention = if config.corrupt_phase {
        PhaseConvention::Literal
    } else {
        PhaseConvention::Standard
    };
    let mut rng = rng_for(config.seed, n);
    let mut out = Vec::new();

    // orbit counting
    let enumerated = count_orbits_enumerated(n)?;
    let burnside = count_orbits_burnside(n)?;
    out.push(Check {
        name: "orbit_count_burnside",
        n,
        error: enumerated.abs_diff(burnside) as f64,
        tol: 0.0,
        strict: true,
    });
    if let Some(formula) = fermat_orbit_count(n) {
        out.push(Check {
            name: "orbit_count_fermat",
            n,
            error: enumerated.abs_diff(formula) as f64,
            tol: 0.0,
            strict: true,
        });
    }

    // dense Hamiltonian structure
    let hamiltonian = build_dense_hamiltonian_capped(spec, config.dense_cap)?;
    out.push(Check {
        name: "self_adjoint",
        n,
        error: hamiltonian.self_adjoint_deviation(),
        tol: SELF_ADJOINT_TOL,
        strict: false,
    });
    let spectrum_error = dense_orbits(n)
        .iter()
        .filter(|m| m.len() == n)
        .flat_map(|members| {
            hamiltonian
                .block_spectrum(members)
                .into_iter()
                .enumerate()
                .map(|(k, e)| (e - k as f64 * spec.h_n()).abs())
                .collect::<Vec<_>>()
        })
        .fold(0.0, f64::max);
    out.push(Check {
        name: "spectrum",
        n,
        error: spectrum_error,
        tol: SPECTRUM_TOL,
        strict: false,
    });

    let cocked = make_cocked_pattern(n)?;
    let basis = Arc::new(orbit(&cocked));
    let fast = OrbitPropagator::new(spec, basis.clone())?.with_convention(convention);
    let dense = DensePropagator::new(&hamiltonian).with_convention(convention);

    // unitarity and path equivalence on random orbit-supported states
    let mut unitarity: f64 = 0.0;
    let mut path: f64 = 0.0;
    for _ in 0..RANDOM_TIMES {
        let state = random_state(&mut rng, Basis::Orbit(basis.clone()));
        let t = rng.random_range(-2.0..2.0);
        let a = fast.evolve(&state, t)?;
        let b = dense.evolve(&state.to_dense(), t)?;
        unitarity = unitarity
            .max((a.norm() - 1.0).abs())
            .max((norm_sqr(b.amplitudes()).sqrt() - 1.0).abs());
        path = path.max(max_diff(a.to_dense().amplitudes(), b.amplitudes()));
    }
    out.push(Check {
        name: "unitarity",
        n,
        error: unitarity,
        tol: UNITARITY_TOL,
        strict: false,
    });
    out.push(Check {
        name: "path_equivalence",
        n,
        error: path,
        tol: PATH_TOL,
        strict: false,
    });

    // shift exactness at t = m/n
    let mut shift: f64 = 0.0;
    for m in [1, 2, n - 1] {
        let t = m as f64 / n as f64;
        let a = fast.evolve(&SectorState::orbit_basis_vector(basis.clone(), 0), t)?;
        shift = shift.max(shift_error(a.amplitudes(), m % basis.period()));
        let b = dense.evolve(&SectorState::dense_basis_vector(&cocked), t)?;
        shift = shift.max(shift_error(b.amplitudes(), cocked.rotate_right(m).to_index()));
    }
    out.push(Check {
        name: "shift_exactness",
        n,
        error: shift,
        tol: SHIFT_MASS_TOL,
        strict: false,
    });

    // pointer observable: fast vs dense
    let mut pointer: f64 = 0.0;
    let mut quadrature: f64 = 0.0;
    for _ in 0..RANDOM_INCIDENTS {
        let incident = IncidentState::from_detection_probability(rng.random(), rng.random_range(0.0..6.3))?;
        let ft = Trajectory::cocked(spec, policy, incident)?;
        let dt = DenseTrajectory::cocked(spec, policy, incident)?;
        for _ in 0..RANDOM_TIMES {
            let t = rng.random_range(0.0..1.0);
            pointer = pointer.max((ft.f_at(t) - dt.f_at(t)?).abs());
        }
        let m = 2 * n + 1;
        quadrature = quadrature.max((ft.average(m)?.mean - dt.average(m)?.mean).abs());
    }
    // a generic orbit-supported superposition in the ψ₁ sector
    let s1 = random_state(&mut rng, Basis::Orbit(basis.clone()));
    let s0 = SectorState::orbit_basis_vector(basis.clone(), 0);
    let incident = IncidentState::balanced();
    for _ in 0..RANDOM_TIMES {
        let t = rng.random_range(0.0..1.0);
        let cs = CombinedState::new(incident, s0.clone(), fast.evolve(&s1, t)?)?;
        let cd = CombinedState::new(incident, s0.to_dense(), dense.evolve(&s1.to_dense(), t)?)?;
        pointer = pointer.max((f_n(&cs, &policy)? - f_n(&cd, &policy)?).abs());
    }
    out.push(Check {
        name: "pointer_fast_dense",
        n,
        error: pointer,
        tol: PATH_TOL,
        strict: false,
    });
    out.push(Check {
        name: "quadrature_fast_dense",
        n,
        error: quadrature,
        tol: PATH_TOL,
        strict: false,
    });
    Ok(out)
}

pub fn run_validate(config: &ExperimentConfig) -> Result<Outcome, RunError> {
    let mut table = Table::new(vec![
        "check",
        "n",
        "max_error",
        "tolerance",
        "passed",
        "alpha",
        "a1_sq",
        "seed",
        "version",
    ]);
    let mut all = true;
    for &n in &config.n_list {
        for check in checks_for(config, n)? {
            let ok = check.passed();
            all &= ok;
            let mut row: Vec<Cell> = vec![
                check.name.into(),
                check.n.into(),
                check.error.into(),
                check.tol.into(),
                ok.into(),
            ];
            row.extend(common_cells(config));
            table.push(row);
        }
    }
    Ok(Outcome { table, passed: all })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Command, ConfigFile};

    fn config(n_list: Vec<usize>) -> ExperimentConfig {
        ExperimentConfig::from_file(
            Command::Validate,
            ConfigFile {
                n_list: Some(n_list),
                ..ConfigFile::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn passes_on_small_sizes() {
        let out = run_validate(&config(vec![3, 5, 7])).unwrap();
        assert!(out.passed, "{:#?}", out.table);
        let names = out.table.column("check").unwrap();
        assert!(names.contains(&&Cell::from("orbit_count_fermat")));
    }

    #[test]
    fn corrupted_phase_fails_shift_check() {
        let mut c = config(vec![5]);
        c.corrupt_phase = true;
        let out = run_validate(&c).unwrap();
        assert!(!out.passed);
        let names = out.table.column("check").unwrap();
        let passed = out.table.column("passed").unwrap();
        let shift = names.iter().position(|c| **c == Cell::from("shift_exactness")).unwrap();
        assert_eq!(passed[shift], &Cell::Bool(false));
    }
}

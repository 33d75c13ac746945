//! Toy model of a quantum amplifier: an `n`-site binary device whose
//! configurations shift cyclically by one site every `1/n` time units when an
//! incident particle is present, and stay frozen otherwise.
//!
//! The crate provides
//!
//! * packed [`Pattern`]s, their shift orbits and orbit counting,
//! * exact evolution on an orbit via the orbit DFT ([`OrbitPropagator`]) and
//!   a dense `2^n` oracle ([`DensePropagator`]),
//! * the cocked set and the pointer observable [`f_n`],
//! * exact time averages of `f_n` ([`Trajectory`]) and their closed form,
//! * the two-point classical limit system and finite-size extrapolation,
//! * a sampled macroscopicity diagnostic.
//!
//! Data-parallel loops run on rayon when the `parallel` feature is enabled
//! (the default); see [`Execution`].

pub mod averaging;
pub mod dense;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod limit;
pub mod macroscopic;
pub mod observable;
pub mod orbit;
pub mod pattern;
pub mod state;

pub use averaging::{
    limit_value, perturb_pattern, time_average_closed_form, time_average_quadrature, time_variance_scan, AverageMethod,
    DenseTrajectory, QuadratureStrategy, SampleRule, Trajectory, TrajectoryAverage,
};
pub use dense::{build_dense_hamiltonian, evolve_dense, DenseHamiltonian, DensePropagator, DEFAULT_DENSE_CAP};
pub use dynamics::{evolve_combined, evolve_orbit, OrbitPropagator, PhaseConvention, Propagator};
pub use error::{Error, Result};
pub use exec::Execution;
pub use limit::{
    build_classical_system, classical_expectation, extrapolate_limit, ClassicalLimitSystem, LimitFit, LimitPoint,
    LimitSample,
};
pub use macroscopic::{macroscopicity_check, MacroCheckConfig, MacroReport, ProductFamily};
pub use observable::{
    cocked_shift_count, f_n, is_cocked, CockedMembership, CockedPolicy, CockedSet, PointerObservable,
};
pub use orbit::{count_orbits, fermat_orbit_count, orbit, ApparatusSpec, OrbitBasis};
pub use pattern::{make_cocked_pattern, Pattern};
pub use state::{Basis, CombinedState, IncidentState, SectorState};

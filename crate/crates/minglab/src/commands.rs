//! One function per CLI command. Each returns a [`Table`] built in `n_list`
//! order; sweeps over `n` run concurrently into private rows.

use minglab_core::macroscopic::{ConstantFamily, FirstSiteFamily, PointerFamily};
use minglab_core::{
    build_classical_system, classical_expectation, count_orbits, extrapolate_limit, fermat_orbit_count,
    macroscopicity_check, make_cocked_pattern, perturb_pattern, ApparatusSpec, CockedPolicy, Execution, IncidentState,
    LimitSample, MacroCheckConfig, ProductFamily, Trajectory,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{Command, ConfigError, ExperimentConfig, Family, Method};
use crate::table::{Cell, Table, VERSION};
use crate::validate::run_validate;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("model error: {0}")]
    Model(#[from] minglab_core::Error),
}

/// A finished command: its table and whether every check in it passed.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: Table,
    pub passed: bool,
}

impl Outcome {
    fn ok(table: Table) -> Self {
        Self { table, passed: true }
    }
}

pub fn run(config: &ExperimentConfig) -> Result<Outcome, RunError> {
    config.validate()?;
    match config.command {
        Command::Average => run_average(config).map(Outcome::ok),
        Command::Trajectory => run_trajectory(config).map(Outcome::ok),
        Command::Noise => run_noise(config).map(Outcome::ok),
        Command::Limit => run_limit(config).map(Outcome::ok),
        Command::Orbits => run_orbits(config),
        Command::MacroCheck => run_macro_check(config).map(Outcome::ok),
        Command::Validate => run_validate(config),
    }
}

/// Generator for size `n`: one seed per run, one stream per `n`.
pub(crate) fn rng_for(seed: u64, n: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n as u64);
    rng
}

pub(crate) fn common_cells(config: &ExperimentConfig) -> [Cell; 4] {
    [
        config.alpha.into(),
        config.a1_sq.into(),
        config.seed.into(),
        VERSION.into(),
    ]
}

fn incident(config: &ExperimentConfig) -> Result<IncidentState, RunError> {
    Ok(IncidentState::from_detection_probability(config.a1_sq, config.phase)?)
}

/// Cocked start, optionally perturbed by `defects` seeded random flips.
pub fn trajectory_for(config: &ExperimentConfig, n: usize) -> Result<Trajectory, RunError> {
    let spec = ApparatusSpec::new(n, config.h0)?;
    let policy = CockedPolicy::new(config.alpha)?;
    let mut pattern = make_cocked_pattern(n)?;
    if config.defects > 0 {
        pattern = perturb_pattern(&pattern, config.defects, &mut rng_for(config.seed, n))?;
    }
    Ok(Trajectory::from_pattern(spec, policy, incident(config)?, pattern)?)
}

fn sweep<T, F>(config: &ExperimentConfig, f: F) -> Result<Vec<T>, RunError>
where
    T: Send,
    F: Fn(usize) -> Result<T, RunError> + Sync + Send,
{
    Execution::default()
        .map_slice(&config.n_list, |&n| f(n))
        .into_iter()
        .collect()
}

pub fn run_average(config: &ExperimentConfig) -> Result<Table, RunError> {
    let mut table = Table::new(vec![
        "n",
        "alpha",
        "a1_sq",
        "kappa_n",
        "mean_quadrature",
        "mean_closed_form",
        "limit_value",
        "deviation",
        "variance",
        "samples",
        "seed",
        "version",
    ]);
    let rows = sweep(config, |n| {
        let traj = trajectory_for(config, n)?;
        let samples = config.samples.resolve(n);
        let quad = traj.average(samples)?;
        let closed = traj.closed_form()?;
        let kappa = traj.observable().sector1_set().len();
        let limit = config.a1_sq;
        Ok(vec![
            n.into(),
            config.alpha.into(),
            config.a1_sq.into(),
            kappa.into(),
            quad.mean.into(),
            closed.mean.into(),
            limit.into(),
            (quad.mean - limit).abs().into(),
            quad.variance.into(),
            samples.into(),
            config.seed.into(),
            VERSION.into(),
        ])
    })?;
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

pub fn run_trajectory(config: &ExperimentConfig) -> Result<Table, RunError> {
    let n = config.n_list[0];
    let traj = trajectory_for(config, n)?;
    let samples = config.samples.resolve(n);
    let values = traj.samples(samples, Default::default())?;
    let mut table = Table::new(vec!["n", "t", "f_n", "alpha", "a1_sq", "seed", "version"]);
    for (j, f) in values.into_iter().enumerate() {
        let mut row: Vec<Cell> = vec![n.into(), (j as f64 / samples as f64).into(), f.into()];
        row.extend(common_cells(config));
        table.push(row);
    }
    Ok(table)
}

pub fn run_noise(config: &ExperimentConfig) -> Result<Table, RunError> {
    let mut table = Table::new(vec![
        "n",
        "mean",
        "variance",
        "deviation",
        "alpha",
        "a1_sq",
        "seed",
        "version",
    ]);
    let rows = sweep(config, |n| {
        let avg = trajectory_for(config, n)?.average(config.samples.resolve(n))?;
        let mut row: Vec<Cell> = vec![
            n.into(),
            avg.mean.into(),
            avg.variance.into(),
            (avg.mean - config.a1_sq).abs().into(),
        ];
        row.extend(common_cells(config));
        Ok(row)
    })?;
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

pub fn run_limit(config: &ExperimentConfig) -> Result<Table, RunError> {
    let samples = sweep(config, |n| {
        let traj = trajectory_for(config, n)?;
        let mean = match config.method {
            Method::Quadrature => traj.average(config.samples.resolve(n))?.mean,
            Method::ClosedForm => traj.closed_form()?.mean,
        };
        Ok(LimitSample {
            n,
            mean,
            kappa: traj.observable().sector1_set().len(),
        })
    })?;
    let fit = extrapolate_limit(&samples)?;
    let expectation = classical_expectation(&build_classical_system(&incident(config)?));
    let mut table = Table::new(vec![
        "n",
        "alpha",
        "a1_sq",
        "L_hat",
        "residual",
        "classical_expectation",
        "seed",
        "version",
    ]);
    table.push(vec![
        (*config.n_list.iter().max().unwrap()).into(),
        config.alpha.into(),
        config.a1_sq.into(),
        fit.estimate.into(),
        fit.residual.into(),
        expectation.into(),
        config.seed.into(),
        VERSION.into(),
    ]);
    Ok(table)
}

/// Orbit counts; fails when a prime size disagrees with `2 + (2^n−2)/n`.
pub fn run_orbits(config: &ExperimentConfig) -> Result<Outcome, RunError> {
    let mut table = Table::new(vec![
        "n",
        "prime",
        "count",
        "formula_count",
        "alpha",
        "a1_sq",
        "seed",
        "version",
    ]);
    let mut passed = true;
    for &n in &config.n_list {
        let spec = ApparatusSpec::new(n, config.h0)?;
        let count = count_orbits(n)?;
        let formula = fermat_orbit_count(n);
        if formula.is_some_and(|f| f != count) {
            passed = false;
        }
        let mut row: Vec<Cell> = vec![n.into(), spec.is_prime().into(), count.into(), formula.into()];
        row.extend(common_cells(config));
        table.push(row);
    }
    Ok(Outcome { table, passed })
}

pub fn run_macro_check(config: &ExperimentConfig) -> Result<Table, RunError> {
    let policy = CockedPolicy::new(config.alpha)?;
    let family: Box<dyn ProductFamily> = match config.family {
        Family::Pointer => Box::new(PointerFamily(policy)),
        Family::FirstSite => Box::new(FirstSiteFamily),
        Family::Constant => Box::new(ConstantFamily(config.a1_sq)),
    };
    let report = macroscopicity_check(
        family.as_ref(),
        &MacroCheckConfig {
            grid: config.n_list.clone(),
            tol: config.tol,
            seed: config.seed,
            ..MacroCheckConfig::default()
        },
    )?;
    let mut table = Table::new(vec![
        "n",
        "prefix_id",
        "estimate",
        "spread",
        "family",
        "verdict",
        "alpha",
        "a1_sq",
        "seed",
        "version",
    ]);
    for row in &report.rows {
        let mut cells: Vec<Cell> = vec![
            row.n.into(),
            row.prefix_id.into(),
            row.estimate.into(),
            row.spread.into(),
            report.family.as_str().into(),
            report.verdict().into(),
        ];
        cells.extend(common_cells(config));
        table.push(cells);
    }
    Ok(table)
}

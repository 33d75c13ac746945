use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use minglab::config::{Family, Method, Samples};
use minglab::{exit, run, write_atomic, Command, ConfigError, ConfigFile, ExperimentConfig, Format, RunError};

/// Experiments on the cyclic-shift amplifier model.
#[derive(Debug, Parser)]
#[command(name = "minglab", version)]
struct Cli {
    /// What to run.
    #[arg(value_enum)]
    command: Command,

    /// JSON experiment manifest; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Apparatus sizes (repeat or comma-separate).
    #[arg(long = "n", value_delimiter = ',', num_args = 1..)]
    n_list: Option<Vec<usize>>,

    /// Defect-budget exponent, b(n) = floor(n^alpha).
    #[arg(long)]
    alpha: Option<f64>,

    /// Base action constant h0 (h_n = h0 / n).
    #[arg(long)]
    h0: Option<f64>,

    /// Detection probability |a1|^2.
    #[arg(long = "a1-sq")]
    a1_sq: Option<f64>,

    /// Relative phase of a1 in radians.
    #[arg(long)]
    phase: Option<f64>,

    /// Quadrature points: "auto" (2n+1) or an integer.
    #[arg(long)]
    samples: Option<Samples>,

    /// Random defects flipped into the initial cocked pattern.
    #[arg(long)]
    defects: Option<usize>,

    #[arg(long)]
    seed: Option<u64>,

    /// Output file (written atomically); stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,

    #[arg(long, value_enum)]
    format: Option<Format>,

    /// How `limit` obtains the finite-n means.
    #[arg(long, value_enum)]
    method: Option<Method>,

    /// Observable family for `macro-check`.
    #[arg(long, value_enum)]
    family: Option<Family>,

    /// Spread tolerance for `macro-check`.
    #[arg(long)]
    tol: Option<f64>,

    /// Largest n accepted by the dense oracle.
    #[arg(long = "dense-cap")]
    dense_cap: Option<usize>,

    /// Refuse runs whose estimated memory exceeds this many MiB.
    #[arg(long = "max-memory-mb")]
    max_memory_mb: Option<usize>,

    /// Evolve with the phase law lacking 2π (validate negative control).
    #[arg(long = "corrupt-phase", hide = true)]
    corrupt_phase: bool,
}

impl Cli {
    fn flags(&self) -> ConfigFile {
        ConfigFile {
            command: None,
            n_list: self.n_list.clone(),
            alpha: self.alpha,
            h0: self.h0,
            a1_sq: self.a1_sq,
            phase: self.phase,
            samples: self.samples,
            defects: self.defects,
            seed: self.seed,
            output: self.output.clone(),
            format: self.format,
            method: self.method,
            family: self.family,
            tol: self.tol,
            dense_cap: self.dense_cap,
            max_memory_mb: self.max_memory_mb,
        }
    }

    fn resolve(&self) -> Result<ExperimentConfig, ConfigError> {
        let file = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let mut config = ExperimentConfig::from_file(self.command, file.overlay(self.flags()))?;
        config.corrupt_phase = self.corrupt_phase;
        Ok(config)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match cli.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("minglab: {e}");
            return ExitCode::from(exit::CONFIG_ERROR as u8);
        }
    };
    let outcome = match run(&config) {
        Ok(o) => o,
        Err(e @ (RunError::Config(_) | RunError::Model(_))) => {
            eprintln!("minglab: {e}");
            return ExitCode::from(exit::CONFIG_ERROR as u8);
        }
    };
    let bytes = match outcome.table.encode(config.format) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("minglab: {e}");
            return ExitCode::from(exit::VALIDATION_FAILURE as u8);
        }
    };
    let written = match &config.output {
        Some(path) => write_atomic(path, &bytes),
        None => std::io::stdout().lock().write_all(&bytes),
    };
    if let Err(e) = written {
        eprintln!("minglab: cannot write output: {e}");
        return ExitCode::from(exit::CONFIG_ERROR as u8);
    }
    if outcome.passed {
        ExitCode::from(exit::SUCCESS as u8)
    } else {
        eprintln!("minglab: {} reported failures", config.command.name());
        ExitCode::from(exit::VALIDATION_FAILURE as u8)
    }
}

//! Command-line front end.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{ConfigError, Error, ModelError};
use crate::io::config::{parse_config, ResolvedConfig};
use crate::io::csv;
use crate::model::{initial_state, ConfigurationLabel};
use crate::oracle::{closure_report, FockBasisSpec};
use crate::runner::{chi_sweep_with, run_scenario, table_matrix, TableOptions};
use crate::witnesses::select_columns;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "ensemble-cavity",
    version,
    about = "Moment dynamics and nonclassicality witnesses for a driven cavity with two atomic ensembles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one scenario and write witness (or moment) time series.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Write the raw moment trajectory instead of witnesses.
        #[arg(long)]
        moments: bool,
    },
    /// Tick/cross matrix over all configurations at chi = 0 and 0.2.
    Table {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Witness time series across a grid of drive strengths.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated chi values.
        #[arg(long, value_delimiter = ',', required = true)]
        chis: Vec<f64>,
    },
    /// Compare exact Fock-space correlators against decoupled ones.
    OracleCheck {
        #[command(flatten)]
        common: CommonArgs,
        /// Highest kept Fock level per mode.
        #[arg(long, default_value_t = 6)]
        nmax: usize,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Scenario file of `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Configuration preset: AA, AN, NA or NN.
    #[arg(long)]
    pub preset: Option<String>,
    /// Drive strength.
    #[arg(long, allow_negative_numbers = true)]
    pub chi: Option<f64>,
    /// End of the time grid.
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Number of evenly spaced output times, both ends included.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Tick threshold for the sign matrix.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Initial occupation of every mode.
    #[arg(long)]
    pub init: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Witness columns or families, comma-separated.
    #[arg(long, default_value = "all")]
    pub witnesses: String,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Model(_) | Error::Config(_) | Error::Io(_) => Failure::Usage(e.to_string()),
            Error::Dynamics(crate::error::DynamicsError::Model(_)) => Failure::Usage(e.to_string()),
            Error::Oracle(crate::error::OracleError::Model(_))
            | Error::Oracle(crate::error::OracleError::DimensionCap { .. })
            | Error::Oracle(crate::error::OracleError::InvalidBasis(_)) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

/// Resolves the scenario from `--config` or `--preset`, then applies the
/// flag overrides. `default_init` applies when neither the file nor
/// `--init` sets occupations.
fn resolve(common: &CommonArgs, default_init: Option<f64>) -> Result<ResolvedConfig, Failure> {
    let mut resolved = match (&common.config, &common.preset) {
        (Some(_), Some(_)) => return Err(usage("--config and --preset are mutually exclusive")),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let mut r =
                parse_config(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            if let Some(n) = default_init.filter(|_| !text.contains("init_n")) {
                r.scenario.initial = initial_state(n, n, n).map_err(usage)?;
            }
            r
        }
        (None, Some(name)) => {
            let label: ConfigurationLabel = name.parse().map_err(usage)?;
            let mut r = ResolvedConfig::from_preset(label, 0.0);
            if let Some(n) = default_init {
                r.scenario.initial = initial_state(n, n, n).map_err(usage)?;
            }
            r
        }
        (None, None) => return Err(usage("one of --config or --preset is required")),
    };
    let s = &mut resolved.scenario;
    if let Some(chi) = common.chi {
        s.params.chi = chi;
    }
    if let Some(t) = common.tmax {
        s.t_max = t;
    }
    if let Some(n) = common.samples {
        s.sample_count = n;
    }
    if let Some(n) = common.init {
        s.initial = initial_state(n, n, n).map_err(usage)?;
    }
    if let Some(th) = common.threshold {
        if !(th > 0.0) || !th.is_finite() {
            return Err(usage(format!("threshold must be > 0, got {th}")));
        }
        resolved.threshold = th;
    }
    s.validate().map_err(|e| usage(ConfigError::Invalid(e)))?;
    Ok(resolved)
}

fn open_output<'a>(
    out: &Option<PathBuf>,
    stdout: &'a mut dyn Write,
) -> Result<Box<dyn Write + 'a>, Failure> {
    match out {
        Some(path) => {
            let f = File::create(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(stdout)),
    }
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate { common, moments } => {
            let columns = select_columns(&common.witnesses).map_err(usage)?;
            let resolved = resolve(&common, None)?;
            let (trajectory, series) = run_scenario(&resolved.scenario)?;
            let mut w = open_output(&common.out, stdout)?;
            if moments {
                csv::write_trajectory(&mut w, &trajectory)?;
            } else {
                csv::write_witness_series(&mut w, &series, &columns)?;
            }
            w.flush()?;
        }
        Command::Table { common } => {
            if common.config.is_some() || common.preset.is_some() || common.chi.is_some() {
                return Err(usage(
                    "table covers every preset at chi = 0 and 0.2; --config, --preset and --chi do not apply",
                ));
            }
            let mut options = TableOptions::default();
            if let Some(t) = common.tmax {
                options.t_max = t;
            }
            if let Some(n) = common.samples {
                options.samples = n;
            }
            if let Some(th) = common.threshold {
                options.threshold = th;
            }
            if let Some(n) = common.init {
                options.init = [n; 3];
            }
            let matrix = table_matrix(&options)?;
            let mut w = open_output(&common.out, stdout)?;
            csv::write_sign_matrix(&mut w, &matrix)?;
            w.flush()?;
        }
        Command::Sweep { common, chis } => {
            let resolved = resolve(&common, None)?;
            let config = resolved.preset.unwrap_or(ConfigurationLabel::AN);
            let surface = chi_sweep_with(&resolved.scenario, config, &chis, &common.witnesses)
                .map_err(|e| match e {
                    Error::Model(ModelError::InvalidArgument(m)) => usage(m),
                    other => other.into(),
                })?;
            for row in &surface.rows {
                if let Err(e) = &row.values {
                    writeln!(stderr, "chi = {}: {e}", row.chi)?;
                }
            }
            let mut w = open_output(&common.out, stdout)?;
            csv::write_sweep(&mut w, &surface)?;
            w.flush()?;
            if surface.rows.iter().any(|r| r.values.is_err()) {
                return Err(Failure::Numeric("one or more sweep points failed".into()));
            }
        }
        Command::OracleCheck { common, nmax } => {
            let mut common = common;
            if common.samples.is_none() {
                common.samples = Some(101);
            }
            let resolved = resolve(&common, Some(0.2))?;
            let basis = FockBasisSpec::new(nmax).map_err(usage)?;
            let report = closure_report(&resolved.scenario.params, &resolved.scenario, &basis)
                .map_err(Error::from)?;
            let mut w = open_output(&common.out, stdout)?;
            csv::write_closure_report(&mut w, &report)?;
            w.flush()?;
            writeln!(
                stderr,
                "max first-moment error {:e}",
                report.max_first_moment_error()
            )?;
            writeln!(
                stderr,
                "max second-moment error {:e}",
                report.max_second_moment_error()
            )?;
            for (name, err) in report.summary() {
                writeln!(stderr, "max |exact - decoupled| {name}: {err:e}")?;
            }
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Numeric(m)) => {
            let _ = writeln!(stderr, "numeric failure: {m}");
            EXIT_NUMERIC
        }
    }
}

//! Command-line front end.
//!
//! Exit codes: 0 success, 2 domain error, 3 numerical failure, 4 I/O.

mod commands;
pub mod config;
pub mod format;
pub mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{Map, Value};

use crate::error::{Error, ErrorKind};
use crate::surface::{make_torus, SurfaceSpec};
pub use commands::Command;
pub use config::{FileConfig, Format};
use format::Table;
use svg::Plot;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e.kind() {
            ErrorKind::Domain => CliError::Domain(e.to_string()),
            ErrorKind::Numerical => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "revgeo", version, about = "Geodesics on tori and other surfaces of revolution")]
pub struct Cli {
    /// Distance from the axis to the tube center.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Tube radius.
    #[arg(long, global = true)]
    pub b: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON file with defaults keyed by long flag name.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Acceptance tolerance for closure and shooting residuals.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Effective potential over a range of poloidal angle, with energy levels.
    Potential {
        #[arg(long, allow_negative_numbers = true)]
        ell: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        chi_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        chi_max: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        /// Comma-separated energy levels to overlay and classify.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        energies: Option<Vec<f64>>,
    },
    /// Integrates a unit-speed geodesic launched at angle beta0 from the meridian.
    Geodesic {
        #[arg(long, allow_negative_numbers = true)]
        beta0: Option<f64>,
        /// Launch radius along the meridian; 0 is the outer equator.
        #[arg(long, allow_negative_numbers = true)]
        r0: Option<f64>,
        #[arg(long)]
        lambda_max: Option<f64>,
        /// Resample the trace at this many uniform steps instead of the adaptive ones.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Closed-geodesic spectrum for all primitive labels up to the bounds.
    Spectrum {
        #[arg(long)]
        m_max: Option<u32>,
        #[arg(long)]
        n_max: Option<u32>,
    },
    /// A single closed geodesic [m,n;p] with its self-intersections.
    Closed {
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        p: Option<u8>,
    },
    /// Geodesics joining two points given as (r, theta).
    Bvp {
        #[arg(long, allow_negative_numbers = true)]
        r1: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        theta1: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        r2: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        theta2: Option<f64>,
        /// Extra azimuthal windings searched on either side.
        #[arg(long)]
        windings: Option<u32>,
    },
    /// Closed geodesics of the flat square torus.
    Flat {
        #[arg(long)]
        m_max: Option<u32>,
        #[arg(long)]
        n_max: Option<u32>,
    },
    /// Central-force orbits with potential -k1/r - k2/r^3.
    Kepler {
        #[arg(long)]
        k1: Option<f64>,
        #[arg(long)]
        k2: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        ell: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        energy: Option<f64>,
        /// Starting radius for unbound orbits.
        #[arg(long)]
        r0: Option<f64>,
        #[arg(long)]
        lambda_max: Option<f64>,
    },
    /// Launch angles and lengths of closed geodesics from the outer equator.
    Expmap {
        /// Labels such as "[3,2;1]"; separate several with spaces or repeat the flag.
        #[arg(long, num_args = 1..)]
        labels: Option<Vec<String>>,
    },
}

/// Everything a command needs, after merging flags with the config file.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub a: f64,
    pub b: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub tol: f64,
    pub command: commands::Command,
}

pub const DEFAULT_TOL: f64 = 1e-5;

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let file = match &cli.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let tol = file.pick(cli.tol, "tol", DEFAULT_TOL)?;
        if !(tol > 0.0) {
            return Err(CliError::Domain(format!("--tol must be positive, got {tol}")));
        }
        Ok(RunConfig {
            a: file.pick(cli.a, "a", 2.0)?,
            b: file.pick(cli.b, "b", 1.0)?,
            format: file.pick(cli.format, "format", Format::Csv)?,
            out: file.pick_opt(cli.out, "out")?,
            tol,
            command: commands::Command::resolve(cli.command, &file)?,
        })
    }

    pub fn surface(&self) -> Result<SurfaceSpec, CliError> {
        Ok(make_torus(self.a, self.b)?)
    }
}

/// Result of a command: a table, extra JSON fields, a plot, and an optional
/// failure raised after the data was produced.
pub struct Output {
    pub command: &'static str,
    pub surface: Option<SurfaceSpec>,
    pub table: Table,
    pub meta: Map<String, Value>,
    pub plot: Plot,
    pub failure: Option<CliError>,
}

impl Output {
    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Csv => {
                let mut buf = Vec::new();
                self.table.write_csv(&mut buf).map_err(|e| CliError::Io(e.to_string()))?;
                Ok(buf)
            }
            Format::Json => {
                let doc = format::document(self.command, self.surface.as_ref(), &self.table, &self.meta);
                let mut buf = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
                buf.push(b'\n');
                Ok(buf)
            }
            Format::Svg => Ok(svg::render(&self.plot).into_bytes()),
        }
    }
}

pub fn execute(config: &RunConfig) -> Result<Output, CliError> {
    commands::execute(config)
}

fn emit(config: &RunConfig, bytes: &[u8]) -> Result<(), CliError> {
    match &config.out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|config| {
        let output = execute(&config)?;
        emit(&config, &output.render(config.format)?)?;
        output.failure.map_or(Ok(()), Err)
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("revgeo: {e}");
            e.exit_code()
        }
    }
}

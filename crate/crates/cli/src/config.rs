use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;
use crate::selftest::Scale;

#[derive(Debug, Parser)]
#[command(
    name = "gbs",
    version,
    about = "Brauer-Siegel experiments on number field families"
)]
pub struct Cli {
    #[command(flatten)]
    pub options: GlobalOptions,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Args)]
pub struct GlobalOptions {
    /// Family specification file (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    pub family: Option<PathBuf>,
    /// Largest prime power counted in splitting profiles.
    #[arg(long = "qmax", global = true, default_value_t = 10_000)]
    pub q_max: u64,
    /// Truncation point of Euler products.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub euler_cutoff: u64,
    /// Truncation point of quadratic L-series.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub l_cutoff: u64,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub murty_c: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub stark_c: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write output here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Subcommand)]
pub enum Command {
    /// Full pipeline on a family: profiles, residues, invariants, report.
    Analyze,
    /// Table of e(n), delta(n) and zero-free widths.
    BoundsTable {
        #[arg(long, default_value_t = 12)]
        n_max: u64,
        /// Reference value of log d_K for the width column.
        #[arg(long, default_value_t = 10.0)]
        log_dk: f64,
    },
    /// Class data and L-values for fundamental discriminants in a range.
    QuadraticSweep {
        #[arg(long, allow_hyphen_values = true)]
        d_from: i64,
        #[arg(long, allow_hyphen_values = true)]
        d_to: i64,
    },
    /// Residues of each family member by every available method, reconciled.
    Residue {
        #[arg(long, default_value_t = 0.02)]
        tolerance: f64,
    },
    /// Acceptance checks with pass/fail per criterion.
    Selftest {
        #[arg(long, value_enum, default_value_t = Scale::Reduced)]
        scale: Scale,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Validated settings of one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub family_spec_path: Option<PathBuf>,
    pub q_max: u64,
    pub euler_cutoff: u64,
    pub l_cutoff: u64,
    pub murty_c: f64,
    pub stark_c: f64,
    pub format: Format,
    pub out_path: Option<PathBuf>,
    pub threads: usize,
}

pub const MIN_Q_MAX: u64 = 100;

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let o = cli.options;
        let threads = match o.threads {
            Some(t) => t,
            None => std::thread::available_parallelism().map_or(1, usize::from),
        };
        let config = Self {
            command: cli.command,
            family_spec_path: o.family,
            q_max: o.q_max,
            euler_cutoff: o.euler_cutoff,
            l_cutoff: o.l_cutoff,
            murty_c: o.murty_c,
            stark_c: o.stark_c,
            format: o.format,
            out_path: o.out,
            threads,
        };
        config.validate()?;
        Ok(config)
    }

    /// Defaults for `command`, as if no flags were given.
    pub fn with_defaults(command: Command) -> Self {
        Self {
            command,
            family_spec_path: None,
            q_max: 10_000,
            euler_cutoff: 100_000,
            l_cutoff: 1_000_000,
            murty_c: 1.0,
            stark_c: 1.0,
            format: Format::Json,
            out_path: None,
            threads: 1,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.q_max < MIN_Q_MAX {
            return Err(CliError::Input(format!(
                "--qmax {} is below {MIN_Q_MAX}",
                self.q_max
            )));
        }
        if self.euler_cutoff < gbs_core::residue::MIN_EULER_CUTOFF {
            return Err(CliError::Input(format!(
                "--euler-cutoff {} is below {}",
                self.euler_cutoff,
                gbs_core::residue::MIN_EULER_CUTOFF
            )));
        }
        if self.euler_cutoff > self.q_max.saturating_mul(10) {
            return Err(CliError::Input(format!(
                "--euler-cutoff {} exceeds ten times --qmax {}",
                self.euler_cutoff, self.q_max
            )));
        }
        if self.l_cutoff == 0 {
            return Err(CliError::Input("--l-cutoff must be positive".into()));
        }
        if !(self.murty_c > 0.0 && self.murty_c.is_finite())
            || !(self.stark_c > 0.0 && self.stark_c.is_finite())
        {
            return Err(CliError::Input(
                "--murty-c and --stark-c must be positive".into(),
            ));
        }
        if self.threads == 0 {
            return Err(CliError::Input("--threads must be at least 1".into()));
        }
        Ok(())
    }

    /// Profiles must reach both the tracked range and the Euler cutoff.
    pub fn profile_limit(&self) -> u64 {
        self.q_max.max(self.euler_cutoff)
    }
}

//! Subcommand handlers. Each resolves its parameters against the config,
//! fills in defaults, echoes them and writes its artifacts.

pub mod bf;
pub mod classify;
pub mod concentrate;
pub mod groups;
pub mod invariance;
pub mod path;
pub mod random_labels;
pub mod sweep;
pub mod train;
pub mod validate;

use crate::config::{self, ConfigFile};
use crate::diag::{usage, Diagnostic};
use crate::io::{Output, OUT_ENV};
use clap::Args;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use tqnn::classifier::{Template, TrainingConfig};

pub struct Ctx {
    pub out: Option<PathBuf>,
    pub config: Option<ConfigFile>,
}

impl Ctx {
    pub fn resolve<T: Serialize + DeserializeOwned>(&self, section: &str, flags: &T) -> Result<T, Diagnostic> {
        config::resolve(section, flags, self.config.as_ref())
    }

    /// Output directory: `--out`, then the environment override, then the
    /// config `out` key, then `tqnn-out/<section>`.
    pub fn output<T: Serialize>(&self, section: &str, resolved: &T) -> Result<Output, Diagnostic> {
        let dir = self
            .out
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .or_else(|| self.config.as_ref().and_then(|c| c.out.clone()))
            .unwrap_or_else(|| PathBuf::from("tqnn-out").join(section));
        Output::create(dir, &config::echo(section, resolved)?)
    }
}

/// Optimizer settings shared by `train`, `random-labels` and `sweep`.
#[derive(Debug, Clone, Default, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct TrainingArgs {
    /// Initial ascent step [default: 1]
    #[arg(long)]
    pub step_size: Option<f64>,
    /// Iteration cap [default: 200]
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Minimum objective gain per accepted step [default: 1e-10]
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Finite-difference step in spin units [default: 1e-4]
    #[arg(long)]
    pub fd_step: Option<f64>,
    /// Step halvings per iteration [default: 10]
    #[arg(long)]
    pub backtracking: Option<usize>,
    /// Stop once train error is 0 [default: true]
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub stop_at_zero_error: Option<bool>,
    /// `cylinder`, or a complex file or bundled name [default: cylinder]
    #[arg(long)]
    pub template: Option<String>,
}

impl TrainingArgs {
    /// Fills defaults in place and returns the library config.
    pub fn resolve(&mut self, twice_cutoff: u32) -> Result<TrainingConfig, Diagnostic> {
        let d = TrainingConfig::default();
        let cfg = TrainingConfig {
            step_size: *self.step_size.get_or_insert(d.step_size),
            max_iterations: *self.max_iterations.get_or_insert(d.max_iterations),
            tolerance: *self.tolerance.get_or_insert(d.tolerance),
            twice_cutoff,
            template: parse_template(self.template.get_or_insert_with(|| "cylinder".into()))?,
            fd_step: *self.fd_step.get_or_insert(d.fd_step),
            backtracking: *self.backtracking.get_or_insert(d.backtracking),
            stop_at_zero_error: *self.stop_at_zero_error.get_or_insert(d.stop_at_zero_error),
            initial_means: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn parse_template(s: &str) -> Result<Template, Diagnostic> {
    if s == "cylinder" {
        Ok(Template::Cylinder)
    } else {
        Ok(Template::Complex {
            complex: crate::io::load_complex(s)?,
        })
    }
}

pub fn require<T: Clone>(v: &Option<T>, name: &str) -> Result<T, Diagnostic> {
    v.clone().ok_or_else(|| usage(format!("missing `{name}` (flag or config)")))
}

/// CSV line from already formatted fields.
pub fn csv_row(fields: &[String]) -> String {
    let mut s = fields.join(",");
    s.push('\n');
    s
}

//! Command-line flags and the JSON config file they overlay.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "screenpath", version, about = "Compare screening designs by support and sign recovery")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Column-correlation criteria, one row per design.
    Criteria(Opts),
    /// Gauss-Dantzig selector power / type I / FDR simulation.
    Gds(Opts),
    /// Exact lasso sign-recovery curves averaged over supports.
    Phi(Opts),
    /// Simulated support or sign recovery curves.
    PhiSim(Opts),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Criteria(_) => "criteria",
            Command::Gds(_) => "gds",
            Command::Phi(_) => "phi",
            Command::PhiSim(_) => "phi-sim",
        }
    }

    pub fn opts_mut(&mut self) -> &mut Opts {
        match self {
            Command::Criteria(o) | Command::Gds(o) | Command::Phi(o) | Command::PhiSim(o) => o,
        }
    }
}

/// Every flag, shared by all commands. The same keys (kebab-case) are
/// accepted in a `--config` JSON object; explicit flags win.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Opts {
    /// JSON file with default values for any of these flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Design CSV, or a built-in `pb:<n>[:<k>]` / `ssd:<order>[:<k>]`. Repeatable.
    #[arg(long)]
    pub design: Vec<String>,
    /// Preset name or scenario JSON file.
    #[arg(long)]
    pub scenario: Option<String>,
    /// lasso | dantzig
    #[arg(long)]
    pub estimator: Option<String>,
    /// fine100 | coarse12 | log:<d>:<min_ratio>. Repeatable.
    #[arg(long)]
    pub grid: Vec<String>,
    /// fixed:<v> | sigma:<v> | frac:<f>. Repeatable.
    #[arg(long)]
    pub gamma: Vec<String>,
    /// aicc | bic. Repeatable.
    #[arg(long)]
    pub ic: Vec<String>,
    /// Active main-effect count. Repeatable for `phi`.
    #[arg(long)]
    pub a: Vec<usize>,
    /// fixed:<v> | exp:<SN> | set:<v1,v2,...>. Repeatable for `phi`.
    #[arg(long)]
    pub beta: Vec<String>,
    /// known | unknown
    #[arg(long)]
    pub signs: Option<String>,
    #[arg(long)]
    pub niter: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Most (support, sign) items evaluated before sampling.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Curve grid `<lo>:<hi>:<d>` on log(lambda), lasso convention.
    #[arg(long, allow_hyphen_values = true)]
    pub log_lambda: Option<String>,
    /// Target QMC standard error per rectangle probability.
    #[arg(long)]
    pub accuracy: Option<f64>,
    /// sign | support
    #[arg(long)]
    pub target: Option<String>,
    /// Split main-effect and interaction sign recovery (lasso).
    #[arg(long)]
    pub split: bool,
    /// Add the exact curve to a simulated lasso sign curve.
    #[arg(long)]
    pub overlay_exact: bool,
    /// Reference UE(s^2) for the efficiency column.
    #[arg(long)]
    pub ue_s2_ref: Option<f64>,
}

fn fill<T>(flag: &mut Option<T>, file: Option<T>) {
    if flag.is_none() {
        *flag = file;
    }
}

fn fill_vec<T>(flag: &mut Vec<T>, file: Vec<T>) {
    if flag.is_empty() {
        *flag = file;
    }
}

impl Opts {
    /// Overlays the config file, if any, under the explicit flags.
    pub fn resolve(mut self) -> Result<Opts> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file = read_config(&path)?;
        fill_vec(&mut self.design, file.design);
        fill(&mut self.scenario, file.scenario);
        fill(&mut self.estimator, file.estimator);
        fill_vec(&mut self.grid, file.grid);
        fill_vec(&mut self.gamma, file.gamma);
        fill_vec(&mut self.ic, file.ic);
        fill_vec(&mut self.a, file.a);
        fill_vec(&mut self.beta, file.beta);
        fill(&mut self.signs, file.signs);
        fill(&mut self.niter, file.niter);
        fill(&mut self.seed, file.seed);
        fill(&mut self.budget, file.budget);
        fill(&mut self.sigma, file.sigma);
        fill(&mut self.out, file.out);
        fill(&mut self.log_lambda, file.log_lambda);
        fill(&mut self.accuracy, file.accuracy);
        fill(&mut self.target, file.target);
        self.split |= file.split;
        self.overlay_exact |= file.overlay_exact;
        fill(&mut self.ue_s2_ref, file.ue_s2_ref);
        Ok(self)
    }

    pub fn out_dir(&self) -> Result<&Path> {
        self.out
            .as_deref()
            .ok_or_else(|| anyhow::anyhow!("invalid config field `out`: an output directory is required"))
    }
}

fn read_config(path: &Path) -> Result<Opts> {
    let text = std::fs::read_to_string(path).with_context(|| format!("{}: cannot read config", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{}: invalid config", path.display()))
}

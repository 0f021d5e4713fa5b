//! Run configuration: a TOML file with `[problem]`, `[solver]`,
//! `[experiment]` and `[run]` sections. Unknown keys are errors.

use std::path::{Path, PathBuf};

use curlcurl_core::maxwell::{Differences, Sampling};
use curlcurl_core::{Geometry, LineSearch, Nonlinearity, Potential, ProblemSpec, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Solve,
    Limit,
    Sweep,
    Decay,
    Compare,
    Continuity,
    Reconstruct,
    Cutoff,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Solve => "solve",
            Experiment::Limit => "limit",
            Experiment::Sweep => "sweep",
            Experiment::Decay => "decay",
            Experiment::Compare => "compare",
            Experiment::Continuity => "continuity",
            Experiment::Reconstruct => "reconstruct",
            Experiment::Cutoff => "cutoff",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    #[serde(default = "default_potential")]
    pub potential: String,
    #[serde(default = "default_potential_params")]
    pub potential_params: Vec<f64>,
    #[serde(default = "default_nonlinearity")]
    pub nonlinearity: String,
    #[serde(default = "default_nonlinearity_params")]
    pub nonlinearity_params: Vec<f64>,
    #[serde(default = "one")]
    pub epsilon: f64,
    #[serde(default = "default_r_max")]
    pub r_max: f64,
    #[serde(default = "default_s_max")]
    pub s_max: f64,
    #[serde(default = "default_n_r")]
    pub n_r: usize,
    #[serde(default = "default_n_s")]
    pub n_s: usize,
}

fn default_potential() -> String {
    "constant".into()
}
fn default_potential_params() -> Vec<f64> {
    vec![1.0]
}
fn default_nonlinearity() -> String {
    "kerr".into()
}
fn default_nonlinearity_params() -> Vec<f64> {
    vec![1.0]
}
fn one() -> f64 {
    1.0
}
fn default_r_max() -> f64 {
    Geometry::standard().r_max
}
fn default_s_max() -> f64 {
    Geometry::standard().s_max
}
fn default_n_r() -> usize {
    Geometry::standard().n_r
}
fn default_n_s() -> usize {
    Geometry::standard().n_s
}

impl Default for ProblemSection {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub grad_tol: f64,
    pub max_iters: usize,
    pub precondition: bool,
    pub seed: u64,
    pub init_noise: f64,
    pub center_s: f64,
    pub width: f64,
    pub cg_tol: f64,
    pub cg_max_iters: usize,
    pub nonnegative: bool,
    pub armijo_c1: f64,
    pub backtrack_factor: f64,
    pub max_backtracks: usize,
    pub initial_step: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let c = SolverConfig::default();
        Self {
            grad_tol: c.grad_tol,
            max_iters: c.max_iters,
            precondition: c.precondition,
            seed: c.seed,
            init_noise: c.init_noise,
            center_s: c.center_s,
            width: c.width,
            cg_tol: c.cg_tol,
            cg_max_iters: c.cg_max_iters,
            nonnegative: c.nonnegative,
            armijo_c1: c.line_search.c1,
            backtrack_factor: c.line_search.shrink,
            max_backtracks: c.line_search.max_backtracks,
            initial_step: c.line_search.initial_step,
        }
    }
}

impl SolverSection {
    pub fn to_config(&self) -> SolverConfig {
        SolverConfig {
            grad_tol: self.grad_tol,
            max_iters: self.max_iters,
            precondition: self.precondition,
            line_search: LineSearch {
                c1: self.armijo_c1,
                shrink: self.backtrack_factor,
                max_backtracks: self.max_backtracks,
                initial_step: self.initial_step,
            },
            seed: self.seed,
            init_noise: self.init_noise,
            center_s: self.center_s,
            width: self.width,
            cg_tol: self.cg_tol,
            cg_max_iters: self.cg_max_iters,
            nonnegative: self.nonnegative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingName {
    Bilinear,
    Spline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DifferencesName {
    Second,
    Fourth,
}

/// Parameters of the individual experiments; each one reads only its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    /// When present, must agree with the subcommand.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<Experiment>,
    /// Constant potential of the limiting problem (`limit`, `cutoff`).
    pub k: f64,
    /// Strictly decreasing `ε` values (`sweep`).
    pub eps: Vec<f64>,
    pub warm_start: bool,
    /// `|x|` range of the power-law fit (`decay`, `sweep`).
    pub decay_window: [f64; 2],
    /// Second potential for `compare`; the problem potential is the upper one.
    pub lower_potential: String,
    pub lower_potential_params: Vec<f64>,
    pub compare_tol: f64,
    /// Shifts `h` of `continuity`.
    pub shifts: Vec<f64>,
    /// Cubic cartesian box of `reconstruct`.
    pub box_n: usize,
    pub box_half_width: f64,
    pub sampling: SamplingName,
    pub differences: DifferencesName,
    /// Cutoff radii of `cutoff`.
    pub radii: Vec<f64>,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            name: None,
            k: 1.0,
            eps: vec![0.5, 0.25, 0.125],
            warm_start: false,
            decay_window: [8.0, 20.0],
            lower_potential: "constant".into(),
            lower_potential_params: vec![1.0],
            compare_tol: 1e-6,
            shifts: vec![0.2, 0.1, 0.05],
            box_n: 64,
            box_half_width: 4.0,
            sampling: SamplingName::Spline,
            differences: DifferencesName::Second,
            radii: vec![6.0, 10.0, 14.0],
        }
    }
}

impl ExperimentSection {
    pub fn sampling(&self) -> Sampling {
        match self.sampling {
            SamplingName::Bilinear => Sampling::Bilinear,
            SamplingName::Spline => Sampling::Spline,
        }
    }

    pub fn differences(&self) -> Differences {
        match self.differences {
            DifferencesName::Second => Differences::Second,
            DifferencesName::Fourth => Differences::Fourth,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub output_dir: PathBuf,
    /// Also write fields (cylindrical dump, VTK for `reconstruct`).
    pub emit_fields: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl Default for RunSection {
    fn default() -> Self {
        Self { output_dir: PathBuf::from("out"), emit_fields: false, threads: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub problem: ProblemSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub run: RunSection,
}

fn positive(key: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("`{key}` must be positive, got {v}")))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let p = &self.problem;
        positive("problem.epsilon", p.epsilon)?;
        positive("problem.r_max", p.r_max)?;
        positive("problem.s_max", p.s_max)?;
        let s = &self.solver;
        positive("solver.grad_tol", s.grad_tol)?;
        positive("solver.cg_tol", s.cg_tol)?;
        positive("solver.width", s.width)?;
        positive("solver.initial_step", s.initial_step)?;
        let e = &self.experiment;
        positive("experiment.k", e.k)?;
        positive("experiment.compare_tol", e.compare_tol)?;
        positive("experiment.box_half_width", e.box_half_width)?;
        for (i, eps) in e.eps.iter().enumerate() {
            positive(&format!("experiment.eps[{i}]"), *eps)?;
        }
        for (i, r) in e.radii.iter().enumerate() {
            positive(&format!("experiment.radii[{i}]"), *r)?;
        }
        if e.box_n < 8 {
            return Err(CliError::Config(format!("`experiment.box_n` must be at least 8, got {}", e.box_n)));
        }
        if self.run.threads == Some(0) {
            return Err(CliError::Config("`run.threads` must be at least 1".into()));
        }
        self.problem_spec()?;
        self.solver.to_config().validate().map_err(|e| CliError::Config(format!("[solver]: {e}")))?;
        Ok(())
    }

    pub fn geometry(&self) -> Geometry {
        let p = &self.problem;
        Geometry::new(p.r_max, p.s_max, p.n_r, p.n_s)
    }

    pub fn potential(&self) -> Result<Potential, CliError> {
        Potential::builtin(&self.problem.potential, &self.problem.potential_params)
            .map_err(|e| CliError::Config(format!("problem.potential: {e}")))
    }

    pub fn nonlinearity(&self) -> Result<Nonlinearity, CliError> {
        Nonlinearity::builtin(&self.problem.nonlinearity, &self.problem.nonlinearity_params)
            .map_err(|e| CliError::Config(format!("problem.nonlinearity: {e}")))
    }

    pub fn lower_potential(&self) -> Result<Potential, CliError> {
        let e = &self.experiment;
        Potential::builtin(&e.lower_potential, &e.lower_potential_params)
            .map_err(|err| CliError::Config(format!("experiment.lower_potential: {err}")))
    }

    pub fn problem_spec(&self) -> Result<ProblemSpec, CliError> {
        ProblemSpec::new(self.potential()?, self.nonlinearity()?, self.problem.epsilon, self.geometry())
            .map_err(|e| CliError::Config(format!("[problem]: {e}")))
    }
}

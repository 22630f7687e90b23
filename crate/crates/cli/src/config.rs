//! Strict JSON run configuration: one UTF-8 document, unknown keys rejected.

use serde::Deserialize;
use std::path::{Path, PathBuf};

use waveinv_core::carleman::{WeightMode, WeightParams};
use waveinv_core::inverse::ReconConfig;
use waveinv_core::wave::ProblemData;
use waveinv_core::{Grid1D, NodeFn, Result as CoreResult, TimeAxis};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Identities,
    CarlemanSweep,
    StabilitySweep,
    Consistency,
    Reconstruct,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Identities => "identities",
            Experiment::CarlemanSweep => "carleman_sweep",
            Experiment::StabilitySweep => "stability_sweep",
            Experiment::Consistency => "consistency",
            Experiment::Reconstruct => "reconstruct",
        }
    }
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub grids: Vec<usize>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub weight: Option<WeightConfig>,
    #[serde(default)]
    pub solver: Option<SolverConfig>,
    #[serde(default)]
    pub optimizer: Option<OptimizerConfig>,
    #[serde(default)]
    pub identities: Option<IdentitiesConfig>,
    #[serde(default)]
    pub carleman: Option<CarlemanConfig>,
    #[serde(default)]
    pub stability: Option<StabilityConfig>,
    #[serde(default)]
    pub consistency: Option<ConsistencyConfig>,
    #[serde(default)]
    pub reconstruct: Option<ReconstructConfig>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if cfg.grids.is_empty() {
            return Err(CliError::Config("grids must not be empty".into()));
        }
        Ok(cfg)
    }

    pub fn weight(&self) -> CliResult<&WeightConfig> {
        self.weight
            .as_ref()
            .ok_or_else(|| CliError::Config("this experiment needs a `weight` section".into()))
    }

    pub fn solver(&self) -> SolverConfig {
        self.solver.clone().unwrap_or_default()
    }

    pub fn optimizer(&self) -> OptimizerConfig {
        self.optimizer.clone().unwrap_or_default()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub x0: f64,
    pub beta: f64,
    pub lambda: f64,
    pub t_half: f64,
    pub eps: f64,
    pub mode: WeightModeConfig,
    #[serde(default)]
    pub eta: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightModeConfig {
    Carleman,
    Inverse,
}

impl WeightConfig {
    pub fn to_params(&self) -> CoreResult<WeightParams> {
        let mode = match self.mode {
            WeightModeConfig::Carleman => WeightMode::Carleman,
            WeightModeConfig::Inverse => WeightMode::Inverse,
        };
        let params = WeightParams::new(self.x0, self.beta, self.lambda, self.t_half, self.eps, mode)?;
        match self.eta {
            Some(eta) => params.with_eta(eta),
            None => Ok(params),
        }
    }
}

fn default_cfl() -> f64 {
    0.5
}

fn default_t_final() -> f64 {
    1.6
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_t_final")]
    pub t_final: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default)]
    pub n_ref: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            t_final: default_t_final(),
            cfl: default_cfl(),
            n_ref: None,
        }
    }
}

impl SolverConfig {
    pub fn axis(&self, grid: Grid1D) -> CoreResult<TimeAxis> {
        TimeAxis::for_wave(grid, self.t_final, self.cfl)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    pub m: f64,
    pub tych_weight: f64,
    pub max_iter: usize,
    pub step_init: f64,
    pub armijo_c: f64,
    pub armijo_shrink: f64,
    pub max_backtracks: usize,
    pub grad_tol: f64,
    pub filtering_delta: Option<f64>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        let d = ReconConfig::default();
        Self {
            m: d.m,
            tych_weight: d.tych_weight,
            max_iter: d.max_iter,
            step_init: d.step_init,
            armijo_c: d.armijo_c,
            armijo_shrink: d.armijo_shrink,
            max_backtracks: d.max_backtracks,
            grad_tol: d.grad_tol,
            filtering_delta: d.filtering_delta,
        }
    }
}

impl OptimizerConfig {
    pub fn to_recon(&self) -> ReconConfig {
        ReconConfig {
            m: self.m,
            tych_weight: self.tych_weight,
            max_iter: self.max_iter,
            step_init: self.step_init,
            armijo_c: self.armijo_c,
            armijo_shrink: self.armijo_shrink,
            max_backtracks: self.max_backtracks,
            grad_tol: self.grad_tol,
            filtering_delta: self.filtering_delta,
        }
    }
}

fn default_trials() -> usize {
    100
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitiesConfig {
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Test hook: when set, the zero-boundary input of every trial gets this
    /// value written into its boundary slot, so the summation-by-parts rows
    /// must fail and the gate must trip.
    #[serde(default)]
    pub fault_injection: Option<f64>,
}

impl Default for IdentitiesConfig {
    fn default() -> Self {
        Self {
            trials: default_trials(),
            fault_injection: None,
        }
    }
}

fn default_time_cfl() -> f64 {
    0.125
}

fn default_quad_order() -> usize {
    16
}

fn default_kinds() -> Vec<String> {
    vec![
        "low_mode".into(),
        "random_smooth".into(),
        "high_mode".into(),
    ]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarlemanConfig {
    /// Explicit s values; when absent each grid runs at `s = eps/(2h)`.
    #[serde(default)]
    pub s_values: Option<Vec<f64>>,
    #[serde(default = "default_kinds")]
    pub kinds: Vec<String>,
    #[serde(default = "default_time_cfl")]
    pub time_cfl: f64,
    #[serde(default = "default_quad_order")]
    pub quad_order: usize,
    /// Optional bounded potential for the weighted-form variant.
    #[serde(default)]
    pub with_potential: Option<PotentialConfig>,
}

impl Default for CarlemanConfig {
    fn default() -> Self {
        Self {
            s_values: None,
            kinds: default_kinds(),
            time_cfl: default_time_cfl(),
            quad_order: default_quad_order(),
            with_potential: None,
        }
    }
}

/// Analytic profile `offset + amplitude * sin(mode * pi * x)`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PotentialConfig {
    pub offset: f64,
    pub amplitude: f64,
    pub mode: usize,
}

impl Default for PotentialConfig {
    fn default() -> Self {
        Self {
            offset: 0.0,
            amplitude: 0.0,
            mode: 1,
        }
    }
}

impl PotentialConfig {
    pub fn eval(&self, x: f64) -> f64 {
        self.offset + self.amplitude * (self.mode as f64 * std::f64::consts::PI * x).sin()
    }

    pub fn sample(&self, grid: Grid1D) -> NodeFn {
        NodeFn::sample(grid, |x| self.eval(x))
    }
}

/// Smooth analytic data: `y0 = offset + amplitude sin(mode pi x)`, zero
/// initial velocity, constant compatible Dirichlet data, no source.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataConfig {
    pub y0_offset: f64,
    pub y0_amplitude: f64,
    pub y0_mode: usize,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self {
            y0_offset: 2.0,
            y0_amplitude: 1.0,
            y0_mode: 1,
        }
    }
}

impl ProblemData for DataConfig {
    fn y0(&self, x: f64) -> f64 {
        self.y0_offset + self.y0_amplitude * (self.y0_mode as f64 * std::f64::consts::PI * x).sin()
    }

    fn y1(&self, _x: f64) -> f64 {
        0.0
    }
}

fn default_p() -> PotentialConfig {
    PotentialConfig {
        offset: 1.0,
        amplitude: 0.0,
        mode: 1,
    }
}

fn default_q() -> PotentialConfig {
    PotentialConfig {
        offset: 1.0,
        amplitude: 0.1,
        mode: 2,
    }
}

fn default_m() -> f64 {
    5.0
}

fn default_r_floor() -> f64 {
    1.0
}

fn default_source_f() -> PotentialConfig {
    PotentialConfig {
        offset: 0.0,
        amplitude: 1.0,
        mode: 1,
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityConfig {
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default = "default_p")]
    pub p: PotentialConfig,
    #[serde(default = "default_q")]
    pub q: PotentialConfig,
    #[serde(default = "default_m")]
    pub m: f64,
    #[serde(default = "default_r_floor")]
    pub r_floor: f64,
    /// Spatial factor of the standalone source instance.
    #[serde(default = "default_source_f")]
    pub source_f: PotentialConfig,
    #[serde(default)]
    pub source_q: Option<PotentialConfig>,
    /// When set, also evaluate the filtering inequalities and report the
    /// flux-only ratio.
    #[serde(default)]
    pub filtered_delta: Option<f64>,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        Self {
            data: DataConfig::default(),
            p: default_p(),
            q: default_q(),
            m: default_m(),
            r_floor: default_r_floor(),
            source_f: default_source_f(),
            source_q: None,
            filtered_delta: None,
        }
    }
}

fn default_p_consistency() -> PotentialConfig {
    PotentialConfig {
        offset: 1.0,
        amplitude: 0.5,
        mode: 1,
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsistencyConfig {
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default = "default_p_consistency")]
    pub p: PotentialConfig,
    /// Also write the trajectory and observation tables for every grid.
    #[serde(default)]
    pub dump_solution: bool,
}

impl Default for ConsistencyConfig {
    fn default() -> Self {
        Self {
            data: DataConfig::default(),
            p: default_p_consistency(),
            dump_solution: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetMode {
    /// Observation of the true potential on the experiment grid itself.
    SelfTarget,
    /// Fine-grid surrogate of the continuous observation.
    Reference,
}

fn default_q_init() -> PotentialConfig {
    PotentialConfig {
        offset: 1.0,
        amplitude: 0.0,
        mode: 1,
    }
}

fn default_target() -> TargetMode {
    TargetMode::SelfTarget
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructConfig {
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default = "default_p_consistency")]
    pub q_true: PotentialConfig,
    #[serde(default = "default_q_init")]
    pub q_init: PotentialConfig,
    #[serde(default = "default_target")]
    pub target: TargetMode,
    /// Standard deviation of seeded Gaussian noise added to the target flux.
    #[serde(default)]
    pub noise: Option<f64>,
}

impl Default for ReconstructConfig {
    fn default() -> Self {
        Self {
            data: DataConfig::default(),
            q_true: default_p_consistency(),
            q_init: default_q_init(),
            target: default_target(),
            noise: None,
        }
    }
}

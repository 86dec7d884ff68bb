//! JSON run configuration.

use std::sync::Arc;

use fracstep_core::{
    Backend, Coefficient, OperatorSpec, OrderSchedule, ProblemSpec, QuadratureConfig, SeparableSource, SpatialProfile,
    TimeProfile,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub type SourcePart = (SpatialProfile<f64>, TimeProfile<f64>);

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<ProblemConfig>,
    #[serde(default)]
    pub run: RunParams,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(default = "one")]
    pub length: f64,
    #[serde(default = "unit_coefficient")]
    pub diffusivity: CoefficientConfig,
    #[serde(default = "zero_coefficient")]
    pub reaction: CoefficientConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ellipticity_floor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reaction_floor: Option<f64>,
    #[serde(default)]
    pub backend: BackendConfig,
    pub schedule: ScheduleConfig,
    pub initial: ProfileConfig,
    #[serde(default)]
    pub source: Vec<SourceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regularity: Option<Vec<f64>>,
    pub modes: usize,
    #[serde(default = "default_spatial_points")]
    pub spatial_points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureSettings>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefficientConfig {
    Constant(f64),
    Sampled(Vec<f64>),
}

impl CoefficientConfig {
    fn min(&self) -> f64 {
        match self {
            CoefficientConfig::Constant(v) => *v,
            CoefficientConfig::Sampled(v) => v.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    fn build(&self) -> Coefficient<f64> {
        match self {
            CoefficientConfig::Constant(v) => Coefficient::Constant(*v),
            CoefficientConfig::Sampled(v) => Coefficient::Sampled(v.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendConfig {
    #[default]
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub breakpoints: Vec<f64>,
    pub orders: Vec<f64>,
}

/// `{"modes": [...]}`, `{"sine": [...]}` or `{"samples": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileConfig {
    Modes(Vec<f64>),
    Sine(Vec<f64>),
    Samples(Vec<f64>),
}

impl ProfileConfig {
    fn build(&self) -> SpatialProfile<f64> {
        match self {
            ProfileConfig::Modes(v) => SpatialProfile::Modes(v.clone()),
            ProfileConfig::Sine(v) => SpatialProfile::Sine(v.clone()),
            ProfileConfig::Samples(v) => SpatialProfile::Samples(v.clone()),
        }
    }
}

/// One separable term `g(x) sum_i c_i t^{p_i}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub spatial: ProfileConfig,
    /// `[coefficient, power]` pairs.
    pub time: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSettings {
    pub cells: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grading: Option<f64>,
    pub history_nodes: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunParams {
    /// Output times; uniform samples on `[0, T]` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    #[serde(default = "default_time_samples")]
    pub time_samples: usize,
    /// Uniform output points on `[0, L]`, endpoints included.
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default)]
    pub oracle_full: bool,
    #[serde(default = "default_oracle_points")]
    pub oracle_spatial_points: usize,
    #[serde(default = "default_compare_taus")]
    pub compare_taus: Vec<f64>,
    /// Comparison times are `k T / compare_samples`.
    #[serde(default = "default_compare_samples")]
    pub compare_samples: usize,
    #[serde(default = "default_probes")]
    pub verify_nx: usize,
    #[serde(default = "default_probes")]
    pub verify_nt: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ml_input: Option<String>,
}

impl Default for RunParams {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default = "name_solution")]
    pub solution: String,
    #[serde(default = "name_modes")]
    pub modes: String,
    #[serde(default = "name_meta")]
    pub meta: String,
    #[serde(default = "name_oracle")]
    pub oracle: String,
    #[serde(default = "name_compare")]
    pub compare: String,
    #[serde(default = "name_report")]
    pub report: String,
    #[serde(default = "name_rate_fits")]
    pub rate_fits: String,
    #[serde(default = "name_ml")]
    pub ml: String,
}

impl Default for Outputs {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

fn one() -> f64 {
    1.0
}
fn unit_coefficient() -> CoefficientConfig {
    CoefficientConfig::Constant(1.0)
}
fn zero_coefficient() -> CoefficientConfig {
    CoefficientConfig::Constant(0.0)
}
fn default_spatial_points() -> usize {
    256
}
fn default_time_samples() -> usize {
    100
}
fn default_points() -> usize {
    65
}
fn default_tau() -> f64 {
    2f64.powi(-10)
}
fn default_oracle_points() -> usize {
    127
}
fn default_compare_taus() -> Vec<f64> {
    (8..=14).map(|k| 2f64.powi(-k)).collect()
}
fn default_compare_samples() -> usize {
    32
}
fn default_probes() -> usize {
    10
}
fn name_solution() -> String {
    "solution.csv".into()
}
fn name_modes() -> String {
    "modes.csv".into()
}
fn name_meta() -> String {
    "meta.json".into()
}
fn name_oracle() -> String {
    "oracle.csv".into()
}
fn name_compare() -> String {
    "compare.csv".into()
}
fn name_report() -> String {
    "report.json".into()
}
fn name_rate_fits() -> String {
    "rate_fits.csv".into()
}
fn name_ml() -> String {
    "ml.csv".into()
}

pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
}

impl RunConfig {
    pub fn problem(&self) -> Result<&ProblemConfig, CliError> {
        self.problem
            .as_ref()
            .ok_or_else(|| CliError::Config("this subcommand needs a `problem` section".into()))
    }
}

impl ProblemConfig {
    pub fn schedule(&self) -> Result<OrderSchedule<f64>, CliError> {
        Ok(OrderSchedule::new(
            self.schedule.breakpoints.clone(),
            self.schedule.orders.clone(),
        )?)
    }

    pub fn operator(&self) -> Result<OperatorSpec<f64>, CliError> {
        let floor_a = self.ellipticity_floor.unwrap_or_else(|| self.diffusivity.min());
        let floor_c = self.reaction_floor.unwrap_or_else(|| (-self.reaction.min()).max(0.0));
        Ok(OperatorSpec::new(
            self.length,
            self.diffusivity.build(),
            self.reaction.build(),
            floor_a,
            floor_c,
        )?)
    }

    pub fn source_terms(&self) -> Result<Vec<SourcePart>, CliError> {
        self.source
            .iter()
            .map(|s| {
                let h = TimeProfile::new(s.time.iter().map(|p| (p[0], p[1])).collect())?;
                Ok((s.spatial.build(), h))
            })
            .collect()
    }

    pub fn build(&self) -> Result<ProblemSpec<f64>, CliError> {
        let schedule = self.schedule()?;
        let regularity = self
            .regularity
            .clone()
            .unwrap_or_else(|| ProblemSpec::default_regularity(&schedule));
        let backend = match self.backend {
            BackendConfig::Analytic => Backend::Analytic,
            BackendConfig::FiniteDifference => Backend::FiniteDifference,
        };
        let source = SeparableSource::new(self.source_terms()?);
        let mut spec = ProblemSpec::new(
            self.operator()?,
            backend,
            schedule,
            self.initial.build(),
            Arc::new(source),
            regularity,
            self.modes,
            self.spatial_points,
        )?;
        if let Some(q) = &self.quadrature {
            spec = spec.with_quadrature(QuadratureConfig {
                cells: q.cells,
                grading: q.grading,
                history_nodes: q.history_nodes,
            });
        }
        Ok(spec)
    }
}

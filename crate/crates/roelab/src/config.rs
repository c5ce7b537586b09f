//! Experiment configuration, read from TOML. Unknown keys are rejected and
//! every default is written back into the report header.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::formats::{FamilySpec, SpaceSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    LocalizationSweep,
    GhostAudit,
    IdealMembership,
    LimitOperator,
    #[serde(rename = "wan07-pipeline")]
    ColumnPipeline,
    ResistancePipeline,
    WitnessCheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::LocalizationSweep => "localization-sweep",
            ExperimentKind::GhostAudit => "ghost-audit",
            ExperimentKind::IdealMembership => "ideal-membership",
            ExperimentKind::LimitOperator => "limit-operator",
            ExperimentKind::ColumnPipeline => "wan07-pipeline",
            ExperimentKind::ResistancePipeline => "resistance-pipeline",
            ExperimentKind::WitnessCheck => "witness-check",
        }
    }

    /// Section holding the parameters of this kind.
    pub fn section(self) -> &'static str {
        match self {
            ExperimentKind::LocalizationSweep => "localization",
            ExperimentKind::GhostAudit => "ghost",
            ExperimentKind::IdealMembership => "membership",
            ExperimentKind::LimitOperator => "limit",
            ExperimentKind::ColumnPipeline => "columns",
            ExperimentKind::ResistancePipeline => "resistance",
            ExperimentKind::WitnessCheck => "witness",
        }
    }

    fn needs_space(self) -> bool {
        !matches!(
            self,
            ExperimentKind::ColumnPipeline | ExperimentKind::ResistancePipeline
        )
    }

    fn needs_operator(self) -> bool {
        matches!(
            self,
            ExperimentKind::LocalizationSweep
                | ExperimentKind::GhostAudit
                | ExperimentKind::LimitOperator
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
}

/// Operators built on the configured space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OperatorSpec {
    Identity,
    /// Nearest-neighbour adjacency.
    Adjacency,
    /// `e_x ↦ e_{x+by}` on a line, dropping what leaves the window.
    Shift {
        by: i64,
    },
    /// `Σ a_k V^k` on a line, as `[offset, coefficient]` pairs.
    Laurent {
        coefficients: Vec<(i64, f64)>,
    },
    /// Averaging over each connected component.
    ConstantProjection,
    File {
        path: String,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RestrictionSpec {
    #[default]
    Columns,
    TwoSided,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocalizationReference {
    #[default]
    None,
    /// `cos(π/(S+2))`.
    PathCosine,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalizationParams {
    #[serde(default = "LocalizationParams::s_min")]
    pub s_min: usize,
    #[serde(default = "LocalizationParams::s_max")]
    pub s_max: usize,
    #[serde(default)]
    pub restriction: RestrictionSpec,
    /// Keep window centres at least `S` from a grid boundary.
    #[serde(default = "yes")]
    pub margin: bool,
    #[serde(default)]
    pub reference: LocalizationReference,
    #[serde(default = "LocalizationParams::tolerance")]
    pub tolerance: f64,
}

impl LocalizationParams {
    fn s_min() -> usize {
        2
    }
    fn s_max() -> usize {
        50
    }
    fn tolerance() -> f64 {
        1e-6
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GhostParams {
    /// Balls around the basepoint forming the exhaustion; doubling radii
    /// below the diameter when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    /// Asserted lower bound on every profile value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_profile: Option<f64>,
    /// Asserted upper bound on the last profile value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_tail: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MembershipParams {
    #[serde(default)]
    pub family: FamilySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_cap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_grid: Option<Vec<f64>>,
    /// Sets tested for membership directly.
    #[serde(default)]
    pub sets: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_members: Option<Vec<bool>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_ghostly: Option<bool>,
    /// Also bound the distance to the geometric ideal, stopping at this ε.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_eps: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitParams {
    /// `squares`, `powers:b` or `affine:a,b`, ignored when `points` is set.
    #[serde(default = "LimitParams::sequence")]
    pub sequence: String,
    /// Integer positions on the line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<i64>>,
    #[serde(default = "LimitParams::radius")]
    pub radius: usize,
    /// Number of final terms used; all terms when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<usize>,
    #[serde(default = "LimitParams::tol")]
    pub tol: f64,
    #[serde(default = "LimitParams::eps")]
    pub eps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_converged: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_vanishes: Option<bool>,
}

impl LimitParams {
    fn sequence() -> String {
        "powers:2".to_string()
    }
    fn radius() -> usize {
        roelab_core::limitop::DEFAULT_RADIUS
    }
    fn tol() -> f64 {
        roelab_core::limitop::DEFAULT_TOL
    }
    fn eps() -> f64 {
        2f64.powi(-12)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnParams {
    #[serde(default = "ColumnParams::sizes")]
    pub sizes: Vec<usize>,
    #[serde(default = "three")]
    pub degree: usize,
    #[serde(default = "ColumnParams::lambda_max")]
    pub lambda_max: f64,
    #[serde(default = "ColumnParams::seed")]
    pub seed: u64,
    #[serde(default = "ColumnParams::retries")]
    pub retries: usize,
    /// Copies of each graph.
    #[serde(default = "ColumnParams::copies")]
    pub copies: usize,
    /// `f(s) = slope · s`.
    #[serde(default = "ColumnParams::slope")]
    pub slope: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_cap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_grid: Option<Vec<f64>>,
    #[serde(default = "LimitParams::eps")]
    pub eps: f64,
    #[serde(default = "ColumnParams::min_profile")]
    pub min_profile: f64,
}

fn three() -> usize {
    3
}

impl ColumnParams {
    fn sizes() -> Vec<usize> {
        vec![10, 20, 40]
    }
    fn lambda_max() -> f64 {
        2.99
    }
    fn seed() -> u64 {
        11
    }
    fn retries() -> usize {
        50
    }
    fn copies() -> usize {
        5
    }
    fn slope() -> f64 {
        10.0
    }
    fn min_profile() -> f64 {
        0.1
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResistanceParams {
    #[serde(default = "ResistanceParams::sizes")]
    pub sizes: Vec<usize>,
    #[serde(default = "three")]
    pub degree: usize,
    #[serde(default = "ResistanceParams::lambda_max")]
    pub lambda_max: f64,
    #[serde(default = "ResistanceParams::seed")]
    pub seed: u64,
    #[serde(default = "ResistanceParams::retries")]
    pub retries: usize,
    #[serde(default = "ResistanceParams::kappa")]
    pub kappa: f64,
    #[serde(default = "ResistanceParams::scales")]
    pub scales: Vec<f64>,
    #[serde(default = "ResistanceParams::delta")]
    pub delta: f64,
    #[serde(default = "ResistanceParams::separation")]
    pub separation: f64,
    #[serde(default = "ResistanceParams::k_cap")]
    pub k_cap: f64,
    #[serde(default = "ResistanceParams::min_norm")]
    pub min_norm: f64,
    #[serde(default = "ResistanceParams::min_block_bound")]
    pub min_block_bound: f64,
}

impl ResistanceParams {
    fn sizes() -> Vec<usize> {
        vec![250, 500, 1000]
    }
    fn lambda_max() -> f64 {
        2.9
    }
    fn seed() -> u64 {
        7
    }
    fn retries() -> usize {
        roelab_core::expander::DEFAULT_RETRIES
    }
    fn kappa() -> f64 {
        0.3
    }
    fn scales() -> Vec<f64> {
        vec![2.0, 3.0, 4.0]
    }
    fn delta() -> f64 {
        0.05
    }
    fn separation() -> f64 {
        100.0
    }
    fn k_cap() -> f64 {
        50.0
    }
    fn min_norm() -> f64 {
        0.95
    }
    fn min_block_bound() -> f64 {
        0.9
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessReference {
    #[default]
    None,
    /// `2R/(2S+1)` for averaging on a line.
    LineAverage,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessParams {
    #[serde(default = "one")]
    pub s_min: usize,
    #[serde(default = "WitnessParams::s_max")]
    pub s_max: usize,
    /// Variation radius.
    #[serde(default = "one")]
    pub r: usize,
    #[serde(default)]
    pub reference: WitnessReference,
    #[serde(default = "WitnessParams::tolerance")]
    pub tolerance: f64,
    /// Check positive type on the whole space.
    #[serde(default = "yes")]
    pub kernel: bool,
}

fn one() -> usize {
    1
}

impl WitnessParams {
    fn s_max() -> usize {
        20
    }
    fn tolerance() -> f64 {
        1e-12
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Worker threads; all available cores when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    /// Exit nonzero when an assertion fails.
    #[serde(default)]
    pub audit: bool,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<OperatorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub localization: Option<LocalizationParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ghost: Option<GhostParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub membership: Option<MembershipParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<LimitParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub columns: Option<ColumnParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resistance: Option<ResistanceParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessParams>,
}

/// Deserializes a value whose fields all have defaults from an empty table.
fn defaults<T: serde::de::DeserializeOwned>() -> T {
    toml::from_str("").expect("every field has a default")
}

impl ExperimentConfig {
    /// Parses and validates; errors name the offending key.
    pub fn from_toml(text: &str) -> Result<Self> {
        let de = toml::Deserializer::new(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." {
                "<root>".to_string()
            } else {
                path
            };
            LabError::config(path, e.into_inner().message().trim().to_string())
        })?;
        cfg.materialize()
    }

    /// Fills the section of the chosen kind with defaults and rejects the
    /// sections of other kinds.
    pub fn materialize(mut self) -> Result<Self> {
        let kind = self.kind;
        let present = [
            ("localization", self.localization.is_some()),
            ("ghost", self.ghost.is_some()),
            ("membership", self.membership.is_some()),
            ("limit", self.limit.is_some()),
            ("columns", self.columns.is_some()),
            ("resistance", self.resistance.is_some()),
            ("witness", self.witness.is_some()),
        ];
        for (name, set) in present {
            if set && name != kind.section() {
                return Err(LabError::config(
                    name,
                    format!("section does not apply to a {} experiment", kind.name()),
                ));
            }
        }
        match kind {
            ExperimentKind::LocalizationSweep => {
                let p = self.localization.get_or_insert_with(defaults);
                if p.s_min > p.s_max {
                    return Err(LabError::config("localization.s_min", "exceeds s_max"));
                }
            }
            ExperimentKind::GhostAudit => {
                self.ghost.get_or_insert(GhostParams {
                    radii: None,
                    min_profile: None,
                    max_tail: None,
                });
            }
            ExperimentKind::IdealMembership => {
                let p = self.membership.get_or_insert_with(defaults);
                if let Some(e) = &p.expect_members {
                    if e.len() != p.sets.len() {
                        return Err(LabError::config(
                            "membership.expect_members",
                            format!("{} expectations for {} sets", e.len(), p.sets.len()),
                        ));
                    }
                }
                if p.expect_ghostly.is_some() && self.operator.is_none() {
                    return Err(LabError::config(
                        "operator",
                        "expect_ghostly needs an operator",
                    ));
                }
            }
            ExperimentKind::LimitOperator => {
                self.limit.get_or_insert_with(defaults);
            }
            ExperimentKind::ColumnPipeline => {
                self.columns.get_or_insert_with(defaults);
            }
            ExperimentKind::ResistancePipeline => {
                self.resistance.get_or_insert_with(defaults);
            }
            ExperimentKind::WitnessCheck => {
                let p = self.witness.get_or_insert_with(defaults);
                if p.s_min > p.s_max {
                    return Err(LabError::config("witness.s_min", "exceeds s_max"));
                }
            }
        }
        if kind.needs_space() && self.space.is_none() {
            return Err(LabError::config(
                "space",
                "missing, required by this experiment",
            ));
        }
        if kind.needs_operator() && self.operator.is_none() {
            return Err(LabError::config(
                "operator",
                "missing, required by this experiment",
            ));
        }
        if !kind.needs_space() && (self.space.is_some() || self.operator.is_some()) {
            return Err(LabError::config(
                if self.space.is_some() {
                    "space"
                } else {
                    "operator"
                },
                "this experiment builds its own space",
            ));
        }
        if self.workers == Some(0) {
            return Err(LabError::config("workers", "must be positive"));
        }
        Ok(self)
    }
}

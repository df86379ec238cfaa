//! Experiment configuration: strict JSON with defaults.
//!
//! File units: positions in meters, frequencies in Hz, gains in dBi, powers
//! in dBm, angles in degrees. Everything is converted to SI/radians at the
//! module boundary. Unknown keys, duplicate keys, and wrong types are
//! rejected with the offending JSON path in the message.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Config loading errors. `Parse` covers syntax/shape (serde), `Invalid`
/// covers semantic validation; both carry a path-qualified message.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid config at {path}: {message}")]
    Invalid { path: String, message: String },
}

impl ConfigError {
    pub(crate) fn invalid(path: &str, message: impl Into<String>) -> Self {
        ConfigError::Invalid {
            path: path.to_string(),
            message: message.into(),
        }
    }
}

/// Experiment kind; doubles as the CLI subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Pathloss,
    SweepEllipse,
    PhaseGain,
    Acf,
    Hardening,
    Estimate,
    Metrics,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Pathloss => "pathloss",
            ExperimentKind::SweepEllipse => "sweep-ellipse",
            ExperimentKind::PhaseGain => "phase-gain",
            ExperimentKind::Acf => "acf",
            ExperimentKind::Hardening => "hardening",
            ExperimentKind::Estimate => "estimate",
            ExperimentKind::Metrics => "metrics",
        }
    }
}

/// Output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

// ---------------------------------------------------------------------------
// Blocks
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AntennaConfig {
    pub position_m: [f64; 3],
    #[serde(default)]
    pub gain_dbi: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PoseConfig {
    pub center_m: [f64; 3],
    pub normal: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub frequency_hz: f64,
    pub tx: AntennaConfig,
    pub rx: AntennaConfig,
    pub ris: PoseConfig,
}

fn default_amplitude() -> f64 {
    1.0
}
fn default_efficiency() -> f64 {
    1.0
}
fn default_pattern_exponent() -> f64 {
    3.0
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PanelConfig {
    pub m: usize,
    pub n: usize,
    pub dx_m: f64,
    pub dy_m: f64,
    /// Cosine-power exponent q of the element pattern.
    #[serde(default = "default_pattern_exponent")]
    pub pattern_exponent: f64,
    /// Element gain in dBi; defaults to `2 (q + 1)` linear when omitted.
    #[serde(default)]
    pub element_gain_dbi: Option<f64>,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default = "default_efficiency")]
    pub efficiency: f64,
    /// Omitted means continuously tunable phases.
    #[serde(default)]
    pub quantization_bits: Option<u8>,
    #[serde(default)]
    pub profile: Option<ProfileConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileConfig {
    Uniform {
        #[serde(default)]
        value_deg: f64,
    },
    FarFieldBeam {
        theta_deg: f64,
        phi_deg: f64,
    },
    /// Co-phase toward the scene's Rx.
    NearFieldFocus {},
    Random {
        seed: u64,
    },
    Custom {
        values_deg: Vec<f64>,
    },
}

impl ProfileConfig {
    pub fn label(&self) -> &'static str {
        match self {
            ProfileConfig::Uniform { .. } => "uniform",
            ProfileConfig::FarFieldBeam { .. } => "far-field-beam",
            ProfileConfig::NearFieldFocus {} => "near-field-focus",
            ProfileConfig::Random { .. } => "random",
            ProfileConfig::Custom { .. } => "custom",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelConfig {
    /// Free-space loss over the unfolded d1 + d2.
    FreeSpace,
    TwoRayRis {
        q_elements: usize,
    },
    PoFarField {
        a_m: f64,
        b_m: f64,
        desired_reflection_deg: f64,
    },
    TangGeneral,
    TangFarBf,
    TangNearBf,
    TangNearBc,
    RefinedFar,
    RefinedNear,
    SingleElement {
        n: usize,
        m: usize,
        gamma_amplitude: f64,
        gamma_phase_deg: f64,
    },
    Ellingson,
    TileRcs {
        g_magnitude: f64,
        g_phase_deg: f64,
    },
}

impl ModelConfig {
    pub fn needs_panel(&self) -> bool {
        !matches!(
            self,
            ModelConfig::FreeSpace
                | ModelConfig::TwoRayRis { .. }
                | ModelConfig::PoFarField { .. }
                | ModelConfig::TileRcs { .. }
        )
    }

    pub fn label(&self) -> &'static str {
        match self {
            ModelConfig::FreeSpace => "free_space",
            ModelConfig::TwoRayRis { .. } => "two_ray_ris",
            ModelConfig::PoFarField { .. } => "po_far_field",
            ModelConfig::TangGeneral => "tang_general",
            ModelConfig::TangFarBf => "tang_far_bf",
            ModelConfig::TangNearBf => "tang_near_bf",
            ModelConfig::TangNearBc => "tang_near_bc",
            ModelConfig::RefinedFar => "refined_far",
            ModelConfig::RefinedNear => "refined_near",
            ModelConfig::SingleElement { .. } => "single_element",
            ModelConfig::Ellingson => "ellingson",
            ModelConfig::TileRcs { .. } => "tile_rcs",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub frequency_hz: f64,
    pub d_tr_m: f64,
    pub semi_major_m: f64,
    pub d1_start_m: f64,
    pub d1_end_m: f64,
    pub steps: usize,
    #[serde(default)]
    pub tx_gain_dbi: f64,
    #[serde(default)]
    pub rx_gain_dbi: f64,
    /// Fixed panel orientation over the whole sweep; defaults to facing the
    /// Tx–Rx chord from the ellipse side the panel moves on.
    #[serde(default = "default_sweep_normal")]
    pub panel_normal: [f64; 3],
}

fn default_sweep_normal() -> [f64; 3] {
    [0.0, -1.0, 0.0]
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LosConfig {
    pub power: f64,
    #[serde(default)]
    pub aoa_deg: f64,
    #[serde(default)]
    pub ris_relayed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RingConfig {
    pub count: usize,
    pub total_power: f64,
    #[serde(default)]
    pub ris_flagged: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RayConfig {
    pub power: f64,
    pub aoa_deg: f64,
    #[serde(default)]
    pub delay_s: Option<f64>,
    #[serde(default)]
    pub ris_relayed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RisBaselineConfig {
    /// Surface present with a static random configuration.
    #[default]
    StaticPhase,
    /// No surface at all.
    Absent,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub carrier_hz: f64,
    pub speed_mps: f64,
    #[serde(default)]
    pub heading_deg: f64,
    #[serde(default)]
    pub los: Option<LosConfig>,
    #[serde(default)]
    pub ring: Option<RingConfig>,
    #[serde(default)]
    pub rays: Vec<RayConfig>,
    pub snapshots: usize,
    pub runs: usize,
    /// Defaults to the anti-alias bound `1 / (8 f_d)`.
    #[serde(default)]
    pub sample_interval_s: Option<f64>,
    #[serde(default)]
    pub ris_baseline: RisBaselineConfig,
    /// Lags to report (ACF experiment); defaults to a quarter of the series.
    #[serde(default)]
    pub max_lag: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseModeConfig {
    CoPhased,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LinkModelConfig {
    #[default]
    Rayleigh,
    Unit,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct HardeningConfig {
    pub q_values: Vec<usize>,
    pub runs: usize,
    pub phase_mode: PhaseModeConfig,
    #[serde(default)]
    pub link_model: LinkModelConfig,
}

fn default_subcarriers() -> usize {
    64
}
fn default_subcarrier_spacing() -> f64 {
    1e6
}
fn default_snapshots() -> usize {
    16
}
fn default_snapshot_interval() -> f64 {
    1e-3
}
fn default_array_elements() -> usize {
    8
}
fn default_pitch_wl() -> f64 {
    0.5
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SoundingGridConfig {
    #[serde(default = "default_subcarriers")]
    pub subcarriers: usize,
    #[serde(default = "default_subcarrier_spacing")]
    pub subcarrier_spacing_hz: f64,
    #[serde(default = "default_snapshots")]
    pub snapshots: usize,
    #[serde(default = "default_snapshot_interval")]
    pub snapshot_interval_s: f64,
    #[serde(default = "default_array_elements")]
    pub rx_elements: usize,
    #[serde(default = "default_array_elements")]
    pub tx_elements: usize,
    #[serde(default = "default_pitch_wl")]
    pub rx_pitch_wl: f64,
    #[serde(default = "default_pitch_wl")]
    pub tx_pitch_wl: f64,
}

impl Default for SoundingGridConfig {
    fn default() -> Self {
        Self {
            subcarriers: default_subcarriers(),
            subcarrier_spacing_hz: default_subcarrier_spacing(),
            snapshots: default_snapshots(),
            snapshot_interval_s: default_snapshot_interval(),
            rx_elements: default_array_elements(),
            tx_elements: default_array_elements(),
            rx_pitch_wl: default_pitch_wl(),
            tx_pitch_wl: default_pitch_wl(),
        }
    }
}

fn default_delay_points() -> usize {
    128
}
fn default_angle_points() -> usize {
    181
}
fn default_doppler_points() -> usize {
    61
}
fn default_ris_angle_points() -> usize {
    61
}
fn default_epsilon() -> f64 {
    0.05
}
fn default_max_iterations() -> usize {
    20
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EstimatorGridConfig {
    #[serde(default = "default_delay_points")]
    pub delay_points: usize,
    #[serde(default = "default_angle_points")]
    pub angle_points: usize,
    #[serde(default = "default_doppler_points")]
    pub doppler_points: usize,
    #[serde(default = "default_ris_angle_points")]
    pub ris_angle_points: usize,
    #[serde(default = "default_epsilon")]
    pub classify_epsilon: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
}

impl Default for EstimatorGridConfig {
    fn default() -> Self {
        Self {
            delay_points: default_delay_points(),
            angle_points: default_angle_points(),
            doppler_points: default_doppler_points(),
            ris_angle_points: default_ris_angle_points(),
            classify_epsilon: default_epsilon(),
            max_iterations: default_max_iterations(),
        }
    }
}

fn default_mode_panel_side() -> usize {
    16
}
fn default_mode_pitch_wl() -> f64 {
    0.25
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModePanelConfig {
    #[serde(default = "default_mode_panel_side")]
    pub m: usize,
    #[serde(default = "default_mode_panel_side")]
    pub n: usize,
    #[serde(default = "default_mode_pitch_wl")]
    pub pitch_wl: f64,
}

impl Default for ModePanelConfig {
    fn default() -> Self {
        Self {
            m: default_mode_panel_side(),
            n: default_mode_panel_side(),
            pitch_wl: default_mode_pitch_wl(),
        }
    }
}

fn default_truth_paths() -> usize {
    2
}
fn default_truth_ris_paths() -> usize {
    1
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TruthConfig {
    #[serde(default = "default_truth_paths")]
    pub paths: usize,
    #[serde(default = "default_truth_ris_paths")]
    pub ris_paths: usize,
}

impl Default for TruthConfig {
    fn default() -> Self {
        Self {
            paths: default_truth_paths(),
            ris_paths: default_truth_ris_paths(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EstimateConfig {
    pub snr_db: Vec<f64>,
    /// Mode counts K to sweep.
    pub modes: Vec<usize>,
    pub trials: usize,
    #[serde(default)]
    pub grid: SoundingGridConfig,
    #[serde(default)]
    pub estimator: EstimatorGridConfig,
    #[serde(default)]
    pub mode_panel: ModePanelConfig,
    #[serde(default)]
    pub truth: TruthConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TapConfig {
    pub delay_s: f64,
    pub power: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DyadConfig {
    pub aoa_deg: f64,
    pub aod_deg: f64,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MatrixConfig {
    pub rx_elements: usize,
    pub tx_elements: usize,
    pub direct: DyadConfig,
    #[serde(default)]
    pub ris: Option<DyadConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MetricsConfig {
    pub taps: Vec<TapConfig>,
    pub matrix: MatrixConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub path: Option<String>,
    #[serde(default)]
    pub format: Option<OutputFormat>,
}

// ---------------------------------------------------------------------------
// Top level
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tx_power_dbm: f64,
    #[serde(default)]
    pub scene: Option<SceneConfig>,
    #[serde(default)]
    pub panel: Option<PanelConfig>,
    #[serde(default)]
    pub models: Vec<ModelConfig>,
    #[serde(default)]
    pub profiles: Vec<ProfileConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub scenario: Option<ScenarioConfig>,
    #[serde(default)]
    pub hardening: Option<HardeningConfig>,
    #[serde(default)]
    pub estimate: Option<EstimateConfig>,
    #[serde(default)]
    pub metrics: Option<MetricsConfig>,
    #[serde(default)]
    pub output: Option<OutputConfig>,
}

/// Parse and validate a UTF-8 JSON config.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut deserializer = serde_json::Deserializer::from_str(text);
    let config: ExperimentConfig =
        serde_path_to_error::deserialize(&mut deserializer).map_err(|e| ConfigError::Parse {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
    deserializer.end().map_err(|e| ConfigError::Parse {
        path: ".".to_string(),
        message: format!("trailing content: {e}"),
    })?;
    config.validate()?;
    Ok(config)
}

impl ExperimentConfig {
    /// Kind-specific presence and range checks with path-qualified messages.
    pub fn validate(&self) -> Result<(), ConfigError> {
        match self.kind {
            ExperimentKind::Pathloss => {
                let scene = self.require(self.scene.as_ref(), "scene")?;
                scene.validate("scene")?;
                if self.models.is_empty() {
                    return Err(ConfigError::invalid(
                        "models",
                        "at least one model required",
                    ));
                }
                if self.models.iter().any(ModelConfig::needs_panel) {
                    let panel = self.require(self.panel.as_ref(), "panel")?;
                    panel.validate("panel")?;
                }
            }
            ExperimentKind::SweepEllipse => {
                let sweep = self.require(self.sweep.as_ref(), "sweep")?;
                sweep.validate("sweep")?;
                if self.models.is_empty() {
                    return Err(ConfigError::invalid(
                        "models",
                        "at least one model required",
                    ));
                }
                if self.models.iter().any(ModelConfig::needs_panel) {
                    let panel = self.require(self.panel.as_ref(), "panel")?;
                    panel.validate("panel")?;
                }
            }
            ExperimentKind::PhaseGain => {
                let scene = self.require(self.scene.as_ref(), "scene")?;
                scene.validate("scene")?;
                let panel = self.require(self.panel.as_ref(), "panel")?;
                panel.validate("panel")?;
                if self.profiles.is_empty() {
                    return Err(ConfigError::invalid(
                        "profiles",
                        "at least one profile required",
                    ));
                }
            }
            ExperimentKind::Acf => {
                let scenario = self.require(self.scenario.as_ref(), "scenario")?;
                scenario.validate("scenario")?;
            }
            ExperimentKind::Hardening => {
                let h = self.require(self.hardening.as_ref(), "hardening")?;
                if h.q_values.is_empty() {
                    return Err(ConfigError::invalid(
                        "hardening.q_values",
                        "must be non-empty",
                    ));
                }
                if h.runs < 100 {
                    return Err(ConfigError::invalid(
                        "hardening.runs",
                        "needs at least 100 runs",
                    ));
                }
            }
            ExperimentKind::Estimate => {
                let e = self.require(self.estimate.as_ref(), "estimate")?;
                e.validate("estimate")?;
            }
            ExperimentKind::Metrics => {
                let scenario = self.require(self.scenario.as_ref(), "scenario")?;
                scenario.validate("scenario")?;
                let m = self.require(self.metrics.as_ref(), "metrics")?;
                m.validate("metrics")?;
            }
        }
        Ok(())
    }

    fn require<'a, T>(&self, field: Option<&'a T>, name: &str) -> Result<&'a T, ConfigError> {
        field.ok_or_else(|| {
            ConfigError::invalid(name, format!("required for kind \"{}\"", self.kind.name()))
        })
    }
}

impl SceneConfig {
    fn validate(&self, path: &str) -> Result<(), ConfigError> {
        if self.frequency_hz <= 0.0 || self.frequency_hz.is_nan() {
            return Err(ConfigError::invalid(
                &format!("{path}.frequency_hz"),
                "must be positive",
            ));
        }
        Ok(())
    }
}

impl PanelConfig {
    fn validate(&self, path: &str) -> Result<(), ConfigError> {
        if self.m == 0 || self.n == 0 {
            return Err(ConfigError::invalid(
                &format!("{path}.m"),
                "element counts must be >= 1",
            ));
        }
        if !(self.dx_m > 0.0 && self.dy_m > 0.0) {
            return Err(ConfigError::invalid(
                &format!("{path}.dx_m"),
                "pitch must be positive",
            ));
        }
        if !(0.0..=1.0).contains(&self.amplitude) {
            return Err(ConfigError::invalid(
                &format!("{path}.amplitude"),
                "must lie in [0, 1]",
            ));
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(ConfigError::invalid(
                &format!("{path}.efficiency"),
                "must lie in (0, 1]",
            ));
        }
        if let Some(bits) = self.quantization_bits {
            if bits == 0 {
                return Err(ConfigError::invalid(
                    &format!("{path}.quantization_bits"),
                    "needs at least 1 bit (omit for continuous)",
                ));
            }
        }
        if let Some(ProfileConfig::Custom { values_deg }) = &self.profile {
            if values_deg.len() != self.m * self.n {
                return Err(ConfigError::invalid(
                    &format!("{path}.profile.values_deg"),
                    format!(
                        "{} values for a {} x {} grid",
                        values_deg.len(),
                        self.m,
                        self.n
                    ),
                ));
            }
        }
        Ok(())
    }
}

impl SweepConfig {
    fn validate(&self, path: &str) -> Result<(), ConfigError> {
        if self.frequency_hz <= 0.0 || self.frequency_hz.is_nan() {
            return Err(ConfigError::invalid(
                &format!("{path}.frequency_hz"),
                "must be positive",
            ));
        }
        if self.semi_major_m <= self.d_tr_m / 2.0 {
            return Err(ConfigError::invalid(
                &format!("{path}.semi_major_m"),
                "must exceed half the Tx-Rx distance (degenerate ellipse)",
            ));
        }
        if self.steps < 2 {
            return Err(ConfigError::invalid(
                &format!("{path}.steps"),
                "needs at least 2 steps",
            ));
        }
        Ok(())
    }
}

impl ScenarioConfig {
    fn validate(&self, path: &str) -> Result<(), ConfigError> {
        if self.carrier_hz <= 0.0 || self.carrier_hz.is_nan() {
            return Err(ConfigError::invalid(
                &format!("{path}.carrier_hz"),
                "must be positive",
            ));
        }
        if self.speed_mps < 0.0 {
            return Err(ConfigError::invalid(
                &format!("{path}.speed_mps"),
                "must be >= 0",
            ));
        }
        if self.los.is_none() && self.ring.is_none() && self.rays.is_empty() {
            return Err(ConfigError::invalid(
                &format!("{path}.rays"),
                "scenario needs a los block, a ring block, or explicit rays",
            ));
        }
        let mut total = 0.0;
        if let Some(los) = &self.los {
            total += los.power;
        }
        if let Some(ring) = &self.ring {
            total += ring.total_power;
            if ring.count == 0 {
                return Err(ConfigError::invalid(
                    &format!("{path}.ring.count"),
                    "must be >= 1",
                ));
            }
            if ring.ris_flagged > ring.count {
                return Err(ConfigError::invalid(
                    &format!("{path}.ring.ris_flagged"),
                    "cannot exceed ring.count",
                ));
            }
        }
        total += self.rays.iter().map(|r| r.power).sum::<f64>();
        if (total - 1.0).abs() > 1e-9 {
            return Err(ConfigError::invalid(
                path,
                format!("ray powers sum to {total}, expected 1"),
            ));
        }
        if self.snapshots == 0 || self.runs == 0 {
            return Err(ConfigError::invalid(
                &format!("{path}.snapshots"),
                "snapshots and runs must be >= 1",
            ));
        }
        if let Some(lag) = self.max_lag {
            if lag >= self.snapshots {
                return Err(ConfigError::invalid(
                    &format!("{path}.max_lag"),
                    "must be below the snapshot count",
                ));
            }
        }
        Ok(())
    }
}

impl EstimateConfig {
    fn validate(&self, path: &str) -> Result<(), ConfigError> {
        if self.snr_db.is_empty() {
            return Err(ConfigError::invalid(
                &format!("{path}.snr_db"),
                "must be non-empty",
            ));
        }
        if self.modes.is_empty() || self.modes.contains(&0) {
            return Err(ConfigError::invalid(
                &format!("{path}.modes"),
                "mode counts must be non-empty and >= 1",
            ));
        }
        if self.trials == 0 {
            return Err(ConfigError::invalid(
                &format!("{path}.trials"),
                "must be >= 1",
            ));
        }
        if self.truth.paths == 0 || self.truth.ris_paths > self.truth.paths {
            return Err(ConfigError::invalid(
                &format!("{path}.truth"),
                "needs paths >= 1 and ris_paths <= paths",
            ));
        }
        let min_dim = self
            .grid
            .subcarriers
            .min(self.grid.snapshots)
            .min(self.grid.rx_elements)
            .min(self.grid.tx_elements);
        if self.truth.paths > min_dim {
            return Err(ConfigError::invalid(
                &format!("{path}.truth.paths"),
                format!("exceeds the smallest observation dimension {min_dim}"),
            ));
        }
        Ok(())
    }
}

impl MetricsConfig {
    fn validate(&self, path: &str) -> Result<(), ConfigError> {
        if self.taps.is_empty() {
            return Err(ConfigError::invalid(
                &format!("{path}.taps"),
                "must be non-empty",
            ));
        }
        if self.matrix.rx_elements == 0 || self.matrix.tx_elements == 0 {
            return Err(ConfigError::invalid(
                &format!("{path}.matrix"),
                "array sizes must be >= 1",
            ));
        }
        Ok(())
    }
}

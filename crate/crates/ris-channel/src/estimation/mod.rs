//! Transmission-mode-aided multipath parameter estimation.
//!
//! A channel sounder observes the link under K different RIS phase
//! configurations ("transmission modes"). Paths that bounce off the surface
//! are modulated by the mode's far-field tile response `g_k(theta_inc,
//! theta_ref)`; every other path is mode-invariant. Comparing a path's
//! amplitude across modes therefore tells RIS paths apart, and the
//! mode-response signature pins down the incidence/reflection angles at the
//! surface. [`forward`] synthesizes such observations, [`sage`] runs the
//! SAGE-style maximum-likelihood estimator, and [`rmsee`] scores estimates
//! against ground truth.
//!
//! One identifiability note: for a panel scanned in its azimuth plane the
//! tile response depends on the RIS angles only through
//! `sin(theta_inc) + sin(theta_ref)`, whatever the profile, so the ML
//! objective is exactly flat along that ridge. The estimator reports the
//! symmetric ridge representative (`theta_inc = theta_ref`); see
//! [`sage::estimate_mpc_parameters`].

pub mod forward;
pub mod rmsee;
pub mod sage;

use num_complex::Complex64;
use thiserror::Error;

use crate::pathloss::element_pattern;

pub use forward::{synthesize_observations, ObsGrid, Observation};
pub use rmsee::{rmsee, ParameterSpans, RmseeReport};
pub use sage::{
    classify_ris_paths, estimate_mpc_parameters, EstimatedPath, EstimationResult, EstimatorConfig,
    Grid1d,
};

/// Errors from synthesis and estimation.
#[derive(Debug, Error)]
pub enum EstimationError {
    #[error("model order {l} exceeds the smallest observation dimension {min_dim}")]
    ModelOrder { l: usize, min_dim: usize },
    #[error("observation was synthesized with {obs} modes, estimator got {set}")]
    ModeCount { obs: usize, set: usize },
    #[error("estimate and truth sets differ in size: {estimates} vs {truth}")]
    LengthMismatch { estimates: usize, truth: usize },
    #[error("empty path set")]
    EmptyPaths,
    #[error("{0}")]
    Invalid(String),
}

// ---------------------------------------------------------------------------
// Multipath components
// ---------------------------------------------------------------------------

/// Incidence and reflection angles at the surface for a RIS-relayed path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RisAngles {
    pub incident_rad: f64,
    pub reflect_rad: f64,
}

/// One multipath component.
#[derive(Debug, Clone, Copy)]
pub struct Mpc {
    pub amplitude: Complex64,
    pub delay_s: f64,
    /// Azimuth of arrival at the Rx array.
    pub aoa_rad: f64,
    /// Azimuth of departure at the Tx array.
    pub aod_rad: f64,
    pub doppler_hz: f64,
    /// Present exactly when the path interacts with the surface.
    pub ris: Option<RisAngles>,
}

impl Mpc {
    pub fn validate(&self) -> Result<(), EstimationError> {
        if self.delay_s < 0.0 {
            return Err(EstimationError::Invalid(format!(
                "negative delay {}",
                self.delay_s
            )));
        }
        let magnitude = self.amplitude.norm();
        if magnitude <= 0.0 || magnitude.is_nan() {
            return Err(EstimationError::Invalid("zero-amplitude path".into()));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Transmission modes
// ---------------------------------------------------------------------------

/// Geometry of the panel the modes run on, pitch in wavelengths.
#[derive(Debug, Clone, Copy)]
pub struct ModePanel {
    pub m_count: usize,
    pub n_count: usize,
    pub pitch_wl: f64,
    pub amplitude: f64,
    pub pattern_exponent: f64,
}

impl Default for ModePanel {
    fn default() -> Self {
        // Quarter-wavelength unit cells: the tile response is periodic in
        // sin(ti) + sin(tr) with period 1/pitch, so sub-half-wavelength
        // pitch keeps the reachable range [-2, 2] free of grating aliases.
        Self {
            m_count: 16,
            n_count: 16,
            pitch_wl: 0.25,
            amplitude: 1.0,
            pattern_exponent: 3.0,
        }
    }
}

/// One fixed RIS configuration used during sounding.
///
/// The far-field tile response collapses the grid along y (the sounding cut
/// is the azimuth plane), leaving per-column weights `W_m` and
/// `g(ti, tr) = sqrt(F(ti) F(tr)) sum_m W_m exp(j 2 pi p m (sin ti + sin tr))`.
#[derive(Debug, Clone)]
pub struct TransmissionMode {
    pub index: usize,
    /// Full per-element profile in radians, `n * m_count + m`.
    pub phase_profile: Vec<f64>,
    panel: ModePanel,
    column_weights: Vec<Complex64>,
}

impl TransmissionMode {
    pub fn new(
        index: usize,
        panel: ModePanel,
        phase_profile: Vec<f64>,
    ) -> Result<Self, EstimationError> {
        if phase_profile.len() != panel.m_count * panel.n_count {
            return Err(EstimationError::Invalid(format!(
                "profile has {} entries for a {}x{} mode panel",
                phase_profile.len(),
                panel.m_count,
                panel.n_count
            )));
        }
        let mut column_weights = vec![Complex64::new(0.0, 0.0); panel.m_count];
        for n in 0..panel.n_count {
            for m in 0..panel.m_count {
                column_weights[m] +=
                    Complex64::from_polar(panel.amplitude, phase_profile[n * panel.m_count + m]);
            }
        }
        Ok(Self {
            index,
            phase_profile,
            panel,
            column_weights,
        })
    }

    /// Gradient profile steering reflections toward `steer_rad` under normal
    /// incidence.
    pub fn steered(index: usize, panel: ModePanel, steer_rad: f64) -> Self {
        let m_count = panel.m_count;
        let mut profile = Vec::with_capacity(m_count * panel.n_count);
        for _n in 0..panel.n_count {
            for m in 0..m_count {
                let x = (m as f64 - (m_count as f64 - 1.0) / 2.0) * panel.pitch_wl;
                profile.push(
                    (-std::f64::consts::TAU * x * steer_rad.sin())
                        .rem_euclid(std::f64::consts::TAU),
                );
            }
        }
        Self::new(index, panel, profile).expect("generated profile matches panel")
    }

    /// Far-field tile response at the given incidence and reflection angles.
    /// `|g|` is bounded by the element count.
    pub fn response(&self, theta_inc_rad: f64, theta_ref_rad: f64) -> Complex64 {
        let q = self.panel.pattern_exponent;
        let f = element_pattern(theta_inc_rad.abs(), q) * element_pattern(theta_ref_rad.abs(), q);
        if f == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let u = theta_inc_rad.sin() + theta_ref_rad.sin();
        let m_count = self.panel.m_count;
        let mut sum = Complex64::new(0.0, 0.0);
        for (m, w) in self.column_weights.iter().enumerate() {
            let x = (m as f64 - (m_count as f64 - 1.0) / 2.0) * self.panel.pitch_wl;
            sum += w * Complex64::from_polar(1.0, std::f64::consts::TAU * x * u);
        }
        sum * f.sqrt()
    }
}

/// The set of K modes a sounding campaign cycles through.
#[derive(Debug, Clone)]
pub struct ModeSet {
    pub modes: Vec<TransmissionMode>,
    pub panel: ModePanel,
}

impl ModeSet {
    pub fn new(panel: ModePanel, modes: Vec<TransmissionMode>) -> Result<Self, EstimationError> {
        if modes.is_empty() {
            return Err(EstimationError::Invalid("mode set needs K >= 1".into()));
        }
        Ok(Self { modes, panel })
    }

    /// K gradient modes steering uniformly over [-60, +60] degrees, the
    /// spread that maximizes across-mode response diversity.
    pub fn uniform_sweep(panel: ModePanel, k: usize) -> Result<Self, EstimationError> {
        if k == 0 {
            return Err(EstimationError::Invalid("mode set needs K >= 1".into()));
        }
        let modes = (0..k)
            .map(|i| {
                let steer = if k == 1 {
                    0.0
                } else {
                    (-60.0 + 120.0 * i as f64 / (k - 1) as f64).to_radians()
                };
                TransmissionMode::steered(i, panel, steer)
            })
            .collect();
        Self::new(panel, modes)
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Response of every mode at one angle pair.
    pub fn responses(&self, theta_inc_rad: f64, theta_ref_rad: f64) -> Vec<Complex64> {
        self.modes
            .iter()
            .map(|m| m.response(theta_inc_rad, theta_ref_rad))
            .collect()
    }

    /// True when two modes carry identical profiles; such sets cannot tell
    /// RIS paths apart, callers should warn.
    pub fn has_duplicate_profiles(&self) -> bool {
        for i in 0..self.modes.len() {
            for j in i + 1..self.modes.len() {
                let a = &self.modes[i].phase_profile;
                let b = &self.modes[j].phase_profile;
                if a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12) {
                    return true;
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_response_bounded_by_element_count() {
        let panel = ModePanel::default();
        let mode = TransmissionMode::steered(0, panel, 0.3);
        for ti in [-1.0, -0.3, 0.0, 0.4, 1.2] {
            for tr in [-1.1, 0.0, 0.8] {
                let g = mode.response(ti, tr);
                assert!(g.norm() <= (panel.m_count * panel.n_count) as f64 + 1e-9);
            }
        }
    }

    #[test]
    fn steered_mode_peaks_at_its_design_angle() {
        let panel = ModePanel {
            pattern_exponent: 0.0,
            ..ModePanel::default()
        };
        let steer = 25.0_f64.to_radians();
        let mode = TransmissionMode::steered(0, panel, steer);
        // Normal incidence: |g| maximal where sin(tr) = sin(steer).
        let at_peak = mode.response(0.0, steer).norm();
        assert!((at_peak - (panel.m_count * panel.n_count) as f64).abs() < 1e-9);
        let off = mode.response(0.0, steer + 0.3).norm();
        assert!(off < at_peak / 2.0);
    }

    #[test]
    fn response_depends_only_on_sine_sum() {
        // Ridge property: equal sin(ti) + sin(tr) gives equal |g| up to the
        // element-pattern factor; with q = 0 the responses are identical.
        let panel = ModePanel {
            pattern_exponent: 0.0,
            ..ModePanel::default()
        };
        let mode = TransmissionMode::steered(0, panel, 0.4);
        let u = 0.9_f64;
        let a = mode.response((u / 2.0).asin(), (u / 2.0).asin());
        let ti = 0.2_f64;
        let b = mode.response(ti.asin(), (u - ti).asin());
        assert!((a - b).norm() < 1e-9);
    }

    #[test]
    fn uniform_sweep_has_distinct_modes() {
        let set = ModeSet::uniform_sweep(ModePanel::default(), 5).unwrap();
        assert_eq!(set.len(), 5);
        assert!(!set.has_duplicate_profiles());
    }

    #[test]
    fn duplicate_profiles_detected() {
        let panel = ModePanel::default();
        let set = ModeSet::new(
            panel,
            vec![
                TransmissionMode::steered(0, panel, 0.2),
                TransmissionMode::steered(1, panel, 0.2),
            ],
        )
        .unwrap();
        assert!(set.has_duplicate_profiles());
    }

    #[test]
    fn mpc_validation() {
        let good = Mpc {
            amplitude: Complex64::new(1.0, 0.0),
            delay_s: 1e-7,
            aoa_rad: 0.3,
            aod_rad: -0.2,
            doppler_hz: 100.0,
            ris: None,
        };
        assert!(good.validate().is_ok());
        let bad = Mpc {
            delay_s: -1.0,
            ..good
        };
        assert!(bad.validate().is_err());
        let zero = Mpc {
            amplitude: Complex64::new(0.0, 0.0),
            ..good
        };
        assert!(zero.validate().is_err());
    }
}

//! Large-scale path loss models for RIS-assisted links.
//!
//! The model family, in the order it appeared in the literature:
//!
//! * [`two_ray_ris_received_power`] — two-ray approximation with Q
//!   ground-laid elements, received power `(Q+1)^2 Pt (lambda / 4 pi d)^2`.
//! * [`po_far_field_path_loss`] — physical-optics far-field result for a
//!   rectangular plate, with the sinc lobe around the design angle.
//! * [`tang_general_path_loss`] — general element-sum model
//!   `64 pi^3 / (Gt Gr G dx dy lambda^2) |sum|^-2`, plus its closed-form
//!   far-field beamforming / near-field beamforming / near-field
//!   broadcasting cases ([`tang_case_path_loss`]).
//! * [`refined_path_loss`] — the later refinement with the
//!   `16 pi^2 / (dx dy)^2` constant and a single-element form. The general
//!   and refined constants deliberately disagree (`64 pi^3 G dx dy lambda^2`
//!   vs `16 pi^2 (dx dy)^2`); both are kept verbatim rather than reconciled.
//! * [`ellingson_path_loss`] — per-element sum with element gain patterns and
//!   a surface power efficiency.
//! * [`tile_rcs_path_loss`] — RCS/tile-response form: free-space losses of
//!   both hops times `4 pi |g|^2 / lambda^2`.
//!
//! All returns follow the crate dB convention (see [`crate::units`]); sums
//! that cancel perfectly report `+inf` dB with
//! [`PathLossResult::cancellation`] set instead of failing, so sweeps over
//! pathological profiles never abort.

pub mod array;
pub mod pattern;
pub mod phase;

use num_complex::Complex64;
use thiserror::Error;

use crate::scene::{FieldKind, FieldRegion, RisPanel, Scene};
use crate::units::{db_from_power, wavelength};

pub use array::{array_factor_and_hpbw, ArrayPattern};
pub use pattern::element_pattern;
pub use phase::{
    apply_quantization, design_phase_profile, quantize_phase_profile, PhaseProfileSpec,
};

use pattern::pattern_from_cos;

/// Errors from the path loss models.
#[derive(Debug, Error)]
pub enum PathLossError {
    #[error("scene was built for a {scene:?} grid, panel is {panel:?}")]
    GridMismatch {
        scene: (usize, usize),
        panel: (usize, usize),
    },
    #[error("custom profile has {got} entries, panel needs {expected}")]
    CustomProfileSize { got: usize, expected: usize },
    #[error("per-element data has {got} entries, panel needs {expected}")]
    PerElementSize { got: usize, expected: usize },
    #[error("element index ({n}, {m}) outside the {n_count} x {m_count} grid")]
    ElementIndex {
        n: usize,
        m: usize,
        n_count: usize,
        m_count: usize,
    },
    #[error("scan resolution {0} degrees too coarse, need <= 0.05")]
    ScanTooCoarse(f64),
    #[error("no -3 dB lobe bracketed inside the scan window")]
    NoLobeInScan,
    #[error("model parameter out of range: {0}")]
    Parameter(String),
}

// ---------------------------------------------------------------------------
// Result type
// ---------------------------------------------------------------------------

/// Outcome of one model evaluation.
#[derive(Debug, Clone)]
pub struct PathLossResult {
    /// Path loss in dB (`+inf` when the element sum cancelled).
    pub path_loss_db: f64,
    /// Inner coherent element sum, for models built on one.
    pub coherent_sum: Option<Complex64>,
    /// Field region the scene was classified into, for models that care.
    pub field_region_used: Option<FieldRegion>,
    /// True when a coherent sum vanished and the loss was pinned to `+inf`.
    pub cancellation: bool,
    /// Non-fatal diagnostics, e.g. a far-field model used in the near field.
    pub notes: Vec<String>,
}

impl PathLossResult {
    fn from_db(path_loss_db: f64) -> Self {
        Self {
            path_loss_db,
            coherent_sum: None,
            field_region_used: None,
            cancellation: false,
            notes: Vec::new(),
        }
    }

    /// Loss constant/|sum|^2 in dB, flagging perfect cancellation instead of
    /// producing NaN. `gross` is the sum of term magnitudes: a coherent sum
    /// more than twelve orders below it is cancellation, not signal.
    fn from_sum(constant_linear: f64, sum: Complex64, gross: f64) -> Self {
        let magnitude = sum.norm();
        let (db, cancelled) = if magnitude > 1e-12 * gross && magnitude > 0.0 {
            (
                db_from_power(constant_linear / (magnitude * magnitude)),
                false,
            )
        } else {
            (f64::INFINITY, true)
        };
        Self {
            path_loss_db: db,
            coherent_sum: Some(sum),
            field_region_used: None,
            cancellation: cancelled,
            notes: Vec::new(),
        }
    }

    fn with_region(mut self, region: FieldRegion) -> Self {
        self.field_region_used = Some(region);
        self
    }

    /// Received power for a given transmit power: `tx - path_loss`.
    pub fn received_power_dbm(&self, tx_power_dbm: f64) -> f64 {
        tx_power_dbm - self.path_loss_db
    }
}

// ---------------------------------------------------------------------------
// Closed-form scalar models
// ---------------------------------------------------------------------------

/// Free-space path loss `10 log10[(4 pi d / lambda)^2 / (gt gr)]` in dB.
pub fn free_space_path_loss(distance_m: f64, frequency_hz: f64, gt: f64, gr: f64) -> f64 {
    let lambda = wavelength(frequency_hz);
    let ratio = 4.0 * std::f64::consts::PI * distance_m / lambda;
    db_from_power(ratio * ratio / (gt * gr))
}

/// Two-ray approximation with Q ground-laid RIS elements: received power in
/// dBm, `Pr = (Q+1)^2 Pt (lambda / 4 pi d)^2`.
pub fn two_ray_ris_received_power(
    q_elements: usize,
    d_tr_m: f64,
    frequency_hz: f64,
    tx_power_dbm: f64,
) -> f64 {
    let lambda = wavelength(frequency_hz);
    tx_power_dbm
        + 20.0 * ((q_elements as f64 + 1.0).log10())
        + 20.0 * (lambda / (4.0 * std::f64::consts::PI * d_tr_m)).log10()
}

/// `sin(x)/x` with a series guard near zero.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Physical-optics far-field path loss of an `a x b` plate, in dB.
///
/// `theta_i` is the incidence angle, `theta_r` the design (anomalous)
/// reflection angle, `theta_s` the observation angle; at `theta_s == theta_r`
/// the sinc factor is exactly 1 and the specular closed form applies. The
/// model is meaningful around the design direction; it is not symmetric
/// under a Tx/Rx swap (the incidence enters alone through `cos^2 theta_i`).
#[allow(clippy::too_many_arguments)]
pub fn po_far_field_path_loss(
    d1_m: f64,
    d2_m: f64,
    a_m: f64,
    b_m: f64,
    theta_i_rad: f64,
    theta_s_rad: f64,
    theta_r_rad: f64,
    gt: f64,
    gr: f64,
    frequency_hz: f64,
) -> f64 {
    let lambda = wavelength(frequency_hz);
    let num = 4.0 * std::f64::consts::PI * d1_m * d2_m;
    let cos_i = theta_i_rad.cos();
    let lobe = sinc(std::f64::consts::PI * b_m / lambda * (theta_s_rad.sin() - theta_r_rad.sin()));
    let denom = gt * gr * (a_m * b_m) * (a_m * b_m) * cos_i * cos_i * lobe;
    db_from_power(num * num / denom)
}

/// Tile/RCS form: `PL_RIS = (4 pi |g|^2 / lambda^2) PL_t PL_r` with
/// `PL_t = (lambda / 4 pi d1)^2`, `PL_r = (lambda / 4 pi d2)^2`. The product
/// is a power gain < 1; this returns `-10 log10` of it as a loss.
pub fn tile_rcs_path_loss(
    tile_response: Complex64,
    d1_m: f64,
    d2_m: f64,
    frequency_hz: f64,
) -> PathLossResult {
    let lambda = wavelength(frequency_hz);
    let g2 = tile_response.norm_sqr();
    if g2 == 0.0 {
        let mut r = PathLossResult::from_db(f64::INFINITY);
        r.cancellation = true;
        return r;
    }
    let pl_t = (lambda / (4.0 * std::f64::consts::PI * d1_m)).powi(2);
    let pl_r = (lambda / (4.0 * std::f64::consts::PI * d2_m)).powi(2);
    let gain = 4.0 * std::f64::consts::PI * g2 / (lambda * lambda) * pl_t * pl_r;
    let mut result = PathLossResult::from_db(-db_from_power(gain));
    result.coherent_sum = Some(tile_response);
    result
}

// ---------------------------------------------------------------------------
// Element-sum models
// ---------------------------------------------------------------------------

fn check_grid(panel: &RisPanel, scene: &Scene) -> Result<(), PathLossError> {
    if scene.grid_dims() != (panel.m_count, panel.n_count) {
        return Err(PathLossError::GridMismatch {
            scene: scene.grid_dims(),
            panel: (panel.m_count, panel.n_count),
        });
    }
    Ok(())
}

/// General element-sum model:
/// `PL = 64 pi^3 / (Gt Gr G dx dy lambda^2) * |sum|^-2` with per-element
/// terms `sqrt(F_combine) Gamma exp(-j 2 pi (r^t + r^r)/lambda) / (r^t r^r)`
/// and `Gamma = A exp(j phi)` from the panel's phase profile.
pub fn tang_general_path_loss(
    panel: &RisPanel,
    scene: &Scene,
) -> Result<PathLossResult, PathLossError> {
    check_grid(panel, scene)?;
    let k = std::f64::consts::TAU / scene.wavelength_m;
    let q = panel.pattern_exponent;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut gross = 0.0;
    for i in 0..panel.element_count() {
        let rt = scene.ray_tx_m[i];
        let rr = scene.ray_rx_m[i];
        let f_combine =
            pattern_from_cos(scene.cos_inc[i], q) * pattern_from_cos(scene.cos_ref[i], q);
        let magnitude = f_combine.sqrt() * panel.amplitude / (rt * rr);
        let phase = panel.phase_profile[i] - k * (rt + rr);
        sum += Complex64::from_polar(magnitude, phase);
        gross += magnitude;
    }
    let constant = 64.0 * std::f64::consts::PI.powi(3)
        / (scene.tx.gain
            * scene.rx.gain
            * panel.element_gain
            * panel.dx
            * panel.dy
            * scene.wavelength_m
            * scene.wavelength_m);
    Ok(PathLossResult::from_sum(constant, sum, gross).with_region(scene.field_region(panel)))
}

/// The three closed-form cases of the general model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TangCase {
    /// Both hops in the far field, beam steered at the Rx.
    FarBeamforming,
    /// At least one hop in the near field, per-element co-phasing.
    NearBeamforming,
    /// Near field, mirror-like broadcast.
    NearBroadcast,
}

/// Closed forms of the general model for the selected case.
pub fn tang_case_path_loss(
    case: TangCase,
    panel: &RisPanel,
    scene: &Scene,
) -> Result<PathLossResult, PathLossError> {
    check_grid(panel, scene)?;
    let lambda = scene.wavelength_m;
    let region = scene.field_region(panel);
    let (gt, gr) = (scene.tx.gain, scene.rx.gain);
    let a2 = panel.amplitude * panel.amplitude;
    let mut result = match case {
        TangCase::FarBeamforming => {
            // 64 pi^3 (d1 d2)^2 / (Gt Gr G M^2 N^2 dx dy lambda^2 F F A^2)
            let f_t = element_pattern(scene.theta_t_rad, panel.pattern_exponent);
            let f_r = element_pattern(scene.theta_r_rad, panel.pattern_exponent);
            let mn = (panel.m_count * panel.n_count) as f64;
            let num = 64.0 * std::f64::consts::PI.powi(3) * (scene.d1_m * scene.d2_m).powi(2);
            let den = gt
                * gr
                * panel.element_gain
                * mn
                * mn
                * panel.dx
                * panel.dy
                * lambda
                * lambda
                * f_t
                * f_r
                * a2;
            let mut r = PathLossResult::from_db(db_from_power(num / den));
            if region.kind == FieldKind::Near {
                r.notes.push(format!(
                    "far-field beamforming used at {:.1} m, inside the Rayleigh distance {:.1} m",
                    scene.d1_m.min(scene.d2_m),
                    region.rayleigh_distance_m
                ));
            }
            r
        }
        TangCase::NearBeamforming => {
            // 64 pi^3 / (Gt Gr G dx dy lambda^2 A^2 |sum sqrt(F)/(r^t r^r)|^2)
            let q = panel.pattern_exponent;
            let mut sum = 0.0;
            for i in 0..panel.element_count() {
                let f_combine =
                    pattern_from_cos(scene.cos_inc[i], q) * pattern_from_cos(scene.cos_ref[i], q);
                sum += f_combine.sqrt() / (scene.ray_tx_m[i] * scene.ray_rx_m[i]);
            }
            let constant = 64.0 * std::f64::consts::PI.powi(3)
                / (gt * gr * panel.element_gain * panel.dx * panel.dy * lambda * lambda * a2);
            PathLossResult::from_sum(constant, Complex64::new(sum, 0.0), sum)
        }
        TangCase::NearBroadcast => {
            // 16 pi^2 (d1 + d2)^2 / (Gt Gr lambda^2 A^2)
            let num = 16.0 * std::f64::consts::PI.powi(2) * (scene.d1_m + scene.d2_m).powi(2);
            let den = gt * gr * lambda * lambda * a2;
            PathLossResult::from_db(db_from_power(num / den))
        }
    };
    result.field_region_used = Some(region);
    Ok(result)
}

/// The refined closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RefinedCase {
    /// Far-field beamforming: `16 pi^2 (d1 d2)^2 / (Gt Gr G (M N dx dy)^2 F F A^2)`.
    Far,
    /// Near-field beamforming: `16 pi^2 / (Gt Gr (dx dy)^2 |sum sqrt(F)/(r^t r^r)|^2)`.
    Near,
    /// Single element `(n, m)` with reflection coefficient `gamma`:
    /// `16 pi^2 (r^t r^r)^2 / (Gt Gr (dx dy)^2 F_combine |gamma|^2)`.
    SingleElement {
        n: usize,
        m: usize,
        gamma: Complex64,
    },
}

/// Refined path loss models (the later measurement-validated forms).
pub fn refined_path_loss(
    case: RefinedCase,
    panel: &RisPanel,
    scene: &Scene,
) -> Result<PathLossResult, PathLossError> {
    check_grid(panel, scene)?;
    let (gt, gr) = (scene.tx.gain, scene.rx.gain);
    let dxdy = panel.dx * panel.dy;
    let region = scene.field_region(panel);
    let mut result = match case {
        RefinedCase::Far => {
            let f_t = element_pattern(scene.theta_t_rad, panel.pattern_exponent);
            let f_r = element_pattern(scene.theta_r_rad, panel.pattern_exponent);
            let mn = (panel.m_count * panel.n_count) as f64;
            let a2 = panel.amplitude * panel.amplitude;
            let num = 16.0 * std::f64::consts::PI.powi(2) * (scene.d1_m * scene.d2_m).powi(2);
            let den = gt * gr * panel.element_gain * (mn * dxdy).powi(2) * f_t * f_r * a2;
            let mut r = PathLossResult::from_db(db_from_power(num / den));
            if region.kind == FieldKind::Near {
                r.notes.push(format!(
                    "refined far-field form used inside the Rayleigh distance {:.1} m",
                    region.rayleigh_distance_m
                ));
            }
            r
        }
        RefinedCase::Near => {
            let q = panel.pattern_exponent;
            let mut sum = 0.0;
            for i in 0..panel.element_count() {
                let f_combine =
                    pattern_from_cos(scene.cos_inc[i], q) * pattern_from_cos(scene.cos_ref[i], q);
                sum += f_combine.sqrt() / (scene.ray_tx_m[i] * scene.ray_rx_m[i]);
            }
            let constant = 16.0 * std::f64::consts::PI.powi(2) / (gt * gr * dxdy * dxdy);
            PathLossResult::from_sum(constant, Complex64::new(sum, 0.0), sum)
        }
        RefinedCase::SingleElement { n, m, gamma } => {
            if n >= panel.n_count || m >= panel.m_count {
                return Err(PathLossError::ElementIndex {
                    n,
                    m,
                    n_count: panel.n_count,
                    m_count: panel.m_count,
                });
            }
            let i = panel.index(n, m);
            let q = panel.pattern_exponent;
            let f_combine =
                pattern_from_cos(scene.cos_inc[i], q) * pattern_from_cos(scene.cos_ref[i], q);
            let g2 = gamma.norm_sqr();
            if g2 == 0.0 || f_combine == 0.0 {
                let mut r = PathLossResult::from_db(f64::INFINITY);
                r.cancellation = true;
                r
            } else {
                let rt_rr = scene.ray_tx_m[i] * scene.ray_rx_m[i];
                let num = 16.0 * std::f64::consts::PI.powi(2) * rt_rr * rt_rr;
                let den = gt * gr * dxdy * dxdy * f_combine * g2;
                PathLossResult::from_db(db_from_power(num / den))
            }
        }
    };
    result.field_region_used = Some(region);
    Ok(result)
}

/// Element-sum model with per-element gain patterns and a surface power
/// efficiency eta:
/// `PL = 256 pi^4 / (eta Gt Gr) |sum A_n sqrt(G_in G_out) e^{j phi_n} / (d1n d2n)|^-2`.
///
/// `amplitudes` and `phases` are per-element (flat, `n * M + m`); the
/// per-element gains are `element_gain * cos^q` evaluated on each ray.
pub fn ellingson_path_loss(
    panel: &RisPanel,
    scene: &Scene,
    amplitudes: &[f64],
    phases: &[f64],
) -> Result<PathLossResult, PathLossError> {
    check_grid(panel, scene)?;
    let count = panel.element_count();
    if amplitudes.len() != count {
        return Err(PathLossError::PerElementSize {
            got: amplitudes.len(),
            expected: count,
        });
    }
    if phases.len() != count {
        return Err(PathLossError::PerElementSize {
            got: phases.len(),
            expected: count,
        });
    }
    let q = panel.pattern_exponent;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut gross = 0.0;
    for i in 0..count {
        let g_in = panel.element_gain * pattern_from_cos(scene.cos_inc[i], q);
        let g_out = panel.element_gain * pattern_from_cos(scene.cos_ref[i], q);
        let magnitude =
            amplitudes[i] * (g_in * g_out).sqrt() / (scene.ray_tx_m[i] * scene.ray_rx_m[i]);
        sum += Complex64::from_polar(magnitude, phases[i]);
        gross += magnitude.abs();
    }
    let constant =
        256.0 * std::f64::consts::PI.powi(4) / (panel.efficiency * scene.tx.gain * scene.rx.gain);
    Ok(PathLossResult::from_sum(constant, sum, gross).with_region(scene.field_region(panel)))
}

// ---------------------------------------------------------------------------
// Model selector
// ---------------------------------------------------------------------------

/// One selector per surveyed model, with its model-specific parameters.
#[derive(Debug, Clone)]
pub enum PathLossModel {
    /// Free-space loss over the unfolded distance `d1 + d2`.
    FreeSpace,
    /// Two-ray approximation over the direct `d_tr`.
    TwoRayRis {
        q_elements: usize,
    },
    /// Physical-optics plate of sides `a x b` designed to reflect toward
    /// `desired_reflection_rad`; observation angle comes from the scene.
    PoFarField {
        a_m: f64,
        b_m: f64,
        desired_reflection_rad: f64,
    },
    /// General element-sum model using the panel's phase profile.
    TangGeneral,
    TangFarBeamforming,
    TangNearBeamforming,
    TangNearBroadcast,
    RefinedFar,
    RefinedNear,
    /// Refined single-element form.
    SingleElement {
        n: usize,
        m: usize,
        gamma: Complex64,
    },
    /// Power-efficiency element sum; `None` uses the panel's amplitude and
    /// phase profile.
    Ellingson {
        amplitudes: Option<Vec<f64>>,
        phases: Option<Vec<f64>>,
    },
    /// Tile/RCS form with the tile's far-field response.
    TileRcs {
        tile_response: Complex64,
    },
}

impl PathLossModel {
    /// Stable identifier used in tables and configs.
    pub fn name(&self) -> &'static str {
        match self {
            PathLossModel::FreeSpace => "free_space",
            PathLossModel::TwoRayRis { .. } => "two_ray_ris",
            PathLossModel::PoFarField { .. } => "po_far_field",
            PathLossModel::TangGeneral => "tang_general",
            PathLossModel::TangFarBeamforming => "tang_far_bf",
            PathLossModel::TangNearBeamforming => "tang_near_bf",
            PathLossModel::TangNearBroadcast => "tang_near_bc",
            PathLossModel::RefinedFar => "refined_far",
            PathLossModel::RefinedNear => "refined_near",
            PathLossModel::SingleElement { .. } => "single_element",
            PathLossModel::Ellingson { .. } => "ellingson",
            PathLossModel::TileRcs { .. } => "tile_rcs",
        }
    }
}

/// Evaluate any selector against a panel and scene.
pub fn evaluate_path_loss(
    model: &PathLossModel,
    panel: &RisPanel,
    scene: &Scene,
) -> Result<PathLossResult, PathLossError> {
    match model {
        PathLossModel::FreeSpace => Ok(PathLossResult::from_db(free_space_path_loss(
            scene.d1_m + scene.d2_m,
            scene.carrier_hz,
            scene.tx.gain,
            scene.rx.gain,
        ))),
        PathLossModel::TwoRayRis { q_elements } => {
            // Path loss is transmit minus received power for this model.
            let pr = two_ray_ris_received_power(*q_elements, scene.d_tr_m, scene.carrier_hz, 0.0);
            Ok(PathLossResult::from_db(-pr))
        }
        PathLossModel::PoFarField {
            a_m,
            b_m,
            desired_reflection_rad,
        } => {
            if *a_m <= 0.0 || *b_m <= 0.0 {
                return Err(PathLossError::Parameter(
                    "plate sides must be positive".into(),
                ));
            }
            Ok(PathLossResult::from_db(po_far_field_path_loss(
                scene.d1_m,
                scene.d2_m,
                *a_m,
                *b_m,
                scene.theta_t_rad,
                scene.theta_s_rad,
                *desired_reflection_rad,
                scene.tx.gain,
                scene.rx.gain,
                scene.carrier_hz,
            )))
        }
        PathLossModel::TangGeneral => tang_general_path_loss(panel, scene),
        PathLossModel::TangFarBeamforming => {
            tang_case_path_loss(TangCase::FarBeamforming, panel, scene)
        }
        PathLossModel::TangNearBeamforming => {
            tang_case_path_loss(TangCase::NearBeamforming, panel, scene)
        }
        PathLossModel::TangNearBroadcast => {
            tang_case_path_loss(TangCase::NearBroadcast, panel, scene)
        }
        PathLossModel::RefinedFar => refined_path_loss(RefinedCase::Far, panel, scene),
        PathLossModel::RefinedNear => refined_path_loss(RefinedCase::Near, panel, scene),
        PathLossModel::SingleElement { n, m, gamma } => refined_path_loss(
            RefinedCase::SingleElement {
                n: *n,
                m: *m,
                gamma: *gamma,
            },
            panel,
            scene,
        ),
        PathLossModel::Ellingson { amplitudes, phases } => {
            let count = panel.element_count();
            let amps;
            let amps_ref = match amplitudes {
                Some(a) => a.as_slice(),
                None => {
                    amps = vec![panel.amplitude; count];
                    amps.as_slice()
                }
            };
            let phases_ref = match phases {
                Some(p) => p.as_slice(),
                None => panel.phase_profile.as_slice(),
            };
            ellingson_path_loss(panel, scene, amps_ref, phases_ref)
        }
        PathLossModel::TileRcs { tile_response } => Ok(tile_rcs_path_loss(
            *tile_response,
            scene.d1_m,
            scene.d2_m,
            scene.carrier_hz,
        )),
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

//! Phase-profile design and quantization.
//!
//! Profiles are returned as `M x N` radian grids (flat, indexed
//! `n * m_count + m`) normalized to `[0, 2 pi)`, ready to drop into
//! [`RisPanel::set_phase_profile`](crate::scene::RisPanel::set_phase_profile).

use std::f64::consts::TAU;

use rand::Rng;

use crate::rng::child_rng;
use crate::scene::{Point3, Quantization, RisPanel, Scene};

use super::PathLossError;

/// How the per-element reflection phases are chosen.
#[derive(Debug, Clone)]
pub enum PhaseProfileSpec {
    /// Every element set to the same phase.
    Uniform(f64),
    /// Linear gradient canceling the plane-wave phase difference from the
    /// scene's incidence direction toward the given reflection direction
    /// (elevation from the normal, azimuth in the panel plane).
    FarFieldBeam { theta_rad: f64, phi_rad: f64 },
    /// Per-element co-phasing of the Tx -> element -> target round trip;
    /// with the target at the Rx this aligns every term of the element-sum
    /// models: `phi = mod(2 pi (r^t + r^r) / lambda, 2 pi)`.
    NearFieldFocus { target: Point3 },
    /// Independent uniform phases on `[0, 2 pi)` from the seed; element `i`
    /// draws from its own child stream so generation order never matters.
    Random { seed: u64 },
    /// Caller-supplied grid (radians), dimensions must match the panel.
    Custom(Vec<f64>),
}

impl PhaseProfileSpec {
    /// Focus on the scene's Rx position.
    pub fn focus_on_rx(scene: &Scene) -> Self {
        Self::NearFieldFocus {
            target: scene.rx.position,
        }
    }
}

/// Design a phase profile for `panel` in `scene`.
pub fn design_phase_profile(
    spec: &PhaseProfileSpec,
    panel: &RisPanel,
    scene: &Scene,
) -> Result<Vec<f64>, PathLossError> {
    let (m_count, n_count) = (panel.m_count, panel.n_count);
    if scene.grid_dims() != (m_count, n_count) {
        return Err(PathLossError::GridMismatch {
            scene: scene.grid_dims(),
            panel: (m_count, n_count),
        });
    }
    let count = panel.element_count();
    let k = TAU / scene.wavelength_m;
    let mut phases = Vec::with_capacity(count);
    match spec {
        PhaseProfileSpec::Uniform(value) => {
            let v = value.rem_euclid(TAU);
            phases.resize(count, v);
        }
        PhaseProfileSpec::FarFieldBeam { theta_rad, phi_rad } => {
            // Unit directions toward the Tx and toward the beam target, in
            // panel coordinates (x, y in plane, z along the normal).
            let ut = (
                scene.theta_t_rad.sin() * scene.phi_t_rad.cos(),
                scene.theta_t_rad.sin() * scene.phi_t_rad.sin(),
            );
            let ur = (
                theta_rad.sin() * phi_rad.cos(),
                theta_rad.sin() * phi_rad.sin(),
            );
            let gx = ut.0 + ur.0;
            let gy = ut.1 + ur.1;
            for n in 0..n_count {
                let oy = (n as f64 - (n_count as f64 - 1.0) / 2.0) * panel.dy;
                for m in 0..m_count {
                    let ox = (m as f64 - (m_count as f64 - 1.0) / 2.0) * panel.dx;
                    phases.push((-k * (ox * gx + oy * gy)).rem_euclid(TAU));
                }
            }
        }
        PhaseProfileSpec::NearFieldFocus { target } => {
            for n in 0..n_count {
                let oy = (n as f64 - (n_count as f64 - 1.0) / 2.0) * panel.dy;
                for m in 0..m_count {
                    let ox = (m as f64 - (m_count as f64 - 1.0) / 2.0) * panel.dx;
                    let elem = scene.pose.center
                        + scene.pose.x_axis.scaled(ox)
                        + scene.pose.y_axis.scaled(oy);
                    let rt = (scene.tx.position - elem).norm();
                    let rr = (*target - elem).norm();
                    phases.push((k * (rt + rr)).rem_euclid(TAU));
                }
            }
        }
        PhaseProfileSpec::Random { seed } => {
            for i in 0..count {
                let mut rng = child_rng(*seed, i as u64);
                phases.push(rng.random::<f64>() * TAU);
            }
        }
        PhaseProfileSpec::Custom(values) => {
            if values.len() != count {
                return Err(PathLossError::CustomProfileSize {
                    got: values.len(),
                    expected: count,
                });
            }
            phases.extend(values.iter().map(|p| p.rem_euclid(TAU)));
        }
    }
    Ok(phases)
}

/// Snap every phase to the nearest multiple of `2 pi / 2^bits`, ties toward
/// the smaller multiple. Input phases are first normalized to `[0, 2 pi)`.
pub fn quantize_phase_profile(phases: &[f64], bits: u8) -> Vec<f64> {
    assert!(bits >= 1, "quantization needs at least 1 bit");
    let levels = f64::from(1u32 << bits);
    let step = TAU / levels;
    phases
        .iter()
        .map(|&phi| {
            let q = phi.rem_euclid(TAU) / step;
            let base = q.floor();
            let frac = q - base;
            // Strictly above the midpoint rounds up; the midpoint itself
            // stays at the smaller multiple.
            let idx = if frac > 0.5 { base + 1.0 } else { base };
            (idx % levels) * step
        })
        .collect()
}

/// Apply a panel's quantization setting: identity for continuous phases.
pub fn apply_quantization(phases: &[f64], quantization: Quantization) -> Vec<f64> {
    match quantization {
        Quantization::Continuous => phases.to_vec(),
        Quantization::Bits(b) => quantize_phase_profile(phases, b),
    }
}

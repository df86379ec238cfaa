//! Root-mean-square estimation error against ground truth.
//!
//! Matching is label-free: estimates pair greedily with the nearest truth
//! path in normalized parameter space (each parameter divided by its grid
//! span, angle differences wrapped). Per-parameter errors are reported in
//! native units; the aggregate is the root of the mean normalized MSE over
//! the gridded parameters, which makes seconds, radians, and hertz
//! commensurable.

use super::sage::EstimatorConfig;
use super::{EstimationError, Mpc};

/// Grid spans used to normalize each parameter.
#[derive(Debug, Clone, Copy)]
pub struct ParameterSpans {
    pub delay_s: f64,
    pub aoa_rad: f64,
    pub aod_rad: f64,
    pub doppler_hz: f64,
    pub ris_incident_rad: f64,
    pub ris_reflect_rad: f64,
}

impl From<&EstimatorConfig> for ParameterSpans {
    fn from(config: &EstimatorConfig) -> Self {
        Self {
            delay_s: config.delay_grid.span(),
            aoa_rad: config.aoa_grid.span(),
            aod_rad: config.aod_grid.span(),
            doppler_hz: config.doppler_grid.span(),
            ris_incident_rad: config.ris_incident_grid.span(),
            ris_reflect_rad: config.ris_reflect_grid.span(),
        }
    }
}

/// Per-parameter and aggregate RMS estimation errors.
#[derive(Debug, Clone, Copy)]
pub struct RmseeReport {
    pub delay_s: f64,
    pub aoa_rad: f64,
    pub aod_rad: f64,
    pub doppler_hz: f64,
    /// RMS RIS-angle errors over truth paths that interact with the surface;
    /// absent when the truth set has none.
    pub ris_incident_rad: Option<f64>,
    pub ris_reflect_rad: Option<f64>,
    /// Relative amplitude error, reported for reference (not aggregated: it
    /// has no grid span).
    pub amplitude_rel: f64,
    /// Root mean of the normalized per-parameter MSEs.
    pub aggregate: f64,
}

fn wrap_angle(diff: f64) -> f64 {
    diff.sin().atan2(diff.cos())
}

fn normalized_distance(a: &Mpc, b: &Mpc, spans: &ParameterSpans) -> f64 {
    let d_tau = (a.delay_s - b.delay_s) / spans.delay_s;
    let d_aoa = wrap_angle(a.aoa_rad - b.aoa_rad) / spans.aoa_rad;
    let d_aod = wrap_angle(a.aod_rad - b.aod_rad) / spans.aod_rad;
    let d_nu = (a.doppler_hz - b.doppler_hz) / spans.doppler_hz;
    (d_tau * d_tau + d_aoa * d_aoa + d_aod * d_aod + d_nu * d_nu).sqrt()
}

/// Score `estimates` against `truth` (equal counts required).
pub fn rmsee(
    estimates: &[Mpc],
    truth: &[Mpc],
    spans: &ParameterSpans,
) -> Result<RmseeReport, EstimationError> {
    if estimates.is_empty() || truth.is_empty() {
        return Err(EstimationError::EmptyPaths);
    }
    if estimates.len() != truth.len() {
        return Err(EstimationError::LengthMismatch {
            estimates: estimates.len(),
            truth: truth.len(),
        });
    }

    // Greedy nearest matching in normalized space.
    let n = truth.len();
    let mut est_free: Vec<bool> = vec![true; n];
    let mut truth_free: Vec<bool> = vec![true; n];
    let mut pairs = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best = (0usize, 0usize, f64::INFINITY);
        for (i, e) in estimates.iter().enumerate() {
            if !est_free[i] {
                continue;
            }
            for (j, t) in truth.iter().enumerate() {
                if !truth_free[j] {
                    continue;
                }
                let d = normalized_distance(e, t, spans);
                if d < best.2 {
                    best = (i, j, d);
                }
            }
        }
        est_free[best.0] = false;
        truth_free[best.1] = false;
        pairs.push((best.0, best.1));
    }

    let mut mse_delay = 0.0;
    let mut mse_aoa = 0.0;
    let mut mse_aod = 0.0;
    let mut mse_doppler = 0.0;
    let mut mse_amp = 0.0;
    let mut mse_ris_inc = 0.0;
    let mut mse_ris_ref = 0.0;
    let mut ris_count = 0usize;
    for &(i, j) in &pairs {
        let e = &estimates[i];
        let t = &truth[j];
        mse_delay += (e.delay_s - t.delay_s).powi(2);
        mse_aoa += wrap_angle(e.aoa_rad - t.aoa_rad).powi(2);
        mse_aod += wrap_angle(e.aod_rad - t.aod_rad).powi(2);
        mse_doppler += (e.doppler_hz - t.doppler_hz).powi(2);
        mse_amp += ((e.amplitude - t.amplitude).norm() / t.amplitude.norm()).powi(2);
        if let Some(t_ris) = t.ris {
            ris_count += 1;
            match e.ris {
                Some(e_ris) => {
                    mse_ris_inc += wrap_angle(e_ris.incident_rad - t_ris.incident_rad).powi(2);
                    mse_ris_ref += wrap_angle(e_ris.reflect_rad - t_ris.reflect_rad).powi(2);
                }
                // A missed classification counts as a full-span error.
                None => {
                    mse_ris_inc += spans.ris_incident_rad.powi(2);
                    mse_ris_ref += spans.ris_reflect_rad.powi(2);
                }
            }
        }
    }
    let n_f = n as f64;
    mse_delay /= n_f;
    mse_aoa /= n_f;
    mse_aod /= n_f;
    mse_doppler /= n_f;
    mse_amp /= n_f;

    let mut normalized = vec![
        mse_delay / spans.delay_s.powi(2),
        mse_aoa / spans.aoa_rad.powi(2),
        mse_aod / spans.aod_rad.powi(2),
        mse_doppler / spans.doppler_hz.powi(2),
    ];
    let (ris_inc, ris_ref) = if ris_count > 0 {
        let inc = mse_ris_inc / ris_count as f64;
        let refl = mse_ris_ref / ris_count as f64;
        normalized.push(inc / spans.ris_incident_rad.powi(2));
        normalized.push(refl / spans.ris_reflect_rad.powi(2));
        (Some(inc.sqrt()), Some(refl.sqrt()))
    } else {
        (None, None)
    };
    let aggregate = (normalized.iter().sum::<f64>() / normalized.len() as f64).sqrt();

    Ok(RmseeReport {
        delay_s: mse_delay.sqrt(),
        aoa_rad: mse_aoa.sqrt(),
        aod_rad: mse_aod.sqrt(),
        doppler_hz: mse_doppler.sqrt(),
        ris_incident_rad: ris_inc,
        ris_reflect_rad: ris_ref,
        amplitude_rel: mse_amp.sqrt(),
        aggregate,
    })
}

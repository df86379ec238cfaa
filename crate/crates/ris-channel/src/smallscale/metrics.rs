//! Channel-characteristic metrics: Doppler spread, delay spread, effective
//! rank and condition number, channel hardening, and reciprocity.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::rng::child_rng;
use crate::scene::{RisPanel, Scene};

use super::{ChannelSeries, SmallScaleError};

/// Relative singular-value threshold for the effective rank.
pub const EFFECTIVE_RANK_THRESHOLD: f64 = 1e-3;

/// RMS width of the Doppler power spectral density of a series, Hz.
///
/// The PSD is the periodogram averaged over Monte Carlo runs; the spread is
/// the power-weighted standard deviation of frequency around the centroid.
pub fn doppler_spread(series: &ChannelSeries) -> Result<f64, SmallScaleError> {
    let len = series.runs.first().map_or(0, |r| r.len());
    if len < 2 {
        return Err(SmallScaleError::Invalid(
            "doppler spread needs at least two snapshots".into(),
        ));
    }
    // Direct DFT periodogram; series are short enough that O(n^2) is fine.
    let mut psd = vec![0.0_f64; len];
    for run in &series.runs {
        for (bin, p) in psd.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, h) in run.iter().enumerate() {
                let phase = -std::f64::consts::TAU * bin as f64 * t as f64 / len as f64;
                acc += h * Complex64::from_polar(1.0, phase);
            }
            *p += acc.norm_sqr();
        }
    }
    let fs = 1.0 / series.sample_interval_s;
    // Map bins to signed frequencies in [-fs/2, fs/2).
    let freq = |bin: usize| -> f64 {
        let f = bin as f64 * fs / len as f64;
        if f >= fs / 2.0 {
            f - fs
        } else {
            f
        }
    };
    let total: f64 = psd.iter().sum();
    if total == 0.0 {
        return Err(SmallScaleError::Invalid(
            "all-zero series has no spectrum".into(),
        ));
    }
    let mean = psd
        .iter()
        .enumerate()
        .map(|(b, p)| p * freq(b))
        .sum::<f64>()
        / total;
    let var = psd
        .iter()
        .enumerate()
        .map(|(b, p)| p * (freq(b) - mean) * (freq(b) - mean))
        .sum::<f64>()
        / total;
    Ok(var.max(0.0).sqrt())
}

/// Power-weighted RMS delay spread of a tap set `(delay_s, power)`, seconds.
pub fn rms_delay_spread(taps: &[(f64, f64)]) -> Result<f64, SmallScaleError> {
    if taps.is_empty() {
        return Err(SmallScaleError::Invalid("empty tap set".into()));
    }
    let total: f64 = taps.iter().map(|(_, p)| p).sum();
    if total <= 0.0 {
        return Err(SmallScaleError::Invalid(
            "tap powers must be positive".into(),
        ));
    }
    let mean = taps.iter().map(|(d, p)| d * p).sum::<f64>() / total;
    let var = taps
        .iter()
        .map(|(d, p)| p * (d - mean) * (d - mean))
        .sum::<f64>()
        / total;
    Ok(var.max(0.0).sqrt())
}

/// Effective rank (singular values >= `1e-3 sigma_max`) and condition number
/// `sigma_max / sigma_min` of a channel matrix.
pub fn effective_rank_and_condition(
    h: &DMatrix<Complex64>,
) -> Result<(usize, f64), SmallScaleError> {
    if h.is_empty() {
        return Err(SmallScaleError::Invalid("empty matrix".into()));
    }
    let svd = h.clone().svd(false, false);
    let s = &svd.singular_values;
    let s_max = s.iter().cloned().fold(0.0_f64, f64::max);
    if s_max == 0.0 {
        return Err(SmallScaleError::Invalid("zero matrix has no rank".into()));
    }
    let rank = s
        .iter()
        .filter(|&&v| v >= EFFECTIVE_RANK_THRESHOLD * s_max)
        .count();
    let s_min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    let cond = if s_min > 0.0 {
        s_max / s_min
    } else {
        f64::INFINITY
    };
    Ok((rank, cond))
}

// ---------------------------------------------------------------------------
// Channel hardening
// ---------------------------------------------------------------------------

/// How the per-element cascaded links are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkModel {
    /// Deterministic unit links (SNR = Q^2 exactly when co-phased).
    Unit,
    /// i.i.d. circular Gaussian links of unit variance on both hops.
    Rayleigh,
}

/// RIS phase configuration used when composing the SNR.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseMode {
    /// Optimal co-phasing per draw: SNR = (sum |h_q||g_q|)^2.
    CoPhased,
    /// Independent uniform phases: no hardening, SNR grows like Q.
    Random,
}

/// Per-Q hardening statistics.
#[derive(Debug, Clone, Copy)]
pub struct HardeningStat {
    pub q: usize,
    /// Mean SNR (unit noise) for reference.
    pub mean_snr: f64,
    /// Mean of SNR / Q^2; constant in Q once the channel hardens.
    pub mean_snr_over_q2: f64,
    /// Var[SNR] / E[SNR]^2; goes to zero under hardening.
    pub variance_ratio: f64,
}

/// Monte Carlo hardening statistics of the cascaded single-antenna link for
/// each element count in `q_values`.
pub fn hardening_statistics(
    link_model: LinkModel,
    phase_mode: PhaseMode,
    q_values: &[usize],
    runs: usize,
    seed: u64,
) -> Result<Vec<HardeningStat>, SmallScaleError> {
    if runs < 100 {
        return Err(SmallScaleError::Invalid(format!(
            "hardening statistics need >= 100 runs, got {runs}"
        )));
    }
    let mut stats = Vec::with_capacity(q_values.len());
    for (qi, &q) in q_values.iter().enumerate() {
        if q == 0 {
            return Err(SmallScaleError::Invalid(
                "element count must be >= 1".into(),
            ));
        }
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for run in 0..runs {
            let mut rng = child_rng(seed, (qi * runs + run) as u64);
            let snr = match (link_model, phase_mode) {
                (LinkModel::Unit, PhaseMode::CoPhased) => (q * q) as f64,
                (LinkModel::Unit, PhaseMode::Random) => {
                    let mut h = Complex64::new(0.0, 0.0);
                    for _ in 0..q {
                        let phase: f64 = rand::Rng::random::<f64>(&mut rng);
                        h += Complex64::from_polar(1.0, phase * std::f64::consts::TAU);
                    }
                    h.norm_sqr()
                }
                (LinkModel::Rayleigh, mode) => {
                    let mut amp_sum = 0.0;
                    let mut random_sum = Complex64::new(0.0, 0.0);
                    for _ in 0..q {
                        let h = gaussian(&mut rng);
                        let g = gaussian(&mut rng);
                        match mode {
                            PhaseMode::CoPhased => amp_sum += h.norm() * g.norm(),
                            PhaseMode::Random => {
                                let phase: f64 = rand::Rng::random::<f64>(&mut rng);
                                random_sum += h
                                    * g
                                    * Complex64::from_polar(1.0, phase * std::f64::consts::TAU);
                            }
                        }
                    }
                    match mode {
                        PhaseMode::CoPhased => amp_sum * amp_sum,
                        PhaseMode::Random => random_sum.norm_sqr(),
                    }
                }
            };
            sum += snr;
            sum_sq += snr * snr;
        }
        let mean = sum / runs as f64;
        let var = (sum_sq / runs as f64 - mean * mean).max(0.0);
        stats.push(HardeningStat {
            q,
            mean_snr: mean,
            mean_snr_over_q2: mean / (q * q) as f64,
            variance_ratio: var / (mean * mean),
        });
    }
    Ok(stats)
}

fn gaussian(rng: &mut impl rand::Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) / 2f64.sqrt()
}

// ---------------------------------------------------------------------------
// Reciprocity
// ---------------------------------------------------------------------------

/// Forward and reverse evaluations of a path loss model on the same scene.
#[derive(Debug, Clone, Copy)]
pub struct ReciprocityReport {
    pub forward_db: f64,
    pub reverse_db: f64,
    pub max_abs_diff_db: f64,
}

/// Evaluate a model forward (Tx -> Rx) and reverse (Rx -> Tx) at a fixed
/// panel configuration and report the difference. Passive surfaces obey
/// reciprocity, so element-sum models come back identical; the simplified
/// physical-optics form does not (its incidence enters alone) and the
/// difference is reported, not judged.
pub fn reciprocity_check<F>(
    evaluate: F,
    scene: &Scene,
    panel: &RisPanel,
) -> Result<ReciprocityReport, SmallScaleError>
where
    F: Fn(&RisPanel, &Scene) -> f64,
{
    let reverse_scene = scene
        .swapped(panel)
        .map_err(|e| SmallScaleError::Invalid(format!("swapped scene failed: {e}")))?;
    let forward_db = evaluate(panel, scene);
    let reverse_db = evaluate(panel, &reverse_scene);
    Ok(ReciprocityReport {
        forward_db,
        reverse_db,
        max_abs_diff_db: (forward_db - reverse_db).abs(),
    })
}

//! Reduced time-varying ray simulator and temporal autocorrelation.
//!
//! Each ray contributes `sqrt(w_l) exp(j (2 pi f_{d,l} t + psi_l))` with
//! Doppler `f_{d,l} = (v / lambda) cos(AoA_l - heading)` and an initial phase
//! drawn uniformly per Monte Carlo run. Rays flagged as RIS-relayed can be
//! phase-tracked: an ideal zero-latency controller re-aligns them at every
//! snapshot to the instantaneous phase of the strongest ray, which is what a
//! real-time tunable surface does to the components it relays. With tracking
//! off, the baseline either keeps those rays with free-running phases
//! ([`RisBaseline::StaticPhase`]) or removes them entirely
//! ([`RisBaseline::Absent`]); which "without RIS" a study means is genuinely
//! ambiguous, so both are available.

use num_complex::Complex64;

use crate::rng::child_rng;
use crate::units::{wavelength, SPEED_OF_LIGHT};

use super::SmallScaleError;

/// One discrete ray of the scenario.
#[derive(Debug, Clone, Copy)]
pub struct Ray {
    /// Fraction of the total power carried by this ray; weights sum to 1.
    pub power_weight: f64,
    /// Azimuth of arrival, radians.
    pub aoa_rad: f64,
    /// Optional absolute delay (used by delay-spread metrics, not by the
    /// narrowband time series).
    pub delay_s: Option<f64>,
    /// True when the ray is relayed by the RIS and thus trackable.
    pub ris_relayed: bool,
}

/// Baseline behaviour of RIS-relayed rays when tracking is off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RisBaseline {
    /// Keep the rays, phases evolve freely (surface present, static random
    /// configuration).
    #[default]
    StaticPhase,
    /// Drop the rays entirely (no surface in the environment).
    Absent,
}

/// A time-varying fading scenario.
#[derive(Debug, Clone)]
pub struct FadingScenario {
    pub carrier_hz: f64,
    /// Receiver speed, m/s.
    pub speed_mps: f64,
    /// Receiver heading, radians.
    pub heading_rad: f64,
    pub rays: Vec<Ray>,
    /// Re-align RIS-relayed rays to the strongest ray every snapshot.
    pub ris_tracking: bool,
    /// What happens to RIS-relayed rays when tracking is off.
    pub ris_baseline: RisBaseline,
    /// LOS/NLOS power ratio of the scenario (metadata used by builders).
    pub k_factor: f64,
    pub snapshots: usize,
    pub runs: usize,
    pub sample_interval_s: f64,
    pub seed: u64,
}

impl FadingScenario {
    /// Maximum Doppler shift `f v / c` in Hz.
    pub fn max_doppler_hz(&self) -> f64 {
        self.carrier_hz * self.speed_mps / SPEED_OF_LIGHT
    }

    /// An isotropic ring of `count` equal-power rays with uniformly spaced
    /// arrival angles, optionally with a stronger ray in front of it. The
    /// classical scattering model whose ACF is `J0(2 pi f_d tau)`.
    #[allow(clippy::too_many_arguments)]
    pub fn ring(
        carrier_hz: f64,
        speed_mps: f64,
        count: usize,
        los_weight: f64,
        ris_flagged: usize,
        snapshots: usize,
        runs: usize,
        seed: u64,
    ) -> Self {
        let mut rays = Vec::with_capacity(count + 1);
        if los_weight > 0.0 {
            rays.push(Ray {
                power_weight: los_weight,
                aoa_rad: 0.0,
                delay_s: None,
                ris_relayed: false,
            });
        }
        let ring_weight = (1.0 - los_weight) / count as f64;
        for i in 0..count {
            rays.push(Ray {
                power_weight: ring_weight,
                aoa_rad: std::f64::consts::TAU * (i as f64 + 0.5) / count as f64,
                delay_s: None,
                ris_relayed: i < ris_flagged,
            });
        }
        let f_d = carrier_hz * speed_mps / SPEED_OF_LIGHT;
        FadingScenario {
            carrier_hz,
            speed_mps,
            heading_rad: 0.0,
            rays,
            ris_tracking: false,
            ris_baseline: RisBaseline::StaticPhase,
            k_factor: if los_weight > 0.0 {
                los_weight / (1.0 - los_weight)
            } else {
                0.0
            },
            snapshots,
            runs,
            sample_interval_s: 1.0 / (8.0 * f_d),
            seed,
        }
    }

    fn validate(&self) -> Result<(), SmallScaleError> {
        if self.rays.is_empty() {
            return Err(SmallScaleError::Invalid("scenario has no rays".into()));
        }
        if self.snapshots == 0 || self.runs == 0 {
            return Err(SmallScaleError::Invalid(
                "snapshots and runs must be >= 1".into(),
            ));
        }
        if self.k_factor < 0.0 {
            return Err(SmallScaleError::Invalid("k_factor must be >= 0".into()));
        }
        let total: f64 = self.rays.iter().map(|r| r.power_weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(SmallScaleError::WeightsNotNormalized(total));
        }
        let f_d = self.max_doppler_hz();
        if f_d > 0.0 {
            let guard = 1.0 / (8.0 * f_d);
            if self.sample_interval_s > guard * (1.0 + 1e-12) {
                return Err(SmallScaleError::SamplingGuard {
                    interval: self.sample_interval_s,
                    guard,
                });
            }
        }
        Ok(())
    }
}

/// A simulated narrowband channel coefficient over time, one row per Monte
/// Carlo run.
#[derive(Debug, Clone)]
pub struct ChannelSeries {
    /// `runs[r][t]` is the coefficient of run `r` at snapshot `t`.
    pub runs: Vec<Vec<Complex64>>,
    pub sample_interval_s: f64,
    pub seed: u64,
}

/// Simulate the scenario. Identical `(scenario, seed)` produce bit-identical
/// series; run `r` draws only from its own child stream.
pub fn simulate_time_varying_channel(
    scenario: &FadingScenario,
) -> Result<ChannelSeries, SmallScaleError> {
    scenario.validate()?;
    let lambda = wavelength(scenario.carrier_hz);
    let active: Vec<&Ray> = scenario
        .rays
        .iter()
        .filter(|r| {
            scenario.ris_tracking
                || scenario.ris_baseline == RisBaseline::StaticPhase
                || !r.ris_relayed
        })
        .collect();
    if active.is_empty() {
        return Err(SmallScaleError::Invalid(
            "baseline removed every ray".into(),
        ));
    }
    // Renormalize amplitudes when the Absent baseline dropped rays, so the
    // series keeps unit mean power.
    let active_power: f64 = active.iter().map(|r| r.power_weight).sum();
    let dopplers: Vec<f64> = active
        .iter()
        .map(|r| scenario.speed_mps / lambda * (r.aoa_rad - scenario.heading_rad).cos())
        .collect();
    let amplitudes: Vec<f64> = active
        .iter()
        .map(|r| (r.power_weight / active_power).sqrt())
        .collect();
    // Strongest ray = tracking reference (first on ties).
    let strongest = active
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.power_weight.partial_cmp(&b.1.power_weight).unwrap())
        .map(|(i, _)| i)
        .unwrap();

    let mut runs = Vec::with_capacity(scenario.runs);
    for run in 0..scenario.runs {
        let mut rng = child_rng(scenario.seed, run as u64);
        let psi: Vec<f64> = (0..active.len())
            .map(|_| rand::Rng::random::<f64>(&mut rng) * std::f64::consts::TAU)
            .collect();
        let mut series = Vec::with_capacity(scenario.snapshots);
        for t_idx in 0..scenario.snapshots {
            let t = t_idx as f64 * scenario.sample_interval_s;
            let ref_phase = std::f64::consts::TAU * dopplers[strongest] * t + psi[strongest];
            let mut h = Complex64::new(0.0, 0.0);
            for (l, ray) in active.iter().enumerate() {
                let phase = if scenario.ris_tracking && ray.ris_relayed && l != strongest {
                    ref_phase
                } else {
                    std::f64::consts::TAU * dopplers[l] * t + psi[l]
                };
                h += Complex64::from_polar(amplitudes[l], phase);
            }
            series.push(h);
        }
        runs.push(series);
    }
    Ok(ChannelSeries {
        runs,
        sample_interval_s: scenario.sample_interval_s,
        seed: scenario.seed,
    })
}

/// Temporal autocorrelation `ACF(k) = E[h(t) conj(h(t+k))] / E[|h|^2]`,
/// averaged over time origins and Monte Carlo runs. `ACF(0) = 1` by
/// construction.
pub fn temporal_acf(
    series: &ChannelSeries,
    max_lag: usize,
) -> Result<Vec<Complex64>, SmallScaleError> {
    let len = series.runs.first().map_or(0, |r| r.len());
    if len == 0 {
        return Err(SmallScaleError::Invalid("empty series".into()));
    }
    if max_lag >= len {
        return Err(SmallScaleError::Invalid(format!(
            "max_lag {max_lag} must be below the series length {len}"
        )));
    }
    let mut power = 0.0;
    let mut power_count = 0usize;
    for run in &series.runs {
        for h in run {
            power += h.norm_sqr();
            power_count += 1;
        }
    }
    if power == 0.0 {
        return Err(SmallScaleError::Invalid(
            "all-zero series has no ACF".into(),
        ));
    }
    let mean_power = power / power_count as f64;

    let mut acf = Vec::with_capacity(max_lag + 1);
    for k in 0..=max_lag {
        let mut corr = Complex64::new(0.0, 0.0);
        let mut count = 0usize;
        for run in &series.runs {
            for t in 0..run.len() - k {
                corr += run[t] * run[t + k].conj();
                count += 1;
            }
        }
        acf.push(corr / (count as f64 * mean_power));
    }
    Ok(acf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_ray_scenario(speed: f64) -> FadingScenario {
        FadingScenario {
            carrier_hz: 5.9e9,
            speed_mps: speed,
            heading_rad: 0.0,
            rays: vec![Ray {
                power_weight: 1.0,
                aoa_rad: 0.7,
                delay_s: None,
                ris_relayed: false,
            }],
            ris_tracking: false,
            ris_baseline: RisBaseline::StaticPhase,
            k_factor: 1.0,
            snapshots: 64,
            runs: 3,
            sample_interval_s: 1e-4,
            seed: 11,
        }
    }

    #[test]
    fn zero_speed_gives_constant_series() {
        let scenario = single_ray_scenario(0.0);
        let series = simulate_time_varying_channel(&scenario).unwrap();
        for run in &series.runs {
            for h in run {
                assert!((h - run[0]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn single_ray_traces_constant_magnitude_tone() {
        let mut scenario = single_ray_scenario(20.0);
        scenario.sample_interval_s = 1.0 / (8.0 * scenario.max_doppler_hz());
        let series = simulate_time_varying_channel(&scenario).unwrap();
        let f_d = scenario.speed_mps / wavelength(scenario.carrier_hz) * 0.7f64.cos();
        for run in &series.runs {
            for (t_idx, h) in run.iter().enumerate() {
                assert!((h.norm() - 1.0).abs() < 1e-12);
                let expected = run[0]
                    * Complex64::from_polar(
                        1.0,
                        std::f64::consts::TAU * f_d * t_idx as f64 * series.sample_interval_s,
                    );
                assert!((h - expected).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn sampling_guard_enforced() {
        let mut scenario = single_ray_scenario(30.0);
        scenario.sample_interval_s = 1.0; // hopelessly under-sampled
        assert!(matches!(
            simulate_time_varying_channel(&scenario),
            Err(SmallScaleError::SamplingGuard { .. })
        ));
    }

    #[test]
    fn weights_must_sum_to_one() {
        let mut scenario = single_ray_scenario(10.0);
        scenario.rays[0].power_weight = 0.7;
        assert!(matches!(
            simulate_time_varying_channel(&scenario),
            Err(SmallScaleError::WeightsNotNormalized(_))
        ));
    }

    #[test]
    fn series_is_reproducible() {
        let scenario = FadingScenario::ring(5.9e9, 25.0, 32, 0.2, 16, 100, 4, 77);
        let a = simulate_time_varying_channel(&scenario).unwrap();
        let b = simulate_time_varying_channel(&scenario).unwrap();
        for (ra, rb) in a.runs.iter().zip(&b.runs) {
            for (x, y) in ra.iter().zip(rb) {
                assert_eq!(x.re.to_bits(), y.re.to_bits());
                assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }
    }

    #[test]
    fn acf_is_one_at_zero_lag() {
        let scenario = FadingScenario::ring(5.9e9, 25.0, 16, 0.0, 0, 50, 8, 3);
        let series = simulate_time_varying_channel(&scenario).unwrap();
        let acf = temporal_acf(&series, 8).unwrap();
        assert!((acf[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn pure_tone_acf_has_unit_magnitude() {
        let mut scenario = single_ray_scenario(15.0);
        scenario.sample_interval_s = 1.0 / (8.0 * scenario.max_doppler_hz());
        scenario.runs = 2;
        scenario.snapshots = 128;
        let series = simulate_time_varying_channel(&scenario).unwrap();
        let acf = temporal_acf(&series, 32).unwrap();
        for (k, c) in acf.iter().enumerate() {
            assert!((c.norm() - 1.0).abs() < 1e-9, "|ACF({k})| = {}", c.norm());
        }
    }

    #[test]
    fn acf_rejects_lag_beyond_series() {
        let scenario = single_ray_scenario(0.0);
        let series = simulate_time_varying_channel(&scenario).unwrap();
        assert!(temporal_acf(&series, 64).is_err());
    }

    #[test]
    fn absent_baseline_drops_ris_rays() {
        let mut scenario = FadingScenario::ring(5.9e9, 25.0, 8, 0.2, 8, 16, 1, 5);
        scenario.ris_baseline = RisBaseline::Absent;
        let series = simulate_time_varying_channel(&scenario).unwrap();
        // Only the LOS ray remains: constant unit magnitude.
        for h in &series.runs[0] {
            assert!((h.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mean_power_matches_weights() {
        // Energy check: mean |h|^2 equals the summed weights (= 1).
        let scenario = FadingScenario::ring(5.9e9, 30.0, 24, 0.3, 0, 64, 500, 21);
        let series = simulate_time_varying_channel(&scenario).unwrap();
        let mut power = 0.0;
        let mut count = 0;
        for run in &series.runs {
            for h in run {
                power += h.norm_sqr();
                count += 1;
            }
        }
        let mean = power / count as f64;
        assert!((mean - 1.0).abs() < 0.02, "mean power {mean}");
    }

    #[test]
    fn tracking_stabilizes_the_channel() {
        let mut on = FadingScenario::ring(5.9e9, 25.0, 64, 0.25, 56, 128, 50, 9);
        on.ris_tracking = true;
        let mut off = on.clone();
        off.ris_tracking = false;
        let acf_on = temporal_acf(&simulate_time_varying_channel(&on).unwrap(), 24).unwrap();
        let acf_off = temporal_acf(&simulate_time_varying_channel(&off).unwrap(), 24).unwrap();
        for k in 1..=24 {
            assert!(
                acf_on[k].norm() > acf_off[k].norm(),
                "lag {k}: on {} vs off {}",
                acf_on[k].norm(),
                acf_off[k].norm()
            );
        }
    }
}

//! Synthetic sounding observations under K transmission modes.

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::rng::{child_rng, child_seed};

use super::{EstimationError, ModeSet, Mpc};

/// Sounding grid: subcarriers x snapshots x Rx elements x Tx elements, with
/// array pitches in wavelengths.
#[derive(Debug, Clone, Copy)]
pub struct ObsGrid {
    pub subcarriers: usize,
    pub subcarrier_spacing_hz: f64,
    pub snapshots: usize,
    pub snapshot_interval_s: f64,
    pub rx_elements: usize,
    pub tx_elements: usize,
    pub rx_pitch_wl: f64,
    pub tx_pitch_wl: f64,
}

impl Default for ObsGrid {
    fn default() -> Self {
        Self {
            subcarriers: 64,
            subcarrier_spacing_hz: 1e6,
            snapshots: 16,
            snapshot_interval_s: 1e-3,
            rx_elements: 8,
            tx_elements: 8,
            rx_pitch_wl: 0.5,
            tx_pitch_wl: 0.5,
        }
    }
}

impl ObsGrid {
    pub fn samples_per_mode(&self) -> usize {
        self.subcarriers * self.snapshots * self.rx_elements * self.tx_elements
    }

    pub fn validate(&self) -> Result<(), EstimationError> {
        if self.subcarriers == 0
            || self.snapshots == 0
            || self.rx_elements == 0
            || self.tx_elements == 0
        {
            return Err(EstimationError::Invalid(
                "degenerate observation grid".into(),
            ));
        }
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.subcarrier_spacing_hz) || !positive(self.snapshot_interval_s) {
            return Err(EstimationError::Invalid(
                "grid spacings must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Observed tensor `Y[k, s, p, u, v]`, flat row-major in that order.
#[derive(Debug, Clone)]
pub struct Observation {
    pub y: Vec<Complex64>,
    pub mode_count: usize,
    pub grid: ObsGrid,
    /// Per-sample SNR the noise was scaled for; `inf` means noiseless.
    pub snr_db: f64,
    pub seed: u64,
    /// Set when the mode set carried duplicate profiles (RIS paths then
    /// cannot be identified).
    pub duplicate_mode_warning: bool,
}

impl Observation {
    #[inline]
    pub fn index(&self, k: usize, s: usize, p: usize, u: usize, v: usize) -> usize {
        let g = &self.grid;
        (((k * g.subcarriers + s) * g.snapshots + p) * g.rx_elements + u) * g.tx_elements + v
    }
}

/// Per-path mode factor: the tile response for RIS paths, 1 otherwise.
pub(crate) fn mode_factors(path: &Mpc, modes: &ModeSet) -> Vec<Complex64> {
    match path.ris {
        Some(angles) => modes.responses(angles.incident_rad, angles.reflect_rad),
        None => vec![Complex64::new(1.0, 0.0); modes.len()],
    }
}

/// Synthesize `Y_k[s,p,u,v] = sum_l a_l g_k(l) e^{-j2pi f_s tau_l}
/// e^{j2pi nu_l t_p} a_rx[u] a_tx[v] + n` with i.i.d. circular Gaussian
/// noise scaled so the mean per-sample SNR matches `snr_db`
/// (`f64::INFINITY` turns noise off).
///
/// Noise for mode `k` is drawn from the child stream `(seed, k)`: growing
/// the mode set extends an observation without redrawing the shared modes,
/// which keeps sweeps over K comparable.
pub fn synthesize_observations(
    truth: &[Mpc],
    modes: &ModeSet,
    grid: ObsGrid,
    snr_db: f64,
    seed: u64,
) -> Result<Observation, EstimationError> {
    grid.validate()?;
    if truth.is_empty() {
        return Err(EstimationError::EmptyPaths);
    }
    for path in truth {
        path.validate()?;
    }
    let k_modes = modes.len();
    let per_mode = grid.samples_per_mode();
    let mut y = vec![Complex64::new(0.0, 0.0); k_modes * per_mode];

    for path in truth {
        let g = mode_factors(path, modes);
        let es: Vec<Complex64> = (0..grid.subcarriers)
            .map(|s| {
                let f_s = s as f64 * grid.subcarrier_spacing_hz;
                Complex64::from_polar(1.0, -std::f64::consts::TAU * f_s * path.delay_s)
            })
            .collect();
        let ep: Vec<Complex64> = (0..grid.snapshots)
            .map(|p| {
                let t_p = p as f64 * grid.snapshot_interval_s;
                Complex64::from_polar(1.0, std::f64::consts::TAU * path.doppler_hz * t_p)
            })
            .collect();
        let eu: Vec<Complex64> = (0..grid.rx_elements)
            .map(|u| {
                Complex64::from_polar(
                    1.0,
                    std::f64::consts::TAU * grid.rx_pitch_wl * u as f64 * path.aoa_rad.sin(),
                )
            })
            .collect();
        let ev: Vec<Complex64> = (0..grid.tx_elements)
            .map(|v| {
                Complex64::from_polar(
                    1.0,
                    std::f64::consts::TAU * grid.tx_pitch_wl * v as f64 * path.aod_rad.sin(),
                )
            })
            .collect();
        let mut idx = 0;
        for gk in g.iter().take(k_modes) {
            let a = path.amplitude * gk;
            for s in &es {
                let as_ = a * s;
                for p in &ep {
                    let asp = as_ * p;
                    for u in &eu {
                        let aspu = asp * u;
                        for v in &ev {
                            y[idx] += aspu * v;
                            idx += 1;
                        }
                    }
                }
            }
        }
    }

    if snr_db.is_finite() {
        let signal_power: f64 = y.iter().map(|c| c.norm_sqr()).sum::<f64>() / y.len() as f64;
        let sigma = (signal_power / crate::units::db_to_power(snr_db)).sqrt();
        let noise_master = child_seed(seed, 0x4E4F_4953);
        for k in 0..k_modes {
            let mut rng = child_rng(noise_master, k as u64);
            for sample in y[k * per_mode..(k + 1) * per_mode].iter_mut() {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                *sample += Complex64::new(re, im) * (sigma / 2f64.sqrt());
            }
        }
    }

    Ok(Observation {
        y,
        mode_count: k_modes,
        grid,
        snr_db,
        seed,
        duplicate_mode_warning: modes.has_duplicate_profiles(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::{ModePanel, RisAngles, TransmissionMode};

    fn small_grid() -> ObsGrid {
        ObsGrid {
            subcarriers: 8,
            snapshots: 4,
            rx_elements: 3,
            tx_elements: 2,
            ..ObsGrid::default()
        }
    }

    fn los_path() -> Mpc {
        Mpc {
            amplitude: Complex64::new(1.0, 0.5),
            delay_s: 2e-7,
            aoa_rad: 0.4,
            aod_rad: -0.3,
            doppler_hz: 120.0,
            ris: None,
        }
    }

    #[test]
    fn non_ris_paths_identical_across_modes_when_noiseless() {
        let modes = ModeSet::uniform_sweep(ModePanel::default(), 3).unwrap();
        let obs =
            synthesize_observations(&[los_path()], &modes, small_grid(), f64::INFINITY, 1).unwrap();
        let per_mode = obs.grid.samples_per_mode();
        for i in 0..per_mode {
            let a = obs.y[i];
            for k in 1..3 {
                let b = obs.y[k * per_mode + i];
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn ris_path_scales_by_mode_response_ratio() {
        let panel = ModePanel::default();
        let modes = ModeSet::uniform_sweep(panel, 2).unwrap();
        let angles = RisAngles {
            incident_rad: 0.2,
            reflect_rad: 0.3,
        };
        let path = Mpc {
            ris: Some(angles),
            ..los_path()
        };
        let obs = synthesize_observations(&[path], &modes, small_grid(), f64::INFINITY, 2).unwrap();
        let g = modes.responses(angles.incident_rad, angles.reflect_rad);
        let ratio = g[1] / g[0];
        let per_mode = obs.grid.samples_per_mode();
        for i in 0..per_mode {
            if obs.y[i].norm() > 1e-12 {
                let observed = obs.y[per_mode + i] / obs.y[i];
                assert!((observed - ratio).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn noiseless_single_path_is_separable_rank_one() {
        // Y[s, p] grid collapses to an outer product: every 2x2 minor of the
        // (s, p) slice vanishes.
        let modes = ModeSet::uniform_sweep(ModePanel::default(), 1).unwrap();
        let obs =
            synthesize_observations(&[los_path()], &modes, small_grid(), f64::INFINITY, 3).unwrap();
        let at = |s: usize, p: usize| obs.y[obs.index(0, s, p, 0, 0)];
        for s in 1..obs.grid.subcarriers {
            for p in 1..obs.grid.snapshots {
                let minor = at(0, 0) * at(s, p) - at(s, 0) * at(0, p);
                assert!(minor.norm() < 1e-10, "minor ({s},{p}) = {}", minor.norm());
            }
        }
    }

    #[test]
    fn noise_matches_requested_snr() {
        let modes = ModeSet::uniform_sweep(ModePanel::default(), 2).unwrap();
        let grid = ObsGrid {
            subcarriers: 32,
            snapshots: 16,
            ..small_grid()
        };
        let clean = synthesize_observations(&[los_path()], &modes, grid, f64::INFINITY, 4).unwrap();
        let noisy = synthesize_observations(&[los_path()], &modes, grid, 10.0, 4).unwrap();
        let signal: f64 = clean.y.iter().map(|c| c.norm_sqr()).sum::<f64>() / clean.y.len() as f64;
        let noise: f64 = clean
            .y
            .iter()
            .zip(&noisy.y)
            .map(|(c, n)| (n - c).norm_sqr())
            .sum::<f64>()
            / clean.y.len() as f64;
        let snr_db = 10.0 * (signal / noise).log10();
        assert!((snr_db - 10.0).abs() < 0.5, "snr {snr_db}");
    }

    #[test]
    fn noise_streams_nest_across_mode_counts() {
        // The K = 2 observation is a prefix of the K = 3 one up to the
        // signal difference: identical noise on the shared modes.
        let panel = ModePanel::default();
        let path = los_path();
        let grid = small_grid();
        let obs2 = synthesize_observations(
            &[path],
            &ModeSet::new(
                panel,
                vec![
                    TransmissionMode::steered(0, panel, 0.1),
                    TransmissionMode::steered(1, panel, 0.2),
                ],
            )
            .unwrap(),
            grid,
            10.0,
            7,
        )
        .unwrap();
        let obs3 = synthesize_observations(
            &[path],
            &ModeSet::new(
                panel,
                vec![
                    TransmissionMode::steered(0, panel, 0.1),
                    TransmissionMode::steered(1, panel, 0.2),
                    TransmissionMode::steered(2, panel, 0.3),
                ],
            )
            .unwrap(),
            grid,
            10.0,
            7,
        )
        .unwrap();
        // Non-RIS path: signal identical across modes, so noise difference
        // between the two observations is only the sigma rescaling (mean
        // signal power is mode-independent here, so sigma matches exactly).
        let per_mode = grid.samples_per_mode();
        for i in 0..2 * per_mode {
            assert!((obs2.y[i] - obs3.y[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn duplicate_modes_raise_the_warning_flag() {
        let panel = ModePanel::default();
        let dup = ModeSet::new(
            panel,
            vec![
                TransmissionMode::steered(0, panel, 0.2),
                TransmissionMode::steered(1, panel, 0.2),
            ],
        )
        .unwrap();
        let obs =
            synthesize_observations(&[los_path()], &dup, small_grid(), f64::INFINITY, 5).unwrap();
        assert!(obs.duplicate_mode_warning);
        let distinct = ModeSet::uniform_sweep(panel, 2).unwrap();
        let obs = synthesize_observations(&[los_path()], &distinct, small_grid(), f64::INFINITY, 5)
            .unwrap();
        assert!(!obs.duplicate_mode_warning);
    }

    #[test]
    fn empty_truth_rejected() {
        let modes = ModeSet::uniform_sweep(ModePanel::default(), 2).unwrap();
        assert!(matches!(
            synthesize_observations(&[], &modes, small_grid(), 10.0, 0),
            Err(EstimationError::EmptyPaths)
        ));
    }
}

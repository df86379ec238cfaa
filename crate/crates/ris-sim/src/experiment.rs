//! Experiment kinds: each turns a validated config into a result table.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use ris_channel::estimation::{
    estimate_mpc_parameters, rmsee, synthesize_observations, EstimatorConfig, Grid1d, ModePanel,
    ModeSet, Mpc, ObsGrid, ParameterSpans, RisAngles,
};
use ris_channel::pathloss::{
    design_phase_profile, evaluate_path_loss, PathLossError, PathLossModel, PhaseProfileSpec,
};
use ris_channel::rng::{child_rng, child_seed};
use ris_channel::scene::{
    ellipse_foci, ellipse_sweep_positions, Antenna, Point3, Quantization, RisPanel, RisPose, Scene,
    SceneError, Vec3,
};
use ris_channel::smallscale::{
    doppler_spread, effective_rank_and_condition, hardening_statistics, keyhole_channel,
    rms_delay_spread, simulate_time_varying_channel, temporal_acf, FadingScenario, LinkModel,
    PhaseMode, Ray, RisBaseline, SmallScaleError,
};
use ris_channel::units::dbi_to_linear;

use crate::config::{
    EstimateConfig, ExperimentConfig, ExperimentKind, LinkModelConfig, MetricsConfig, ModelConfig,
    PanelConfig, PhaseModeConfig, ProfileConfig, RisBaselineConfig, ScenarioConfig, SceneConfig,
    SweepConfig,
};
use crate::table::{Cell, Column, Provenance, ResultTable};

/// Runtime failures while executing an experiment.
#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("scene error: {0}")]
    Scene(#[from] SceneError),
    #[error("path loss error: {0}")]
    PathLoss(#[from] PathLossError),
    #[error("channel error: {0}")]
    SmallScale(#[from] SmallScaleError),
    #[error("estimation error: {0}")]
    Estimation(#[from] ris_channel::estimation::EstimationError),
    #[error("{0}")]
    Invalid(String),
}

/// Run the configured experiment, stamping `provenance` into the table.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    provenance: Provenance,
) -> Result<ResultTable, ExperimentError> {
    match cfg.kind {
        ExperimentKind::Pathloss => run_pathloss(cfg, provenance),
        ExperimentKind::SweepEllipse => run_sweep_ellipse(cfg, provenance),
        ExperimentKind::PhaseGain => run_phase_gain(cfg, provenance),
        ExperimentKind::Acf => run_acf(cfg, provenance),
        ExperimentKind::Hardening => run_hardening(cfg, provenance),
        ExperimentKind::Estimate => run_estimate(cfg, provenance),
        ExperimentKind::Metrics => run_metrics(cfg, provenance),
    }
}

// ---------------------------------------------------------------------------
// Config -> library conversions
// ---------------------------------------------------------------------------

fn to_point(p: [f64; 3]) -> Point3 {
    Point3::new(p[0], p[1], p[2])
}

fn build_panel(cfg: Option<&PanelConfig>) -> Result<RisPanel, ExperimentError> {
    match cfg {
        // Placeholder for scalar models that never touch the element grid.
        None => Ok(RisPanel::new(1, 1, 0.01, 0.01)?),
        Some(p) => {
            let gain = match p.element_gain_dbi {
                Some(dbi) => dbi_to_linear(dbi),
                None => 2.0 * (p.pattern_exponent + 1.0),
            };
            let mut panel = RisPanel::with_params(
                p.m,
                p.n,
                p.dx_m,
                p.dy_m,
                p.pattern_exponent,
                gain,
                p.amplitude,
                p.efficiency,
            )?;
            if let Some(bits) = p.quantization_bits {
                panel.quantization = Quantization::Bits(bits);
            }
            Ok(panel)
        }
    }
}

fn build_scene(scene: &SceneConfig, panel: &RisPanel) -> Result<Scene, ExperimentError> {
    let pose = RisPose::from_normal(to_point(scene.ris.center_m), vec3(scene.ris.normal))?;
    let tx = Antenna::new(
        to_point(scene.tx.position_m),
        dbi_to_linear(scene.tx.gain_dbi),
    );
    let rx = Antenna::new(
        to_point(scene.rx.position_m),
        dbi_to_linear(scene.rx.gain_dbi),
    );
    Ok(Scene::build(tx, rx, panel, pose, scene.frequency_hz)?)
}

fn vec3(v: [f64; 3]) -> Vec3 {
    Vec3::new(v[0], v[1], v[2])
}

fn profile_spec(profile: &ProfileConfig, scene: &Scene) -> PhaseProfileSpec {
    match profile {
        ProfileConfig::Uniform { value_deg } => PhaseProfileSpec::Uniform(value_deg.to_radians()),
        ProfileConfig::FarFieldBeam { theta_deg, phi_deg } => PhaseProfileSpec::FarFieldBeam {
            theta_rad: theta_deg.to_radians(),
            phi_rad: phi_deg.to_radians(),
        },
        ProfileConfig::NearFieldFocus {} => PhaseProfileSpec::focus_on_rx(scene),
        ProfileConfig::Random { seed } => PhaseProfileSpec::Random { seed: *seed },
        ProfileConfig::Custom { values_deg } => {
            PhaseProfileSpec::Custom(values_deg.iter().map(|v| v.to_radians()).collect())
        }
    }
}

/// Design and install the configured profile (honoring quantization).
fn apply_profile(
    panel: &mut RisPanel,
    profile: Option<&ProfileConfig>,
    scene: &Scene,
) -> Result<(), ExperimentError> {
    if let Some(p) = profile {
        let phases = design_phase_profile(&profile_spec(p, scene), panel, scene)?;
        let phases = ris_channel::pathloss::apply_quantization(&phases, panel.quantization);
        panel.set_phase_profile(phases)?;
    }
    Ok(())
}

fn model_to_lib(model: &ModelConfig) -> PathLossModel {
    match model {
        ModelConfig::FreeSpace => PathLossModel::FreeSpace,
        ModelConfig::TwoRayRis { q_elements } => PathLossModel::TwoRayRis {
            q_elements: *q_elements,
        },
        ModelConfig::PoFarField {
            a_m,
            b_m,
            desired_reflection_deg,
        } => PathLossModel::PoFarField {
            a_m: *a_m,
            b_m: *b_m,
            desired_reflection_rad: desired_reflection_deg.to_radians(),
        },
        ModelConfig::TangGeneral => PathLossModel::TangGeneral,
        ModelConfig::TangFarBf => PathLossModel::TangFarBeamforming,
        ModelConfig::TangNearBf => PathLossModel::TangNearBeamforming,
        ModelConfig::TangNearBc => PathLossModel::TangNearBroadcast,
        ModelConfig::RefinedFar => PathLossModel::RefinedFar,
        ModelConfig::RefinedNear => PathLossModel::RefinedNear,
        ModelConfig::SingleElement {
            n,
            m,
            gamma_amplitude,
            gamma_phase_deg,
        } => PathLossModel::SingleElement {
            n: *n,
            m: *m,
            gamma: Complex64::from_polar(*gamma_amplitude, gamma_phase_deg.to_radians()),
        },
        ModelConfig::Ellingson => PathLossModel::Ellingson {
            amplitudes: None,
            phases: None,
        },
        ModelConfig::TileRcs {
            g_magnitude,
            g_phase_deg,
        } => PathLossModel::TileRcs {
            tile_response: Complex64::from_polar(*g_magnitude, g_phase_deg.to_radians()),
        },
    }
}

fn build_fading_scenario(
    cfg: &ScenarioConfig,
    ris_tracking: bool,
    seed: u64,
) -> Result<FadingScenario, ExperimentError> {
    let mut rays = Vec::new();
    let mut los_power = 0.0;
    if let Some(los) = &cfg.los {
        los_power = los.power;
        rays.push(Ray {
            power_weight: los.power,
            aoa_rad: los.aoa_deg.to_radians(),
            delay_s: None,
            ris_relayed: los.ris_relayed,
        });
    }
    if let Some(ring) = &cfg.ring {
        let w = ring.total_power / ring.count as f64;
        for i in 0..ring.count {
            rays.push(Ray {
                power_weight: w,
                aoa_rad: std::f64::consts::TAU * (i as f64 + 0.5) / ring.count as f64,
                delay_s: None,
                ris_relayed: i < ring.ris_flagged,
            });
        }
    }
    for ray in &cfg.rays {
        rays.push(Ray {
            power_weight: ray.power,
            aoa_rad: ray.aoa_deg.to_radians(),
            delay_s: ray.delay_s,
            ris_relayed: ray.ris_relayed,
        });
    }
    let f_d = cfg.carrier_hz * cfg.speed_mps / ris_channel::units::SPEED_OF_LIGHT;
    let sample_interval =
        cfg.sample_interval_s
            .unwrap_or(if f_d > 0.0 { 1.0 / (8.0 * f_d) } else { 1e-3 });
    Ok(FadingScenario {
        carrier_hz: cfg.carrier_hz,
        speed_mps: cfg.speed_mps,
        heading_rad: cfg.heading_deg.to_radians(),
        rays,
        ris_tracking,
        ris_baseline: match cfg.ris_baseline {
            RisBaselineConfig::StaticPhase => RisBaseline::StaticPhase,
            RisBaselineConfig::Absent => RisBaseline::Absent,
        },
        k_factor: if los_power > 0.0 && los_power < 1.0 {
            los_power / (1.0 - los_power)
        } else {
            0.0
        },
        snapshots: cfg.snapshots,
        runs: cfg.runs,
        sample_interval_s: sample_interval,
        seed,
    })
}

// ---------------------------------------------------------------------------
// Kinds
// ---------------------------------------------------------------------------

fn run_pathloss(
    cfg: &ExperimentConfig,
    provenance: Provenance,
) -> Result<ResultTable, ExperimentError> {
    let scene_cfg = cfg.scene.as_ref().expect("validated");
    let mut panel = build_panel(cfg.panel.as_ref())?;
    let scene = build_scene(scene_cfg, &panel)?;
    apply_profile(
        &mut panel,
        cfg.panel.as_ref().and_then(|p| p.profile.as_ref()),
        &scene,
    )?;

    let mut table = ResultTable::new(
        vec![
            Column::new("model", "-"),
            Column::new("path_loss_db", "dB"),
            Column::new("received_power_dbm", "dBm"),
        ],
        provenance,
    );
    for model in &cfg.models {
        let result = evaluate_path_loss(&model_to_lib(model), &panel, &scene)?;
        table.push_row(vec![
            model.label().into(),
            Cell::Num(result.path_loss_db),
            Cell::Num(result.received_power_dbm(cfg.tx_power_dbm)),
        ]);
    }
    Ok(table)
}

fn run_sweep_ellipse(
    cfg: &ExperimentConfig,
    provenance: Provenance,
) -> Result<ResultTable, ExperimentError> {
    let sweep: &SweepConfig = cfg.sweep.as_ref().expect("validated");
    let positions = ellipse_sweep_positions(
        sweep.d_tr_m,
        sweep.semi_major_m,
        sweep.d1_start_m,
        sweep.d1_end_m,
        sweep.steps,
    )?;
    let (tx_pos, rx_pos) = ellipse_foci(sweep.d_tr_m);
    let tx = Antenna::new(tx_pos, dbi_to_linear(sweep.tx_gain_dbi));
    let rx = Antenna::new(rx_pos, dbi_to_linear(sweep.rx_gain_dbi));

    let mut columns = vec![Column::new("d1_m", "m")];
    for model in &cfg.models {
        columns.push(Column::new(&format!("{}_db", model.label()), "dB"));
    }
    let mut table = ResultTable::new(columns, provenance);

    for position in positions {
        let mut panel = build_panel(cfg.panel.as_ref())?;
        let pose = RisPose::from_normal(position, vec3(sweep.panel_normal))?;
        let scene = Scene::build(tx, rx, &panel, pose, sweep.frequency_hz)?;
        // Re-design the configured profile at every position: a tracking
        // surface re-focuses as it moves.
        if let Some(p) = cfg.panel.as_ref().and_then(|p| p.profile.as_ref()) {
            let phases = design_phase_profile(&profile_spec(p, &scene), &panel, &scene)?;
            let phases = ris_channel::pathloss::apply_quantization(&phases, panel.quantization);
            panel.set_phase_profile(phases)?;
        }
        let mut row = vec![Cell::Num(scene.d1_m)];
        for model in &cfg.models {
            let result = evaluate_path_loss(&model_to_lib(model), &panel, &scene)?;
            row.push(Cell::Num(result.path_loss_db));
        }
        table.push_row(row);
    }
    Ok(table)
}

fn run_phase_gain(
    cfg: &ExperimentConfig,
    provenance: Provenance,
) -> Result<ResultTable, ExperimentError> {
    let scene_cfg = cfg.scene.as_ref().expect("validated");
    let base_panel = build_panel(cfg.panel.as_ref())?;
    let scene = build_scene(scene_cfg, &base_panel)?;

    let mut table = ResultTable::new(
        vec![
            Column::new("profile", "-"),
            Column::new("path_loss_db", "dB"),
            Column::new("received_power_dbm", "dBm"),
        ],
        provenance,
    );
    for profile in &cfg.profiles {
        let mut panel = base_panel.clone();
        let phases = design_phase_profile(&profile_spec(profile, &scene), &panel, &scene)?;
        let phases = ris_channel::pathloss::apply_quantization(&phases, panel.quantization);
        panel.set_phase_profile(phases)?;
        let result = evaluate_path_loss(&PathLossModel::TangGeneral, &panel, &scene)?;
        table.push_row(vec![
            profile.label().into(),
            Cell::Num(result.path_loss_db),
            Cell::Num(result.received_power_dbm(cfg.tx_power_dbm)),
        ]);
    }
    Ok(table)
}

fn run_acf(cfg: &ExperimentConfig, provenance: Provenance) -> Result<ResultTable, ExperimentError> {
    let scenario_cfg = cfg.scenario.as_ref().expect("validated");
    let on = build_fading_scenario(scenario_cfg, true, cfg.seed)?;
    let off = build_fading_scenario(scenario_cfg, false, cfg.seed)?;
    let max_lag = scenario_cfg.max_lag.unwrap_or(scenario_cfg.snapshots / 4);

    let series_on = simulate_time_varying_channel(&on)?;
    let series_off = simulate_time_varying_channel(&off)?;
    let acf_on = temporal_acf(&series_on, max_lag)?;
    let acf_off = temporal_acf(&series_off, max_lag)?;

    let mut table = ResultTable::new(
        vec![
            Column::new("lag_s", "s"),
            Column::new("abs_acf_ris_on", "1"),
            Column::new("abs_acf_ris_off", "1"),
        ],
        provenance,
    );
    for k in 0..=max_lag {
        table.push_row(vec![
            Cell::Num(k as f64 * series_on.sample_interval_s),
            Cell::Num(acf_on[k].norm()),
            Cell::Num(acf_off[k].norm()),
        ]);
    }
    Ok(table)
}

fn run_hardening(
    cfg: &ExperimentConfig,
    provenance: Provenance,
) -> Result<ResultTable, ExperimentError> {
    let h = cfg.hardening.as_ref().expect("validated");
    let link = match h.link_model {
        LinkModelConfig::Rayleigh => LinkModel::Rayleigh,
        LinkModelConfig::Unit => LinkModel::Unit,
    };
    let mode = match h.phase_mode {
        PhaseModeConfig::CoPhased => PhaseMode::CoPhased,
        PhaseModeConfig::Random => PhaseMode::Random,
    };
    let stats = hardening_statistics(link, mode, &h.q_values, h.runs, cfg.seed)?;
    let mut table = ResultTable::new(
        vec![
            Column::new("q", "1"),
            Column::new("snr_over_q2", "1"),
            Column::new("var_ratio", "1"),
        ],
        provenance,
    );
    for s in stats {
        table.push_row(vec![
            Cell::Num(s.q as f64),
            Cell::Num(s.mean_snr_over_q2),
            Cell::Num(s.variance_ratio),
        ]);
    }
    Ok(table)
}

fn run_metrics(
    cfg: &ExperimentConfig,
    provenance: Provenance,
) -> Result<ResultTable, ExperimentError> {
    let scenario_cfg = cfg.scenario.as_ref().expect("validated");
    let metrics: &MetricsConfig = cfg.metrics.as_ref().expect("validated");

    let scenario = build_fading_scenario(scenario_cfg, false, cfg.seed)?;
    let series = simulate_time_varying_channel(&scenario)?;
    let spread = doppler_spread(&series)?;

    let taps: Vec<(f64, f64)> = metrics.taps.iter().map(|t| (t.delay_s, t.power)).collect();
    let delay_spread = rms_delay_spread(&taps)?;

    let m = &metrics.matrix;
    let ula = ris_channel::smallscale::ula_response;
    let direct = keyhole_channel(
        &[ula(m.rx_elements, m.direct.aoa_deg.to_radians())],
        &[ula(m.tx_elements, m.direct.aod_deg.to_radians())],
        &[Complex64::new(m.direct.amplitude, 0.0)],
    )?;
    let h = match &m.ris {
        Some(d) => {
            let dyad = keyhole_channel(
                &[ula(m.rx_elements, d.aoa_deg.to_radians())],
                &[ula(m.tx_elements, d.aod_deg.to_radians())],
                &[Complex64::new(d.amplitude, 0.0)],
            )?;
            &direct + &dyad
        }
        None => direct,
    };
    let (rank, cond) = effective_rank_and_condition(&h)?;

    let mut table = ResultTable::new(
        vec![
            Column::new("doppler_spread_hz", "Hz"),
            Column::new("rms_delay_spread_s", "s"),
            Column::new("effective_rank", "1"),
            Column::new("condition_number", "1"),
        ],
        provenance,
    );
    table.push_row(vec![
        Cell::Num(spread),
        Cell::Num(delay_spread),
        Cell::Num(rank as f64),
        Cell::Num(cond),
    ]);
    Ok(table)
}

// ---------------------------------------------------------------------------
// Estimation experiment
// ---------------------------------------------------------------------------

fn estimator_config(e: &EstimateConfig) -> EstimatorConfig {
    let grid = sounding_grid(e);
    let delay_max = 0.8 / grid.subcarrier_spacing_hz;
    let doppler_max = 0.45 / grid.snapshot_interval_s;
    EstimatorConfig {
        delay_grid: Grid1d::new(0.0, delay_max, e.estimator.delay_points),
        aoa_grid: Grid1d::new(
            -90f64.to_radians(),
            90f64.to_radians(),
            e.estimator.angle_points,
        ),
        aod_grid: Grid1d::new(
            -90f64.to_radians(),
            90f64.to_radians(),
            e.estimator.angle_points,
        ),
        doppler_grid: Grid1d::new(-doppler_max, doppler_max, e.estimator.doppler_points),
        ris_incident_grid: Grid1d::new(
            -75f64.to_radians(),
            75f64.to_radians(),
            e.estimator.ris_angle_points,
        ),
        ris_reflect_grid: Grid1d::new(
            -75f64.to_radians(),
            75f64.to_radians(),
            e.estimator.ris_angle_points,
        ),
        classify_epsilon: e.estimator.classify_epsilon,
        max_outer_iterations: e.estimator.max_iterations,
        relative_tolerance: 1e-4,
    }
}

fn sounding_grid(e: &EstimateConfig) -> ObsGrid {
    ObsGrid {
        subcarriers: e.grid.subcarriers,
        subcarrier_spacing_hz: e.grid.subcarrier_spacing_hz,
        snapshots: e.grid.snapshots,
        snapshot_interval_s: e.grid.snapshot_interval_s,
        rx_elements: e.grid.rx_elements,
        tx_elements: e.grid.tx_elements,
        rx_pitch_wl: e.grid.rx_pitch_wl,
        tx_pitch_wl: e.grid.tx_pitch_wl,
    }
}

/// Draw one ground-truth path set. All randomness comes from `trial_seed`,
/// so every (SNR, K) cell of a trial sees the same geometry (common random
/// numbers); only the RIS amplitude normalization depends on the mode set.
pub fn generate_truth(
    trial_seed: u64,
    paths: usize,
    ris_paths: usize,
    config: &EstimatorConfig,
    modes: &ModeSet,
) -> Vec<Mpc> {
    let mut rng = child_rng(trial_seed, 0x7281);
    let delay_lo = config.delay_grid.start + 0.1 * config.delay_grid.span();
    let delay_hi = config.delay_grid.start + 0.7 * config.delay_grid.span();
    let min_delay_gap = 3.0 * config.delay_grid.step();
    let min_angle_gap = 3.0 * config.aoa_grid.step();
    let angle_limit = 60f64.to_radians();

    // Rejection-sample separated delays and arrival angles; give up on the
    // separation (not the draw) if a crowded config starves the sampler.
    let mut delays: Vec<f64> = Vec::with_capacity(paths);
    let mut aoas: Vec<f64> = Vec::with_capacity(paths);
    for _ in 0..paths {
        let mut delay = delay_lo;
        for attempt in 0..10_000 {
            delay = delay_lo + rng.random::<f64>() * (delay_hi - delay_lo);
            if attempt == 9_999 || delays.iter().all(|d| (d - delay).abs() >= min_delay_gap) {
                break;
            }
        }
        delays.push(delay);
        let mut aoa = 0.0;
        for attempt in 0..10_000 {
            aoa = -angle_limit + rng.random::<f64>() * 2.0 * angle_limit;
            if attempt == 9_999 || aoas.iter().all(|a| (a - aoa).abs() >= min_angle_gap) {
                break;
            }
        }
        aoas.push(aoa);
    }

    let doppler_lo = config.doppler_grid.start + 0.15 * config.doppler_grid.span();
    let doppler_hi = config.doppler_grid.start + 0.85 * config.doppler_grid.span();
    (0..paths)
        .map(|i| {
            let aod = -angle_limit + rng.random::<f64>() * 2.0 * angle_limit;
            let doppler = doppler_lo + rng.random::<f64>() * (doppler_hi - doppler_lo);
            let phase = rng.random::<f64>() * std::f64::consts::TAU;
            // The last `ris_paths` paths bounce off the surface at symmetric
            // angles (the identifiable ridge representative), amplitude
            // normalized to unit RMS across the modes.
            if i >= paths - ris_paths {
                let theta = (rng.random::<f64>() * 50.0 - 25.0).to_radians();
                let g = modes.responses(theta, theta);
                let rms = (g.iter().map(|x| x.norm_sqr()).sum::<f64>() / g.len() as f64).sqrt();
                Mpc {
                    amplitude: Complex64::from_polar(1.0 / rms.max(1e-12), phase),
                    delay_s: delays[i],
                    aoa_rad: aoas[i],
                    aod_rad: aod,
                    doppler_hz: doppler,
                    ris: Some(RisAngles {
                        incident_rad: theta,
                        reflect_rad: theta,
                    }),
                }
            } else {
                Mpc {
                    amplitude: Complex64::from_polar(1.0, phase),
                    delay_s: delays[i],
                    aoa_rad: aoas[i],
                    aod_rad: aod,
                    doppler_hz: doppler,
                    ris: None,
                }
            }
        })
        .collect()
}

/// Mean aggregate RMSEE of one (SNR, K) cell over the configured trials.
pub fn estimate_cell_rmsee(
    e: &EstimateConfig,
    snr_db: f64,
    k_modes: usize,
    seed: u64,
) -> Result<f64, ExperimentError> {
    let grid = sounding_grid(e);
    let config = estimator_config(e);
    let panel = ModePanel {
        m_count: e.mode_panel.m,
        n_count: e.mode_panel.n,
        pitch_wl: e.mode_panel.pitch_wl,
        ..ModePanel::default()
    };
    let modes = ModeSet::uniform_sweep(panel, k_modes)?;
    let spans = ParameterSpans::from(&config);

    let per_trial: Result<Vec<f64>, ExperimentError> = (0..e.trials)
        .into_par_iter()
        .map(|trial| {
            let trial_seed = child_seed(seed, trial as u64);
            let truth = generate_truth(
                trial_seed,
                e.truth.paths,
                e.truth.ris_paths,
                &config,
                &modes,
            );
            let obs = synthesize_observations(&truth, &modes, grid, snr_db, trial_seed)?;
            let result = estimate_mpc_parameters(&obs, truth.len(), &modes, &config)?;
            let estimates: Vec<Mpc> = result.paths.iter().map(|p| p.mpc).collect();
            let report = rmsee(&estimates, &truth, &spans)?;
            Ok(report.aggregate)
        })
        .collect();
    let per_trial = per_trial?;
    Ok(per_trial.iter().sum::<f64>() / per_trial.len() as f64)
}

fn run_estimate(
    cfg: &ExperimentConfig,
    provenance: Provenance,
) -> Result<ResultTable, ExperimentError> {
    let e = cfg.estimate.as_ref().expect("validated");
    let mut table = ResultTable::new(
        vec![
            Column::new("snr_db", "dB"),
            Column::new("k", "1"),
            Column::new("rmsee", "1"),
        ],
        provenance,
    );
    for &snr in &e.snr_db {
        for &k in &e.modes {
            let mean = estimate_cell_rmsee(e, snr, k, cfg.seed)?;
            table.push_row(vec![Cell::Num(snr), Cell::Num(k as f64), Cell::Num(mean)]);
        }
    }
    Ok(table)
}

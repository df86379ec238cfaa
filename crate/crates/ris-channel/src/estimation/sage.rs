//! SAGE-style maximum-likelihood estimation of multipath parameters.
//!
//! The estimator alternates over paths: subtract everything else from the
//! observation, maximize the matched-filter objective of the remaining path
//! by successive 1-D grid searches over (delay, AoA, AoD, Doppler) with one
//! parabolic refinement each, fit per-mode amplitudes by least squares,
//! classify the path as RIS-interacting from its across-mode amplitude
//! variation, and — when flagged — maximize
//! `|sum_k a_k conj(g_k(ti,tr))|^2 / sum_k |g_k(ti,tr)|^2` over the RIS
//! angle grid.
//!
//! For the azimuth-cut tile response the RIS objective depends on the pair
//! only through `u = sin(ti) + sin(tr)` (the element-pattern factor cancels
//! in the normalization), so the pair itself is not identifiable: the whole
//! curve `sin(ti) + sin(tr) = u` scores the same. After the grid search the
//! estimator refines `u` parabolically and reports the symmetric ridge
//! representative `ti = tr = asin(u/2)`.

use num_complex::Complex64;

use super::forward::{ObsGrid, Observation};
use super::{EstimationError, ModeSet, Mpc, RisAngles};

/// Uniform 1-D search grid.
#[derive(Debug, Clone, Copy)]
pub struct Grid1d {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid1d {
    pub fn new(start: f64, stop: f64, points: usize) -> Self {
        Self {
            start,
            stop,
            points,
        }
    }

    pub fn step(&self) -> f64 {
        if self.points > 1 {
            (self.stop - self.start) / (self.points - 1) as f64
        } else {
            0.0
        }
    }

    pub fn span(&self) -> f64 {
        self.stop - self.start
    }

    pub fn value(&self, i: usize) -> f64 {
        self.start + self.step() * i as f64
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(move |i| self.value(i))
    }
}

/// Estimator settings; defaults follow the sounding grid.
#[derive(Debug, Clone)]
pub struct EstimatorConfig {
    pub delay_grid: Grid1d,
    pub aoa_grid: Grid1d,
    pub aod_grid: Grid1d,
    pub doppler_grid: Grid1d,
    pub ris_incident_grid: Grid1d,
    pub ris_reflect_grid: Grid1d,
    /// Across-mode amplitude variance threshold for RIS classification.
    pub classify_epsilon: f64,
    pub max_outer_iterations: usize,
    /// Stop when the residual energy improves less than this, relatively.
    pub relative_tolerance: f64,
}

impl EstimatorConfig {
    /// Default grids covering the identifiable ranges of `grid`:
    /// delay over 80% of the ambiguity `1/df` (128 points), angles over
    /// [-90, 90] degrees (181), Doppler over 90% of +-1/(2 dt) (61), RIS
    /// angles over [-75, 75] degrees (61 each).
    pub fn defaults_for(grid: &ObsGrid) -> Self {
        let delay_max = 0.8 / grid.subcarrier_spacing_hz;
        let doppler_max = 0.45 / grid.snapshot_interval_s;
        Self {
            delay_grid: Grid1d::new(0.0, delay_max, 128),
            aoa_grid: Grid1d::new(-90f64.to_radians(), 90f64.to_radians(), 181),
            aod_grid: Grid1d::new(-90f64.to_radians(), 90f64.to_radians(), 181),
            doppler_grid: Grid1d::new(-doppler_max, doppler_max, 61),
            ris_incident_grid: Grid1d::new(-75f64.to_radians(), 75f64.to_radians(), 61),
            ris_reflect_grid: Grid1d::new(-75f64.to_radians(), 75f64.to_radians(), 61),
            classify_epsilon: 0.05,
            max_outer_iterations: 20,
            relative_tolerance: 1e-4,
        }
    }
}

/// One estimated path.
#[derive(Debug, Clone)]
pub struct EstimatedPath {
    pub mpc: Mpc,
    pub ris_flagged: bool,
    /// Least-squares amplitude under each transmission mode.
    pub mode_amplitudes: Vec<Complex64>,
}

/// Estimator output: always exactly the requested model order.
#[derive(Debug, Clone)]
pub struct EstimationResult {
    pub paths: Vec<EstimatedPath>,
    pub iterations: usize,
    pub residual_energy: f64,
    /// Residual energy after initialization and after each outer iteration.
    pub residual_history: Vec<f64>,
}

/// RIS flag from per-mode amplitude estimates: flagged when the normalized
/// across-mode variance `Var|a_k| / mean|a_k|^2` exceeds `epsilon`. With a
/// single mode there is nothing to compare and the path is never flagged.
pub fn classify_ris_paths(mode_amplitudes: &[Complex64], epsilon: f64) -> bool {
    if mode_amplitudes.len() < 2 {
        return false;
    }
    let mags: Vec<f64> = mode_amplitudes.iter().map(|a| a.norm()).collect();
    let mean = mags.iter().sum::<f64>() / mags.len() as f64;
    if mean <= 0.0 {
        return false;
    }
    let var = mags.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / mags.len() as f64;
    var / (mean * mean) > epsilon
}

// ---------------------------------------------------------------------------
// Internal machinery
// ---------------------------------------------------------------------------

/// Per-dimension unit-modulus signature vectors of one parameter tuple.
#[derive(Clone)]
struct Signature {
    es: Vec<Complex64>,
    ep: Vec<Complex64>,
    eu: Vec<Complex64>,
    ev: Vec<Complex64>,
}

fn signature(grid: &ObsGrid, delay: f64, aoa: f64, aod: f64, doppler: f64) -> Signature {
    let tau = std::f64::consts::TAU;
    Signature {
        es: (0..grid.subcarriers)
            .map(|s| {
                Complex64::from_polar(1.0, -tau * s as f64 * grid.subcarrier_spacing_hz * delay)
            })
            .collect(),
        ep: (0..grid.snapshots)
            .map(|p| {
                Complex64::from_polar(1.0, tau * doppler * p as f64 * grid.snapshot_interval_s)
            })
            .collect(),
        eu: (0..grid.rx_elements)
            .map(|u| Complex64::from_polar(1.0, tau * grid.rx_pitch_wl * u as f64 * aoa.sin()))
            .collect(),
        ev: (0..grid.tx_elements)
            .map(|v| Complex64::from_polar(1.0, tau * grid.tx_pitch_wl * v as f64 * aod.sin()))
            .collect(),
    }
}

struct PathState {
    delay: f64,
    aoa: f64,
    aod: f64,
    doppler: f64,
    sig: Signature,
    mode_amps: Vec<Complex64>,
    ris_flagged: bool,
    ris_angles: Option<RisAngles>,
}

/// Which dimension a projection keeps.
#[derive(Clone, Copy, PartialEq)]
enum Dim {
    Delay,
    Aoa,
    Aod,
    Doppler,
}

/// Add (`sign = +1`) or subtract (`sign = -1`) a path's contribution.
fn apply_contribution(y: &mut [Complex64], grid: &ObsGrid, state: &PathState, sign: f64) {
    let mut idx = 0;
    for amp in &state.mode_amps {
        let a = amp * sign;
        for s in &state.sig.es {
            let as_ = a * s;
            for p in &state.sig.ep {
                let asp = as_ * p;
                for u in &state.sig.eu {
                    let aspu = asp * u;
                    for v in &state.sig.ev {
                        y[idx] += aspu * v;
                        idx += 1;
                    }
                }
            }
        }
    }
    debug_assert_eq!(idx, grid.samples_per_mode() * state.mode_amps.len());
}

/// Project the residual onto all dimensions except `keep`, using the
/// signature's conjugate phasors on the collapsed dimensions. Returns one
/// vector per mode with the kept dimension's length.
fn project(y: &[Complex64], grid: &ObsGrid, sig: &Signature, keep: Dim) -> Vec<Vec<Complex64>> {
    let (s_len, p_len, u_len, v_len) = (
        grid.subcarriers,
        grid.snapshots,
        grid.rx_elements,
        grid.tx_elements,
    );
    let modes = y.len() / grid.samples_per_mode();
    let kept_len = match keep {
        Dim::Delay => s_len,
        Dim::Doppler => p_len,
        Dim::Aoa => u_len,
        Dim::Aod => v_len,
    };
    let mut out = vec![vec![Complex64::new(0.0, 0.0); kept_len]; modes];
    let mut idx = 0;
    for proj in out.iter_mut().take(modes) {
        for s in 0..s_len {
            let ws = if keep == Dim::Delay {
                Complex64::new(1.0, 0.0)
            } else {
                sig.es[s].conj()
            };
            for p in 0..p_len {
                let wsp = if keep == Dim::Doppler {
                    ws
                } else {
                    ws * sig.ep[p].conj()
                };
                for u in 0..u_len {
                    let wspu = if keep == Dim::Aoa {
                        wsp
                    } else {
                        wsp * sig.eu[u].conj()
                    };
                    for v in 0..v_len {
                        let w = if keep == Dim::Aod {
                            wspu
                        } else {
                            wspu * sig.ev[v].conj()
                        };
                        let kept_idx = match keep {
                            Dim::Delay => s,
                            Dim::Doppler => p,
                            Dim::Aoa => u,
                            Dim::Aod => v,
                        };
                        proj[kept_idx] += y[idx] * w;
                        idx += 1;
                    }
                }
            }
        }
    }
    out
}

/// Matched-filter objective of a candidate value on a kept-dimension
/// projection: `sum_k |sum_i proj[k][i] conj(phasor_i(value))|^2`.
fn objective(proj: &[Vec<Complex64>], grid: &ObsGrid, dim: Dim, value: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut total = 0.0;
    for mode_proj in proj {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, z) in mode_proj.iter().enumerate() {
            // conj of the signature phasor for this dimension.
            let phase = match dim {
                Dim::Delay => tau * i as f64 * grid.subcarrier_spacing_hz * value,
                Dim::Doppler => -tau * value * i as f64 * grid.snapshot_interval_s,
                Dim::Aoa => -tau * grid.rx_pitch_wl * i as f64 * value.sin(),
                Dim::Aod => -tau * grid.tx_pitch_wl * i as f64 * value.sin(),
            };
            acc += z * Complex64::from_polar(1.0, phase);
        }
        total += acc.norm_sqr();
    }
    total
}

/// Grid search plus one parabolic refinement; the previous value is kept as
/// a candidate so the objective never decreases.
fn search_dim(
    proj: &[Vec<Complex64>],
    grid: &ObsGrid,
    dim: Dim,
    search: &Grid1d,
    previous: Option<f64>,
) -> f64 {
    let mut best_idx = 0;
    let mut best_val = search.value(0);
    let mut best_obj = f64::NEG_INFINITY;
    for (i, v) in search.values().enumerate() {
        let obj = objective(proj, grid, dim, v);
        if obj > best_obj {
            best_obj = obj;
            best_idx = i;
            best_val = v;
        }
    }
    // Parabolic refinement on the grid peak when it is interior.
    if best_idx > 0 && best_idx + 1 < search.points {
        let y0 = objective(proj, grid, dim, search.value(best_idx - 1));
        let y1 = best_obj;
        let y2 = objective(proj, grid, dim, search.value(best_idx + 1));
        let denom = y0 - 2.0 * y1 + y2;
        if denom < 0.0 {
            let delta = 0.5 * (y0 - y2) / denom;
            if delta.abs() <= 0.5 {
                let refined = search.value(best_idx) + delta * search.step();
                let obj = objective(proj, grid, dim, refined);
                if obj > best_obj {
                    best_obj = obj;
                    best_val = refined;
                }
            }
        }
    }
    if let Some(prev) = previous {
        if objective(proj, grid, dim, prev) > best_obj {
            return prev;
        }
    }
    best_val
}

/// Least-squares per-mode amplitudes of a signature against the residual.
fn mode_amplitudes(y: &[Complex64], grid: &ObsGrid, sig: &Signature) -> Vec<Complex64> {
    let proj = project(y, grid, sig, Dim::Delay);
    let norm = grid.samples_per_mode() as f64;
    proj.iter()
        .map(|per_s| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (s, z) in per_s.iter().enumerate() {
                acc += z * sig.es[s].conj();
            }
            acc / norm
        })
        .collect()
}

/// Residual energy `||y||^2`.
fn energy(y: &[Complex64]) -> f64 {
    y.iter().map(|c| c.norm_sqr()).sum()
}

// ---------------------------------------------------------------------------
// RIS angle estimation
// ---------------------------------------------------------------------------

struct RisObjective<'a> {
    modes: &'a ModeSet,
}

impl RisObjective<'_> {
    fn value(&self, amps: &[Complex64], ti: f64, tr: f64) -> f64 {
        let g = self.modes.responses(ti, tr);
        let denom: f64 = g.iter().map(|x| x.norm_sqr()).sum();
        if denom <= 1e-300 {
            return 0.0;
        }
        let num: Complex64 = amps.iter().zip(&g).map(|(a, gk)| a * gk.conj()).sum();
        num.norm_sqr() / denom
    }

    /// Symmetric-ridge parametrization `ti = tr = asin(u/2)`.
    fn value_at_u(&self, amps: &[Complex64], u: f64) -> f64 {
        let theta = (u / 2.0).clamp(-1.0, 1.0).asin();
        self.value(amps, theta, theta)
    }
}

/// Grid-search the RIS angle objective, then canonicalize along the
/// unidentifiable ridge: refine `u = sin(ti) + sin(tr)` parabolically and
/// report the symmetric representative.
fn estimate_ris_angles(
    amps: &[Complex64],
    modes: &ModeSet,
    incident_grid: &Grid1d,
    reflect_grid: &Grid1d,
) -> RisAngles {
    let obj = RisObjective { modes };
    let mut best = (0.0, f64::NEG_INFINITY);
    for ti in incident_grid.values() {
        for tr in reflect_grid.values() {
            let j = obj.value(amps, ti, tr);
            if j > best.1 {
                best = (ti.sin() + tr.sin(), j);
            }
        }
    }
    let (mut u_best, mut j_best) = best;
    // Refine u on the symmetric section of the ridge.
    let du = (incident_grid.stop.sin() - incident_grid.start.sin())
        / (incident_grid.points.max(2) - 1) as f64;
    let y0 = obj.value_at_u(amps, u_best - du);
    let y1 = obj.value_at_u(amps, u_best);
    let y2 = obj.value_at_u(amps, u_best + du);
    if y1 >= j_best {
        j_best = y1;
    }
    let denom = y0 - 2.0 * y1 + y2;
    if denom < 0.0 {
        let delta = 0.5 * (y0 - y2) / denom;
        if delta.abs() <= 1.0 {
            let u_ref = u_best + delta * du;
            if obj.value_at_u(amps, u_ref) >= j_best {
                u_best = u_ref;
            }
        }
    }
    let theta = (u_best / 2.0).clamp(-1.0, 1.0).asin();
    RisAngles {
        incident_rad: theta,
        reflect_rad: theta,
    }
}

// ---------------------------------------------------------------------------
// Main loop
// ---------------------------------------------------------------------------

/// Run the SAGE loop for `model_order` paths.
pub fn estimate_mpc_parameters(
    obs: &Observation,
    model_order: usize,
    modes: &ModeSet,
    config: &EstimatorConfig,
) -> Result<EstimationResult, EstimationError> {
    let grid = &obs.grid;
    let min_dim = grid
        .subcarriers
        .min(grid.snapshots)
        .min(grid.rx_elements)
        .min(grid.tx_elements);
    if model_order == 0 || model_order > min_dim {
        return Err(EstimationError::ModelOrder {
            l: model_order,
            min_dim,
        });
    }
    if modes.len() != obs.mode_count {
        return Err(EstimationError::ModeCount {
            obs: obs.mode_count,
            set: modes.len(),
        });
    }

    let mut residual = obs.y.clone();
    let mut paths: Vec<PathState> = Vec::with_capacity(model_order);

    // Successive cancellation: initialize paths strongest-first.
    for _ in 0..model_order {
        let state = init_path(&residual, grid, modes, config);
        apply_contribution(&mut residual, grid, &state, -1.0);
        paths.push(state);
    }

    let mut history = vec![energy(&residual)];
    let mut iterations = 0;
    for _iter in 0..config.max_outer_iterations {
        iterations += 1;
        for l in 0..paths.len() {
            let mut state = paths.remove(l);
            apply_contribution(&mut residual, grid, &state, 1.0);
            refine_path(&mut state, &residual, grid, modes, config);
            apply_contribution(&mut residual, grid, &state, -1.0);
            paths.insert(l, state);
        }
        let e = energy(&residual);
        let prev = *history.last().unwrap();
        history.push(e);
        if prev > 0.0 && (prev - e) / prev < config.relative_tolerance {
            break;
        }
    }

    let result_paths = paths
        .into_iter()
        .map(|state| {
            let amplitude = structured_amplitude(&state, modes);
            EstimatedPath {
                mpc: Mpc {
                    amplitude,
                    delay_s: state.delay,
                    aoa_rad: state.aoa,
                    aod_rad: state.aod,
                    doppler_hz: state.doppler,
                    ris: state.ris_angles,
                },
                ris_flagged: state.ris_flagged,
                mode_amplitudes: state.mode_amps,
            }
        })
        .collect();

    Ok(EstimationResult {
        paths: result_paths,
        iterations,
        residual_energy: *history.last().unwrap(),
        residual_history: history,
    })
}

/// Structured amplitude: plain mean over modes for ordinary paths, least
/// squares against the estimated tile responses for RIS paths.
fn structured_amplitude(state: &PathState, modes: &ModeSet) -> Complex64 {
    match state.ris_angles {
        Some(angles) => {
            let g = modes.responses(angles.incident_rad, angles.reflect_rad);
            let denom: f64 = g.iter().map(|x| x.norm_sqr()).sum();
            if denom <= 1e-300 {
                return state.mode_amps.iter().sum::<Complex64>() / state.mode_amps.len() as f64;
            }
            state
                .mode_amps
                .iter()
                .zip(&g)
                .map(|(a, gk)| a * gk.conj())
                .sum::<Complex64>()
                / denom
        }
        None => state.mode_amps.iter().sum::<Complex64>() / state.mode_amps.len() as f64,
    }
}

/// Initialize one path from the residual: incoherent 1-D searches that
/// collapse already-estimated dimensions, then a full coherent refinement
/// cycle.
fn init_path(
    residual: &[Complex64],
    grid: &ObsGrid,
    modes: &ModeSet,
    config: &EstimatorConfig,
) -> PathState {
    let tau_c = std::f64::consts::TAU;
    let modes_n = residual.len() / grid.samples_per_mode();
    let (s_len, p_len, u_len, v_len) = (
        grid.subcarriers,
        grid.snapshots,
        grid.rx_elements,
        grid.tx_elements,
    );

    // Delay: incoherent over (mode, p, u, v).
    let rows = modes_n * p_len * u_len * v_len;
    let mut s_rows = vec![Complex64::new(0.0, 0.0); rows * s_len];
    let mut idx = 0;
    for k in 0..modes_n {
        for s in 0..s_len {
            for puv in 0..p_len * u_len * v_len {
                let row = k * p_len * u_len * v_len + puv;
                s_rows[row * s_len + s] = residual[idx];
                idx += 1;
            }
        }
    }
    let mut delay = config.delay_grid.value(0);
    let mut best = f64::NEG_INFINITY;
    for cand in config.delay_grid.values() {
        let phasors: Vec<Complex64> = (0..s_len)
            .map(|s| {
                Complex64::from_polar(1.0, tau_c * s as f64 * grid.subcarrier_spacing_hz * cand)
            })
            .collect();
        let mut obj = 0.0;
        for row in 0..rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for s in 0..s_len {
                acc += s_rows[row * s_len + s] * phasors[s];
            }
            obj += acc.norm_sqr();
        }
        if obj > best {
            best = obj;
            delay = cand;
        }
    }

    // Collapse s at the delay estimate: t1[k, p, u, v].
    let es: Vec<Complex64> = (0..s_len)
        .map(|s| Complex64::from_polar(1.0, tau_c * s as f64 * grid.subcarrier_spacing_hz * delay))
        .collect();
    let mut t1 = vec![Complex64::new(0.0, 0.0); modes_n * p_len * u_len * v_len];
    let mut idx = 0;
    for k in 0..modes_n {
        for es_s in &es {
            for puv in 0..p_len * u_len * v_len {
                t1[k * p_len * u_len * v_len + puv] += residual[idx] * es_s;
                idx += 1;
            }
        }
    }

    // AoA: coherent in s, incoherent over (mode, p, v).
    let mut aoa = 0.0;
    let mut best = f64::NEG_INFINITY;
    for cand in config.aoa_grid.values() {
        let phasors: Vec<Complex64> = (0..u_len)
            .map(|u| Complex64::from_polar(1.0, -tau_c * grid.rx_pitch_wl * u as f64 * cand.sin()))
            .collect();
        let mut obj = 0.0;
        for kp in 0..modes_n * p_len {
            for v in 0..v_len {
                let mut acc = Complex64::new(0.0, 0.0);
                for (u, ph) in phasors.iter().enumerate() {
                    acc += t1[(kp * u_len + u) * v_len + v] * ph;
                }
                obj += acc.norm_sqr();
            }
        }
        if obj > best {
            best = obj;
            aoa = cand;
        }
    }

    // Collapse u: t2[k, p, v].
    let cu: Vec<Complex64> = (0..u_len)
        .map(|u| Complex64::from_polar(1.0, -tau_c * grid.rx_pitch_wl * u as f64 * aoa.sin()))
        .collect();
    let mut t2 = vec![Complex64::new(0.0, 0.0); modes_n * p_len * v_len];
    for kp in 0..modes_n * p_len {
        for u in 0..u_len {
            for v in 0..v_len {
                t2[kp * v_len + v] += t1[(kp * u_len + u) * v_len + v] * cu[u];
            }
        }
    }

    // AoD: incoherent over (mode, p).
    let mut aod = 0.0;
    let mut best = f64::NEG_INFINITY;
    for cand in config.aod_grid.values() {
        let phasors: Vec<Complex64> = (0..v_len)
            .map(|v| Complex64::from_polar(1.0, -tau_c * grid.tx_pitch_wl * v as f64 * cand.sin()))
            .collect();
        let mut obj = 0.0;
        for kp in 0..modes_n * p_len {
            let mut acc = Complex64::new(0.0, 0.0);
            for (v, ph) in phasors.iter().enumerate() {
                acc += t2[kp * v_len + v] * ph;
            }
            obj += acc.norm_sqr();
        }
        if obj > best {
            best = obj;
            aod = cand;
        }
    }

    // Collapse v: t3[k, p].
    let cv: Vec<Complex64> = (0..v_len)
        .map(|v| Complex64::from_polar(1.0, -tau_c * grid.tx_pitch_wl * v as f64 * aod.sin()))
        .collect();
    let mut t3 = vec![Complex64::new(0.0, 0.0); modes_n * p_len];
    for kp in 0..modes_n * p_len {
        for v in 0..v_len {
            t3[kp] += t2[kp * v_len + v] * cv[v];
        }
    }

    // Doppler: coherent per mode.
    let mut doppler = 0.0;
    let mut best = f64::NEG_INFINITY;
    for cand in config.doppler_grid.values() {
        let mut obj = 0.0;
        for k in 0..modes_n {
            let mut acc = Complex64::new(0.0, 0.0);
            for p in 0..p_len {
                let ph =
                    Complex64::from_polar(1.0, -tau_c * cand * p as f64 * grid.snapshot_interval_s);
                acc += t3[k * p_len + p] * ph;
            }
            obj += acc.norm_sqr();
        }
        if obj > best {
            best = obj;
            doppler = cand;
        }
    }

    let mut state = PathState {
        delay,
        aoa,
        aod,
        doppler,
        sig: signature(grid, delay, aoa, aod, doppler),
        mode_amps: vec![Complex64::new(0.0, 0.0); modes_n],
        ris_flagged: false,
        ris_angles: None,
    };
    refine_path(&mut state, residual, grid, modes, config);
    state
}

/// One coherent coordinate-ascent cycle on a path against the residual with
/// that path excluded, plus amplitude fit, classification, and RIS angles.
fn refine_path(
    state: &mut PathState,
    residual: &[Complex64],
    grid: &ObsGrid,
    modes: &ModeSet,
    config: &EstimatorConfig,
) {
    let proj = project(residual, grid, &state.sig, Dim::Delay);
    state.delay = search_dim(
        &proj,
        grid,
        Dim::Delay,
        &config.delay_grid,
        Some(state.delay),
    );
    state.sig = signature(grid, state.delay, state.aoa, state.aod, state.doppler);

    let proj = project(residual, grid, &state.sig, Dim::Aoa);
    state.aoa = search_dim(&proj, grid, Dim::Aoa, &config.aoa_grid, Some(state.aoa));
    state.sig = signature(grid, state.delay, state.aoa, state.aod, state.doppler);

    let proj = project(residual, grid, &state.sig, Dim::Aod);
    state.aod = search_dim(&proj, grid, Dim::Aod, &config.aod_grid, Some(state.aod));
    state.sig = signature(grid, state.delay, state.aoa, state.aod, state.doppler);

    let proj = project(residual, grid, &state.sig, Dim::Doppler);
    state.doppler = search_dim(
        &proj,
        grid,
        Dim::Doppler,
        &config.doppler_grid,
        Some(state.doppler),
    );
    state.sig = signature(grid, state.delay, state.aoa, state.aod, state.doppler);

    state.mode_amps = mode_amplitudes(residual, grid, &state.sig);
    state.ris_flagged = classify_ris_paths(&state.mode_amps, config.classify_epsilon);
    state.ris_angles = if state.ris_flagged {
        Some(estimate_ris_angles(
            &state.mode_amps,
            modes,
            &config.ris_incident_grid,
            &config.ris_reflect_grid,
        ))
    } else {
        None
    };
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::{synthesize_observations, ModePanel};

    fn test_grid() -> ObsGrid {
        ObsGrid {
            subcarriers: 32,
            subcarrier_spacing_hz: 1e6,
            snapshots: 8,
            snapshot_interval_s: 1e-3,
            rx_elements: 4,
            tx_elements: 4,
            rx_pitch_wl: 0.5,
            tx_pitch_wl: 0.5,
        }
    }

    fn test_config(grid: &ObsGrid) -> EstimatorConfig {
        let mut c = EstimatorConfig::defaults_for(grid);
        c.delay_grid = Grid1d::new(0.0, 0.8 / grid.subcarrier_spacing_hz, 64);
        c.aoa_grid = Grid1d::new(-90f64.to_radians(), 90f64.to_radians(), 91);
        c.aod_grid = c.aoa_grid;
        c.doppler_grid = Grid1d::new(-450.0, 450.0, 31);
        c
    }

    fn on_grid_path(config: &EstimatorConfig) -> Mpc {
        Mpc {
            amplitude: Complex64::new(0.8, -0.6),
            delay_s: config.delay_grid.value(17),
            aoa_rad: config.aoa_grid.value(55),
            aod_rad: config.aod_grid.value(30),
            doppler_hz: config.doppler_grid.value(20),
            ris: None,
        }
    }

    #[test]
    fn noiseless_on_grid_single_path_recovers_exactly() {
        let grid = test_grid();
        let config = test_config(&grid);
        let truth = on_grid_path(&config);
        let modes = ModeSet::uniform_sweep(ModePanel::default(), 4).unwrap();
        let obs = synthesize_observations(&[truth], &modes, grid, f64::INFINITY, 1).unwrap();
        let result = estimate_mpc_parameters(&obs, 1, &modes, &config).unwrap();
        let est = &result.paths[0].mpc;
        assert!((est.delay_s - truth.delay_s).abs() < 1e-12 * config.delay_grid.span());
        assert!((est.aoa_rad - truth.aoa_rad).abs() < 1e-9);
        assert!((est.aod_rad - truth.aod_rad).abs() < 1e-9);
        assert!((est.doppler_hz - truth.doppler_hz).abs() < 1e-6);
        assert!((est.amplitude - truth.amplitude).norm() < 1e-9);
        assert!(!result.paths[0].ris_flagged);
        assert!(result.residual_energy < 1e-12);
    }

    #[test]
    fn classify_needs_variation() {
        let flat = vec![Complex64::new(1.0, 0.0); 4];
        assert!(!classify_ris_paths(&flat, 0.05));
        let varied = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.1, 0.0),
            Complex64::new(0.9, 0.0),
            Complex64::new(0.2, 0.0),
        ];
        assert!(classify_ris_paths(&varied, 0.05));
        // A single mode can never be classified.
        assert!(!classify_ris_paths(&[Complex64::new(1.0, 0.0)], 0.05));
    }

    #[test]
    fn raising_epsilon_never_adds_flags() {
        // Monotone ROC: the flag set shrinks as epsilon grows.
        let mut rng = crate::rng::child_rng(3, 0);
        for _ in 0..200 {
            let amps: Vec<Complex64> = (0..5)
                .map(|_| {
                    Complex64::from_polar(
                        rand::Rng::random::<f64>(&mut rng),
                        rand::Rng::random::<f64>(&mut rng),
                    )
                })
                .collect();
            let mut last = true;
            for eps in [0.01, 0.05, 0.2, 1.0] {
                let flagged = classify_ris_paths(&amps, eps);
                if !last {
                    assert!(!flagged, "flag reappeared at eps {eps}");
                }
                last = flagged;
            }
        }
    }

    #[test]
    fn model_order_beyond_grid_rejected() {
        let grid = test_grid();
        let config = test_config(&grid);
        let modes = ModeSet::uniform_sweep(ModePanel::default(), 2).unwrap();
        let obs = synthesize_observations(&[on_grid_path(&config)], &modes, grid, f64::INFINITY, 1)
            .unwrap();
        let err = estimate_mpc_parameters(&obs, 5, &modes, &config).unwrap_err();
        assert!(matches!(
            err,
            EstimationError::ModelOrder { l: 5, min_dim: 4 }
        ));
    }

    #[test]
    fn mode_count_mismatch_rejected() {
        let grid = test_grid();
        let config = test_config(&grid);
        let modes4 = ModeSet::uniform_sweep(ModePanel::default(), 4).unwrap();
        let modes5 = ModeSet::uniform_sweep(ModePanel::default(), 5).unwrap();
        let obs =
            synthesize_observations(&[on_grid_path(&config)], &modes4, grid, f64::INFINITY, 1)
                .unwrap();
        assert!(matches!(
            estimate_mpc_parameters(&obs, 1, &modes5, &config),
            Err(EstimationError::ModeCount { obs: 4, set: 5 })
        ));
    }

    #[test]
    fn residual_energy_non_increasing() {
        let grid = test_grid();
        let config = test_config(&grid);
        let modes = ModeSet::uniform_sweep(ModePanel::default(), 4).unwrap();
        let truth = vec![
            Mpc {
                amplitude: Complex64::new(1.0, 0.2),
                delay_s: config.delay_grid.value(10) + 0.3 * config.delay_grid.step(),
                aoa_rad: 0.4,
                aod_rad: -0.5,
                doppler_hz: 120.0,
                ris: None,
            },
            Mpc {
                amplitude: Complex64::new(0.6, -0.4),
                delay_s: config.delay_grid.value(40) + 0.7 * config.delay_grid.step(),
                aoa_rad: -0.8,
                aod_rad: 0.9,
                doppler_hz: -200.0,
                ris: Some(crate::estimation::RisAngles {
                    incident_rad: 0.3,
                    reflect_rad: 0.3,
                }),
            },
        ];
        let obs = synthesize_observations(&truth, &modes, grid, 10.0, 5).unwrap();
        let result = estimate_mpc_parameters(&obs, 2, &modes, &config).unwrap();
        for w in result.residual_history.windows(2) {
            assert!(
                w[1] <= w[0] * (1.0 + 1e-12),
                "residual rose: {} -> {}",
                w[0],
                w[1]
            );
        }
    }

    #[test]
    fn delay_shift_equivariance() {
        // Shifting the truth delay by one bin shifts the estimate by one bin.
        let grid = test_grid();
        let config = test_config(&grid);
        let modes = ModeSet::uniform_sweep(ModePanel::default(), 4).unwrap();
        let base = on_grid_path(&config);
        let shifted = Mpc {
            delay_s: base.delay_s + config.delay_grid.step(),
            ..base
        };
        let obs_a = synthesize_observations(&[base], &modes, grid, f64::INFINITY, 2).unwrap();
        let obs_b = synthesize_observations(&[shifted], &modes, grid, f64::INFINITY, 2).unwrap();
        let est_a = estimate_mpc_parameters(&obs_a, 1, &modes, &config).unwrap();
        let est_b = estimate_mpc_parameters(&obs_b, 1, &modes, &config).unwrap();
        let diff = est_b.paths[0].mpc.delay_s - est_a.paths[0].mpc.delay_s;
        assert!((diff - config.delay_grid.step()).abs() < 1e-9 * config.delay_grid.step());
    }

    #[test]
    fn ris_path_flagged_and_angles_recovered() {
        let grid = test_grid();
        let config = test_config(&grid);
        let modes = ModeSet::uniform_sweep(ModePanel::default(), 5).unwrap();
        let theta = 0.25;
        // Normalize amplitude to unit RMS across modes.
        let g = modes.responses(theta, theta);
        let rms = (g.iter().map(|x| x.norm_sqr()).sum::<f64>() / g.len() as f64).sqrt();
        let truth = Mpc {
            amplitude: Complex64::new(1.0 / rms, 0.0),
            delay_s: config.delay_grid.value(12),
            aoa_rad: config.aoa_grid.value(60),
            aod_rad: config.aod_grid.value(25),
            doppler_hz: config.doppler_grid.value(18),
            ris: Some(crate::estimation::RisAngles {
                incident_rad: theta,
                reflect_rad: theta,
            }),
        };
        let obs = synthesize_observations(&[truth], &modes, grid, f64::INFINITY, 9).unwrap();
        let result = estimate_mpc_parameters(&obs, 1, &modes, &config).unwrap();
        let path = &result.paths[0];
        assert!(path.ris_flagged, "RIS path not flagged");
        let angles = path.mpc.ris.unwrap();
        assert!(
            (angles.incident_rad - theta).abs() < 2e-3,
            "incident {} vs {theta}",
            angles.incident_rad
        );
        assert!((angles.reflect_rad - theta).abs() < 2e-3);
    }

    #[test]
    fn non_ris_false_flag_rate_low_at_10db() {
        let grid = test_grid();
        let config = test_config(&grid);
        let modes = ModeSet::uniform_sweep(ModePanel::default(), 4).unwrap();
        let truth = on_grid_path(&config);
        let trials = 300;
        let mut false_flags = 0;
        for trial in 0..trials {
            let obs = synthesize_observations(&[truth], &modes, grid, 10.0, 1000 + trial).unwrap();
            let result = estimate_mpc_parameters(&obs, 1, &modes, &config).unwrap();
            if result.paths[0].ris_flagged {
                false_flags += 1;
            }
        }
        let rate = false_flags as f64 / trials as f64;
        assert!(rate < 0.05, "false flag rate {rate}");
    }

    #[test]
    fn two_separated_paths_recovered_at_20db() {
        let grid = test_grid();
        let config = test_config(&grid);
        let modes = ModeSet::uniform_sweep(ModePanel::default(), 4).unwrap();
        let truth = vec![
            Mpc {
                amplitude: Complex64::new(1.0, 0.0),
                delay_s: config.delay_grid.value(10),
                aoa_rad: config.aoa_grid.value(30),
                aod_rad: config.aod_grid.value(60),
                doppler_hz: config.doppler_grid.value(8),
                ris: None,
            },
            Mpc {
                amplitude: Complex64::new(0.0, 0.9),
                delay_s: config.delay_grid.value(40),
                aoa_rad: config.aoa_grid.value(65),
                aod_rad: config.aod_grid.value(20),
                doppler_hz: config.doppler_grid.value(24),
                ris: None,
            },
        ];
        let mut hits = 0;
        let trials = 100;
        for trial in 0..trials {
            let obs = synthesize_observations(&truth, &modes, grid, 20.0, 2000 + trial).unwrap();
            let result = estimate_mpc_parameters(&obs, 2, &modes, &config).unwrap();
            let mut ok = true;
            for t in &truth {
                // Every truth path matched within one refinement step.
                let found = result.paths.iter().any(|p| {
                    (p.mpc.delay_s - t.delay_s).abs() <= config.delay_grid.step()
                        && (p.mpc.aoa_rad - t.aoa_rad).abs() <= config.aoa_grid.step()
                        && (p.mpc.aod_rad - t.aod_rad).abs() <= config.aod_grid.step()
                        && (p.mpc.doppler_hz - t.doppler_hz).abs() <= config.doppler_grid.step()
                });
                ok &= found;
            }
            if ok {
                hits += 1;
            }
        }
        assert!(
            hits >= 95,
            "only {hits}/{trials} trials recovered both paths"
        );
    }
}

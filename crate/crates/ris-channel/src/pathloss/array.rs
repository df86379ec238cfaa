//! Far-field array factor of the panel and half-power beamwidth.
//!
//! The scan runs in the panel's x-z plane: a signed observation elevation
//! `theta_s` maps to the direction `(sin theta_s, 0, cos theta_s)` in panel
//! coordinates, and the incident wave arrives from `(sin theta_t, 0,
//! cos theta_t)`. Element `(n, m)` at in-plane offset `x_m` then contributes
//! `exp(j (phi_{n,m} + k x_m (sin theta_t + sin theta_s)))`.

use num_complex::Complex64;

use crate::scene::RisPanel;

use super::PathLossError;

/// Observation-angle scan window, degrees.
#[derive(Debug, Clone, Copy)]
pub struct ScanSpec {
    pub start_deg: f64,
    pub end_deg: f64,
    /// Must be <= 0.05 degrees.
    pub step_deg: f64,
}

impl ScanSpec {
    /// Full front half-space at the given step.
    pub fn front_halfspace(step_deg: f64) -> Self {
        Self {
            start_deg: -90.0,
            end_deg: 90.0,
            step_deg,
        }
    }
}

/// Power pattern over the scan plus the main-lobe half-power beamwidth.
#[derive(Debug, Clone)]
pub struct ArrayPattern {
    pub angles_deg: Vec<f64>,
    /// Power normalized to the peak (linear).
    pub power: Vec<f64>,
    pub peak_angle_deg: f64,
    pub hpbw_deg: f64,
}

/// Scan the re-radiated power pattern and measure the -3 dB width of the
/// main lobe. `wavelength_m` is the carrier wavelength the panel pitch is
/// measured against.
///
/// Errors when the scan is coarser than 0.05 degrees or when the -3 dB
/// points are not bracketed inside the window (lobe at or beyond an edge).
pub fn array_factor_and_hpbw(
    panel: &RisPanel,
    phases: &[f64],
    theta_t_rad: f64,
    wavelength_m: f64,
    scan: &ScanSpec,
) -> Result<ArrayPattern, PathLossError> {
    if scan.step_deg > 0.05 + 1e-12 || scan.step_deg <= 0.0 {
        return Err(PathLossError::ScanTooCoarse(scan.step_deg));
    }
    if wavelength_m <= 0.0 || wavelength_m.is_nan() {
        return Err(PathLossError::Parameter(
            "wavelength must be positive".into(),
        ));
    }
    let count = panel.element_count();
    if phases.len() != count {
        return Err(PathLossError::CustomProfileSize {
            got: phases.len(),
            expected: count,
        });
    }
    let k = std::f64::consts::TAU / wavelength_m;
    let sin_t = theta_t_rad.sin();

    // Collapse the grid: contributions only depend on the x offset, so merge
    // each column into a single complex weight.
    let mut column_weights = vec![Complex64::new(0.0, 0.0); panel.m_count];
    for n in 0..panel.n_count {
        for m in 0..panel.m_count {
            let w = Complex64::from_polar(1.0, phases[panel.index(n, m)]);
            column_weights[m] += w;
        }
    }
    let offsets_m: Vec<f64> = (0..panel.m_count)
        .map(|m| (m as f64 - (panel.m_count as f64 - 1.0) / 2.0) * panel.dx)
        .collect();

    let steps = ((scan.end_deg - scan.start_deg) / scan.step_deg).round() as usize + 1;
    let mut angles = Vec::with_capacity(steps);
    let mut power = Vec::with_capacity(steps);
    for i in 0..steps {
        let theta_deg = scan.start_deg + i as f64 * scan.step_deg;
        let u = theta_deg.to_radians().sin() + sin_t;
        let mut sum = Complex64::new(0.0, 0.0);
        for (m, w) in column_weights.iter().enumerate() {
            sum += w * Complex64::from_polar(1.0, k * offsets_m[m] * u);
        }
        angles.push(theta_deg);
        power.push(sum.norm_sqr());
    }

    let peak_value = power.iter().cloned().fold(0.0_f64, f64::max);
    if peak_value <= 0.0 {
        return Err(PathLossError::NoLobeInScan);
    }
    for p in &mut power {
        *p /= peak_value;
    }
    let peak_idx = power
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();

    let half = 0.5;
    // Walk outward from the peak to the first samples below half power and
    // interpolate the crossing angles.
    let mut left = None;
    for i in (0..peak_idx).rev() {
        if power[i] < half {
            let t = (half - power[i]) / (power[i + 1] - power[i]);
            left = Some(angles[i] + t * scan.step_deg);
            break;
        }
    }
    let mut right = None;
    for i in peak_idx + 1..power.len() {
        if power[i] < half {
            let t = (power[i - 1] - half) / (power[i - 1] - power[i]);
            right = Some(angles[i - 1] + t * scan.step_deg);
            break;
        }
    }
    let (left, right) = match (left, right) {
        (Some(l), Some(r)) => (l, r),
        _ => return Err(PathLossError::NoLobeInScan),
    };

    Ok(ArrayPattern {
        peak_angle_deg: angles[peak_idx],
        hpbw_deg: right - left,
        angles_deg: angles,
        power,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathloss::PathLossError;

    /// 1-D panel with pitch given in wavelengths.
    fn line_panel(count: usize, pitch_wl: f64) -> RisPanel {
        RisPanel::new(count, 1, pitch_wl, pitch_wl).unwrap()
    }

    fn steer_profile(panel: &RisPanel, sin_sum: f64) -> Vec<f64> {
        (0..panel.element_count())
            .map(|i| {
                let m = i % panel.m_count;
                let x = (m as f64 - (panel.m_count as f64 - 1.0) / 2.0) * panel.dx;
                (-std::f64::consts::TAU * x * sin_sum).rem_euclid(std::f64::consts::TAU)
            })
            .collect()
    }

    #[test]
    fn eight_element_broadside_hpbw() {
        let panel = line_panel(8, 0.5);
        let phases = vec![0.0; 8];
        let scan = ScanSpec::front_halfspace(0.02);
        let pattern = array_factor_and_hpbw(&panel, &phases, 0.0, 1.0, &scan).unwrap();
        assert!(pattern.peak_angle_deg.abs() < 0.05);
        // Exact Dirichlet-kernel half-power width is 12.80 degrees; the
        // 0.886 lambda / (N d) rule of thumb gives 12.69.
        assert!(
            (pattern.hpbw_deg - 12.8026).abs() < 0.01,
            "hpbw {}",
            pattern.hpbw_deg
        );
        let approx = (0.886 / 4.0_f64).to_degrees();
        assert!(
            (pattern.hpbw_deg - approx).abs() < 0.15,
            "vs approximation {approx}"
        );
    }

    #[test]
    fn mrc_cophasing_matches_plain_array() {
        // RIS illuminated at 30 degrees and co-phased toward 20 degrees has
        // the same beamwidth as a plain array phased to 20 degrees.
        let panel = line_panel(16, 0.5);
        let steer = 20.0_f64.to_radians();
        let incidence = 30.0_f64.to_radians();
        let scan = ScanSpec::front_halfspace(0.02);

        let ris_profile = steer_profile(&panel, incidence.sin() + steer.sin());
        let ris = array_factor_and_hpbw(&panel, &ris_profile, incidence, 1.0, &scan).unwrap();

        let array_profile = steer_profile(&panel, steer.sin());
        let plain = array_factor_and_hpbw(&panel, &array_profile, 0.0, 1.0, &scan).unwrap();

        assert!((ris.peak_angle_deg - 20.0).abs() < 0.1);
        assert!((plain.peak_angle_deg - 20.0).abs() < 0.1);
        assert!(
            (ris.hpbw_deg - plain.hpbw_deg).abs() <= 2.0 * scan.step_deg,
            "ris {} vs array {}",
            ris.hpbw_deg,
            plain.hpbw_deg
        );
    }

    #[test]
    fn hpbw_changes_with_incidence() {
        // Equal weights: the specular lobe broadens as the incidence tilts.
        let panel = line_panel(16, 0.5);
        let phases = vec![0.0; 16];
        let scan = ScanSpec::front_halfspace(0.02);
        let broadside = array_factor_and_hpbw(&panel, &phases, 0.0, 1.0, &scan).unwrap();
        let oblique =
            array_factor_and_hpbw(&panel, &phases, 60.0_f64.to_radians(), 1.0, &scan).unwrap();
        assert!((oblique.peak_angle_deg + 60.0).abs() < 0.1);
        assert!(
            (oblique.hpbw_deg - broadside.hpbw_deg).abs() > 2.0 * scan.step_deg,
            "expected different widths, got {} vs {}",
            oblique.hpbw_deg,
            broadside.hpbw_deg
        );
    }

    #[test]
    fn coarse_scan_rejected() {
        let panel = line_panel(8, 0.5);
        let err = array_factor_and_hpbw(
            &panel,
            &[0.0; 8],
            0.0,
            1.0,
            &ScanSpec {
                start_deg: -90.0,
                end_deg: 90.0,
                step_deg: 0.5,
            },
        )
        .unwrap_err();
        assert!(matches!(err, PathLossError::ScanTooCoarse(_)));
    }

    #[test]
    fn lobe_outside_window_rejected() {
        // Steer to 60 degrees but scan only [-10, 10]: no -3 dB bracket.
        let panel = line_panel(16, 0.5);
        let profile = steer_profile(&panel, 60.0_f64.to_radians().sin());
        let err = array_factor_and_hpbw(
            &panel,
            &profile,
            0.0,
            1.0,
            &ScanSpec {
                start_deg: -10.0,
                end_deg: 10.0,
                step_deg: 0.02,
            },
        )
        .unwrap_err();
        assert!(matches!(err, PathLossError::NoLobeInScan));
    }
}

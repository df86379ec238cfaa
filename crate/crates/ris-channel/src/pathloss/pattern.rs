//! Normalized element power pattern.

/// `F(theta) = cos^q(theta)` for `theta` in `[0, pi/2)`, 0 behind the panel.
///
/// `q = 0` is an isotropic hemisphere. The combined per-element factor used
/// by the element-sum models is `F(incidence) * F(departure)`.
pub fn element_pattern(theta_rad: f64, q: f64) -> f64 {
    let c = theta_rad.cos();
    if theta_rad.abs() < std::f64::consts::FRAC_PI_2 && c > 0.0 {
        c.powf(q)
    } else {
        0.0
    }
}

/// Same pattern evaluated from a direction cosine (dot of the unit ray with
/// the panel normal). Used on per-element rays where the cosine is already
/// at hand.
#[inline]
pub(crate) fn pattern_from_cos(cos_theta: f64, q: f64) -> f64 {
    if cos_theta > 0.0 {
        cos_theta.powf(q)
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn broadside_is_unity() {
        assert_eq!(element_pattern(0.0, 3.0), 1.0);
        assert_eq!(element_pattern(0.0, 0.0), 1.0);
    }

    #[test]
    fn cos_cubed_at_60_degrees() {
        let f = element_pattern(PI / 3.0, 3.0);
        assert!((f - 0.125).abs() < 1e-12, "cos^3(60 deg) = {f}");
    }

    #[test]
    fn isotropic_hemisphere_for_q_zero() {
        for theta in [0.0, 0.3, 1.0, 1.5] {
            assert_eq!(element_pattern(theta, 0.0), 1.0);
        }
        assert_eq!(element_pattern(FRAC_PI_2, 0.0), 0.0);
    }

    #[test]
    fn zero_behind_the_panel() {
        assert_eq!(element_pattern(FRAC_PI_2, 3.0), 0.0);
        assert_eq!(element_pattern(2.0, 3.0), 0.0);
        assert_eq!(pattern_from_cos(-0.2, 3.0), 0.0);
    }
}

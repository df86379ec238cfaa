//! Geometry of the Tx–RIS–Rx setup.
//!
//! A [`Scene`] captures everything the path loss models need: distances from
//! Tx and Rx to the panel center and to every element, incidence/reflection
//! angles against the panel normal, and the azimuths in the panel plane.
//! Angle conventions: elevation `theta` is measured from the panel normal,
//! azimuth `phi` in the panel plane from the panel x axis.
//!
//! Element `(n, m)` (0-based, `m` along x, `n` along y) sits at
//! `center + (m + 1 - (M+1)/2) * dx * x_axis + (n + 1 - (N+1)/2) * dy * y_axis`,
//! i.e. the grid is centered on the panel for both odd and even counts.

use thiserror::Error;

use crate::units::wavelength;

/// Geometry construction errors.
#[derive(Debug, Error)]
pub enum SceneError {
    #[error("invalid panel: {0}")]
    InvalidPanel(String),
    #[error("non-finite coordinate in {0}")]
    NonFinite(&'static str),
    #[error("carrier frequency must be positive, got {0}")]
    InvalidFrequency(f64),
    #[error("pose basis is not orthonormal")]
    BasisNotOrthonormal,
    #[error("{0} lies behind the panel (elevation >= 90 degrees)")]
    BehindPanel(&'static str),
    #[error("degenerate ellipse: semi-major axis {a} must exceed half the focal distance {d}/2")]
    DegenerateEllipse { a: f64, d: f64 },
    #[error("requested d1 range [{lo}, {hi}] outside the ellipse's [{min}, {max}]")]
    SweepRangeOutOfEllipse {
        lo: f64,
        hi: f64,
        min: f64,
        max: f64,
    },
    #[error("ellipse sweep needs at least 2 steps, got {0}")]
    TooFewSteps(usize),
}

// ---------------------------------------------------------------------------
// Points and vectors
// ---------------------------------------------------------------------------

/// A position in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn distance_to(&self, other: &Point3) -> f64 {
        (*other - *self).norm()
    }
}

/// A direction or displacement in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &Vec3) -> Vec3 {
        Vec3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scaled(&self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn normalized(&self) -> Vec3 {
        self.scaled(1.0 / self.norm())
    }
}

impl std::ops::Sub for Point3 {
    type Output = Vec3;
    fn sub(self, rhs: Point3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl std::ops::Add<Vec3> for Point3 {
    type Output = Point3;
    fn add(self, rhs: Vec3) -> Point3 {
        Point3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

// ---------------------------------------------------------------------------
// Panel
// ---------------------------------------------------------------------------

/// Phase quantization setting of the panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantization {
    /// Continuously tunable phases.
    Continuous,
    /// `b`-bit phases: every phase an integer multiple of `2 pi / 2^b`.
    Bits(u8),
}

/// A RIS panel: an M x N grid of tunable reflecting elements.
#[derive(Debug, Clone)]
pub struct RisPanel {
    /// Elements along the panel x axis (M).
    pub m_count: usize,
    /// Elements along the panel y axis (N).
    pub n_count: usize,
    /// Element pitch along x, meters.
    pub dx: f64,
    /// Element pitch along y, meters.
    pub dy: f64,
    /// Linear gain G of one element.
    pub element_gain: f64,
    /// Exponent q of the normalized power pattern `cos^q(theta)`.
    pub pattern_exponent: f64,
    /// Reflection amplitude A of each element, in [0, 1].
    pub amplitude: f64,
    /// Power efficiency eta of the surface, in (0, 1].
    pub efficiency: f64,
    /// Per-element reflection phases in radians, in [0, 2 pi). Indexed
    /// `n * m_count + m`.
    pub phase_profile: Vec<f64>,
    /// Quantization setting the profile is expected to satisfy.
    pub quantization: Quantization,
}

impl RisPanel {
    /// Default pattern exponent: `q = 3`.
    pub const DEFAULT_PATTERN_EXPONENT: f64 = 3.0;

    /// A panel with zero phases, unit amplitude and efficiency, and the
    /// default cosine-power element pattern (`q = 3`, `G = 2(q+1) = 8`).
    pub fn new(m_count: usize, n_count: usize, dx: f64, dy: f64) -> Result<Self, SceneError> {
        let q = Self::DEFAULT_PATTERN_EXPONENT;
        Self::with_params(m_count, n_count, dx, dy, q, 2.0 * (q + 1.0), 1.0, 1.0)
    }

    /// A panel with explicit pattern exponent, element gain, amplitude and
    /// efficiency, zero phases, continuous quantization.
    #[allow(clippy::too_many_arguments)]
    pub fn with_params(
        m_count: usize,
        n_count: usize,
        dx: f64,
        dy: f64,
        pattern_exponent: f64,
        element_gain: f64,
        amplitude: f64,
        efficiency: f64,
    ) -> Result<Self, SceneError> {
        let panel = Self {
            m_count,
            n_count,
            dx,
            dy,
            element_gain,
            pattern_exponent,
            amplitude,
            efficiency,
            phase_profile: vec![0.0; m_count * n_count],
            quantization: Quantization::Continuous,
        };
        panel.validate()?;
        Ok(panel)
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        if self.m_count == 0 || self.n_count == 0 {
            return Err(SceneError::InvalidPanel(
                "element counts must be >= 1".into(),
            ));
        }
        if !(self.dx > 0.0 && self.dy > 0.0) {
            return Err(SceneError::InvalidPanel(
                "element pitch must be positive".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.amplitude) {
            return Err(SceneError::InvalidPanel(format!(
                "amplitude {} outside [0, 1]",
                self.amplitude
            )));
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(SceneError::InvalidPanel(format!(
                "efficiency {} outside (0, 1]",
                self.efficiency
            )));
        }
        if self.pattern_exponent < 0.0 {
            return Err(SceneError::InvalidPanel(
                "pattern exponent must be >= 0".into(),
            ));
        }
        if self.element_gain <= 0.0 {
            return Err(SceneError::InvalidPanel(
                "element gain must be positive".into(),
            ));
        }
        if self.phase_profile.len() != self.element_count() {
            return Err(SceneError::InvalidPanel(format!(
                "phase profile has {} entries for a {}x{} grid",
                self.phase_profile.len(),
                self.m_count,
                self.n_count
            )));
        }
        if let Quantization::Bits(b) = self.quantization {
            let step = std::f64::consts::TAU / f64::from(1u32 << b);
            for (i, &phi) in self.phase_profile.iter().enumerate() {
                let k = phi / step;
                if (k - k.round()).abs() > 1e-9 {
                    return Err(SceneError::InvalidPanel(format!(
                        "phase {phi} at element {i} is not a multiple of 2 pi / 2^{b}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Replace the phase profile, validating dimensions and quantization.
    pub fn set_phase_profile(&mut self, phases: Vec<f64>) -> Result<(), SceneError> {
        self.phase_profile = phases;
        self.validate()
    }

    pub fn element_count(&self) -> usize {
        self.m_count * self.n_count
    }

    /// Flat index of element `(n, m)`.
    #[inline]
    pub fn index(&self, n: usize, m: usize) -> usize {
        n * self.m_count + m
    }

    /// Physical side lengths `(M dx, N dy)` in meters.
    pub fn side_lengths(&self) -> (f64, f64) {
        (self.m_count as f64 * self.dx, self.n_count as f64 * self.dy)
    }

    /// Panel diagonal D in meters (the aperture size used in `2 D^2 / lambda`).
    pub fn diagonal(&self) -> f64 {
        let (a, b) = self.side_lengths();
        a.hypot(b)
    }
}

// ---------------------------------------------------------------------------
// Pose
// ---------------------------------------------------------------------------

/// Position and orientation of the panel: center plus an orthonormal basis
/// (in-plane x and y axes, outward normal = x cross y).
#[derive(Debug, Clone, Copy)]
pub struct RisPose {
    pub center: Point3,
    pub x_axis: Vec3,
    pub y_axis: Vec3,
    pub normal: Vec3,
}

impl RisPose {
    /// Build from explicit in-plane axes; the normal is their cross product.
    pub fn new(center: Point3, x_axis: Vec3, y_axis: Vec3) -> Result<Self, SceneError> {
        let tol = 1e-9;
        if (x_axis.norm() - 1.0).abs() > tol
            || (y_axis.norm() - 1.0).abs() > tol
            || x_axis.dot(&y_axis).abs() > tol
        {
            return Err(SceneError::BasisNotOrthonormal);
        }
        Ok(Self {
            center,
            x_axis,
            y_axis,
            normal: x_axis.cross(&y_axis),
        })
    }

    /// Build from the outward normal alone; in-plane axes are chosen
    /// deterministically (`x = normalize(up x n)` with `up = z`, falling back
    /// to `up = x` when the normal is near-vertical).
    pub fn from_normal(center: Point3, normal: Vec3) -> Result<Self, SceneError> {
        let n = normal.norm();
        if n <= 0.0 || !n.is_finite() {
            return Err(SceneError::NonFinite("pose normal"));
        }
        let normal = normal.scaled(1.0 / n);
        let up = if normal.z.abs() > 0.999 {
            Vec3::new(1.0, 0.0, 0.0)
        } else {
            Vec3::new(0.0, 0.0, 1.0)
        };
        let x_axis = up.cross(&normal).normalized();
        let y_axis = normal.cross(&x_axis);
        Ok(Self {
            center,
            x_axis,
            y_axis,
            normal,
        })
    }
}

// ---------------------------------------------------------------------------
// Antennas and scene
// ---------------------------------------------------------------------------

/// A positioned antenna with a linear gain.
#[derive(Debug, Clone, Copy)]
pub struct Antenna {
    pub position: Point3,
    /// Linear gain (1.0 = 0 dBi).
    pub gain: f64,
}

impl Antenna {
    pub const fn new(position: Point3, gain: f64) -> Self {
        Self { position, gain }
    }
}

/// Near/far field classification of a link against the Rayleigh distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Near,
    Far,
}

/// Field-region verdict carrying the Rayleigh distance `2 D^2 / lambda` it
/// was judged against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRegion {
    pub kind: FieldKind,
    pub rayleigh_distance_m: f64,
}

/// Rayleigh distance `2 D^2 / lambda` of a panel at carrier `frequency_hz`,
/// with D the panel diagonal.
pub fn rayleigh_distance(panel: &RisPanel, frequency_hz: f64) -> f64 {
    let d = panel.diagonal();
    2.0 * d * d / wavelength(frequency_hz)
}

/// Classify a link distance as near or far field. The boundary itself
/// (`distance == rayleigh`) classifies NEAR: near-field models remain valid
/// in the far field, not the other way round.
pub fn classify_field_region(panel: &RisPanel, distance_m: f64, frequency_hz: f64) -> FieldRegion {
    let rayleigh = rayleigh_distance(panel, frequency_hz);
    let kind = if distance_m > rayleigh {
        FieldKind::Far
    } else {
        FieldKind::Near
    };
    FieldRegion {
        kind,
        rayleigh_distance_m: rayleigh,
    }
}

/// Fully derived Tx–RIS–Rx geometry.
///
/// Built by [`Scene::build`]; all fields are immutable after construction.
#[derive(Debug, Clone)]
pub struct Scene {
    pub tx: Antenna,
    pub rx: Antenna,
    pub pose: RisPose,
    pub carrier_hz: f64,
    pub wavelength_m: f64,
    /// Tx to panel center, meters.
    pub d1_m: f64,
    /// Panel center to Rx, meters.
    pub d2_m: f64,
    /// Direct Tx–Rx distance, meters.
    pub d_tr_m: f64,
    /// Incidence elevation (Tx) from the panel normal.
    pub theta_t_rad: f64,
    /// Incidence azimuth in the panel plane.
    pub phi_t_rad: f64,
    /// Reflection elevation (Rx) from the panel normal.
    pub theta_r_rad: f64,
    /// Reflection azimuth in the panel plane.
    pub phi_r_rad: f64,
    /// Observation elevation: where the Rx actually sits. Equal to
    /// `theta_r_rad` by construction; kept separate because the
    /// physical-optics model distinguishes observed from designed reflection.
    pub theta_s_rad: f64,
    m_count: usize,
    n_count: usize,
    /// Per-element distance from the Tx, `r^t_{n,m}`, indexed `n * M + m`.
    pub ray_tx_m: Vec<f64>,
    /// Per-element distance to the Rx, `r^r_{n,m}`.
    pub ray_rx_m: Vec<f64>,
    /// Per-element cos(elevation) of the Tx direction (for element patterns).
    pub cos_inc: Vec<f64>,
    /// Per-element cos(elevation) of the Rx direction.
    pub cos_ref: Vec<f64>,
}

impl Scene {
    /// Derive the full geometry. Rejects non-finite inputs, a non-orthonormal
    /// basis, and endpoints behind the panel.
    pub fn build(
        tx: Antenna,
        rx: Antenna,
        panel: &RisPanel,
        pose: RisPose,
        frequency_hz: f64,
    ) -> Result<Self, SceneError> {
        panel.validate()?;
        if frequency_hz <= 0.0 || frequency_hz.is_nan() {
            return Err(SceneError::InvalidFrequency(frequency_hz));
        }
        if !tx.position.is_finite() {
            return Err(SceneError::NonFinite("tx position"));
        }
        if !rx.position.is_finite() {
            return Err(SceneError::NonFinite("rx position"));
        }
        if !pose.center.is_finite() {
            return Err(SceneError::NonFinite("ris center"));
        }
        // Re-validate the basis regardless of how the pose was produced.
        let pose = RisPose::new(pose.center, pose.x_axis, pose.y_axis)?;

        let to_tx = tx.position - pose.center;
        let to_rx = rx.position - pose.center;
        let d1 = to_tx.norm();
        let d2 = to_rx.norm();
        let d_tr = tx.position.distance_to(&rx.position);
        let degenerate = |v: f64| v <= 0.0 || !v.is_finite();
        if degenerate(d1) || degenerate(d2) || degenerate(d_tr) {
            return Err(SceneError::NonFinite("degenerate distances"));
        }

        let cos_t = to_tx.dot(&pose.normal) / d1;
        let cos_r = to_rx.dot(&pose.normal) / d2;
        if cos_t <= 0.0 {
            return Err(SceneError::BehindPanel("Tx"));
        }
        if cos_r <= 0.0 {
            return Err(SceneError::BehindPanel("Rx"));
        }
        let theta_t = cos_t.clamp(-1.0, 1.0).acos();
        let theta_r = cos_r.clamp(-1.0, 1.0).acos();
        let phi_t = to_tx.dot(&pose.y_axis).atan2(to_tx.dot(&pose.x_axis));
        let phi_r = to_rx.dot(&pose.y_axis).atan2(to_rx.dot(&pose.x_axis));

        let (m_count, n_count) = (panel.m_count, panel.n_count);
        let count = panel.element_count();
        let mut ray_tx = Vec::with_capacity(count);
        let mut ray_rx = Vec::with_capacity(count);
        let mut cos_inc = Vec::with_capacity(count);
        let mut cos_ref = Vec::with_capacity(count);
        for n in 0..n_count {
            let oy = (n as f64 - (n_count as f64 - 1.0) / 2.0) * panel.dy;
            for m in 0..m_count {
                let ox = (m as f64 - (m_count as f64 - 1.0) / 2.0) * panel.dx;
                let elem = pose.center + pose.x_axis.scaled(ox) + pose.y_axis.scaled(oy);
                let et = tx.position - elem;
                let er = rx.position - elem;
                let rt = et.norm();
                let rr = er.norm();
                ray_tx.push(rt);
                ray_rx.push(rr);
                cos_inc.push(et.dot(&pose.normal) / rt);
                cos_ref.push(er.dot(&pose.normal) / rr);
            }
        }

        Ok(Self {
            tx,
            rx,
            pose,
            carrier_hz: frequency_hz,
            wavelength_m: wavelength(frequency_hz),
            d1_m: d1,
            d2_m: d2,
            d_tr_m: d_tr,
            theta_t_rad: theta_t,
            phi_t_rad: phi_t,
            theta_r_rad: theta_r,
            phi_r_rad: phi_r,
            theta_s_rad: theta_r,
            m_count,
            n_count,
            ray_tx_m: ray_tx,
            ray_rx_m: ray_rx,
            cos_inc,
            cos_ref,
        })
    }

    /// Grid dimensions `(m_count, n_count)` the per-element data was built for.
    pub fn grid_dims(&self) -> (usize, usize) {
        (self.m_count, self.n_count)
    }

    /// The same scene with Tx and Rx (including gains) exchanged.
    pub fn swapped(&self, panel: &RisPanel) -> Result<Scene, SceneError> {
        Scene::build(self.rx, self.tx, panel, self.pose, self.carrier_hz)
    }

    /// Field region of the link: FAR only when both hops exceed the panel's
    /// Rayleigh distance.
    pub fn field_region(&self, panel: &RisPanel) -> FieldRegion {
        classify_field_region(panel, self.d1_m.min(self.d2_m), self.carrier_hz)
    }
}

// ---------------------------------------------------------------------------
// Ellipse sweep
// ---------------------------------------------------------------------------

/// RIS center positions on the ellipse with foci at the Tx and Rx.
///
/// Tx sits at `(-d/2, 0, 0)`, Rx at `(+d/2, 0, 0)`, and every returned
/// position `(x, y > 0, 0)` satisfies `d1 + d2 = 2 a`. `d1` (the distance to
/// the Tx focus) sweeps linearly from `d1_start` to `d1_end` inclusive.
pub fn ellipse_sweep_positions(
    d_tr: f64,
    semi_major: f64,
    d1_start: f64,
    d1_end: f64,
    steps: usize,
) -> Result<Vec<Point3>, SceneError> {
    if semi_major <= d_tr / 2.0 {
        return Err(SceneError::DegenerateEllipse {
            a: semi_major,
            d: d_tr,
        });
    }
    if steps < 2 {
        return Err(SceneError::TooFewSteps(steps));
    }
    let a = semi_major;
    let c = d_tr / 2.0;
    let e = c / a;
    let b = (a * a - c * c).sqrt();
    // Focal distance to the Tx focus at (-c, 0) is d1 = a + e x.
    let (min_d1, max_d1) = (a - c, a + c);
    let (lo, hi) = (d1_start.min(d1_end), d1_start.max(d1_end));
    if lo < min_d1 - 1e-9 || hi > max_d1 + 1e-9 {
        return Err(SceneError::SweepRangeOutOfEllipse {
            lo,
            hi,
            min: min_d1,
            max: max_d1,
        });
    }
    let mut positions = Vec::with_capacity(steps);
    for i in 0..steps {
        let t = i as f64 / (steps - 1) as f64;
        let d1 = d1_start + (d1_end - d1_start) * t;
        let x = (d1 - a) / e;
        let y = b * (1.0 - (x / a) * (x / a)).max(0.0).sqrt();
        positions.push(Point3::new(x, y, 0.0));
    }
    Ok(positions)
}

/// The focal positions matching [`ellipse_sweep_positions`]' convention:
/// `(tx, rx) = ((-d/2, 0, 0), (+d/2, 0, 0))`.
pub fn ellipse_foci(d_tr: f64) -> (Point3, Point3) {
    (
        Point3::new(-d_tr / 2.0, 0.0, 0.0),
        Point3::new(d_tr / 2.0, 0.0, 0.0),
    )
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn panel_1m() -> RisPanel {
        // 1 m x 1.02 m panel: 100 x 102 elements at 10 mm pitch.
        RisPanel::new(100, 102, 0.01, 0.01).unwrap()
    }

    #[test]
    fn build_scene_fig3_geometry() {
        // Tx and Rx on the foci of the a = 200 m ellipse, RIS at the top.
        let tx = Antenna::new(Point3::new(-100.0, 0.0, 0.0), 1.0);
        let rx = Antenna::new(Point3::new(100.0, 0.0, 0.0), 1.0);
        let pose =
            RisPose::from_normal(Point3::new(0.0, 173.0, 0.0), Vec3::new(0.0, -1.0, 0.0)).unwrap();
        let panel = panel_1m();
        let scene = Scene::build(tx, rx, &panel, pose, 10.5e9).unwrap();
        let expect = (100.0_f64 * 100.0 + 173.0 * 173.0).sqrt();
        assert!((scene.d1_m - expect).abs() < 1e-9);
        assert!((scene.d2_m - expect).abs() < 1e-9);
        assert!((scene.d1_m - 199.8).abs() < 0.05);
        assert!((scene.d_tr_m - 200.0).abs() < 1e-12);
    }

    #[test]
    fn build_scene_normal_incidence() {
        // Tx on the panel normal at 10 m, single-element panel.
        let panel = RisPanel::new(1, 1, 0.01, 0.01).unwrap();
        let pose =
            RisPose::from_normal(Point3::new(0.0, 0.0, 0.0), Vec3::new(0.0, 0.0, 1.0)).unwrap();
        let tx = Antenna::new(Point3::new(0.0, 0.0, 10.0), 1.0);
        let rx = Antenna::new(Point3::new(3.0, 0.0, 4.0), 1.0);
        let scene = Scene::build(tx, rx, &panel, pose, 5e9).unwrap();
        assert!(scene.theta_t_rad.abs() < 1e-12);
        assert!((scene.ray_tx_m[0] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn build_scene_swap_symmetry() {
        let panel = panel_1m();
        let pose =
            RisPose::from_normal(Point3::new(0.0, 50.0, 0.0), Vec3::new(0.0, -1.0, 0.0)).unwrap();
        let tx = Antenna::new(Point3::new(-30.0, 0.0, 2.0), 2.0);
        let rx = Antenna::new(Point3::new(80.0, 10.0, -1.0), 5.0);
        let scene = Scene::build(tx, rx, &panel, pose, 10.5e9).unwrap();
        let rev = scene.swapped(&panel).unwrap();
        assert_eq!(rev.d1_m, scene.d2_m);
        assert_eq!(rev.d2_m, scene.d1_m);
        assert_eq!(rev.theta_t_rad, scene.theta_r_rad);
        assert_eq!(rev.theta_r_rad, scene.theta_t_rad);
        assert_eq!(rev.ray_tx_m, scene.ray_rx_m);
        assert_eq!(rev.ray_rx_m, scene.ray_tx_m);
    }

    #[test]
    fn build_scene_rejects_endpoint_behind_panel() {
        let panel = panel_1m();
        let pose =
            RisPose::from_normal(Point3::new(0.0, 0.0, 0.0), Vec3::new(0.0, 0.0, 1.0)).unwrap();
        let tx = Antenna::new(Point3::new(0.0, 0.0, -10.0), 1.0);
        let rx = Antenna::new(Point3::new(0.0, 5.0, 10.0), 1.0);
        let err = Scene::build(tx, rx, &panel, pose, 5e9).unwrap_err();
        assert!(matches!(err, SceneError::BehindPanel("Tx")));
    }

    #[test]
    fn rayleigh_distance_matches_paper_anchor() {
        // 1 m x 1.02 m panel at 10.5 GHz: about 140 m in the text, 142.9 m
        // from 2 D^2 / lambda with D the diagonal.
        let panel = panel_1m();
        let r = rayleigh_distance(&panel, 10.5e9);
        assert!((r - 142.9).abs() < 0.1, "rayleigh {r}");
    }

    #[test]
    fn classify_far_and_boundary() {
        let panel = panel_1m();
        let r = rayleigh_distance(&panel, 10.5e9);
        assert_eq!(
            classify_field_region(&panel, 10.0 * r, 10.5e9).kind,
            FieldKind::Far
        );
        // Boundary equality classifies NEAR.
        assert_eq!(
            classify_field_region(&panel, r, 10.5e9).kind,
            FieldKind::Near
        );
        assert_eq!(
            classify_field_region(&panel, 0.5 * r, 10.5e9).kind,
            FieldKind::Near
        );
    }

    #[test]
    fn rayleigh_scales_linearly_with_frequency() {
        let panel = panel_1m();
        let r1 = rayleigh_distance(&panel, 5e9);
        let r2 = rayleigh_distance(&panel, 10e9);
        assert!((r2 / r1 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ellipse_sweep_covers_requested_range() {
        let pos = ellipse_sweep_positions(200.0, 200.0, 140.0, 200.0, 61).unwrap();
        assert_eq!(pos.len(), 61);
        let (tx, rx) = ellipse_foci(200.0);
        let first = pos.first().unwrap();
        let last = pos.last().unwrap();
        assert!((first.distance_to(&tx) - 140.0).abs() < 1e-9);
        assert!((last.distance_to(&tx) - 200.0).abs() < 1e-9);
        for p in &pos {
            let sum = p.distance_to(&tx) + p.distance_to(&rx);
            assert!((sum - 400.0).abs() < 1e-9 * 200.0, "d1+d2 = {sum}");
        }
    }

    #[test]
    fn ellipse_sweep_rejects_degenerate() {
        let err = ellipse_sweep_positions(200.0, 100.0, 100.0, 150.0, 5).unwrap_err();
        assert!(matches!(err, SceneError::DegenerateEllipse { .. }));
    }

    #[test]
    fn element_grid_is_centered() {
        // Odd and even grids are both symmetric about the center: the mean
        // element offset vanishes, so the center-element ray equals d1 for a
        // 1x1 grid and the extremes straddle d1 symmetrically.
        let panel = RisPanel::new(4, 3, 0.1, 0.2).unwrap();
        let pose =
            RisPose::from_normal(Point3::new(0.0, 0.0, 0.0), Vec3::new(0.0, 0.0, 1.0)).unwrap();
        let tx = Antenna::new(Point3::new(0.0, 0.0, 7.0), 1.0);
        let rx = Antenna::new(Point3::new(1.0, 0.0, 7.0), 1.0);
        let scene = Scene::build(tx, rx, &panel, pose, 1e9).unwrap();
        // Symmetric pairs around the grid center see equal Tx distances.
        let idx = |n: usize, m: usize| panel.index(n, m);
        assert!((scene.ray_tx_m[idx(0, 0)] - scene.ray_tx_m[idx(2, 3)]).abs() < 1e-12);
        assert!((scene.ray_tx_m[idx(1, 1)] - scene.ray_tx_m[idx(1, 2)]).abs() < 1e-12);
    }

    #[test]
    fn panel_rejects_bad_inputs() {
        assert!(RisPanel::new(0, 4, 0.01, 0.01).is_err());
        assert!(RisPanel::new(4, 4, -0.01, 0.01).is_err());
        assert!(RisPanel::with_params(4, 4, 0.01, 0.01, 3.0, 8.0, 1.5, 1.0).is_err());
        assert!(RisPanel::with_params(4, 4, 0.01, 0.01, 3.0, 8.0, 1.0, 0.0).is_err());
    }

    proptest! {
        // Per-element rays never stray from the hop distances by more than
        // the panel diagonal.
        #[test]
        fn rays_within_diagonal_of_hops(
            txx in -50.0_f64..50.0, txy in 5.0_f64..80.0, txz in -20.0_f64..20.0,
            rxx in -50.0_f64..50.0, rxy in 5.0_f64..80.0, rxz in -20.0_f64..20.0,
            m in 1_usize..12, n in 1_usize..12,
        ) {
            let panel = RisPanel::new(m, n, 0.05, 0.04).unwrap();
            let pose = RisPose::from_normal(
                Point3::new(0.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)).unwrap();
            let tx = Antenna::new(Point3::new(txx, txy, txz), 1.0);
            let rx = Antenna::new(Point3::new(rxx, rxy, rxz), 1.0);
            let scene = Scene::build(tx, rx, &panel, pose, 3e9).unwrap();
            let diag = panel.diagonal();
            for (&rt, &rr) in scene.ray_tx_m.iter().zip(&scene.ray_rx_m) {
                prop_assert!((rt - scene.d1_m).abs() <= diag);
                prop_assert!((rr - scene.d2_m).abs() <= diag);
            }
        }

        // Sum of focal distances stays within 1e-9 * a over the whole sweep.
        #[test]
        fn ellipse_sum_invariant(
            d in 10.0_f64..500.0,
            excess in 0.01_f64..2.0,
            steps in 2_usize..40,
        ) {
            let a = d / 2.0 * (1.0 + excess);
            let (lo, hi) = (a - d / 2.0, a + d / 2.0);
            let pos = ellipse_sweep_positions(d, a, lo, hi, steps).unwrap();
            let (tx, rx) = ellipse_foci(d);
            for p in &pos {
                let sum = p.distance_to(&tx) + p.distance_to(&rx);
                prop_assert!((sum - 2.0 * a).abs() < 1e-9 * a);
            }
        }
    }
}

//! Channel modeling toolkit for RIS-assisted radio links.
//!
//! A reconfigurable intelligent surface (RIS) is a planar array of
//! sub-wavelength elements whose reflection phase (and amplitude) can be
//! programmed electronically. This crate collects the building blocks needed
//! to study the links such a surface creates:
//!
//! * [`scene`] — Tx–RIS–Rx geometry: per-element ray lengths, incidence and
//!   reflection angles, near/far-field classification, and the ellipse sweep
//!   used for link-budget studies.
//! * [`pathloss`] — the family of large-scale path loss models published for
//!   RIS links (two-ray, physical-optics, general element-sum, far/near-field
//!   beamforming and broadcasting closed forms, refined variants, power
//!   efficiency and tile/RCS formulations), plus phase-profile design,
//!   quantization, element patterns, and array-factor/HPBW analysis.
//! * [`smallscale`] — cascaded and keyhole channel composition, a reduced
//!   time-varying ray simulator with RIS phase tracking, temporal ACF, and
//!   channel metrics (Doppler/delay spread, rank, hardening, reciprocity).
//! * [`estimation`] — a synthetic channel sounder driven by switchable RIS
//!   transmission modes and a SAGE-style maximum-likelihood estimator of
//!   multipath parameters with RIS-path classification.
//!
//! All computations are pure functions of immutable inputs; random pieces are
//! driven by explicit seeds (see [`rng`]) so results reproduce bit-for-bit.
//!
//! ```
//! use ris_channel::pathloss::{design_phase_profile, tang_general_path_loss, PhaseProfileSpec};
//! use ris_channel::scene::{Antenna, Point3, RisPanel, RisPose, Scene, Vec3};
//!
//! // A 20 x 20 panel at 5.4 GHz, endpoints a few meters in front of it.
//! let mut panel = RisPanel::new(20, 20, 0.018, 0.018)?;
//! let pose = RisPose::from_normal(Point3::new(0.0, 0.0, 0.0), Vec3::new(0.0, 0.0, 1.0))?;
//! let tx = Antenna::new(Point3::new(4.0, 0.0, 6.0), 1.0);
//! let rx = Antenna::new(Point3::new(-3.0, 1.0, 8.0), 1.0);
//! let scene = Scene::build(tx, rx, &panel, pose, 5.4e9)?;
//!
//! // Co-phase every element toward the receiver and evaluate the
//! // element-sum path loss.
//! let phases = design_phase_profile(&PhaseProfileSpec::focus_on_rx(&scene), &panel, &scene)?;
//! panel.set_phase_profile(phases)?;
//! let focused = tang_general_path_loss(&panel, &scene)?.path_loss_db;
//!
//! // The focused profile can only beat the zero-phase panel.
//! let flat = RisPanel::new(20, 20, 0.018, 0.018)?;
//! let unfocused = tang_general_path_loss(&flat, &scene)?.path_loss_db;
//! assert!(focused <= unfocused);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod estimation;
pub mod pathloss;
pub mod rng;
pub mod scene;
pub mod smallscale;
pub mod units;

pub use num_complex::Complex64;

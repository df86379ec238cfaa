//! Small-scale channel composition and statistics.
//!
//! Composition follows the two standard abstractions: the cascaded
//! (phase-shift) model `H = H_direct + H_ris_rx diag(theta) H_tx_ris`, and
//! the keyhole model where every RIS element contributes one rank-1 dyad.
//! [`fading`] adds a reduced time-varying ray simulator with an RIS
//! phase-tracking toggle, and [`metrics`] the derived channel statistics.

pub mod fading;
pub mod metrics;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

pub use fading::{
    simulate_time_varying_channel, temporal_acf, ChannelSeries, FadingScenario, Ray, RisBaseline,
};
pub use metrics::{
    doppler_spread, effective_rank_and_condition, hardening_statistics, reciprocity_check,
    rms_delay_spread, HardeningStat, LinkModel, PhaseMode, ReciprocityReport,
};

/// Errors from channel composition and statistics.
#[derive(Debug, Error)]
pub enum SmallScaleError {
    #[error("dimension mismatch: {0}")]
    Dimensions(String),
    #[error("reflection coefficient {idx} has |theta| = {magnitude} > 1 for a passive RIS")]
    ActiveTheta { idx: usize, magnitude: f64 },
    #[error("power weights sum to {0}, expected 1")]
    WeightsNotNormalized(f64),
    #[error("sampling interval {interval} s violates the anti-alias guard 1/(8 f_d) = {guard} s")]
    SamplingGuard { interval: f64, guard: f64 },
    #[error("{0}")]
    Invalid(String),
}

/// The three sub-channels of the cascaded composition.
#[derive(Debug, Clone)]
pub struct SubChannels {
    /// Direct Tx–Rx channel, `Nr x Nt`.
    pub h_direct: DMatrix<Complex64>,
    /// Tx to RIS, `Q x Nt`.
    pub h_tx_ris: DMatrix<Complex64>,
    /// RIS to Rx, `Nr x Q`.
    pub h_ris_rx: DMatrix<Complex64>,
    /// Q per-element reflection coefficients, `|theta_q| <= 1`.
    pub theta: Vec<Complex64>,
}

impl SubChannels {
    pub fn validate(&self) -> Result<(), SmallScaleError> {
        let (nr, nt) = self.h_direct.shape();
        let (q_tx, nt2) = self.h_tx_ris.shape();
        let (nr2, q_rx) = self.h_ris_rx.shape();
        if nt != nt2 || nr != nr2 || q_tx != q_rx || q_tx != self.theta.len() {
            return Err(SmallScaleError::Dimensions(format!(
                "direct {nr}x{nt}, tx-ris {q_tx}x{nt2}, ris-rx {nr2}x{q_rx}, theta {}",
                self.theta.len()
            )));
        }
        for (idx, t) in self.theta.iter().enumerate() {
            let magnitude = t.norm();
            if magnitude > 1.0 + 1e-12 {
                return Err(SmallScaleError::ActiveTheta { idx, magnitude });
            }
        }
        Ok(())
    }
}

/// Cascaded (phase-shift) composition:
/// `H = H_direct + H_ris_rx diag(theta) H_tx_ris`.
pub fn cascaded_channel(sub: &SubChannels) -> Result<DMatrix<Complex64>, SmallScaleError> {
    sub.validate()?;
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(sub.theta.clone()));
    Ok(&sub.h_direct + &sub.h_ris_rx * diag * &sub.h_tx_ris)
}

/// Keyhole composition: `H = sum_q theta_q a_q b_q^T` (plain transpose, no
/// conjugation), one dyad per RIS element.
pub fn keyhole_channel(
    rx_responses: &[Vec<Complex64>],
    tx_responses: &[Vec<Complex64>],
    theta: &[Complex64],
) -> Result<DMatrix<Complex64>, SmallScaleError> {
    if rx_responses.len() != tx_responses.len() || rx_responses.len() != theta.len() {
        return Err(SmallScaleError::Dimensions(format!(
            "{} rx responses, {} tx responses, {} coefficients",
            rx_responses.len(),
            tx_responses.len(),
            theta.len()
        )));
    }
    if theta.is_empty() {
        return Err(SmallScaleError::Dimensions(
            "keyhole model needs Q >= 1".into(),
        ));
    }
    let nr = rx_responses[0].len();
    let nt = tx_responses[0].len();
    let mut h = DMatrix::from_element(nr, nt, Complex64::new(0.0, 0.0));
    for ((a, b), t) in rx_responses.iter().zip(tx_responses).zip(theta) {
        if a.len() != nr || b.len() != nt {
            return Err(SmallScaleError::Dimensions(
                "ragged element responses".into(),
            ));
        }
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                h[(i, j)] += t * ai * bj;
            }
        }
    }
    Ok(h)
}

/// Uniform-line-array response `[1, e^{j pi sin th}, ...]` at half-wavelength
/// pitch, handy for building dyads in tests and experiments.
pub fn ula_response(elements: usize, angle_rad: f64) -> Vec<Complex64> {
    (0..elements)
        .map(|i| Complex64::from_polar(1.0, std::f64::consts::PI * i as f64 * angle_rad.sin()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::child_rng;
    use rand_distr::{Distribution, StandardNormal};

    fn cn(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_gaussian_vec(rng: &mut impl rand::Rng, len: usize) -> Vec<Complex64> {
        (0..len)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                cn(re / 2f64.sqrt(), im / 2f64.sqrt())
            })
            .collect()
    }

    #[test]
    fn scalar_cascade_is_link_product() {
        let sub = SubChannels {
            h_direct: DMatrix::from_element(1, 1, cn(0.0, 0.0)),
            h_tx_ris: DMatrix::from_element(1, 1, cn(0.6, 0.8)),
            h_ris_rx: DMatrix::from_element(1, 1, cn(0.0, 2.0)),
            theta: vec![cn(1.0, 0.0)],
        };
        let h = cascaded_channel(&sub).unwrap();
        let expected = cn(0.6, 0.8) * cn(0.0, 2.0);
        assert!((h[(0, 0)] - expected).norm() < 1e-12);
    }

    #[test]
    fn cophased_theta_reaches_amplitude_sum() {
        let q = 16;
        let mut rng = child_rng(1, 0);
        let g = random_gaussian_vec(&mut rng, q); // ris -> rx
        let f = random_gaussian_vec(&mut rng, q); // tx -> ris
        let theta: Vec<Complex64> = g
            .iter()
            .zip(&f)
            .map(|(gq, fq)| Complex64::from_polar(1.0, -(gq * fq).arg()))
            .collect();
        let sub = SubChannels {
            h_direct: DMatrix::from_element(1, 1, cn(0.0, 0.0)),
            h_tx_ris: DMatrix::from_vec(q, 1, f.clone()),
            h_ris_rx: DMatrix::from_vec(1, q, g.clone()),
            theta,
        };
        let h = cascaded_channel(&sub).unwrap();
        let bound: f64 = g.iter().zip(&f).map(|(gq, fq)| gq.norm() * fq.norm()).sum();
        assert!((h[(0, 0)].norm() - bound).abs() < 1e-9 * bound);
    }

    #[test]
    fn random_theta_mean_power_scales_with_q() {
        // E|H|^2 ~ Q for unit-variance cascaded links with random phases.
        let q = 256;
        let draws = 10_000;
        let mut total = 0.0;
        for draw in 0..draws {
            let mut rng = child_rng(2, draw);
            let g = random_gaussian_vec(&mut rng, q);
            let f = random_gaussian_vec(&mut rng, q);
            let mut h = cn(0.0, 0.0);
            for (gq, fq) in g.iter().zip(&f) {
                let phase: f64 = rand::Rng::random::<f64>(&mut rng) * std::f64::consts::TAU;
                h += gq * fq * Complex64::from_polar(1.0, phase);
            }
            total += h.norm_sqr();
        }
        let mean = total / draws as f64;
        assert!(
            (mean - q as f64).abs() < 0.05 * q as f64,
            "E|H|^2 = {mean}, expected ~{q}"
        );
    }

    #[test]
    fn cascade_rejects_dimension_mismatch() {
        let sub = SubChannels {
            h_direct: DMatrix::from_element(2, 2, cn(0.0, 0.0)),
            h_tx_ris: DMatrix::from_element(4, 2, cn(1.0, 0.0)),
            h_ris_rx: DMatrix::from_element(2, 3, cn(1.0, 0.0)),
            theta: vec![cn(1.0, 0.0); 4],
        };
        assert!(matches!(
            cascaded_channel(&sub),
            Err(SmallScaleError::Dimensions(_))
        ));
    }

    #[test]
    fn cascade_rejects_active_theta() {
        let sub = SubChannels {
            h_direct: DMatrix::from_element(1, 1, cn(0.0, 0.0)),
            h_tx_ris: DMatrix::from_element(1, 1, cn(1.0, 0.0)),
            h_ris_rx: DMatrix::from_element(1, 1, cn(1.0, 0.0)),
            theta: vec![cn(1.5, 0.0)],
        };
        assert!(matches!(
            cascaded_channel(&sub),
            Err(SmallScaleError::ActiveTheta { .. })
        ));
    }

    #[test]
    fn cascade_is_linear_in_theta() {
        let q = 8;
        let mut rng = child_rng(3, 0);
        let f = random_gaussian_vec(&mut rng, q * 2);
        let g = random_gaussian_vec(&mut rng, q * 3);
        let d = random_gaussian_vec(&mut rng, 6);
        let ta = random_gaussian_vec(&mut rng, q);
        let tb = random_gaussian_vec(&mut rng, q);
        let build = |theta: Vec<Complex64>| SubChannels {
            h_direct: DMatrix::from_vec(3, 2, d.clone()),
            h_tx_ris: DMatrix::from_vec(q, 2, f.clone()),
            h_ris_rx: DMatrix::from_vec(3, q, g.clone()),
            theta,
        };
        // Scale thetas into the passive disc.
        let ta: Vec<_> = ta.iter().map(|t| t / (2.0 * t.norm().max(1.0))).collect();
        let tb: Vec<_> = tb.iter().map(|t| t / (2.0 * t.norm().max(1.0))).collect();
        let tsum: Vec<_> = ta.iter().zip(&tb).map(|(a, b)| a + b).collect();
        let ha = cascaded_channel(&build(ta)).unwrap();
        let hb = cascaded_channel(&build(tb)).unwrap();
        let hsum = cascaded_channel(&build(tsum)).unwrap();
        let direct = DMatrix::from_vec(3, 2, d.clone());
        let lhs = &ha + &hb - &direct;
        for i in 0..3 {
            for j in 0..2 {
                assert!((lhs[(i, j)] - hsum[(i, j)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn triangle_bound_on_cascade() {
        let q = 32;
        let mut rng = child_rng(4, 0);
        let f = random_gaussian_vec(&mut rng, q);
        let g = random_gaussian_vec(&mut rng, q);
        let theta: Vec<Complex64> = (0..q)
            .map(|_| {
                Complex64::from_polar(
                    rand::Rng::random::<f64>(&mut rng),
                    rand::Rng::random::<f64>(&mut rng) * std::f64::consts::TAU,
                )
            })
            .collect();
        let sub = SubChannels {
            h_direct: DMatrix::from_element(1, 1, cn(0.0, 0.0)),
            h_tx_ris: DMatrix::from_vec(q, 1, f.clone()),
            h_ris_rx: DMatrix::from_vec(1, q, g.clone()),
            theta,
        };
        let h = cascaded_channel(&sub).unwrap();
        let bound: f64 = f.iter().zip(&g).map(|(a, b)| a.norm() * b.norm()).sum();
        assert!(h[(0, 0)].norm() <= bound + 1e-12);
    }

    #[test]
    fn keyhole_single_dyad_is_rank_one() {
        let a = ula_response(4, 0.5);
        let b = ula_response(3, -0.2);
        let h = keyhole_channel(&[a], &[b], &[cn(1.0, 0.0)]).unwrap();
        let svd = h.svd(false, false);
        let s = &svd.singular_values;
        assert!(s[0] > 1e-9);
        for i in 1..s.len() {
            assert!(s[i] < 1e-9 * s[0], "sigma_{i} = {}", s[i]);
        }
    }

    #[test]
    fn keyhole_identical_dyads_collapse_to_rank_one() {
        let a = ula_response(4, 0.3);
        let b = ula_response(4, 0.9);
        let theta = vec![cn(0.5, 0.1), cn(-0.2, 0.4), cn(0.3, -0.3)];
        let h = keyhole_channel(
            &[a.clone(), a.clone(), a.clone()],
            &[b.clone(), b.clone(), b.clone()],
            &theta,
        )
        .unwrap();
        let tsum: Complex64 = theta.iter().sum();
        let expected = keyhole_channel(&[a], &[b], &[tsum]).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((h[(i, j)] - expected[(i, j)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn keyhole_rank_bounded_by_q() {
        let mut rng = child_rng(5, 0);
        let q = 2;
        let rx: Vec<Vec<Complex64>> = (0..q).map(|_| random_gaussian_vec(&mut rng, 4)).collect();
        let tx: Vec<Vec<Complex64>> = (0..q).map(|_| random_gaussian_vec(&mut rng, 4)).collect();
        let theta = vec![cn(1.0, 0.0), cn(0.0, 1.0)];
        let h = keyhole_channel(&rx, &tx, &theta).unwrap();
        let svd = h.svd(false, false);
        let s = &svd.singular_values;
        let rank = s.iter().filter(|&&v| v > 1e-9 * s[0]).count();
        assert!(rank <= q, "rank {rank} exceeds Q = {q}");
    }

    #[test]
    fn transpose_composition_matches_reverse_link() {
        // Reciprocity of the composition: transposing every sub-channel and
        // keeping theta gives exactly H^T.
        let mut rng = child_rng(6, 0);
        let q = 5;
        let f = DMatrix::from_vec(q, 2, random_gaussian_vec(&mut rng, q * 2));
        let g = DMatrix::from_vec(3, q, random_gaussian_vec(&mut rng, 3 * q));
        let d = DMatrix::from_vec(3, 2, random_gaussian_vec(&mut rng, 6));
        let theta: Vec<Complex64> = (0..q)
            .map(|_| Complex64::from_polar(0.9, rand::Rng::random::<f64>(&mut rng)))
            .collect();
        let fwd = cascaded_channel(&SubChannels {
            h_direct: d.clone(),
            h_tx_ris: f.clone(),
            h_ris_rx: g.clone(),
            theta: theta.clone(),
        })
        .unwrap();
        let rev = cascaded_channel(&SubChannels {
            h_direct: d.transpose(),
            h_tx_ris: g.transpose(),
            h_ris_rx: f.transpose(),
            theta,
        })
        .unwrap();
        let fwd_t = fwd.transpose();
        for i in 0..2 {
            for j in 0..3 {
                assert!((rev[(i, j)] - fwd_t[(i, j)]).norm() < 1e-12);
            }
        }
    }
}

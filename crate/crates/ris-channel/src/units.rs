//! Unit conversions shared across the crate.
//!
//! Convention: a path loss is a power ratio `>= 1` expressed as a positive
//! dB value, `path_loss_db = 10*log10(P_tx/P_rx) = -20*log10(|amplitude ratio|)`.
//! Formulas are still evaluated as-is when they fall below 0 dB (a focused
//! aperture can show net gain); nothing is clamped.

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Wavelength in meters for a carrier frequency in Hz.
#[inline]
pub fn wavelength(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / frequency_hz
}

/// Power ratio to dB.
#[inline]
pub fn db_from_power(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// dB to power ratio.
#[inline]
pub fn db_to_power(db: f64) -> f64 {
    10.0_f64.powf(db / 10.0)
}

/// Amplitude ratio to dB (20 log10).
#[inline]
pub fn db_from_amplitude(ratio: f64) -> f64 {
    20.0 * ratio.log10()
}

/// Antenna gain in dBi to linear gain.
#[inline]
pub fn dbi_to_linear(gain_dbi: f64) -> f64 {
    db_to_power(gain_dbi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wavelength_at_10_5_ghz() {
        let lambda = wavelength(10.5e9);
        assert!((lambda - 0.028551662).abs() < 1e-8);
    }

    #[test]
    fn db_of_unity_is_zero() {
        assert_eq!(db_from_power(1.0), 0.0);
        assert_eq!(db_from_amplitude(1.0), 0.0);
    }

    proptest! {
        // Round trip between amplitude-ratio and dB conventions stays within
        // 1e-12 dB (the convention check for every model output).
        #[test]
        fn db_round_trip(db in -200.0_f64..200.0) {
            let amp = db_to_power(db / 2.0); // amplitude ratio: 20 log10 |a| = db
            let back = db_from_amplitude(amp);
            prop_assert!((back - db).abs() < 1e-12);
            let power = db_to_power(db);
            prop_assert!((db_from_power(power) - db).abs() < 1e-12);
        }
    }
}

//! Experiment runner behind the `ris-sim` binary.
//!
//! [`config`] parses and validates the JSON experiment descriptions (strict:
//! unknown and duplicate keys are errors, units are the documented file
//! units — meters, Hz, dBi, dBm, degrees), [`experiment`] runs each
//! experiment kind against `ris-channel`, and [`table`] renders the results
//! as CSV or JSON with a provenance footer. Outputs are byte-identical for
//! identical (config bytes, seed).

pub mod config;
pub mod experiment;
pub mod table;

pub use config::{parse_config, ConfigError, ExperimentConfig, ExperimentKind};
pub use experiment::{run_experiment, ExperimentError};
pub use table::{Cell, Column, Provenance, ResultTable};

/// Hex SHA-256 of the raw config bytes, embedded in output provenance.
pub fn config_hash(config_text: &str) -> String {
    use sha2::{Digest, Sha256};
    let digest = Sha256::digest(config_text.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

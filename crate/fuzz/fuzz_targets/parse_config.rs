#![no_main]

use libfuzzer_sys::fuzz_target;

// The config parser must never panic on arbitrary bytes, and any config it
// accepts must survive a serialize/re-parse round trip unchanged.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(config) = ris_sim::parse_config(text) else { return };
    let serialized = serde_json::to_string(&config).expect("accepted config serializes");
    let reparsed = ris_sim::parse_config(&serialized).expect("round trip parses");
    assert_eq!(config, reparsed, "round trip changed the config");
});

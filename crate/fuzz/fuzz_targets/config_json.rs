#![no_main]

use libfuzzer_sys::fuzz_target;
use torus_cpi_cli::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cfg) = ExperimentConfig::from_json(text) else { return };
    // validation must not panic; the config must survive a roundtrip
    let _ = cfg.validate();
    let json = serde_json::to_string(&cfg).expect("config serializes");
    assert_eq!(ExperimentConfig::from_json(&json).expect("reloads"), cfg);
});

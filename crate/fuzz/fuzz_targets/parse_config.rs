#![no_main]

use libfuzzer_sys::fuzz_target;
use vmfcorr_cli::parse_config;

fuzz_target!(|data: &str| {
    match parse_config(data) {
        Ok(config) => {
            // accepted configs must name a mode and a valid threshold
            let _ = config.mode.mode().to_string();
            assert!(config.threshold > 0.0 && config.threshold < 1.0);
        }
        Err(e) => {
            let _ = e.to_string();
        }
    }
});

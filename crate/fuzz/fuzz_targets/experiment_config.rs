#![no_main]

use libfuzzer_sys::fuzz_target;
use ratio_lasso::experiments::parse_experiment_config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = parse_experiment_config(text) {
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(parse_experiment_config(&json).unwrap(), cfg);
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use ratio_lasso::experiments::parse_run_settings;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(s) = parse_run_settings(text) {
        let _ = s.experiment_config();
    }
});

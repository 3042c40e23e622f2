#![no_main]

use libfuzzer_sys::fuzz_target;
use ratio_lasso::experiments::{parse_report_csv, summarize};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cells) = parse_report_csv(text) {
        for s in summarize(&cells) {
            assert!(s.best_error.is_none_or(|e| e >= 0.0));
        }
    }
});

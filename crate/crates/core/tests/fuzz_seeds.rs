//! Replays the checked-in fuzz corpus seeds through the same checks the fuzz
//! targets make, so the seeds and the invariants stay exercised on stable.

use std::fs;
use std::path::PathBuf;

use ratio_lasso::experiments::{
    parse_experiment_config, parse_report_csv, parse_run_settings, summarize,
};
use ratio_lasso::graph::{format_edge_list, parse_edge_list};

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .map(|p| {
            let text = fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn edge_list_seeds() {
    let mut parsed = 0;
    for (path, text) in seeds("edge_list") {
        if let Ok(g) = parse_edge_list(&text) {
            assert_eq!(
                parse_edge_list(&format_edge_list(&g)).unwrap(),
                g,
                "{}",
                path.display()
            );
            parsed += 1;
        }
    }
    assert!(parsed > 0);
}

#[test]
fn experiment_config_seeds() {
    for (path, text) in seeds("experiment_config") {
        let cfg =
            parse_experiment_config(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(parse_experiment_config(&json).unwrap(), cfg);
    }
}

#[test]
fn run_settings_seeds() {
    for (path, text) in seeds("run_settings") {
        let s = parse_run_settings(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let _ = s.experiment_config();
    }
}

#[test]
fn report_csv_seeds() {
    for (path, text) in seeds("report_csv") {
        let cells = parse_report_csv(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        for s in summarize(&cells) {
            assert!(s.best_error.is_none_or(|e| e >= 0.0));
        }
    }
}

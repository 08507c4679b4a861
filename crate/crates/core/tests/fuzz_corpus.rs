//! Replays the checked-in fuzz seeds through the same round-trip checks the
//! fuzz targets make, so they run under plain `cargo test`.

use std::fs;
use std::path::{Path, PathBuf};

use pmibound::config::ScenarioConfig;
use pmibound::report::{parse_csv, parse_json};

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"))
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
    assert!(!out.is_empty());
    out
}

#[test]
fn config_seeds() {
    let mut accepted = 0;
    for (path, text) in seeds("fuzz_config") {
        if let Ok(config) = ScenarioConfig::from_toml(&text) {
            accepted += 1;
            let again = ScenarioConfig::from_toml(&config.to_toml()).unwrap();
            assert_eq!(again.to_toml(), config.to_toml(), "{}", path.display());
            if config.prior.grid() <= 513 {
                config.resolve().unwrap();
            }
        }
    }
    assert!(accepted >= 4);
}

#[test]
fn csv_seeds() {
    let mut accepted = 0;
    for (path, text) in seeds("fuzz_report_csv") {
        if let Ok(report) = parse_csv(&text) {
            accepted += 1;
            assert_eq!(report.to_csv(), text, "{}", path.display());
        }
    }
    assert!(accepted >= 2);
}

#[test]
fn json_seeds() {
    let mut accepted = 0;
    for (path, text) in seeds("fuzz_report_json") {
        if let Ok(report) = parse_json(&text) {
            accepted += 1;
            assert_eq!(report.to_json(), text, "{}", path.display());
        }
    }
    assert!(accepted >= 2);
}

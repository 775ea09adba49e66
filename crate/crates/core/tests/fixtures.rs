//! The committed `fixtures/corridor` case must match the builder used by the
//! library tests. Run with `BLENDPLAN_BLESS=1` to rewrite it.

mod common;

use std::path::{Path, PathBuf};

use blendplan::system::{EnergySystem, FlowFormulation, ScenarioConfig};
use blendplan::temporal::{TemporalStructure, WeightTargets};
use common::*;

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/corridor")
}

fn fixture_config() -> ScenarioConfig {
    ScenarioConfig {
        year_days: 1.0,
        year_hours: 2.0,
        ..config(FlowFormulation::Btp)
    }
}

fn write_case(dir: &Path) {
    let (sys, ts) = corridor();
    std::fs::create_dir_all(dir).unwrap();
    sys.write_dir(dir).unwrap();
    ts.write_dir(dir).unwrap();
    std::fs::write(dir.join("config.toml"), fixture_config().to_toml()).unwrap();
}

fn listing(dir: &Path) -> Vec<(String, String)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read_to_string(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn corridor_fixture_matches_builder() {
    if std::env::var_os("BLENDPLAN_BLESS").is_some() {
        write_case(&fixture_dir());
    }
    let fresh = tempfile::tempdir().unwrap();
    write_case(fresh.path());
    let expected = listing(fresh.path());
    let committed = listing(&fixture_dir());
    assert_eq!(
        committed.iter().map(|(n, _)| n).collect::<Vec<_>>(),
        expected.iter().map(|(n, _)| n).collect::<Vec<_>>()
    );
    for ((name, got), (_, want)) in committed.iter().zip(&expected) {
        assert_eq!(got, want, "{name} differs from the builder output");
    }
}

#[test]
fn corridor_fixture_round_trips() {
    let dir = fixture_dir();
    let cfg = ScenarioConfig::read(&dir.join("config.toml")).unwrap();
    assert_eq!(cfg, fixture_config());
    let sys = EnergySystem::read_dir(&dir).unwrap();
    let (built, ts) = corridor();
    assert_eq!(sys, built);
    let targets = WeightTargets {
        rp_sum: cfg.year_days,
        hour_sum: cfg.year_hours,
    };
    let read_ts = TemporalStructure::read_dir(&dir, targets).unwrap();
    assert_eq!(read_ts, ts);
}

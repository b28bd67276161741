//! Replays the grid fixtures shared with the annotation studio.

use std::path::PathBuf;

use astra_core::act::{build_grid, ActError};
use astra_core::config::ElementMap;
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFixture {
    description: String,
    tolerance: f64,
    map: ElementMap,
    expected_rows: Vec<Vec<String>>,
}

fn fixtures() -> Vec<(String, GridFixture)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/grid");
    let mut out: Vec<(String, GridFixture)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| entry.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            let fixture = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, fixture)
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

#[test]
fn every_fixture_matches_the_grid_builder() {
    let all = fixtures();
    assert!(all.len() >= 6, "only {} fixtures", all.len());
    for (name, f) in &all {
        assert!(!f.description.is_empty(), "{name}");
        let rows: Vec<Vec<String>> = match build_grid(&f.map, f.tolerance) {
            Ok(g) => g.rows.iter().map(|r| r.iter().map(|e| e.content.clone()).collect()).collect(),
            Err(ActError::NoInteractiveElements(_)) => Vec::new(),
            Err(e) => panic!("{name}: {e}"),
        };
        assert_eq!(rows, f.expected_rows, "{name}: {}", f.description);
    }
}

#[test]
fn fixture_order_in_the_file_does_not_matter() {
    for (name, f) in fixtures() {
        let mut reversed = f.map.clone();
        reversed.elements.reverse();
        let a = build_grid(&f.map, f.tolerance).map(|g| g.rows);
        let b = build_grid(&reversed, f.tolerance).map(|g| g.rows);
        assert_eq!(a, b, "{name}");
    }
}

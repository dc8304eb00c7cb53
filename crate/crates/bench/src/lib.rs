//! Shared fixture loading for the benchmarks.

use std::path::PathBuf;

use chorimap_core::{parse_geojson, parse_indicator, GeoJsonOptions, Workspace};

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// The Europe geometry plus the life-expectancy series.
pub fn europe_workspace() -> Workspace {
    let dir = fixture_dir();
    let geo = std::fs::read(dir.join("europe.geojson")).expect("europe fixture");
    let data = std::fs::read(dir.join("life_expectancy.json")).expect("life fixture");
    let features = parse_geojson(&geo, &GeoJsonOptions::default()).expect("valid geometry");
    let series = parse_indicator(&data).expect("valid series");
    Workspace::new(features, vec![series]).expect("valid workspace")
}

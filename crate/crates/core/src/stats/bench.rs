use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::Viewport;
use crate::render::{render_map, RenderOptions, RenderRequest};
use crate::symbolize::MapType;
use crate::workspace::Workspace;

pub const DEFAULT_ITERATIONS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeTimings {
    pub iterations: usize,
    pub millis: Vec<f64>,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl TypeTimings {
    fn from_samples(millis: Vec<f64>) -> Self {
        let n = millis.len();
        let mean = millis.iter().sum::<f64>() / n as f64;
        let min = millis.iter().copied().fold(f64::INFINITY, f64::min);
        let max = millis.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self { iterations: n, millis, mean, min, max }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchReport {
    pub per_type: BTreeMap<String, TypeTimings>,
    pub environment: String,
}

impl BenchReport {
    pub fn get(&self, t: MapType) -> Option<&TypeTimings> {
        self.per_type.get(t.as_str())
    }
}

/// Short description of the machine the benchmark ran on.
pub fn environment_note() -> String {
    let cpus = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let profile = if cfg!(debug_assertions) { "debug" } else { "release" };
    format!("{}-{}, {cpus} logical cpus, {profile} build", std::env::consts::OS, std::env::consts::ARCH)
}

/// Time full map renders of every map type, one type at a time.
///
/// Each type gets one unrecorded warm-up render before its timed runs.
pub fn bench_render(
    ws: &Workspace,
    dataset: &str,
    year: i32,
    iterations: usize,
    viewport: Viewport,
) -> Result<BenchReport> {
    if iterations == 0 {
        return Err(Error::invalid("iterations must be at least 1"));
    }
    let mut per_type = BTreeMap::new();
    for map_type in MapType::ALL {
        let req = RenderRequest {
            dataset: dataset.to_owned(),
            year,
            map_type,
            viewport: viewport.clone(),
            options: RenderOptions { legend: true, ..RenderOptions::default() },
        };
        render_map(ws, &req)?;
        let mut millis = Vec::with_capacity(iterations);
        for _ in 0..iterations {
            let t = Instant::now();
            let doc = render_map(ws, &req)?;
            millis.push(t.elapsed().as_secs_f64() * 1e3);
            std::hint::black_box(doc);
        }
        log::debug!("{map_type}: {millis:?}");
        per_type.insert(map_type.as_str().to_owned(), TypeTimings::from_samples(millis));
    }
    Ok(BenchReport { per_type, environment: environment_note() })
}

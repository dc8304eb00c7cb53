//! Read-only container joining geometry with the loaded datasets.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::classify::{classify_year, Classification};
use crate::error::{Error, Result};
use crate::geom::{anchor_for_parts, AnchorPoint, Viewport, DEFAULT_PRECISION};
use crate::ingest::{feature_set_to_value, join, FeatureSet, GeoJsonOptions, IndicatorSeries, JoinReport};
use crate::symbolize::StyleOptions;

/// Anchors per feature id for one viewport.
pub type AnchorMap = BTreeMap<String, AnchorPoint>;

type ViewportKey = (u32, u32, [u64; 4]);

fn viewport_key(vp: &Viewport) -> ViewportKey {
    let (a, b, c, d) = vp.bounds;
    (vp.width_px, vp.height_px, [a.to_bits(), b.to_bits(), c.to_bits(), d.to_bits()])
}

/// Summary of one dataset as listed by the service.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetInfo {
    pub id: String,
    pub goal: u8,
    pub indicator: String,
    pub unit: String,
    pub years: Vec<i32>,
}

#[derive(Debug)]
pub struct Workspace {
    features: FeatureSet,
    datasets: BTreeMap<String, IndicatorSeries>,
    style: StyleOptions,
    anchors: RwLock<HashMap<ViewportKey, Arc<AnchorMap>>>,
}

impl Workspace {
    pub fn new(features: FeatureSet, series: Vec<IndicatorSeries>) -> Result<Self> {
        let mut datasets = BTreeMap::new();
        for s in series {
            let id = s.id.clone();
            if datasets.insert(id.clone(), s).is_some() {
                return Err(Error::validation(format!("duplicate dataset id '{id}'")));
            }
        }
        Ok(Self { features, datasets, style: StyleOptions::default(), anchors: RwLock::default() })
    }

    pub fn with_style(mut self, style: StyleOptions) -> Self {
        self.style = style;
        self
    }

    pub fn features(&self) -> &FeatureSet {
        &self.features
    }

    pub fn style(&self) -> &StyleOptions {
        &self.style
    }

    pub fn datasets(&self) -> impl Iterator<Item = &IndicatorSeries> {
        self.datasets.values()
    }

    pub fn dataset(&self, id: &str) -> Result<&IndicatorSeries> {
        self.datasets
            .get(id)
            .ok_or_else(|| Error::NotFound { kind: "dataset", id: id.to_owned() })
    }

    pub fn dataset_infos(&self) -> Vec<DatasetInfo> {
        self.datasets
            .values()
            .map(|s| DatasetInfo {
                id: s.id.clone(),
                goal: s.goal,
                indicator: s.indicator.clone(),
                unit: s.unit.clone(),
                years: s.years(),
            })
            .collect()
    }

    pub fn join_report(&self, dataset: &str) -> Result<JoinReport> {
        Ok(join(&self.features, self.dataset(dataset)?))
    }

    /// Classification of `dataset` in `year` over every feature.
    pub fn classify(&self, dataset: &str, year: i32, k: usize) -> Result<Classification> {
        let s = self.dataset(dataset)?;
        let (first, last) = s.year_span();
        if year < first || year > last {
            return Err(Error::EmptyYear(year));
        }
        classify_year(&self.features, s, year, k)
    }

    /// Pole-of-inaccessibility anchors of every feature's largest part,
    /// computed once per viewport.
    pub fn anchors(&self, vp: &Viewport) -> Result<Arc<AnchorMap>> {
        let key = viewport_key(vp);
        if let Some(hit) = self.anchors.read().expect("anchor cache poisoned").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let mut map = AnchorMap::new();
        for f in &self.features.features {
            let parts: Vec<_> = f.geometry.parts().iter().map(|p| vp.project_polygon(p)).collect();
            map.insert(f.id.clone(), anchor_for_parts(&parts, DEFAULT_PRECISION)?);
        }
        let map = Arc::new(map);
        // Another thread may have won the race; keep whichever landed first.
        let mut cache = self.anchors.write().expect("anchor cache poisoned");
        Ok(Arc::clone(cache.entry(key).or_insert(map)))
    }

    /// The geometry as GeoJSON with an `anchor: [lon, lat]` property per feature.
    pub fn geometry_with_anchors(&self, opts: &GeoJsonOptions) -> Result<Value> {
        let vp = Viewport::world(4096, 4096);
        let anchors = self.anchors(&vp)?;
        let extra: BTreeMap<String, Map<String, Value>> = anchors
            .iter()
            .map(|(id, a)| {
                let [lon, lat] = vp.unproject(a.position);
                let mut m = Map::new();
                m.insert("anchor".into(), serde_json::json!([lon, lat]));
                (id.clone(), m)
            })
            .collect();
        Ok(feature_set_to_value(&self.features, opts, Some(&extra)))
    }
}

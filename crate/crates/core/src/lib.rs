//! Thematic-map engine for choropleth, graduated-symbol and choriented
//! maps of classed indicator time series.
//!
//! The pipeline runs `ingest` → `classify` → `colorlab`/`symbolize` →
//! `geom` → `render`. `query` answers comparison tasks over the classified
//! data and `stats` holds the render benchmark and bootstrap analysis.

pub mod classify;
pub mod colorlab;
pub mod error;
pub mod geom;
pub mod ingest;
pub mod query;
pub mod render;
pub mod stats;
pub mod symbolize;
pub mod workspace;

pub use classify::{classify_year, jenks_breaks, Breaks, ClassAssignment, ClassBound, Classification};
pub use colorlab::{ciede2000, srgb_to_lab, study_palette, validate_palette, Lab, Palette, Rgb};
pub use error::{Error, Result};
pub use geom::{pole_of_inaccessibility, AnchorPoint, Point, Viewport};
pub use ingest::{parse_geojson, parse_indicator, Feature, FeatureSet, GeoJsonOptions, IndicatorSeries, JoinReport};
pub use query::{
    clusters_query, frequency_query, ClusterRelation, Direction, DistributionMode, FrequencyRelation, Granularity,
    QueryEngine, QueryResult,
};
pub use render::{render_legend, render_map, render_popup, RenderOptions, RenderRequest, SvgDocument};
pub use stats::{bench_render, bootstrap_diff, BenchReport, BootstrapResult};
pub use symbolize::{AngleScheme, ClassStyle, LegendSpec, MapType, StyleOptions};
pub use workspace::{DatasetInfo, Workspace};

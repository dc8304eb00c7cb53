//! Service configuration and workspace loading.

use std::path::{Path, PathBuf};

use chorimap_core::classify::{DEFAULT_CLASSES, MAX_CLASSES, MIN_CLASSES};
use chorimap_core::{parse_geojson, parse_indicator, AngleScheme, GeoJsonOptions, StyleOptions, Workspace};
use serde::Deserialize;

use crate::error::CliError;

pub const DEFAULT_PORT: u16 = 8080;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct WorkspaceConfig {
    pub geometry_path: PathBuf,
    pub dataset_paths: Vec<PathBuf>,
    #[serde(default = "default_classes")]
    pub default_classes: usize,
    #[serde(default = "default_port")]
    pub port: u32,
    #[serde(default)]
    pub angle_scheme: AngleScheme,
    /// Origin allowed by CORS; `*` allows any.
    #[serde(default)]
    pub cors_origin: Option<String>,
    #[serde(default = "default_host")]
    pub host: String,
}

fn default_classes() -> usize {
    DEFAULT_CLASSES
}

fn default_port() -> u32 {
    u32::from(DEFAULT_PORT)
}

fn default_host() -> String {
    "127.0.0.1".into()
}

impl WorkspaceConfig {
    pub fn new(geometry_path: impl Into<PathBuf>, dataset_paths: Vec<PathBuf>) -> Self {
        Self {
            geometry_path: geometry_path.into(),
            dataset_paths,
            default_classes: DEFAULT_CLASSES,
            port: default_port(),
            angle_scheme: AngleScheme::default(),
            cors_origin: None,
            host: default_host(),
        }
    }

    pub fn from_toml_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(1..=65535).contains(&self.port) {
            return Err(CliError::Config(format!("port {} outside 1-65535", self.port)));
        }
        if !(MIN_CLASSES..=MAX_CLASSES).contains(&self.default_classes) {
            return Err(CliError::Config(format!(
                "defaultClasses {} outside {MIN_CLASSES}-{MAX_CLASSES}",
                self.default_classes
            )));
        }
        if self.dataset_paths.is_empty() {
            return Err(CliError::Config("no dataset paths".into()));
        }
        Ok(())
    }

    pub fn style(&self) -> StyleOptions {
        StyleOptions { scheme: self.angle_scheme, ..StyleOptions::default() }
    }

    /// Parse every input file; any failure aborts the load.
    pub fn load(&self) -> Result<Workspace, CliError> {
        self.validate()?;
        let features = read_geometry(&self.geometry_path)?;
        let series = self
            .dataset_paths
            .iter()
            .map(|p| read_series(p))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Workspace::new(features, series)?.with_style(self.style()))
    }
}

pub fn read_geometry(path: &Path) -> Result<chorimap_core::FeatureSet, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    parse_geojson(&bytes, &GeoJsonOptions::default()).map_err(|e| CliError::input(path, e))
}

pub fn read_series(path: &Path) -> Result<chorimap_core::IndicatorSeries, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    parse_indicator(&bytes).map_err(|e| CliError::input(path, e))
}

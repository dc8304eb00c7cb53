//! Parsing and validation of country geometry (GeoJSON) and indicator series
//! (JSON), and the id join between them.
//!
//! Both parsers preserve input order and keep missing values distinct from
//! any number. Serializers are provided so that `parse(serialize(parse(x)))`
//! is a fixed point.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// Latitude limit of the spherical Web Mercator square.
pub const MERCATOR_MAX_LAT: f64 = 85.051_128_779_806_59;

/// `[lon, lat]` in degrees.
pub type Position = [f64; 2];

/// A closed ring: first position equals the last, at least four positions.
pub type Ring = Vec<Position>;

/// One polygon: the outer ring followed by zero or more holes.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    pub rings: Vec<Ring>,
}

impl Polygon {
    pub fn exterior(&self) -> &Ring {
        &self.rings[0]
    }

    pub fn holes(&self) -> &[Ring] {
        &self.rings[1..]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Polygon(Polygon),
    MultiPolygon(Vec<Polygon>),
}

impl Geometry {
    pub fn parts(&self) -> &[Polygon] {
        match self {
            Geometry::Polygon(p) => std::slice::from_ref(p),
            Geometry::MultiPolygon(ps) => ps,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feature {
    /// ISO-3 code, three uppercase ASCII letters.
    pub id: String,
    pub name: String,
    pub geometry: Geometry,
}

/// Country polygons in input order, keyed by unique ISO-3 ids.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureSet {
    pub features: Vec<Feature>,
}

impl FeatureSet {
    pub fn get(&self, id: &str) -> Option<&Feature> {
        self.features.iter().find(|f| f.id == id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.features.iter().map(|f| f.id.as_str())
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    /// `(lon_min, lat_min, lon_max, lat_max)` over every position.
    pub fn bounds(&self) -> Option<(f64, f64, f64, f64)> {
        let mut it = self
            .features
            .iter()
            .flat_map(|f| f.geometry.parts())
            .flat_map(|p| p.rings.iter())
            .flatten();
        let first = it.next()?;
        let init = (first[0], first[1], first[0], first[1]);
        Some(it.fold(init, |(x0, y0, x1, y1), p| {
            (x0.min(p[0]), y0.min(p[1]), x1.max(p[0]), y1.max(p[1]))
        }))
    }
}

/// Property names used to read feature ids and display names.
#[derive(Debug, Clone)]
pub struct GeoJsonOptions {
    pub id_property: String,
    pub name_property: String,
}

impl Default for GeoJsonOptions {
    fn default() -> Self {
        Self {
            id_property: "ISO3".to_owned(),
            name_property: "NAME".to_owned(),
        }
    }
}

/// Signed shoelace area; positive for counterclockwise rings in a y-up frame.
pub fn ring_signed_area(ring: &[Position]) -> f64 {
    let n = ring.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        acc += a[0] * b[1] - b[0] * a[1];
    }
    acc / 2.0
}

fn json_error_offset(bytes: &[u8], err: &serde_json::Error) -> usize {
    let (line, column) = (err.line(), err.column());
    if line == 0 {
        return 0;
    }
    let mut offset = 0;
    for _ in 1..line {
        match bytes[offset..].iter().position(|&b| b == b'\n') {
            Some(p) => offset += p + 1,
            None => return bytes.len(),
        }
    }
    (offset + column.saturating_sub(1)).min(bytes.len())
}

fn parse_json(bytes: &[u8]) -> Result<Value> {
    serde_json::from_slice(bytes).map_err(|e| Error::Parse {
        offset: json_error_offset(bytes, &e),
        message: e.to_string(),
    })
}

#[derive(Debug)]
enum FeatureProblem {
    MissingId,
    BadId(String),
    DuplicateId(String),
    NonPolygonal(String),
    Geometry(String),
}

impl FeatureProblem {
    fn describe(&self) -> String {
        match self {
            FeatureProblem::MissingId => "missing id property".to_owned(),
            FeatureProblem::BadId(id) => format!("id '{id}' is not a 3-letter uppercase code"),
            FeatureProblem::DuplicateId(id) => format!("duplicate id '{id}'"),
            FeatureProblem::NonPolygonal(t) => format!("non-polygonal geometry '{t}'"),
            FeatureProblem::Geometry(m) => m.clone(),
        }
    }
}

fn parse_position(v: &Value) -> std::result::Result<Position, String> {
    let arr = v.as_array().ok_or("position is not an array")?;
    if arr.len() < 2 {
        return Err("position has fewer than 2 coordinates".into());
    }
    let lon = arr[0].as_f64().ok_or("non-numeric longitude")?;
    let lat = arr[1].as_f64().ok_or("non-numeric latitude")?;
    if !(-180.0..=180.0).contains(&lon) {
        return Err(format!("longitude {lon} outside [-180, 180]"));
    }
    if !(-90.0..=90.0).contains(&lat) {
        return Err(format!("latitude {lat} outside [-90, 90]"));
    }
    Ok([lon, lat])
}

fn parse_ring(v: &Value, clamped: &mut usize) -> std::result::Result<Ring, String> {
    let arr = v.as_array().ok_or("ring is not an array")?;
    let mut ring = arr
        .iter()
        .map(parse_position)
        .collect::<std::result::Result<Vec<_>, _>>()?;
    for p in &mut ring {
        if p[1].abs() > MERCATOR_MAX_LAT {
            p[1] = p[1].clamp(-MERCATOR_MAX_LAT, MERCATOR_MAX_LAT);
            *clamped += 1;
        }
    }
    if let (Some(first), Some(last)) = (ring.first().copied(), ring.last().copied()) {
        if first != last {
            ring.push(first);
        }
    }
    if ring.len() < 4 {
        return Err(format!("ring has {} positions, need at least 4", ring.len()));
    }
    Ok(ring)
}

fn parse_polygon(v: &Value, clamped: &mut usize) -> std::result::Result<Polygon, String> {
    let arr = v.as_array().ok_or("polygon is not an array of rings")?;
    if arr.is_empty() {
        return Err("polygon has no rings".into());
    }
    let mut rings = arr
        .iter()
        .map(|r| parse_ring(r, clamped))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if ring_signed_area(&rings[0]) == 0.0 {
        return Err("outer ring has zero area".into());
    }
    for (i, ring) in rings.iter_mut().enumerate() {
        let area = ring_signed_area(ring);
        // outer counterclockwise, holes clockwise
        if (i == 0 && area < 0.0) || (i > 0 && area > 0.0) {
            ring.reverse();
        }
    }
    Ok(Polygon { rings })
}

fn parse_geometry(v: &Value, clamped: &mut usize) -> std::result::Result<Geometry, FeatureProblem> {
    let kind = v.get("type").and_then(Value::as_str).unwrap_or("null");
    let coords = v.get("coordinates");
    let bad = |m: String| FeatureProblem::Geometry(m);
    match (kind, coords) {
        ("Polygon", Some(c)) => parse_polygon(c, clamped).map(Geometry::Polygon).map_err(bad),
        ("MultiPolygon", Some(c)) => {
            let parts = c
                .as_array()
                .ok_or_else(|| bad("MultiPolygon coordinates are not an array".into()))?;
            if parts.is_empty() {
                return Err(bad("MultiPolygon has no parts".into()));
            }
            parts
                .iter()
                .map(|p| parse_polygon(p, clamped))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(Geometry::MultiPolygon)
                .map_err(bad)
        }
        ("Polygon" | "MultiPolygon", None) => Err(bad("geometry has no coordinates".into())),
        (other, _) => Err(FeatureProblem::NonPolygonal(other.to_owned())),
    }
}

fn is_iso3(id: &str) -> bool {
    id.len() == 3 && id.bytes().all(|b| b.is_ascii_uppercase())
}

/// Parse a GeoJSON FeatureCollection of Polygon/MultiPolygon features.
///
/// Rings are closed when the last position differs from the first and
/// rewound so outer rings run counterclockwise and holes clockwise.
/// Latitudes beyond the Web Mercator band are clamped with a warning.
pub fn parse_geojson(bytes: &[u8], opts: &GeoJsonOptions) -> Result<FeatureSet> {
    let doc = parse_json(bytes)?;
    if doc.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(Error::validation("document is not a FeatureCollection"));
    }
    let raw = doc
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::validation("FeatureCollection has no features array"))?;

    let mut features = Vec::with_capacity(raw.len());
    let mut problems: Vec<(usize, FeatureProblem)> = Vec::new();
    let mut seen = HashSet::new();
    let mut clamped = 0usize;

    for (index, f) in raw.iter().enumerate() {
        let props = f.get("properties").and_then(Value::as_object);
        let id = props
            .and_then(|p| p.get(&opts.id_property))
            .and_then(Value::as_str);
        let id = match id {
            None => {
                problems.push((index, FeatureProblem::MissingId));
                continue;
            }
            Some(id) if !is_iso3(id) => {
                problems.push((index, FeatureProblem::BadId(id.to_owned())));
                continue;
            }
            Some(id) => id.to_owned(),
        };
        if !seen.insert(id.clone()) {
            problems.push((index, FeatureProblem::DuplicateId(id)));
            continue;
        }
        let name = props
            .and_then(|p| p.get(&opts.name_property))
            .and_then(Value::as_str)
            .unwrap_or(&id)
            .to_owned();
        let geometry = match f.get("geometry") {
            Some(g) if !g.is_null() => parse_geometry(g, &mut clamped),
            _ => Err(FeatureProblem::NonPolygonal("null".into())),
        };
        match geometry {
            Ok(geometry) => features.push(Feature { id, name, geometry }),
            Err(p) => problems.push((index, p)),
        }
    }

    if !problems.is_empty() {
        let reason = problems
            .iter()
            .map(|(i, p)| format!("feature {i}: {}", p.describe()))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(Error::InvalidFeatures {
            indices: problems.into_iter().map(|(i, _)| i).collect(),
            reason,
        });
    }
    if clamped > 0 {
        log::warn!("clamped {clamped} latitude(s) to the Web Mercator band");
    }
    Ok(FeatureSet { features })
}

fn polygon_json(p: &Polygon) -> Value {
    Value::from(
        p.rings
            .iter()
            .map(|r| Value::from(r.iter().map(|q| Value::from(q.to_vec())).collect::<Vec<_>>()))
            .collect::<Vec<_>>(),
    )
}

/// Serialize the feature set back to a GeoJSON FeatureCollection.
///
/// `extra` adds per-feature properties (keyed by feature id).
pub fn feature_set_to_value(
    fs: &FeatureSet,
    opts: &GeoJsonOptions,
    extra: Option<&BTreeMap<String, Map<String, Value>>>,
) -> Value {
    let features = fs
        .features
        .iter()
        .map(|f| {
            let mut props = Map::new();
            props.insert(opts.id_property.clone(), Value::from(f.id.clone()));
            props.insert(opts.name_property.clone(), Value::from(f.name.clone()));
            if let Some(more) = extra.and_then(|e| e.get(&f.id)) {
                props.extend(more.clone());
            }
            let geometry = match &f.geometry {
                Geometry::Polygon(p) => {
                    serde_json::json!({"type": "Polygon", "coordinates": polygon_json(p)})
                }
                Geometry::MultiPolygon(ps) => serde_json::json!({
                    "type": "MultiPolygon",
                    "coordinates": ps.iter().map(polygon_json).collect::<Vec<_>>(),
                }),
            };
            serde_json::json!({"type": "Feature", "properties": props, "geometry": geometry})
        })
        .collect::<Vec<_>>();
    serde_json::json!({"type": "FeatureCollection", "features": features})
}

pub fn serialize_geojson(fs: &FeatureSet, opts: &GeoJsonOptions) -> String {
    feature_set_to_value(fs, opts, None).to_string()
}

/// One SDG indicator: per-country year → value table.
///
/// `None` marks an explicit null; a year absent from a country's map is
/// equally missing. Neither is ever treated as zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicatorSeries {
    pub id: String,
    pub goal: u8,
    pub indicator: String,
    pub unit: String,
    pub values: BTreeMap<String, BTreeMap<i32, Option<f64>>>,
}

impl IndicatorSeries {
    pub fn value(&self, country: &str, year: i32) -> Option<f64> {
        self.values.get(country)?.get(&year).copied().flatten()
    }

    /// Union of year keys across every country, ascending.
    pub fn years(&self) -> Vec<i32> {
        let set: BTreeSet<i32> = self.values.values().flat_map(|m| m.keys().copied()).collect();
        set.into_iter().collect()
    }

    pub fn year_span(&self) -> (i32, i32) {
        let years = self.years();
        (years[0], years[years.len() - 1])
    }

    pub fn countries(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("series serializes")
    }
}

fn parse_year(key: &str) -> Option<i32> {
    if key.len() == 4 && key.bytes().all(|b| b.is_ascii_digit()) {
        key.parse().ok()
    } else {
        None
    }
}

/// Parse an indicator document:
/// `{"id", "goal", "indicator", "unit", "values": {ISO3: {"YYYY": number|null}}}`.
pub fn parse_indicator(bytes: &[u8]) -> Result<IndicatorSeries> {
    let doc = parse_json(bytes)?;
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::validation("indicator document is not an object"))?;
    let text = |key: &str| -> Result<String> {
        obj.get(key)
            .and_then(Value::as_str)
            .map(str::to_owned)
            .ok_or_else(|| Error::validation(format!("missing string field '{key}'")))
    };
    let id = text("id")?;
    if id.is_empty() {
        return Err(Error::validation("empty dataset id"));
    }
    let indicator = text("indicator")?;
    let unit = text("unit")?;
    let goal = obj
        .get("goal")
        .and_then(Value::as_i64)
        .ok_or_else(|| Error::validation("missing integer field 'goal'"))?;
    if !(1..=17).contains(&goal) {
        return Err(Error::validation(format!("goal {goal} outside 1-17")));
    }
    let raw = obj
        .get("values")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::validation("missing object field 'values'"))?;
    if raw.is_empty() {
        return Err(Error::validation("empty values"));
    }

    let mut values = BTreeMap::new();
    for (country, per_year) in raw {
        let per_year = per_year
            .as_object()
            .ok_or_else(|| Error::validation(format!("values for {country} are not an object")))?;
        let mut table = BTreeMap::new();
        for (key, v) in per_year {
            let year = parse_year(key)
                .ok_or_else(|| Error::validation(format!("{country}: year key '{key}' is not 4 digits")))?;
            let value = match v {
                Value::Null => None,
                Value::Number(n) => match n.as_f64() {
                    Some(x) if x.is_finite() => Some(x),
                    _ => {
                        return Err(Error::NonNumeric { country: country.clone(), year: key.clone() })
                    }
                },
                _ => return Err(Error::NonNumeric { country: country.clone(), year: key.clone() }),
            };
            table.insert(year, value);
        }
        values.insert(country.clone(), table);
    }
    if values.values().all(BTreeMap::is_empty) {
        return Err(Error::validation("no years present in values"));
    }
    Ok(IndicatorSeries { id, goal: goal as u8, indicator, unit, values })
}

/// Id agreement between geometry and one series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct JoinReport {
    pub matched: usize,
    pub geometry_only: Vec<String>,
    pub data_only: Vec<String>,
    pub year_span: (i32, i32),
}

pub fn join(fs: &FeatureSet, s: &IndicatorSeries) -> JoinReport {
    let geometry_ids: BTreeSet<&str> = fs.ids().collect();
    let data_ids: BTreeSet<&str> = s.countries().collect();
    JoinReport {
        matched: geometry_ids.intersection(&data_ids).count(),
        geometry_only: geometry_ids.difference(&data_ids).map(|s| s.to_string()).collect(),
        data_only: data_ids.difference(&geometry_ids).map(|s| s.to_string()).collect(),
        year_span: s.year_span(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_doc(ring: &str) -> String {
        format!(
            r#"{{"type":"FeatureCollection","features":[{{"type":"Feature",
            "properties":{{"ISO3":"DEU","NAME":"Germany"}},
            "geometry":{{"type":"Polygon","coordinates":[{ring}]}}}}]}}"#
        )
    }

    const CCW: &str = "[[0,0],[1,0],[1,1],[0,1],[0,0]]";
    const CW: &str = "[[0,0],[0,1],[1,1],[1,0],[0,0]]";

    #[test]
    fn minimal_square() {
        let fs = parse_geojson(square_doc(CCW).as_bytes(), &GeoJsonOptions::default()).unwrap();
        assert_eq!(fs.len(), 1);
        let f = &fs.features[0];
        assert_eq!(f.id, "DEU");
        assert_eq!(f.name, "Germany");
        assert_eq!(f.geometry.parts().len(), 1);
        assert_eq!(f.geometry.parts()[0].rings.len(), 1);
        assert_eq!(f.geometry.parts()[0].exterior().len(), 5);
    }

    #[test]
    fn clockwise_input_is_rewound() {
        let a = parse_geojson(square_doc(CCW).as_bytes(), &GeoJsonOptions::default()).unwrap();
        let b = parse_geojson(square_doc(CW).as_bytes(), &GeoJsonOptions::default()).unwrap();
        assert!(ring_signed_area(b.features[0].geometry.parts()[0].exterior()) > 0.0);
        assert_eq!(
            ring_signed_area(a.features[0].geometry.parts()[0].exterior()),
            ring_signed_area(b.features[0].geometry.parts()[0].exterior())
        );
        let again = parse_geojson(serialize_geojson(&b, &GeoJsonOptions::default()).as_bytes(), &GeoJsonOptions::default()).unwrap();
        assert_eq!(again, b);
    }

    #[test]
    fn unclosed_ring_is_closed_and_hole_is_clockwise() {
        let doc = square_doc("[[0,0],[4,0],[4,4],[0,4]],[[1,1],[3,1],[3,3],[1,3]]");
        let fs = parse_geojson(doc.as_bytes(), &GeoJsonOptions::default()).unwrap();
        let poly = &fs.features[0].geometry.parts()[0];
        assert_eq!(poly.exterior().len(), 5);
        assert_eq!(poly.exterior()[0], poly.exterior()[4]);
        assert!(ring_signed_area(&poly.holes()[0]) < 0.0);
    }

    #[test]
    fn linestring_names_feature_zero() {
        let doc = r#"{"type":"FeatureCollection","features":[{"type":"Feature",
            "properties":{"ISO3":"DEU"},"geometry":{"type":"LineString","coordinates":[[0,0],[1,1]]}}]}"#;
        match parse_geojson(doc.as_bytes(), &GeoJsonOptions::default()) {
            Err(Error::InvalidFeatures { indices, reason }) => {
                assert_eq!(indices, vec![0]);
                assert!(reason.contains("LineString"), "{reason}");
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn missing_ids_are_all_listed() {
        let doc = r#"{"type":"FeatureCollection","features":[
            {"type":"Feature","properties":{"NAME":"a"},"geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,0]]]}},
            {"type":"Feature","properties":{"ISO3":"FRA"},"geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,0]]]}},
            {"type":"Feature","properties":{},"geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,0]]]}}]}"#;
        match parse_geojson(doc.as_bytes(), &GeoJsonOptions::default()) {
            Err(Error::InvalidFeatures { indices, .. }) => assert_eq!(indices, vec![0, 2]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn configurable_property_names() {
        let doc = r#"{"type":"FeatureCollection","features":[{"type":"Feature",
            "properties":{"iso_a3":"FIN","admin":"Finland"},
            "geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,0]]]}}]}"#;
        let opts = GeoJsonOptions { id_property: "iso_a3".into(), name_property: "admin".into() };
        let fs = parse_geojson(doc.as_bytes(), &opts).unwrap();
        assert_eq!(fs.features[0].name, "Finland");
    }

    #[test]
    fn malformed_document_reports_offset() {
        let doc = b"{\"type\": \"FeatureCollection\",\n \"features\": [}";
        match parse_geojson(doc, &GeoJsonOptions::default()) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, doc.len() - 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn polar_latitudes_are_clamped() {
        let doc = square_doc("[[0,80],[10,80],[10,89.9],[0,89.9],[0,80]]");
        let fs = parse_geojson(doc.as_bytes(), &GeoJsonOptions::default()).unwrap();
        let (_, _, _, lat_max) = fs.bounds().unwrap();
        assert_eq!(lat_max, MERCATOR_MAX_LAT);
    }

    #[test]
    fn zero_area_and_bad_longitude_rejected() {
        let flat = square_doc("[[0,0],[1,0],[2,0],[0,0]]");
        assert!(parse_geojson(flat.as_bytes(), &GeoJsonOptions::default()).is_err());
        let wide = square_doc("[[0,0],[181,0],[1,1],[0,0]]");
        assert!(parse_geojson(wide.as_bytes(), &GeoJsonOptions::default()).is_err());
    }

    #[test]
    fn minimal_indicator() {
        let doc = r#"{"id":"sdg3_life","goal":3,"unit":"years","indicator":"Life expectancy","values":{"DEU":{"2004":78.9}}}"#;
        let s = parse_indicator(doc.as_bytes()).unwrap();
        assert_eq!(s.values.len(), 1);
        assert_eq!(s.year_span(), (2004, 2004));
        assert_eq!(s.value("DEU", 2004), Some(78.9));
    }

    #[test]
    fn null_is_missing_not_zero() {
        let doc = r#"{"id":"x","goal":3,"unit":"u","indicator":"i","values":{"DEU":{"2004":0},"FIN":{"2004":null}}}"#;
        let s = parse_indicator(doc.as_bytes()).unwrap();
        assert_eq!(s.value("FIN", 2004), None);
        assert_eq!(s.value("DEU", 2004), Some(0.0));
        assert_eq!(s.value("SWE", 2004), None);
        let again = parse_indicator(s.to_json().as_bytes()).unwrap();
        assert_eq!(again, s);
        assert_eq!(again.values["FIN"].get(&2004), Some(&None));
    }

    #[test]
    fn indicator_errors() {
        let goal = r#"{"id":"x","goal":19,"unit":"u","indicator":"i","values":{"DEU":{"2004":1}}}"#;
        assert!(matches!(parse_indicator(goal.as_bytes()), Err(Error::Validation(_))));
        let empty = r#"{"id":"x","goal":3,"unit":"u","indicator":"i","values":{}}"#;
        assert!(matches!(parse_indicator(empty.as_bytes()), Err(Error::Validation(_))));
        let text = r#"{"id":"x","goal":3,"unit":"u","indicator":"i","values":{"DEU":{"2004":"78"}}}"#;
        match parse_indicator(text.as_bytes()) {
            Err(Error::NonNumeric { country, year }) => {
                assert_eq!((country.as_str(), year.as_str()), ("DEU", "2004"))
            }
            other => panic!("{other:?}"),
        }
        let year = r#"{"id":"x","goal":3,"unit":"u","indicator":"i","values":{"DEU":{"04":1}}}"#;
        assert!(parse_indicator(year.as_bytes()).is_err());
    }

    fn fs_with(ids: &[&str]) -> FeatureSet {
        let square = Polygon { rings: vec![vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]] };
        FeatureSet {
            features: ids
                .iter()
                .map(|id| Feature { id: id.to_string(), name: id.to_string(), geometry: Geometry::Polygon(square.clone()) })
                .collect(),
        }
    }

    fn series_with(ids: &[&str]) -> IndicatorSeries {
        IndicatorSeries {
            id: "s".into(),
            goal: 3,
            indicator: "i".into(),
            unit: "u".into(),
            values: ids.iter().map(|id| (id.to_string(), BTreeMap::from([(2004, Some(1.0))]))).collect(),
        }
    }

    #[test]
    fn join_reports_both_directions() {
        let r = join(&fs_with(&["DEU", "FRA"]), &series_with(&["DEU"]));
        assert_eq!((r.matched, r.geometry_only, r.data_only), (1, vec!["FRA".to_string()], vec![]));

        let r = join(&fs_with(&["DEU", "FRA"]), &series_with(&["FRA", "DEU"]));
        assert!(r.geometry_only.is_empty() && r.data_only.is_empty());

        let r = join(&fs_with(&["DEU", "FRA"]), &series_with(&["FIN", "SWE", "NOR"]));
        assert_eq!((r.matched, r.geometry_only.len(), r.data_only.len()), (0, 2, 3));
    }
}

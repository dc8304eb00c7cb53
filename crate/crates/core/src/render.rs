//! Deterministic SVG documents for the four map types, with legends and
//! popups.
//!
//! Element ids follow `feature-<ISO3>`, `pattern-class-<i>` and
//! `marker-<ISO3>`. Features are written in id order. Nothing
//! time-dependent goes into the document body.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::classify::{ClassAssignment, Classification};
use crate::colorlab::{class_palette, Palette, Rgb};
use crate::error::{Error, Result};
use crate::geom::{Point, Viewport};
use crate::ingest::Feature;
use crate::symbolize::{
    class_styles, fmt_num, legend_spec, pattern_id, ClassStyle, LegendSpec, MapType, PatternDefs,
};
use crate::workspace::Workspace;

pub const BORDER_HEX: &str = "999999";
pub const BORDER_WIDTH: f64 = 0.5;
/// Body fill of polygons under graduated symbols and mobile markers.
pub const NEUTRAL_HEX: &str = "e0e0e0";

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    pub legend: bool,
    pub popup_for: Option<String>,
    pub classes: usize,
    /// Fraction digits of legend labels.
    pub label_decimals: usize,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self { legend: false, popup_for: None, classes: crate::classify::DEFAULT_CLASSES, label_decimals: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderRequest {
    pub dataset: String,
    pub year: i32,
    pub map_type: MapType,
    pub viewport: Viewport,
    pub options: RenderOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SvgMeta {
    pub feature_count: usize,
    pub pattern_count: usize,
    pub render_millis: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvgDocument {
    pub bytes: String,
    pub meta: SvgMeta,
}

pub(crate) fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn path_data(feature: &Feature, vp: &Viewport) -> String {
    let mut d = String::new();
    for part in feature.geometry.parts() {
        for ring in vp.project_polygon(part) {
            // Last position repeats the first; Z closes the ring.
            for (i, p) in ring[..ring.len() - 1].iter().enumerate() {
                d.push(if i == 0 { 'M' } else { 'L' });
                d.push_str(&fmt_num(p[0]));
                d.push(' ');
                d.push_str(&fmt_num(p[1]));
            }
            d.push('Z');
        }
    }
    d
}

/// Resolved pieces shared by the map, legend and popup renderers.
struct Prepared<'a> {
    classification: Classification,
    palette: Palette,
    styles: Vec<ClassStyle>,
    title: String,
    unit: &'a str,
}

fn prepare<'a>(ws: &'a Workspace, req: &RenderRequest) -> Result<Prepared<'a>> {
    let series = ws.dataset(&req.dataset)?;
    let classification = ws.classify(&req.dataset, req.year, req.options.classes)?;
    let palette = class_palette(classification.effective_k())?;
    let styles = class_styles(&palette, ws.style())?;
    let title = if series.unit.is_empty() {
        format!("{} ({})", series.indicator, req.year)
    } else {
        format!("{} [{}] ({})", series.indicator, series.unit, req.year)
    };
    Ok(Prepared { classification, palette, styles, title, unit: &series.unit })
}

fn legend_for(prep: &Prepared<'_>, map_type: MapType, decimals: usize) -> Result<LegendSpec> {
    legend_spec(&prep.classification, &prep.styles, &prep.palette, map_type, &prep.title, decimals)
}

/// Render one map document.
pub fn render_map(ws: &Workspace, req: &RenderRequest) -> Result<SvgDocument> {
    let started = Instant::now();
    let prep = prepare(ws, req)?;
    let vp = &req.viewport;
    let map_type = req.map_type;

    let mut defs = PatternDefs::default();
    if map_type.uses_patterns() {
        for s in &prep.styles {
            defs.add(s, &pattern_id(s.class_index))?;
        }
    }
    let anchors = match map_type {
        MapType::Gsm | MapType::ChorientedMobile => Some(ws.anchors(vp)?),
        _ if req.options.popup_for.is_some() => Some(ws.anchors(vp)?),
        _ => None,
    };

    let mut features: Vec<&Feature> = ws.features().features.iter().collect();
    features.sort_by(|a, b| a.id.cmp(&b.id));

    let (w, h) = (vp.width_px, vp.height_px);
    let mut svg = String::with_capacity(64 * 1024);
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(svg, "<title>{}</title>", escape_xml(&prep.title));
    if !defs.is_empty() {
        svg.push_str("<defs>\n");
        for d in defs.iter() {
            svg.push_str(d);
            svg.push('\n');
        }
        svg.push_str("</defs>\n");
    }
    let _ = writeln!(
        svg,
        r##"<g id="features" stroke="#{BORDER_HEX}" stroke-width="{}" stroke-linejoin="round">"##,
        fmt_num(BORDER_WIDTH)
    );
    let mut symbols = String::new();
    for f in &features {
        let class = prep.classification.class_of(&f.id).unwrap_or(ClassAssignment::Missing);
        let fill = match (class, map_type) {
            (ClassAssignment::Missing, _) => format!("#{}", prep.palette.missing_hex),
            (ClassAssignment::Class(i), MapType::Choropleth) => format!("#{}", prep.palette.color(i)),
            (ClassAssignment::Class(i), MapType::Choriented) => format!("url(#{})", pattern_id(i)),
            (ClassAssignment::Class(_), _) => format!("#{NEUTRAL_HEX}"),
        };
        let _ = writeln!(
            svg,
            r#"<path id="feature-{}" fill="{fill}" fill-rule="evenodd" d="{}"/>"#,
            f.id,
            path_data(f, vp)
        );
        if let (ClassAssignment::Class(i), Some(anchors)) = (class, anchors.as_ref()) {
            let [x, y] = anchors[&f.id].position;
            let style = &prep.styles[i];
            match map_type {
                MapType::Gsm => {
                    let _ = writeln!(
                        symbols,
                        r##"<circle id="marker-{}" cx="{}" cy="{}" r="{}" fill="#{}" fill-opacity="0.85" stroke="#000000" stroke-width="0.75"/>"##,
                        f.id,
                        fmt_num(x),
                        fmt_num(y),
                        fmt_num(style.radius_px),
                        prep.palette.color(prep.palette.k - 1),
                    );
                }
                MapType::ChorientedMobile => {
                    let side = style.marker_px;
                    let _ = writeln!(
                        symbols,
                        r#"<rect id="marker-{}" x="{}" y="{}" width="{s}" height="{s}" fill="url(#{})"/>"#,
                        f.id,
                        fmt_num(x - side / 2.0),
                        fmt_num(y - side / 2.0),
                        pattern_id(i),
                        s = fmt_num(side),
                    );
                }
                _ => {}
            }
        }
    }
    svg.push_str("</g>\n");
    if !symbols.is_empty() {
        svg.push_str("<g id=\"symbols\">\n");
        svg.push_str(&symbols);
        svg.push_str("</g>\n");
    }
    if req.options.legend {
        let spec = legend_for(&prep, map_type, req.options.label_decimals)?;
        svg.push_str(&render_legend_at(&spec, [10.0, 10.0]));
    }
    if let Some(id) = &req.options.popup_for {
        let anchors = anchors.as_ref().expect("anchors computed for popups");
        svg.push_str(&popup_fragment(ws, &prep, anchors, id)?);
    }
    svg.push_str("</svg>\n");

    Ok(SvgDocument {
        bytes: svg,
        meta: SvgMeta {
            feature_count: features.len(),
            pattern_count: defs.len(),
            render_millis: started.elapsed().as_secs_f64() * 1e3,
        },
    })
}

const ROW_GAP: f64 = 6.0;
const SWATCH_W: f64 = 24.0;

fn row_height(spec: &LegendSpec) -> f64 {
    match spec.map_type {
        MapType::Gsm => spec
            .rows
            .iter()
            .map(|r| 2.0 * r.style.radius_px)
            .fold(18.0, f64::max),
        MapType::ChorientedMobile => 24.0,
        _ => 18.0,
    }
}

/// Legend as an SVG group at the origin.
pub fn render_legend(spec: &LegendSpec) -> String {
    render_legend_at(spec, [0.0, 0.0])
}

fn render_legend_at(spec: &LegendSpec, [ox, oy]: Point) -> String {
    let rh = row_height(spec);
    let swatch_w = match spec.map_type {
        MapType::Gsm => rh,
        _ => SWATCH_W,
    };
    let mut out = String::new();
    let _ = writeln!(out, r#"<g id="legend" transform="translate({},{})" font-family="sans-serif" font-size="12">"#, fmt_num(ox), fmt_num(oy));
    let mut y = 0.0;
    if !spec.title.is_empty() {
        let _ = writeln!(out, r#"<text class="legend-title" x="0" y="12" font-weight="bold">{}</text>"#, escape_xml(&spec.title));
        y += 12.0 + ROW_GAP;
    }
    let text_x = fmt_num(swatch_w + 8.0);
    for (i, row) in spec.rows.iter().enumerate() {
        let cy = y + rh / 2.0;
        let swatch = match spec.map_type {
            MapType::Choropleth => format!(
                r##"<rect x="0" y="{}" width="{}" height="{}" fill="#{}" stroke="#{BORDER_HEX}"/>"##,
                fmt_num(y),
                fmt_num(SWATCH_W),
                fmt_num(rh),
                row.style.fill_hex
            ),
            MapType::Gsm => format!(
                r##"<circle cx="{}" cy="{}" r="{}" fill="#{}" stroke="#000000" stroke-width="0.75"/>"##,
                fmt_num(swatch_w / 2.0),
                fmt_num(cy),
                fmt_num(row.style.radius_px),
                spec.rows[spec.rows.len() - 1].style.fill_hex
            ),
            MapType::Choriented | MapType::ChorientedMobile => format!(
                r##"<rect x="0" y="{}" width="{}" height="{}" fill="url(#{})" stroke="#{BORDER_HEX}"/>"##,
                fmt_num(y),
                fmt_num(if spec.map_type == MapType::ChorientedMobile { rh } else { SWATCH_W }),
                fmt_num(rh),
                spec.pattern_id(i).expect("pattern map type"),
            ),
        };
        let _ = writeln!(
            out,
            r#"<g class="legend-row">{swatch}<text x="{text_x}" y="{}" dominant-baseline="middle">{}</text></g>"#,
            fmt_num(cy),
            escape_xml(&row.label)
        );
        y += rh + ROW_GAP;
    }
    let _ = writeln!(
        out,
        r##"<g class="legend-row"><rect x="0" y="{}" width="{}" height="{}" fill="#{}" stroke="#{BORDER_HEX}"/><text x="{text_x}" y="{}" dominant-baseline="middle">{}</text></g>"##,
        fmt_num(y),
        fmt_num(SWATCH_W.min(swatch_w.max(SWATCH_W))),
        fmt_num(rh.min(18.0)),
        spec.missing_row.hex,
        fmt_num(y + rh.min(18.0) / 2.0),
        escape_xml(&spec.missing_row.label)
    );
    out.push_str("</g>\n");
    out
}

fn class_label(i: usize) -> String {
    format!("class {}", i + 1)
}

fn popup_fragment(
    ws: &Workspace,
    prep: &Prepared<'_>,
    anchors: &crate::workspace::AnchorMap,
    country: &str,
) -> Result<String> {
    let feature = ws
        .features()
        .get(country)
        .ok_or_else(|| Error::NotFound { kind: "country", id: country.to_owned() })?;
    let anchor = anchors[&feature.id];
    let series = ws.dataset(&prep.classification.dataset_id)?;
    let detail = match (
        series.value(country, prep.classification.year),
        prep.classification.class_of(country),
    ) {
        (Some(v), Some(ClassAssignment::Class(i))) => {
            let unit = if prep.unit.is_empty() { String::new() } else { format!(" {}", prep.unit) };
            format!("{}{unit} ({})", fmt_num(v), class_label(i))
        }
        _ => "no data".to_owned(),
    };
    let name = escape_xml(&feature.name);
    let detail = escape_xml(&detail);
    let chars = feature.name.chars().count().max(detail.chars().count()) as f64;
    let width = (chars * 7.0 + 16.0).max(60.0);
    let height = 40.0;
    let [x, y] = anchor.position;
    Ok(format!(
        concat!(
            r##"<g id="popup-{id}" class="popup" transform="translate({x},{y})" font-family="sans-serif">"##,
            r##"<rect x="{rx}" y="{ry}" width="{w}" height="{h}" rx="4" ry="4" fill="#ffffff" stroke="#333333" stroke-width="0.75"/>"##,
            r##"<text x="0" y="{t1}" text-anchor="middle" font-size="12" font-weight="bold">{name}</text>"##,
            r##"<text x="0" y="{t2}" text-anchor="middle" font-size="11">{detail}</text>"##,
            "</g>\n"
        ),
        id = feature.id,
        x = fmt_num(x),
        y = fmt_num(y),
        rx = fmt_num(-width / 2.0),
        ry = fmt_num(-height - 6.0),
        w = fmt_num(width),
        h = fmt_num(height),
        t1 = fmt_num(-height + 10.0),
        t2 = fmt_num(-12.0),
        name = name,
        detail = detail,
    ))
}

/// Popup for `country` anchored at its pole of inaccessibility.
pub fn render_popup(ws: &Workspace, req: &RenderRequest, country: &str) -> Result<String> {
    if ws.features().get(country).is_none() {
        return Err(Error::NotFound { kind: "country", id: country.to_owned() });
    }
    let prep = prepare(ws, req)?;
    let anchors = ws.anchors(&req.viewport)?;
    popup_fragment(ws, &prep, &anchors, country)
}

/// Legend spec for a request.
pub fn request_legend(ws: &Workspace, req: &RenderRequest) -> Result<LegendSpec> {
    Ok(class_view(ws, req)?.legend)
}

/// Everything a client needs to draw a request's classes itself.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassView {
    pub classification: Classification,
    pub palette: Palette,
    pub styles: Vec<ClassStyle>,
    pub legend: LegendSpec,
}

pub fn class_view(ws: &Workspace, req: &RenderRequest) -> Result<ClassView> {
    let prep = prepare(ws, req)?;
    let legend = legend_for(&prep, req.map_type, req.options.label_decimals)?;
    Ok(ClassView { classification: prep.classification, palette: prep.palette, styles: prep.styles, legend })
}

/// Fill colour a feature receives in a choropleth of `c`.
pub fn choropleth_fill(c: &Classification, palette: &Palette, country: &str) -> Rgb {
    match c.class_of(country) {
        Some(ClassAssignment::Class(i)) => palette.color(i),
        _ => palette.missing_hex,
    }
}

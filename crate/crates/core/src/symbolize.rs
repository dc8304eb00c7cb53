//! Per-class symbol recipes: stripe orientation, stripe patterns as CSS,
//! SVG and raster tiles, graduated-symbol radii, and legend specifications.

use std::collections::HashSet;
use std::f64::consts::SQRT_2;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classify::Classification;
use crate::colorlab::{Palette, Rgb};
use crate::error::{Error, Result};

/// The four visualization types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapType {
    Choropleth,
    Gsm,
    Choriented,
    ChorientedMobile,
}

impl MapType {
    pub const ALL: [MapType; 4] = [
        MapType::Choropleth,
        MapType::Gsm,
        MapType::Choriented,
        MapType::ChorientedMobile,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MapType::Choropleth => "choropleth",
            MapType::Gsm => "gsm",
            MapType::Choriented => "choriented",
            MapType::ChorientedMobile => "choriented-mobile",
        }
    }

    pub fn uses_patterns(self) -> bool {
        matches!(self, MapType::Choriented | MapType::ChorientedMobile)
    }
}

impl fmt::Display for MapType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MapType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MapType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown map type '{s}'")))
    }
}

/// How class indices map to stripe angles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum AngleScheme {
    /// `i * 180 / k`: maximally separated, class 0 horizontal.
    #[default]
    Spread180,
    /// `i * 90 / (k - 1)`: horizontal for the lowest class, vertical for the highest.
    HorizontalToVertical,
}

impl FromStr for AngleScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spread180" => Ok(AngleScheme::Spread180),
            "horizontalToVertical" | "horizontal-to-vertical" => Ok(AngleScheme::HorizontalToVertical),
            _ => Err(Error::invalid(format!("unknown angle scheme '{s}'"))),
        }
    }
}

pub fn orientation_angles(k: usize, scheme: AngleScheme) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::invalid("class count must be at least 1"));
    }
    Ok(match scheme {
        AngleScheme::Spread180 => (0..k).map(|i| i as f64 * 180.0 / k as f64).collect(),
        AngleScheme::HorizontalToVertical if k == 1 => vec![0.0],
        AngleScheme::HorizontalToVertical => {
            (0..k).map(|i| i as f64 * 90.0 / (k - 1) as f64).collect()
        }
    })
}

pub const DEFAULT_R_MIN: f64 = 6.0;
pub const DEFAULT_R_MAX: f64 = 24.0;

/// Linear radii from `r_min` (class 0) to `r_max` (top class).
pub fn gsm_radii(k: usize, r_min: f64, r_max: f64) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::invalid("class count must be at least 1"));
    }
    if !(r_min > 0.0) || r_min > r_max {
        return Err(Error::invalid(format!("need 0 < rMin <= rMax, got {r_min}..{r_max}")));
    }
    if k == 1 {
        return Ok(vec![r_min]);
    }
    Ok((0..k)
        .map(|i| r_min + i as f64 * (r_max - r_min) / (k - 1) as f64)
        .collect())
}

/// Knobs for building [`ClassStyle`]s.
#[derive(Debug, Clone, PartialEq)]
pub struct StyleOptions {
    pub scheme: AngleScheme,
    pub stripe_on_px: f64,
    pub stripe_off_px: f64,
    pub line: Rgb,
    pub r_min: f64,
    pub r_max: f64,
    pub marker_px: f64,
}

impl Default for StyleOptions {
    fn default() -> Self {
        Self {
            scheme: AngleScheme::Spread180,
            stripe_on_px: 20.0,
            stripe_off_px: 20.0,
            line: Rgb::BLACK,
            r_min: DEFAULT_R_MIN,
            r_max: DEFAULT_R_MAX,
            marker_px: 30.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassStyle {
    pub class_index: usize,
    pub fill_hex: Rgb,
    pub angle_deg: f64,
    pub stripe_on_px: f64,
    pub stripe_off_px: f64,
    pub line_hex: Rgb,
    pub radius_px: f64,
    pub marker_px: f64,
}

impl ClassStyle {
    /// A single stripe style outside any classification.
    pub fn stripes(fill: Rgb, angle_deg: f64, on: f64, off: f64) -> Self {
        Self {
            class_index: 0,
            fill_hex: fill,
            angle_deg,
            stripe_on_px: on,
            stripe_off_px: off,
            line_hex: Rgb::BLACK,
            radius_px: DEFAULT_R_MIN,
            marker_px: 30.0,
        }
    }

    pub fn period(&self) -> f64 {
        self.stripe_on_px + self.stripe_off_px
    }

    fn check(&self) -> Result<()> {
        if !(self.stripe_on_px > 0.0 && self.stripe_off_px > 0.0) {
            return Err(Error::invalid("stripe band widths must be positive"));
        }
        Ok(())
    }
}

/// One style per palette entry.
pub fn class_styles(palette: &Palette, opts: &StyleOptions) -> Result<Vec<ClassStyle>> {
    let k = palette.entries.len();
    let angles = orientation_angles(k, opts.scheme)?;
    let radii = gsm_radii(k, opts.r_min, opts.r_max)?;
    let styles: Vec<ClassStyle> = (0..k)
        .map(|i| ClassStyle {
            class_index: i,
            fill_hex: palette.color(i),
            angle_deg: angles[i],
            stripe_on_px: opts.stripe_on_px,
            stripe_off_px: opts.stripe_off_px,
            line_hex: opts.line,
            radius_px: radii[i],
            marker_px: opts.marker_px,
        })
        .collect();
    for s in &styles {
        s.check()?;
    }
    Ok(styles)
}

/// Shortest decimal form with at most two fraction digits.
pub fn fmt_num(x: f64) -> String {
    let mut s = format!("{:.2}", x);
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn css_color(c: Rgb) -> String {
    if c == Rgb::BLACK {
        "black".to_owned()
    } else {
        format!("#{c}")
    }
}

fn gradient_stops(style: &ClassStyle) -> [String; 5] {
    let fill = format!("#{}", style.fill_hex);
    let line = css_color(style.line_hex);
    let on = fmt_num(style.stripe_on_px);
    [
        format!("{}deg", fmt_num(style.angle_deg)),
        fill.clone(),
        format!("{fill} {on}px"),
        format!("{line} {on}px"),
        format!("{line} {}px", fmt_num(style.period())),
    ]
}

/// `repeating-linear-gradient(...)` value for the stripes of `style`.
pub fn css_gradient(style: &ClassStyle) -> String {
    format!("repeating-linear-gradient({})", gradient_stops(style).join(", "))
}

/// CSS declarations for a striped square marker.
pub fn css_stripes(style: &ClassStyle) -> String {
    let side = fmt_num(style.marker_px);
    format!("width: {side}px; height: {side}px; background: {};", css_gradient(style))
}

/// A full CSS rule laid out one declaration and one gradient argument per line.
pub fn css_rule(selector: &str, style: &ClassStyle) -> String {
    let side = fmt_num(style.marker_px);
    let mut out = String::new();
    let _ = writeln!(out, "{selector} {{");
    let _ = writeln!(out, "    width: {side}px;");
    let _ = writeln!(out, "    height: {side}px;");
    let _ = writeln!(out, "    background: repeating-linear-gradient(");
    let stops = gradient_stops(style);
    for (i, s) in stops.iter().enumerate() {
        let sep = if i + 1 < stops.len() { "," } else { "" };
        let _ = writeln!(out, "        {s}{sep}");
    }
    let _ = writeln!(out, "    );");
    out.push_str("}\n");
    out
}

/// Stylesheet with one `.pattern-class-<i>` rule per style.
pub fn css_stylesheet(styles: &[ClassStyle]) -> String {
    styles
        .iter()
        .map(|s| css_rule(&format!(".pattern-class-{}", s.class_index), s))
        .collect::<Vec<_>>()
        .join("\n")
}

/// SVG `<pattern>` of one stripe period: a fill rect and one line band,
/// rotated by the style angle.
pub fn svg_stripe_pattern(style: &ClassStyle, pattern_id: &str) -> String {
    let p = fmt_num(style.period());
    let transform = if style.angle_deg == 0.0 {
        String::new()
    } else {
        format!(r#" patternTransform="rotate({})""#, fmt_num(style.angle_deg))
    };
    format!(
        r##"<pattern id="{pattern_id}" patternUnits="userSpaceOnUse" width="{p}" height="{p}"{transform}><rect width="{p}" height="{p}" fill="#{fill}"/><rect y="{on}" width="{p}" height="{off}" fill="#{line}"/></pattern>"##,
        fill = style.fill_hex,
        line = style.line_hex,
        on = fmt_num(style.stripe_on_px),
        off = fmt_num(style.stripe_off_px),
    )
}

/// Collects pattern definitions for one document, rejecting duplicate ids.
#[derive(Debug, Default)]
pub struct PatternDefs {
    ids: HashSet<String>,
    defs: Vec<String>,
}

impl PatternDefs {
    pub fn add(&mut self, style: &ClassStyle, id: &str) -> Result<()> {
        if !self.ids.insert(id.to_owned()) {
            return Err(Error::invalid(format!("duplicate pattern id '{id}'")));
        }
        self.defs.push(svg_stripe_pattern(style, id));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.defs.iter().map(String::as_str)
    }
}

/// Raster tiling mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RasterMode {
    /// Exact wrap; only 0, 45, 90 and 135 degrees.
    Seamless,
    /// Any angle; the tile reports its residual seam offset.
    Approximate,
}

/// RGBA8 tile, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterTile {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
    /// Worst stripe phase mismatch across a tile edge, in pixels. Zero for seamless tiles.
    pub seam_error_px: f64,
}

impl RasterTile {
    pub fn pixel(&self, x: u32, y: u32) -> [u8; 4] {
        let i = ((y * self.width + x) * 4) as usize;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2], self.pixels[i + 3]]
    }

    /// 8-bit RGBA, non-interlaced PNG.
    pub fn to_png(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, self.width, self.height);
            enc.set_color(png::ColorType::Rgba);
            enc.set_depth(png::BitDepth::Eight);
            let mut writer = enc.write_header()?;
            writer.write_image_data(&self.pixels)?;
        }
        Ok(out)
    }
}

const SUBSAMPLES: u32 = 4;

fn blend(fill: Rgb, line: Rgb, fill_coverage: f64) -> [u8; 4] {
    let mix = |a: u8, b: u8| {
        (f64::from(a) * fill_coverage + f64::from(b) * (1.0 - fill_coverage)).round() as u8
    };
    [mix(fill.0, line.0), mix(fill.1, line.1), mix(fill.2, line.2), 255]
}

/// Smallest stripe tile for `style`.
///
/// Axis-aligned angles give a 1-pixel-thick strip one period long; diagonals
/// a square of side `period * √2` rounded, with band widths rescaled by the
/// rounding so the tile wraps exactly. Edges are anti-aliased by 4×4
/// supersampling.
pub fn raster_stripe_tile(style: &ClassStyle, mode: RasterMode) -> Result<RasterTile> {
    style.check()?;
    let period = style.period();
    let on_frac = style.stripe_on_px / period;
    let angle = style.angle_deg.rem_euclid(180.0);

    // (width, height, phase of a sub-pixel sample in [0, 1) of a period)
    type Phase = Box<dyn Fn(f64, f64) -> f64>;
    let strip = period.round().max(1.0);
    let diag = (period * SQRT_2).round().max(1.0);
    let (w, h, phase, seam): (u32, u32, Phase, f64) = match angle {
        a if a == 0.0 => (1, strip as u32, Box::new(move |_, y| (y / strip).rem_euclid(1.0)), 0.0),
        a if a == 90.0 => (strip as u32, 1, Box::new(move |x, _| (x / strip).rem_euclid(1.0)), 0.0),
        a if a == 45.0 => (diag as u32, diag as u32, Box::new(move |x, y| ((x - y) / diag).rem_euclid(1.0)), 0.0),
        a if a == 135.0 => (diag as u32, diag as u32, Box::new(move |x, y| ((x + y) / diag).rem_euclid(1.0)), 0.0),
        _ if mode == RasterMode::Seamless => {
            return Err(Error::invalid(format!(
                "angle {} has no exact tile; use the approximate mode or a vector pattern",
                style.angle_deg
            )))
        }
        a => {
            let side = diag;
            let (s, c) = a.to_radians().sin_cos();
            let mismatch = |shift: f64| {
                let r = shift.rem_euclid(period);
                r.min(period - r)
            };
            let seam = mismatch(side * s).max(mismatch(side * c));
            (
                side as u32,
                side as u32,
                Box::new(move |x, y| ((x * s - y * c) / period).rem_euclid(1.0)),
                seam,
            )
        }
    };

    let mut pixels = Vec::with_capacity((w * h * 4) as usize);
    let n = f64::from(SUBSAMPLES);
    for y in 0..h {
        for x in 0..w {
            let mut hits = 0u32;
            for sy in 0..SUBSAMPLES {
                for sx in 0..SUBSAMPLES {
                    let px = f64::from(x) + (f64::from(sx) + 0.5) / n;
                    let py = f64::from(y) + (f64::from(sy) + 0.5) / n;
                    if phase(px, py) < on_frac {
                        hits += 1;
                    }
                }
            }
            let coverage = f64::from(hits) / (n * n);
            pixels.extend_from_slice(&blend(style.fill_hex, style.line_hex, coverage));
        }
    }
    Ok(RasterTile { width: w, height: h, pixels, seam_error_px: seam })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LegendRow {
    pub label: String,
    pub style: ClassStyle,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MissingRow {
    pub label: String,
    pub hex: Rgb,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LegendSpec {
    pub title: String,
    pub map_type: MapType,
    pub rows: Vec<LegendRow>,
    pub missing_row: MissingRow,
}

impl LegendSpec {
    /// Id of the pattern a row swatch references, if the map type uses patterns.
    pub fn pattern_id(&self, row: usize) -> Option<String> {
        self.map_type
            .uses_patterns()
            .then(|| pattern_id(self.rows[row].style.class_index))
    }
}

pub fn pattern_id(class_index: usize) -> String {
    format!("pattern-class-{class_index}")
}

pub fn format_range(lo: f64, hi: f64, decimals: usize) -> String {
    format!("{lo:.decimals$} – {hi:.decimals$}")
}

/// Legend rows, lowest class first, built from the classification's breaks.
pub fn legend_spec(
    c: &Classification,
    styles: &[ClassStyle],
    palette: &Palette,
    map_type: MapType,
    title: &str,
    decimals: usize,
) -> Result<LegendSpec> {
    let k = c.effective_k();
    if palette.entries.len() != k || styles.len() != k {
        return Err(Error::invalid(format!(
            "palette has {} classes but the classification has {k}",
            palette.entries.len()
        )));
    }
    let rows = c
        .breaks
        .bounds
        .iter()
        .zip(styles)
        .map(|(b, s)| LegendRow { label: format_range(b.lo, b.hi, decimals), style: s.clone() })
        .collect();
    Ok(LegendSpec {
        title: title.to_owned(),
        map_type,
        rows,
        missing_row: MissingRow { label: "no data".to_owned(), hex: palette.missing_hex },
    })
}

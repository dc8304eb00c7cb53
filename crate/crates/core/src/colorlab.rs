//! sRGB ↔ CIELAB conversion, the CIEDE2000 colour difference, and the
//! sequential yellow-orange-brown palettes used for class colours.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Hard floor for adjacent class distinguishability.
pub const MIN_ADJACENT_DELTA_E: f64 = 2.0;
/// A mean adjacent distance below this produces a warning.
pub const WARN_ADJACENT_DELTA_E: f64 = 9.0;

/// Grey used for missing data.
pub const MISSING_HEX: &str = "737373";

/// 24-bit sRGB colour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    pub const BLACK: Rgb = Rgb(0, 0, 0);

    pub fn to_hex(self) -> String {
        format!("{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }
}

impl FromStr for Rgb {
    type Err = Error;

    /// Six hex digits, with or without a leading `#`.
    fn from_str(s: &str) -> Result<Self> {
        let h = s.strip_prefix('#').unwrap_or(s);
        if h.len() != 6 || !h.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(Error::invalid(format!("'{s}' is not a 6-digit hex colour")));
        }
        let byte = |i: usize| u8::from_str_radix(&h[i..i + 2], 16).expect("checked hex");
        Ok(Rgb(byte(0), byte(2), byte(4)))
    }
}

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }
}

impl Serialize for Rgb {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lab {
    #[serde(rename = "L")]
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

impl Lab {
    pub const fn new(l: f64, a: f64, b: f64) -> Self {
        Self { l, a, b }
    }
}

// D65 reference white, CIE 1931 2° observer.
const WHITE: [f64; 3] = [0.950_47, 1.0, 1.088_83];

fn srgb_decode(c: u8) -> f64 {
    let c = f64::from(c) / 255.0;
    if c <= 0.040_45 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

fn lab_f(t: f64) -> f64 {
    const D: f64 = 6.0 / 29.0;
    if t > D * D * D {
        t.cbrt()
    } else {
        t / (3.0 * D * D) + 4.0 / 29.0
    }
}

pub fn rgb_to_lab(rgb: Rgb) -> Lab {
    let (r, g, b) = (srgb_decode(rgb.0), srgb_decode(rgb.1), srgb_decode(rgb.2));
    let x = 0.412_456_4 * r + 0.357_576_1 * g + 0.180_437_5 * b;
    let y = 0.212_672_9 * r + 0.715_152_2 * g + 0.072_175_0 * b;
    let z = 0.019_333_9 * r + 0.119_192_0 * g + 0.950_304_1 * b;
    let (fx, fy, fz) = (lab_f(x / WHITE[0]), lab_f(y / WHITE[1]), lab_f(z / WHITE[2]));
    Lab { l: 116.0 * fy - 16.0, a: 500.0 * (fx - fy), b: 200.0 * (fy - fz) }
}

/// Parse a hex colour and convert it to CIELAB (D65).
pub fn srgb_to_lab(hex: &str) -> Result<Lab> {
    Ok(rgb_to_lab(hex.parse()?))
}

fn hue_deg(b: f64, a: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        return 0.0;
    }
    let h = b.atan2(a).to_degrees();
    if h < 0.0 {
        h + 360.0
    } else {
        h
    }
}

/// CIEDE2000 colour difference with unit parametric factors.
#[allow(clippy::many_single_char_names)]
pub fn ciede2000(x: Lab, y: Lab) -> f64 {
    const POW25_7: f64 = 6_103_515_625.0;

    let c1 = x.a.hypot(x.b);
    let c2 = y.a.hypot(y.b);
    let c_bar7 = ((c1 + c2) / 2.0).powi(7);
    let g = 0.5 * (1.0 - (c_bar7 / (c_bar7 + POW25_7)).sqrt());
    let a1 = x.a * (1.0 + g);
    let a2 = y.a * (1.0 + g);
    let c1p = a1.hypot(x.b);
    let c2p = a2.hypot(y.b);
    let h1p = hue_deg(x.b, a1);
    let h2p = hue_deg(y.b, a2);

    let dl = y.l - x.l;
    let dc = c2p - c1p;
    let chroma_product = c1p * c2p;
    let dh = if chroma_product == 0.0 {
        0.0
    } else {
        let d = h2p - h1p;
        if d > 180.0 {
            d - 360.0
        } else if d < -180.0 {
            d + 360.0
        } else {
            d
        }
    };
    let dh_big = 2.0 * chroma_product.sqrt() * (dh.to_radians() / 2.0).sin();

    let l_bar = (x.l + y.l) / 2.0;
    let c_bar_p = (c1p + c2p) / 2.0;
    let h_bar = if chroma_product == 0.0 {
        h1p + h2p
    } else if (h1p - h2p).abs() <= 180.0 {
        (h1p + h2p) / 2.0
    } else if h1p + h2p < 360.0 {
        (h1p + h2p + 360.0) / 2.0
    } else {
        (h1p + h2p - 360.0) / 2.0
    };

    let t = 1.0 - 0.17 * (h_bar - 30.0).to_radians().cos()
        + 0.24 * (2.0 * h_bar).to_radians().cos()
        + 0.32 * (3.0 * h_bar + 6.0).to_radians().cos()
        - 0.20 * (4.0 * h_bar - 63.0).to_radians().cos();
    let l50 = (l_bar - 50.0).powi(2);
    let sl = 1.0 + 0.015 * l50 / (20.0 + l50).sqrt();
    let sc = 1.0 + 0.045 * c_bar_p;
    let sh = 1.0 + 0.015 * c_bar_p * t;
    let d_theta = 30.0 * (-((h_bar - 275.0) / 25.0).powi(2)).exp();
    let cp7 = c_bar_p.powi(7);
    let rc = 2.0 * (cp7 / (cp7 + POW25_7)).sqrt();
    let rt = -(2.0 * d_theta).to_radians().sin() * rc;

    let tl = dl / sl;
    let tc = dc / sc;
    let th = dh_big / sh;
    (tl * tl + tc * tc + th * th + rt * tc * th).max(0.0).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaletteEntry {
    pub hex: Rgb,
    pub lab: Lab,
}

impl PaletteEntry {
    pub fn new(hex: Rgb) -> Self {
        Self { hex, lab: rgb_to_lab(hex) }
    }
}

/// Ordered class colours, lightest (lowest class) first.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Palette {
    pub k: usize,
    pub entries: Vec<PaletteEntry>,
    pub missing_hex: Rgb,
}

impl Palette {
    pub fn from_hex(hexes: &[&str], missing: &str) -> Result<Self> {
        let entries = hexes
            .iter()
            .map(|h| h.parse().map(PaletteEntry::new))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { k: entries.len(), entries, missing_hex: missing.parse()? })
    }

    pub fn color(&self, class: usize) -> Rgb {
        self.entries[class].hex
    }

    pub fn adjacent_delta_e(&self) -> Vec<f64> {
        self.entries
            .windows(2)
            .map(|w| ciede2000(w[0].lab, w[1].lab))
            .collect()
    }
}

// ColorBrewer YlOrBr. The 4-class entry is the study palette (the light end
// of the 9-class ramp) rather than ColorBrewer's own 4-class ramp.
const YL_OR_BR: [&[&str]; 8] = [
    &["fff7bc", "d95f0e"],
    &["fff7bc", "fec44f", "d95f0e"],
    &["ffffe5", "fff7bc", "fee391", "fec44f"],
    &["ffffd4", "fed98e", "fe9929", "d95f0e", "993404"],
    &["ffffd4", "fee391", "fec44f", "fe9929", "d95f0e", "993404"],
    &["ffffd4", "fee391", "fec44f", "fe9929", "ec7014", "cc4c02", "8c2d04"],
    &["ffffe5", "fff7bc", "fee391", "fec44f", "fe9929", "ec7014", "cc4c02", "8c2d04"],
    &["ffffe5", "fff7bc", "fee391", "fec44f", "fe9929", "ec7014", "cc4c02", "993404", "662506"],
];

/// Sequential yellow-orange-brown palette for `k` classes, 2 ≤ k ≤ 9.
pub fn study_palette(k: usize) -> Result<Palette> {
    if !(2..=9).contains(&k) {
        return Err(Error::invalid(format!("no palette for {k} classes (supported: 2-9)")));
    }
    Palette::from_hex(YL_OR_BR[k - 2], MISSING_HEX)
}

/// Palette for an effective class count, including the single-class case a
/// degenerate year can produce (one mid-ramp colour).
pub fn class_palette(k: usize) -> Result<Palette> {
    if k == 1 {
        return Palette::from_hex(&["fee391"], MISSING_HEX);
    }
    study_palette(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    /// Offending adjacent pair, `None` for whole-palette diagnostics.
    pub pair: Option<(usize, usize)>,
    pub message: String,
}

/// Check adjacent distinguishability and lightness ordering.
///
/// Any adjacent pair below [`MIN_ADJACENT_DELTA_E`] is an error; a mean
/// adjacent distance below [`WARN_ADJACENT_DELTA_E`] is a warning.
pub fn validate_palette(p: &Palette) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let distances = p.adjacent_delta_e();
    for (i, (w, &de)) in p.entries.windows(2).zip(&distances).enumerate() {
        let pair = (i, i + 1);
        if de < MIN_ADJACENT_DELTA_E {
            out.push(Diagnostic {
                severity: Severity::Error,
                pair: Some(pair),
                message: format!(
                    "ΔE2000 {de:.2} between #{} and #{} is below {MIN_ADJACENT_DELTA_E}",
                    w[0].hex, w[1].hex
                ),
            });
        }
        if w[1].lab.l >= w[0].lab.l {
            out.push(Diagnostic {
                severity: Severity::Error,
                pair: Some(pair),
                message: format!("lightness not decreasing: L {:.2} then {:.2}", w[0].lab.l, w[1].lab.l),
            });
        }
    }
    if !distances.is_empty() {
        let mean = distances.iter().sum::<f64>() / distances.len() as f64;
        if mean < WARN_ADJACENT_DELTA_E {
            out.push(Diagnostic {
                severity: Severity::Warning,
                pair: None,
                message: format!("mean adjacent ΔE2000 {mean:.2} is below {WARN_ADJACENT_DELTA_E}"),
            });
        }
    }
    out
}

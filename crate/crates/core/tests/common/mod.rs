#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use chorimap_core::geom::{signed_distance, Point};
use chorimap_core::{parse_geojson, parse_indicator, GeoJsonOptions, IndicatorSeries, Viewport, Workspace};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn europe() -> Workspace {
    let geo = std::fs::read(fixture("europe.geojson")).unwrap();
    let fs = parse_geojson(&geo, &GeoJsonOptions::default()).unwrap();
    let series = ["life_expectancy.json", "at_risk_of_poverty.json"]
        .iter()
        .map(|f| parse_indicator(&std::fs::read(fixture(f)).unwrap()).unwrap())
        .collect();
    Workspace::new(fs, series).unwrap()
}

pub fn europe_viewport(ws: &Workspace) -> Viewport {
    Viewport::fit(ws.features(), 1024, 768, 0.03).unwrap()
}

/// CIEDE2000 verification pairs: (L1, a1, b1, L2, a2, b2, ΔE00).
pub const SHARMA_PAIRS: [[f64; 7]; 34] = [
    [50.0000, 2.6772, -79.7751, 50.0000, 0.0000, -82.7485, 2.0425],
    [50.0000, 3.1571, -77.2803, 50.0000, 0.0000, -82.7485, 2.8615],
    [50.0000, 2.8361, -74.0200, 50.0000, 0.0000, -82.7485, 3.4412],
    [50.0000, -1.3802, -84.2814, 50.0000, 0.0000, -82.7485, 1.0000],
    [50.0000, -1.1848, -84.8006, 50.0000, 0.0000, -82.7485, 1.0000],
    [50.0000, -0.9009, -85.5211, 50.0000, 0.0000, -82.7485, 1.0000],
    [50.0000, 0.0000, 0.0000, 50.0000, -1.0000, 2.0000, 2.3669],
    [50.0000, -1.0000, 2.0000, 50.0000, 0.0000, 0.0000, 2.3669],
    [50.0000, 2.4900, -0.0010, 50.0000, -2.4900, 0.0009, 7.1792],
    [50.0000, 2.4900, -0.0010, 50.0000, -2.4900, 0.0010, 7.1792],
    [50.0000, 2.4900, -0.0010, 50.0000, -2.4900, 0.0011, 7.2195],
    [50.0000, 2.4900, -0.0010, 50.0000, -2.4900, 0.0012, 7.2195],
    [50.0000, -0.0010, 2.4900, 50.0000, 0.0009, -2.4900, 4.8045],
    [50.0000, -0.0010, 2.4900, 50.0000, 0.0010, -2.4900, 4.8045],
    [50.0000, -0.0010, 2.4900, 50.0000, 0.0011, -2.4900, 4.7461],
    [50.0000, 2.5000, 0.0000, 50.0000, 0.0000, -2.5000, 4.3065],
    [50.0000, 2.5000, 0.0000, 73.0000, 25.0000, -18.0000, 27.1492],
    [50.0000, 2.5000, 0.0000, 61.0000, -5.0000, 29.0000, 22.8977],
    [50.0000, 2.5000, 0.0000, 56.0000, -27.0000, -3.0000, 31.9030],
    [50.0000, 2.5000, 0.0000, 58.0000, 24.0000, 15.0000, 19.4535],
    [50.0000, 2.5000, 0.0000, 50.0000, 3.1736, 0.5854, 1.0000],
    [50.0000, 2.5000, 0.0000, 50.0000, 3.2972, 0.0000, 1.0000],
    [50.0000, 2.5000, 0.0000, 50.0000, 1.8634, 0.5757, 1.0000],
    [50.0000, 2.5000, 0.0000, 50.0000, 3.2592, 0.3350, 1.0000],
    [60.2574, -34.0099, 36.2677, 60.4626, -34.1751, 39.4387, 1.2644],
    [63.0109, -31.0961, -5.8663, 62.8187, -29.7946, -4.0864, 1.2630],
    [61.2901, 3.7196, -5.3901, 61.4292, 2.2480, -4.9620, 1.8731],
    [35.0831, -44.1164, 3.7933, 35.0232, -40.0716, 1.5901, 1.8645],
    [22.7233, 20.0904, -46.6940, 23.0331, 14.9730, -42.5619, 2.0373],
    [36.4612, 47.8580, 18.3852, 36.2715, 50.5065, 21.2231, 1.4146],
    [90.8027, -2.0831, 1.4410, 91.1528, -1.6435, 0.0447, 1.4441],
    [90.9257, -0.5406, -0.9208, 88.6381, -0.8985, -0.7239, 1.5381],
    [6.7747, -0.2908, -2.4247, 5.8714, -0.0985, -2.2286, 0.6377],
    [2.0776, 0.0795, -1.1350, 0.9033, -0.0636, -0.5514, 0.9082],
];

/// Colour table of the study palette: (label, hex, L, a, b).
pub const COLOUR_TABLE: [(&str, &str, f64, f64, f64); 5] = [
    ("no data", "737373", 48.44, 0.0, 0.0),
    ("A", "ffffe5", 99.40, -4.28, 12.44),
    ("B", "fff7bc", 96.59, -6.12, 29.41),
    ("C", "fee391", 90.82, -1.35, 43.36),
    ("D", "fec44f", 82.46, 9.61, 64.34),
];

pub const PATTERN_CSS: &str = ".striped_pattern_45deg {
    width: 30px;
    height: 30px;
    background: repeating-linear-gradient(
        45deg,
        #fee391,
        #fee391 20px,
        black 20px,
        black 40px
    );
}";

/// Split of sorted values into k classes, never between equal values,
/// minimising SDCM by exhaustive enumeration.
pub fn exhaustive_sdcm(sorted: &[f64], k: usize) -> f64 {
    fn rec(s: &[f64], from: usize, left: usize, acc: &mut Vec<usize>, best: &mut f64) {
        if left == 0 {
            *best = best.min(chorimap_core::classify::sdcm_of_split(s, acc));
            return;
        }
        for cut in from..s.len() {
            if s[cut - 1] < s[cut] {
                acc.push(cut);
                rec(s, cut + 1, left - 1, acc, best);
                acc.pop();
            }
        }
    }
    let mut best = f64::INFINITY;
    rec(sorted, 1, k - 1, &mut Vec::new(), &mut best);
    best
}

pub fn square(side: f64) -> Vec<Vec<Point>> {
    vec![vec![[0.0, 0.0], [side, 0.0], [side, side], [0.0, side], [0.0, 0.0]]]
}

/// 2×2 L with unit-width arms; the pole clearance is 2 − √2.
pub fn l_shape() -> Vec<Vec<Point>> {
    vec![vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0], [0.0, 0.0]]]
}

fn circle(r: f64, n: usize, ccw: bool) -> Vec<Point> {
    let mut ring: Vec<Point> = (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            [r * t.cos(), r * t.sin()]
        })
        .collect();
    if !ccw {
        ring.reverse();
    }
    ring.push(ring[0]);
    ring
}

pub fn annulus(outer: f64, inner: f64) -> Vec<Vec<Point>> {
    vec![circle(outer, 256, true), circle(inner, 256, false)]
}

/// Largest interior clearance over a `n`×`n` grid spanning the bounding box.
pub fn grid_clearance(rings: &[Vec<Point>], n: usize) -> f64 {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in &rings[0] {
        x0 = x0.min(p[0]);
        y0 = y0.min(p[1]);
        x1 = x1.max(p[0]);
        y1 = y1.max(p[1]);
    }
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        for j in 0..n {
            let x = x0 + (x1 - x0) * (i as f64 + 0.5) / n as f64;
            let y = y0 + (y1 - y0) * (j as f64 + 0.5) / n as f64;
            best = best.max(signed_distance(rings, [x, y]));
        }
    }
    best
}

pub fn series(id: &str, rows: &[(&str, Vec<(i32, Option<f64>)>)]) -> IndicatorSeries {
    IndicatorSeries {
        id: id.into(),
        goal: 3,
        indicator: id.into(),
        unit: "".into(),
        values: rows
            .iter()
            .map(|(c, ys)| (c.to_string(), ys.iter().copied().collect::<BTreeMap<_, _>>()))
            .collect(),
    }
}

/// Series whose values in each year sit in four tight, widely separated
/// clusters, so the Jenks classes are the cluster indices. `None` marks a
/// missing value.
pub fn clustered(id: &str, years: std::ops::RangeInclusive<i32>, rows: &[(&str, &[Option<usize>])]) -> IndicatorSeries {
    let rows: Vec<(&str, Vec<(i32, Option<f64>)>)> = rows
        .iter()
        .enumerate()
        .map(|(ci, (c, classes))| {
            let ys = years
                .clone()
                .zip(classes.iter())
                .map(|(y, cl)| (y, cl.map(|cl| 10.0 * (cl as f64 + 1.0) + 0.1 * ci as f64)))
                .collect();
            (*c, ys)
        })
        .collect();
    series(id, &rows)
}

/// The eight comparison tasks on six-country, six-year series with classes
/// fixed by hand.
pub struct TaskFixture {
    pub life: IndicatorSeries,
    pub organic: IndicatorSeries,
    pub risk: IndicatorSeries,
    pub unemployment: IndicatorSeries,
    pub risk_trend: IndicatorSeries,
    pub prt_trend: IndicatorSeries,
    pub spread: IndicatorSeries,
}

fn one_year(id: &str, years: std::ops::RangeInclusive<i32>, at: i32, values: &[(&str, f64)]) -> IndicatorSeries {
    // Every year repeats the same values except that the target year is
    // exactly as given; other years are shifted so they differ.
    let rows: Vec<(&str, Vec<(i32, Option<f64>)>)> = values
        .iter()
        .map(|(c, v)| {
            let ys = years
                .clone()
                .map(|y| (y, Some(if y == at { *v } else { v + 0.01 * (y - at) as f64 })))
                .collect();
            (*c, ys)
        })
        .collect();
    series(id, &rows)
}

pub fn task_fixture() -> TaskFixture {
    let life = one_year(
        "life",
        2001..=2006,
        2004,
        &[("LVA", 70.9), ("LTU", 71.0), ("EST", 72.5), ("DEU", 78.9), ("FRA", 79.0), ("SWE", 80.6)],
    );
    let organic = one_year(
        "organic",
        2013..=2018,
        2018,
        &[("AUT", 24.1), ("SWE", 20.3), ("EST", 20.6), ("ITA", 15.2), ("DEU", 7.3), ("FRA", 7.5)],
    );
    let risk = one_year(
        "risk",
        2008..=2013,
        2013,
        &[("CZE", 14.6), ("NLD", 14.8), ("FRA", 19.6), ("DEU", 19.9), ("ITA", 28.5), ("BGR", 48.0)],
    );
    let unemployment = one_year(
        "unemployment",
        2007..=2012,
        2012,
        &[("GRC", 24.5), ("ESP", 24.8), ("PRT", 15.8), ("ITA", 10.7), ("FRA", 9.8), ("DEU", 5.4)],
    );
    let ys = |v: [f64; 6]| (2005..=2010).zip(v.map(Some)).collect::<Vec<_>>();
    let risk_trend = series(
        "risk_trend",
        &[
            ("CZE", ys([10.0, 10.0, 10.0, 10.0, 10.0, 10.0])),
            ("NLD", ys([10.2, 10.2, 10.2, 10.2, 10.2, 10.1])),
            ("DEU", ys([18.4, 19.0, 20.0, 21.0, 23.0, 25.1])),
            ("FRA", ys([18.6, 18.6, 18.6, 18.6, 18.6, 18.5])),
            ("ITA", ys([25.0, 25.0, 25.0, 25.0, 25.0, 25.3])),
            ("BGR", ys([60.0, 58.0, 56.0, 54.0, 52.0, 50.0])),
        ],
    );
    let ys = |v: [f64; 6]| (2004..=2009).zip(v.map(Some)).collect::<Vec<_>>();
    let prt_trend = series(
        "prt_trend",
        &[
            ("DEU", ys([2.0, 2.0, 2.0, 2.0, 2.0, 2.0])),
            ("FRA", ys([2.2, 2.2, 2.2, 2.2, 2.2, 2.1])),
            ("PRT", ys([9.0, 9.5, 10.0, 9.8, 9.2, 9.0])),
            ("ESP", ys([9.1, 9.1, 9.1, 9.1, 9.1, 9.3])),
            ("ITA", ys([15.0, 15.0, 15.0, 15.0, 15.0, 16.0])),
            ("GRC", ys([30.0, 30.0, 30.0, 30.0, 30.0, 31.0])),
        ],
    );
    let spread = clustered(
        "spread",
        2004..=2009,
        &[
            ("FRA", &[Some(1), Some(2), None, Some(1), Some(2), Some(3)]),
            ("DEU", &[Some(1), Some(1), Some(1), Some(2), Some(2), Some(1)]),
            ("FIN", &[Some(2), Some(2), Some(3), Some(1), Some(0), Some(2)]),
            ("SWE", &[Some(2), Some(1), Some(3), Some(0), Some(0), None]),
            ("ITA", &[Some(0), Some(0), Some(0), Some(0), Some(1), Some(0)]),
            ("POL", &[Some(3), Some(3), Some(2), Some(3), Some(3), Some(1)]),
        ],
    );
    TaskFixture { life, organic, risk, unemployment, risk_trend, prt_trend, spread }
}

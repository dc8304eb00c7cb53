//! Web Mercator projection into a pixel viewport, planar polygon measures,
//! and the pole of inaccessibility used to anchor symbols and popups.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{FeatureSet, Polygon, MERCATOR_MAX_LAT};

pub type Point = [f64; 2];

/// Default search precision in viewport units.
pub const DEFAULT_PRECISION: f64 = 1.0;

/// Pixel rectangle showing a lon/lat box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Viewport {
    pub width_px: u32,
    pub height_px: u32,
    /// `(lon_min, lat_min, lon_max, lat_max)` in degrees.
    pub bounds: (f64, f64, f64, f64),
}

fn mercator_y(lat_deg: f64) -> f64 {
    (FRAC_PI_4 + lat_deg.to_radians() / 2.0).tan().ln()
}

fn inverse_mercator_y(y: f64) -> f64 {
    (2.0 * y.exp().atan() - PI / 2.0).to_degrees()
}

fn check_lat(lat: f64) -> Result<()> {
    if lat.abs() > MERCATOR_MAX_LAT + 1e-9 || lat.is_nan() {
        return Err(Error::invalid(format!("latitude {lat} outside the Web Mercator band")));
    }
    Ok(())
}

impl Viewport {
    pub fn new(width_px: u32, height_px: u32, bounds: (f64, f64, f64, f64)) -> Result<Self> {
        let (x0, y0, x1, y1) = bounds;
        if width_px == 0 || height_px == 0 {
            return Err(Error::invalid("viewport size must be positive"));
        }
        if !(x0 < x1 && y0 < y1) {
            return Err(Error::invalid("viewport bounds must satisfy min < max"));
        }
        check_lat(y0)?;
        check_lat(y1)?;
        Ok(Self { width_px, height_px, bounds })
    }

    pub fn world(width_px: u32, height_px: u32) -> Self {
        Self::new(width_px, height_px, (-180.0, -MERCATOR_MAX_LAT, 180.0, MERCATOR_MAX_LAT))
            .expect("world bounds are valid")
    }

    /// Fit `fs` into the pixel rectangle with uniform scale, padding the
    /// shorter Mercator extent so shapes are not stretched. `margin` is the
    /// fraction of the extent added on each side.
    pub fn fit(fs: &FeatureSet, width_px: u32, height_px: u32, margin: f64) -> Result<Self> {
        let (x0, y0, x1, y1) = fs
            .bounds()
            .ok_or_else(|| Error::invalid("cannot fit an empty feature set"))?;
        let (mx0, mx1) = (x0.to_radians(), x1.to_radians());
        let (my0, my1) = (mercator_y(y0), mercator_y(y1));
        let (mut w, mut h) = ((mx1 - mx0).max(1e-9), (my1 - my0).max(1e-9));
        let (cx, cy) = ((mx0 + mx1) / 2.0, (my0 + my1) / 2.0);
        w *= 1.0 + 2.0 * margin;
        h *= 1.0 + 2.0 * margin;
        let aspect = f64::from(width_px) / f64::from(height_px);
        if w / h > aspect {
            h = w / aspect;
        } else {
            w = h * aspect;
        }
        let lat_lim = mercator_y(MERCATOR_MAX_LAT);
        let lon = |x: f64| x.to_degrees().clamp(-180.0, 180.0);
        let lat = |y: f64| inverse_mercator_y(y.clamp(-lat_lim, lat_lim));
        Self::new(
            width_px,
            height_px,
            (lon(cx - w / 2.0), lat(cy - h / 2.0), lon(cx + w / 2.0), lat(cy + h / 2.0)),
        )
    }

    /// Project lon/lat degrees to viewport units, y growing downward.
    pub fn project(&self, lonlat: [f64; 2]) -> Result<Point> {
        check_lat(lonlat[1])?;
        Ok(self.project_unchecked(lonlat))
    }

    pub(crate) fn project_unchecked(&self, [lon, lat]: [f64; 2]) -> Point {
        let (x0, y0, x1, y1) = self.bounds;
        let (my0, my1) = (mercator_y(y0), mercator_y(y1));
        let x = (lon - x0) / (x1 - x0) * f64::from(self.width_px);
        let y = (my1 - mercator_y(lat)) / (my1 - my0) * f64::from(self.height_px);
        [x, y]
    }

    /// Inverse of [`Viewport::project`].
    pub fn unproject(&self, [x, y]: Point) -> [f64; 2] {
        let (x0, y0, x1, y1) = self.bounds;
        let (my0, my1) = (mercator_y(y0), mercator_y(y1));
        let lon = x0 + x / f64::from(self.width_px) * (x1 - x0);
        let my = my1 - y / f64::from(self.height_px) * (my1 - my0);
        [lon, inverse_mercator_y(my)]
    }

    pub fn project_polygon(&self, p: &Polygon) -> Vec<Vec<Point>> {
        p.rings
            .iter()
            .map(|r| r.iter().map(|q| self.project_unchecked(*q)).collect())
            .collect()
    }
}

/// Shoelace area of a ring (sign depends on orientation).
pub fn signed_area(ring: &[Point]) -> f64 {
    let n = ring.len();
    (0..n)
        .map(|i| {
            let (a, b) = (ring[i], ring[(i + 1) % n]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
        / 2.0
}

/// Area of outer ring minus holes.
pub fn polygon_area(rings: &[Vec<Point>]) -> f64 {
    match rings.split_first() {
        None => 0.0,
        Some((outer, holes)) => {
            signed_area(outer).abs() - holes.iter().map(|h| signed_area(h).abs()).sum::<f64>()
        }
    }
}

/// Index of the part with the largest area.
pub fn largest_part(parts: &[Vec<Vec<Point>>]) -> Option<usize> {
    parts
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| polygon_area(a).total_cmp(&polygon_area(b)))
        .map(|(i, _)| i)
}

/// Area-weighted centroid, holes subtracted.
pub fn polygon_centroid(rings: &[Vec<Point>]) -> Result<Point> {
    let mut area = 0.0;
    let (mut cx, mut cy) = (0.0, 0.0);
    for (i, ring) in rings.iter().enumerate() {
        let a = signed_area(ring);
        // Outer counts positive, holes negative, whatever their winding.
        let sign = if (i == 0) == (a >= 0.0) { 1.0 } else { -1.0 };
        let n = ring.len();
        let (mut rx, mut ry) = (0.0, 0.0);
        for j in 0..n {
            let (p, q) = (ring[j], ring[(j + 1) % n]);
            let cross = p[0] * q[1] - q[0] * p[1];
            rx += (p[0] + q[0]) * cross;
            ry += (p[1] + q[1]) * cross;
        }
        // rx / (6a) is the ring centroid; weight by signed |a|.
        if a != 0.0 {
            let w = sign * a.abs();
            cx += rx / (6.0 * a) * w;
            cy += ry / (6.0 * a) * w;
            area += w;
        }
    }
    if area.abs() < 1e-12 {
        return Err(Error::DegeneratePolygon);
    }
    Ok([cx / area, cy / area])
}

/// Even-odd point-in-polygon test over every ring.
pub fn contains(rings: &[Vec<Point>], p: Point) -> bool {
    let mut inside = false;
    for ring in rings {
        let n = ring.len();
        let mut j = n - 1;
        for i in 0..n {
            let (a, b) = (ring[i], ring[j]);
            if (a[1] > p[1]) != (b[1] > p[1])
                && p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0]
            {
                inside = !inside;
            }
            j = i;
        }
    }
    inside
}

fn segment_dist_sq(p: Point, a: Point, b: Point) -> f64 {
    let (mut x, mut y) = (a[0], a[1]);
    let (dx, dy) = (b[0] - x, b[1] - y);
    if dx != 0.0 || dy != 0.0 {
        let t = ((p[0] - x) * dx + (p[1] - y) * dy) / (dx * dx + dy * dy);
        if t > 1.0 {
            x = b[0];
            y = b[1];
        } else if t > 0.0 {
            x += dx * t;
            y += dy * t;
        }
    }
    (p[0] - x).powi(2) + (p[1] - y).powi(2)
}

/// Distance to the nearest edge of any ring; negative outside.
pub fn signed_distance(rings: &[Vec<Point>], p: Point) -> f64 {
    let mut best = f64::INFINITY;
    for ring in rings {
        for w in ring.windows(2) {
            best = best.min(segment_dist_sq(p, w[0], w[1]));
        }
        if let (Some(first), Some(last)) = (ring.first(), ring.last()) {
            if first != last {
                best = best.min(segment_dist_sq(p, *last, *first));
            }
        }
    }
    let d = best.sqrt();
    if contains(rings, p) {
        d
    } else {
        -d
    }
}

/// Interior anchor and its distance to the outline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnchorPoint {
    pub position: Point,
    pub clearance: f64,
}

struct Cell {
    center: Point,
    half: f64,
    distance: f64,
    potential: f64,
}

impl Cell {
    fn new(center: Point, half: f64, rings: &[Vec<Point>]) -> Self {
        let distance = signed_distance(rings, center);
        Self { center, half, distance, potential: distance + half * SQRT_2 }
    }
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.potential == other.potential
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.potential.total_cmp(&other.potential)
    }
}

/// Pole of inaccessibility of one polygon (outer ring plus holes) by
/// best-first quadtree search; the clearance is within `precision` of the
/// true maximum.
pub fn pole_of_inaccessibility(rings: &[Vec<Point>], precision: f64) -> Result<AnchorPoint> {
    if !(precision > 0.0) {
        return Err(Error::invalid("precision must be positive"));
    }
    if rings.is_empty() || polygon_area(rings) <= 0.0 {
        return Err(Error::DegeneratePolygon);
    }
    let outer = &rings[0];
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in outer {
        x0 = x0.min(p[0]);
        y0 = y0.min(p[1]);
        x1 = x1.max(p[0]);
        y1 = y1.max(p[1]);
    }
    let (w, h) = (x1 - x0, y1 - y0);
    let size = w.min(h);
    if size <= 0.0 {
        return Err(Error::DegeneratePolygon);
    }
    let half = size / 2.0;

    let mut queue = BinaryHeap::new();
    let mut x = x0;
    while x < x1 {
        let mut y = y0;
        while y < y1 {
            queue.push(Cell::new([x + half, y + half], half, rings));
            y += size;
        }
        x += size;
    }

    let mut best = match polygon_centroid(rings) {
        Ok(c) => Cell::new(c, 0.0, rings),
        Err(_) => Cell::new([x0 + w / 2.0, y0 + h / 2.0], 0.0, rings),
    };
    let bbox_center = Cell::new([x0 + w / 2.0, y0 + h / 2.0], 0.0, rings);
    if bbox_center.distance > best.distance {
        best = bbox_center;
    }

    while let Some(cell) = queue.pop() {
        if cell.distance > best.distance {
            best = Cell { half: 0.0, ..cell };
            best.potential = best.distance;
        }
        // Best-first: nothing left in the queue can beat this bound. Keep
        // going until some interior point is known, for slivers whose
        // centroid and seed cells all fall outside.
        if best.distance > 0.0 && cell.potential - best.distance <= precision {
            break;
        }
        let q = cell.half / 2.0;
        let [cx, cy] = cell.center;
        for c in [[cx - q, cy - q], [cx + q, cy - q], [cx - q, cy + q], [cx + q, cy + q]] {
            queue.push(Cell::new(c, q, rings));
        }
    }

    if best.distance <= 0.0 {
        return Err(Error::DegeneratePolygon);
    }
    Ok(AnchorPoint { position: best.center, clearance: best.distance })
}

/// Anchor of a (multi)polygon: the pole of its largest-area part.
pub fn anchor_for_parts(parts: &[Vec<Vec<Point>>], precision: f64) -> Result<AnchorPoint> {
    let i = largest_part(parts).ok_or(Error::DegeneratePolygon)?;
    pole_of_inaccessibility(&parts[i], precision)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Point> {
        vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]]
    }

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn symmetric_projection() {
        let vp = Viewport::new(100, 100, (-10.0, -10.0, 10.0, 10.0)).unwrap();
        let p = vp.project([0.0, 0.0]).unwrap();
        assert!(approx(p[0], 50.0, 1e-9) && approx(p[1], 50.0, 1e-9), "{p:?}");
        let e = vp.project([10.0, 0.0]).unwrap();
        assert!(approx(e[0], 100.0, 1e-9) && approx(e[1], 50.0, 1e-9));
    }

    #[test]
    fn world_projection_at_sixty_north() {
        let vp = Viewport::world(256, 256);
        let y = vp.project([0.0, 60.0]).unwrap()[1];
        let expected = 128.0 * (1.0 - (FRAC_PI_4 + 60f64.to_radians() / 2.0).tan().ln() / PI);
        assert!(approx(y, expected, 1e-9));
        assert!(approx(y, 74.34, 0.01), "{y}");
        assert!(vp.project([0.0, 86.0]).is_err());
    }

    #[test]
    fn unproject_roundtrip() {
        let vp = Viewport::new(800, 600, (-25.0, 34.0, 45.0, 71.0)).unwrap();
        for ll in [[0.0, 50.0], [-20.0, 35.0], [44.0, 70.5]] {
            let back = vp.unproject(vp.project(ll).unwrap());
            assert!(approx(back[0], ll[0], 1e-9) && approx(back[1], ll[1], 1e-9));
        }
    }

    #[test]
    fn projection_monotone() {
        let vp = Viewport::world(512, 512);
        let mut prev = vp.project([-180.0, -85.0]).unwrap();
        for i in 1..100 {
            let t = f64::from(i) / 100.0;
            let p = vp.project([-180.0 + 360.0 * t, -85.0 + 170.0 * t]).unwrap();
            assert!(p[0] > prev[0] && p[1] < prev[1]);
            prev = p;
        }
    }

    #[test]
    fn fit_keeps_aspect() {
        use crate::ingest::{Feature, Geometry};
        let ring = vec![[0.0, 40.0], [20.0, 40.0], [20.0, 60.0], [0.0, 60.0], [0.0, 40.0]];
        let fs = FeatureSet {
            features: vec![Feature {
                id: "AAA".into(),
                name: "a".into(),
                geometry: Geometry::Polygon(Polygon { rings: vec![ring] }),
            }],
        };
        let vp = Viewport::fit(&fs, 400, 200, 0.0).unwrap();
        let a = vp.project([0.0, 40.0]).unwrap();
        let b = vp.project([20.0, 60.0]).unwrap();
        assert!(a[0] >= -1e-9 && b[0] <= 400.0 + 1e-9 && b[1] >= -1e-9 && a[1] <= 200.0 + 1e-9);
        assert!(approx(a[1], 200.0, 1e-6) || approx(a[0], 0.0, 1e-6));
    }

    #[test]
    fn centroids() {
        let c = polygon_centroid(&[square(0.0, 0.0, 1.0, 1.0)]).unwrap();
        assert!(approx(c[0], 0.5, 1e-12) && approx(c[1], 0.5, 1e-12));
        let tri = vec![[0.0, 0.0], [3.0, 0.0], [0.0, 3.0], [0.0, 0.0]];
        let c = polygon_centroid(&[tri]).unwrap();
        assert!(approx(c[0], 1.0, 1e-12) && approx(c[1], 1.0, 1e-12));
        let mut hole = square(0.4, 0.4, 0.6, 0.6);
        hole.reverse();
        let c = polygon_centroid(&[square(0.0, 0.0, 1.0, 1.0), hole]).unwrap();
        assert!(approx(c[0], 0.5, 1e-12) && approx(c[1], 0.5, 1e-12));
        let flat = vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [0.0, 0.0]];
        assert!(matches!(polygon_centroid(&[flat]), Err(Error::DegeneratePolygon)));
    }

    #[test]
    fn unit_square_pole() {
        let a = pole_of_inaccessibility(&[square(0.0, 0.0, 1.0, 1.0)], 1e-3).unwrap();
        assert!(approx(a.position[0], 0.5, 1e-9) && approx(a.position[1], 0.5, 1e-9));
        assert!(approx(a.clearance, 0.5, 1e-9));
    }

    #[test]
    fn degenerate_pole() {
        let flat = vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [0.0, 0.0]];
        assert!(matches!(pole_of_inaccessibility(&[flat], 1.0), Err(Error::DegeneratePolygon)));
        assert!(pole_of_inaccessibility(&[square(0.0, 0.0, 1.0, 1.0)], 0.0).is_err());
    }

    #[test]
    fn largest_part_wins() {
        let parts = vec![vec![square(0.0, 0.0, 1.0, 1.0)], vec![square(10.0, 10.0, 14.0, 14.0)]];
        let a = anchor_for_parts(&parts, 0.01).unwrap();
        assert!(approx(a.position[0], 12.0, 0.01) && approx(a.clearance, 2.0, 0.01));
    }

    #[test]
    fn holes_are_respected() {
        let rings = vec![square(0.0, 0.0, 10.0, 10.0), square(2.0, 2.0, 8.0, 8.0)];
        let a = pole_of_inaccessibility(&rings, 0.01).unwrap();
        assert!(contains(&rings, a.position));
        assert!(signed_distance(&rings, [5.0, 5.0]) < 0.0);
    }
}

//! Planar primitives shared by the canvas and the drawing tools.
//!
//! Coordinates are canvas pixels with the origin in the top-left corner and
//! `y` growing downwards.

use serde::{Deserialize, Serialize};

/// Errors raised when constructing geometric values.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("coordinate is not finite: ({0}, {1})")]
    NonFinite(f64, f64),
    #[error("polyline needs at least two distinct points")]
    TooFewPoints,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(self.x + (other.x - self.x) * t, self.y + (other.y - self.y) * t)
    }

    pub fn add(self, v: Vector) -> Point {
        Point::new(self.x + v.x, self.y + v.y)
    }

    pub fn sub(self, other: Point) -> Vector {
        Vector::new(self.x - other.x, self.y - other.y)
    }
}

// Points travel as `[x, y]` pairs in every JSON document.
impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.x, self.y].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [x, y] = <[f64; 2]>::deserialize(d)?;
        Ok(Point::new(x, y))
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point::new(x, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vector {
    pub x: f64,
    pub y: f64,
}

impl Vector {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn length(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn scale(self, k: f64) -> Vector {
        Vector::new(self.x * k, self.y * k)
    }

    pub fn dot(self, o: Vector) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vector) -> f64 {
        self.x * o.y - self.y * o.x
    }

    /// Unit vector, or zero when the input has no length.
    pub fn normalized(self) -> Vector {
        let len = self.length();
        if len > 0.0 {
            self.scale(1.0 / len)
        } else {
            Vector::default()
        }
    }

    /// Left-hand perpendicular in a y-down frame.
    pub fn perp(self) -> Vector {
        Vector::new(-self.y, self.x)
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl BBox {
    pub fn new(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Self {
        Self { min_x, min_y, max_x, max_y }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Point>) -> Option<BBox> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut b = BBox::new(first.x, first.y, first.x, first.y);
        for p in it {
            b.min_x = b.min_x.min(p.x);
            b.min_y = b.min_y.min(p.y);
            b.max_x = b.max_x.max(p.x);
            b.max_y = b.max_y.max(p.y);
        }
        Some(b)
    }

    pub fn union(self, o: BBox) -> BBox {
        BBox::new(
            self.min_x.min(o.min_x),
            self.min_y.min(o.min_y),
            self.max_x.max(o.max_x),
            self.max_y.max(o.max_y),
        )
    }

    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }

    pub fn center(&self) -> Point {
        Point::new((self.min_x + self.max_x) / 2.0, (self.min_y + self.max_y) / 2.0)
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min_x && p.x <= self.max_x && p.y >= self.min_y && p.y <= self.max_y
    }

    pub fn contains_box(&self, o: &BBox) -> bool {
        o.min_x >= self.min_x && o.max_x <= self.max_x && o.min_y >= self.min_y && o.max_y <= self.max_y
    }

    /// Euclidean gap between two boxes; zero when they overlap or touch.
    pub fn distance(&self, o: &BBox) -> f64 {
        let dx = (o.min_x - self.max_x).max(self.min_x - o.max_x).max(0.0);
        let dy = (o.min_y - self.max_y).max(self.min_y - o.max_y).max(0.0);
        dx.hypot(dy)
    }
}

/// An ordered pen-down point sequence.
///
/// Construction collapses consecutive duplicates and requires at least two
/// distinct points, so every polyline has positive length.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Polyline {
    points: Vec<Point>,
}

impl Polyline {
    pub fn new(points: impl IntoIterator<Item = Point>) -> Result<Self, GeometryError> {
        let mut out: Vec<Point> = Vec::new();
        for p in points {
            if !p.is_finite() {
                return Err(GeometryError::NonFinite(p.x, p.y));
            }
            if out.last() != Some(&p) {
                out.push(p);
            }
        }
        if out.len() < 2 {
            return Err(GeometryError::TooFewPoints);
        }
        Ok(Self { points: out })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn first(&self) -> Point {
        self.points[0]
    }

    pub fn last(&self) -> Point {
        self.points[self.points.len() - 1]
    }

    pub fn segment_count(&self) -> usize {
        self.points.len() - 1
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| a.distance(b)).sum()
    }

    pub fn bbox(&self) -> BBox {
        BBox::from_points(&self.points).expect("polyline is non-empty")
    }

    pub fn is_closed(&self) -> bool {
        self.first() == self.last()
    }

    pub fn reversed(&self) -> Polyline {
        let mut points = self.points.clone();
        points.reverse();
        Polyline { points }
    }

    pub fn translated(&self, v: Vector) -> Polyline {
        Polyline { points: self.points.iter().map(|p| p.add(v)).collect() }
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }
}

impl<'de> Deserialize<'de> for Polyline {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let points = Vec::<Point>::deserialize(d)?;
        Polyline::new(points).map_err(serde::de::Error::custom)
    }
}

/// Shortest distance from `p` to the segment `a`–`b`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = (p.sub(a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a.lerp(b, t))
}

/// Shortest distance from `p` to any segment of `line`.
pub fn point_polyline_distance(p: Point, line: &[Point]) -> f64 {
    match line {
        [] => f64::INFINITY,
        [only] => p.distance(*only),
        _ => line
            .windows(2)
            .map(|w| point_segment_distance(p, w[0], w[1]))
            .fold(f64::INFINITY, f64::min),
    }
}

/// Clip the segment `a`–`b` to `rect` (Liang–Barsky). Returns the surviving
/// sub-segment, if any.
pub fn clip_segment(a: Point, b: Point, rect: &BBox) -> Option<(Point, Point)> {
    let d = b.sub(a);
    let mut t0 = 0.0_f64;
    let mut t1 = 1.0_f64;
    let checks = [
        (-d.x, a.x - rect.min_x),
        (d.x, rect.max_x - a.x),
        (-d.y, a.y - rect.min_y),
        (d.y, rect.max_y - a.y),
    ];
    for (p, q) in checks {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
            if t0 > t1 {
                return None;
            }
        }
    }
    let clamp = |p: Point| Point::new(p.x.clamp(rect.min_x, rect.max_x), p.y.clamp(rect.min_y, rect.max_y));
    let start = if t0 == 0.0 { a } else { clamp(a.lerp(b, t0)) };
    let end = if t1 == 1.0 { b } else { clamp(a.lerp(b, t1)) };
    Some((start, end))
}

/// Clip a polyline to `rect`, splitting it wherever it leaves the rectangle.
/// Pieces that degenerate to a point are dropped.
pub fn clip_polyline(line: &Polyline, rect: &BBox) -> Vec<Polyline> {
    let mut pieces = Vec::new();
    let mut current: Vec<Point> = Vec::new();
    for (a, b) in line.segments() {
        match clip_segment(a, b, rect) {
            Some((s, e)) => {
                if current.last() != Some(&s) {
                    flush(&mut current, &mut pieces);
                    current.push(s);
                }
                current.push(e);
                if e != b {
                    flush(&mut current, &mut pieces);
                }
            }
            None => flush(&mut current, &mut pieces),
        }
    }
    flush(&mut current, &mut pieces);
    pieces
}

fn flush(current: &mut Vec<Point>, out: &mut Vec<Polyline>) {
    if let Ok(p) = Polyline::new(current.drain(..)) {
        out.push(p);
    }
}

/// Even-odd point-in-polygon test (closure implicit).
pub fn point_in_polygon(p: Point, vertices: &[Point]) -> bool {
    let n = vertices.len();
    let mut inside = false;
    let mut j = n.wrapping_sub(1);
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Distance from `p` to the closed boundary of a polygon.
pub fn point_polygon_boundary_distance(p: Point, vertices: &[Point]) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| point_segment_distance(p, vertices[i], vertices[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// Signed shoelace area (positive for clockwise order in a y-down frame).
pub fn signed_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| {
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            a.x * b.y - b.x * a.y
        })
        .sum::<f64>()
        / 2.0
}

/// Convex hull (Andrew's monotone chain), counter-clockwise in a y-up frame.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let turn = |o: Point, a: Point, b: Point| a.sub(o).cross(b.sub(o));
    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() * 2);
    for &p in &pts {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Whether `p` lies inside or on a convex hull produced by [`convex_hull`].
pub fn hull_contains(hull: &[Point], p: Point, tol: f64) -> bool {
    match hull.len() {
        0 => false,
        1 => hull[0].distance(p) <= tol,
        2 => point_segment_distance(p, hull[0], hull[1]) <= tol,
        n => (0..n).all(|i| {
            let (a, b) = (hull[i], hull[(i + 1) % n]);
            let edge = b.sub(a);
            // Signed distance to the left of the edge; inside is non-negative.
            edge.cross(p.sub(a)) / edge.length() >= -tol
        }),
    }
}

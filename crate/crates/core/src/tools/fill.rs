//! Region fillers: rejection-sampled scribbles and line-intersection hatching.

use rand::Rng;

use super::spline::draw_splines;
use super::{Density, Polygon, RandomSource, ToolError};
use crate::geometry::{Point, Polyline, Vector};

/// Upper bound on scribble sample points, keeping the greedy ordering cheap.
pub const MAX_SCRIBBLE_SAMPLES: usize = 5000;
const ATTEMPTS_PER_SAMPLE: usize = 1000;
const MIN_CHORD: f64 = 1.0;
const SAMPLE_STREAM: u64 = 0;

/// Organic scribble inside `region`.
///
/// Points are drawn uniformly from the bounding box and kept when inside the
/// polygon, ordered by greedy nearest neighbour, joined by a spline and
/// finally clipped back to the polygon.
pub fn draw_scribbles(region: &Polygon, density: Density, rng: &RandomSource) -> Result<Vec<Polyline>, ToolError> {
    let n = ((density.value() * region.area() / 1000.0).round() as usize).clamp(3, MAX_SCRIBBLE_SAMPLES);
    let samples = sample_inside(region, n, rng)?;
    let ordered = greedy_order(samples);
    let path = draw_splines(&ordered)?;
    Ok(clip_polyline_to_polygon(&path, region))
}

fn sample_inside(region: &Polygon, n: usize, rng: &RandomSource) -> Result<Vec<Point>, ToolError> {
    let bbox = region.bbox();
    let mut stream = rng.stream(SAMPLE_STREAM);
    let cap = ATTEMPTS_PER_SAMPLE * n;
    let mut out = Vec::with_capacity(n);
    for _ in 0..cap {
        let p = Point::new(
            bbox.min_x + stream.random::<f64>() * bbox.width(),
            bbox.min_y + stream.random::<f64>() * bbox.height(),
        );
        if region.contains(p) {
            out.push(p);
            if out.len() == n {
                return Ok(out);
            }
        }
    }
    Err(ToolError::SamplingFailed { attempts: cap })
}

fn greedy_order(mut pending: Vec<Point>) -> Vec<Point> {
    let mut ordered = Vec::with_capacity(pending.len());
    let mut current = pending.remove(0);
    ordered.push(current);
    while !pending.is_empty() {
        let (idx, _) = pending
            .iter()
            .enumerate()
            .map(|(i, p)| (i, p.sub(current).dot(p.sub(current))))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .expect("non-empty");
        // `remove` keeps the remaining order stable so ties resolve deterministically.
        current = pending.remove(idx);
        ordered.push(current);
    }
    ordered
}

/// Splits `line` into the pieces lying inside `region` (even-odd rule).
pub fn clip_polyline_to_polygon(line: &Polyline, region: &Polygon) -> Vec<Polyline> {
    let verts = region.vertices();
    let n = verts.len();
    let mut pieces = Vec::new();
    let mut current: Vec<Point> = Vec::new();
    for (a, b) in line.segments() {
        let d = b.sub(a);
        let mut ts = vec![0.0, 1.0];
        for i in 0..n {
            let (c, e) = (verts[i], verts[(i + 1) % n]);
            let f = e.sub(c);
            let denom = d.cross(f);
            if denom == 0.0 {
                continue;
            }
            let w = c.sub(a);
            let t = w.cross(f) / denom;
            let u = w.cross(d) / denom;
            if t > 0.0 && t < 1.0 && (0.0..=1.0).contains(&u) {
                ts.push(t);
            }
        }
        ts.sort_by(f64::total_cmp);
        for w in ts.windows(2) {
            let (t0, t1) = (w[0], w[1]);
            if t1 - t0 <= 0.0 {
                continue;
            }
            let mid = a.lerp(b, 0.5 * (t0 + t1));
            let (s, e) = (a.lerp(b, t0), a.lerp(b, t1));
            if region.contains(mid) {
                if current.last() != Some(&s) {
                    take_piece(&mut current, &mut pieces);
                    current.push(s);
                }
                current.push(e);
            } else {
                take_piece(&mut current, &mut pieces);
            }
        }
    }
    take_piece(&mut current, &mut pieces);
    pieces
}

fn take_piece(current: &mut Vec<Point>, out: &mut Vec<Polyline>) {
    if let Ok(p) = Polyline::new(current.drain(..)) {
        out.push(p);
    }
}

/// Offsets (along the unit normal of the hatch direction) of the hatch lines
/// covering `region`: `max(1, ⌊extent / spacing⌋)` lines centred in the
/// projected extent.
pub fn hatch_offsets(region: &Polygon, spacing: f64, angle_deg: f64) -> Vec<f64> {
    let normal = direction(angle_deg).perp();
    let (lo, hi) = region
        .vertices()
        .iter()
        .map(|p| Vector::new(p.x, p.y).dot(normal))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), o| (lo.min(o), hi.max(o)));
    let extent = hi - lo;
    let n = ((extent / spacing).floor() as usize).max(1);
    let start = lo + (extent - (n - 1) as f64 * spacing) / 2.0;
    (0..n).map(|k| start + k as f64 * spacing).collect()
}

fn direction(angle_deg: f64) -> Vector {
    let a = angle_deg.to_radians();
    Vector::new(a.cos(), a.sin())
}

/// Parallel hatch chords at `angle_deg` (a second family at +90° when
/// `cross`), each a two-point polyline with endpoints on the boundary.
/// Consecutive chords alternate direction to shorten pen travel.
pub fn draw_hatching(region: &Polygon, density: Density, angle_deg: f64, cross: bool) -> Result<Vec<Polyline>, ToolError> {
    if !angle_deg.is_finite() {
        return Err(ToolError::NonFinite);
    }
    let mut out = hatch_family(region, density.hatch_spacing(), angle_deg);
    if cross {
        out.extend(hatch_family(region, density.hatch_spacing(), angle_deg + 90.0));
    }
    Ok(out)
}

fn hatch_family(region: &Polygon, spacing: f64, angle_deg: f64) -> Vec<Polyline> {
    let dir = direction(angle_deg);
    let normal = dir.perp();
    let verts = region.vertices();
    let n = verts.len();
    let mut out = Vec::new();
    let mut reverse = false;
    for offset in hatch_offsets(region, spacing, angle_deg) {
        let mut hits: Vec<(f64, Point)> = Vec::new();
        for i in 0..n {
            let (a, b) = (verts[i], verts[(i + 1) % n]);
            let oa = Vector::new(a.x, a.y).dot(normal);
            let ob = Vector::new(b.x, b.y).dot(normal);
            // Half-open crossing rule: vertices on the line count once.
            if (oa > offset) != (ob > offset) {
                let p = a.lerp(b, (offset - oa) / (ob - oa));
                hits.push((Vector::new(p.x, p.y).dot(dir), p));
            }
        }
        hits.sort_by(|x, y| x.0.total_cmp(&y.0));
        for pair in hits.chunks_exact(2) {
            let (s, e) = (pair[0].1, pair[1].1);
            if s.distance(e) < MIN_CHORD {
                continue;
            }
            let chord = if reverse { [e, s] } else { [s, e] };
            if let Ok(line) = Polyline::new(chord) {
                out.push(line);
                reverse = !reverse;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(x0: f64, y0: f64, side: f64) -> Polygon {
        Polygon::new([
            Point::new(x0, y0),
            Point::new(x0 + side, y0),
            Point::new(x0 + side, y0 + side),
            Point::new(x0, y0 + side),
        ])
        .unwrap()
    }

    #[test]
    fn hatching_square_horizontal() {
        let chords = draw_hatching(&square(0.0, 0.0, 100.0), Density::new(10.0).unwrap(), 0.0, false).unwrap();
        assert_eq!(chords.len(), 10);
        for (i, c) in chords.iter().enumerate() {
            assert!((c.length() - 100.0).abs() < 1e-6);
            assert!((c.first().y - (5.0 + 10.0 * i as f64)).abs() < 1e-9);
        }
        // Boustrophedon: directions alternate.
        assert!(chords[0].first().x < chords[0].last().x);
        assert!(chords[1].first().x > chords[1].last().x);
    }

    #[test]
    fn cross_hatching_doubles() {
        let region = square(0.0, 0.0, 100.0);
        let d = Density::new(10.0).unwrap();
        let single = draw_hatching(&region, d, 0.0, false).unwrap().len();
        let crossed = draw_hatching(&region, d, 0.0, true).unwrap().len();
        assert_eq!(crossed, 2 * single);
    }

    #[test]
    fn concave_region_splits_chords() {
        // A "U" shape: horizontal lines through both arms give two chords each.
        let u = Polygon::new([
            Point::new(0.0, 0.0),
            Point::new(30.0, 0.0),
            Point::new(30.0, 70.0),
            Point::new(70.0, 70.0),
            Point::new(70.0, 0.0),
            Point::new(100.0, 0.0),
            Point::new(100.0, 100.0),
            Point::new(0.0, 100.0),
        ])
        .unwrap();
        let chords = draw_hatching(&u, Density::new(10.0).unwrap(), 0.0, false).unwrap();
        let upper = chords.iter().filter(|c| c.first().y < 70.0).count();
        assert_eq!(upper, 14);
        assert_eq!(chords.len(), 17);
    }

    #[test]
    fn scribble_sample_count_and_determinism() {
        let region = square(100.0, 100.0, 100.0);
        let rng = RandomSource::new(9);
        let a = draw_scribbles(&region, Density::new(1.0).unwrap(), &rng).unwrap();
        let b = draw_scribbles(&region, Density::new(1.0).unwrap(), &rng).unwrap();
        assert_eq!(a, b);
        let samples = sample_inside(&region, 10, &rng).unwrap();
        assert_eq!(samples.len(), 10);
    }

    #[test]
    fn sliver_polygon_fails_sampling() {
        let sliver =
            Polygon::new([Point::new(0.0, 0.0), Point::new(1000.0, 1000.0), Point::new(1000.0, 1000.001)]).unwrap();
        let err = draw_scribbles(&sliver, Density::new(100.0).unwrap(), &RandomSource::new(1)).unwrap_err();
        assert!(matches!(err, ToolError::SamplingFailed { .. }));
    }

    #[test]
    fn greedy_order_visits_nearest() {
        let pts = vec![Point::new(0.0, 0.0), Point::new(10.0, 0.0), Point::new(1.0, 0.0), Point::new(5.0, 0.0)];
        let ordered = greedy_order(pts);
        let xs: Vec<f64> = ordered.iter().map(|p| p.x).collect();
        assert_eq!(xs, vec![0.0, 1.0, 5.0, 10.0]);
    }
}

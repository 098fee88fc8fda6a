//! Centripetal Catmull–Rom interpolation, flattened to polylines.

use super::ToolError;
use crate::geometry::{point_segment_distance, Point, Polyline};

/// Flattening tolerance in pixels.
pub const SPLINE_TOLERANCE: f64 = 0.25;

const MIN_DEPTH: u32 = 2;
const MAX_DEPTH: u32 = 18;

/// One cubic span between `p[1]` and `p[2]` with Barry–Goldman evaluation.
struct Span {
    p: [Point; 4],
    t: [f64; 4],
}

impl Span {
    fn new(p: [Point; 4]) -> Self {
        let mut t = [0.0; 4];
        for i in 1..4 {
            // alpha = 0.5: knot spacing is the square root of chord length.
            t[i] = t[i - 1] + p[i].distance(p[i - 1]).sqrt();
        }
        Self { p, t }
    }

    fn eval(&self, t: f64) -> Point {
        let lerp = |a: Point, b: Point, ta: f64, tb: f64| {
            if tb - ta <= 0.0 {
                a
            } else {
                a.lerp(b, (t - ta) / (tb - ta))
            }
        };
        let [p0, p1, p2, p3] = self.p;
        let [t0, t1, t2, t3] = self.t;
        let a1 = lerp(p0, p1, t0, t1);
        let a2 = lerp(p1, p2, t1, t2);
        let a3 = lerp(p2, p3, t2, t3);
        let b1 = lerp(a1, a2, t0, t2);
        let b2 = lerp(a2, a3, t1, t3);
        lerp(b1, b2, t1, t2)
    }

    fn flatten_into(&self, out: &mut Vec<Point>, tol: f64) {
        let (ta, tb) = (self.t[1], self.t[2]);
        self.subdivide(out, ta, self.p[1], tb, self.p[2], tol, 0);
    }

    #[allow(clippy::too_many_arguments)]
    fn subdivide(&self, out: &mut Vec<Point>, ta: f64, pa: Point, tb: f64, pb: Point, tol: f64, depth: u32) {
        let flat = depth >= MIN_DEPTH
            && [0.25, 0.5, 0.75]
                .iter()
                .all(|f| point_segment_distance(self.eval(ta + (tb - ta) * f), pa, pb) <= tol);
        if flat || depth >= MAX_DEPTH {
            out.push(pb);
            return;
        }
        let tm = 0.5 * (ta + tb);
        let pm = self.eval(tm);
        self.subdivide(out, ta, pa, tm, pm, tol, depth + 1);
        self.subdivide(out, tm, pm, tb, pb, tol, depth + 1);
    }
}

/// Flattened interpolating spline through `keypoints`.
///
/// End control points are duplicated, so the curve starts and ends exactly on
/// the first and last keypoints. Every keypoint is a vertex of the output.
pub fn draw_splines(keypoints: &[Point]) -> Result<Polyline, ToolError> {
    flatten(keypoints, SPLINE_TOLERANCE)
}

/// Same interpolation as [`draw_splines`], kept as a separate tool name.
pub fn draw_path(keypoints: &[Point]) -> Result<Polyline, ToolError> {
    draw_splines(keypoints)
}

pub(crate) fn flatten(keypoints: &[Point], tol: f64) -> Result<Polyline, ToolError> {
    if keypoints.iter().any(|p| !p.is_finite()) {
        return Err(ToolError::NonFinite);
    }
    let mut pts: Vec<Point> = keypoints.to_vec();
    pts.dedup();
    if pts.len() < 2 {
        return Err(ToolError::TooFewPoints);
    }
    let n = pts.len();
    let at = |i: isize| pts[i.clamp(0, n as isize - 1) as usize];
    let mut out = vec![pts[0]];
    for i in 0..n - 1 {
        let i = i as isize;
        let span = Span::new([at(i - 1), at(i), at(i + 1), at(i + 2)]);
        span.flatten_into(&mut out, tol);
    }
    Polyline::new(out).map_err(|_| ToolError::TooFewPoints)
}

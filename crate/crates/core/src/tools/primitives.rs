use std::f64::consts::PI;

use super::ToolError;
use crate::geometry::{Point, Polyline};

/// Maximum sagitta between a tessellated circle and the true circle.
pub const CIRCLE_CHORD_TOLERANCE: f64 = 0.25;

/// One two-point polyline per segment, order preserved.
pub fn draw_segments(segments: &[(Point, Point)]) -> Result<Vec<Polyline>, ToolError> {
    segments
        .iter()
        .enumerate()
        .map(|(index, &(a, b))| {
            if !a.is_finite() || !b.is_finite() {
                return Err(ToolError::NonFinite);
            }
            Polyline::new([a, b]).map_err(|_| ToolError::DegenerateSegment { index })
        })
        .collect()
}

/// Number of chords needed so a circle of `radius` deviates by at most
/// [`CIRCLE_CHORD_TOLERANCE`].
pub fn circle_segment_count(radius: f64) -> usize {
    let cos_half = 1.0 - CIRCLE_CHORD_TOLERANCE / radius;
    if cos_half <= -1.0 {
        return 16;
    }
    let n = (PI / cos_half.acos()).ceil() as usize;
    n.max(16)
}

/// Closed polygonal circles; the first vertex is repeated at the end.
pub fn draw_circles(circles: &[(Point, f64)]) -> Result<Vec<Polyline>, ToolError> {
    circles
        .iter()
        .enumerate()
        .map(|(index, &(center, radius))| {
            if !center.is_finite() || !radius.is_finite() {
                return Err(ToolError::NonFinite);
            }
            if radius <= 0.0 {
                return Err(ToolError::NonPositiveRadius { index, radius });
            }
            let n = circle_segment_count(radius);
            let mut pts: Vec<Point> = (0..n)
                .map(|k| {
                    let a = 2.0 * PI * k as f64 / n as f64;
                    Point::new(center.x + radius * a.cos(), center.y + radius * a.sin())
                })
                .collect();
            pts.push(pts[0]);
            Polyline::new(pts).map_err(|_| ToolError::NonPositiveRadius { index, radius })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segments_keep_order() {
        let segs = [
            (Point::new(0.0, 0.0), Point::new(100.0, 0.0)),
            (Point::new(0.0, 10.0), Point::new(50.0, 10.0)),
            (Point::new(5.0, 5.0), Point::new(5.0, 80.0)),
        ];
        let out = draw_segments(&segs).unwrap();
        assert_eq!(out.len(), 3);
        assert_eq!(out[0].length(), 100.0);
        assert_eq!(out[2].first(), Point::new(5.0, 5.0));
    }

    #[test]
    fn zero_length_segment() {
        let err = draw_segments(&[(Point::new(0.0, 0.0), Point::new(0.0, 0.0))]).unwrap_err();
        assert_eq!(err, ToolError::DegenerateSegment { index: 0 });
    }

    #[test]
    fn circle_vertices_on_radius() {
        let c = Point::new(600.0, 450.0);
        let out = draw_circles(&[(c, 50.0)]).unwrap();
        assert_eq!(out.len(), 1);
        assert!(out[0].is_closed());
        for p in out[0].points() {
            assert!((p.distance(c) - 50.0).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_radius() {
        let err = draw_circles(&[(Point::new(1.0, 1.0), 0.0)]).unwrap_err();
        assert!(matches!(err, ToolError::NonPositiveRadius { index: 0, .. }));
    }

    #[test]
    fn segment_count_floor_and_growth() {
        assert_eq!(circle_segment_count(1.0), 16);
        assert!(circle_segment_count(400.0) > circle_segment_count(50.0));
    }
}

use super::ToolError;
use crate::geometry::{Point, Polyline, Vector};

/// Retraces `stroke` `passes` times, pass `k` shifted along the local unit
/// normal by `offset · (k − (passes − 1) / 2)`. With an odd pass count the
/// middle pass is the input itself.
pub fn thicken(stroke: &Polyline, passes: usize, offset: f64) -> Result<Vec<Polyline>, ToolError> {
    if !(2..=6).contains(&passes) {
        return Err(ToolError::InvalidPassCount(passes));
    }
    if !offset.is_finite() || offset <= 0.0 {
        return Err(ToolError::InvalidParameter { name: "offset", reason: "must be positive".into() });
    }
    let normals = vertex_normals(stroke.points());
    let centre = (passes - 1) as f64 / 2.0;
    (0..passes)
        .map(|k| {
            let shift = offset * (k as f64 - centre);
            if shift == 0.0 {
                return Ok(stroke.clone());
            }
            let pts = stroke.points().iter().zip(&normals).map(|(p, n)| p.add(n.scale(shift)));
            Polyline::new(pts).map_err(|_| ToolError::TooFewPoints)
        })
        .collect()
}

/// Unit normals at each vertex: the normalized mean of the adjacent segment
/// normals, falling back to the incoming normal at hairpin turns.
fn vertex_normals(pts: &[Point]) -> Vec<Vector> {
    let seg: Vec<Vector> = pts.windows(2).map(|w| w[1].sub(w[0]).normalized().perp()).collect();
    let closed = pts.first() == pts.last();
    (0..pts.len())
        .map(|i| {
            let prev = if i > 0 {
                Some(seg[i - 1])
            } else if closed {
                seg.last().copied()
            } else {
                None
            };
            let next = if i < seg.len() {
                Some(seg[i])
            } else if closed {
                seg.first().copied()
            } else {
                None
            };
            match (prev, next) {
                (Some(a), Some(b)) => {
                    let m = Vector::new(a.x + b.x, a.y + b.y);
                    if m.length() < 1e-9 {
                        a
                    } else {
                        m.normalized()
                    }
                }
                (Some(a), None) | (None, Some(a)) => a,
                (None, None) => Vector::default(),
            }
        })
        .collect()
}

use std::f64::consts::PI;

use rand::Rng;

use super::spline::draw_splines;
use super::{RandomSource, ToolError};
use crate::geometry::{Point, Polyline, Vector};

const JITTER_STREAM: u64 = 1;
const JITTER_RANGE: (f64, f64) = (0.8, 1.2);
/// Output samples per wavelength.
const SAMPLES_PER_WAVE: f64 = 16.0;

/// Oscillation parameters for [`draw_scribbly_splines`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScribbleStyle {
    pub amplitude: f64,
    pub wavelength: f64,
}

impl Default for ScribbleStyle {
    fn default() -> Self {
        Self { amplitude: 6.0, wavelength: 14.0 }
    }
}

/// A sketchy line: the spline through `keypoints`, displaced along its normal
/// by `amplitude · j · sin(2πs/wavelength)` where `s` is arc length and `j` is
/// drawn once per half-wave from `[0.8, 1.2]`.
pub fn draw_scribbly_splines(keypoints: &[Point], style: ScribbleStyle, rng: &RandomSource) -> Result<Polyline, ToolError> {
    let ScribbleStyle { amplitude, wavelength } = style;
    if !amplitude.is_finite() || amplitude < 0.0 {
        return Err(ToolError::InvalidParameter { name: "amplitude", reason: "must be non-negative".into() });
    }
    if !wavelength.is_finite() || wavelength <= 0.0 {
        return Err(ToolError::InvalidParameter { name: "wavelength", reason: "must be positive".into() });
    }
    let center = draw_splines(keypoints)?;
    if amplitude == 0.0 {
        return Ok(center);
    }

    let pts = center.points();
    let mut cumulative = Vec::with_capacity(pts.len());
    let mut acc = 0.0;
    cumulative.push(0.0);
    for w in pts.windows(2) {
        acc += w[0].distance(w[1]);
        cumulative.push(acc);
    }
    let total = acc;

    let step = wavelength / SAMPLES_PER_WAVE;
    let steps = (total / step).ceil().max(1.0) as usize;
    let mut jitter = rng.stream(JITTER_STREAM);
    let mut factors: Vec<f64> = Vec::new();
    let mut out = Vec::with_capacity(steps + 1);
    let mut seg = 0usize;
    for k in 0..=steps {
        let s = (k as f64 * step).min(total);
        while seg + 1 < pts.len() - 1 && cumulative[seg + 1] < s {
            seg += 1;
        }
        let (a, b) = (pts[seg], pts[seg + 1]);
        let seg_len = cumulative[seg + 1] - cumulative[seg];
        let t = if seg_len > 0.0 { (s - cumulative[seg]) / seg_len } else { 0.0 };
        let c = a.lerp(b, t);
        let normal: Vector = b.sub(a).normalized().perp();
        let half_wave = (2.0 * s / wavelength).floor() as usize;
        while factors.len() <= half_wave {
            factors.push(jitter.random_range(JITTER_RANGE.0..=JITTER_RANGE.1));
        }
        let offset = amplitude * factors[half_wave] * (2.0 * PI * s / wavelength).sin();
        out.push(c.add(normal.scale(offset)));
    }
    Polyline::new(out).map_err(|_| ToolError::TooFewPoints)
}

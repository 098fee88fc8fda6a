//! Drawing tools: each converts structured arguments into polylines.
//!
//! Every randomized tool takes a [`RandomSource`], so a tool call is a pure
//! function of its arguments and seed.

mod fill;
mod primitives;
mod rng;
pub mod schema;
mod scribbly;
mod spline;
mod text;
mod thicken;

pub use fill::{clip_polyline_to_polygon, draw_hatching, draw_scribbles, hatch_offsets, MAX_SCRIBBLE_SAMPLES};
pub use primitives::{circle_segment_count, draw_circles, draw_segments, CIRCLE_CHORD_TOLERANCE};
pub use rng::{derive_call_seed, RandomSource};
pub use scribbly::{draw_scribbly_splines, ScribbleStyle};
pub use spline::{draw_path, draw_splines, SPLINE_TOLERANCE};
pub use text::{draw_text, CAP_HEIGHT_UNITS};
pub use thicken::thicken;

use crate::geometry::{signed_area, Point};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ToolError {
    #[error("segment {index} has zero length")]
    DegenerateSegment { index: usize },
    #[error("circle {index} has non-positive radius {radius}")]
    NonPositiveRadius { index: usize, radius: f64 },
    #[error("need at least two distinct keypoints")]
    TooFewPoints,
    #[error("text is empty")]
    EmptyText,
    #[error("rejection sampling gave up after {attempts} attempts")]
    SamplingFailed { attempts: usize },
    #[error("pass count {0} outside 2..=6")]
    InvalidPassCount(usize),
    #[error("invalid polygon: {0}")]
    InvalidPolygon(&'static str),
    #[error("density {0} outside (0, 100]")]
    InvalidDensity(f64),
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("non-finite coordinate")]
    NonFinite,
}

/// A simple polygon, closure implicit, interpreted with the even-odd rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(vertices: impl IntoIterator<Item = Point>) -> Result<Self, ToolError> {
        let mut v: Vec<Point> = Vec::new();
        for p in vertices {
            if !p.is_finite() {
                return Err(ToolError::NonFinite);
            }
            if v.last() != Some(&p) {
                v.push(p);
            }
        }
        while v.len() > 1 && v.first() == v.last() {
            v.pop();
        }
        if v.len() < 3 {
            return Err(ToolError::InvalidPolygon("fewer than three distinct vertices"));
        }
        if signed_area(&v).abs() <= f64::EPSILON {
            return Err(ToolError::InvalidPolygon("zero area"));
        }
        Ok(Self { vertices: v })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices).abs()
    }

    pub fn contains(&self, p: Point) -> bool {
        crate::geometry::point_in_polygon(p, &self.vertices)
    }

    pub fn bbox(&self) -> crate::geometry::BBox {
        crate::geometry::BBox::from_points(&self.vertices).expect("polygon has vertices")
    }
}

/// Fill density. Hatching reads it as lines per 100 px of perpendicular
/// extent; scribbles as sample points per 1000 px² of area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Density(f64);

impl Density {
    pub fn new(value: f64) -> Result<Self, ToolError> {
        if value > 0.0 && value <= 100.0 {
            Ok(Self(value))
        } else {
            Err(ToolError::InvalidDensity(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Distance between hatch lines.
    pub fn hatch_spacing(self) -> f64 {
        100.0 / self.0
    }
}

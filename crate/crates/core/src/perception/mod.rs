//! Camera-side processing: page rectification, contrast enhancement and the
//! rendering of simulated canvases into images.

mod clahe;
mod homography;
mod gray;
mod raster;

pub use self::clahe::{clahe, clip_ceiling, clip_histogram, tile_mapping, tile_mappings, ClaheParams, Mapping, TileGrid};
pub use self::homography::{solve_homography, warp, Homography};
pub use self::gray::GrayImage;
pub use self::raster::{render_canvas, render_canvas_png, render_polylines, RENDER_LINE_WIDTH};

use crate::geometry::Point;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PerceptionError {
    #[error("corner configuration is degenerate")]
    DegenerateConfiguration,
    #[error("image {width}x{height} is smaller than the {}x{} tile grid", tiles.0, tiles.1)]
    ImageTooSmall { width: usize, height: usize, tiles: (usize, usize) },
    #[error("expected {expected} pixels, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },
    #[error("could not decode image: {0}")]
    Decode(String),
    #[error("corner file line {line}: {reason}")]
    CornerFile { line: usize, reason: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

/// Parses a corner file: four non-empty lines of `x y`, ordered top-left,
/// top-right, bottom-right, bottom-left. Lines starting with `#` are
/// ignored.
pub fn parse_corners(text: &str) -> Result<[Point; 4], PerceptionError> {
    let mut pts = Vec::with_capacity(4);
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |reason: &str| PerceptionError::CornerFile { line: i + 1, reason: reason.into() };
        let nums: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| err("not a number")))
            .collect::<Result<_, _>>()?;
        if nums.len() != 2 || !nums.iter().all(|v| v.is_finite()) {
            return Err(err("expected two finite numbers"));
        }
        if pts.len() == 4 {
            return Err(err("more than four corners"));
        }
        pts.push(Point::new(nums[0], nums[1]));
    }
    pts.try_into().map_err(|v: Vec<Point>| PerceptionError::CornerFile {
        line: text.lines().count(),
        reason: format!("expected four corners, found {}", v.len()),
    })
}

/// Maps the photographed page with the given corners onto an
/// `out_w`×`out_h` canvas image and enhances faint marks.
pub fn rectify(
    photo: &GrayImage,
    corners: &[Point; 4],
    out_w: usize,
    out_h: usize,
    params: ClaheParams,
) -> Result<GrayImage, PerceptionError> {
    let (w, h) = ((out_w - 1) as f64, (out_h - 1) as f64);
    let target = [Point::new(0.0, 0.0), Point::new(w, 0.0), Point::new(w, h), Point::new(0.0, h)];
    let hmat = solve_homography(corners, &target)?;
    clahe(&warp(photo, &hmat, out_w, out_h)?, params)
}

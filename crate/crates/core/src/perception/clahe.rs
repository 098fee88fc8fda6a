//! Contrast-limited adaptive histogram equalization.

use super::{GrayImage, PerceptionError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClaheParams {
    /// Tile grid as (columns, rows).
    pub tiles: (usize, usize),
    /// Histogram bins are capped at `clip_limit × tile pixels / 256`.
    /// `f64::INFINITY` disables clipping.
    pub clip_limit: f64,
}

impl Default for ClaheParams {
    fn default() -> Self {
        Self { tiles: (8, 8), clip_limit: 2.0 }
    }
}

pub type Mapping = [u8; 256];

/// Per-tile equalization mappings and the tile layout they belong to.
#[derive(Debug, Clone, PartialEq)]
pub struct TileGrid {
    pub cols: usize,
    pub rows: usize,
    /// Tile boundaries in pixels, `cols + 1` and `rows + 1` entries.
    pub x_bounds: Vec<usize>,
    pub y_bounds: Vec<usize>,
    /// Row-major, `rows × cols` mappings.
    pub mappings: Vec<Mapping>,
}

impl TileGrid {
    pub fn mapping(&self, col: usize, row: usize) -> &Mapping {
        &self.mappings[row * self.cols + col]
    }

    fn centers(bounds: &[usize]) -> Vec<f64> {
        bounds.windows(2).map(|w| (w[0] + w[1]) as f64 / 2.0 - 0.5).collect()
    }
}

/// Bin ceiling for a tile of `pixels` pixels; never below one count.
pub fn clip_ceiling(clip_limit: f64, pixels: usize) -> f64 {
    (clip_limit * pixels as f64 / 256.0).max(1.0)
}

/// Caps every bin at `ceiling`, returning the clipped histogram and the total
/// excess removed.
pub fn clip_histogram(hist: &[f64; 256], ceiling: f64) -> ([f64; 256], f64) {
    let mut out = *hist;
    let mut excess = 0.0;
    for bin in out.iter_mut() {
        if *bin > ceiling {
            excess += *bin - ceiling;
            *bin = ceiling;
        }
    }
    (out, excess)
}

/// Equalization mapping for one tile's histogram. A tile with a single
/// occupied bin has no contrast to stretch and maps to the identity.
pub fn tile_mapping(hist: &[f64; 256], clip_limit: f64) -> Mapping {
    let total: f64 = hist.iter().sum();
    let occupied = hist.iter().filter(|&&c| c > 0.0).count();
    if occupied <= 1 || total <= 0.0 {
        return std::array::from_fn(|v| v as u8);
    }
    let (mut clipped, excess) = clip_histogram(hist, clip_ceiling(clip_limit, total as usize));
    let share = excess / 256.0;
    for bin in clipped.iter_mut() {
        *bin += share;
    }
    let mut cdf = 0.0;
    let mut map = [0u8; 256];
    for (v, bin) in clipped.iter().enumerate() {
        cdf += bin;
        map[v] = (255.0 * cdf / total).round().clamp(0.0, 255.0) as u8;
    }
    map
}

fn bounds(len: usize, parts: usize) -> Vec<usize> {
    (0..=parts).map(|i| i * len / parts).collect()
}

/// Histograms every tile and computes its mapping.
pub fn tile_mappings(image: &GrayImage, params: ClaheParams) -> Result<TileGrid, PerceptionError> {
    let (cols, rows) = params.tiles;
    if cols == 0 || rows == 0 || !(params.clip_limit > 0.0) {
        return Err(PerceptionError::InvalidParameter("tile grid and clip limit must be positive"));
    }
    if image.width() < cols || image.height() < rows {
        return Err(PerceptionError::ImageTooSmall {
            width: image.width(),
            height: image.height(),
            tiles: params.tiles,
        });
    }
    let x_bounds = bounds(image.width(), cols);
    let y_bounds = bounds(image.height(), rows);
    let mut mappings = Vec::with_capacity(cols * rows);
    for r in 0..rows {
        for c in 0..cols {
            let mut hist = [0.0; 256];
            for y in y_bounds[r]..y_bounds[r + 1] {
                for x in x_bounds[c]..x_bounds[c + 1] {
                    hist[image.get(x, y) as usize] += 1.0;
                }
            }
            mappings.push(tile_mapping(&hist, params.clip_limit));
        }
    }
    Ok(TileGrid { cols, rows, x_bounds, y_bounds, mappings })
}

/// Neighbouring tile indices and the weight of the second one for a pixel
/// coordinate, given tile centres.
fn neighbours(centers: &[f64], p: f64) -> (usize, usize, f64) {
    let last = centers.len() - 1;
    if p <= centers[0] {
        return (0, 0, 0.0);
    }
    if p >= centers[last] {
        return (last, last, 0.0);
    }
    let i = centers.iter().rposition(|&c| c <= p).unwrap_or(0).min(last - 1);
    (i, i + 1, (p - centers[i]) / (centers[i + 1] - centers[i]))
}

/// Applies CLAHE: tile mappings blended bilinearly between tile centres.
pub fn clahe(image: &GrayImage, params: ClaheParams) -> Result<GrayImage, PerceptionError> {
    let grid = tile_mappings(image, params)?;
    let cx = TileGrid::centers(&grid.x_bounds);
    let cy = TileGrid::centers(&grid.y_bounds);
    let xs: Vec<(usize, usize, f64)> = (0..image.width()).map(|x| neighbours(&cx, x as f64)).collect();
    Ok(GrayImage::from_fn(image.width(), image.height(), |x, y| {
        let (r0, r1, fy) = neighbours(&cy, y as f64);
        let (c0, c1, fx) = xs[x];
        let v = image.get(x, y) as usize;
        let m = |c, r| grid.mapping(c, r)[v] as f64;
        let top = m(c0, r0) * (1.0 - fx) + m(c1, r0) * fx;
        let bottom = m(c0, r1) * (1.0 - fx) + m(c1, r1) * fx;
        (top * (1.0 - fy) + bottom * fy).round().clamp(0.0, 255.0) as u8
    }))
}

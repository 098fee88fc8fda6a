use super::GrayImage;
use crate::canvas::CanvasState;
use crate::geometry::{point_segment_distance, Point, Polyline};

/// Stroke width of rendered lines in pixels.
pub const RENDER_LINE_WIDTH: f64 = 2.0;

/// Renders the canvas as black strokes on white paper at one image pixel per
/// canvas pixel, with a one-pixel anti-aliasing ramp.
pub fn render_canvas(canvas: &CanvasState) -> GrayImage {
    let c = &canvas.constraints;
    render_polylines(canvas.polylines(), c.width.ceil() as usize, c.height.ceil() as usize)
}

/// Renders polylines given in pixel coordinates onto a white `width`×`height`
/// image.
pub fn render_polylines<'a>(lines: impl IntoIterator<Item = &'a Polyline>, width: usize, height: usize) -> GrayImage {
    let mut img = GrayImage::new(width, height, 255);
    let half = RENDER_LINE_WIDTH / 2.0;
    for line in lines {
        for (a, b) in line.segments() {
            draw_segment(&mut img, a, b, half);
        }
    }
    img
}

/// [`render_canvas`] encoded as PNG.
pub fn render_canvas_png(canvas: &CanvasState) -> Vec<u8> {
    render_canvas(canvas).to_png()
}

fn draw_segment(img: &mut GrayImage, a: Point, b: Point, half: f64) {
    let reach = half + 1.0;
    let x0 = (a.x.min(b.x) - reach).floor().max(0.0) as usize;
    let y0 = (a.y.min(b.y) - reach).floor().max(0.0) as usize;
    let x1 = ((a.x.max(b.x) + reach).ceil().max(0.0) as usize).min(img.width().saturating_sub(1));
    let y1 = ((a.y.max(b.y) + reach).ceil().max(0.0) as usize).min(img.height().saturating_sub(1));
    if x0 > x1 || y0 > y1 {
        return;
    }
    // Long diagonal segments touch few pixels of their bounding box, so walk
    // rows and only visit the band around the segment.
    let dy = b.y - a.y;
    for y in y0..=y1 {
        let (lo, hi) = if dy.abs() < 1e-9 {
            (x0, x1)
        } else {
            let t0 = ((y as f64 - reach) - a.y) / dy;
            let t1 = ((y as f64 + reach) - a.y) / dy;
            let (t0, t1) = (t0.min(t1).clamp(0.0, 1.0), t0.max(t1).clamp(0.0, 1.0));
            let xa = a.x + (b.x - a.x) * t0;
            let xb = a.x + (b.x - a.x) * t1;
            let lo = (xa.min(xb) - reach).floor().max(x0 as f64) as usize;
            let hi = ((xa.max(xb) + reach).ceil() as usize).min(x1);
            (lo, hi)
        };
        for x in lo..=hi {
            let d = point_segment_distance(Point::new(x as f64, y as f64), a, b);
            let coverage = (half + 0.5 - d).clamp(0.0, 1.0);
            if coverage > 0.0 {
                let v = (255.0 * (1.0 - coverage)).round() as u8;
                if v < img.get(x, y) {
                    img.set(x, y, v);
                }
            }
        }
    }
}

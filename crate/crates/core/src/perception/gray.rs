use std::io::Cursor;

use image::{ImageBuffer, ImageFormat, Luma};

use super::PerceptionError;

/// 8-bit grayscale raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, fill: u8) -> Self {
        Self { width, height, pixels: vec![fill; width * height] }
    }

    pub fn from_raw(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, PerceptionError> {
        if pixels.len() != width * height {
            return Err(PerceptionError::SizeMismatch { expected: width * height, actual: pixels.len() });
        }
        Ok(Self { width, height, pixels })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> u8) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self { width, height, pixels }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.pixels[y * self.width + x] = v;
    }

    /// Bilinear sample at a real-valued position, pixel centres at integer
    /// coordinates. Positions outside the image return `None`.
    pub fn sample_bilinear(&self, x: f64, y: f64) -> Option<f64> {
        let max_x = (self.width - 1) as f64;
        let max_y = (self.height - 1) as f64;
        if !(x >= 0.0 && y >= 0.0 && x <= max_x && y <= max_y) {
            return None;
        }
        let x0 = (x.floor() as usize).min(self.width.saturating_sub(2));
        let y0 = (y.floor() as usize).min(self.height.saturating_sub(2));
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let fx = x - x0 as f64;
        let fy = y - y0 as f64;
        let p = |xx, yy| self.get(xx, yy) as f64;
        let top = p(x0, y0) * (1.0 - fx) + p(x1, y0) * fx;
        let bottom = p(x0, y1) * (1.0 - fx) + p(x1, y1) * fx;
        Some(top * (1.0 - fy) + bottom * fy)
    }

    pub fn min_max(&self) -> (u8, u8) {
        self.pixels.iter().fold((u8::MAX, u8::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    pub fn to_png(&self) -> Vec<u8> {
        let buf: ImageBuffer<Luma<u8>, &[u8]> =
            ImageBuffer::from_raw(self.width as u32, self.height as u32, self.pixels.as_slice())
                .expect("dimensions match");
        let mut out = Cursor::new(Vec::new());
        buf.write_to(&mut out, ImageFormat::Png).expect("in-memory PNG encoding");
        out.into_inner()
    }

    /// Decodes a PNG, converting colour images to luminance.
    pub fn from_png(bytes: &[u8]) -> Result<Self, PerceptionError> {
        let img = image::load_from_memory_with_format(bytes, ImageFormat::Png)
            .map_err(|e| PerceptionError::Decode(e.to_string()))?
            .to_luma8();
        let (w, h) = img.dimensions();
        Ok(Self { width: w as usize, height: h as usize, pixels: img.into_raw() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn png_round_trip() {
        let img = GrayImage::from_fn(7, 5, |x, y| (x * 30 + y) as u8);
        assert_eq!(GrayImage::from_png(&img.to_png()).unwrap(), img);
        assert!(GrayImage::from_png(b"not a png").is_err());
    }

    #[test]
    fn bilinear_midpoints() {
        let img = GrayImage::from_raw(2, 2, vec![0, 100, 100, 200]).unwrap();
        assert_eq!(img.sample_bilinear(0.5, 0.5), Some(100.0));
        assert_eq!(img.sample_bilinear(1.0, 1.0), Some(200.0));
        assert_eq!(img.sample_bilinear(1.01, 0.0), None);
    }
}

use nalgebra::{Matrix3, SMatrix, SVector, Vector3};

use super::{GrayImage, PerceptionError};
use crate::geometry::Point;

/// Projective map of the plane, normalized so `h33 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homography {
    m: Matrix3<f64>,
}

impl Homography {
    pub fn identity() -> Self {
        Self { m: Matrix3::identity() }
    }

    pub fn translation(dx: f64, dy: f64) -> Self {
        Self { m: Matrix3::new(1.0, 0.0, dx, 0.0, 1.0, dy, 0.0, 0.0, 1.0) }
    }

    pub fn from_matrix(m: [[f64; 3]; 3]) -> Result<Self, PerceptionError> {
        let m = Matrix3::from_fn(|r, c| m[r][c]);
        Self::normalized(m)
    }

    fn normalized(m: Matrix3<f64>) -> Result<Self, PerceptionError> {
        let h33 = m[(2, 2)];
        if h33.abs() < 1e-15 || !m.iter().all(|v| v.is_finite()) {
            return Err(PerceptionError::DegenerateConfiguration);
        }
        let m = m / h33;
        if m.determinant().abs() <= 1e-12 {
            return Err(PerceptionError::DegenerateConfiguration);
        }
        Ok(Self { m })
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        let m = &self.m;
        [[m[(0, 0)], m[(0, 1)], m[(0, 2)]], [m[(1, 0)], m[(1, 1)], m[(1, 2)]], [m[(2, 0)], m[(2, 1)], m[(2, 2)]]]
    }

    pub fn apply(&self, p: Point) -> Point {
        let v = self.m * Vector3::new(p.x, p.y, 1.0);
        Point::new(v.x / v.z, v.y / v.z)
    }

    pub fn inverse(&self) -> Result<Self, PerceptionError> {
        let inv = self.m.try_inverse().ok_or(PerceptionError::DegenerateConfiguration)?;
        Self::normalized(inv)
    }

    pub fn compose(&self, then: &Homography) -> Result<Self, PerceptionError> {
        Self::normalized(then.m * self.m)
    }
}

fn collinear(a: Point, b: Point, c: Point) -> bool {
    let ab = b.sub(a);
    let ac = c.sub(a);
    let scale = ab.length().max(ac.length()).max(1e-300);
    ab.cross(ac).abs() / (scale * scale) < 1e-9
}

/// Similarity transform moving the centroid to the origin with mean
/// distance √2, which keeps the linear system well conditioned.
fn normalizer(pts: &[Point; 4]) -> Matrix3<f64> {
    let cx = pts.iter().map(|p| p.x).sum::<f64>() / 4.0;
    let cy = pts.iter().map(|p| p.y).sum::<f64>() / 4.0;
    let mean = pts.iter().map(|p| ((p.x - cx).powi(2) + (p.y - cy).powi(2)).sqrt()).sum::<f64>() / 4.0;
    let s = std::f64::consts::SQRT_2 / mean;
    Matrix3::new(s, 0.0, -s * cx, 0.0, s, -s * cy, 0.0, 0.0, 1.0)
}

/// The homography taking each `src[i]` to `dst[i]`, by direct linear
/// transform on normalized coordinates.
pub fn solve_homography(src: &[Point; 4], dst: &[Point; 4]) -> Result<Homography, PerceptionError> {
    for set in [src, dst] {
        if !set.iter().all(|p| p.is_finite()) {
            return Err(PerceptionError::DegenerateConfiguration);
        }
        for skip in 0..4 {
            let tri: Vec<Point> = (0..4).filter(|&i| i != skip).map(|i| set[i]).collect();
            if collinear(tri[0], tri[1], tri[2]) {
                return Err(PerceptionError::DegenerateConfiguration);
            }
        }
    }
    let ts = normalizer(src);
    let td = normalizer(dst);
    let norm = |t: &Matrix3<f64>, p: Point| {
        let v = t * Vector3::new(p.x, p.y, 1.0);
        (v.x, v.y)
    };
    let mut a = SMatrix::<f64, 8, 8>::zeros();
    let mut b = SVector::<f64, 8>::zeros();
    for i in 0..4 {
        let (x, y) = norm(&ts, src[i]);
        let (u, v) = norm(&td, dst[i]);
        let r = 2 * i;
        a.set_row(r, &SMatrix::<f64, 1, 8>::from_row_slice(&[x, y, 1.0, 0.0, 0.0, 0.0, -u * x, -u * y]));
        a.set_row(r + 1, &SMatrix::<f64, 1, 8>::from_row_slice(&[0.0, 0.0, 0.0, x, y, 1.0, -v * x, -v * y]));
        b[r] = u;
        b[r + 1] = v;
    }
    let h = a.lu().solve(&b).ok_or(PerceptionError::DegenerateConfiguration)?;
    let hn = Matrix3::new(h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], 1.0);
    let td_inv = td.try_inverse().ok_or(PerceptionError::DegenerateConfiguration)?;
    Homography::normalized(td_inv * hn * ts)
}

/// Resamples `image` through `h` (which maps input coordinates to output
/// coordinates) into an `out_w`×`out_h` image. Each output pixel is pulled
/// back through the inverse map and sampled bilinearly; samples that fall
/// outside the input are white.
pub fn warp(image: &GrayImage, h: &Homography, out_w: usize, out_h: usize) -> Result<GrayImage, PerceptionError> {
    let inv = h.inverse()?;
    Ok(GrayImage::from_fn(out_w, out_h, |x, y| {
        let p = inv.apply(Point::new(x as f64, y as f64));
        match image.sample_bilinear(p.x, p.y) {
            Some(v) => v.round().clamp(0.0, 255.0) as u8,
            None => 255,
        }
    }))
}

use serde::{Deserialize, Serialize};

use super::image::RasterImage;
use crate::error::{Error, Result};
use crate::linalg::{det3, inv3, least_squares, mul3, Mat3};
use crate::scalar::Scalar;

/// Planar projective transform, scaled so the bottom-right entry is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Homography<T> {
    matrix: Mat3<T>,
}

pub type PointPair<T> = ((T, T), (T, T));

impl<T: Scalar> Homography<T> {
    pub fn from_matrix(matrix: Mat3<T>) -> Result<Self> {
        let h22 = matrix[2][2];
        if h22 == T::zero() || !h22.is_finite() {
            return Err(Error::Estimation("bottom-right entry must be non-zero to normalize".into()));
        }
        let mut m = matrix;
        m.iter_mut().flatten().for_each(|v| *v /= h22);
        if !(det3(&m).abs() > T::lit(1e-12)) {
            return Err(Error::Estimation("homography is singular".into()));
        }
        Ok(Self { matrix: m })
    }

    pub fn identity() -> Self {
        let (o, z) = (T::one(), T::zero());
        Self { matrix: [[o, z, z], [z, o, z], [z, z, o]] }
    }

    pub fn translation(dx: T, dy: T) -> Self {
        let (o, z) = (T::one(), T::zero());
        Self { matrix: [[o, z, dx], [z, o, dy], [z, z, o]] }
    }

    /// Rotation by `angle` radians about `(cx, cy)` (counter-clockwise in a y-up frame).
    pub fn rotation_about(angle: T, cx: T, cy: T) -> Self {
        let (s, c) = angle.sin_cos();
        let (o, z) = (T::one(), T::zero());
        Self { matrix: [[c, -s, cx - c * cx + s * cy], [s, c, cy - s * cx - c * cy], [z, z, o]] }
    }

    pub fn matrix(&self) -> &Mat3<T> {
        &self.matrix
    }

    /// `None` when the point maps to infinity.
    pub fn apply(&self, (x, y): (T, T)) -> Option<(T, T)> {
        let m = &self.matrix;
        let w = m[2][0] * x + m[2][1] * y + m[2][2];
        if w == T::zero() {
            return None;
        }
        Some(((m[0][0] * x + m[0][1] * y + m[0][2]) / w, (m[1][0] * x + m[1][1] * y + m[1][2]) / w))
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv = inv3(&self.matrix).ok_or_else(|| Error::Estimation("homography is singular".into()))?;
        Self::from_matrix(inv)
    }

    pub fn compose(&self, then: &Homography<T>) -> Result<Self> {
        Self::from_matrix(mul3(&then.matrix, &self.matrix))
    }
}

/// Similarity that moves the centroid to the origin and the mean distance to √2.
fn conditioning<T: Scalar>(points: &[(T, T)]) -> Result<Mat3<T>> {
    let n = T::from_usize_lossy(points.len());
    let cx = points.iter().map(|p| p.0).sum::<T>() / n;
    let cy = points.iter().map(|p| p.1).sum::<T>() / n;
    let mean_dist = points.iter().map(|p| ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt()).sum::<T>() / n;
    if !(mean_dist > T::zero()) {
        return Err(Error::Estimation("all points coincide".into()));
    }
    let s = T::lit(std::f64::consts::SQRT_2) / mean_dist;
    let (o, z) = (T::one(), T::zero());
    Ok([[s, z, -s * cx], [z, s, -s * cy], [z, z, o]])
}

fn collinear<T: Scalar>(a: (T, T), b: (T, T), c: (T, T), scale: T) -> bool {
    let cross = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
    cross.abs() <= T::lit(1e-9) * scale * scale
}

/// Normalized direct linear transform with `h₂₂ = 1`, minimizing algebraic error over
/// all correspondences `(source, target)`.
pub fn estimate_homography<T: Scalar>(pairs: &[PointPair<T>]) -> Result<Homography<T>> {
    if pairs.len() < 4 {
        return Err(Error::Estimation(format!("need at least 4 correspondences, got {}", pairs.len())));
    }
    let src: Vec<(T, T)> = pairs.iter().map(|p| p.0).collect();
    let dst: Vec<(T, T)> = pairs.iter().map(|p| p.1).collect();
    if pairs.len() == 4 {
        let extent = src.iter().fold(T::zero(), |m, p| m.max(p.0.abs()).max(p.1.abs())).max(T::one());
        for i in 0..4 {
            for j in i + 1..4 {
                for k in j + 1..4 {
                    if collinear(src[i], src[j], src[k], extent) {
                        return Err(Error::Estimation(format!("source points {i}, {j}, {k} are collinear")));
                    }
                }
            }
        }
    }
    let ts = conditioning(&src)?;
    let td = conditioning(&dst)?;
    let norm = |m: &Mat3<T>, p: (T, T)| (m[0][0] * p.0 + m[0][2], m[1][1] * p.1 + m[1][2]);

    let rows = 2 * pairs.len();
    let mut a = Vec::with_capacity(rows * 8);
    let mut b = Vec::with_capacity(rows);
    let (o, z) = (T::one(), T::zero());
    for (s, d) in src.iter().zip(&dst) {
        let (x, y) = norm(&ts, *s);
        let (u, v) = norm(&td, *d);
        a.extend_from_slice(&[x, y, o, z, z, z, -u * x, -u * y]);
        b.push(u);
        a.extend_from_slice(&[z, z, z, x, y, o, -v * x, -v * y]);
        b.push(v);
    }
    let h = least_squares(&a, rows, 8, &b).map_err(|e| Error::Estimation(format!("degenerate configuration: {e}")))?;
    let hn = [[h[0], h[1], h[2]], [h[3], h[4], h[5]], [h[6], h[7], o]];
    let td_inv = inv3(&td).ok_or_else(|| Error::Estimation("degenerate target points".into()))?;
    Homography::from_matrix(mul3(&td_inv, &mul3(&hn, &ts)))
}

/// Resamples `img` through `h` (source → output) by inverse mapping with
/// nearest-neighbour lookup. Output pixels whose preimage falls outside the source are
/// black.
pub fn warp_image<T: Scalar>(img: &RasterImage, h: &Homography<T>) -> Result<RasterImage> {
    let inv = h.inverse()?;
    let (w, ht) = (img.width(), img.height());
    let mut out = RasterImage::black(w, ht)?;
    let half = T::lit(0.5);
    for y in 0..ht {
        for x in 0..w {
            let Some((sx, sy)) = inv.apply((T::from_usize_lossy(x), T::from_usize_lossy(y))) else {
                continue;
            };
            // round half up, matching floor(v + 0.5)
            let (fx, fy) = ((sx + half).floor(), (sy + half).floor());
            if fx >= T::zero() && fy >= T::zero() && fx < T::from_usize_lossy(w) && fy < T::from_usize_lossy(ht) {
                let (ix, iy) = (fx.to_usize().unwrap_or(usize::MAX), fy.to_usize().unwrap_or(usize::MAX));
                if ix < w && iy < ht {
                    out.set(x, y, img.get(ix, iy));
                }
            }
        }
    }
    Ok(out)
}

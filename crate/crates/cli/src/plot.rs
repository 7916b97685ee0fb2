//! Static PNG renderings. No text is drawn; the matching CSVs carry the numbers.

use std::path::Path;

use anyhow::{Context, Result};
use image::{Rgb, RgbImage};

const VIRIDIS: [[f64; 3]; 5] =
    [[68.0, 1.0, 84.0], [59.0, 82.0, 139.0], [33.0, 145.0, 140.0], [94.0, 201.0, 98.0], [253.0, 231.0, 37.0]];

fn colormap(v: f64) -> Rgb<u8> {
    let x = v.clamp(0.0, 1.0) * (VIRIDIS.len() - 1) as f64;
    let i = (x.floor() as usize).min(VIRIDIS.len() - 2);
    let f = x - i as f64;
    let c = |k: usize| (VIRIDIS[i][k] + f * (VIRIDIS[i + 1][k] - VIRIDIS[i][k])).round() as u8;
    Rgb([c(0), c(1), c(2)])
}

/// Heatmap of a row-major `rows × cols` matrix with row 0 at the bottom. The cell at
/// `mark` gets a white outline.
pub fn heatmap(path: &Path, values: &[f64], rows: usize, cols: usize, mark: (usize, usize)) -> Result<()> {
    const CELL: u32 = 24;
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut img = RgbImage::new(cols as u32 * CELL, rows as u32 * CELL);
    for (i, &v) in values.iter().enumerate() {
        let (r, c) = (i / cols, i % cols);
        let y0 = (rows - 1 - r) as u32 * CELL;
        let x0 = c as u32 * CELL;
        let marked = (r, c) == mark;
        for dy in 0..CELL {
            for dx in 0..CELL {
                let edge = dx < 2 || dy < 2 || dx >= CELL - 2 || dy >= CELL - 2;
                let px = if marked && edge { Rgb([255, 255, 255]) } else { colormap((v - lo) / span) };
                img.put_pixel(x0 + dx, y0 + dy, px);
            }
        }
    }
    img.save(path).with_context(|| format!("writing {}", path.display()))
}

fn line(img: &mut RgbImage, (x0, y0): (i64, i64), (x1, y1): (i64, i64), color: Rgb<u8>) {
    let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
    let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
    let (mut x, mut y, mut err) = (x0, y0, dx + dy);
    loop {
        if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
            img.put_pixel(x as u32, y as u32, color);
        }
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// Line chart of one or more series against their index, sharing a y range.
pub fn line_chart(path: &Path, series: &[(&[f64], [u8; 3])]) -> Result<()> {
    const W: u32 = 640;
    const H: u32 = 360;
    const M: i64 = 30;
    let mut img = RgbImage::from_pixel(W, H, Rgb([255, 255, 255]));
    let finite = series.iter().flat_map(|(s, _)| s.iter().copied()).filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let axis = Rgb([120, 120, 120]);
    let (left, right, top, bottom) = (M, W as i64 - M, M, H as i64 - M);
    line(&mut img, (left, bottom), (right, bottom), axis);
    line(&mut img, (left, bottom), (left, top), axis);
    for (s, color) in series {
        let n = s.len().max(2) - 1;
        let pt = |i: usize, v: f64| {
            let x = left + ((right - left) as f64 * i as f64 / n as f64).round() as i64;
            let y = bottom - ((bottom - top) as f64 * (v - lo) / span).round() as i64;
            (x, y)
        };
        for (i, w) in s.windows(2).enumerate() {
            if w[0].is_finite() && w[1].is_finite() {
                line(&mut img, pt(i, w[0]), pt(i + 1, w[1]), Rgb(*color));
            }
        }
    }
    img.save(path).with_context(|| format!("writing {}", path.display()))
}

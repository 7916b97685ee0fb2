use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::image::{RasterImage, Rgb};
use crate::error::{Error, Result};

/// Synthetic top-down frames of a single growing plant disc on soil.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlantScene {
    pub width: usize,
    pub height: usize,
    pub center: (f64, f64),
    pub background: Rgb,
    pub plant: Rgb,
    /// Per-channel uniform noise amplitude.
    pub noise: u8,
    pub seed: u64,
}

impl Default for PlantScene {
    fn default() -> Self {
        Self {
            width: 96,
            height: 96,
            center: (47.5, 47.5),
            background: [70, 50, 35],
            plant: [60, 200, 70],
            noise: 12,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticFrame {
    pub image: RasterImage,
    pub radius: f64,
    /// Pixels whose centre lies inside the disc.
    pub disc_pixels: usize,
}

fn jitter(c: u8, noise: u8, rng: &mut ChaCha8Rng) -> u8 {
    if noise == 0 {
        return c;
    }
    let n = noise as i16;
    (c as i16 + rng.gen_range(-n..=n)).clamp(0, 255) as u8
}

/// One frame per radius (pixels). Noise is drawn from a single stream seeded once.
pub fn synth_plant_sequence(scene: &PlantScene, radii: &[f64]) -> Result<Vec<SyntheticFrame>> {
    if scene.width == 0 || scene.height == 0 {
        return Err(Error::Validation("scene must be non-empty".into()));
    }
    let (cx, cy) = scene.center;
    let (w, h) = ((scene.width - 1) as f64, (scene.height - 1) as f64);
    for &r in radii {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Validation(format!("radius must be positive, got {r}")));
        }
        if cx - r < 0.0 || cy - r < 0.0 || cx + r > w || cy + r > h {
            return Err(Error::Validation(format!("disc of radius {r} at ({cx}, {cy}) leaves the frame")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(scene.seed);
    radii
        .iter()
        .map(|&r| {
            let mut pixels = Vec::with_capacity(scene.width * scene.height);
            let mut disc = 0;
            for y in 0..scene.height {
                for x in 0..scene.width {
                    let inside = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2) <= r * r;
                    let base = if inside {
                        disc += 1;
                        scene.plant
                    } else {
                        scene.background
                    };
                    pixels.push(base.map(|c| jitter(c, scene.noise, &mut rng)));
                }
            }
            Ok(SyntheticFrame {
                image: RasterImage::new(scene.width, scene.height, pixels)?,
                radius: r,
                disc_pixels: disc,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_radii() {
        let s = PlantScene::default();
        assert!(synth_plant_sequence(&s, &[0.0]).is_err());
        assert!(synth_plant_sequence(&s, &[-1.0]).is_err());
        assert!(synth_plant_sequence(&s, &[48.0]).is_err());
    }

    #[test]
    fn disc_pixel_count_tracks_area() {
        let s = PlantScene { noise: 0, ..Default::default() };
        let f = synth_plant_sequence(&s, &[10.0, 20.0]).unwrap();
        for fr in &f {
            let area = std::f64::consts::PI * fr.radius * fr.radius;
            assert!((fr.disc_pixels as f64 - area).abs() / area < 0.05);
            let green = fr.image.pixels().iter().filter(|p| **p == s.plant).count();
            assert_eq!(green, fr.disc_pixels);
        }
    }

    #[test]
    fn seeded() {
        let s = PlantScene::default();
        assert_eq!(synth_plant_sequence(&s, &[5.0]).unwrap(), synth_plant_sequence(&s, &[5.0]).unwrap());
    }
}

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::image::{brightness, RasterImage};
use super::kmeans::{kmeans, KMeansConfig};
use super::threshold::{fit_threshold_rule, ThresholdRule};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SegmentConfig {
    pub kmeans: KMeansConfig,
    /// Clusters darker than this mean luma are never plant.
    pub brightness_floor: f64,
    /// Centimetres per pixel edge in the rectified image.
    pub cm_per_pixel: Option<f64>,
}

impl Default for SegmentConfig {
    fn default() -> Self {
        Self { kmeans: KMeansConfig::default(), brightness_floor: 0.35, cm_per_pixel: None }
    }
}

/// Mean raw features of one cluster.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ClusterSummary<T> {
    pub id: usize,
    pub size: usize,
    pub brightness: T,
    pub pot_distance: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotClusters<T> {
    pub pot: usize,
    /// Pixel indices (row-major) belonging to this pot's region.
    pub pixels: Vec<usize>,
    /// Cluster id of each entry in `pixels`.
    pub labels: Vec<usize>,
    pub clusters: Vec<ClusterSummary<T>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(bound = "T: Scalar")]
pub struct PotArea<T> {
    pub pot: usize,
    pub plant_pixels: usize,
    pub area_cm2: T,
    pub plant_clusters: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation<T> {
    pub width: usize,
    pub height: usize,
    /// 0 for background, `pot + 1` for plant pixels.
    pub mask: Vec<u16>,
    pub pots: Vec<PotArea<T>>,
    pub clusters: Vec<PotClusters<T>>,
}

fn nearest_pot<T: Scalar>(x: T, y: T, pots: &[(T, T)]) -> (usize, T) {
    let mut best = (0, T::infinity());
    for (i, &(px, py)) in pots.iter().enumerate() {
        let d = ((x - px).powi(2) + (y - py).powi(2)).sqrt();
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

fn min_max<T: Scalar>(v: T, lo: T, hi: T) -> T {
    if hi > lo {
        (v - lo) / (hi - lo)
    } else {
        T::zero()
    }
}

/// Splits the image into nearest-pot regions and clusters each region on
/// (brightness, distance to pot centre), both min-max scaled over the whole image.
pub fn cluster_pots<T: Scalar>(
    img: &RasterImage,
    pots: &[(T, T)],
    config: &KMeansConfig,
) -> Result<Vec<PotClusters<T>>> {
    if pots.is_empty() {
        return Err(Error::Segmentation("at least one pot centre is required".into()));
    }
    if pots.len() > u16::MAX as usize - 1 {
        return Err(Error::Segmentation("too many pots".into()));
    }
    let mut regions: Vec<(Vec<usize>, Vec<[T; 2]>)> = vec![(Vec::new(), Vec::new()); pots.len()];
    for y in 0..img.height() {
        for x in 0..img.width() {
            let (pot, d) = nearest_pot(T::from_usize_lossy(x), T::from_usize_lossy(y), pots);
            let idx = y * img.width() + x;
            regions[pot].0.push(idx);
            regions[pot].1.push([brightness(img.pixels()[idx]), d]);
        }
    }
    let mut lo = [T::infinity(); 2];
    let mut hi = [T::neg_infinity(); 2];
    for p in regions.iter().flat_map(|r| &r.1) {
        for j in 0..2 {
            lo[j] = lo[j].min(p[j]);
            hi[j] = hi[j].max(p[j]);
        }
    }
    regions
        .into_iter()
        .enumerate()
        .map(|(pot, (pixels, raw))| {
            if raw.len() < config.k {
                return Err(Error::Segmentation(format!(
                    "pot {pot} has {} pixels, fewer than k = {}",
                    raw.len(),
                    config.k
                )));
            }
            let scaled: Vec<[T; 2]> =
                raw.iter().map(|p| [min_max(p[0], lo[0], hi[0]), min_max(p[1], lo[1], hi[1])]).collect();
            let fit = kmeans(&scaled, config)?;
            let mut sums = vec![[T::zero(); 2]; config.k];
            let mut sizes = vec![0usize; config.k];
            for (p, &a) in raw.iter().zip(&fit.assignments) {
                sizes[a] += 1;
                sums[a][0] += p[0];
                sums[a][1] += p[1];
            }
            let clusters = (0..config.k)
                .map(|id| {
                    let n = T::from_usize_lossy(sizes[id].max(1));
                    ClusterSummary { id, size: sizes[id], brightness: sums[id][0] / n, pot_distance: sums[id][1] / n }
                })
                .collect();
            Ok(PotClusters { pot, pixels, labels: fit.assignments, clusters })
        })
        .collect()
}

/// Clusters each pot region and keeps clusters within the age-dependent distance
/// threshold and above the brightness floor.
pub fn segment_image<T: Scalar>(
    img: &RasterImage,
    pots: &[(T, T)],
    rule: Option<&ThresholdRule<T>>,
    t_days: T,
    config: &SegmentConfig,
) -> Result<Segmentation<T>> {
    let rule = rule.ok_or_else(|| Error::Segmentation("no threshold rule supplied".into()))?;
    let cm = config
        .cm_per_pixel
        .filter(|c| *c > 0.0 && c.is_finite())
        .ok_or_else(|| Error::Segmentation("a positive pixel scale (cm per pixel) is required".into()))?;
    if !t_days.is_finite() || t_days < T::zero() {
        return Err(Error::Segmentation(format!("plant age must be non-negative, got {t_days:?}")));
    }
    let limit = rule.threshold(t_days);
    let floor = T::lit(config.brightness_floor);
    let px_area = T::lit(cm * cm);
    let clusters = cluster_pots(img, pots, &config.kmeans)?;
    let mut mask = vec![0u16; img.width() * img.height()];
    let mut areas = Vec::with_capacity(clusters.len());
    for pc in &clusters {
        let plant: Vec<bool> =
            pc.clusters.iter().map(|c| c.size > 0 && c.pot_distance <= limit && c.brightness >= floor).collect();
        let mut count = 0;
        for (&idx, &label) in pc.pixels.iter().zip(&pc.labels) {
            if plant[label] {
                mask[idx] = pc.pot as u16 + 1;
                count += 1;
            }
        }
        areas.push(PotArea {
            pot: pc.pot,
            plant_pixels: count,
            area_cm2: T::from_usize_lossy(count) * px_area,
            plant_clusters: (0..plant.len()).filter(|&i| plant[i]).collect(),
        });
    }
    Ok(Segmentation { width: img.width(), height: img.height(), mask, pots: areas, clusters })
}

/// Segments many named images in parallel; failures are reported per image.
pub fn segment_batch<T: Scalar>(
    images: &[(String, RasterImage)],
    pots: &[(T, T)],
    rule: Option<&ThresholdRule<T>>,
    config: &SegmentConfig,
) -> Vec<(String, Result<Segmentation<T>>)> {
    images
        .par_iter()
        .map(|(name, img)| {
            let res = ImageStamp::parse(name).and_then(|s| segment_image(img, pots, rule, T::lit(s.t_days()), config));
            (name.clone(), res)
        })
        .collect()
}

/// Manual labelling of which clusters in one pot are plant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub image: String,
    pub t_days: f64,
    #[serde(default)]
    pub pot: usize,
    pub plant_clusters: Vec<usize>,
}

/// `(t_days, plant boundary distance)` for one annotation.
///
/// The boundary is midway between the farthest labelled plant centroid and the nearest
/// unlabelled centroid beyond it, or the farthest plant centroid when nothing lies
/// beyond.
pub fn annotation_sample<T: Scalar>(annotation: &Annotation, clusters: &[PotClusters<T>]) -> Result<(T, T)> {
    let pc = clusters
        .iter()
        .find(|c| c.pot == annotation.pot)
        .ok_or_else(|| Error::Segmentation(format!("{}: no pot {}", annotation.image, annotation.pot)))?;
    if annotation.plant_clusters.is_empty() {
        return Err(Error::Segmentation(format!("{}: no plant clusters labelled", annotation.image)));
    }
    let mut far = T::neg_infinity();
    for &id in &annotation.plant_clusters {
        let c = pc.clusters.get(id).filter(|c| c.size > 0).ok_or_else(|| {
            Error::Segmentation(format!("{}: cluster {id} does not exist or is empty", annotation.image))
        })?;
        far = far.max(c.pot_distance);
    }
    let beyond = pc
        .clusters
        .iter()
        .filter(|c| c.size > 0 && !annotation.plant_clusters.contains(&c.id) && c.pot_distance > far)
        .map(|c| c.pot_distance)
        .fold(T::infinity(), T::min);
    let d = if beyond.is_finite() { (far + beyond) / T::lit(2.0) } else { far };
    Ok((T::lit(annotation.t_days), d))
}

/// Clusters every annotated image and fits the distance rule to the labelled clusters.
/// `lookup` resolves an annotation's image name to pixels.
pub fn fit_rule_from_annotations<T: Scalar, F>(
    annotations: &[Annotation],
    pots: &[(T, T)],
    config: &KMeansConfig,
    mut lookup: F,
) -> Result<ThresholdRule<T>>
where
    F: FnMut(&str) -> Result<RasterImage>,
{
    let mut samples = Vec::with_capacity(annotations.len());
    for a in annotations {
        let img = lookup(&a.image)?;
        let clusters = cluster_pots(&img, pots, config)?;
        samples.push(annotation_sample(a, &clusters)?);
    }
    fit_threshold_rule(&samples)
}

/// Capture time parsed from a `<experiment>_<day>_<hour>[.ext]` file name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageStamp {
    pub experiment: String,
    pub day: u32,
    pub hour: u32,
}

impl ImageStamp {
    pub fn parse(name: &str) -> Result<Self> {
        let file = std::path::Path::new(name).file_stem().and_then(|s| s.to_str()).unwrap_or(name);
        let bad = || Error::Segmentation(format!("image name {name:?} is not <experiment>_<day>_<hour>"));
        let mut parts = file.rsplitn(3, '_');
        let hour = parts.next().and_then(|s| s.parse::<u32>().ok()).ok_or_else(bad)?;
        let day = parts.next().and_then(|s| s.parse::<u32>().ok()).ok_or_else(bad)?;
        let experiment = parts.next().filter(|s| !s.is_empty()).ok_or_else(bad)?;
        if hour > 23 {
            return Err(bad());
        }
        Ok(Self { experiment: experiment.to_string(), day, hour })
    }

    pub fn t_days(&self) -> f64 {
        self.day as f64 + self.hour as f64 / 24.0
    }
}

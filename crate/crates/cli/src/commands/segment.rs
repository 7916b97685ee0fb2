use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use growlight::segmentation::{
    estimate_homography, fit_rule_from_annotations, segment_batch, warp_image, Annotation, Homography, ImageStamp,
    PointPair, RasterImage, SegmentConfig, ThresholdRule,
};
use serde::Serialize;

use super::{read_json, Ctx};
use crate::input_error;

#[derive(Debug, Args)]
pub struct SegmentArgs {
    /// Directory of `<experiment>_<day>_<hour>.png|ppm` images.
    #[arg(long, value_name = "DIR")]
    pub images: PathBuf,
    /// JSON list of annotations used to fit the threshold rule.
    #[arg(long, value_name = "FILE")]
    pub annotations: Option<PathBuf>,
    /// Previously fitted threshold rule JSON; skips fitting.
    #[arg(long, value_name = "FILE", conflicts_with = "annotations")]
    pub rule: Option<PathBuf>,
    /// Pot centres as `x,y;x,y;...` in rectified pixels.
    #[arg(long, value_name = "LIST")]
    pub pots: Option<String>,
    #[arg(long)]
    pub cm_per_pixel: Option<f64>,
    /// Clusters per pot.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub brightness_floor: Option<f64>,
    /// JSON list of `[[x, y], [u, v]]` camera-to-rectified correspondences.
    #[arg(long, value_name = "FILE")]
    pub rectify: Option<PathBuf>,
    /// Also write a label-mask PNG per image.
    #[arg(long)]
    pub masks: bool,
}

#[derive(Debug, Serialize)]
struct Metadata {
    images: usize,
    failed: usize,
    pots: Vec<(f64, f64)>,
    config: SegmentConfig,
    rule: ThresholdRule<f64>,
    homography: Option<[[f64; 3]; 3]>,
}

fn parse_pots(s: &str) -> Result<Vec<(f64, f64)>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (x, y) = p.split_once(',').ok_or_else(|| input_error(format!("pot '{p}' is not x,y")))?;
            let num = |v: &str| v.trim().parse::<f64>().map_err(|_| input_error(format!("pot '{p}' is not x,y")));
            Ok((num(x)?, num(y)?))
        })
        .collect()
}

fn read_image(path: &Path) -> Result<RasterImage> {
    let img = image::open(path).with_context(|| input_error(format!("cannot decode {}", path.display())))?.to_rgb8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    Ok(RasterImage::from_rgb_bytes(w, h, img.as_raw())?)
}

fn list_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries =
        fs::read_dir(dir).with_context(|| input_error(format!("cannot read image directory {}", dir.display())))?;
    let mut paths = Vec::new();
    for e in entries {
        let p = e?.path();
        let ext = p.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        if matches!(ext.as_deref(), Some("png" | "ppm")) {
            paths.push(p);
        }
    }
    paths.sort();
    if paths.is_empty() {
        return Err(input_error(format!("no .png or .ppm images in {}", dir.display())));
    }
    Ok(paths)
}

fn mask_png(path: &Path, width: usize, height: usize, mask: &[u16]) -> Result<()> {
    let pixels: Vec<u8> = mask.iter().map(|&m| if m == 0 { 0 } else { (40 + (m as usize * 53) % 216) as u8 }).collect();
    let img = image::GrayImage::from_raw(width as u32, height as u32, pixels).context("mask size")?;
    img.save(path).with_context(|| format!("writing {}", path.display()))
}

pub fn run(ctx: &Ctx, args: SegmentArgs) -> Result<()> {
    let mut cfg = ctx.cfg.segment;
    if let Some(v) = args.cm_per_pixel {
        cfg.cm_per_pixel = Some(v);
    }
    if let Some(k) = args.k {
        cfg.kmeans.k = k;
    }
    if let Some(b) = args.brightness_floor {
        cfg.brightness_floor = b;
    }
    if cfg.cm_per_pixel.is_none() {
        return Err(input_error("no pixel scale; pass --cm-per-pixel or set segment.cm_per_pixel"));
    }
    let pots = match &args.pots {
        Some(s) => parse_pots(s)?,
        None => ctx.cfg.pots.clone(),
    };
    if pots.is_empty() {
        return Err(input_error("no pot centres; pass --pots or set pots in the config"));
    }
    let homography: Option<Homography<f64>> = match &args.rectify {
        Some(p) => {
            let pairs: Vec<PointPair<f64>> = read_json(p)?;
            Some(estimate_homography(&pairs).with_context(|| p.display().to_string())?)
        }
        None => None,
    };

    let mut images = Vec::new();
    for path in list_images(&args.images)? {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let mut img = read_image(&path)?;
        if let Some(h) = &homography {
            img = warp_image(&img, h)?;
        }
        images.push((name, img));
    }

    let rule = if let Some(p) = &args.rule {
        read_json::<ThresholdRule<f64>>(p)?
    } else {
        let path = args
            .annotations
            .as_deref()
            .or(ctx.cfg.paths.annotations.as_deref())
            .ok_or_else(|| input_error("no threshold rule; pass --annotations or --rule"))?;
        if !path.exists() {
            return Err(input_error(format!("annotation file {} does not exist", path.display())));
        }
        let annotations: Vec<Annotation> = read_json(path)?;
        let by_name: HashMap<&str, &RasterImage> = images.iter().map(|(n, i)| (n.as_str(), i)).collect();
        fit_rule_from_annotations(&annotations, &pots, &cfg.kmeans, |name| {
            by_name.get(name).map(|&img| img.clone()).ok_or_else(|| {
                growlight::Error::Segmentation(format!("annotated image {name} is not in the image directory"))
            })
        })
        .with_context(|| format!("fitting the threshold rule from {}", path.display()))?
    };
    ctx.write_json("threshold_rule.json", &rule)?;

    let results = segment_batch(&images, &pots, Some(&rule), &cfg);
    let mut w = csv::Writer::from_writer(ctx.create("areas.csv")?);
    w.write_record(["image", "t_days", "pot", "plant_pixels", "area_cm2"])?;
    let mut failed = Vec::new();
    for (name, res) in &results {
        match res {
            Ok(seg) => {
                let t = ImageStamp::parse(name)?.t_days();
                for p in &seg.pots {
                    w.write_record([
                        name.clone(),
                        t.to_string(),
                        p.pot.to_string(),
                        p.plant_pixels.to_string(),
                        p.area_cm2.to_string(),
                    ])?;
                }
                if args.masks {
                    let stem = Path::new(name).file_stem().unwrap().to_string_lossy();
                    let dir = ctx.out_path("masks")?;
                    fs::create_dir_all(&dir)?;
                    mask_png(&dir.join(format!("{stem}.png")), seg.width, seg.height, &seg.mask)?;
                }
            }
            Err(e) => failed.push(format!("{name}: {e}")),
        }
    }
    w.flush()?;
    ctx.write_json(
        "segment_meta.json",
        &Metadata {
            images: results.len(),
            failed: failed.len(),
            pots: pots.clone(),
            config: cfg,
            rule,
            homography: homography.map(|h| *h.matrix()),
        },
    )?;
    println!("segmented {} of {} images, {} pots each", results.len() - failed.len(), results.len(), pots.len());
    if !failed.is_empty() {
        for f in &failed {
            eprintln!("{f}");
        }
        return Err(input_error(format!("{} image(s) failed", failed.len())));
    }
    Ok(())
}

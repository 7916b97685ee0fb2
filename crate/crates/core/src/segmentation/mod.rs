//! Rectification and unsupervised plant segmentation of top-down images.

mod homography;
mod image;
mod kmeans;
mod segment;
mod synth;
mod threshold;

pub use homography::{estimate_homography, warp_image, Homography, PointPair};
pub use image::{brightness, RasterImage, Rgb};
pub use kmeans::{kmeans, kmeans_plus_plus, nearest, KMeansConfig, KMeansResult};
pub use segment::{
    annotation_sample, cluster_pots, fit_rule_from_annotations, segment_batch, segment_image, Annotation,
    ClusterSummary, ImageStamp, PotArea, PotClusters, SegmentConfig, Segmentation,
};
pub use synth::{synth_plant_sequence, PlantScene, SyntheticFrame};
pub use threshold::{fit_threshold_rule, ThresholdRule};

//! Seeded synthetic point clouds with known shape.
//!
//! Randomness comes from ChaCha8 seeded with the 64-bit seed; normal variates
//! use `rand_distr`'s ziggurat sampler. Both are portable, so a seed
//! reproduces the same bits on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{PointCloud, PointMetadata, PointRecord};

/// Radius of the generated circle; its centre sits at `(0, CIRCLE_RADIUS + 1)`
/// so the norm lens increases from the bottom of the circle to the top.
/// Angles are evenly spaced and every coordinate, padded ones included,
/// receives independent noise.
pub const CIRCLE_RADIUS: f64 = 1.0;
/// Length of each tube of the Y-shaped cloud.
pub const TUBE_LENGTH: f64 = 4.0;
/// Distance of the first blob centre from the origin.
pub const BLOB_SPACING: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthKind {
    NoisyCircle,
    YBranch,
    Blobs { centers: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub kind: SynthKind,
    pub n_points: usize,
    pub dim: usize,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_points == 0 {
            return Err(Error::Param("n_points must be at least 1".into()));
        }
        if self.dim < 2 {
            return Err(Error::Param("dim must be at least 2".into()));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::Param(format!("noise sigma must be >= 0, got {}", self.noise_sigma)));
        }
        if let SynthKind::Blobs { centers: 0 } = self.kind {
            return Err(Error::Param("blobs need at least one centre".into()));
        }
        Ok(())
    }
}

/// Sizes of `parts` contiguous groups splitting `n`, larger groups first.
fn split(n: usize, parts: usize) -> Vec<usize> {
    (0..parts).map(|i| n / parts + usize::from(i < n % parts)).collect()
}

fn gaussian(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    sigma * z
}

pub fn generate(spec: &SynthSpec) -> Result<(PointCloud, PointMetadata)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (n, d, sigma) = (spec.n_points, spec.dim, spec.noise_sigma);
    let mut data = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);

    match spec.kind {
        SynthKind::NoisyCircle => {
            for i in 0..n {
                let theta = std::f64::consts::TAU * i as f64 / n as f64;
                let x = CIRCLE_RADIUS * theta.cos() + gaussian(&mut rng, sigma);
                let y = CIRCLE_RADIUS + 1.0 + CIRCLE_RADIUS * theta.sin() + gaussian(&mut rng, sigma);
                data.push(x as f32);
                data.push(y as f32);
                data.extend((2..d).map(|_| gaussian(&mut rng, sigma) as f32));
                labels.push("circle".to_string());
            }
        }
        SynthKind::YBranch => {
            let diag = std::f64::consts::FRAC_1_SQRT_2;
            let arms: [(&str, [f64; 2]); 3] = [("armA", [1.0, 0.0]), ("armB", [0.0, 1.0]), ("stem", [diag, diag])];
            for ((label, dir), count) in arms.iter().zip(split(n, 3)) {
                for _ in 0..count {
                    let t = TUBE_LENGTH * rng.random::<f64>();
                    for k in 0..d {
                        let along = if k < 2 { t * dir[k] } else { 0.0 };
                        data.push((along + gaussian(&mut rng, sigma)) as f32);
                    }
                    labels.push(label.to_string());
                }
            }
        }
        SynthKind::Blobs { centers } => {
            for (i, count) in split(n, centers).into_iter().enumerate() {
                let axis = i % d;
                let offset = BLOB_SPACING * (1 + i / d) as f64;
                for _ in 0..count {
                    for k in 0..d {
                        let c = if k == axis { offset } else { 0.0 };
                        data.push((c + gaussian(&mut rng, sigma)) as f32);
                    }
                    labels.push(format!("blob_{i}"));
                }
            }
        }
    }

    let kind = match spec.kind {
        SynthKind::NoisyCircle => "noisy_circle",
        SynthKind::YBranch => "y_branch",
        SynthKind::Blobs { .. } => "blobs",
    };
    let records = labels
        .into_iter()
        .enumerate()
        .map(|(point_id, class_label)| PointRecord {
            point_id,
            class_label,
            example_ref: Some(format!("{kind}/{point_id}")),
        })
        .collect();
    Ok((PointCloud::new(data, n, d)?, PointMetadata::new(records, n)?))
}

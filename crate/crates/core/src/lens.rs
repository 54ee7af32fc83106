//! Lens functions and the uniform overlapping interval cover of the lens range.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::PointCloud;

/// Relative amount by which the last interval is pushed past the maximum,
/// and the width of intervals over a degenerate (constant) range.
pub const TOP_EXTENSION: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LensKind {
    #[default]
    L2Norm,
}

impl std::str::FromStr for LensKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l2_norm" | "l2" => Ok(LensKind::L2Norm),
            other => Err(Error::Param(format!("unknown lens {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LensValues {
    pub values: Vec<f64>,
    pub kind: LensKind,
}

impl LensValues {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(min, max)` of the values, `None` when empty.
    pub fn range(&self) -> Option<(f64, f64)> {
        let mut it = self.values.iter().copied();
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v))))
    }
}

/// Euclidean norm with plain sequential `f64` accumulation.
#[inline]
pub fn l2_norm(row: &[f32]) -> f64 {
    row.iter()
        .map(|&v| {
            let v = v as f64;
            v * v
        })
        .sum::<f64>()
        .sqrt()
}

pub fn compute_lens(cloud: &PointCloud, kind: LensKind) -> LensValues {
    let values = match kind {
        LensKind::L2Norm => (0..cloud.n_points())
            .into_par_iter()
            .map(|i| l2_norm(cloud.row(i)))
            .collect(),
    };
    LensValues { values, kind }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    #[inline]
    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

/// `n` closed intervals of common length `length`, consecutive ones
/// overlapping by `overlap * length`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cover {
    pub intervals: Vec<Interval>,
    pub overlap: f64,
    pub length: f64,
    pub stride: f64,
    pub degenerate: bool,
}

impl Cover {
    /// Cover of `[min, max]` with `n` intervals and fractional overlap `p`.
    pub fn from_range(min: f64, max: f64, n: usize, p: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Param("number of intervals must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&p) {
            return Err(Error::Param(format!("overlap {p} outside [0, 1)")));
        }
        if !(min.is_finite() && max.is_finite()) || min > max {
            return Err(Error::Param(format!("invalid lens range [{min}, {max}]")));
        }
        if p > 0.5 {
            log::warn!("overlap {p} > 0.5: non-consecutive intervals will intersect");
        }
        if max == min {
            log::warn!("degenerate lens range: every value equals {min}");
            let iv = Interval {
                lo: min,
                hi: min + TOP_EXTENSION,
            };
            return Ok(Cover {
                intervals: vec![iv; n],
                overlap: p,
                length: TOP_EXTENSION,
                stride: 0.0,
                degenerate: true,
            });
        }
        let span = max - min;
        let length = span / (n as f64 - (n as f64 - 1.0) * p);
        let stride = length * (1.0 - p);
        let mut intervals: Vec<Interval> = (0..n)
            .map(|i| {
                let lo = min + i as f64 * stride;
                Interval { lo, hi: lo + length }
            })
            .collect();
        // Rounding must never open a gap between neighbours.
        for i in 1..n {
            let next_lo = intervals[i].lo;
            let prev = &mut intervals[i - 1];
            prev.hi = prev.hi.max(next_lo);
        }
        let last = intervals.last_mut().expect("n >= 1");
        last.hi = last.hi.max(max) + TOP_EXTENSION * span;
        Ok(Cover {
            intervals,
            overlap: p,
            length,
            stride,
            degenerate: false,
        })
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Indices of the intervals containing `v`, ascending.
    pub fn intervals_containing(&self, v: f64) -> Vec<usize> {
        if self.degenerate {
            return if self.intervals[0].contains(v) {
                (0..self.len()).collect()
            } else {
                Vec::new()
            };
        }
        let first = self.intervals[0].lo;
        let guess = ((v - first) / self.stride).floor();
        // The lower bounds increase, so only indices at or below the guess
        // (plus one for rounding) can have lo <= v.
        let start = if guess.is_nan() || guess < 0.0 {
            0
        } else {
            (guess as usize).saturating_add(1).min(self.len() - 1)
        };
        let mut out = Vec::new();
        for j in (0..=start).rev() {
            let iv = self.intervals[j];
            if iv.hi < v {
                break;
            }
            if iv.lo <= v {
                out.push(j);
            }
        }
        out.reverse();
        out
    }
}

pub fn build_cover(lens: &LensValues, n: usize, p: f64) -> Result<Cover> {
    let (min, max) = lens
        .range()
        .ok_or_else(|| Error::Param("cannot build a cover over an empty point cloud".into()))?;
    Cover::from_range(min, max, n, p)
}

/// Per-interval lists of point indices (ascending) whose lens value lies in
/// the closed interval.
pub fn assign_points(lens: &LensValues, cover: &Cover) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); cover.len()];
    for (i, &v) in lens.values.iter().enumerate() {
        for j in cover.intervals_containing(v) {
            out[j].push(i);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Equal-width histogram over `[min, max]`; the maximum lands in the last bin.
/// Constant input yields a single bin.
pub fn lens_histogram(lens: &LensValues, n_bins: usize) -> Result<Vec<HistogramBin>> {
    if n_bins == 0 {
        return Err(Error::Param("number of bins must be at least 1".into()));
    }
    let Some((min, max)) = lens.range() else {
        return Ok(Vec::new());
    };
    if min == max {
        return Ok(vec![HistogramBin {
            lo: min,
            hi: max,
            count: lens.len(),
        }]);
    }
    let width = (max - min) / n_bins as f64;
    let mut bins: Vec<HistogramBin> = (0..n_bins)
        .map(|b| HistogramBin {
            lo: min + b as f64 * width,
            hi: if b + 1 == n_bins {
                max
            } else {
                min + (b + 1) as f64 * width
            },
            count: 0,
        })
        .collect();
    for &v in &lens.values {
        let b = (((v - min) / width).floor() as usize).min(n_bins - 1);
        bins[b].count += 1;
    }
    Ok(bins)
}

use std::cmp::Ordering;
use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::regression::fit_line;
use crate::spectral::Wavevector;

use super::{AttractorError, EnsembleState};

/// Below this many members a box-counting estimate is mostly noise.
const SMALL_ENSEMBLE: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    /// Box sizes, strictly decreasing.
    pub scales: Vec<f64>,
    /// Occupied boxes at each scale.
    pub counts: Vec<usize>,
    /// Slope of `ln N(ε)` against `ln(1/ε)`, clamped at 0.
    pub slope: f64,
    pub goodness: Option<f64>,
    /// Number of real coordinates actually used.
    pub projection_dim: usize,
}

/// One real coordinate of the projection: `Re` or `Im` of component `c`
/// at wavevector `k` (one representative per `±k` pair).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Coordinate {
    slot: usize,
    imaginary: bool,
}

fn is_canonical(k: Wavevector) -> bool {
    match k.iter().find(|x| **x != 0) {
        Some(x) => *x > 0,
        None => false,
    }
}

/// Projects the ensemble onto its `projection_dim` leading real coordinates.
///
/// Coordinates are the real and imaginary parts of `û_c(k)` over one
/// representative of each `±k` pair, scaled by `(2·volume)^{1/2}` so that
/// Euclidean distance over all coordinates equals the `H` distance. They
/// are ranked by mean square over the members (ties by slot order) and
/// coordinates that vanish on every member are dropped.
pub fn project_ensemble(e: &EnsembleState, projection_dim: usize) -> Vec<Vec<f64>> {
    let dom = *e.domain();
    let n = dom.n_points();
    let scale = (2.0 * dom.volume()).sqrt();
    let mut coords = Vec::new();
    for (i, k) in dom.wavevectors() {
        if !is_canonical(k) || dom.is_nyquist(k) {
            continue;
        }
        for c in 0..dom.dimension() {
            for imaginary in [false, true] {
                coords.push(Coordinate {
                    slot: c * n + i,
                    imaginary,
                });
            }
        }
    }
    let value = |m: &[num_complex::Complex64], co: &Coordinate| {
        let z = m[co.slot];
        scale * if co.imaginary { z.im } else { z.re }
    };
    let energy: Vec<f64> = coords
        .iter()
        .map(|co| e.members().iter().map(|m| value(m.coefficients(), co).powi(2)).sum::<f64>() / e.len() as f64)
        .collect();
    let mut order: Vec<usize> = (0..coords.len()).filter(|&j| energy[j] > 0.0).collect();
    order.sort_by(|&a, &b| energy[b].partial_cmp(&energy[a]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
    order.truncate(projection_dim);
    e.members()
        .iter()
        .map(|m| order.iter().map(|&j| value(m.coefficients(), &coords[j])).collect())
        .collect()
}

/// Occupied boxes of side `ε` for each scale; boxes are anchored at the
/// coordinate-wise minimum of the cloud.
pub fn box_count_points(points: &[Vec<f64>], scales: &[f64]) -> Vec<usize> {
    let Some(first) = points.first() else {
        return vec![0; scales.len()];
    };
    let dim = first.len();
    let mut lo = vec![f64::INFINITY; dim];
    for p in points {
        for (l, x) in lo.iter_mut().zip(p) {
            *l = l.min(*x);
        }
    }
    scales
        .par_iter()
        .map(|&eps| {
            let boxes: HashSet<Vec<i64>> = points
                .iter()
                .map(|p| p.iter().zip(&lo).map(|(x, l)| ((x - l) / eps).floor() as i64).collect())
                .collect();
            boxes.len()
        })
        .collect()
}

/// `levels` box sizes `D·2^{−j}`, `j = 1..=levels`, with `D` the largest
/// side of the bounding box (1 for a single point).
pub fn dyadic_scales(points: &[Vec<f64>], levels: usize) -> Vec<f64> {
    let dim = points.first().map_or(0, Vec::len);
    let mut side = 0.0_f64;
    for c in 0..dim {
        let (lo, hi) = points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[c]), hi.max(p[c])));
        side = side.max(hi - lo);
    }
    if side == 0.0 {
        side = 1.0;
    }
    (1..=levels).map(|j| side * 0.5_f64.powi(j as i32)).collect()
}

pub(crate) fn dimension_of_points(
    points: &[Vec<f64>],
    scales: &[f64],
) -> Result<(Vec<usize>, f64, Option<f64>), AttractorError> {
    if scales.len() < 2 {
        return Err(AttractorError::InvalidArgument("need at least two scales".into()));
    }
    if scales.iter().any(|s| !(*s > 0.0 && s.is_finite())) || scales.windows(2).any(|w| w[1] >= w[0]) {
        return Err(AttractorError::InvalidArgument(
            "scales must be positive and strictly decreasing".into(),
        ));
    }
    let counts = box_count_points(points, scales);
    let xs: Vec<f64> = scales.iter().map(|s| -s.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|c| (*c as f64).ln()).collect();
    let fit = fit_line(&xs, &ys).expect("scales are distinct");
    Ok((counts, fit.slope.max(0.0), fit.r_squared))
}

/// Box-counting slope of the ensemble in its leading projected coordinates
/// (see [`project_ensemble`]) over the given scales.
pub fn box_counting_dimension(
    e: &EnsembleState,
    projection_dim: usize,
    scales: &[f64],
) -> Result<DimensionEstimate, AttractorError> {
    if e.len() < SMALL_ENSEMBLE {
        log::warn!(
            "box counting over {} members; estimates below {SMALL_ENSEMBLE} members are unreliable",
            e.len()
        );
    }
    let points = project_ensemble(e, projection_dim);
    let used = points.first().map_or(0, Vec::len);
    let (counts, slope, goodness) = dimension_of_points(&points, scales)?;
    Ok(DimensionEstimate {
        scales: scales.to_vec(),
        counts,
        slope,
        goodness,
        projection_dim: used,
    })
}

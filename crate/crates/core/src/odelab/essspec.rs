//! The essential-spectrum curve `ran(ab + c)` and the exclusion tube used to
//! keep spectral parameters away from the singular set of the reduction.

use num_complex::Complex64 as C64;

use super::coeffs::Coefficients;
use crate::error::{Error, Result};

pub const MIN_CURVE_SAMPLES: usize = 512;

/// Samples `(ab + c)(x_k)`, `x_k = k/(n−1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EssSpecCurve {
    pub samples: Vec<C64>,
}

pub fn ess_spectrum_curve(coeffs: &Coefficients, nsamples: usize) -> Result<EssSpecCurve> {
    if nsamples < MIN_CURVE_SAMPLES {
        return Err(Error::InvalidArgument(format!("need at least {MIN_CURVE_SAMPLES} curve samples, got {nsamples}")));
    }
    let samples = (0..nsamples)
        .map(|k| {
            let v = coeffs.at(k as f64 / (nsamples - 1) as f64);
            v.a * v.b + v.c
        })
        .collect();
    Ok(EssSpecCurve { samples })
}

fn segment_distance(z: C64, p: C64, q: C64) -> f64 {
    let d = q - p;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - p).norm();
    }
    let t = (((z - p) * d.conj()).re / len2).clamp(0.0, 1.0);
    (z - (p + d * t)).norm()
}

/// Distance from `z` to the polyline through `pts`.
pub fn polyline_distance(z: C64, pts: &[C64]) -> f64 {
    match pts.len() {
        0 => f64::INFINITY,
        1 => (z - pts[0]).norm(),
        _ => pts.windows(2).map(|w| segment_distance(z, w[0], w[1])).fold(f64::INFINITY, f64::min),
    }
}

/// Hausdorff distance between two sampled curves, each read as a polyline.
pub fn hausdorff_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() { 0.0 } else { f64::INFINITY };
    }
    let one_sided = |p: &[C64], q: &[C64]| p.iter().map(|&z| polyline_distance(z, q)).fold(0.0, f64::max);
    one_sided(a, b).max(one_sided(b, a))
}

/// Curves `c(x)` and `(ab + c)(x)` restricted to where `b ≠ 0`, as
/// polyline pieces. These are the points where `λ − c` or `a g − 1`
/// vanish in the kernel reduction. Where `b ≡ 0` the second component
/// decouples and `c` does not enter the boundary data.
#[derive(Debug, Clone)]
pub struct ExclusionSet {
    pieces: Vec<Vec<C64>>,
}

impl ExclusionSet {
    pub fn new(coeffs: &Coefficients, nsamples: usize, b_eps: f64) -> Self {
        let mut pieces = Vec::new();
        let mut cur_c: Vec<C64> = Vec::new();
        let mut cur_e: Vec<C64> = Vec::new();
        for k in 0..nsamples {
            let v = coeffs.at(k as f64 / (nsamples - 1) as f64);
            if v.b.norm() > b_eps {
                cur_c.push(v.c);
                cur_e.push(v.a * v.b + v.c);
            } else {
                if !cur_c.is_empty() {
                    pieces.push(std::mem::take(&mut cur_c));
                    pieces.push(std::mem::take(&mut cur_e));
                }
            }
        }
        if !cur_c.is_empty() {
            pieces.push(cur_c);
            pieces.push(cur_e);
        }
        Self { pieces }
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn distance(&self, z: C64) -> f64 {
        self.pieces.iter().map(|p| polyline_distance(z, p)).fold(f64::INFINITY, f64::min)
    }
}

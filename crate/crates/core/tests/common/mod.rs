#![allow(dead_code)]

use std::f64::consts::PI;

use mfunclab::numkit::{c64, Grid, GridFunction};
use mfunclab::C64;
use rand::Rng;

/// Random trigonometric polynomial of degree ≤ 8 in each component, with
/// coefficients normalized to unit ℓ² norm.
pub fn random_trig(rng: &mut impl Rng, grid: Grid) -> GridFunction {
    let mut coeffs: Vec<[C64; 2]> = (0..9)
        .map(|_| [c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))])
        .collect();
    let norm = coeffs.iter().map(|c| c[0].norm_sqr() + c[1].norm_sqr()).sum::<f64>().sqrt();
    for c in &mut coeffs {
        c[0] /= norm;
        c[1] /= norm;
    }
    GridFunction::from_fn(grid, |x| {
        let mut v = [c64(0.0, 0.0); 2];
        for (k, c) in coeffs.iter().enumerate() {
            let w = (PI * k as f64 * x).cos();
            let s = (PI * k as f64 * x).sin();
            v[0] += c[0] * if k % 2 == 0 { w } else { s };
            v[1] += c[1] * if k % 2 == 0 { s } else { w };
        }
        v
    })
}

pub fn dist_to_set(z: C64, set: &[f64]) -> f64 {
    set.iter().map(|&s| (z - s).norm()).fold(f64::INFINITY, f64::min)
}

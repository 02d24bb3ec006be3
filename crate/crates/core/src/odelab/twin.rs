//! Twin operators: same `a`, `b`, and `c̃ = c + h·η` with `η` supported where
//! `b` vanishes.

use num_complex::Complex64 as C64;

use super::coeffs::{CoeffSpec, Coefficients, Cplx};
use crate::error::{Error, Result};

/// Number of interior points at which `b ≡ 0` on the interval is checked.
pub const HYPOTHESIS_SAMPLES: usize = 64;
pub const HYPOTHESIS_EPS: f64 = 1e-14;

/// Returns `(base, twin)`. Fails with `HypothesisViolated` unless `b`
/// vanishes on `(lo, hi)`.
pub fn twin_counterexample(base: &Coefficients, (lo, hi): (f64, f64), bump_height: C64) -> Result<(Coefficients, Coefficients)> {
    if !(0.0 < lo && lo < hi && hi < 1.0) {
        return Err(Error::InvalidArgument(format!("bump interval ({lo}, {hi}) must satisfy 0 < lo < hi < 1")));
    }
    if !bump_height.is_finite() {
        return Err(Error::InvalidArgument("bump height must be finite".into()));
    }
    for k in 0..HYPOTHESIS_SAMPLES {
        let x = lo + (hi - lo) * (k as f64 + 0.5) / HYPOTHESIS_SAMPLES as f64;
        let b = base.at(x).b;
        if b.norm() >= HYPOTHESIS_EPS {
            return Err(Error::HypothesisViolated(format!("b({x}) = {b} does not vanish on ({lo}, {hi})")));
        }
    }
    let mut twin = base.clone();
    if bump_height != C64::new(0.0, 0.0) {
        twin.c = CoeffSpec::BumpAdd { base: Box::new(base.c.clone()), interval: [lo, hi], height: Cplx(bump_height) };
    }
    Ok((base.clone(), twin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::c64;
    use crate::odelab::coeffs::bump;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_height_is_identity() {
        let base = Coefficients::counterexample_base();
        let (b, t) = twin_counterexample(&base, (0.4, 0.6), c64(0.0, 0.0)).unwrap();
        assert_eq!(b, t);
    }

    #[test]
    fn bump_support_and_peak() {
        let base = Coefficients::counterexample_base();
        let h = c64(1.0, 0.0);
        let (b, t) = twin_counterexample(&base, (0.4, 0.6), h).unwrap();
        let mut peak: f64 = 0.0;
        for k in 0..=1000 {
            let x = k as f64 / 1000.0;
            let d = t.at(x).c - b.at(x).c;
            if !(0.4..=0.6).contains(&x) {
                assert_eq!(d, c64(0.0, 0.0));
            }
            peak = peak.max(d.norm());
        }
        assert!((peak - h.norm() * (-1.0f64).exp()).abs() < 1e-12);
        assert_eq!(bump(0.5, 0.4, 0.6).0, (-1.0f64).exp());
    }

    #[test]
    fn hypothesis_checked() {
        let base = Coefficients::counterexample_base();
        let r = twin_counterexample(&base, (0.2, 0.5), c64(1.0, 0.0));
        assert!(matches!(r, Err(Error::HypothesisViolated(_))));
        assert!(matches!(twin_counterexample(&Coefficients::generic(), (0.4, 0.6), c64(1.0, 0.0)), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn reduction_ratio_unchanged() {
        let base = Coefficients::counterexample_base();
        let (b, t) = twin_counterexample(&base, (0.4, 0.6), c64(1.0, 0.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let lambda = c64(rng.gen_range(-5.0..5.0), rng.gen_range(1.0..3.0));
            for k in 0..=200 {
                let x = k as f64 / 200.0;
                let (vb, vt) = (b.at(x), t.at(x));
                assert_eq!(vb.b / (lambda - vb.c), vt.b / (lambda - vt.c));
            }
        }
    }
}

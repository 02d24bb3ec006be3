//! Coefficient families for the 2×2 system, with a JSON descriptor schema.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex number in config files: either a bare real number or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "CplxRepr", into = "CplxRepr")]
pub struct Cplx(pub C64);

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CplxRepr {
    Real(f64),
    Pair([f64; 2]),
}

impl From<CplxRepr> for Cplx {
    fn from(r: CplxRepr) -> Self {
        match r {
            CplxRepr::Real(x) => Cplx(C64::new(x, 0.0)),
            CplxRepr::Pair([re, im]) => Cplx(C64::new(re, im)),
        }
    }
}

impl From<Cplx> for CplxRepr {
    fn from(c: Cplx) -> Self {
        if c.0.im == 0.0 {
            CplxRepr::Real(c.0.re)
        } else {
            CplxRepr::Pair([c.0.re, c.0.im])
        }
    }
}

impl From<C64> for Cplx {
    fn from(z: C64) -> Self {
        Cplx(z)
    }
}

impl From<f64> for Cplx {
    fn from(x: f64) -> Self {
        Cplx(C64::new(x, 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrigKind {
    Cos,
    Sin,
    /// `e^{2πi·freq·x}`
    Exp,
}

/// `amp · kind(2π·freq·x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    pub kind: TrigKind,
    pub freq: f64,
    pub amp: Cplx,
}

fn default_width() -> f64 {
    0.1
}

/// A smooth complex function on [0, 1] with its derivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoeffSpec {
    /// `Σ coeffs[k] x^k`
    Poly { coeffs: Vec<Cplx> },
    Trig { terms: Vec<TrigTerm> },
    /// `outside(x)·χ(x)` with `χ` a smooth step that is exactly 0 on
    /// `interval` and exactly 1 at distance ≥ `width` from it.
    BumpZero {
        interval: [f64; 2],
        outside: Box<CoeffSpec>,
        #[serde(default = "default_width")]
        width: f64,
    },
    /// `base(x) + height·η(x)`, `η` the standard bump rescaled to
    /// `interval` (peak `e⁻¹` at the midpoint, zero outside).
    BumpAdd { base: Box<CoeffSpec>, interval: [f64; 2], height: Cplx },
}

fn psi(s: f64) -> (f64, f64) {
    if s <= 0.0 {
        (0.0, 0.0)
    } else {
        let v = (-1.0 / s).exp();
        (v, v / (s * s))
    }
}

/// Smooth step: 0 for `s ≤ 0`, 1 for `s ≥ 1`; returns value and derivative.
fn smooth_step(s: f64) -> (f64, f64) {
    if s <= 0.0 {
        return (0.0, 0.0);
    }
    if s >= 1.0 {
        return (1.0, 0.0);
    }
    let (p, dp) = psi(s);
    let (q, dq) = psi(1.0 - s);
    let den = p + q;
    (p / den, (dp * q + p * dq) / (den * den))
}

/// `exp(−1/(1−t²))` on `|t| < 1`, `t` the affine image of `[lo, hi]` onto
/// `[−1, 1]`; returns value and x-derivative.
pub fn bump(x: f64, lo: f64, hi: f64) -> (f64, f64) {
    let t = (2.0 * x - lo - hi) / (hi - lo);
    if t.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let s = 1.0 - t * t;
    let v = (-1.0 / s).exp();
    (v, v * (-2.0 * t / (s * s)) * 2.0 / (hi - lo))
}

impl CoeffSpec {
    pub fn constant(z: C64) -> Self {
        CoeffSpec::Poly { coeffs: vec![Cplx(z)] }
    }

    pub fn zero() -> Self {
        Self::constant(C64::new(0.0, 0.0))
    }

    pub fn poly(coeffs: &[C64]) -> Self {
        CoeffSpec::Poly { coeffs: coeffs.iter().map(|&z| Cplx(z)).collect() }
    }

    /// Value and first derivative at `x`.
    pub fn eval(&self, x: f64) -> (C64, C64) {
        let zero = C64::new(0.0, 0.0);
        match self {
            CoeffSpec::Poly { coeffs } => {
                let mut v = zero;
                let mut d = zero;
                for c in coeffs.iter().rev() {
                    d = d * x + v;
                    v = v * x + c.0;
                }
                (v, d)
            }
            CoeffSpec::Trig { terms } => terms.iter().fold((zero, zero), |(v, d), t| {
                let w = 2.0 * PI * t.freq;
                let (tv, td) = match t.kind {
                    TrigKind::Cos => (C64::new((w * x).cos(), 0.0), C64::new(-w * (w * x).sin(), 0.0)),
                    TrigKind::Sin => (C64::new((w * x).sin(), 0.0), C64::new(w * (w * x).cos(), 0.0)),
                    TrigKind::Exp => {
                        let e = C64::from_polar(1.0, w * x);
                        (e, C64::new(0.0, w) * e)
                    }
                };
                (v + t.amp.0 * tv, d + t.amp.0 * td)
            }),
            CoeffSpec::BumpZero { interval: [lo, hi], outside, width } => {
                let dist = if x < *lo {
                    lo - x
                } else if x > *hi {
                    x - hi
                } else {
                    return (zero, zero);
                };
                let (chi, dchi) = smooth_step(dist / width);
                let dchi = dchi / width * if x < *lo { -1.0 } else { 1.0 };
                let (ov, od) = outside.eval(x);
                (ov * chi, od * chi + ov * dchi)
            }
            CoeffSpec::BumpAdd { base, interval: [lo, hi], height } => {
                let (bv, bd) = base.eval(x);
                let (e, de) = bump(x, *lo, *hi);
                (bv + height.0 * e, bd + height.0 * de)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |z: &Cplx| z.0.is_finite();
        match self {
            CoeffSpec::Poly { coeffs } => {
                if coeffs.is_empty() || !coeffs.iter().all(finite) {
                    return Err(Error::InvalidArgument("poly needs finite coefficients".into()));
                }
            }
            CoeffSpec::Trig { terms } => {
                if !terms.iter().all(|t| finite(&t.amp) && t.freq.is_finite()) {
                    return Err(Error::InvalidArgument("trig terms must be finite".into()));
                }
            }
            CoeffSpec::BumpZero { interval, outside, width } => {
                check_interval(interval)?;
                if !(*width > 0.0 && width.is_finite()) {
                    return Err(Error::InvalidArgument(format!("bump_zero width {width}")));
                }
                outside.validate()?;
            }
            CoeffSpec::BumpAdd { base, interval, height } => {
                check_interval(interval)?;
                if !finite(height) {
                    return Err(Error::InvalidArgument("bump height must be finite".into()));
                }
                base.validate()?;
            }
        }
        Ok(())
    }
}

fn check_interval(&[lo, hi]: &[f64; 2]) -> Result<()> {
    if !(0.0 <= lo && lo < hi && hi <= 1.0) {
        return Err(Error::InvalidArgument(format!("interval [{lo}, {hi}] not inside [0, 1]")));
    }
    Ok(())
}

/// Values and derivatives of all three coefficients at one point.
#[derive(Debug, Clone, Copy)]
pub struct CoeffValues {
    pub a: C64,
    pub da: C64,
    pub b: C64,
    pub db: C64,
    pub c: C64,
    pub dc: C64,
}

/// The coefficients `a, b, c` of `A(u, v) = (−u″ + a v′, b u′ + c v)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coefficients {
    pub a: CoeffSpec,
    pub b: CoeffSpec,
    pub c: CoeffSpec,
}

impl Coefficients {
    pub fn new(a: CoeffSpec, b: CoeffSpec, c: CoeffSpec) -> Result<Self> {
        let out = Self { a, b, c };
        out.validate()?;
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        self.a.validate()?;
        self.b.validate()?;
        self.c.validate()?;
        for k in 0..=256 {
            let v = self.at(k as f64 / 256.0);
            if ![v.a, v.da, v.b, v.db, v.c, v.dc].iter().all(|z| z.is_finite()) {
                return Err(Error::NonFinite("coefficient evaluation"));
            }
        }
        Ok(())
    }

    pub fn at(&self, x: f64) -> CoeffValues {
        let (a, da) = self.a.eval(x);
        let (b, db) = self.b.eval(x);
        let (c, dc) = self.c.eval(x);
        CoeffValues { a, da, b, db, c, dc }
    }

    /// `a = b = c = 0`: the first component decouples into `−u″`.
    pub fn decoupled() -> Self {
        Self { a: CoeffSpec::zero(), b: CoeffSpec::zero(), c: CoeffSpec::zero() }
    }

    /// Smooth fully coupled family with `ran(c)` and `ran(ab+c)` off the
    /// negative real axis.
    pub fn generic() -> Self {
        let re = |x: f64| Cplx(C64::new(x, 0.0));
        Self {
            a: CoeffSpec::poly(&[C64::new(1.0, 0.0), C64::new(0.5, 0.0)]),
            b: CoeffSpec::Trig {
                terms: vec![
                    TrigTerm { kind: TrigKind::Cos, freq: 0.0, amp: re(0.8) },
                    TrigTerm { kind: TrigKind::Cos, freq: 1.0, amp: re(0.2) },
                ],
            },
            c: CoeffSpec::poly(&[C64::new(0.0, 0.2), C64::new(0.3, 0.0)]),
        }
    }

    /// `a = 1`, `b` vanishing on `[0.4, 0.6]` and equal to `0.5i` away from
    /// it, `c = x`.
    pub fn counterexample_base() -> Self {
        Self {
            a: CoeffSpec::constant(C64::new(1.0, 0.0)),
            b: CoeffSpec::BumpZero {
                interval: [0.4, 0.6],
                outside: Box::new(CoeffSpec::constant(C64::new(0.0, 0.5))),
                width: default_width(),
            },
            c: CoeffSpec::poly(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]),
        }
    }
}

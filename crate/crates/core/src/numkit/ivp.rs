use num_complex::Complex64 as C64;

use super::ODE_TOL;
use crate::error::{Error, Result};

/// Controls for [`integrate_ivp`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IvpOptions {
    /// Per-step error tolerance, applied as `tol * (1 + |y|)` componentwise.
    pub tol: f64,
    /// Smallest admissible step, relative to the span length.
    pub h_min_rel: f64,
    pub max_steps: usize,
}

impl Default for IvpOptions {
    fn default() -> Self {
        Self { tol: ODE_TOL, h_min_rel: 1e-13, max_steps: 200_000 }
    }
}

impl IvpOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// Result of an integration: the state at the end of the span and at each
/// requested sample point, in the order the samples were given.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub end: Vec<C64>,
    pub samples: Vec<Vec<C64>>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// continuous extension: y(t + θh) = y + h Σ_i k_i Σ_j P[i][j] θ^(j+1)
const P: [[f64; 4]; 7] = [
    [1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0, -12715105075.0 / 11282082432.0],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0, 87487479700.0 / 32700410799.0],
    [0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0, -10690763975.0 / 1880347072.0],
    [0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0, 701980252875.0 / 199316789632.0],
    [0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0, -1453857185.0 / 822651844.0],
    [0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0],
];

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

/// Integrates `y' = rhs(t, y)` from `t0` to `t1 > t0` with an adaptive
/// Dormand–Prince 5(4) pair and PI step control, returning dense-output
/// samples at `sample_at` (each inside `[t0, t1]`, any order).
///
/// `rhs` writes the derivative into its third argument.
pub fn integrate_ivp<F>(
    mut rhs: F,
    y0: &[C64],
    (t0, t1): (f64, f64),
    opts: &IvpOptions,
    sample_at: &[f64],
) -> Result<Trajectory>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::InvalidArgument(format!("integration span [{t0}, {t1}]")));
    }
    if let Some(&bad) = sample_at.iter().find(|&&s| !(t0..=t1).contains(&s)) {
        return Err(Error::InvalidArgument(format!("sample point {bad} outside [{t0}, {t1}]")));
    }
    let m = y0.len();
    let zero = C64::new(0.0, 0.0);
    let mut order: Vec<usize> = (0..sample_at.len()).collect();
    order.sort_by(|&i, &j| sample_at[i].total_cmp(&sample_at[j]));
    let mut samples = vec![Vec::new(); sample_at.len()];
    let mut next_sample = 0;

    let mut y = y0.to_vec();
    let mut t = t0;
    let mut k = vec![vec![zero; m]; 7];
    let mut stage = vec![zero; m];
    let mut y_new = vec![zero; m];
    rhs(t, &y, &mut k[0]);
    check_finite(&k[0])?;

    let span = t1 - t0;
    let h_min = opts.h_min_rel * span;
    let mut h = initial_step(&mut rhs, t, &y, &k[0], opts.tol, span);
    let mut err_prev = 1e-4_f64;
    let mut rejected_last = false;
    let (mut accepted, mut rejected) = (0, 0);

    while next_sample < order.len() && sample_at[order[next_sample]] <= t {
        samples[order[next_sample]] = y.clone();
        next_sample += 1;
    }

    while t < t1 {
        if accepted + rejected >= opts.max_steps {
            return Err(Error::TooManySteps(opts.max_steps));
        }
        let last = t + h >= t1 || t1 - (t + h) < h_min;
        if last {
            h = t1 - t;
        }
        if h < h_min && !last {
            return Err(Error::StepUnderflow { t, h });
        }
        for s in 1..7 {
            for i in 0..m {
                let mut acc = zero;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += kj[i] * A[s][j];
                }
                stage[i] = y[i] + acc * h;
            }
            rhs(t + C[s] * h, &stage, &mut k[s]);
        }
        // stage 7 evaluated at the fifth-order solution (FSAL)
        y_new.copy_from_slice(&stage);
        let mut err = 0.0_f64;
        let mut finite = true;
        for i in 0..m {
            let mut e = zero;
            for (j, kj) in k.iter().enumerate() {
                e += kj[i] * E[j];
            }
            let scale = opts.tol * (1.0 + y[i].norm().max(y_new[i].norm()));
            let r = (e * h).norm() / scale;
            if !r.is_finite() {
                finite = false;
            }
            err = err.max(r);
        }
        if !finite {
            if h <= h_min {
                return Err(Error::StepUnderflow { t, h });
            }
            h *= 0.25;
            rejected += 1;
            rejected_last = true;
            continue;
        }
        if err <= 1.0 {
            let t_new = t + h;
            while next_sample < order.len() && sample_at[order[next_sample]] <= t_new {
                let idx = order[next_sample];
                let theta = ((sample_at[idx] - t) / h).clamp(0.0, 1.0);
                samples[idx] = dense(&y, &k, h, theta);
                next_sample += 1;
            }
            y.copy_from_slice(&y_new);
            t = if last { t1 } else { t_new };
            k.swap(0, 6);
            accepted += 1;
            let mut fac = SAFETY * err.max(1e-10).powf(-ALPHA) * err_prev.powf(BETA);
            fac = fac.clamp(FAC_MIN, FAC_MAX);
            if rejected_last {
                fac = fac.min(1.0);
            }
            err_prev = err.max(1e-4);
            rejected_last = false;
            h *= fac;
        } else {
            let fac = (SAFETY * err.powf(-ALPHA)).max(FAC_MIN);
            h *= fac;
            rejected += 1;
            rejected_last = true;
            if h < h_min {
                return Err(Error::StepUnderflow { t, h });
            }
        }
    }
    for &idx in &order[next_sample..] {
        samples[idx] = y.clone();
    }
    Ok(Trajectory { end: y, samples, accepted_steps: accepted, rejected_steps: rejected })
}

fn dense(y: &[C64], k: &[Vec<C64>], h: f64, theta: f64) -> Vec<C64> {
    let powers = [theta, theta * theta, theta.powi(3), theta.powi(4)];
    let weights: Vec<f64> = P.iter().map(|row| row.iter().zip(&powers).map(|(p, q)| p * q).sum()).collect();
    (0..y.len())
        .map(|i| y[i] + k.iter().zip(&weights).map(|(kj, w)| kj[i] * *w).sum::<C64>() * h)
        .collect()
}

fn check_finite(v: &[C64]) -> Result<()> {
    if v.iter().all(|z| z.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("ode right-hand side"))
    }
}

// Hairer–Nørsett–Wanner starting step heuristic.
fn initial_step<F>(rhs: &mut F, t: f64, y: &[C64], f0: &[C64], tol: f64, span: f64) -> f64
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let norm = |v: &[C64]| -> f64 {
        let s: f64 = v.iter().zip(y).map(|(a, b)| (a.norm() / (tol * (1.0 + b.norm()))).powi(2)).sum();
        (s / v.len().max(1) as f64).sqrt()
    };
    let d0 = norm(y);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let y1: Vec<C64> = y.iter().zip(f0).map(|(a, b)| a + b * h0).collect();
    let mut f1 = vec![C64::new(0.0, 0.0); y.len()];
    rhs(t + h0, &y1, &mut f1);
    let diff: Vec<C64> = f1.iter().zip(f0).map(|(a, b)| (a - b) / h0).collect();
    let d2 = norm(&diff);
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    let h = (100.0 * h0).min(h1).min(span);
    if h.is_finite() && h > 0.0 {
        h
    } else {
        1e-6 * span
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{c64, CMatrix};
    use proptest::prelude::*;

    const TOL: f64 = 1e-10;

    #[test]
    fn exponential_growth() {
        let tr = integrate_ivp(|_, y, d| d[0] = y[0], &[c64(1.0, 0.0)], (0.0, 1.0), &IvpOptions::with_tol(TOL), &[])
            .unwrap();
        let e = std::f64::consts::E;
        assert!((tr.end[0] - c64(e, 0.0)).norm() < 10.0 * TOL, "{}", (tr.end[0] - e).norm());
    }

    #[test]
    fn unitary_flow_keeps_modulus() {
        let samples: Vec<f64> = (0..=50).map(|k| k as f64 / 50.0 * 3.0).collect();
        let tr = integrate_ivp(
            |_, y, d| d[0] = y[0] * c64(0.0, 1.0),
            &[c64(1.0, 0.0)],
            (0.0, 3.0),
            &IvpOptions::with_tol(TOL),
            &samples,
        )
        .unwrap();
        for (t, s) in samples.iter().zip(&tr.samples) {
            assert!((s[0].norm() - 1.0).abs() < 10.0 * TOL, "t={t}");
            assert!((s[0] - c64(t.cos(), t.sin())).norm() < 10.0 * TOL, "t={t}");
        }
    }

    #[test]
    fn harmonic_oscillator() {
        let tr = integrate_ivp(
            |_, y, d| {
                d[0] = y[1];
                d[1] = -y[0];
            },
            &[c64(0.0, 0.0), c64(1.0, 0.0)],
            (0.0, 1.0),
            &IvpOptions::with_tol(TOL),
            &[],
        )
        .unwrap();
        assert!((tr.end[0] - c64(1f64.sin(), 0.0)).norm() < 10.0 * TOL);
    }

    #[test]
    fn samples_in_any_order_and_at_endpoints() {
        let pts = [1.0, 0.0, 0.5, 0.25, 1.0];
        let tr = integrate_ivp(|_, y, d| d[0] = y[0], &[c64(1.0, 0.0)], (0.0, 1.0), &IvpOptions::default(), &pts)
            .unwrap();
        for (t, s) in pts.iter().zip(&tr.samples) {
            assert!((s[0].re - t.exp()).abs() < 1e-9, "t={t}: {}", s[0]);
        }
    }

    #[test]
    fn rejects_bad_span_and_samples() {
        let f = |_: f64, y: &[C64], d: &mut [C64]| d[0] = y[0];
        let o = IvpOptions::default();
        assert!(integrate_ivp(f, &[c64(1.0, 0.0)], (1.0, 0.0), &o, &[]).is_err());
        assert!(integrate_ivp(f, &[c64(1.0, 0.0)], (0.0, 1.0), &o, &[1.5]).is_err());
    }

    #[test]
    fn singular_rhs_underflows() {
        // y' = 1 / (t - 0.5)^2 blows up inside the span
        let r = integrate_ivp(
            |t, _, d| d[0] = c64(1.0 / (t - 0.5).powi(2), 0.0),
            &[c64(0.0, 0.0)],
            (0.0, 1.0),
            &IvpOptions::default(),
            &[],
        );
        assert!(matches!(r, Err(Error::StepUnderflow { .. }) | Err(Error::TooManySteps(_))), "{r:?}");
    }

    // Scaling-and-squaring Taylor evaluation of exp(A).
    fn expm(a: &CMatrix) -> CMatrix {
        let norm = a.norm_inf();
        let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
        let scaled = a.scale(c64(0.5f64.powi(s), 0.0));
        let n = a.rows();
        let mut term = CMatrix::identity(n);
        let mut sum = CMatrix::identity(n);
        for k in 1..30 {
            term = (&term * &scaled).scale(c64(1.0 / k as f64, 0.0));
            let next = &sum - &term.scale(c64(-1.0, 0.0));
            sum = next;
        }
        for _ in 0..s {
            sum = &sum * &sum;
        }
        sum
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn linear_systems_match_matrix_exponential(
            entries in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 9),
            y0 in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3),
        ) {
            let a = CMatrix::new(3, 3, entries.iter().map(|&(r, i)| c64(r, i)).collect()).unwrap();
            let y0: Vec<C64> = y0.iter().map(|&(r, i)| c64(r, i)).collect();
            let tr = integrate_ivp(
                |_, y, d| d.copy_from_slice(&a.mul_vec(y)),
                &y0,
                (0.0, 1.0),
                &IvpOptions::with_tol(TOL),
                &[0.37],
            ).unwrap();
            let exact = expm(&a).mul_vec(&y0);
            let scale = 1.0 + exact.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for (p, q) in tr.end.iter().zip(&exact) {
                prop_assert!((p - q).norm() < 10.0 * TOL * scale, "{} vs {}", p, q);
            }
            let exact_mid = expm(&a.scale(c64(0.37, 0.0))).mul_vec(&y0);
            for (p, q) in tr.samples[0].iter().zip(&exact_mid) {
                prop_assert!((p - q).norm() < 10.0 * TOL * scale);
            }
        }
    }
}

//! Kernel of `A_max − λ` by shooting on the reduced scalar equation
//! `(α u₁′)′ = λ β u₁`, with `u₂ = g u₁′`, `g = b/(λ−c)`.

use num_complex::Complex64 as C64;

use super::coeffs::Coefficients;
use crate::error::{Error, Result};
use crate::numkit::{integrate_ivp, CMatrix, Grid, GridFunction, IvpOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelOptions {
    pub ivp: IvpOptions,
    /// Smallest admissible `|λ − c|` and `|a g − 1|`.
    pub den_eps: f64,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self { ivp: IvpOptions::default(), den_eps: 1e-10 }
    }
}

/// Pointwise data of the reduced equation at one `x`.
#[derive(Debug, Clone, Copy)]
pub struct Reduced {
    pub g: C64,
    pub dg: C64,
    /// `a g − 1`
    pub kappa: C64,
    pub q: C64,
    pub a: C64,
}

/// `g`, `g′`, `a g − 1` and `Q = a g′ / (a g − 1)` at `x`. Where `b` and
/// `b′` vanish identically `g = 0` and `c` never enters.
pub fn reduced(coeffs: &Coefficients, lambda: C64, x: f64, den_eps: f64) -> Result<Reduced> {
    let v = coeffs.at(x);
    let zero = C64::new(0.0, 0.0);
    let (g, dg) = if v.b == zero && v.db == zero {
        (zero, zero)
    } else {
        let d = lambda - v.c;
        if d.norm() < den_eps {
            return Err(Error::CoefficientSingularity { lambda, x });
        }
        (v.b / d, (v.db * d + v.b * v.dc) / (d * d))
    };
    let kappa = v.a * g - 1.0;
    if kappa.norm() < den_eps {
        return Err(Error::CoefficientSingularity { lambda, x });
    }
    Ok(Reduced { g, dg, kappa, q: v.a * dg / kappa, a: v.a })
}

/// `(Q(x), α(x), β(x))` with `α = exp ∫₀ˣ Q`, `β = α / (a g − 1)`.
pub fn q_alpha_beta(coeffs: &Coefficients, lambda: C64, x: f64, opts: &KernelOptions) -> Result<(C64, C64, C64)> {
    let r = reduced(coeffs, lambda, x, opts.den_eps)?;
    let log_alpha = if x == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        let mut fail = None;
        let traj = integrate_ivp(
            |t, _y, dy| match reduced(coeffs, lambda, t, opts.den_eps) {
                Ok(r) => dy[0] = r.q,
                Err(e) => {
                    fail.get_or_insert(e);
                    dy[0] = C64::new(f64::NAN, 0.0);
                }
            },
            &[C64::new(0.0, 0.0)],
            (0.0, x),
            &opts.ivp,
            &[],
        );
        if let Some(e) = fail {
            return Err(e);
        }
        traj?.end[0]
    };
    let alpha = log_alpha.exp();
    Ok((r.q, alpha, alpha / r.kappa))
}

/// Endpoint data of the two basis solutions.
#[derive(Debug, Clone, Copy)]
pub struct KernelEnds {
    pub y1: C64,
    pub dy1: C64,
    pub y2: C64,
    pub dy2: C64,
    /// `α(1)`
    pub alpha: C64,
    pub at0: Reduced,
    pub at1: Reduced,
}

/// Two kernel solutions `y1` (`y(0)=1, y′(0)=0`) and `y2` (`y(0)=0, y′(0)=1`)
/// of the reduced equation, sampled at `xs`.
#[derive(Debug, Clone)]
pub struct KernelPair {
    pub lambda: C64,
    pub xs: Vec<f64>,
    /// `y[k][j]`: value of solution `k` at `xs[j]`.
    pub y: [Vec<C64>; 2],
    pub dy: [Vec<C64>; 2],
    pub alpha: Vec<C64>,
    pub ends: KernelEnds,
    pub gamma0: CMatrix,
    pub gamma1: CMatrix,
}

impl KernelPair {
    /// `α (y1 y2′ − y2 y1′)` at every sample; identically 1 in exact
    /// arithmetic.
    pub fn modified_wronskian(&self) -> Vec<C64> {
        (0..self.xs.len())
            .map(|j| self.alpha[j] * (self.y[0][j] * self.dy[1][j] - self.y[1][j] * self.dy[0][j]))
            .collect()
    }
}

/// `u₁`, `u₁′` at both endpoints of one kernel element.
#[derive(Debug, Clone, Copy)]
pub struct EndpointData {
    pub u0: C64,
    pub du0: C64,
    pub u1: C64,
    pub du1: C64,
}

/// `Γ₀u = (u₁(1), u₁(0))`, `Γ₁u = (−u₁′(1) + a(1)u₂(1), u₁′(0) − a(0)u₂(0))`.
/// Missing `u₂` endpoint values are recovered as `g u₁′`.
pub fn gamma_traces(
    coeffs: &Coefficients,
    lambda: C64,
    ends: &EndpointData,
    u2: Option<(C64, C64)>,
    den_eps: f64,
) -> Result<([C64; 2], [C64; 2])> {
    let (u2_0, u2_1) = match u2 {
        Some(v) => v,
        None => {
            let r0 = reduced(coeffs, lambda, 0.0, den_eps)?;
            let r1 = reduced(coeffs, lambda, 1.0, den_eps)?;
            (r0.g * ends.du0, r1.g * ends.du1)
        }
    };
    let a0 = coeffs.at(0.0).a;
    let a1 = coeffs.at(1.0).a;
    Ok(([ends.u1, ends.u0], [-ends.du1 + a1 * u2_1, ends.du0 - a0 * u2_0]))
}

/// Shoots both basis solutions. State: `[log α, u, p, u, p]`, `p = α u′`.
pub fn kernel_pair(coeffs: &Coefficients, lambda: C64, xs: &[f64], opts: &KernelOptions) -> Result<KernelPair> {
    let at0 = reduced(coeffs, lambda, 0.0, opts.den_eps)?;
    let at1 = reduced(coeffs, lambda, 1.0, opts.den_eps)?;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut fail = None;
    let traj = integrate_ivp(
        |t, y, dy| match reduced(coeffs, lambda, t, opts.den_eps) {
            Ok(r) => {
                let alpha = y[0].exp();
                let lb = lambda * alpha / r.kappa;
                dy[0] = r.q;
                dy[1] = y[2] / alpha;
                dy[2] = lb * y[1];
                dy[3] = y[4] / alpha;
                dy[4] = lb * y[3];
            }
            Err(e) => {
                fail.get_or_insert(e);
                dy.fill(C64::new(f64::NAN, 0.0));
            }
        },
        &[zero, one, zero, zero, one],
        (0.0, 1.0),
        &opts.ivp,
        xs,
    );
    if let Some(e) = fail {
        return Err(e);
    }
    let traj = traj?;
    let unpack = |s: &[C64]| {
        let alpha = s[0].exp();
        (alpha, [s[1], s[3]], [s[2] / alpha, s[4] / alpha])
    };
    let mut y = [Vec::with_capacity(xs.len()), Vec::with_capacity(xs.len())];
    let mut dy = [Vec::with_capacity(xs.len()), Vec::with_capacity(xs.len())];
    let mut alpha = Vec::with_capacity(xs.len());
    for s in &traj.samples {
        let (al, v, d) = unpack(s);
        alpha.push(al);
        for k in 0..2 {
            y[k].push(v[k]);
            dy[k].push(d[k]);
        }
    }
    let (alpha1, v1, d1) = unpack(&traj.end);
    let ends = KernelEnds { y1: v1[0], dy1: d1[0], y2: v1[1], dy2: d1[1], alpha: alpha1, at0, at1 };
    let (g0, g1) = end_traces(&ends);
    Ok(KernelPair { lambda, xs: xs.to_vec(), y, dy, alpha, ends, gamma0: g0, gamma1: g1 })
}

/// Trace matrices (columns = basis solutions) from endpoint data. With
/// `u₂ = g u₁′` the Neumann-type traces reduce to `κ₁ u₁′(1)` and
/// `κ₀ u₁′(0)`, `κ₁ = a(1)g(1) − 1`, `κ₀ = 1 − a(0)g(0)`.
fn end_traces(e: &KernelEnds) -> (CMatrix, CMatrix) {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let k1 = e.at1.kappa;
    let k0 = -e.at0.kappa;
    let g0 = CMatrix::from_rows(&[[e.y1, e.y2], [one, zero]]);
    let g1 = CMatrix::from_rows(&[[k1 * e.dy1, k1 * e.dy2], [zero, k0]]);
    (g0, g1)
}

/// Endpoint data only; cheaper than sampling the interior.
pub fn kernel_ends(coeffs: &Coefficients, lambda: C64, opts: &KernelOptions) -> Result<(KernelEnds, CMatrix, CMatrix)> {
    let kp = kernel_pair(coeffs, lambda, &[], opts)?;
    Ok((kp.ends, kp.gamma0, kp.gamma1))
}

/// The two basis solutions as grid functions `(u₁, g u₁′)`.
pub fn kernel_grid_functions(coeffs: &Coefficients, lambda: C64, grid: Grid, opts: &KernelOptions) -> Result<Vec<GridFunction>> {
    let xs = grid.points();
    let kp = kernel_pair(coeffs, lambda, &xs, opts)?;
    let gs = xs
        .iter()
        .map(|&x| reduced(coeffs, lambda, x, opts.den_eps).map(|r| r.g))
        .collect::<Result<Vec<_>>>()?;
    (0..2)
        .map(|k| GridFunction::new(grid, (0..xs.len()).map(|j| [kp.y[k][j], gs[j] * kp.dy[k][j]]).collect()))
        .collect()
}

/// Kernel of `A′ − μ` for the formal adjoint
/// `A′(φ, ψ) = (−φ″ − (b̄ψ)′, −(āφ)′ + c̄ψ)`, as grid functions `(φ, ψ)`.
///
/// With `q = −φ′ − b̄ψ` the system is first order:
/// `φ′ = −q − b̄ψ`, `q′ = μφ`, `ψ = (ā q − ā′ φ)/(μ − conj(ab+c))`.
/// The two columns start from `(φ, q) = (1, 0)` and `(0, 1)` at `x = 0`.
pub fn adjoint_kernel(coeffs: &Coefficients, mu: C64, grid: Grid, opts: &KernelOptions) -> Result<Vec<GridFunction>> {
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let lambda = mu.conj();
    let psi_of = |x: f64, phi: C64, q: C64| -> Result<(C64, C64)> {
        let v = coeffs.at(x);
        if v.a == zero && v.da == zero {
            return Ok((zero, v.b.conj()));
        }
        let d = mu - (v.a * v.b + v.c).conj();
        if d.norm() < opts.den_eps {
            return Err(Error::CoefficientSingularity { lambda, x });
        }
        Ok(((v.a.conj() * q - v.da.conj() * phi) / d, v.b.conj()))
    };
    let xs = grid.points();
    let mut fail = None;
    let traj = integrate_ivp(
        |t, y, dy| {
            for k in 0..2 {
                let (phi, q) = (y[2 * k], y[2 * k + 1]);
                match psi_of(t, phi, q) {
                    Ok((psi, bc)) => {
                        dy[2 * k] = -q - bc * psi;
                        dy[2 * k + 1] = mu * phi;
                    }
                    Err(e) => {
                        fail.get_or_insert(e);
                        dy.fill(C64::new(f64::NAN, 0.0));
                        return;
                    }
                }
            }
        },
        &[one, zero, zero, one],
        (0.0, 1.0),
        &opts.ivp,
        &xs,
    );
    if let Some(e) = fail {
        return Err(e);
    }
    let traj = traj?;
    (0..2)
        .map(|k| {
            let vals = xs
                .iter()
                .zip(&traj.samples)
                .map(|(&x, s)| {
                    let (phi, q) = (s[2 * k], s[2 * k + 1]);
                    psi_of(x, phi, q).map(|(psi, _)| [phi, psi])
                })
                .collect::<Result<Vec<_>>>()?;
            GridFunction::new(grid, vals)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::c64;
    use std::f64::consts::PI;

    fn opts() -> KernelOptions {
        KernelOptions::default()
    }

    #[test]
    fn decoupled_cosh_sinh() {
        let c = Coefficients::decoupled();
        let xs: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        let kp = kernel_pair(&c, c64(-1.0, 0.0), &xs, &opts()).unwrap();
        for (j, &x) in xs.iter().enumerate() {
            assert!((kp.y[0][j] - x.cosh()).norm() < 1e-9);
            assert!((kp.y[1][j] - x.sinh()).norm() < 1e-9);
            assert!((kp.dy[0][j] - x.sinh()).norm() < 1e-9);
        }
        assert!((kp.ends.y1 - 1.0f64.cosh()).norm() < 1e-9);
        assert_eq!(kp.y[0][0], c64(1.0, 0.0));
        assert_eq!(kp.dy[1][0], c64(1.0, 0.0));
    }

    #[test]
    fn decoupled_dirichlet_signature() {
        let kp = kernel_pair(&Coefficients::decoupled(), c64(PI * PI, 0.0), &[], &opts()).unwrap();
        assert!(kp.ends.y2.norm() < 1e-8, "{}", kp.ends.y2);
    }

    #[test]
    fn alpha_trivial_without_a() {
        let c = Coefficients { a: super::super::coeffs::CoeffSpec::zero(), ..Coefficients::generic() };
        let (q, alpha, beta) = q_alpha_beta(&c, c64(-1.0, 0.3), 0.7, &opts()).unwrap();
        assert_eq!(q, c64(0.0, 0.0));
        assert!((alpha - 1.0).norm() < 1e-15);
        assert!((beta + 1.0).norm() < 1e-15);
    }

    #[test]
    fn traces_of_decoupled_cosh() {
        let c = Coefficients::decoupled();
        let e = EndpointData { u0: c64(1.0, 0.0), du0: c64(0.0, 0.0), u1: c64(1f64.cosh(), 0.0), du1: c64(1f64.sinh(), 0.0) };
        let (g0, g1) = gamma_traces(&c, c64(-1.0, 0.0), &e, None, 1e-10).unwrap();
        assert_eq!(g0, [c64(1f64.cosh(), 0.0), c64(1.0, 0.0)]);
        assert_eq!(g1, [c64(-1f64.sinh(), 0.0), c64(0.0, 0.0)]);
        let konst = EndpointData { u0: c64(1.0, 0.0), du0: c64(0.0, 0.0), u1: c64(1.0, 0.0), du1: c64(0.0, 0.0) };
        let (g0, g1) = gamma_traces(&c, c64(-1.0, 0.0), &konst, None, 1e-10).unwrap();
        assert_eq!(g0, [c64(1.0, 0.0); 2]);
        assert_eq!(g1, [c64(0.0, 0.0); 2]);
    }

    #[test]
    fn end_traces_match_gamma_traces() {
        let c = Coefficients::generic();
        let lambda = c64(-2.0, 0.5);
        let kp = kernel_pair(&c, lambda, &[], &opts()).unwrap();
        let e = kp.ends;
        for (k, (u1, du1)) in [(e.y1, e.dy1), (e.y2, e.dy2)].into_iter().enumerate() {
            let (u0, du0) = if k == 0 { (c64(1.0, 0.0), c64(0.0, 0.0)) } else { (c64(0.0, 0.0), c64(1.0, 0.0)) };
            let (g0, g1) = gamma_traces(&c, lambda, &EndpointData { u0, du0, u1, du1 }, None, 1e-10).unwrap();
            for r in 0..2 {
                assert!((g0[r] - kp.gamma0[(r, k)]).norm() < 1e-14);
                assert!((g1[r] - kp.gamma1[(r, k)]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn singular_coefficient_reported() {
        let c = Coefficients::generic();
        // λ on ran(c): c(0.5) = 0.15 + 0.2i
        let r = kernel_pair(&c, c64(0.15, 0.2), &[], &opts());
        assert!(matches!(r, Err(Error::CoefficientSingularity { .. }) | Err(Error::StepUnderflow { .. })), "{r:?}");
    }
}

//! Boundary-triplet engine over an abstract problem backend.
//!
//! Conventions, fixed once for the whole crate:
//!
//! * `Γ₀`, `Γ₁` map the maximal domain onto `C^d`; kernel data at `λ` is
//!   represented by the `d×d` matrices whose columns are the traces of a
//!   kernel basis.
//! * The Dirichlet-to-Neumann matrix is `P(λ) = Γ₁ ∘ (Γ₀|ker)⁻¹`.
//! * For the realization `Γ₁u = BΓ₀u` the M-function is `M = (P(λ) - B)⁻¹`,
//!   so `M (Γ₁ - BΓ₀) z = Γ₀ z` on the kernel.
//! * The resolvent of a realization is
//!   `(A_B - λ)⁻¹ f = (A_γ - λ)⁻¹ f - K(λ) E_X M R_Y w(f)` where
//!   `w(f)_k = (f, v_k)` pairs `f` with the adjoint kernel basis normalized to
//!   `Γ₀ v_k = e_k`, and `E_X`, `R_Y` are the identity for matrix
//!   realizations.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::numkit::{quad_inner, CMatrix, Grid, GridFunction, Lu, PIVOT_EPS};
use crate::par::{self, Execution};

/// Traces of a kernel basis at one spectral parameter: column `k` of
/// `gamma0` (resp. `gamma1`) is `Γ₀ z_k` (resp. `Γ₁ z_k`).
#[derive(Debug, Clone)]
pub struct BoundaryData {
    pub gamma0: CMatrix,
    pub gamma1: CMatrix,
}

/// A concrete operator with a boundary triplet of finite defect `d`.
pub trait ProblemBackend: Sync {
    fn defect_dim(&self) -> usize;

    fn grid(&self) -> Grid;

    /// `d` linearly independent elements of `ker(A_max - λ)`.
    fn kernel_basis(&self, lambda: C64) -> Result<Vec<GridFunction>>;

    fn gamma0(&self, u: &GridFunction) -> Vec<C64>;

    fn gamma1(&self, u: &GridFunction) -> Vec<C64>;

    /// Solves `(A - λ)w = f` with `Γ₀w = 0`.
    fn reference_resolvent(&self, lambda: C64, f: &GridFunction) -> Result<GridFunction>;

    /// `d` elements spanning `ker(A'_max - μ)` for the formal adjoint `A'`;
    /// callers pass `μ = λ̄`.
    fn adjoint_kernel_basis(&self, mu: C64) -> Result<Vec<GridFunction>>;

    /// Boundary traces of the kernel basis. Backends with exact endpoint
    /// data should override this.
    fn boundary_data(&self, lambda: C64) -> Result<BoundaryData> {
        let basis = self.kernel_basis(lambda)?;
        let g0: Vec<Vec<C64>> = basis.iter().map(|z| self.gamma0(z)).collect();
        let g1: Vec<Vec<C64>> = basis.iter().map(|z| self.gamma1(z)).collect();
        Ok(BoundaryData { gamma0: CMatrix::from_columns(&g0)?, gamma1: CMatrix::from_columns(&g1)? })
    }

    /// Poisson operator: the kernel element with `Γ₀ = phi`.
    fn poisson(&self, lambda: C64, phi: &[C64]) -> Result<GridFunction> {
        let basis = self.kernel_basis(lambda)?;
        let g0: Vec<Vec<C64>> = basis.iter().map(|z| self.gamma0(z)).collect();
        let coeffs = Lu::factor(&CMatrix::from_columns(&g0)?, PIVOT_EPS)
            .map_err(|_| Error::DirichletSpectrum { lambda })?
            .solve(phi)?;
        GridFunction::combination(&basis, &coeffs)
    }
}

/// Mixed realization `Γ₀u ∈ ran(selX)`, `selY Γ₁u = L₁ selX Γ₀u`.
///
/// `l1` acts between reduced coordinates: it is `rank(selY) × rank(selX)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceRealization {
    sel_x: Vec<bool>,
    sel_y: Vec<bool>,
    l1: CMatrix,
}

impl SubspaceRealization {
    pub fn new(sel_x: Vec<bool>, sel_y: Vec<bool>, l1: CMatrix) -> Result<Self> {
        if sel_x.len() != sel_y.len() {
            return Err(Error::DimensionMismatch(format!(
                "selectors of length {} and {}",
                sel_x.len(),
                sel_y.len()
            )));
        }
        let rx = sel_x.iter().filter(|&&s| s).count();
        let ry = sel_y.iter().filter(|&&s| s).count();
        if rx != ry {
            return Err(Error::DimensionMismatch(format!("selector ranks {rx} (X) and {ry} (Y) differ")));
        }
        if (l1.rows(), l1.cols()) != (ry, rx) {
            return Err(Error::DimensionMismatch(format!(
                "L1 is {}x{}, selectors need {ry}x{rx}",
                l1.rows(),
                l1.cols()
            )));
        }
        Ok(Self { sel_x, sel_y, l1 })
    }

    /// The reference realization `Γ₀u = 0`.
    pub fn dirichlet(d: usize) -> Self {
        Self { sel_x: vec![false; d], sel_y: vec![false; d], l1: CMatrix::zeros(0, 0) }
    }

    pub fn dim(&self) -> usize {
        self.sel_x.len()
    }

    pub fn rank(&self) -> usize {
        self.l1.rows()
    }

    pub fn sel_x(&self) -> &[bool] {
        &self.sel_x
    }

    pub fn sel_y(&self) -> &[bool] {
        &self.sel_y
    }

    pub fn l1(&self) -> &CMatrix {
        &self.l1
    }

    /// `d × r` embedding of the X-coordinates.
    pub fn embed_x(&self) -> CMatrix {
        selector_columns(&self.sel_x)
    }

    /// `r × d` restriction to the Y-coordinates.
    pub fn restrict_y(&self) -> CMatrix {
        selector_columns(&self.sel_y).transpose()
    }
}

fn selector_columns(sel: &[bool]) -> CMatrix {
    let r = sel.iter().filter(|&&s| s).count();
    let mut e = CMatrix::zeros(sel.len(), r);
    for (col, (row, _)) in sel.iter().enumerate().filter(|(_, &s)| s).enumerate() {
        e[(row, col)] = C64::new(1.0, 0.0);
    }
    e
}

/// A boundary condition selecting a realization between `A_min` and
/// `A_max`.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryRealization {
    /// `Γ₁u = BΓ₀u`.
    Matrix(CMatrix),
    Subspace(SubspaceRealization),
}

impl BoundaryRealization {
    pub fn neumann(d: usize) -> Self {
        Self::Matrix(CMatrix::zeros(d, d))
    }

    pub fn dirichlet(d: usize) -> Self {
        Self::Subspace(SubspaceRealization::dirichlet(d))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Matrix(b) => b.rows(),
            Self::Subspace(s) => s.dim(),
        }
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        let ok = match self {
            Self::Matrix(b) => b.rows() == d && b.cols() == d,
            Self::Subspace(s) => s.dim() == d,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!("realization does not act on C^{d}")))
        }
    }

    /// Rows `(C₀, C₁)` such that the realization is `C₀Γ₀u + C₁Γ₁u = 0`.
    pub fn condition_rows(&self) -> (CMatrix, CMatrix) {
        match self {
            Self::Matrix(b) => (b.scale(C64::new(-1.0, 0.0)), CMatrix::identity(b.rows())),
            Self::Subspace(s) => {
                let d = s.dim();
                let mut c0 = CMatrix::zeros(d, d);
                let mut c1 = CMatrix::zeros(d, d);
                let mut row = 0;
                for (i, &sx) in s.sel_x.iter().enumerate() {
                    if !sx {
                        c0[(row, i)] = C64::new(1.0, 0.0);
                        row += 1;
                    }
                }
                let ex = s.embed_x();
                let ys: Vec<usize> = s.sel_y.iter().enumerate().filter(|(_, &v)| v).map(|(i, _)| i).collect();
                for (j, &yi) in ys.iter().enumerate() {
                    c1[(row, yi)] = C64::new(1.0, 0.0);
                    // -L1[j,:] R_X, with R_X = E_Xᵀ
                    for i in 0..d {
                        let v: C64 = (0..s.rank()).map(|k| s.l1[(j, k)] * ex[(i, k)]).sum();
                        c0[(row, i)] = -v;
                    }
                    row += 1;
                }
                (c0, c1)
            }
        }
    }

    /// The reduced boundary matrix whose inverse is the M-function:
    /// `P - B`, or `R_Y P E_X - L₁`.
    pub fn reduced_system(&self, dtn: &CMatrix) -> CMatrix {
        match self {
            Self::Matrix(b) => dtn - b,
            Self::Subspace(s) => &(&(&s.restrict_y() * dtn) * &s.embed_x()) - &s.l1,
        }
    }
}

/// One evaluation of the M-function.
#[derive(Debug, Clone)]
pub struct MSample {
    pub lambda: C64,
    pub m: CMatrix,
    /// The matrix that was inverted to obtain `m`.
    pub system: CMatrix,
    /// `|system|_∞ |m|_∞`.
    pub cond: f64,
}

impl MSample {
    /// `|M · system - I|_∞`.
    pub fn identity_residual(&self) -> f64 {
        let n = self.m.rows();
        (&(&self.m * &self.system) - &CMatrix::identity(n)).norm_inf()
    }
}

/// `P = Γ₁ (Γ₀|ker)⁻¹` from kernel traces.
pub fn dtn_from_boundary(data: &BoundaryData, lambda: C64) -> Result<CMatrix> {
    let inv = Lu::factor(&data.gamma0, PIVOT_EPS)
        .map_err(|_| Error::DirichletSpectrum { lambda })?
        .inverse()?;
    data.gamma1.matmul(&inv)
}

pub fn dtn_matrix<B: ProblemBackend + ?Sized>(backend: &B, lambda: C64) -> Result<CMatrix> {
    dtn_from_boundary(&backend.boundary_data(lambda)?, lambda)
}

/// Inverts the reduced system of `realization` at a known DtN matrix.
pub fn m_from_dtn(realization: &BoundaryRealization, dtn: &CMatrix, lambda: C64) -> Result<MSample> {
    let system = realization.reduced_system(dtn);
    let m = if system.rows() == 0 {
        CMatrix::zeros(0, 0)
    } else {
        Lu::factor(&system, PIVOT_EPS)
            .map_err(|_| Error::SpectralPoint { lambda })?
            .inverse()?
    };
    let cond = system.norm_inf() * m.norm_inf();
    Ok(MSample { lambda, m, system, cond })
}

/// `M_B(λ) = (P(λ) - B)⁻¹`.
pub fn mfunction<B: ProblemBackend + ?Sized>(backend: &B, b: &CMatrix, lambda: C64) -> Result<MSample> {
    let realization = BoundaryRealization::Matrix(b.clone());
    realization.validate(backend.defect_dim())?;
    m_from_dtn(&realization, &dtn_matrix(backend, lambda)?, lambda)
}

/// `M₁(λ) = (R_Y P(λ) E_X - L₁)⁻¹`, mapping Y-coordinates to X-coordinates.
pub fn subspace_mfunction<B: ProblemBackend + ?Sized>(
    backend: &B,
    realization: &SubspaceRealization,
    lambda: C64,
) -> Result<MSample> {
    let r = BoundaryRealization::Subspace(realization.clone());
    r.validate(backend.defect_dim())?;
    m_from_dtn(&r, &dtn_matrix(backend, lambda)?, lambda)
}

pub fn realization_mfunction<B: ProblemBackend + ?Sized>(
    backend: &B,
    realization: &BoundaryRealization,
    lambda: C64,
) -> Result<MSample> {
    realization.validate(backend.defect_dim())?;
    m_from_dtn(realization, &dtn_matrix(backend, lambda)?, lambda)
}

/// `det(C₀Γ₀ + C₁Γ₁)` over the kernel basis. It vanishes exactly when
/// `ker(A_R - λ) ≠ {0}`, and equals `det(P - B) det(Γ₀|ker)` for matrix
/// realizations, so it has no poles at the Dirichlet spectrum.
pub fn characteristic_det(data: &BoundaryData, realization: &BoundaryRealization) -> C64 {
    let (c0, c1) = realization.condition_rows();
    (&(&c0 * &data.gamma0) + &(&c1 * &data.gamma1)).det()
}

/// Adjoint kernel basis recombined so that its `Γ₀`-traces are the unit
/// vectors.
pub fn normalized_adjoint_basis<B: ProblemBackend + ?Sized>(backend: &B, lambda: C64) -> Result<Vec<GridFunction>> {
    let adj = backend.adjoint_kernel_basis(lambda.conj())?;
    let traces: Vec<Vec<C64>> = adj.iter().map(|v| backend.gamma0(v)).collect();
    let t_inv = Lu::factor(&CMatrix::from_columns(&traces)?, PIVOT_EPS)
        .map_err(|_| Error::DirichletSpectrum { lambda })?
        .inverse()?;
    (0..adj.len())
        .map(|j| GridFunction::combination(&adj, &t_inv.column(j)))
        .collect()
}

/// Applies the resolvent of `realization` through the Kreĭn formula.
pub fn krein_apply<B: ProblemBackend + ?Sized>(
    backend: &B,
    realization: &BoundaryRealization,
    lambda: C64,
    f: &GridFunction,
) -> Result<GridFunction> {
    realization.validate(backend.defect_dim())?;
    let w0 = backend.reference_resolvent(lambda, f)?;
    let adjoint = normalized_adjoint_basis(backend, lambda)?;
    let pairings = adjoint.iter().map(|v| quad_inner(f, v)).collect::<Result<Vec<_>>>()?;
    let sample = m_from_dtn(realization, &dtn_matrix(backend, lambda)?, lambda)?;
    let phi = match realization {
        BoundaryRealization::Matrix(_) => sample.m.mul_vec(&pairings),
        BoundaryRealization::Subspace(s) => {
            let reduced = s.restrict_y().mul_vec(&pairings);
            s.embed_x().mul_vec(&sample.m.mul_vec(&reduced))
        }
    };
    let correction = backend.poisson(lambda, &phi)?;
    w0.axpy(C64::new(-1.0, 0.0), &correction)
}

/// Circle `center + radius e^{iθ}` discretized by `nodes` equispaced points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contour {
    pub center: C64,
    pub radius: f64,
    pub nodes: usize,
}

impl Contour {
    pub fn circle(center: C64, radius: f64, nodes: usize) -> Self {
        Self { center, radius, nodes }
    }

    pub fn node(&self, k: usize) -> (C64, C64) {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / self.nodes as f64;
        let e = C64::from_polar(1.0, theta);
        (self.center + e * self.radius, e)
    }
}

/// `|(1/2πi) ∮ M(λ) dλ|_∞` by the trapezoid rule on the contour nodes.
/// Near zero iff the sampler has no singularity inside the circle.
pub fn holomorphy_residual<F>(sampler: F, contour: &Contour, exec: Execution) -> Result<f64>
where
    F: Fn(C64) -> Result<CMatrix> + Sync + Send,
{
    if contour.nodes == 0 || !(contour.radius > 0.0) {
        return Err(Error::InvalidArgument("contour needs nodes > 0 and radius > 0".into()));
    }
    let values = par::map_range(exec, contour.nodes, |k| {
        let (z, e) = contour.node(k);
        sampler(z).map(|m| (m, e)).map_err(|err| Error::SamplerFailed { node: k, source: Box::new(err) })
    });
    let mut acc: Option<CMatrix> = None;
    for v in values {
        let (m, e) = v?;
        let term = m.scale(e * (contour.radius / contour.nodes as f64));
        acc = Some(match acc {
            None => term,
            Some(a) => &a + &term,
        });
    }
    Ok(acc.map_or(0.0, |a| a.norm_inf()))
}

/// Rectangular λ-grid, row-major with rows of constant imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaWindow {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
}

impl LambdaWindow {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|v| v.is_finite());
        if !finite || self.n_re == 0 || self.n_im == 0 || self.re_max < self.re_min || self.im_max < self.im_min {
            return Err(Error::InvalidArgument(format!("invalid lambda window {self:?}")));
        }
        Ok(())
    }

    fn axis(lo: f64, hi: f64, n: usize, k: usize) -> f64 {
        if n == 1 {
            lo
        } else if k == n - 1 {
            hi
        } else {
            lo + (hi - lo) * k as f64 / (n - 1) as f64
        }
    }

    pub fn len(&self) -> usize {
        self.n_re * self.n_im
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, row: usize, col: usize) -> C64 {
        C64::new(
            Self::axis(self.re_min, self.re_max, self.n_re, col),
            Self::axis(self.im_min, self.im_max, self.n_im, row),
        )
    }

    pub fn points(&self) -> Vec<C64> {
        (0..self.n_im).flat_map(|r| (0..self.n_re).map(move |c| (r, c))).map(|(r, c)| self.point(r, c)).collect()
    }

    pub fn step_re(&self) -> f64 {
        if self.n_re > 1 {
            (self.re_max - self.re_min) / (self.n_re - 1) as f64
        } else {
            0.0
        }
    }

    pub fn step_im(&self) -> f64 {
        if self.n_im > 1 {
            (self.im_max - self.im_min) / (self.n_im - 1) as f64
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointStatus {
    Ok,
    Spectral,
    EssTube,
    DirichletSpectrum,
    CoeffSingular,
}

impl PointStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Ok => "ok",
            Self::Spectral => "spectral",
            Self::EssTube => "ess_tube",
            Self::DirichletSpectrum => "dirichlet_spectrum",
            Self::CoeffSingular => "coeff_singular",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScanPoint {
    pub lambda: C64,
    /// Characteristic determinant, when the kernel could be computed.
    pub det: Option<C64>,
    /// `|M(λ)|_∞`, zero when the M-function could not be formed.
    pub inv_norm: f64,
    pub status: PointStatus,
}

#[derive(Debug, Clone)]
pub struct SpectralScan {
    pub points: Vec<ScanPoint>,
    pub max_abs_det: f64,
    /// Points with `|det| < threshold` are flagged spectral.
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    /// Relative flag level: spectral when `|det| < flag_rel * max|det|`.
    pub flag_rel: f64,
    pub exec: Execution,
    pub refine_tol: f64,
    pub max_refine_iter: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { flag_rel: 1e-8, exec: Execution::Parallel, refine_tol: 1e-13, max_refine_iter: 60 }
    }
}

fn classify_error(err: &Error) -> PointStatus {
    match err {
        Error::EssentialTube { .. } => PointStatus::EssTube,
        Error::DirichletSpectrum { .. } => PointStatus::DirichletSpectrum,
        Error::SpectralPoint { .. } => PointStatus::Spectral,
        _ => PointStatus::CoeffSingular,
    }
}

fn scan_point<B: ProblemBackend + ?Sized>(backend: &B, realization: &BoundaryRealization, lambda: C64) -> ScanPoint {
    let data = match backend.boundary_data(lambda) {
        Ok(d) => d,
        Err(e) => return ScanPoint { lambda, det: None, inv_norm: 0.0, status: classify_error(&e) },
    };
    let det = characteristic_det(&data, realization);
    let (inv_norm, status) = match dtn_from_boundary(&data, lambda).and_then(|p| m_from_dtn(realization, &p, lambda)) {
        Ok(s) => (s.m.norm_inf(), PointStatus::Ok),
        Err(e) => (0.0, classify_error(&e)),
    };
    ScanPoint { lambda, det: Some(det), inv_norm, status }
}

/// Evaluates the characteristic determinant and `|M|` on every λ. Points
/// never abort the scan; failures are recorded in their status.
pub fn eig_scan<B: ProblemBackend + ?Sized>(
    backend: &B,
    realization: &BoundaryRealization,
    lambdas: &[C64],
    opts: &ScanOptions,
) -> Result<SpectralScan> {
    realization.validate(backend.defect_dim())?;
    let mut points = par::map(opts.exec, lambdas, |&z| scan_point(backend, realization, z));
    let max_abs_det = points.iter().filter_map(|p| p.det).map(|d| d.norm()).fold(0.0, f64::max);
    let threshold = opts.flag_rel * max_abs_det;
    for p in &mut points {
        if let Some(d) = p.det {
            if d.norm() < threshold {
                p.status = PointStatus::Spectral;
            }
        }
    }
    Ok(SpectralScan { points, max_abs_det, threshold })
}

/// Characteristic determinant at one λ.
pub fn det_at<B: ProblemBackend + ?Sized>(backend: &B, realization: &BoundaryRealization, lambda: C64) -> Result<C64> {
    Ok(characteristic_det(&backend.boundary_data(lambda)?, realization))
}

/// Complex secant iteration on the characteristic determinant.
pub fn refine_root<B: ProblemBackend + ?Sized>(
    backend: &B,
    realization: &BoundaryRealization,
    z0: C64,
    z1: C64,
    opts: &ScanOptions,
) -> Option<C64> {
    let (mut a, mut b) = (z0, z1);
    let mut fa = det_at(backend, realization, a).ok()?;
    let mut fb = det_at(backend, realization, b).ok()?;
    for _ in 0..opts.max_refine_iter {
        if fb.norm() == 0.0 {
            return Some(b);
        }
        let denom = fb - fa;
        if denom.norm() == 0.0 {
            return None;
        }
        let next = b - fb * (b - a) / denom;
        if !next.is_finite() {
            return None;
        }
        let step = (next - b).norm();
        a = b;
        fa = fb;
        b = next;
        fb = det_at(backend, realization, b).ok()?;
        if step <= opts.refine_tol * b.norm().max(1.0) {
            return Some(b);
        }
    }
    None
}

/// A refined zero of the characteristic determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub lambda: C64,
    pub abs_det: f64,
}

/// Refines local minima of `|det|` along each row of a window scan into
/// zeros of the characteristic determinant. Roots are kept when they lie in
/// the window (padded by one cell), fall below the scan's flag threshold and
/// are not duplicates; the result is sorted by real then imaginary part.
pub fn locate_spectrum<B: ProblemBackend + ?Sized>(
    backend: &B,
    realization: &BoundaryRealization,
    window: &LambdaWindow,
    scan: &SpectralScan,
    opts: &ScanOptions,
) -> Vec<SpectralPoint> {
    let nr = window.n_re;
    let mut starts = Vec::new();
    for row in 0..window.n_im {
        let abs = |c: usize| -> Option<f64> {
            let p = &scan.points[row * nr + c];
            match p.status {
                PointStatus::EssTube | PointStatus::CoeffSingular => None,
                _ => p.det.map(|d| d.norm()),
            }
        };
        for c in 0..nr {
            let Some(v) = abs(c) else { continue };
            let left = if c > 0 { abs(c - 1) } else { None };
            let right = if c + 1 < nr { abs(c + 1) } else { None };
            if left.is_none() && right.is_none() && nr > 1 {
                continue;
            }
            let is_min = left.is_none_or(|l| v <= l) && right.is_none_or(|r| v <= r);
            if !is_min {
                continue;
            }
            let z = scan.points[row * nr + c].lambda;
            let partner = match (left, right) {
                (Some(l), Some(r)) if l < r => scan.points[row * nr + c - 1].lambda,
                (_, Some(_)) => scan.points[row * nr + c + 1].lambda,
                (Some(_), None) => scan.points[row * nr + c - 1].lambda,
                (None, None) => z + C64::new(1e-3 * z.norm().max(1.0), 0.0),
            };
            starts.push((z, partner));
        }
    }
    let pad_re = window.step_re().max(window.step_im());
    let pad_im = window.step_im().max(window.step_re());
    let cell = (window.step_re().powi(2) + window.step_im().powi(2)).sqrt().max(1e-12);
    let found = par::map(opts.exec, &starts, |&(z, w)| {
        let root = refine_root(backend, realization, z, w, opts)?;
        let inside = root.re >= window.re_min - pad_re
            && root.re <= window.re_max + pad_re
            && root.im >= window.im_min - pad_im
            && root.im <= window.im_max + pad_im;
        if !inside || (root - z).norm() > 3.0 * cell {
            return None;
        }
        let abs_det = det_at(backend, realization, root).ok()?.norm();
        (abs_det < scan.threshold).then_some(SpectralPoint { lambda: root, abs_det })
    });
    let mut roots: Vec<SpectralPoint> = Vec::new();
    for p in found.into_iter().flatten() {
        if roots.iter().all(|q| (q.lambda - p.lambda).norm() > 1e-6 * p.lambda.norm().max(1.0)) {
            roots.push(p);
        } else if let Some(q) = roots
            .iter_mut()
            .find(|q| (q.lambda - p.lambda).norm() <= 1e-6 * p.lambda.norm().max(1.0))
        {
            if p.abs_det < q.abs_det {
                *q = p;
            }
        }
    }
    roots.sort_by(|a, b| a.lambda.re.total_cmp(&b.lambda.re).then(a.lambda.im.total_cmp(&b.lambda.im)));
    roots
}

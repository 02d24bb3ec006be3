use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use log::{info, warn};
use mfunclab::halfspace::{dtn_symbol, m_symbol, HalfspaceParams};
use mfunclab::numkit::{c64, Grid, GridFunction};
use mfunclab::odelab::essspec::polyline_distance;
use mfunclab::odelab::{ess_spectrum_curve, hausdorff_distance, twin_counterexample, KernelOptions, OdeBackend};
use mfunclab::par::{self, Execution};
use mfunclab::triplet::{
    eig_scan, krein_apply, locate_spectrum, realization_mfunction, BoundaryRealization, LambdaWindow, ScanOptions,
};
use mfunclab::{Error as CoreError, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{Config, HalfspaceSpec, RealizationSpec, WindowSpec};
use crate::error::CliError;
use crate::output::{fmt_f64, write_csv, write_json};

pub const ESS_CURVE_SAMPLES: usize = 1024;
const RESAMPLE_ATTEMPTS: usize = 3;

/// Run-wide settings shared by every command.
#[derive(Debug, Clone, Copy)]
pub struct RunContext<'a> {
    pub out: &'a Path,
    pub seed: u64,
    pub exec: Execution,
}

fn build_backend(cfg: &Config, coeffs: mfunclab::odelab::Coefficients) -> Result<OdeBackend, CliError> {
    let mut opts = KernelOptions::default();
    opts.ivp.tol = cfg.tolerances.ode_tol;
    opts.den_eps = cfg.tolerances.den_eps;
    OdeBackend::with_options(coeffs, cfg.grid_n(), opts, cfg.tolerances.tube_eps).map_err(CliError::Backend)
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Debug, Serialize)]
pub struct DetectedRoot {
    pub re: f64,
    pub im: f64,
    pub abs_det: f64,
}

#[derive(Debug, Serialize)]
pub struct ScanSummary {
    pub schema: &'static str,
    pub version: &'static str,
    pub conventions: BTreeMap<&'static str, &'static str>,
    pub window: WindowSpec,
    pub realization: RealizationSpec,
    pub grid_n: usize,
    pub n_points: usize,
    pub status_counts: BTreeMap<&'static str, usize>,
    pub max_abs_det: f64,
    pub flag_threshold: f64,
    pub detected: Vec<DetectedRoot>,
    pub ess_spectrum: Vec<[f64; 2]>,
}

fn conventions() -> BTreeMap<&'static str, &'static str> {
    BTreeMap::from([
        ("gamma0", "(u1(1), u1(0))"),
        ("gamma1", "(-u1'(1) + a(1) u2(1), u1'(0) - a(0) u2(0))"),
        ("dtn", "P = Gamma1 (Gamma0 restricted to the kernel)^-1"),
        ("m_function", "M = (P - B)^-1; subspace: (R_Y P E_X - L1)^-1"),
        ("det", "det(C0 Gamma0 + C1 Gamma1) over a kernel basis"),
        ("inv_norm", "max row sum of |M|"),
        ("krein", "u = w0 - K M (f, v)"),
    ])
}

pub fn cmd_scan(cfg: &Config, ctx: &RunContext) -> Result<ScanSummary, CliError> {
    let window = cfg.window()?;
    let realization = cfg.realization()?;
    let coeffs = cfg.coefficients()?.clone();
    let backend = build_backend(cfg, coeffs.clone())?;
    info!("scan: {} points on grid {}", window.len(), cfg.grid_n());
    let opts = ScanOptions { flag_rel: cfg.tolerances.flag_rel, exec: ctx.exec, ..ScanOptions::default() };
    let scan = eig_scan(&backend, &realization, &window.points(), &opts)?;
    let roots = locate_spectrum(&backend, &realization, &window, &scan, &opts);
    let curve = ess_spectrum_curve(&coeffs, ESS_CURVE_SAMPLES)?;

    let mut counts = BTreeMap::new();
    let rows: Vec<Vec<String>> = scan
        .points
        .iter()
        .map(|p| {
            *counts.entry(p.status.as_str()).or_insert(0) += 1;
            let (dr, di) = p.det.map_or((String::new(), String::new()), |d| (fmt_f64(d.re), fmt_f64(d.im)));
            vec![
                fmt_f64(p.lambda.re),
                fmt_f64(p.lambda.im),
                dr,
                di,
                fmt_f64(p.inv_norm),
                fmt_f64(polyline_distance(p.lambda, &curve.samples)),
                p.status.as_str().to_string(),
            ]
        })
        .collect();
    write_csv(
        &ctx.out.join(&cfg.outputs.scan_csv),
        &["re", "im", "det_re", "det_im", "inv_norm", "ess_dist", "status"],
        rows,
    )?;

    let summary = ScanSummary {
        schema: "mfunclab.scan/1",
        version: env!("CARGO_PKG_VERSION"),
        conventions: conventions(),
        window: cfg.window.unwrap(),
        realization: cfg.realization.clone().unwrap_or_else(RealizationSpec::neumann),
        grid_n: cfg.grid_n(),
        n_points: scan.points.len(),
        status_counts: counts,
        max_abs_det: scan.max_abs_det,
        flag_threshold: scan.threshold,
        detected: roots.iter().map(|r| DetectedRoot { re: r.lambda.re, im: r.lambda.im, abs_det: r.abs_det }).collect(),
        ess_spectrum: curve.samples.iter().map(|&z| pair(z)).collect(),
    };
    write_json(&ctx.out.join(&cfg.outputs.scan_summary), &summary)?;
    info!("scan: {} spectral points located", summary.detected.len());
    Ok(summary)
}

#[derive(Debug, Serialize)]
pub struct TwinReport {
    pub schema: &'static str,
    pub interval: [f64; 2],
    pub bump_height: [f64; 2],
    pub n_points: usize,
    pub n_compared: usize,
    pub n_skipped: usize,
    #[serde(rename = "max_M_diff")]
    pub max_m_diff: f64,
    pub hausdorff: f64,
    pub m_diff_tol: f64,
    pub hausdorff_threshold: f64,
    pub pass: bool,
}

pub fn cmd_compare_twins(cfg: &Config, ctx: &RunContext) -> Result<TwinReport, CliError> {
    let spec = cfg.twin.as_ref().ok_or_else(|| CliError::Config("missing `twin`".into()))?;
    let window: LambdaWindow = match &spec.window {
        Some(w) => w.to_window()?,
        None => cfg.window()?,
    };
    let realization = cfg.realization()?;
    let (base, twin) = twin_counterexample(cfg.coefficients()?, (spec.interval[0], spec.interval[1]), spec.bump_height.0)?;
    let hausdorff = hausdorff_distance(
        &ess_spectrum_curve(&base, ESS_CURVE_SAMPLES)?.samples,
        &ess_spectrum_curve(&twin, ESS_CURVE_SAMPLES)?.samples,
    );
    let b_base = build_backend(cfg, base)?;
    let b_twin = build_backend(cfg, twin)?;
    let diffs = par::map(ctx.exec, &window.points(), |&z| {
        let m0 = realization_mfunction(&b_base, &realization, z).ok()?;
        let m1 = realization_mfunction(&b_twin, &realization, z).ok()?;
        Some((&m0.m - &m1.m).norm_inf())
    });
    let compared: Vec<f64> = diffs.iter().flatten().copied().collect();
    let n_skipped = diffs.len() - compared.len();
    if n_skipped > 0 {
        warn!("compare-twins: {n_skipped} grid points skipped (spectral or inside the tube)");
    }
    if compared.is_empty() && !diffs.is_empty() {
        return Err(CliError::SpectralSampling("no λ on the twin grid admits an M-function".into()));
    }
    let max_m_diff = compared.iter().copied().fold(0.0, f64::max);
    let tol = cfg.tolerances;
    let report = TwinReport {
        schema: "mfunclab.twins/1",
        interval: spec.interval,
        bump_height: pair(spec.bump_height.0),
        n_points: diffs.len(),
        n_compared: compared.len(),
        n_skipped,
        max_m_diff,
        hausdorff,
        m_diff_tol: tol.m_diff_tol,
        hausdorff_threshold: tol.hausdorff_threshold,
        pass: max_m_diff < tol.m_diff_tol && hausdorff > tol.hausdorff_threshold,
    };
    write_json(&ctx.out.join(&cfg.outputs.twins), &report)?;
    info!("compare-twins: max |dM| = {max_m_diff:.3e}, hausdorff = {hausdorff:.4}");
    Ok(report)
}

/// Random trigonometric polynomial of degree at most 8 in each component,
/// coefficient vector of unit length.
pub fn random_trig(rng: &mut impl Rng, grid: Grid) -> GridFunction {
    let mut coeffs: Vec<[C64; 2]> = (0..9)
        .map(|_| {
            [
                c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            ]
        })
        .collect();
    let norm = coeffs.iter().map(|c| c[0].norm_sqr() + c[1].norm_sqr()).sum::<f64>().sqrt();
    for c in &mut coeffs {
        c[0] /= norm;
        c[1] /= norm;
    }
    GridFunction::from_fn(grid, |x| {
        let mut v = [c64(0.0, 0.0); 2];
        for (k, c) in coeffs.iter().enumerate() {
            let (s, w) = (PI * k as f64 * x).sin_cos();
            v[0] += c[0] * if k % 2 == 0 { w } else { s };
            v[1] += c[1] * if k % 2 == 0 { s } else { w };
        }
        v
    })
}

#[derive(Debug, Serialize)]
pub struct KreinTrial {
    pub lambda: [f64; 2],
    pub trial: usize,
    pub rel_l2: f64,
}

#[derive(Debug, Serialize)]
pub struct KreinLambda {
    pub requested: [f64; 2],
    pub used: [f64; 2],
    pub resamples: usize,
}

#[derive(Debug, Serialize)]
pub struct KreinReport {
    pub schema: &'static str,
    pub seed: u64,
    pub n_trials: usize,
    pub lambdas: Vec<KreinLambda>,
    pub trials: Vec<KreinTrial>,
    pub max: Option<f64>,
    pub median: Option<f64>,
    pub tol: f64,
    pub pass: bool,
}

fn is_spectral_failure(e: &CoreError) -> bool {
    matches!(
        e,
        CoreError::SpectralPoint { .. }
            | CoreError::DirichletSpectrum { .. }
            | CoreError::EssentialTube { .. }
            | CoreError::CoefficientSingularity { .. }
    )
}

fn usable_lambda(
    backend: &OdeBackend,
    realization: &BoundaryRealization,
    requested: C64,
    radius: f64,
    rng: &mut impl Rng,
) -> Result<(C64, usize), CliError> {
    let mut z = requested;
    for attempt in 0..=RESAMPLE_ATTEMPTS {
        match realization_mfunction(backend, realization, z) {
            Ok(_) => return Ok((z, attempt)),
            Err(e) if is_spectral_failure(&e) => {
                warn!("krein-verify: λ = {z} unusable ({e}), resampling");
                let (r, t) = (radius * rng.gen::<f64>().sqrt(), 2.0 * PI * rng.gen::<f64>());
                z = requested + C64::from_polar(r, t);
            }
            Err(e) => return Err(CliError::Backend(e)),
        }
    }
    Err(CliError::SpectralSampling(format!(
        "λ = {requested} still spectral after {RESAMPLE_ATTEMPTS} resamples"
    )))
}

/// `n_trials` overrides the configured trial count.
pub fn cmd_krein_verify(cfg: &Config, ctx: &RunContext, n_trials: Option<usize>) -> Result<KreinReport, CliError> {
    let spec = cfg.krein.as_ref().ok_or_else(|| CliError::Config("missing `krein`".into()))?;
    let n_trials = n_trials.unwrap_or(spec.n_trials);
    let realization = cfg.realization()?;
    let backend = build_backend(cfg, cfg.coefficients()?.clone())?;
    let grid = Grid::new(cfg.grid_n()).map_err(|e| CliError::Config(e.to_string()))?;

    let mut f_rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut l_rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    l_rng.set_stream(1);
    let mut lambdas = Vec::new();
    let mut jobs = Vec::new();
    if n_trials > 0 {
        for req in &spec.lambdas {
            let (z, resamples) = usable_lambda(&backend, &realization, req.0, spec.resample_radius, &mut l_rng)?;
            lambdas.push(KreinLambda { requested: pair(req.0), used: pair(z), resamples });
            for t in 0..n_trials {
                jobs.push((z, t, random_trig(&mut f_rng, grid)));
            }
        }
    }
    info!("krein-verify: {} trials", jobs.len());
    let results = par::map(ctx.exec, &jobs, |(z, t, f)| -> Result<KreinTrial, CoreError> {
        let k = krein_apply(&backend, &realization, *z, f)?;
        let d = backend.direct_resolvent(&realization, *z, f)?;
        Ok(KreinTrial { lambda: pair(*z), trial: *t, rel_l2: k.l2_distance(&d)? / d.l2_norm() })
    });
    let trials = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut errs: Vec<f64> = trials.iter().map(|t| t.rel_l2).collect();
    errs.sort_by(f64::total_cmp);
    let max = errs.last().copied();
    let median = match errs.len() {
        0 => None,
        n if n % 2 == 1 => Some(errs[n / 2]),
        n => Some(0.5 * (errs[n / 2 - 1] + errs[n / 2])),
    };
    let tol = cfg.tolerances.krein_tol;
    let report = KreinReport {
        schema: "mfunclab.krein/1",
        seed: ctx.seed,
        n_trials,
        lambdas,
        trials,
        max,
        median,
        tol,
        pass: max.is_none_or(|m| m < tol),
    };
    write_json(&ctx.out.join(&cfg.outputs.krein), &report)?;
    if let (Some(m), Some(md)) = (max, median) {
        info!("krein-verify: max rel error {m:.3e}, median {md:.3e}");
    }
    Ok(report)
}

#[derive(Debug, Serialize)]
pub struct HalfspaceReport {
    pub rows: usize,
    pub max_det_p_check: f64,
}

pub fn cmd_halfspace(cfg: &Config, ctx: &RunContext) -> Result<HalfspaceReport, CliError> {
    let spec = cfg.halfspace.clone().unwrap_or_default();
    let symbol_c = spec.symbol_c.map_or(c64(0.0, 0.0), |c| c.0);
    let make = |rho: f64, mu: C64| match &spec.bvec {
        Some(b) => HalfspaceParams::from_bvec(rho, mu, b, spec.direction),
        None => HalfspaceParams::new(rho, mu, symbol_c),
    };
    let samples = halfspace_samples(&spec);
    let params = samples
        .iter()
        .map(|&(rho, mu)| make(rho, mu).map_err(|e| CliError::Config(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = par::map(ctx.exec, &params, |p| {
        let dtn = dtn_symbol(p);
        let check = (dtn.det() - p.lambda() / 4.0).norm();
        let m = m_symbol(p).unwrap_or(c64(f64::NAN, f64::NAN));
        let mut row = vec![fmt_f64(p.rho()), fmt_f64(p.mu().re), fmt_f64(p.mu().im)];
        for i in 0..2 {
            for j in 0..2 {
                row.push(fmt_f64(dtn[(i, j)].re));
                row.push(fmt_f64(dtn[(i, j)].im));
            }
        }
        row.extend([fmt_f64(m.re), fmt_f64(m.im), fmt_f64(check)]);
        (row, check)
    });
    let max_det_p_check = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    write_csv(
        &ctx.out.join(&cfg.outputs.halfspace_csv),
        &[
            "rho", "mu_re", "mu_im", "p11_re", "p11_im", "p12_re", "p12_im", "p21_re", "p21_im", "p22_re", "p22_im",
            "m_re", "m_im", "det_p_check",
        ],
        rows.iter().map(|r| r.0.clone()),
    )?;
    info!("halfspace: {} rows, max det check {max_det_p_check:.3e}", rows.len());
    Ok(HalfspaceReport { rows: rows.len(), max_det_p_check })
}

/// `(ρ, μ)` samples in ρ-major order.
pub fn halfspace_samples(spec: &HalfspaceSpec) -> Vec<(f64, C64)> {
    let (args, mods) = (spec.arg_mu.values(), spec.abs_mu.values());
    let mut out = Vec::new();
    for rho in spec.rho.values() {
        for &t in &args {
            for &r in &mods {
                out.push((rho, C64::from_polar(r, t)));
            }
        }
    }
    out
}

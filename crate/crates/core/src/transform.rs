//! The Jacobi transform pair
//! `f̂(λ) = ∫_0^∞ f(t) φ_λ(t) Δ(t) dt` and `f(t) = ∫_0^∞ f̂(λ) φ_λ(t) dν(λ)`,
//! `dν(λ) = (2π)^{-1} |c(λ)|^{-2} dλ`, by composite quadrature.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{JacobiError, Result};
use crate::grid::PhiGrid;
use crate::jacobi::{spectral_density, weight_delta, JacobiParams};
use crate::quadrature::{
    adaptive_gk, composite_gauss, tanh_sinh, uniform_breaks, QuadRule, QuadratureSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothness {
    Smooth,
    Piecewise,
    Singular,
}

type RadialFn = dyn Fn(f64) -> Complex64 + Send + Sync;
type SpectralFn = dyn Fn(Complex64) -> Complex64 + Send + Sync;

/// Function of the radial variable `t >= 0`.
#[derive(Clone)]
pub struct RadialFunction {
    f: Arc<RadialFn>,
    /// Radius beyond which the function is treated as zero.
    pub support_hint: f64,
    pub smoothness: Smoothness,
}

impl fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialFunction")
            .field("support_hint", &self.support_hint)
            .field("smoothness", &self.smoothness)
            .finish_non_exhaustive()
    }
}

impl RadialFunction {
    pub fn new<F>(support_hint: f64, smoothness: Smoothness, f: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        RadialFunction { f: Arc::new(f), support_hint, smoothness }
    }

    pub fn real<F>(support_hint: f64, smoothness: Smoothness, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(support_hint, smoothness, move |t| Complex64::new(f(t), 0.0))
    }

    #[inline]
    pub fn eval(&self, t: f64) -> Complex64 {
        (self.f)(t)
    }

    pub fn zero() -> Self {
        Self::real(0.0, Smoothness::Smooth, |_| 0.0)
    }

    /// `e^{-(t/w)²}`.
    pub fn gaussian(width: f64) -> Self {
        Self::real(f64::INFINITY, Smoothness::Smooth, move |t| (-(t / width).powi(2)).exp())
    }

    /// `exp(1 - 1/(1 - (t/a)²))` on `[0, a)`, zero beyond: smooth, compactly supported, peak 1.
    pub fn bump(a: f64) -> Self {
        Self::real(a, Smoothness::Smooth, move |t| {
            let x = t / a;
            if x.abs() < 1.0 {
                (1.0 - 1.0 / (1.0 - x * x)).exp()
            } else {
                0.0
            }
        })
    }

    /// Indicator of `[0, a]`.
    pub fn indicator(a: f64) -> Self {
        Self::real(a, Smoothness::Piecewise, move |t| if t <= a { 1.0 } else { 0.0 })
    }

    /// `a·f + b·g`.
    pub fn combine(a: Complex64, f: &RadialFunction, b: Complex64, g: &RadialFunction) -> Self {
        let (f, g) = (f.clone(), g.clone());
        let smoothness = if f.smoothness == Smoothness::Smooth && g.smoothness == Smoothness::Smooth {
            Smoothness::Smooth
        } else {
            Smoothness::Piecewise
        };
        let hint = f.support_hint.max(g.support_hint);
        Self::new(hint, smoothness, move |t| a * f.eval(t) + b * g.eval(t))
    }

    /// Tabulates the function on `ts` (useful for expensive closures).
    pub fn sample(&self, ts: &[f64]) -> Vec<Complex64> {
        ts.par_iter().map(|&t| self.eval(t)).collect()
    }
}

/// Function of the spectral variable, typically even.
#[derive(Clone)]
pub struct SpectralFunction {
    f: Arc<SpectralFn>,
    /// Claimed holomorphy strip `|Im λ| < strip`; `None` when not analytic,
    /// infinity for entire functions.
    pub strip: Option<f64>,
    pub even: bool,
}

impl fmt::Debug for SpectralFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralFunction")
            .field("strip", &self.strip)
            .field("even", &self.even)
            .finish_non_exhaustive()
    }
}

impl SpectralFunction {
    pub fn new<F>(strip: Option<f64>, even: bool, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        SpectralFunction { f: Arc::new(f), strip, even }
    }

    #[inline]
    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        (self.f)(lambda)
    }

    #[inline]
    pub fn eval_real(&self, lambda: f64) -> Complex64 {
        (self.f)(Complex64::new(lambda, 0.0))
    }

    pub fn zero() -> Self {
        Self::new(None, true, |_| Complex64::new(0.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(Some(f64::INFINITY), true, move |_| c)
    }

    /// Heat symbol `e^{-s(λ² + ρ²)}`.
    pub fn heat(params: &JacobiParams, s: f64) -> Self {
        let rho = params.rho();
        Self::new(Some(f64::INFINITY), true, move |l| (-(l * l + rho * rho) * s).exp())
    }

    /// Checks `g(λ) = g(-λ)` on the given points.
    pub fn check_even(&self, lambdas: &[Complex64], tol: f64) -> bool {
        lambdas.iter().all(|&l| {
            let (a, b) = (self.eval(l), self.eval(-l));
            (a - b).norm() <= tol * a.norm().max(1.0)
        })
    }
}

/// Quadrature bookkeeping returned with every transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformDiagnostics {
    pub nodes: usize,
    pub panels: usize,
    /// Truncation point: `t_max` for forward transforms, `λ_max` for inverse ones.
    pub cutoff: f64,
    /// Relative size of the neglected tail.
    pub tail_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transformed {
    pub values: Vec<Complex64>,
    pub diagnostics: TransformDiagnostics,
}

/// Gauss order used on each panel for a requested tolerance.
pub(crate) fn panel_order(tol: f64) -> usize {
    if tol >= 1e-4 {
        8
    } else if tol >= 1e-7 {
        12
    } else if tol >= 1e-10 {
        16
    } else {
        24
    }
}

/// Nodes and weights on the given panels under the chosen rule.
pub(crate) fn panel_rule(breaks: &[f64], quad: &QuadratureSpec) -> (Vec<f64>, Vec<f64>) {
    match quad.rule {
        QuadRule::AdaptiveGauss => composite_gauss(breaks, panel_order(quad.tol)),
        QuadRule::TanhSinh => {
            let ts = tanh_sinh(4);
            let mut nodes = Vec::new();
            let mut weights = Vec::new();
            for w in breaks.windows(2) {
                let h = w[1] - w[0];
                for n in &ts.nodes {
                    nodes.push(w[0] + h * n.x);
                    weights.push(h * n.w);
                }
            }
            (nodes, weights)
        }
    }
}

/// Forward-transform nodes `t_j` and weights `w_j f(t_j) Δ(t_j)`.
struct ForwardRule {
    ts: Vec<f64>,
    weights: Vec<Complex64>,
    diagnostics: TransformDiagnostics,
    l1: f64,
}

fn forward_rule(
    params: &JacobiParams,
    f: &RadialFunction,
    lambda_abs_max: f64,
    quad: &QuadratureSpec,
) -> Result<ForwardRule> {
    quad.validate()?;
    let t_end = f.support_hint.min(quad.t_max);
    if t_end <= 0.0 {
        return Ok(ForwardRule {
            ts: vec![],
            weights: vec![],
            diagnostics: TransformDiagnostics { nodes: 0, panels: 0, cutoff: 0.0, tail_estimate: 0.0 },
            l1: 0.0,
        });
    }
    let width = (2.0 * PI / lambda_abs_max.max(1.0)).min(0.25);
    let breaks = uniform_breaks(0.0, t_end, width);
    let (ts, w) = panel_rule(&breaks, quad);
    let weights: Vec<Complex64> = ts
        .iter()
        .zip(&w)
        .map(|(&t, &wt)| f.eval(t) * (wt * weight_delta(params, t)))
        .collect();
    let l1: f64 = ts
        .iter()
        .zip(&weights)
        .map(|(&t, wf)| wf.norm() * (-params.rho() * t).exp())
        .sum();
    let tail_abs = if t_end < f.support_hint {
        f.eval(t_end).norm() * (2.0 * params.rho() * t_end).exp()
    } else {
        0.0
    };
    let tail_estimate = if l1 > 0.0 { tail_abs / l1 } else { tail_abs };
    if tail_estimate > quad.tol {
        return Err(JacobiError::TailBudget { estimate: tail_estimate, budget: quad.tol });
    }
    let diagnostics = TransformDiagnostics {
        nodes: ts.len(),
        panels: breaks.len() - 1,
        cutoff: t_end,
        tail_estimate,
    };
    Ok(ForwardRule { ts, weights, diagnostics, l1 })
}

/// `f̂(λ)` for complex `λ`.
pub fn forward_transform_complex(
    params: &JacobiParams,
    f: &RadialFunction,
    lambdas: &[Complex64],
    quad: &QuadratureSpec,
) -> Result<Transformed> {
    params.require_strict("forward transform")?;
    let lmax = lambdas.iter().map(|l| l.re.abs()).fold(0.0, f64::max);
    let rule = forward_rule(params, f, lmax, quad)?;
    if rule.ts.is_empty() {
        return Ok(Transformed {
            values: vec![Complex64::new(0.0, 0.0); lambdas.len()],
            diagnostics: rule.diagnostics,
        });
    }
    let grid = PhiGrid::new(params, &rule.ts)?;
    let values = grid.dots(lambdas, &rule.weights)?;
    Ok(Transformed { values, diagnostics: rule.diagnostics })
}

/// `f̂(λ) = ∫ f φ_λ Δ dt` on real `λ`.
pub fn forward_transform(
    params: &JacobiParams,
    f: &RadialFunction,
    lambdas: &[f64],
    quad: &QuadratureSpec,
) -> Result<Transformed> {
    let ls: Vec<Complex64> = lambdas.iter().map(|&l| Complex64::new(l, 0.0)).collect();
    forward_transform_complex(params, f, &ls, quad)
}

/// Inverse-transform nodes `λ_k` with weights `w_k d(λ_k)`.
pub(crate) struct SpectralRule {
    pub lambdas: Vec<f64>,
    pub weights: Vec<f64>,
    pub panels: usize,
}

/// Panels on `[0, λ_max]`; with oscillatory splitting their ends sit at the
/// zeros of `cos(λ t*)`, `t*` the largest output radius.
pub(crate) fn spectral_rule(params: &JacobiParams, t_star: f64, quad: &QuadratureSpec) -> SpectralRule {
    let lmax = quad.lambda_max;
    let breaks = if quad.oscillatory_splitting && t_star > PI {
        let h = PI / t_star;
        let mut b = vec![0.0];
        let mut x = 0.5 * h;
        while x < lmax {
            b.push(x);
            x += h;
        }
        b.push(lmax);
        b
    } else {
        uniform_breaks(0.0, lmax, 1.0)
    };
    let (lambdas, w) = panel_rule(&breaks, quad);
    let weights = lambdas.iter().zip(&w).map(|(&l, &wt)| wt * spectral_density(params, l)).collect();
    SpectralRule { lambdas, weights, panels: breaks.len() - 1 }
}

/// Relative tail `∫_{λ_max}^∞ |g| dν / ∫_0^{λ_max} |g| dν` from a power-law fit.
fn spectral_tail(params: &JacobiParams, g: &dyn Fn(f64) -> f64, lmax: f64, head: f64) -> f64 {
    let pts = [0.5 * lmax, 0.75 * lmax, lmax];
    let h: Vec<f64> = pts.iter().map(|&l| g(l) * spectral_density(params, l)).collect();
    if h[2] == 0.0 {
        return 0.0;
    }
    if h.iter().any(|v| *v <= 0.0 || !v.is_finite()) {
        return f64::INFINITY;
    }
    let xs: Vec<f64> = pts.iter().map(|l| l.ln()).collect();
    let ys: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / 3.0;
    let my = ys.iter().sum::<f64>() / 3.0;
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    if slope >= -1.0 {
        return f64::INFINITY;
    }
    let tail = h[2] * lmax / (-slope - 1.0);
    if head > 0.0 {
        tail / head
    } else {
        tail
    }
}

pub(crate) fn synthesize(
    params: &JacobiParams,
    rule: &SpectralRule,
    gvals: &[Complex64],
    ts: &[f64],
) -> Result<Vec<Complex64>> {
    let grid = PhiGrid::new(params, ts)?;
    let zero = || vec![Complex64::new(0.0, 0.0); ts.len()];
    let idx: Vec<usize> = (0..rule.lambdas.len()).filter(|&k| gvals[k] != Complex64::new(0.0, 0.0)).collect();
    idx.par_iter()
        .map(|&k| -> Result<Vec<Complex64>> {
            let row = grid.row(Complex64::new(rule.lambdas[k], 0.0))?;
            let c = gvals[k] * rule.weights[k];
            Ok(row.into_iter().map(|v| v * c).collect())
        })
        .try_fold(zero, |mut acc, r| {
            for (a, b) in acc.iter_mut().zip(r?) {
                *a += b;
            }
            Ok(acc)
        })
        .try_reduce(zero, |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            Ok(a)
        })
}

/// `∫_0^{λ_max} g(λ) φ_λ(t) dν(λ)` for each `t`.
pub fn inverse_transform(
    params: &JacobiParams,
    g: &SpectralFunction,
    ts: &[f64],
    quad: &QuadratureSpec,
) -> Result<Transformed> {
    params.require_strict("inverse transform")?;
    quad.validate()?;
    let t_star = ts.iter().cloned().fold(0.0, f64::max);
    let rule = spectral_rule(params, t_star, quad);
    let gvals: Vec<Complex64> = rule.lambdas.par_iter().map(|&l| g.eval_real(l)).collect();
    if gvals.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(JacobiError::Domain("spectral function is not finite on the real axis".into()));
    }
    let head: f64 = gvals.iter().zip(&rule.weights).map(|(v, w)| v.norm() * w).sum();
    let tail_estimate = spectral_tail(params, &|l| g.eval_real(l).norm(), quad.lambda_max, head);
    if tail_estimate > quad.tol {
        return Err(JacobiError::TailBudget { estimate: tail_estimate, budget: quad.tol });
    }
    let values = synthesize(params, &rule, &gvals, ts)?;
    Ok(Transformed {
        values,
        diagnostics: TransformDiagnostics {
            nodes: rule.lambdas.len(),
            panels: rule.panels,
            cutoff: quad.lambda_max,
            tail_estimate,
        },
    })
}

/// Forward transform followed by inversion; returns `f̂` on the spectral
/// nodes, the reconstruction on `ts` and the largest deviation from `f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Roundtrip {
    pub ts: Vec<f64>,
    pub reconstructed: Vec<Complex64>,
    pub max_error: f64,
    pub forward: TransformDiagnostics,
    pub inverse: TransformDiagnostics,
}

pub fn roundtrip(
    params: &JacobiParams,
    f: &RadialFunction,
    ts: &[f64],
    quad: &QuadratureSpec,
) -> Result<Roundtrip> {
    params.require_strict("roundtrip")?;
    let t_star = ts.iter().cloned().fold(0.0, f64::max);
    let rule = spectral_rule(params, t_star, quad);
    let fh = forward_transform(params, f, &rule.lambdas, quad)?;
    let head: f64 = fh.values.iter().zip(&rule.weights).map(|(v, w)| v.norm() * w).sum();
    let last = fh.values.len().saturating_sub(1);
    let tail_estimate = if fh.values.is_empty() {
        0.0
    } else {
        let scale = fh.values[last].norm() * spectral_density(params, rule.lambdas[last]) * quad.lambda_max;
        if head > 0.0 {
            scale / head
        } else {
            scale
        }
    };
    let reconstructed = synthesize(params, &rule, &fh.values, ts)?;
    let max_error = ts
        .iter()
        .zip(&reconstructed)
        .map(|(&t, v)| (v - f.eval(t)).norm())
        .fold(0.0, f64::max);
    Ok(Roundtrip {
        ts: ts.to_vec(),
        reconstructed,
        max_error,
        forward: fh.diagnostics,
        inverse: TransformDiagnostics {
            nodes: rule.lambdas.len(),
            panels: rule.panels,
            cutoff: quad.lambda_max,
            tail_estimate,
        },
    })
}

/// `∫_0^T |f|² Δ dt` by adaptive Gauss–Kronrod on unit panels.
pub fn l2_norm_sq(params: &JacobiParams, f: &RadialFunction, quad: &QuadratureSpec) -> Result<f64> {
    let t_end = f.support_hint.min(quad.t_max);
    let mut total = 0.0;
    for w in uniform_breaks(0.0, t_end.max(0.0), 1.0).windows(2) {
        let (v, _) = adaptive_gk(
            |t| Complex64::new(f.eval(t).norm_sqr() * weight_delta(params, t), 0.0),
            w[0],
            w[1],
            (total * quad.tol * 1e-3).max(1e-300),
            quad.tol * 1e-3,
        )?;
        total += v.re;
    }
    Ok(total)
}

/// `|‖f‖²_{L²(dμ)} - ‖f̂‖²_{L²(dν)}| / ‖f‖²_{L²(dμ)}`; zero for `f = 0`.
pub fn plancherel_defect(params: &JacobiParams, f: &RadialFunction, quad: &QuadratureSpec) -> Result<f64> {
    params.require_strict("plancherel defect")?;
    let lhs = l2_norm_sq(params, f, quad)?;
    if lhs == 0.0 {
        return Ok(0.0);
    }
    let t_end = f.support_hint.min(quad.t_max);
    let width = (PI / t_end.max(1.0)).min(1.0);
    let breaks = uniform_breaks(0.0, quad.lambda_max, width);
    let (ls, w) = panel_rule(&breaks, quad);
    let fh = forward_transform(params, f, &ls, quad)?;
    let rhs: f64 = fh
        .values
        .iter()
        .zip(ls.iter().zip(&w))
        .map(|(v, (&l, &wt))| v.norm_sqr() * wt * spectral_density(params, l))
        .sum();
    Ok((lhs - rhs).abs() / lhs)
}

/// Windowed decay profile of `|f̂(λ)|(1+|λ|)^n e^{-A|Im λ|}` on the strip `|Im λ| <= ρ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaleyWienerReport {
    pub support: f64,
    pub n: u32,
    /// Window centers and maxima of the weighted modulus; windows entirely
    /// below the rounding floor are omitted.
    pub windows: Vec<(f64, f64)>,
    /// Log-log slope of the window maxima.
    pub slope: f64,
    pub bounded: bool,
}

/// Largest slope of the windowed maxima still counted as bounded.
pub const PW_SLOPE_LIMIT: f64 = 0.1;

pub fn paley_wiener_profile(
    params: &JacobiParams,
    f: &RadialFunction,
    n: u32,
    quad: &QuadratureSpec,
) -> Result<PaleyWienerReport> {
    let a = f.support_hint;
    if !a.is_finite() {
        return Err(JacobiError::Domain("Paley-Wiener check needs a compact support hint".into()));
    }
    let rho = params.rho();
    let lmax = quad.lambda_max;
    let step = 0.25f64.min(PI / (4.0 * a.max(1e-3)));
    let nre = (lmax / step).ceil() as usize;
    let ims = [0.0, 0.5 * rho, rho];
    let mut lambdas = Vec::with_capacity((nre + 1) * ims.len());
    for &im in &ims {
        for k in 0..=nre {
            lambdas.push(Complex64::new(k as f64 * step, im));
        }
    }
    let fh = forward_transform_complex(params, f, &lambdas, quad)?;
    let rule = forward_rule(params, f, lmax, quad)?;
    let floor = 1e3 * f64::EPSILON * rule.l1 * (rho * a).exp();
    let n_win = 8;
    let lo = lmax / 8.0;
    let ratio = (lmax / lo).powf(1.0 / n_win as f64);
    let mut windows = Vec::new();
    for w in 0..n_win {
        let (a0, a1) = (lo * ratio.powi(w), lo * ratio.powi(w + 1));
        let mut best: f64 = 0.0;
        let mut above_floor = false;
        for (l, v) in lambdas.iter().zip(&fh.values) {
            if l.re < a0 || l.re > a1 {
                continue;
            }
            if v.norm() > floor {
                above_floor = true;
            }
            let h = v.norm() * (1.0 + l.norm()).powi(n as i32) * (-a * l.im.abs()).exp();
            best = best.max(h);
        }
        if above_floor {
            windows.push(((a0 * a1).sqrt(), best));
        }
    }
    let slope = if windows.len() < 2 {
        f64::NEG_INFINITY
    } else {
        let xs: Vec<f64> = windows.iter().map(|w| w.0.ln()).collect();
        let ys: Vec<f64> = windows.iter().map(|w| w.1.ln()).collect();
        let k = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / k;
        let my = ys.iter().sum::<f64>() / k;
        xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>()
    };
    Ok(PaleyWienerReport { support: a, n, windows, slope, bounded: slope <= PW_SLOPE_LIMIT })
}

/// True iff `|f̂(λ)|(1+|λ|)^n e^{-A|Im λ|}` stays bounded on the sampled strip.
pub fn paley_wiener_smoke(params: &JacobiParams, f: &RadialFunction, n: u32, quad: &QuadratureSpec) -> bool {
    paley_wiener_profile(params, f, n, quad).map(|r| r.bounded).unwrap_or(false)
}

/// `ℒf = f'' + ((2α+1)coth t + (2β+1)tanh t) f'` by central differences of the even extension.
pub fn laplacian_fd(params: &JacobiParams, f: &RadialFunction, h: f64) -> RadialFunction {
    let g = f.clone();
    let (a, b) = (params.alpha(), params.beta());
    RadialFunction::new(f.support_hint + h, f.smoothness, move |t| {
        let fp = g.eval((t + h).abs());
        let f0 = g.eval(t.abs());
        let fm = g.eval((t - h).abs());
        let d2 = (fp - 2.0 * f0 + fm) / (h * h);
        let d1 = (fp - fm) / (2.0 * h);
        if t < 1e-12 {
            d2 * (2.0 * a + 2.0)
        } else {
            d2 + d1 * ((2.0 * a + 1.0) / t.tanh() + (2.0 * b + 1.0) * t.tanh())
        }
    })
}

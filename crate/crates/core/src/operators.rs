//! Multiplier operators: kernels `m^∨`, the local/global split, the Hörmander
//! norm, the heat semigroup and Riesz potentials with their `L^p-L^q` region.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotic::R0;
use crate::error::{JacobiError, Result};
use crate::grid::PhiGrid;
use crate::hypergroup::{convolve, ConvGrid};
use crate::jacobi::{phi, spectral_density, EvalMethod, JacobiParams};
use crate::quadrature::{composite_gauss, QuadratureSpec};
use crate::special::bessel_k_third;
use crate::transform::{
    forward_transform, inverse_transform, panel_order, spectral_rule, synthesize, RadialFunction,
    Smoothness, SpectralFunction,
};

/// Lebesgue exponent in `[1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(JacobiError::Domain(format!("exponent must lie in [1, ∞], got {p}")))
        }
    }

    /// `1/p`, zero at infinity.
    pub fn reciprocal(self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinity => 0.0,
        }
    }

    pub fn from_reciprocal(r: f64) -> Result<Self> {
        if r == 0.0 {
            Ok(Exponent::Infinity)
        } else if r > 0.0 && r <= 1.0 {
            Ok(Exponent::Finite(1.0 / r))
        } else {
            Err(JacobiError::Domain(format!("1/p must lie in [0, 1], got {r}")))
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Exponent::Finite(_))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = JacobiError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if ["inf", "infinity", "∞"].iter().any(|k| s.eq_ignore_ascii_case(k)) {
            return Ok(Exponent::Infinity);
        }
        let p: f64 = s.parse().map_err(|_| JacobiError::Domain(format!("not an exponent: {s:?}")))?;
        Exponent::new(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableScale {
    /// Uniform in `t`, values interpolated directly.
    Linear,
    /// Uniform in `ln t`, `ln k` interpolated; values must be positive.
    LogLog,
}

/// Radial function tabulated on a uniform grid (in `t` or `ln t`) with
/// four-point Lagrange interpolation; zero beyond the last node.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    pub ts: Vec<f64>,
    pub values: Vec<Complex64>,
    pub scale: TableScale,
    logs: Vec<f64>,
}

impl KernelTable {
    /// Nodes for `n` points between `t_lo` and `t_hi` under the given scale.
    pub fn nodes(scale: TableScale, t_lo: f64, t_hi: f64, n: usize) -> Result<Vec<f64>> {
        let ok = match scale {
            TableScale::Linear => t_lo >= 0.0 && t_hi > t_lo,
            TableScale::LogLog => t_lo > 0.0 && t_hi > t_lo,
        };
        if !ok || n < 4 {
            return Err(JacobiError::Domain(format!(
                "table needs 0 <= t_lo < t_hi and at least 4 nodes, got [{t_lo}, {t_hi}] with {n}"
            )));
        }
        let h = 1.0 / (n - 1) as f64;
        Ok(match scale {
            TableScale::Linear => (0..n).map(|i| t_lo + (t_hi - t_lo) * i as f64 * h).collect(),
            TableScale::LogLog => {
                let (a, b) = (t_lo.ln(), t_hi.ln());
                (0..n).map(|i| if i + 1 == n { t_hi } else { (a + (b - a) * i as f64 * h).exp() }).collect()
            }
        })
    }

    pub fn new(scale: TableScale, ts: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if ts.len() != values.len() || ts.len() < 4 {
            return Err(JacobiError::Domain("table needs matching nodes and values, at least 4".into()));
        }
        let logs = match scale {
            TableScale::Linear => vec![],
            TableScale::LogLog => {
                if values.iter().any(|v| !(v.re > 0.0) || v.im.abs() > 1e-8 * v.re) {
                    return Err(JacobiError::Domain("log-log table needs positive real values".into()));
                }
                values.iter().map(|v| v.re.ln()).collect()
            }
        };
        Ok(KernelTable { ts, values, scale, logs })
    }

    fn coord(&self, t: f64) -> f64 {
        match self.scale {
            TableScale::Linear => t,
            TableScale::LogLog => t.ln(),
        }
    }

    fn lagrange<T>(&self, s: f64, ys: &[T]) -> T
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        let n = ys.len();
        let s0 = self.coord(self.ts[0]);
        let h = (self.coord(self.ts[n - 1]) - s0) / (n - 1) as f64;
        let i = ((s - s0) / h).floor() as isize;
        let j0 = (i - 1).clamp(0, n as isize - 4) as usize;
        let x = (s - s0) / h - j0 as f64;
        let mut acc: Option<T> = None;
        for j in 0..4 {
            let mut l = 1.0;
            for k in 0..4 {
                if k != j {
                    l *= (x - k as f64) / (j as f64 - k as f64);
                }
            }
            let term = ys[j0 + j] * l;
            acc = Some(match acc {
                Some(a) => a + term,
                None => term,
            });
        }
        acc.expect("four terms")
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let n = self.ts.len();
        let (first, last) = (self.ts[0], self.ts[n - 1]);
        if t > last * (1.0 + 1e-12) {
            return Complex64::new(0.0, 0.0);
        }
        match self.scale {
            TableScale::Linear => self.lagrange(t.max(first), &self.values),
            TableScale::LogLog => {
                if t <= 0.0 {
                    return Complex64::new(f64::INFINITY, 0.0);
                }
                if t < first {
                    let slope = (self.logs[1] - self.logs[0]) / (self.ts[1] / first).ln();
                    return Complex64::new((self.logs[0] + slope * (t / first).ln()).exp(), 0.0);
                }
                Complex64::new(self.lagrange(t.ln(), &self.logs).exp(), 0.0)
            }
        }
    }

    pub fn to_radial(&self, smoothness: Smoothness) -> RadialFunction {
        let table = Arc::new(self.clone());
        let hint = self.ts[self.ts.len() - 1];
        RadialFunction::new(hint, smoothness, move |t| table.eval(t))
    }
}

/// `κ = m^∨` on `ts`; errors if `|m| λ^{2α+1}` is not integrable.
pub fn kernel_from_multiplier(
    params: &JacobiParams,
    m: &SpectralFunction,
    ts: &[f64],
    quad: &QuadratureSpec,
) -> Result<Vec<Complex64>> {
    match inverse_transform(params, m, ts, quad) {
        Err(JacobiError::TailBudget { estimate, .. }) if !estimate.is_finite() => {
            Err(JacobiError::NonIntegrableSymbol(
                "|m(λ)| |c(λ)|^-2 does not decay faster than 1/λ".into(),
            ))
        }
        r => r.map(|v| v.values),
    }
}

/// `(m e^{-ελ²})^∨` on `ts`, truncated where the damping falls below `e^{-40}`.
pub fn kernel_from_multiplier_regularized(
    params: &JacobiParams,
    m: &SpectralFunction,
    eps: f64,
    ts: &[f64],
    quad: &QuadratureSpec,
) -> Result<Vec<Complex64>> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(JacobiError::Domain(format!("regularization needs ε > 0, got {eps}")));
    }
    let g = m.clone();
    let damped = SpectralFunction::new(m.strip, m.even, move |l| g.eval(l) * (-eps * l * l).exp());
    kernel_from_multiplier(params, &damped, ts, &quad.with_lambda_max((40.0 / eps).sqrt()))
}

/// Smooth even cutoff, `1` on `[0, √R0]`, `0` on `[R0, ∞)`, quintic smoothstep between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffPsi {
    r0: f64,
}

impl Default for CutoffPsi {
    fn default() -> Self {
        CutoffPsi { r0: R0 }
    }
}

impl CutoffPsi {
    pub fn new(r0: f64) -> Result<Self> {
        if !(r0 > 1.0 && r0.is_finite()) {
            return Err(JacobiError::Domain(format!("cutoff radius must exceed 1, got {r0}")));
        }
        Ok(CutoffPsi { r0 })
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.abs();
        let a = self.r0.sqrt();
        if t <= a {
            1.0
        } else if t >= self.r0 {
            0.0
        } else {
            let x = (t - a) / (self.r0 - a);
            1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x)
        }
    }
}

/// `(κψ, κ(1-ψ))`, with the global part computed as `κ - κψ`.
pub fn split_local_global(kappa: &RadialFunction, psi: &CutoffPsi) -> (RadialFunction, RadialFunction) {
    let (k1, k2) = (kappa.clone(), kappa.clone());
    let (p1, p2) = (*psi, *psi);
    let local = RadialFunction::new(psi.r0().min(kappa.support_hint), kappa.smoothness, move |t| {
        let w = p1.eval(t);
        if w == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            k1.eval(t) * w
        }
    });
    let global = RadialFunction::new(kappa.support_hint, kappa.smoothness, move |t| {
        let w = p2.eval(t);
        if w == 1.0 {
            Complex64::new(0.0, 0.0)
        } else {
            let v = k2.eval(t);
            v - v * w
        }
    });
    (local, global)
}

/// Sampled Hörmander data: `sup (1+|λ|)^i |m^{(i)}(λ)|` for `i = 0..=N` on a grid in the strip.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HormanderReport {
    pub n: usize,
    pub per_order_sups: Vec<f64>,
    pub mult_norm: f64,
    /// Some weighted derivative grows toward the grid edge or fails to evaluate.
    pub violation: bool,
    pub evaluated: usize,
    pub failed: usize,
}

/// Least integer `>= α + 3/2`.
pub fn hormander_order(params: &JacobiParams) -> usize {
    (params.alpha() + 1.5).ceil() as usize
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// `m^{(k)}(z)` for `k = 0..=n`, by the Cauchy integral on a circle of the given radius.
fn cauchy_derivatives(m: &SpectralFunction, z: Complex64, n: usize, radius: f64) -> Vec<Complex64> {
    const POINTS: usize = 64;
    let samples: Vec<(Complex64, Complex64)> = (0..POINTS)
        .map(|j| {
            let e = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / POINTS as f64);
            (e, m.eval(z + e * radius))
        })
        .collect();
    let mut out = vec![m.eval(z)];
    let mut fact = 1.0;
    for k in 1..=n {
        fact *= k as f64;
        let s: Complex64 = samples.iter().map(|(e, v)| v / e.powu(k as u32)).sum();
        out.push(s * (fact / (POINTS as f64 * radius.powi(k as i32))));
    }
    out
}

/// Central differences along the real direction, step `10^{-5/k}` for order `k`.
fn fd_derivatives(m: &SpectralFunction, z: Complex64, n: usize) -> Vec<Complex64> {
    let mut out = vec![m.eval(z)];
    for k in 1..=n {
        let h = 1e-5f64.powf(1.0 / k as f64);
        let mut s = Complex64::new(0.0, 0.0);
        for j in 0..=k {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            s += m.eval(z + (0.5 * k as f64 - j as f64) * h) * (sign * binomial(k, j));
        }
        out.push(s / h.powi(k as i32));
    }
    out
}

pub fn hormander_norm(
    params: &JacobiParams,
    m: &SpectralFunction,
    lambda_grid: &[f64],
    y_grid: &[f64],
) -> Result<HormanderReport> {
    let rho = params.rho();
    if lambda_grid.is_empty() || y_grid.is_empty() {
        return Err(JacobiError::Domain("Hörmander grid is empty".into()));
    }
    if let Some(y) = y_grid.iter().find(|y| !(y.abs() <= rho)) {
        return Err(JacobiError::Domain(format!("Im λ = {y} lies outside the strip |Im λ| <= ρ = {rho}")));
    }
    let n = hormander_order(params);
    let x_edge = lambda_grid.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let points: Vec<Complex64> = y_grid
        .iter()
        .flat_map(|&y| lambda_grid.iter().map(move |&x| Complex64::new(x, y)))
        .collect();
    let weighted: Vec<Option<Vec<f64>>> = points
        .par_iter()
        .map(|&z| {
            let radius = m.strip.map(|s| (0.5 * (s - z.im.abs())).min(0.25)).filter(|r| *r >= 1e-3);
            let d = match radius {
                Some(r) => cauchy_derivatives(m, z, n, r),
                None => fd_derivatives(m, z, n),
            };
            let w: Vec<f64> = d
                .iter()
                .enumerate()
                .map(|(i, v)| (1.0 + z.norm()).powi(i as i32) * v.norm())
                .collect();
            w.iter().all(|v| v.is_finite()).then_some(w)
        })
        .collect();
    let failed = weighted.iter().filter(|w| w.is_none()).count();
    let mut full = vec![0.0f64; n + 1];
    let mut inner = vec![0.0f64; n + 1];
    for (z, w) in points.iter().zip(&weighted) {
        if let Some(w) = w {
            for i in 0..=n {
                full[i] = full[i].max(w[i]);
                if z.re.abs() <= 0.5 * x_edge {
                    inner[i] = inner[i].max(w[i]);
                }
            }
        }
    }
    let evaluated = points.len() - failed;
    let floor = 1e-8 * full[0].max(1.0);
    let grows = full.iter().zip(&inner).any(|(f, i)| *f > 1.5 * i && *f > floor);
    let mult_norm = full.iter().cloned().fold(0.0, f64::max);
    Ok(HormanderReport {
        n,
        per_order_sups: full,
        mult_norm,
        violation: failed > 0 || evaluated == 0 || grows,
        evaluated,
        failed,
    })
}

/// Radius beyond which `h_s(t) e^{2ρt}` is below `e^{-28}`, from `h_s(t) ≈ e^{-ρt - t²/4s}`.
pub fn heat_kernel_radius(params: &JacobiParams, s: f64) -> f64 {
    let r = params.rho();
    2.0 * s * r + (4.0 * s * s * r * r + 112.0 * s).sqrt()
}

fn check_time(s: f64) -> Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(JacobiError::Domain(format!("heat time must be positive, got {s}")))
    }
}

/// Heat kernel `h_s = (e^{-s(λ²+ρ²)})^∨`; the spectral cutoff is `√(40/s)`.
pub fn heat_kernel(params: &JacobiParams, s: f64, ts: &[f64], quad: &QuadratureSpec) -> Result<Vec<f64>> {
    check_time(s)?;
    let q = quad.with_lambda_max((40.0 / s).sqrt());
    let v = inverse_transform(params, &SpectralFunction::heat(params, s), ts, &q)?;
    Ok(v.values.iter().map(|z| z.re).collect())
}

/// `h_s` tabulated on `[0, heat_kernel_radius]`.
pub fn heat_kernel_table(params: &JacobiParams, s: f64, quad: &QuadratureSpec) -> Result<KernelTable> {
    check_time(s)?;
    let t_hi = heat_kernel_radius(params, s);
    let step = 0.05 * s.sqrt().min(1.0);
    let n = ((t_hi / step).ceil() as usize + 1).max(4);
    let ts = KernelTable::nodes(TableScale::Linear, 0.0, t_hi, n)?;
    let vals = heat_kernel(params, s, &ts, quad)?;
    KernelTable::new(TableScale::Linear, ts, vals.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
}

pub fn heat_kernel_function(params: &JacobiParams, s: f64, quad: &QuadratureSpec) -> Result<RadialFunction> {
    Ok(heat_kernel_table(params, s, quad)?.to_radial(Smoothness::Smooth))
}

/// `∫ h_s dμ` on a grid covering the kernel; reported, no target asserted.
pub fn heat_kernel_mass(params: &JacobiParams, s: f64, quad: &QuadratureSpec) -> Result<f64> {
    let table = heat_kernel_table(params, s, quad)?;
    let grid = ConvGrid::new(params, heat_kernel_radius(params, s), 0.25)?;
    Ok(grid.nodes.iter().zip(&grid.weights).map(|(&t, w)| table.eval(t).re * w).sum())
}

/// Order `a > 0` of a Riesz potential together with `n_α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszParams {
    pub a: f64,
    pub n_alpha: f64,
}

impl RieszParams {
    pub fn new(params: &JacobiParams, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(JacobiError::Parameter(format!("Riesz order must be positive, got {a}")));
        }
        Ok(RieszParams { a, n_alpha: params.n_alpha() })
    }

    /// `a = n_α` up to rounding.
    pub fn is_critical(&self) -> bool {
        near(self.a, self.n_alpha)
    }
}

fn near(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-12 * y.abs().max(1.0)
}

/// `m_a(λ) = (λ² + ρ²)^{-a/2}`.
pub fn riesz_symbol(params: &JacobiParams, a: f64) -> Result<SpectralFunction> {
    RieszParams::new(params, a)?;
    let rho = params.rho();
    Ok(SpectralFunction::new(Some(rho), true, move |l| (l * l + rho * rho).powf(-0.5 * a)))
}

/// `m_a ∈ L¹(dν)` iff `a > n_α`.
pub fn riesz_integrable(params: &JacobiParams, a: f64) -> bool {
    a > params.n_alpha() && !near(a, params.n_alpha())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptoteTag {
    Power { exponent: f64 },
    Log,
}

/// Small-`t` behaviour of `k_a` for `0 < a <= n_α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RieszAsymptote {
    pub tag: AsymptoteTag,
    pub a: f64,
    params: JacobiParams,
}

impl RieszAsymptote {
    /// `t^{a/2-α-1} K_{α-a/2+1}(ρt)`.
    pub fn profile(&self, t: f64) -> Result<f64> {
        let alpha = self.params.alpha();
        let mu = alpha - 0.5 * self.a + 1.0;
        let k = bessel_k_third(Complex64::new(mu, 0.0), Complex64::new(self.params.rho() * t, 0.0))?;
        Ok(t.powf(0.5 * self.a - alpha - 1.0) * k.re)
    }
}

pub fn riesz_local_asymptote(params: &JacobiParams, a: f64) -> Result<RieszAsymptote> {
    let rp = RieszParams::new(params, a)?;
    let tag = if rp.is_critical() {
        AsymptoteTag::Log
    } else if a < rp.n_alpha {
        AsymptoteTag::Power { exponent: a - rp.n_alpha }
    } else {
        return Err(JacobiError::Domain(format!(
            "a = {a} exceeds n_α = {}: the kernel is bounded near the origin",
            rp.n_alpha
        )));
    };
    Ok(RieszAsymptote { tag, a, params: *params })
}

/// Whether the Riesz potential of order `a` maps `L^p` into `L^q`.
pub fn riesz_bounded_region(params: &JacobiParams, a: f64, p: Exponent, q: Exponent) -> bool {
    if !(a > 0.0 && a.is_finite()) {
        return false;
    }
    if let (Exponent::Finite(x), Exponent::Finite(y)) = (p, q) {
        if !(x >= 1.0 && y >= 1.0) {
            return false;
        }
    }
    if p == q {
        return matches!(p, Exponent::Finite(x) if x > 1.0);
    }
    let (ip, iq) = (p.reciprocal(), q.reciprocal());
    if ip <= iq {
        return false;
    }
    let n = params.n_alpha();
    if near(a, n) {
        return q.is_finite();
    }
    if a > n {
        return true;
    }
    let r = a / n;
    let Exponent::Finite(pv) = p else { return false };
    let crit = n / a;
    if near(pv, crit) {
        return false;
    }
    if pv > crit {
        return true;
    }
    if pv > 1.0 {
        return ip - r <= iq + 1e-12;
    }
    iq > 1.0 - r && !near(iq, 1.0 - r) && iq < 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularization {
    /// Plain synthesis cut at the quadrature's `λ_max`; needs `a > n_α`.
    Off,
    /// Symbol damped by `e^{-ελ²}` at three halving `ε`, extrapolated to `ε = 0`.
    Richardson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszOptions {
    pub regularization: Regularization,
    /// Halving sequence of damping parameters, used as given for `t >= 1`
    /// and scaled by `t²` below.
    pub eps: [f64; 3],
    /// Convergence threshold on successive extrapolants.
    pub rel_tol: f64,
}

impl Default for RieszOptions {
    fn default() -> Self {
        RieszOptions { regularization: Regularization::Richardson, eps: [4e-3, 2e-3, 1e-3], rel_tol: 5e-3 }
    }
}

impl RieszOptions {
    pub fn plain() -> Self {
        RieszOptions { regularization: Regularization::Off, ..Self::default() }
    }
}

/// Panels on `[0, λ_max]`: geometric up to `π/t`, then of width `π/t`.
fn oscillatory_rule(t_osc: f64, lmax: f64, order: usize) -> (Vec<f64>, Vec<f64>) {
    let w = (PI / t_osc.max(1e-12)).min(lmax);
    let mut b = vec![0.0];
    let mut x = w.min(1.0);
    loop {
        b.push(x);
        if x >= w {
            break;
        }
        x = (2.0 * x).min(w);
    }
    while x < lmax {
        x = (x + w).min(lmax);
        b.push(x);
    }
    composite_gauss(&b, order)
}

/// `Σ_k w_k d(λ_k) m_a(λ_k) e^{-ε_j λ_k²} φ_{λ_k}(t)` for every `t` and damping `ε_j`.
fn damped_sums(
    params: &JacobiParams,
    a: f64,
    ts: &[f64],
    eps: &[f64],
    t_osc: f64,
    lmax: f64,
    order: usize,
) -> Result<Vec<Vec<f64>>> {
    let (ls, w) = oscillatory_rule(t_osc, lmax, order);
    let grid = PhiGrid::new(params, ts)?;
    let rho2 = params.rho().powi(2);
    let zero = || vec![vec![0.0; eps.len()]; ts.len()];
    ls.par_iter()
        .zip(w.par_iter())
        .map(|(&l, &wt)| -> Result<Vec<Vec<f64>>> {
            let base = wt * spectral_density(params, l) * (l * l + rho2).powf(-0.5 * a);
            let row = grid.row(Complex64::new(l, 0.0))?;
            let damp: Vec<f64> = eps.iter().map(|e| base * (-e * l * l).exp()).collect();
            Ok(row.iter().map(|v| damp.iter().map(|d| d * v.re).collect()).collect())
        })
        .try_fold(zero, |mut acc, r| {
            for (a, b) in acc.iter_mut().zip(r?) {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
            }
            Ok(acc)
        })
        .try_reduce(zero, |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                for (u, v) in x.iter_mut().zip(y) {
                    *u += v;
                }
            }
            Ok(a)
        })
}

/// Two Richardson steps on values at `ε, ε/2, ε/4`.
fn richardson(v: &[f64], rel_tol: f64, t: f64) -> Result<f64> {
    let a1 = 2.0 * v[1] - v[0];
    let a1p = 2.0 * v[2] - v[1];
    let a2 = (4.0 * a1p - a1) / 3.0;
    if (a2 - a1p).abs() < rel_tol * a2.abs() {
        Ok(a2)
    } else {
        Err(JacobiError::Extrapolation(format!(
            "at t = {t}: extrapolants {a1p:.6e} and {a2:.6e} differ by more than {rel_tol:e}"
        )))
    }
}

const EPS_SCALE_T: f64 = 1.0;

/// `k_a = m_a^∨` on `ts`.
pub fn riesz_kernel_numeric(
    params: &JacobiParams,
    a: f64,
    ts: &[f64],
    quad: &QuadratureSpec,
    opts: &RieszOptions,
) -> Result<Vec<Complex64>> {
    params.require_strict("Riesz kernel")?;
    quad.validate()?;
    RieszParams::new(params, a)?;
    if let Some(t) = ts.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(JacobiError::Domain(format!("radius must be finite and nonnegative, got {t}")));
    }
    let integrable = riesz_integrable(params, a);
    let order = panel_order(quad.tol);
    match opts.regularization {
        Regularization::Off => {
            if !integrable {
                return Err(JacobiError::NonIntegrableSymbol(format!(
                    "m_a with a = {a} <= n_α = {} needs regularization",
                    params.n_alpha()
                )));
            }
            ts.par_iter()
                .map(|&t| {
                    let osc = if t > 0.0 { t } else { 1.0 };
                    let s = damped_sums(params, a, &[t], &[0.0], osc, quad.lambda_max, order)?;
                    Ok(Complex64::new(s[0][0], 0.0))
                })
                .collect()
        }
        Regularization::Richardson => {
            let e = opts.eps;
            let halving = e[0] > 0.0 && near(e[1], 0.5 * e[0]) && near(e[2], 0.5 * e[1]);
            if !halving {
                return Err(JacobiError::Domain(format!("ε sequence must halve, got {e:?}")));
            }
            if !integrable && ts.contains(&0.0) {
                return Err(JacobiError::Domain(format!("k_a is unbounded at the origin for a = {a}")));
            }
            let mut out = vec![Complex64::new(0.0, 0.0); ts.len()];
            let (far, near_idx): (Vec<usize>, Vec<usize>) =
                (0..ts.len()).partition(|&i| ts[i] >= EPS_SCALE_T || ts[i] == 0.0);
            if !far.is_empty() {
                let fts: Vec<f64> = far.iter().map(|&i| ts[i]).collect();
                let osc = fts.iter().cloned().fold(EPS_SCALE_T, f64::max);
                let lmax = (40.0 / e[2]).sqrt();
                let sums = damped_sums(params, a, &fts, &e, osc, lmax, order)?;
                for (k, &i) in far.iter().enumerate() {
                    out[i] = Complex64::new(richardson(&sums[k], opts.rel_tol, ts[i])?, 0.0);
                }
            }
            let vals: Vec<Result<f64>> = near_idx
                .par_iter()
                .map(|&i| {
                    let t = ts[i];
                    let scale = (t / EPS_SCALE_T).powi(2);
                    let es: Vec<f64> = e.iter().map(|x| x * scale).collect();
                    let lmax = (40.0 / es[2]).sqrt();
                    let sums = damped_sums(params, a, &[t], &es, t, lmax, order)?;
                    richardson(&sums[0], opts.rel_tol, t)
                })
                .collect();
            for (&i, v) in near_idx.iter().zip(vals) {
                out[i] = Complex64::new(v?, 0.0);
            }
            Ok(out)
        }
    }
}

/// `k_a` tabulated on `n` log-spaced points of `[t_lo, t_hi]`.
pub fn riesz_kernel_table(
    params: &JacobiParams,
    a: f64,
    t_lo: f64,
    t_hi: f64,
    n: usize,
    quad: &QuadratureSpec,
    opts: &RieszOptions,
) -> Result<KernelTable> {
    let ts = KernelTable::nodes(TableScale::LogLog, t_lo, t_hi, n)?;
    let vals = riesz_kernel_numeric(params, a, &ts, quad, opts)?;
    KernelTable::new(TableScale::LogLog, ts, vals)
}

/// `T_m f` with `(T_m f)^ = m f̂`, tabulated on `[0, grid.t_max]`.
pub fn apply_multiplier(
    params: &JacobiParams,
    m: &SpectralFunction,
    f: &RadialFunction,
    grid: &ConvGrid,
    quad: &QuadratureSpec,
) -> Result<RadialFunction> {
    params.require_strict("multiplier")?;
    let t_end = grid.t_max;
    let rule = spectral_rule(params, t_end, quad);
    let fh = forward_transform(params, f, &rule.lambdas, quad)?;
    let g: Vec<Complex64> = rule.lambdas.iter().zip(&fh.values).map(|(&l, v)| m.eval_real(l) * v).collect();
    if g.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(JacobiError::Domain("multiplier is not finite on the real axis".into()));
    }
    let step = (PI / (4.0 * quad.lambda_max)).min(0.05);
    let n = ((t_end / step).ceil() as usize + 1).max(4);
    let ts = KernelTable::nodes(TableScale::Linear, 0.0, t_end, n)?;
    let vals = synthesize(params, &rule, &g, &ts)?;
    Ok(KernelTable::new(TableScale::Linear, ts, vals)?.to_radial(f.smoothness))
}

/// `(κ ⋆ φ_λ 1_{[0,T]})(x)` against `m(λ) φ_λ(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenCheck {
    pub value: Complex64,
    pub expected: Complex64,
    pub defect: f64,
    /// `∫_{T-x}^T |κ| dμ`, which bounds the effect of truncating `φ_λ` at `T`.
    pub truncation_bias: f64,
}

pub fn eigenrelation_check(
    params: &JacobiParams,
    kappa: &RadialFunction,
    m: &SpectralFunction,
    lambda: f64,
    x: f64,
    grid: &ConvGrid,
) -> Result<EigenCheck> {
    let l = Complex64::new(lambda, 0.0);
    let p = *params;
    let cut = grid.t_max;
    let phi_t = RadialFunction::new(cut, Smoothness::Smooth, move |t| {
        if t > cut {
            Complex64::new(0.0, 0.0)
        } else {
            phi(&p, l, t, EvalMethod::Auto).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
        }
    });
    let value = convolve(params, kappa, &phi_t, grid)?.eval(x);
    let expected = m.eval(l) * phi(params, l, x, EvalMethod::Auto)?;
    let truncation_bias = grid
        .nodes
        .iter()
        .zip(&grid.weights)
        .filter(|(&y, _)| y > cut - x)
        .map(|(&y, w)| kappa.eval(y).norm() * w)
        .sum();
    Ok(EigenCheck { value, expected, defect: (value - expected).norm(), truncation_bias })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergroup::lp_norm;
    use proptest::prelude::*;

    fn p(a: f64, b: f64) -> JacobiParams {
        JacobiParams::new(a, b).unwrap()
    }

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default().with_tol(1e-10)
    }

    #[test]
    fn exponents_parse_and_invert() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
        assert_eq!("2.5".parse::<Exponent>().unwrap(), Exponent::Finite(2.5));
        assert!("0.5".parse::<Exponent>().is_err());
        assert_eq!(Exponent::from_reciprocal(0.0).unwrap(), Exponent::Infinity);
        assert_eq!(Exponent::Finite(4.0).reciprocal(), 0.25);
    }

    #[test]
    fn zero_symbol_gives_zero_kernel() {
        let q = p(1.3, 0.2);
        let k = kernel_from_multiplier(&q, &SpectralFunction::zero(), &[0.0, 1.0, 2.0], &quad()).unwrap();
        assert!(k.iter().all(|v| v.norm() == 0.0));
        let one = SpectralFunction::constant(Complex64::new(1.0, 0.0));
        assert!(matches!(
            kernel_from_multiplier(&q, &one, &[1.0], &quad()),
            Err(JacobiError::NonIntegrableSymbol(_))
        ));
    }

    #[test]
    fn cutoff_profile() {
        let psi = CutoffPsi::new(4.0).unwrap();
        assert_eq!(psi.eval(1.9), 1.0);
        assert_eq!(psi.eval(-2.0), 1.0);
        assert_eq!(psi.eval(4.0), 0.0);
        let vals: Vec<f64> = (0..=40).map(|j| psi.eval(2.0 + 0.05 * j as f64)).collect();
        assert!(vals.windows(2).all(|w| w[1] <= w[0]));
        assert!(CutoffPsi::new(1.0).is_err());
    }

    #[test]
    fn local_global_split() {
        let psi = CutoffPsi::new(4.0).unwrap();
        let kappa = RadialFunction::real(f64::INFINITY, Smoothness::Smooth, |t| (-t).exp() + 0.3);
        let (k1, k2) = split_local_global(&kappa, &psi);
        for j in 0..100 {
            let t = 0.06 * j as f64;
            let s = k1.eval(t) + k2.eval(t);
            assert!((s - kappa.eval(t)).norm() <= 1e-15 * kappa.eval(t).norm());
        }
        assert_eq!(k2.eval(2.0), Complex64::new(0.0, 0.0));
        assert_eq!(k1.eval(8.0), Complex64::new(0.0, 0.0));
        let (z1, z2) = split_local_global(&RadialFunction::zero(), &psi);
        assert_eq!(z1.eval(1.0) + z2.eval(3.0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn hormander_reports() {
        let q = p(1.3, 0.2);
        let xs: Vec<f64> = (-40..=40).map(|j| 0.5 * j as f64).collect();
        let ys = [0.0, 0.5 * q.rho(), 0.9 * q.rho()];
        let one = hormander_norm(&q, &SpectralFunction::constant(Complex64::new(1.0, 0.0)), &xs, &ys).unwrap();
        assert_eq!(one.n, 3);
        assert!((one.mult_norm - 1.0).abs() < 1e-12, "{one:?}");
        assert!(!one.violation);
        let heat = hormander_norm(&q, &SpectralFunction::heat(&q, 1.0), &xs, &ys).unwrap();
        assert!(heat.per_order_sups.iter().all(|v| v.is_finite()));
        assert!(!heat.violation);
        let id = SpectralFunction::new(Some(f64::INFINITY), false, |l| l);
        assert!(hormander_norm(&q, &id, &xs, &ys).unwrap().violation);
        assert!(hormander_norm(&q, &id, &xs, &[q.rho() + 1.0]).is_err());
    }

    #[test]
    fn hormander_grid_refinement_is_stable() {
        let q = p(1.3, 0.2);
        let m = SpectralFunction::heat(&q, 1.0);
        let coarse: Vec<f64> = (-20..=20).map(|j| 0.5 * j as f64).collect();
        let fine: Vec<f64> = (-80..=80).map(|j| 0.125 * j as f64).collect();
        let ys = [0.0, 1.0, 2.0];
        let a = hormander_norm(&q, &m, &coarse, &ys).unwrap();
        let b = hormander_norm(&q, &m, &fine, &ys).unwrap();
        for (x, y) in a.per_order_sups.iter().zip(&b.per_order_sups) {
            assert!(x <= y && (y - x) <= 0.05 * y, "{a:?} {b:?}");
        }
    }

    #[test]
    fn heat_kernel_positive_and_flattening() {
        let q = p(1.3, 0.2);
        let ts: Vec<f64> = (0..=30).map(|j| 0.2 * j as f64).collect();
        let mut sups = vec![];
        for s in [1.0, 2.0, 4.0] {
            let h = heat_kernel(&q, s, &ts, &quad()).unwrap();
            assert!(h.iter().all(|v| *v > 0.0), "s = {s}");
            sups.push(h.iter().cloned().fold(0.0, f64::max));
        }
        assert!(sups[0] > sups[1] && sups[1] > sups[2], "{sups:?}");
        assert!(heat_kernel(&q, 0.0, &ts, &quad()).is_err());
    }

    #[test]
    fn heat_symbol_roundtrip() {
        let q = p(1.3, 0.2);
        let s = 0.5;
        let h = heat_kernel_function(&q, s, &quad()).unwrap();
        let ls = [0.0, 1.0, 2.5, 4.0];
        let fh = forward_transform(&q, &h, &ls, &quad().with_t_max(20.0)).unwrap().values;
        for (l, v) in ls.iter().zip(&fh) {
            let want = (-s * (l * l + q.rho() * q.rho())).exp();
            assert!((v - want).norm() < 1e-3 * want, "λ = {l}: {v} vs {want}");
        }
        let mass = heat_kernel_mass(&q, s, &quad()).unwrap();
        assert!(mass.is_finite() && mass > 0.0);
    }

    #[test]
    fn riesz_symbol_values() {
        let q = p(1.3, 0.2);
        let m = riesz_symbol(&q, 1.5).unwrap();
        assert!((m.eval_real(0.0).re - q.rho().powf(-1.5)).abs() < 1e-15);
        let (ma, mb, mab) = (riesz_symbol(&q, 1.0).unwrap(), riesz_symbol(&q, 2.0).unwrap(), riesz_symbol(&q, 3.0).unwrap());
        for l in [0.3, 2.0, Complex64::new(1.0, 1.0).re] {
            let z = Complex64::new(l, 0.4);
            assert!((ma.eval(z) * mb.eval(z) - mab.eval(z)).norm() < 1e-14);
        }
        assert!(m.check_even(&[Complex64::new(1.0, 0.5), Complex64::new(3.0, -1.0)], 1e-14));
        assert!(riesz_integrable(&q, q.n_alpha() + 0.1));
        assert!(!riesz_integrable(&q, q.n_alpha()));
        assert!(riesz_symbol(&q, 0.0).is_err());
    }

    #[test]
    fn riesz_asymptote_tags_and_profile() {
        let q = p(1.3, 0.2);
        assert_eq!(riesz_local_asymptote(&q, q.n_alpha()).unwrap().tag, AsymptoteTag::Log);
        match riesz_local_asymptote(&q, 0.5 * q.n_alpha()).unwrap().tag {
            AsymptoteTag::Power { exponent } => assert!((exponent + 0.5 * q.n_alpha()).abs() < 1e-14),
            t => panic!("{t:?}"),
        }
        assert!(riesz_local_asymptote(&q, q.n_alpha() + 0.5).is_err());
        let asy = riesz_local_asymptote(&q, 1.0).unwrap();
        let (t0, t1) = (1e-3, 1e-1);
        let slope = (asy.profile(t1).unwrap() / asy.profile(t0).unwrap()).ln() / (t1 / t0).ln();
        assert!((slope - (1.0 - q.n_alpha())).abs() < 0.05, "{slope}");
    }

    #[test]
    fn region_examples() {
        let q = p(1.3, 0.2);
        let n = q.n_alpha();
        let f = |x: f64| Exponent::Finite(x);
        assert!(riesz_bounded_region(&q, n + 1.0, f(1.5), f(3.0)));
        for a in [0.5, n, n + 1.0] {
            assert!(!riesz_bounded_region(&q, a, f(1.0), f(1.0)));
            assert!(!riesz_bounded_region(&q, a, Exponent::Infinity, Exponent::Infinity));
            assert!(!riesz_bounded_region(&q, a, f(3.0), f(2.0)));
        }
        assert!(riesz_bounded_region(&q, 0.5 * n, f(1.0), f(1.0 / 0.6)));
        assert!(!riesz_bounded_region(&q, 0.5 * n, f(1.0), f(1.0 / 0.4)));
        assert!(riesz_bounded_region(&q, n, f(2.0), f(5.0)));
        assert!(!riesz_bounded_region(&q, n, f(2.0), Exponent::Infinity));
        assert!(riesz_bounded_region(&q, 1.0, f(2.0), f(2.0)));
    }

    proptest! {
        #[test]
        fn region_monotone_in_order(
            a in 0.05f64..7.0,
            da in 0.0f64..4.0,
            ip in 0.0f64..=1.0,
            iq in 0.0f64..=1.0,
        ) {
            let q = p(1.3, 0.2);
            prop_assume!(ip > iq);
            let a2 = a + da;
            prop_assume!(!near(a2, q.n_alpha()));
            let (pp, qq) = (Exponent::from_reciprocal(ip).unwrap(), Exponent::from_reciprocal(iq).unwrap());
            prop_assume!(!matches!(pp, Exponent::Finite(x) if near(x, q.n_alpha() / a2)));
            if riesz_bounded_region(&q, a, pp, qq) {
                prop_assert!(riesz_bounded_region(&q, a2, pp, qq));
            }
        }
    }

    #[test]
    fn riesz_plain_and_regularized_agree_when_integrable() {
        let q = p(1.3, 0.2);
        let ts = [0.5, 1.0, 2.0];
        let qd = quad().with_lambda_max(400.0);
        let reg = riesz_kernel_numeric(&q, 5.2, &ts, &qd, &RieszOptions::default()).unwrap();
        let plain = riesz_kernel_numeric(&q, 5.2, &ts, &qd, &RieszOptions::plain()).unwrap();
        for (a, b) in reg.iter().zip(&plain) {
            assert!((a - b).norm() < 1e-3 * b.norm(), "{a} vs {b}");
        }
        assert!(matches!(
            riesz_kernel_numeric(&q, 1.0, &ts, &qd, &RieszOptions::plain()),
            Err(JacobiError::NonIntegrableSymbol(_))
        ));
    }

    #[test]
    fn riesz_small_t_slope() {
        let q = p(1.3, 0.2);
        let ts: Vec<f64> = (0..=8).map(|j| 1e-3 * 10f64.powf(0.25 * j as f64)).collect();
        let k = riesz_kernel_numeric(&q, 1.0, &ts, &quad(), &RieszOptions::default()).unwrap();
        let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
        let ys: Vec<f64> = k.iter().map(|v| v.re.ln()).collect();
        let slope = (ys[8] - ys[0]) / (xs[8] - xs[0]);
        assert!((slope - (1.0 - q.n_alpha())).abs() < 0.1, "{slope}");
    }

    #[test]
    fn riesz_large_t_decay() {
        let q = p(1.3, 0.2);
        let ts: Vec<f64> = (0..=10).map(|j| 3.0 + 0.5 * j as f64).collect();
        let k = riesz_kernel_numeric(&q, 1.5, &ts, &quad(), &RieszOptions::default()).unwrap();
        let w: Vec<f64> = ts.iter().zip(&k).map(|(t, v)| v.norm() * (1.1 * q.rho() * t).exp()).collect();
        assert!(w.iter().all(|v| *v <= 2.0 * w[0]), "{w:?}");
    }

    #[test]
    fn identity_multiplier_reproduces() {
        let q = p(1.3, 0.2);
        let grid = ConvGrid::new(&q, 12.0, 0.25).unwrap();
        let f = RadialFunction::gaussian(1.0);
        let one = SpectralFunction::constant(Complex64::new(1.0, 0.0));
        let qd = quad().with_lambda_max(40.0).with_t_max(12.0);
        let tf = apply_multiplier(&q, &one, &f, &grid, &qd).unwrap();
        for t in [0.0, 0.4, 1.3, 2.5] {
            assert!((tf.eval(t) - f.eval(t)).norm() < 1e-3, "t = {t}");
        }
    }

    #[test]
    fn riesz_multiplier_contracts() {
        let q = p(1.3, 0.2);
        let grid = ConvGrid::new(&q, 6.0, 0.25).unwrap();
        let f = RadialFunction::bump(1.0);
        let m = riesz_symbol(&q, 1.0).unwrap();
        let qd = quad().with_lambda_max(60.0).with_t_max(6.0);
        let tf = apply_multiplier(&q, &m, &f, &grid, &qd).unwrap();
        let two = Exponent::Finite(2.0);
        let ratio = lp_norm(&tf, two, &grid) / lp_norm(&f, two, &grid);
        assert!(ratio <= q.rho().powf(-1.0) + 1e-3, "{ratio}");
    }
}

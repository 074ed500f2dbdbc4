//! Quadrature rules shared by the transform, convolution and kernel code.
//!
//! Three families are provided: composite Gauss–Legendre panels for smooth
//! integrands, an adaptive Gauss–Kronrod (7/15) scheme for complex-valued
//! integrands, and a fixed-step tanh-sinh rule on `[0, 1]` for endpoint
//! singularities. Rules are cached per order/level so repeated calls stay cheap.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{JacobiError, Result};

/// Which rule family drives the outer integrals of a transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadRule {
    AdaptiveGauss,
    TanhSinh,
}

/// Truncation lengths, tolerance and rule selection for integrals over `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rule: QuadRule,
    /// Geometric-side truncation radius.
    pub t_max: f64,
    /// Spectral-side truncation frequency.
    pub lambda_max: f64,
    pub tol: f64,
    /// Place spectral panel breaks at the zeros of `cos(λ t)` for the largest output `t`.
    pub oscillatory_splitting: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rule: QuadRule::AdaptiveGauss,
            t_max: 8.0,
            lambda_max: 60.0,
            tol: 1e-8,
            oscillatory_splitting: true,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_max > 0.0 && self.lambda_max > 0.0 && self.tol > 0.0) {
            return Err(JacobiError::Domain(format!(
                "quadrature spec needs positive t_max, lambda_max and tol, got {:?}",
                self
            )));
        }
        Ok(())
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn with_lambda_max(mut self, lambda_max: f64) -> Self {
        self.lambda_max = lambda_max;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    fn compute(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                if n == 1 {
                    p1 = x;
                    p0 = 1.0;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }
}

/// Cached Gauss–Legendre rule of order `n`.
pub fn gauss_legendre(n: usize) -> &'static GaussLegendre {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static GaussLegendre>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("gauss-legendre cache poisoned");
    map.entry(n)
        .or_insert_with(|| Box::leak(Box::new(GaussLegendre::compute(n.max(1)))))
}

/// Nodes and weights of a composite Gauss–Legendre rule over the given breakpoints.
pub fn composite_gauss(breaks: &[f64], order: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = gauss_legendre(order);
    let mut nodes = Vec::with_capacity(order * breaks.len());
    let mut weights = Vec::with_capacity(order * breaks.len());
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            nodes.push(mid + half * x);
            weights.push(half * wt);
        }
    }
    (nodes, weights)
}

/// Evenly spaced breakpoints covering `[a, b]` with panels no wider than `width`.
pub fn uniform_breaks(a: f64, b: f64, width: f64) -> Vec<f64> {
    let n = ((b - a) / width).ceil().max(1.0) as usize;
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).norm())
}

/// Adaptive Gauss–Kronrod integration of a complex integrand over `[a, b]`.
///
/// Returns the value and an error estimate; fails when the interval budget
/// is exhausted before `err <= max(abs_tol, rel_tol * |value|)`.
pub fn adaptive_gk<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<(Complex64, f64)> {
    const MAX_INTERVALS: usize = 4000;
    if a == b {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    let (v, e) = gk15(&f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    loop {
        let total: Complex64 = intervals.iter().map(|iv| iv.2).sum();
        let err: f64 = intervals.iter().map(|iv| iv.3).sum();
        if err <= abs_tol.max(rel_tol * total.norm()) {
            return Ok((total, err));
        }
        if intervals.len() >= MAX_INTERVALS {
            return Err(JacobiError::Quadrature(format!(
                "adaptive Gauss-Kronrod on [{a}, {b}] stalled at error {err:.3e}"
            )));
        }
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty interval list");
        let (lo, hi, _, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}

/// Node of the tanh-sinh rule on `[0, 1]`, carrying the complement `1 - x`
/// so integrands can evaluate endpoint factors without cancellation.
#[derive(Debug, Clone, Copy)]
pub struct TsNode {
    pub x: f64,
    pub xc: f64,
    pub w: f64,
}

/// Fixed-step tanh-sinh rule on `[0, 1]` with step `2^-level`.
#[derive(Debug)]
pub struct TanhSinh {
    pub nodes: Vec<TsNode>,
}

impl TanhSinh {
    fn compute(level: u32) -> Self {
        let h = 0.5f64.powi(level as i32);
        let tau_max = 6.0;
        let n = (tau_max / h).ceil() as i64;
        let mut nodes = Vec::with_capacity(2 * n as usize + 1);
        for k in -n..=n {
            let tau = k as f64 * h;
            let u = FRAC_PI_2 * tau.sinh();
            let x = 1.0 / (1.0 + (-2.0 * u).exp());
            let xc = 1.0 / (1.0 + (2.0 * u).exp());
            let w = h * FRAC_PI_2 * tau.cosh() * 2.0 * x * xc;
            if x.min(xc) > 1e-300 && w > 0.0 {
                nodes.push(TsNode { x, xc, w });
            }
        }
        TanhSinh { nodes }
    }

    /// Integrate over `[0, 1]`; the integrand receives `(x, 1 - x)`.
    pub fn integrate<F: FnMut(f64, f64) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.nodes.iter().map(|n| f(n.x, n.xc) * n.w).sum()
    }
}

/// Cached tanh-sinh rule with step `2^-level`.
pub fn tanh_sinh(level: u32) -> &'static TanhSinh {
    static CACHE: OnceLock<Mutex<HashMap<u32, &'static TanhSinh>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("tanh-sinh cache poisoned");
    map.entry(level)
        .or_insert_with(|| Box::leak(Box::new(TanhSinh::compute(level))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = gauss_legendre(8);
        let s: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| w * x.powi(14))
            .sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        let total: f64 = rule.weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn composite_rule_handles_oscillation() {
        let breaks = uniform_breaks(0.0, 10.0, 0.5);
        let (x, w) = composite_gauss(&breaks, 16);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * (7.0 * x).cos()).sum();
        assert!((s - (70.0f64).sin() / 7.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_gk_on_peaked_integrand() {
        let (v, _) = adaptive_gk(
            |x| Complex64::new(1.0 / (1e-4 + x * x), 0.0),
            -1.0,
            1.0,
            1e-12,
            1e-12,
        )
        .unwrap();
        let exact = 2.0 * (1.0 / 1e-2) * (1.0f64 / 1e-2).atan();
        assert!((v.re - exact).abs() / exact < 1e-10);
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        // ∫_0^1 x^{-0.7} (1-x)^{-0.4} dx = B(0.3, 0.6)
        let v = tanh_sinh(5).integrate(|x, xc| Complex64::new(x.powf(-0.7) * xc.powf(-0.4), 0.0));
        let beta = 4.168_914_178_907_89;
        assert!((v.re - beta).abs() / beta < 1e-10, "{}", v.re);
    }
}

//! Generalized translation and convolution on `ℝ⁺` built from the product-formula
//! kernel `K(s, t, u)`, supported on `|s - t| < u < s + t`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{JacobiError, Result};
use crate::grid::PhiGrid;
use crate::jacobi::{ln_cosh, ln_sinh, phi, weight_delta, EvalMethod, JacobiParams};
use crate::operators::Exponent;
use crate::quadrature::{composite_gauss, tanh_sinh, uniform_breaks};
use crate::special::{hyp2f1_real, ln_gamma_real};
use crate::transform::{RadialFunction, Smoothness};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelPoint {
    pub s: f64,
    pub t: f64,
    pub u: f64,
}

impl KernelPoint {
    pub fn in_support(&self) -> bool {
        (self.s - self.t).abs() < self.u && self.u < self.s + self.t
    }
}

/// `B(s,t,u) = (cosh²s + cosh²t + cosh²u - 1) / (2 cosh s cosh t cosh u)`.
pub fn kernel_b(s: f64, t: f64, u: f64) -> f64 {
    let (cs, ct, cu) = (s.cosh(), t.cosh(), u.cosh());
    (cs * cs + ct * ct + cu * cu - 1.0) / (2.0 * cs * ct * cu)
}

/// `1 - B` from the factorization
/// `4 sinh σ sinh(σ-s) sinh(σ-t) sinh(σ-u) / (2 cosh s cosh t cosh u)`, `2σ = s+t+u`,
/// accurate near both support edges.
fn one_minus_b(s: f64, t: f64, u: f64) -> f64 {
    let sig = 0.5 * (s + t + u);
    let num = 4.0 * sig.sinh() * (0.5 * (t + u - s)).sinh() * (0.5 * (s + u - t)).sinh() * (0.5 * (s + t - u)).sinh();
    num / (2.0 * s.cosh() * t.cosh() * u.cosh())
}

fn ln_kernel_constant(params: &JacobiParams) -> f64 {
    let a = params.alpha();
    -2.0 * params.rho() * 2f64.ln() + ln_gamma_real(a + 1.0) - 0.5 * PI.ln() - ln_gamma_real(a + 0.5)
}

/// Product-formula kernel
/// `K = 2^{-2ρ}Γ(α+1)/(√π Γ(α+1/2)) (cosh s cosh t cosh u)^{α-β-1} (sinh s sinh t sinh u)^{-2α}
///  (1-B²)^{α-1/2} ₂F₁(α+β, α-β; α+1/2; (1-B)/2)`, zero off the support.
pub fn kernel_k(params: &JacobiParams, s: f64, t: f64, u: f64) -> Result<f64> {
    params.require_strict("hypergroup kernel")?;
    Ok(kernel_k_unchecked(params, ln_kernel_constant(params), s, t, u))
}

fn kernel_k_unchecked(params: &JacobiParams, ln_c: f64, s: f64, t: f64, u: f64) -> f64 {
    if !((s - t).abs() < u && u < s + t) {
        return 0.0;
    }
    let (a, b) = (params.alpha(), params.beta());
    let omb = one_minus_b(s, t, u);
    if omb <= 0.0 {
        return 0.0;
    }
    let ln_cosh_sum = ln_cosh(s) + ln_cosh(t) + ln_cosh(u);
    let ln_sinh_sum = ln_sinh(s) + ln_sinh(t) + ln_sinh(u);
    let f = hyp2f1_real(a + b, a - b, a + 0.5, 0.5 * omb);
    let ln_k = ln_c + (a - b - 1.0) * ln_cosh_sum - 2.0 * a * ln_sinh_sum
        + (a - 0.5) * (omb * (2.0 - omb)).ln();
    ln_k.exp() * f
}

/// Angular-integral form
/// `(sinh s sinh t sinh u)^{-2α} ∫_0^π (1 - cosh²s - cosh²t - cosh²u + 2 cosh s cosh t cosh u cos y)_+^{α-β-1} sin^{2β}y dy`
/// without its normalizing constant. Needs `α - β - 1 > -1`.
pub fn kernel_k_angular(params: &JacobiParams, s: f64, t: f64, u: f64) -> Result<f64> {
    params.require_strict("hypergroup kernel")?;
    let (a, b) = (params.alpha(), params.beta());
    if !((s - t).abs() < u && u < s + t) {
        return Ok(0.0);
    }
    let omb = one_minus_b(s, t, u);
    let bb = 1.0 - omb;
    let top = 2.0 * s.cosh() * t.cosh() * u.cosh();
    let y0 = bb.clamp(-1.0, 1.0).acos();
    let e = a - b - 1.0;
    // cos y - B = (cos y - cos y0) written as 2 sin((y0+y)/2) sin((y0-y)/2)
    let v = tanh_sinh(7).integrate(|x, xc| {
        let y = y0 * x;
        let gap = y0 * xc;
        let base = 2.0 * (0.5 * (y0 + y)).sin() * (0.5 * gap).sin();
        Complex64::new(y0 * (top * base).powf(e) * y.sin().powf(2.0 * b), 0.0)
    });
    let ln_s = ln_sinh(s) + ln_sinh(t) + ln_sinh(u);
    Ok(v.re * (-2.0 * a * ln_s).exp())
}

/// `(u, K(s,t,u) Δ(u) du)` on the support `(|s-t|, s+t)` after the map
/// `u = lo + (hi - lo)(1 - cos θ)/2`, which flattens both edge singularities.
/// `lambda_scale` sets the number of panels for oscillating integrands.
pub fn kernel_rule(params: &JacobiParams, s: f64, t: f64, lambda_scale: f64) -> Result<Vec<(f64, f64)>> {
    params.require_strict("hypergroup kernel")?;
    Ok(kernel_rule_below(params, s, t, lambda_scale, f64::INFINITY))
}

/// [`kernel_rule`] restricted to `u < u_cut`.
fn kernel_rule_below(params: &JacobiParams, s: f64, t: f64, lambda_scale: f64, u_cut: f64) -> Vec<(f64, f64)> {
    let ln_c = ln_kernel_constant(params);
    let (lo, hi) = ((s - t).abs(), s + t);
    if hi - lo <= 0.0 || u_cut <= lo {
        return vec![];
    }
    let half = 0.5 * (hi - lo);
    let th_end = if u_cut < hi { (1.0 - (u_cut - lo) / half).clamp(-1.0, 1.0).acos() } else { PI };
    let panels = 4 + (lambda_scale.abs() * (hi - lo) / PI).ceil() as usize;
    let breaks = uniform_breaks(0.0, th_end, th_end / panels as f64);
    let (th, w) = composite_gauss(&breaks, 16);
    th.iter()
        .zip(&w)
        .map(|(&th, &wt)| {
            let u = lo + half * (1.0 - th.cos());
            let k = kernel_k_unchecked(params, ln_c, s, t, u);
            (u, k * weight_delta(params, u) * half * th.sin() * wt)
        })
        .collect()
}

/// `∫ K(s,t,u) dμ(u)`, equal to 1.
pub fn kernel_mass(params: &JacobiParams, s: f64, t: f64) -> Result<f64> {
    if s == 0.0 || t == 0.0 {
        return Ok(1.0);
    }
    Ok(kernel_rule(params, s, t, 0.0)?.iter().map(|(_, w)| w).sum())
}

/// `|φ_λ(s)φ_λ(t) - ∫ φ_λ(u) K(s,t,u) dμ(u)|`.
pub fn product_formula_defect(params: &JacobiParams, lambda: Complex64, s: f64, t: f64) -> Result<f64> {
    params.require_strict("product formula")?;
    if s == 0.0 || t == 0.0 {
        return Ok(0.0);
    }
    let rule = kernel_rule(params, s, t, lambda.re)?;
    let us: Vec<f64> = rule.iter().map(|r| r.0).collect();
    let row = PhiGrid::new(params, &us)?.row(lambda)?;
    let rhs: Complex64 = row.iter().zip(&rule).map(|(v, r)| v * r.1).sum();
    let lhs = phi(params, lambda, s, EvalMethod::Auto)? * phi(params, lambda, t, EvalMethod::Auto)?;
    Ok((lhs - rhs).norm())
}

/// Composite Gauss nodes on `[0, T]` with `dμ` weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub t_max: f64,
}

impl ConvGrid {
    pub fn new(params: &JacobiParams, t_max: f64, panel_width: f64) -> Result<Self> {
        if !(t_max > 0.0 && panel_width > 0.0) {
            return Err(JacobiError::Domain(format!(
                "grid needs positive extent and panel width, got {t_max}, {panel_width}"
            )));
        }
        let (nodes, w) = composite_gauss(&uniform_breaks(0.0, t_max, panel_width), 16);
        let weights = nodes.iter().zip(&w).map(|(&t, &wt)| wt * weight_delta(params, t)).collect();
        Ok(ConvGrid { nodes, weights, t_max })
    }

    /// `μ([0, T])` as seen by the grid.
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    fn covers(&self, params: &JacobiParams, f: &RadialFunction) -> Result<()> {
        if f.support_hint <= self.t_max {
            return Ok(());
        }
        let tail = f.eval(self.t_max).norm() * (2.0 * params.rho() * self.t_max).exp();
        if tail > 1e-10 {
            return Err(JacobiError::GridBudget(format!(
                "function not negligible at grid end {}: |f|e^(2ρT) = {tail:.3e}",
                self.t_max
            )));
        }
        Ok(())
    }
}

/// `(τ_x f)(y) = ∫ f(u) K(x,y,u) dμ(u)` for `0 <= y`, given `f` vanishing beyond `cut`.
fn translate_at(params: &JacobiParams, f: &RadialFunction, x: f64, y: f64, cut: f64) -> Result<Complex64> {
    if x == 0.0 {
        return Ok(f.eval(y));
    }
    if y == 0.0 {
        return Ok(f.eval(x));
    }
    if (x - y).abs() >= cut {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let rule = kernel_rule_below(params, x, y, 0.0, cut);
    Ok(rule.iter().map(|&(u, w)| f.eval(u) * w).sum())
}

/// Generalized translate `τ_x f`; `x = 0` returns `f` itself.
pub fn translate(params: &JacobiParams, f: &RadialFunction, x: f64, grid: &ConvGrid) -> Result<RadialFunction> {
    params.require_strict("translation")?;
    if x < 0.0 || x > grid.t_max {
        return Err(JacobiError::GridBudget(format!("shift {x} outside the grid [0, {}]", grid.t_max)));
    }
    if x == 0.0 {
        return Ok(f.clone());
    }
    grid.covers(params, f)?;
    let (p, g) = (*params, f.clone());
    let cut = f.support_hint.min(grid.t_max);
    Ok(RadialFunction::new(f.support_hint + x, f.smoothness, move |y| {
        translate_at(&p, &g, x, y, cut).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    }))
}

/// Hypergroup convolution `(f ⋆ g)(x) = ∫ f(y) (τ_x g)(y) dμ(y)` with `y` on the grid.
pub fn convolve(
    params: &JacobiParams,
    f: &RadialFunction,
    g: &RadialFunction,
    grid: &ConvGrid,
) -> Result<RadialFunction> {
    params.require_strict("convolution")?;
    grid.covers(params, f)?;
    grid.covers(params, g)?;
    let p = *params;
    let ys: Vec<(f64, Complex64)> = grid
        .nodes
        .iter()
        .zip(&grid.weights)
        .filter_map(|(&y, &w)| {
            let v = f.eval(y) * w;
            (v != Complex64::new(0.0, 0.0)).then_some((y, v))
        })
        .collect();
    let gg = g.clone();
    let cut = g.support_hint.min(grid.t_max);
    let smooth = if f.smoothness == Smoothness::Smooth && g.smoothness == Smoothness::Smooth {
        Smoothness::Smooth
    } else {
        Smoothness::Piecewise
    };
    Ok(RadialFunction::new(f.support_hint + g.support_hint, smooth, move |x| {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(y, fy) in &ys {
            match translate_at(&p, &gg, x, y, cut) {
                Ok(v) => acc += fy * v,
                Err(_) => return Complex64::new(f64::NAN, f64::NAN),
            }
        }
        acc
    }))
}

/// `‖f‖_{L^p(dμ)}` on the grid; `p = ∞` takes the maximum over the nodes.
pub fn lp_norm(f: &RadialFunction, p: Exponent, grid: &ConvGrid) -> f64 {
    let vals: Vec<f64> = grid.nodes.par_iter().map(|&t| f.eval(t).norm()).collect();
    match p {
        Exponent::Infinity => vals.iter().cloned().fold(0.0, f64::max),
        Exponent::Finite(p) => {
            let s: f64 = vals.iter().zip(&grid.weights).map(|(v, w)| v.powf(p) * w).sum();
            s.powf(1.0 / p)
        }
    }
}

/// Young's inequality `‖f⋆g‖_r <= ‖f‖_p ‖g‖_q` for `1/p + 1/q = 1 + 1/r`:
/// returns `(‖f⋆g‖_r, ‖f‖_p ‖g‖_q)`.
pub fn young_pair(
    params: &JacobiParams,
    f: &RadialFunction,
    g: &RadialFunction,
    pqr: (Exponent, Exponent, Exponent),
    grid: &ConvGrid,
) -> Result<(f64, f64)> {
    let inv = |e: Exponent| match e {
        Exponent::Infinity => 0.0,
        Exponent::Finite(p) => 1.0 / p,
    };
    let (p, q, r) = pqr;
    if (inv(p) + inv(q) - 1.0 - inv(r)).abs() > 1e-12 {
        return Err(JacobiError::Domain("Young exponents need 1/p + 1/q = 1 + 1/r".into()));
    }
    let fg = convolve(params, f, g, grid)?;
    Ok((lp_norm(&fg, r, grid), lp_norm(f, p, grid) * lp_norm(g, q, grid)))
}

/// `φ_λ` as a radial function (NaN where evaluation fails).
pub fn jacobi_radial(params: &JacobiParams, lambda: Complex64) -> RadialFunction {
    let p = *params;
    RadialFunction::new(f64::INFINITY, Smoothness::Smooth, move |t| {
        phi(&p, lambda, t, EvalMethod::Auto).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::QuadratureSpec;
    use crate::transform::forward_transform;
    use proptest::prelude::*;

    fn p(a: f64, b: f64) -> JacobiParams {
        JacobiParams::new(a, b).unwrap()
    }

    #[test]
    fn b_values() {
        assert_eq!(kernel_b(0.0, 0.0, 0.0), 1.0);
        assert!((kernel_b(1.0, 1.0, 0.0) - 1.0).abs() < 1e-15);
        let v = kernel_b(1.0, 2.0, 2.5);
        assert!(v > -1.0 && v < 1.0);
        assert!((1.0 - v - one_minus_b(1.0, 2.0, 2.5)).abs() < 1e-14);
    }

    #[test]
    fn kernel_vanishes_off_support_and_needs_strict_params() {
        let q = p(1.3, 0.2);
        assert_eq!(kernel_k(&q, 1.0, 0.5, 0.4).unwrap(), 0.0);
        assert_eq!(kernel_k(&q, 1.0, 0.5, 1.6).unwrap(), 0.0);
        assert!(kernel_k(&p(0.4, 0.0), 1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn mass_is_one() {
        let q = p(1.3, 0.2);
        for &(s, t) in &[(1.0, 0.5), (0.1, 3.0), (2.0, 2.0), (3.0, 3.0)] {
            let m = kernel_mass(&q, s, t).unwrap();
            assert!((m - 1.0).abs() < 1e-6, "({s}, {t}): {m}");
        }
    }

    #[test]
    fn product_formula() {
        let q = p(1.3, 0.2);
        let d = product_formula_defect(&q, Complex64::new(2.0, 0.0), 1.0, 0.5).unwrap();
        assert!(d < 1e-8, "{d}");
        let d = product_formula_defect(&q, Complex64::new(0.0, q.rho()), 1.0, 0.5).unwrap();
        assert!(d < 1e-8);
        assert_eq!(product_formula_defect(&q, Complex64::new(2.0, 0.0), 0.0, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn angular_form_has_the_same_shape() {
        let q = p(1.3, 0.2);
        let pts = [(1.0, 0.5, 0.9), (2.0, 1.5, 1.0), (0.7, 0.7, 1.2), (3.0, 1.0, 3.5)];
        let ratios: Vec<f64> = pts
            .iter()
            .map(|&(s, t, u)| kernel_k(&q, s, t, u).unwrap() / kernel_k_angular(&q, s, t, u).unwrap())
            .collect();
        for r in &ratios {
            assert!((r / ratios[0] - 1.0).abs() < 1e-8, "{ratios:?}");
        }
    }

    #[test]
    fn translation_by_zero_and_at_origin() {
        let q = p(1.3, 0.2);
        let grid = ConvGrid::new(&q, 4.0, 0.25).unwrap();
        let f = RadialFunction::bump(1.0);
        let t0 = translate(&q, &f, 0.0, &grid).unwrap();
        assert_eq!(t0.eval(0.3), f.eval(0.3));
        let t1 = translate(&q, &f, 0.5, &grid).unwrap();
        assert!((t1.eval(0.0) - f.eval(0.5)).norm() < 1e-15);
    }

    #[test]
    fn translation_of_jacobi_function() {
        let q = p(1.3, 0.2);
        let grid = ConvGrid::new(&q, 4.0, 0.25).unwrap();
        let l = Complex64::new(2.0, 0.0);
        let tx = translate(&q, &jacobi_radial(&q, l), 0.8, &grid);
        assert!(tx.is_err());
        let f = RadialFunction::new(4.0, Smoothness::Smooth, move |t| phi(&q, l, t, EvalMethod::Auto).unwrap());
        let tx = translate(&q, &f, 0.8, &grid).unwrap();
        let px = phi(&q, l, 0.8, EvalMethod::Auto).unwrap();
        for y in [0.3, 1.0, 2.0] {
            let want = px * phi(&q, l, y, EvalMethod::Auto).unwrap();
            assert!((tx.eval(y) - want).norm() < 1e-4);
        }
    }

    #[test]
    fn convolution_theorem_and_commutativity() {
        let q = p(1.3, 0.2);
        let grid = ConvGrid::new(&q, 2.0, 0.25).unwrap();
        let f = RadialFunction::bump(1.0);
        let g = RadialFunction::bump(0.8);
        let fg = convolve(&q, &f, &g, &grid).unwrap();
        let gf = convolve(&q, &g, &f, &grid).unwrap();
        for x in [0.2, 0.9, 1.5] {
            assert!((fg.eval(x) - gf.eval(x)).norm() < 1e-6 * fg.eval(0.2).norm());
        }
        let quad = QuadratureSpec::default().with_tol(1e-10);
        let ls = [1.0, 3.0, 7.0];
        let a = forward_transform(&q, &f, &ls, &quad).unwrap().values;
        let b = forward_transform(&q, &g, &ls, &quad).unwrap().values;
        let c = forward_transform(&q, &fg, &ls, &quad).unwrap().values;
        for k in 0..3 {
            let want = a[k] * b[k];
            assert!((c[k] - want).norm() < 1e-3 * want.norm(), "λ = {}", ls[k]);
        }
        let zero = convolve(&q, &f, &RadialFunction::zero(), &grid).unwrap();
        assert_eq!(zero.eval(0.5), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn young_inequalities() {
        let q = p(1.3, 0.2);
        let grid = ConvGrid::new(&q, 2.0, 0.25).unwrap();
        let f = RadialFunction::bump(1.0);
        let g = RadialFunction::bump(0.7);
        use Exponent::*;
        for pqr in [(Finite(2.0), Finite(2.0), Infinity), (Finite(1.0), Finite(2.0), Finite(2.0))] {
            let (lhs, rhs) = young_pair(&q, &f, &g, pqr, &grid).unwrap();
            assert!(lhs <= rhs, "{pqr:?}: {lhs} > {rhs}");
        }
    }

    proptest! {
        #[test]
        fn kernel_symmetry(s in 0.05f64..3.0, t in 0.05f64..3.0, frac in 0.01f64..0.99) {
            let q = p(1.3, 0.2);
            let u = (s - t).abs() + frac * (s + t - (s - t).abs());
            let k = kernel_k(&q, s, t, u).unwrap();
            for v in [kernel_k(&q, t, s, u).unwrap(), kernel_k(&q, u, t, s).unwrap(), kernel_k(&q, s, u, t).unwrap()] {
                prop_assert!((v - k).abs() <= 1e-12 * k.abs());
            }
            prop_assert!(k >= 0.0);
        }
    }
}

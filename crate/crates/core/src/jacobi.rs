//! Jacobi parameters, weights, the c-function and the Jacobi function `φ_λ(t)`.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::asymptotic::{self, R0};
use crate::dd::{CDd, Dd};
use crate::error::{JacobiError, Result};
use crate::quadrature::{tanh_sinh, QuadratureSpec};
use crate::special::{
    hyp2f1_real, is_nonpositive_integer, ln_gamma, ln_gamma_real, series_dd, SeriesAccuracy,
    MAX_SERIES_ARG,
};

/// The parameter pair `(α, β)` with its derived quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobiParams {
    alpha: f64,
    beta: f64,
    rho: f64,
    n_alpha: f64,
}

impl JacobiParams {
    /// Accepts any finite pair with `α > β >= -1/2` and `α > -1`; use
    /// [`JacobiParams::is_strict`] before transform or convolution work.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(JacobiError::Parameter(format!("non-finite (α, β) = ({alpha}, {beta})")));
        }
        if !(alpha > beta && beta >= -0.5 && alpha > -1.0) {
            return Err(JacobiError::Parameter(format!(
                "(α, β) = ({alpha}, {beta}) needs α > β >= -1/2"
            )));
        }
        Ok(JacobiParams { alpha, beta, rho: alpha + beta + 1.0, n_alpha: 2.0 * (alpha + 1.0) })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Critical dimension `n_α = 2(α + 1)`.
    pub fn n_alpha(&self) -> f64 {
        self.n_alpha
    }

    /// `α > 1/2` and `α > β > -1/2`: the range of the L^p theory.
    pub fn is_strict(&self) -> bool {
        self.alpha > 0.5 && self.alpha > self.beta && self.beta > -0.5
    }

    /// `α > β >= -1/2`: enough for pointwise evaluation.
    pub fn is_evaluable(&self) -> bool {
        self.alpha > self.beta && self.beta >= -0.5
    }

    pub fn require_strict(&self, op: &str) -> Result<()> {
        if self.is_strict() {
            Ok(())
        } else {
            Err(JacobiError::Parameter(format!(
                "{op} needs α > 1/2 and α > β > -1/2, got ({}, {})",
                self.alpha, self.beta
            )))
        }
    }
}

impl<'de> Deserialize<'de> for JacobiParams {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            alpha: f64,
            beta: f64,
        }
        let raw = Raw::deserialize(d)?;
        JacobiParams::new(raw.alpha, raw.beta).map_err(serde::de::Error::custom)
    }
}

/// Spectral parameter with an optional strip constraint `|Im λ| < width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub lambda: Complex64,
    pub strip_width: Option<f64>,
}

impl SpectralPoint {
    pub fn new(lambda: Complex64, strip_width: Option<f64>) -> Result<Self> {
        if let Some(w) = strip_width {
            if lambda.im.abs() >= w {
                return Err(JacobiError::Domain(format!(
                    "λ = {lambda} lies outside the strip |Im λ| < {w}"
                )));
            }
        }
        Ok(SpectralPoint { lambda, strip_width })
    }

    /// Strip `|Im λ| < (2/p - 1) ρ` attached to `L^p`, `1 <= p < 2`.
    pub fn in_lp_strip(params: &JacobiParams, lambda: Complex64, p: f64) -> Result<Self> {
        SpectralPoint::new(lambda, Some((2.0 / p - 1.0) * params.rho))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMethod {
    DirectHypergeometric,
    CosineIntegral,
    LaplaceRepresentation,
    BesselExpansion,
    HarishChandra,
    Auto,
}

impl EvalMethod {
    pub const ALL: [EvalMethod; 6] = [
        EvalMethod::DirectHypergeometric,
        EvalMethod::CosineIntegral,
        EvalMethod::LaplaceRepresentation,
        EvalMethod::BesselExpansion,
        EvalMethod::HarishChandra,
        EvalMethod::Auto,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            EvalMethod::DirectHypergeometric => "direct_hypergeometric",
            EvalMethod::CosineIntegral => "cosine_integral",
            EvalMethod::LaplaceRepresentation => "laplace_representation",
            EvalMethod::BesselExpansion => "bessel_expansion",
            EvalMethod::HarishChandra => "harish_chandra",
            EvalMethod::Auto => "auto",
        }
    }
}

impl fmt::Display for EvalMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EvalMethod {
    type Err = JacobiError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let m = match key.as_str() {
            "direct" | "direct_hypergeometric" => EvalMethod::DirectHypergeometric,
            "cosine" | "cosine_integral" => EvalMethod::CosineIntegral,
            "laplace" | "laplace_representation" => EvalMethod::LaplaceRepresentation,
            "bessel" | "bessel_expansion" => EvalMethod::BesselExpansion,
            "hc" | "harish_chandra" => EvalMethod::HarishChandra,
            "auto" => EvalMethod::Auto,
            _ => return Err(JacobiError::Domain(format!("unknown evaluation method `{s}`"))),
        };
        Ok(m)
    }
}

/// Value of `φ_λ(t)` with the method that produced it and an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiValue {
    pub value: Complex64,
    pub err_est: f64,
    pub method: EvalMethod,
}

/// `Δ(t) = (2 sinh t)^{2α+1} (2 cosh t)^{2β+1}`.
pub fn weight_delta(params: &JacobiParams, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    ln_weight_delta(params, t).exp()
}

/// `ln Δ(t)`, finite for `t > 0` and free of overflow at large `t`.
pub fn ln_weight_delta(params: &JacobiParams, t: f64) -> f64 {
    let t = t.abs();
    (2.0 * params.alpha + 1.0) * (LN_2 + ln_sinh(t)) + (2.0 * params.beta + 1.0) * (LN_2 + ln_cosh(t))
}

/// `Δ'(t) = (sinh t)^{α+1/2} (cosh t)^{β+1/2}`.
pub fn weight_delta_prime(params: &JacobiParams, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    ((params.alpha + 0.5) * ln_sinh(t) + (params.beta + 0.5) * ln_cosh(t)).exp()
}

pub(crate) fn ln_cosh(t: f64) -> f64 {
    let t = t.abs();
    t + (-2.0 * t).exp().ln_1p() - LN_2
}

pub(crate) fn ln_sinh(t: f64) -> f64 {
    if t < 1.0 {
        t.sinh().ln()
    } else {
        t + (-(-2.0 * t).exp()).ln_1p() - LN_2
    }
}

/// `ln c(λ)` for the c-function
/// `c(λ) = 2^{ρ-iλ} Γ(α+1) Γ(iλ) / (Γ((ρ+iλ)/2) Γ((α-β+1+iλ)/2))`.
///
/// Fails at the poles `iλ ∈ {0, -1, -2, ...}`; returns `-∞` real part at zeros.
pub fn ln_c_function(params: &JacobiParams, lambda: Complex64) -> Result<Complex64> {
    let i = Complex64::i();
    let il = i * lambda;
    if is_nonpositive_integer(il) {
        return Err(JacobiError::Pole { what: "c-function", at: format!("λ = {lambda}") });
    }
    let d1 = (params.rho + il) * 0.5;
    let d2 = (params.alpha - params.beta + 1.0 + il) * 0.5;
    if is_nonpositive_integer(d1) || is_nonpositive_integer(d2) {
        return Ok(Complex64::new(f64::NEG_INFINITY, 0.0));
    }
    Ok((params.rho - il) * LN_2 + ln_gamma_real(params.alpha + 1.0) + ln_gamma(il)?
        - ln_gamma(d1)?
        - ln_gamma(d2)?)
}

pub fn c_function(params: &JacobiParams, lambda: Complex64) -> Result<Complex64> {
    let l = ln_c_function(params, lambda)?;
    if l.re == f64::NEG_INFINITY {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(l.exp())
}

const DENSITY_FLOOR: f64 = 1e-8;

/// Plancherel density `d(λ) = |c(λ)|^{-2} / (2π)` for real `λ`; continuous through 0.
pub fn spectral_density(params: &JacobiParams, lambda: f64) -> f64 {
    let lam = lambda.abs();
    if lam < DENSITY_FLOOR {
        let at_floor = spectral_density(params, DENSITY_FLOOR);
        return at_floor * (lam / DENSITY_FLOOR).powi(2);
    }
    let l = ln_c_function(params, Complex64::new(lam, 0.0))
        .expect("c-function is pole-free on the positive real axis");
    (-2.0 * l.re).exp() / (2.0 * PI)
}

/// `tanh² t` and `ln cosh t` with `tanh² t` carried to double-double accuracy.
fn tanh_sq_dd(t: f64) -> Dd {
    let e = Dd::exp(t);
    let inv = Dd::ONE / e;
    let s = e - inv;
    let c = e + inv;
    let r = s / c;
    r * r
}

/// First Pfaff-transformed parameter pair for the orientation `sign = ±1`:
/// `φ_λ(t) = (cosh t)^{-(ρ+iσλ)} F((ρ+iσλ)/2, (α-β+1+iσλ)/2; α+1; tanh² t)`.
fn pfaff_pair(params: &JacobiParams, lambda: Complex64, sign: f64) -> (Complex64, Complex64) {
    let il = Complex64::i() * lambda * sign;
    ((params.rho + il) * 0.5, (params.alpha - params.beta + 1.0 + il) * 0.5)
}

/// Orientation in which the Pfaff series terminates, if any.
pub(crate) fn terminating_orientation(params: &JacobiParams, lambda: Complex64) -> Option<f64> {
    [1.0, -1.0].into_iter().find(|&sign| {
        let (a, b) = pfaff_pair(params, lambda, sign);
        is_nonpositive_integer(a) || is_nonpositive_integer(b)
    })
}

/// Hypergeometric evaluation through the Pfaff transform at `tanh² t`.
pub fn phi_direct(params: &JacobiParams, lambda: Complex64, t: f64) -> Result<(Complex64, f64)> {
    if t < 0.0 || !t.is_finite() {
        return Err(JacobiError::Domain(format!("t = {t} must be finite and >= 0")));
    }
    if t == 0.0 {
        return Ok((Complex64::new(1.0, 0.0), 0.0));
    }
    let terminating = terminating_orientation(params, lambda);
    let sign = terminating.unwrap_or(1.0);
    let w = tanh_sq_dd(t);
    if terminating.is_none() && w.to_f64() > MAX_SERIES_ARG {
        return Err(JacobiError::Divergence(format!(
            "tanh²({t}) = {:.6} exceeds {MAX_SERIES_ARG}; use the Harish-Chandra branch",
            w.to_f64()
        )));
    }
    let (a, b) = pfaff_pair(params, lambda, sign);
    let acc = SeriesAccuracy { rel_tol: 1e-16, max_terms: 200_000 };
    let z = CDd { re: w, im: Dd::ZERO };
    let (f, err) = series_dd(a, b, Complex64::new(params.alpha + 1.0, 0.0), z, acc)?;
    let pre = (-(params.rho + Complex64::i() * lambda * sign) * ln_cosh(t)).exp();
    let v = pre * f;
    Ok((v, err * pre.norm() + v.norm() * 4e-16))
}

fn cosine_rule_level(lambda: Complex64) -> u32 {
    let scale = (lambda.norm() / 20.0).ceil().max(1.0);
    6 + scale.log2().ceil() as u32
}

fn cosine_integral_at_level(
    params: &JacobiParams,
    lambda: Complex64,
    t: f64,
    level: u32,
) -> Complex64 {
    let (a, b) = (params.alpha, params.beta);
    let ln_const = (3.0 * a + 2.0 * b + 0.5) * LN_2 + ln_gamma_real(a + 1.0)
        - ln_gamma_real(a + 0.5)
        - 0.5 * PI.ln();
    let ch = t.cosh();
    // A(s,t) = C sinh(2t) cosh^{β-1/2} t (cosh t - cosh s)^{α-1/2} F(1/2+β, 1/2-β; α+1/2; (cosh t - cosh s)/(2 cosh t))
    let ln_outer = ln_const + (2.0 * t).sinh().ln() + (b - 0.5) * ln_cosh(t);
    let rule = tanh_sinh(level);
    let sum = rule.integrate(|x, xc| {
        let s = t * x;
        let gap = 2.0 * (0.5 * (t + s)).sinh() * (0.5 * t * xc).sinh();
        let f = hyp2f1_real(0.5 + b, 0.5 - b, a + 0.5, gap / (2.0 * ch));
        let amp = (ln_outer + (a - 0.5) * gap.ln()).exp() * f;
        (lambda * s).cos() * amp
    });
    // ds = t dx, and the 2/Δ prefactor
    sum * t * 2.0 * (-ln_weight_delta(params, t)).exp()
}

/// Evaluation through the Mehler-type cosine integral
/// `φ_λ(t) = (2/Δ(t)) ∫_0^t cos(λs) A(s,t) ds`.
///
/// The rule is a fixed tanh-sinh grid in `s/t`, refined with `|λ|`; the error
/// estimate compares against the next coarser grid.
pub fn phi_via_cosine_integral(
    params: &JacobiParams,
    lambda: Complex64,
    t: f64,
    quad: &QuadratureSpec,
) -> Result<(Complex64, f64)> {
    if !(t > 0.0) {
        return Err(JacobiError::Domain(format!(
            "cosine integral needs t > 0, got {t}"
        )));
    }
    if params.alpha <= -0.5 + 1e-12 {
        return Err(JacobiError::Parameter("cosine integral needs α > -1/2".into()));
    }
    let level = cosine_rule_level(lambda);
    let fine = cosine_integral_at_level(params, lambda, t, level);
    let coarse = cosine_integral_at_level(params, lambda, t, level - 1);
    let err = (fine - coarse).norm();
    check_quadrature("cosine integral", fine, err, quad)?;
    Ok((fine, err))
}

fn check_quadrature(what: &str, v: Complex64, err: f64, quad: &QuadratureSpec) -> Result<()> {
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(JacobiError::Quadrature(format!("{what} produced a non-finite value")));
    }
    let budget = (quad.tol * 1e3).max(1e-9) * v.norm().max(1.0);
    if err > budget {
        return Err(JacobiError::Quadrature(format!(
            "{what}: refinement difference {err:.3e} exceeds {budget:.3e}"
        )));
    }
    Ok(())
}

/// `ln` of the normalizing constant of the Laplace representation:
/// `1/c = B(α-β, β+1)/2 · B(β+1/2, 1/2)`.
fn ln_laplace_constant(params: &JacobiParams) -> f64 {
    let (a, b) = (params.alpha, params.beta);
    let ln_beta = |x: f64, y: f64| ln_gamma_real(x) + ln_gamma_real(y) - ln_gamma_real(x + y);
    -(ln_beta(a - b, b + 1.0) - LN_2 + ln_beta(b + 0.5, 0.5))
}

fn laplace_at_level(params: &JacobiParams, lambda: Complex64, t: f64, level: u32) -> Complex64 {
    let (a, b) = (params.alpha, params.beta);
    let rule = tanh_sinh(level);
    let (ch, sh) = (t.cosh(), t.sinh());
    let expo = Complex64::i() * lambda - params.rho;
    let angular: Vec<(f64, f64)> = rule
        .nodes
        .iter()
        .map(|n| {
            let y = n.x.min(n.xc);
            let cos_psi = if n.x <= 0.5 { (PI * n.x).cos() } else { -(PI * n.xc).cos() };
            (cos_psi, n.w * PI * (2.0 * b * (PI * y).sin().ln()).exp())
        })
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    for rn in &rule.nodes {
        let r = rn.x;
        let radial = ((a - b - 1.0) * (rn.xc * (1.0 + r)).ln() + (2.0 * b + 1.0) * r.ln()).exp();
        if radial == 0.0 {
            continue;
        }
        let mut inner = Complex64::new(0.0, 0.0);
        for &(cos_psi, w) in &angular {
            let m2 = ch * ch + 2.0 * ch * sh * r * cos_psi + sh * sh * r * r;
            inner += (expo * (0.5 * m2.ln())).exp() * w;
        }
        total += inner * radial * rn.w;
    }
    total * ln_laplace_constant(params).exp()
}

/// Evaluation through the Laplace-type double integral over the unit disc.
pub fn phi_via_laplace(
    params: &JacobiParams,
    lambda: Complex64,
    t: f64,
    quad: &QuadratureSpec,
) -> Result<(Complex64, f64)> {
    if !(params.beta > -0.5) {
        return Err(JacobiError::Parameter(
            "Laplace representation needs β > -1/2".into(),
        ));
    }
    if t < 0.0 || !t.is_finite() {
        return Err(JacobiError::Domain(format!("t = {t} must be finite and >= 0")));
    }
    if t == 0.0 {
        return Ok((Complex64::new(1.0, 0.0), 0.0));
    }
    let fine = laplace_at_level(params, lambda, t, 5);
    let coarse = laplace_at_level(params, lambda, t, 4);
    let err = (fine - coarse).norm();
    check_quadrature("Laplace representation", fine, err, quad)?;
    Ok((fine, err))
}

/// Evaluate `φ_λ(t)` with the requested method.
///
/// `Auto` uses: exact terminating series when available; the Bessel-type
/// expansion for `t <= R0` and `|λ| >= 5`; the Pfaff series for `t < 1`;
/// the Harish-Chandra recombination for `t >= 1`, each falling back to the
/// others on failure.
pub fn phi_detailed(
    params: &JacobiParams,
    lambda: Complex64,
    t: f64,
    method: EvalMethod,
) -> Result<PhiValue> {
    if t < 0.0 || !t.is_finite() {
        return Err(JacobiError::Domain(format!("t = {t} must be finite and >= 0")));
    }
    let quad = QuadratureSpec::default();
    let wrap = |m: EvalMethod, r: Result<(Complex64, f64)>| {
        r.map(|(value, err_est)| PhiValue { value, err_est, method: m })
    };
    match method {
        EvalMethod::DirectHypergeometric => wrap(method, phi_direct(params, lambda, t)),
        EvalMethod::CosineIntegral => {
            if t == 0.0 {
                return wrap(method, Ok((Complex64::new(1.0, 0.0), 0.0)));
            }
            wrap(method, phi_via_cosine_integral(params, lambda, t, &quad))
        }
        EvalMethod::LaplaceRepresentation => wrap(method, phi_via_laplace(params, lambda, t, &quad)),
        EvalMethod::BesselExpansion => {
            wrap(method, asymptotic::phi_bessel_auto(params, lambda, t))
        }
        EvalMethod::HarishChandra => wrap(method, asymptotic::phi_hc(params, lambda, t)),
        EvalMethod::Auto => phi_auto(params, lambda, t),
    }
}

fn phi_auto(params: &JacobiParams, lambda: Complex64, t: f64) -> Result<PhiValue> {
    use EvalMethod::*;
    if t == 0.0 || terminating_orientation(params, lambda).is_some() {
        return phi_detailed(params, lambda, t, DirectHypergeometric);
    }
    let order: &[EvalMethod] = if t <= R0 && lambda.norm() >= 5.0 {
        &[BesselExpansion, DirectHypergeometric, HarishChandra]
    } else if t < 1.0 {
        &[DirectHypergeometric, BesselExpansion]
    } else {
        &[HarishChandra, DirectHypergeometric]
    };
    let mut last = None;
    for &m in order {
        match phi_detailed(params, lambda, t, m) {
            Ok(v) => return Ok(v),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("routing table is nonempty"))
}

pub fn phi(params: &JacobiParams, lambda: Complex64, t: f64, method: EvalMethod) -> Result<Complex64> {
    phi_detailed(params, lambda, t, method).map(|v| v.value)
}

/// Centered-difference residual of `φ'' + ((2α+1)coth t + (2β+1)tanh t) φ' + (λ²+ρ²) φ`
/// for an arbitrary evaluator of `t ↦ φ(t)`.
pub fn eigen_residual_with<F>(
    params: &JacobiParams,
    lambda: Complex64,
    t: f64,
    h: f64,
    mut eval: F,
) -> Result<Complex64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    if !(t > 2.0 * h && h > 0.0) {
        return Err(JacobiError::Domain(format!("residual needs t > 2h > 0, got t = {t}, h = {h}")));
    }
    let fm = eval(t - h)?;
    let f0 = eval(t)?;
    let fp = eval(t + h)?;
    let d2 = (fp - 2.0 * f0 + fm) / (h * h);
    let d1 = (fp - fm) / (2.0 * h);
    let coef = (2.0 * params.alpha + 1.0) / t.tanh() + (2.0 * params.beta + 1.0) * t.tanh();
    Ok(d2 + coef * d1 + (lambda * lambda + params.rho * params.rho) * f0)
}

pub fn eigen_residual(params: &JacobiParams, lambda: Complex64, t: f64, h: f64) -> Result<Complex64> {
    eigen_residual_with(params, lambda, t, h, |s| phi(params, lambda, s, EvalMethod::Auto))
}

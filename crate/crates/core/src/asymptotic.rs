//! Small-`t` Bessel-type expansion and large-`t` Harish-Chandra series of `φ_λ`.
//!
//! Near the origin
//! `φ_λ(t) = (t/sinh t)^{α+1/2} (cosh t)^{-β-1/2} Σ_m a_m(t) t^{2m} (α+1/2)_m/(α+1)_m E_{α+m}(λt)`
//! with `E_μ(z) = Γ(μ+1)(z/2)^{-μ} J_μ(z)`; away from it
//! `φ_λ(t) = c(λ) e^{(iλ-ρ)t} Φ_λ(t) + c(-λ) e^{(-iλ-ρ)t} Φ_{-λ}(t)` with
//! `Φ_λ(t) = Σ_k Γ_k(λ) e^{-2kt}`.

use std::collections::HashMap;
use std::f64::consts::{E, PI};
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{JacobiError, Result};
use crate::jacobi::{ln_c_function, ln_cosh, phi, EvalMethod, JacobiParams};
use crate::special::bessel_e_seq;

/// Radius below which the Bessel-type expansion is used.
pub const R0: f64 = 1.11;
/// Radius controlling the coefficient decay `R1^{-m}`.
pub const R1: f64 = 1.24;
/// Smallest `t` at which the Harish-Chandra series is summed.
pub const HC_MIN_T: f64 = 0.5;
/// Number of expansion terms used when the order is chosen automatically.
pub const AUTO_ORDER: usize = 36;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionRadii {
    pub r0: f64,
    pub r1: f64,
}

impl Default for ExpansionRadii {
    fn default() -> Self {
        ExpansionRadii { r0: R0, r1: R1 }
    }
}

impl ExpansionRadii {
    /// Requires `1 < r0`, `r0² < r1` and `r1 < π/2`.
    pub fn new(r0: f64, r1: f64) -> Result<Self> {
        if !(1.0 < r0 && r0 * r0 < r1 && r1 < PI / 2.0) {
            return Err(JacobiError::Domain(format!(
                "radii ({r0}, {r1}) need 1 < R0, R0² < R1 < π/2"
            )));
        }
        Ok(ExpansionRadii { r0, r1 })
    }
}

/// Wedge `{λ : γ >= Im λ >= -ε |Re λ|}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralDomain {
    pub epsilon: f64,
    pub gamma_cap: f64,
}

impl SpectralDomain {
    pub fn contains(&self, lambda: Complex64) -> bool {
        self.gamma_cap >= lambda.im && lambda.im >= -self.epsilon * lambda.re.abs()
    }
}

pub fn in_spectral_domain(dom: &SpectralDomain, lambda: Complex64) -> bool {
    dom.contains(lambda)
}

/// Possibly complex `(α, β)` accepted by the small-`t` expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionParams {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl ExpansionParams {
    /// Requires `Re α > 1/2` and `Re α > Re β > -1/2`.
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        if !(alpha.re > 0.5 && alpha.re > beta.re && beta.re > -0.5) {
            return Err(JacobiError::Parameter(format!(
                "expansion needs Re α > 1/2 and Re α > Re β > -1/2, got ({alpha}, {beta})"
            )));
        }
        Ok(ExpansionParams { alpha, beta })
    }
}

impl TryFrom<&JacobiParams> for ExpansionParams {
    type Error = JacobiError;

    fn try_from(p: &JacobiParams) -> Result<Self> {
        ExpansionParams::new(Complex64::new(p.alpha(), 0.0), Complex64::new(p.beta(), 0.0))
    }
}

/// `d_j = Γ(α+1/2)/(Γ(1/2+β)Γ(1/2-β)) · Γ(1/2+β+j)Γ(1/2-β+j)/(Γ(α+1/2+j) j!)`, `j = 0..=J`.
pub fn dj_coeffs(params: &ExpansionParams, j_max: usize) -> Result<Vec<Complex64>> {
    let (a, b) = (params.alpha, params.beta);
    let mut out = Vec::with_capacity(j_max + 1);
    let mut d = Complex64::new(1.0, 0.0);
    out.push(d);
    for j in 0..j_max {
        let jf = j as f64;
        let den = (a + 0.5 + jf) * (jf + 1.0);
        if den.norm() == 0.0 {
            return Err(JacobiError::Pole { what: "d_j", at: format!("j = {j}") });
        }
        d *= (b + 0.5 + jf) * (0.5 - b + jf) / den;
        out.push(d);
    }
    Ok(out)
}

/// Taylor coefficients `L_1..L_K` of `w ↦ ln(H(w)/H(0))`,
/// `H(w) = (2 cosh t - 2 cosh √(t² - w)) / w`.
fn cosh_ratio_log(t: f64, k_max: usize) -> Result<Vec<f64>> {
    if t.abs() >= PI {
        return Err(JacobiError::Radius(format!("cosh-ratio expansion needs |t| < π, got {t}")));
    }
    if k_max > 70 {
        return Err(JacobiError::Domain(format!("cosh-ratio order {k_max} exceeds 70")));
    }
    let t2 = t * t;
    // c_k = (-1)^k Σ_{n>=k} C(n,k) t^{2(n-k)} / (2n)!
    let c = |k: usize| -> f64 {
        let mut term = 1.0;
        for i in 1..=2 * k {
            term /= i as f64;
        }
        let mut sum = term;
        let mut n = k;
        loop {
            let nf = n as f64;
            term *= (nf + 1.0) / (nf + 1.0 - k as f64) * t2 / ((2.0 * nf + 1.0) * (2.0 * nf + 2.0));
            sum += term;
            n += 1;
            if term <= 1e-18 * sum {
                break;
            }
        }
        if k % 2 == 0 {
            sum
        } else {
            -sum
        }
    };
    let h0 = -2.0 * c(1);
    let u: Vec<f64> = (0..=k_max).map(|n| if n == 0 { 1.0 } else { -2.0 * c(n + 1) / h0 }).collect();
    let mut l = vec![0.0; k_max + 1];
    for n in 1..=k_max {
        let mut acc = n as f64 * u[n];
        for k in 1..n {
            acc -= k as f64 * l[k] * u[n - k];
        }
        l[n] = acc / n as f64;
    }
    Ok(l)
}

fn exp_series(l: &[f64], z: Complex64, len: usize) -> Vec<Complex64> {
    let mut e = vec![Complex64::new(0.0, 0.0); len + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for n in 1..=len {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..=n {
            acc += e[n - k] * (k as f64 * l[k]);
        }
        e[n] = acc * z / n as f64;
    }
    e
}

/// Coefficients `a_k(t, z)` of
/// `((2cosh t - 2cosh s)/(t² - s²))^z = (sinh t/t)^z Σ_k a_k(t,z) (t² - s²)^k`, `k = 0..=K`.
pub fn cosh_ratio_coeffs(t: f64, z: Complex64, k_max: usize) -> Result<Vec<Complex64>> {
    let l = cosh_ratio_log(t, k_max)?;
    Ok(exp_series(&l, z, k_max))
}

/// Expansion coefficients `a_m(t)`, `m = 0..=M`, for `0 <= t <= R0`.
pub fn expansion_coeffs_am(params: &ExpansionParams, t: f64, m_max: usize) -> Result<Vec<Complex64>> {
    if !(0.0..=R0 + 1e-12).contains(&t) {
        return Err(JacobiError::Radius(format!("a_m(t) needs 0 <= t <= {R0}, got {t}")));
    }
    let l = cosh_ratio_log(t, m_max)?;
    let d = dj_coeffs(params, m_max)?;
    let s = if t == 0.0 { 1.0 } else { t.sinh() / t };
    let q = s / (4.0 * t.cosh());
    let mut am = vec![Complex64::new(0.0, 0.0); m_max + 1];
    let mut qj = 1.0;
    for j in 0..=m_max {
        let ej = exp_series(&l, params.alpha + j as f64 - 0.5, m_max - j);
        let w = d[j] * qj;
        for (k, ek) in ej.iter().enumerate() {
            am[j + k] += w * ek;
        }
        qj *= q;
    }
    Ok(am)
}

/// Cached small-`t` expansion data for one parameter pair.
#[derive(Debug)]
pub struct BesselExpansion {
    pub params: ExpansionParams,
    pub order: usize,
    pub radii: ExpansionRadii,
    pub dj: Vec<Complex64>,
    am_cache: Mutex<HashMap<u64, Arc<Vec<Complex64>>>>,
}

/// Terms beyond the order that feed the error estimate.
const EXTRA_TERMS: usize = 3;

impl BesselExpansion {
    pub fn new(params: ExpansionParams, order: usize) -> Result<Self> {
        let dj = dj_coeffs(&params, order + EXTRA_TERMS)?;
        Ok(BesselExpansion {
            params,
            order,
            radii: ExpansionRadii::default(),
            dj,
            am_cache: Mutex::new(HashMap::new()),
        })
    }

    /// `a_m(t)` for `m <= order + 3`, computed once per `t`.
    pub fn am(&self, t: f64) -> Result<Arc<Vec<Complex64>>> {
        let key = t.to_bits();
        if let Some(v) = self.am_cache.lock().expect("a_m cache poisoned").get(&key) {
            return Ok(v.clone());
        }
        let v = Arc::new(expansion_coeffs_am(&self.params, t, self.order + EXTRA_TERMS)?);
        self.am_cache.lock().expect("a_m cache poisoned").insert(key, v.clone());
        Ok(v)
    }

    /// Value of the order-`M` expansion and an error estimate built from the
    /// next three terms plus the rounding floor.
    pub fn eval(&self, lambda: Complex64, t: f64) -> Result<(Complex64, f64)> {
        let am = self.am(t)?;
        eval_with_coeffs(&self.params, &am, self.order, lambda, t)
    }
}

fn check_expansion_input(lambda: Complex64, t: f64) -> Result<()> {
    if !(0.0..=R0 + 1e-12).contains(&t) {
        return Err(JacobiError::Regime {
            method: "bessel_expansion",
            reason: format!("t = {t} is outside [0, {R0}]"),
        });
    }
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(JacobiError::Domain(format!("λ = {lambda} is not finite")));
    }
    let n = (-lambda.im).round();
    if n >= 1.0 && (lambda + Complex64::new(0.0, n)).norm() < 1e-9 {
        return Err(JacobiError::Domain(format!("λ = {lambda} lies on -iℕ")));
    }
    Ok(())
}

/// Prefactor and the individual terms `a_m t^{2m} r_m E_{α+m}(λt)`, `m = 0..=total`.
fn expansion_terms(
    params: &ExpansionParams,
    am: &[Complex64],
    total: usize,
    lambda: Complex64,
    t: f64,
) -> Result<(Complex64, Vec<Complex64>)> {
    let a = params.alpha;
    let total = total.min(am.len() - 1);
    let e = bessel_e_seq(a, lambda * t, total)?;
    let ln_pre = -(a + 0.5) * (t.sinh() / t).ln() - (params.beta + 0.5) * ln_cosh(t);
    let t2 = t * t;
    let mut ratio = Complex64::new(1.0, 0.0);
    let mut pw = 1.0;
    let mut terms = Vec::with_capacity(total + 1);
    for m in 0..=total {
        if m > 0 {
            ratio *= (a + (m as f64 - 0.5)) / (a + m as f64);
            pw *= t2;
        }
        terms.push(am[m] * pw * ratio * e[m]);
    }
    Ok((ln_pre.exp(), terms))
}

fn eval_with_coeffs(
    params: &ExpansionParams,
    am: &[Complex64],
    order: usize,
    lambda: Complex64,
    t: f64,
) -> Result<(Complex64, f64)> {
    check_expansion_input(lambda, t)?;
    if t == 0.0 {
        return Ok((Complex64::new(1.0, 0.0), 0.0));
    }
    let (pre, terms) = expansion_terms(params, am, order + EXTRA_TERMS, lambda, t)?;
    let order = order.min(terms.len() - 1);
    let sum: Complex64 = terms[..=order].iter().sum();
    let abs_sum: f64 = terms[..=order].iter().map(|x| x.norm()).sum();
    let tail: f64 = terms[order + 1..].iter().map(|x| x.norm()).sum();
    let v = pre * sum;
    let err = pre.norm() * (1.5 * tail + 4e-16 * abs_sum * (order as f64 + 1.0));
    Ok((v, err))
}

/// Remainder `E_{M+1}` of the order-`M` expansion, summed directly from the
/// omitted terms `M+1..=M+AUTO_ORDER` so that it stays accurate below rounding level of `φ`.
pub fn expansion_remainder(params: &ExpansionParams, lambda: Complex64, t: f64, order: usize) -> Result<Complex64> {
    check_expansion_input(lambda, t)?;
    if t == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let total = order + AUTO_ORDER;
    let am = expansion_coeffs_am(params, t, total)?;
    let (pre, terms) = expansion_terms(params, &am, total, lambda, t)?;
    Ok(pre * terms[order + 1..].iter().sum::<Complex64>())
}

/// Order-`M` Bessel-type expansion at `t <= R0` with an error estimate.
pub fn phi_bessel_expansion(
    params: &ExpansionParams,
    lambda: Complex64,
    t: f64,
    order: usize,
) -> Result<(Complex64, f64)> {
    check_expansion_input(lambda, t)?;
    let am = expansion_coeffs_am(params, t, order + EXTRA_TERMS)?;
    eval_with_coeffs(params, &am, order, lambda, t)
}

/// Bessel-type expansion with the order fixed at [`AUTO_ORDER`].
pub fn phi_bessel_auto(params: &JacobiParams, lambda: Complex64, t: f64) -> Result<(Complex64, f64)> {
    let ep = ExpansionParams::try_from(params)?;
    phi_bessel_expansion(&ep, lambda, t, AUTO_ORDER)
}

pub(crate) fn phi_bessel_cached(
    params: &ExpansionParams,
    am: &[Complex64],
    lambda: Complex64,
    t: f64,
) -> Result<(Complex64, f64)> {
    eval_with_coeffs(params, am, am.len() - 1 - EXTRA_TERMS, lambda, t)
}

/// Least-squares fit `|Γ_k| <= K'(1+k)^d` on the running maximum of `|Γ_k|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GangolliFit {
    /// Constant making the envelope an exact bound on the fitted range.
    pub k_prime: f64,
    /// Least-squares constant `exp(intercept)` of the log-log fit.
    pub k_fit: f64,
    pub degree: f64,
    /// Coefficient of determination of the log-log fit.
    pub r_squared: f64,
}

impl GangolliFit {
    pub fn envelope(&self, k: usize) -> f64 {
        self.k_prime * (1.0 + k as f64).powf(self.degree)
    }

    /// Bound on `Σ_{k>K} |Γ_k| e^{-2kt}`.
    pub fn tail_bound(&self, k: usize, t: f64) -> f64 {
        let q = (-2.0 * t).exp();
        self.envelope(k + 1) * q.powi(k as i32 + 1) / (1.0 - q)
    }
}

pub fn gangolli_fit(gammas: &[Complex64]) -> GangolliFit {
    let mut run = 0.0f64;
    let mut xs = Vec::with_capacity(gammas.len());
    let mut ys = Vec::with_capacity(gammas.len());
    for (k, g) in gammas.iter().enumerate() {
        run = run.max(g.norm());
        if k >= 1 && run > 0.0 {
            xs.push((1.0 + k as f64).ln());
            ys.push(run.ln());
        }
    }
    if xs.len() < 2 {
        let k = run.max(1.0);
        return GangolliFit { k_prime: k, k_fit: k, degree: 0.0, r_squared: 1.0 };
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let degree = (sxy / sxx).max(0.0);
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    let k_prime = gammas
        .iter()
        .enumerate()
        .map(|(k, g)| g.norm() / (1.0 + k as f64).powf(degree))
        .fold(0.0, f64::max);
    let k_fit = (my - degree * mx).exp();
    GangolliFit { k_prime, k_fit, degree, r_squared }
}

/// Harish-Chandra coefficients `Γ_0..Γ_K` for one `λ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HCSeries {
    pub params: JacobiParams,
    pub lambda: Complex64,
    pub k: usize,
    pub gammas: Vec<Complex64>,
    pub fit: GangolliFit,
}

impl HCSeries {
    /// `Φ_λ(t) = Σ_{k<=K} Γ_k e^{-2kt}` and the Gangolli tail bound.
    pub fn sum(&self, t: f64) -> (Complex64, f64) {
        let q = (-2.0 * t).exp();
        let mut acc = Complex64::new(0.0, 0.0);
        for g in self.gammas.iter().rev() {
            acc = acc * q + g;
        }
        (acc, self.fit.tail_bound(self.k, t))
    }
}

fn resonance_check(lambda: Complex64, k: usize) -> Result<()> {
    if (Complex64::new(k as f64 + 1.0, 0.0) - Complex64::i() * lambda).norm() < 1e-6 {
        return Err(JacobiError::Resonance { k });
    }
    Ok(())
}

/// `Γ_k` from the closed-coefficient recursion
/// `Γ_{k+1} = a_k Γ_k + Σ_{j<k} b_j^k Γ_j`, with
/// `a_k = [k(k-iλ) + (α-β)(ρ+2k-iλ)] / ((k+1)(k+1-iλ))` and
/// `b_j^k = (-1)^{k+j+1} (2β+1)(ρ+2j-iλ) / ((k+1)(k+1-iλ))`,
/// using a running alternating sum so the cost is linear in `K`.
pub fn hc_gamma_coeffs(params: &JacobiParams, lambda: Complex64, k_max: usize) -> Result<HCSeries> {
    let il = Complex64::i() * lambda;
    let (a, b, rho) = (params.alpha(), params.beta(), params.rho());
    let mut gammas = Vec::with_capacity(k_max + 1);
    gammas.push(Complex64::new(1.0, 0.0));
    let mut alt = Complex64::new(0.0, 0.0);
    for k in 0..k_max {
        resonance_check(lambda, k)?;
        let kf = k as f64;
        let den = (kf + 1.0) * (kf + 1.0 - il);
        let gk = gammas[k];
        let ak = (kf * (kf - il) + (a - b) * (rho + 2.0 * kf - il)) / den;
        let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
        let next = ak * gk + (2.0 * b + 1.0) / den * sign * alt;
        let gsign = if k % 2 == 0 { 1.0 } else { -1.0 };
        alt += gsign * (rho + 2.0 * kf - il) * gk;
        gammas.push(next);
    }
    let fit = gangolli_fit(&gammas);
    Ok(HCSeries { params: *params, lambda, k: k_max, gammas, fit })
}

/// `Γ_k` from the sum-form recursion
/// `(k+1)(k+1-iλ) Γ_{k+1} = (α-β) Σ_{j<=k} (ρ+2j-iλ) Γ_j
///   + (2β+1) Σ_{1<=j<=(k+1)/2} (ρ+2(k+1-2j)-iλ) Γ_{k+1-2j}`.
pub fn hc_gamma_coeffs_sum_form(
    params: &JacobiParams,
    lambda: Complex64,
    k_max: usize,
) -> Result<Vec<Complex64>> {
    let il = Complex64::i() * lambda;
    let (a, b, rho) = (params.alpha(), params.beta(), params.rho());
    let mut g = vec![Complex64::new(1.0, 0.0)];
    for k in 0..k_max {
        resonance_check(lambda, k)?;
        let mut s = Complex64::new(0.0, 0.0);
        for (j, gj) in g.iter().enumerate().take(k + 1) {
            s += (rho + 2.0 * j as f64 - il) * gj * (a - b);
        }
        for j in 1..=k.div_ceil(2) {
            let idx = k + 1 - 2 * j;
            s += (rho + 2.0 * idx as f64 - il) * g[idx] * (2.0 * b + 1.0);
        }
        let kf = k as f64;
        g.push(s / ((kf + 1.0) * (kf + 1.0 - il)));
    }
    Ok(g)
}

/// Relative target for the Harish-Chandra truncation.
const HC_TOL: f64 = 1e-17;

/// Truncated Harish-Chandra series `Φ_λ(t)` with depth chosen from the
/// Gangolli fit unless `k` is given.
pub fn phi2_hc_series(
    params: &JacobiParams,
    lambda: Complex64,
    t: f64,
    k: Option<usize>,
) -> Result<HCSeries> {
    if t < HC_MIN_T {
        return Err(JacobiError::Regime {
            method: "harish_chandra",
            reason: format!("t = {t} is below {HC_MIN_T}"),
        });
    }
    if let Some(k) = k {
        return hc_gamma_coeffs(params, lambda, k);
    }
    let cap = ((45.0 / t).ceil() as usize).max(60);
    let full = hc_gamma_coeffs(params, lambda, cap)?;
    let scale = full.sum(t).0.norm().max(f64::MIN_POSITIVE);
    let depth = (1..=cap).find(|&kk| full.fit.tail_bound(kk, t) < HC_TOL * scale);
    match depth {
        Some(kk) => {
            let mut s = full;
            s.gammas.truncate(kk + 1);
            s.k = kk;
            Ok(s)
        }
        None => Err(JacobiError::InsufficientTerms(format!(
            "Harish-Chandra tail at t = {t} not below tolerance with {cap} terms"
        ))),
    }
}

/// `Φ_λ(t)` with its truncation bound.
pub fn phi2_hc(
    params: &JacobiParams,
    lambda: Complex64,
    t: f64,
    k: Option<usize>,
) -> Result<(Complex64, f64)> {
    Ok(phi2_hc_series(params, lambda, t, k)?.sum(t))
}

/// Per-`λ` data for the recombination formula, reusable across many `t`.
#[derive(Debug, Clone)]
pub struct HcRecombination {
    ln_c_plus: Complex64,
    ln_c_minus: Complex64,
    plus: HCSeries,
    minus: HCSeries,
    lambda: Complex64,
    rho: f64,
}

impl HcRecombination {
    /// Builds the data valid for every `t >= t_min`.
    pub fn new(params: &JacobiParams, lambda: Complex64, t_min: f64) -> Result<Self> {
        let ln_c_plus = ln_c_function(params, lambda)?;
        let ln_c_minus = ln_c_function(params, -lambda)?;
        let plus = phi2_hc_series(params, lambda, t_min, None)?;
        let minus = phi2_hc_series(params, -lambda, t_min, None)?;
        Ok(HcRecombination { ln_c_plus, ln_c_minus, plus, minus, lambda, rho: params.rho() })
    }

    pub fn eval(&self, t: f64) -> (Complex64, f64) {
        let il = Complex64::i() * self.lambda;
        let (fp, ep) = self.plus.sum(t);
        let (fm, em) = self.minus.sum(t);
        let wp = if self.ln_c_plus.re == f64::NEG_INFINITY {
            Complex64::new(0.0, 0.0)
        } else {
            (self.ln_c_plus + (il - self.rho) * t).exp()
        };
        let wm = if self.ln_c_minus.re == f64::NEG_INFINITY {
            Complex64::new(0.0, 0.0)
        } else {
            (self.ln_c_minus + (-il - self.rho) * t).exp()
        };
        let v1 = wp * fp;
        let v2 = wm * fm;
        let rel = 2.2e-16 * (20.0 + self.lambda.norm() * (1.0 + t) + self.ln_c_plus.norm());
        let err = wp.norm() * ep + wm.norm() * em + rel * (v1.norm() + v2.norm());
        (v1 + v2, err)
    }
}

/// Recombination `φ_λ(t) = c(λ)e^{(iλ-ρ)t}Φ_λ(t) + c(-λ)e^{(-iλ-ρ)t}Φ_{-λ}(t)` for `t >= 1`.
pub fn phi_large_t(
    params: &JacobiParams,
    lambda: Complex64,
    t: f64,
    k: Option<usize>,
) -> Result<(Complex64, f64)> {
    if t < 1.0 {
        return Err(JacobiError::Regime {
            method: "phi_large_t",
            reason: format!("t = {t} is below 1"),
        });
    }
    if let Some(k) = k {
        let ln_cp = ln_c_function(params, lambda)?;
        let ln_cm = ln_c_function(params, -lambda)?;
        let plus = hc_gamma_coeffs(params, lambda, k)?;
        let minus = hc_gamma_coeffs(params, -lambda, k)?;
        let rec = HcRecombination {
            ln_c_plus: ln_cp,
            ln_c_minus: ln_cm,
            plus,
            minus,
            lambda,
            rho: params.rho(),
        };
        return Ok(rec.eval(t));
    }
    Ok(HcRecombination::new(params, lambda, t)?.eval(t))
}

/// Distance from `i·ℤ` below which the recombination is replaced by a Cauchy integral.
const LATTICE_GUARD: f64 = 0.25;
const CAUCHY_RADIUS: f64 = 0.5;

/// Center `i·n` of the Cauchy circle when `λ` is close to the pole lattice `i·ℤ`.
pub(crate) fn lattice_center(lambda: Complex64) -> Option<Complex64> {
    let n = lambda.im.round();
    let b = Complex64::new(0.0, n);
    ((lambda - b).norm() < LATTICE_GUARD).then_some(b)
}

pub(crate) fn cauchy_nodes(t: f64) -> usize {
    (2.0 * E * CAUCHY_RADIUS * t).ceil() as usize + 32
}

/// Per-`λ` Harish-Chandra data valid on `[t_min, t_max]`, switching to a Cauchy
/// integral over `|w - i·n| = 0.5` when `λ` is close to the pole lattice `i·ℤ`.
#[derive(Debug, Clone)]
pub enum HcEvaluator {
    Plain(HcRecombination),
    Circle { nodes: Vec<(Complex64, HcRecombination)> },
}

impl HcEvaluator {
    pub fn new(params: &JacobiParams, lambda: Complex64, t_min: f64, t_max: f64) -> Result<Self> {
        if t_min < HC_MIN_T {
            return Err(JacobiError::Regime {
                method: "harish_chandra",
                reason: format!("t = {t_min} is below {HC_MIN_T}"),
            });
        }
        let Some(b) = lattice_center(lambda) else {
            return Ok(HcEvaluator::Plain(HcRecombination::new(params, lambda, t_min)?));
        };
        let n = cauchy_nodes(t_max).max(64);
        let mut nodes = Vec::with_capacity(n);
        for j in 0..n {
            let th = 2.0 * PI * (j as f64 + 0.5) / n as f64;
            let w = b + CAUCHY_RADIUS * Complex64::from_polar(1.0, th);
            let k = (w - b) / (w - lambda) / n as f64;
            nodes.push((k, HcRecombination::new(params, w, t_min)?));
        }
        Ok(HcEvaluator::Circle { nodes })
    }

    pub fn eval(&self, t: f64) -> (Complex64, f64) {
        match self {
            HcEvaluator::Plain(r) => r.eval(t),
            HcEvaluator::Circle { nodes } => {
                let mut acc = Complex64::new(0.0, 0.0);
                let mut err = 0.0;
                for (k, r) in nodes {
                    let (v, e) = r.eval(t);
                    acc += k * v;
                    err += k.norm() * e;
                }
                (acc, err)
            }
        }
    }
}

/// Harish-Chandra evaluation for `t >= 0.5`, including `λ` near the lattice `i·ℤ`
/// where the two recombined terms have poles that cancel.
pub fn phi_hc(params: &JacobiParams, lambda: Complex64, t: f64) -> Result<(Complex64, f64)> {
    Ok(HcEvaluator::new(params, lambda, t, t)?.eval(t))
}

/// Envelope `(1+t)^{n+1} e^{(|Im λ| - ρ)t}` for the `n`-th `λ`-derivative of `φ_λ(t)`.
pub fn derivative_envelope(params: &JacobiParams, lambda: Complex64, t: f64, n: usize) -> f64 {
    (1.0 + t).powi(n as i32 + 1) * ((lambda.im.abs() - params.rho()) * t).exp()
}

/// Envelope `|λ|^{-2} e^{-ρt}` for the first derivative where `|λt| < 1`.
pub fn derivative_envelope_small(params: &JacobiParams, lambda: Complex64, t: f64) -> f64 {
    lambda.norm().powi(-2) * (-params.rho() * t).exp()
}

const DERIV_STEP: f64 = 1e-3;

/// Central finite-difference `n`-th derivative in `λ` of `φ_λ(t)`, `n <= 3`.
pub fn lambda_derivative(params: &JacobiParams, lambda: Complex64, t: f64, n: usize) -> Result<Complex64> {
    let f = |dl: f64| phi(params, lambda + dl, t, EvalMethod::Auto);
    let h = DERIV_STEP;
    Ok(match n {
        0 => f(0.0)?,
        1 => (f(h)? - f(-h)?) / (2.0 * h),
        2 => (f(h)? - 2.0 * f(0.0)? + f(-h)?) / (h * h),
        3 => (f(2.0 * h)? - 2.0 * f(h)? + 2.0 * f(-h)? - f(-2.0 * h)?) / (2.0 * h * h * h),
        _ => {
            return Err(JacobiError::Domain(format!(
                "λ-derivatives are available up to order 3, got {n}"
            )))
        }
    })
}

/// Smallest constant `K_n` with `|∂^n_λ φ| <= K_n · envelope` on the grid.
pub fn fit_derivative_constant(params: &JacobiParams, grid: &[(Complex64, f64)], n: usize) -> Result<f64> {
    let mut k: f64 = 0.0;
    for &(l, t) in grid {
        let d = lambda_derivative(params, l, t, n)?;
        k = k.max(d.norm() / derivative_envelope(params, l, t, n));
    }
    Ok(k)
}

/// True iff the finite-difference derivative respects `K_n (1+t)^{n+1} e^{(|Im λ|-ρ)t}`.
pub fn lambda_derivative_bound_check(
    params: &JacobiParams,
    lambda: Complex64,
    t: f64,
    n: usize,
    k_n: f64,
) -> bool {
    match lambda_derivative(params, lambda, t, n) {
        Ok(d) => d.norm() <= k_n * derivative_envelope(params, lambda, t, n),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::phi_direct;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn p(a: f64, b: f64) -> JacobiParams {
        JacobiParams::new(a, b).unwrap()
    }

    fn ep(a: f64, b: f64) -> ExpansionParams {
        ExpansionParams::try_from(&p(a, b)).unwrap()
    }

    #[test]
    fn radii_and_domain() {
        assert!(ExpansionRadii::new(R0, R1).is_ok());
        assert!(ExpansionRadii::new(1.2, 1.3).is_err());
        let d = SpectralDomain { epsilon: 0.1, gamma_cap: 1.0 };
        assert!(in_spectral_domain(&d, c(3.0, -0.2)));
        assert!(!in_spectral_domain(&d, c(3.0, -0.5)));
        assert!(!in_spectral_domain(&d, c(3.0, 2.0)));
    }

    #[test]
    fn dj_decay_and_summability() {
        let d = dj_coeffs(&ep(1.3, 0.2), 10_000).unwrap();
        assert_eq!(d[0], c(1.0, 0.0));
        let (x1, x2) = ((20f64).ln(), (200f64).ln());
        let slope = (d[200].norm().ln() - d[20].norm().ln()) / (x2 - x1);
        assert!((slope + 1.8).abs() < 0.1, "{slope}");
        let s1: f64 = d[..5000].iter().map(|x| x.norm()).sum();
        let s2: f64 = d.iter().map(|x| x.norm()).sum();
        assert!((s2 - s1) < 1e-3 * s2);
    }

    #[test]
    fn cosh_ratio_reproduces_left_side() {
        let (t, s, z) = (1.0f64, 0.4f64, c(0.8, 0.0));
        let a = cosh_ratio_coeffs(t, z, 30).unwrap();
        assert_eq!(a[0], c(1.0, 0.0));
        let w = t * t - s * s;
        let series: Complex64 = a.iter().enumerate().map(|(k, ak)| ak * w.powi(k as i32)).sum();
        let lhs = ((2.0 * t.cosh() - 2.0 * s.cosh()) / w).powf(0.8) / (t.sinh() / t).powf(0.8);
        assert!((series.re - lhs).abs() < 1e-10);
        assert!(cosh_ratio_coeffs(3.2, z, 5).is_err());
    }

    #[test]
    fn cosh_ratio_coefficient_bound() {
        let (t, z) = (1.1f64, c(1.8, 0.0));
        let a = cosh_ratio_coeffs(t, z, 30).unwrap();
        let lead = (t.sinh() / t).powf(z.re);
        for (k, ak) in a.iter().enumerate() {
            let bound = (4.0 * t.cosh() / R1).powf(z.re) * R1.powi(-(k as i32));
            assert!(lead * ak.norm() <= bound, "k = {k}");
        }
    }

    #[test]
    fn am_limits_and_decay() {
        let q = ep(1.3, 0.2);
        let a = expansion_coeffs_am(&q, 1e-6, 12).unwrap();
        let b = expansion_coeffs_am(&q, 1e-5, 12).unwrap();
        assert_eq!(a[0], c(1.0, 0.0));
        for m in 0..=12 {
            assert!((a[m] - b[m]).norm() < 1e-8 * a[m].norm().max(1e-12));
        }
        let a1 = expansion_coeffs_am(&q, 1.0, 12).unwrap();
        let scaled: Vec<f64> = a1.iter().enumerate().map(|(m, x)| x.norm() * R1.powi(m as i32)).collect();
        assert!(scaled.iter().all(|v| *v < 2.0));
        assert!(expansion_coeffs_am(&q, 1.3, 4).is_err());
    }

    #[test]
    fn expansion_matches_direct_within_bound() {
        let q = p(1.3, 0.2);
        let (v, bound) = phi_bessel_expansion(&ep(1.3, 0.2), c(8.0, 0.0), 0.5, 4).unwrap();
        let (d, _) = phi_direct(&q, c(8.0, 0.0), 0.5).unwrap();
        assert!((v - d).norm() <= bound, "{} vs {bound}", (v - d).norm());
        let (v, _) = phi_bessel_expansion(&ep(1.3, 0.2), c(3.0, 0.5), 0.0, 2).unwrap();
        assert_eq!(v, c(1.0, 0.0));
        assert!(phi_bessel_expansion(&ep(1.3, 0.2), c(1.0, 0.0), 1.2, 2).is_err());
    }

    #[test]
    fn expansion_auto_order_is_accurate() {
        let q = p(2.5, 0.5);
        for &(l, t) in &[(5.0, 1.1), (0.5, 0.9), (40.0, 0.3), (12.0, 1.0)] {
            let (v, _) = phi_bessel_auto(&q, c(l, 0.0), t).unwrap();
            let (d, _) = phi_direct(&q, c(l, 0.0), t).unwrap();
            assert!((v - d).norm() < 1e-12, "{l} {t}: {}", (v - d).norm());
        }
    }

    #[test]
    fn complex_parameters_accepted() {
        let q = ExpansionParams::new(c(1.3, 0.4), c(0.2, -0.1)).unwrap();
        let a = expansion_coeffs_am(&q, 0.7, 6).unwrap();
        assert_eq!(a[0], c(1.0, 0.0));
        assert!(ExpansionParams::new(c(0.4, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn hc_first_coefficients() {
        let q = p(1.3, 0.2);
        let l = c(2.0, 0.0);
        let s = hc_gamma_coeffs(&q, l, 3).unwrap();
        assert_eq!(s.gammas[0], c(1.0, 0.0));
        let il = Complex64::i() * l;
        let g1 = (q.alpha() - q.beta()) * (q.rho() - il) / (1.0 - il);
        assert!((s.gammas[1] - g1).norm() < 1e-15);
    }

    #[test]
    fn hc_recursions_agree() {
        let q = p(1.3, 0.2);
        for l in [c(2.0, 0.0), c(0.7, 0.4), c(13.0, -0.5)] {
            let a = hc_gamma_coeffs(&q, l, 100).unwrap().gammas;
            let b = hc_gamma_coeffs_sum_form(&q, l, 100).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).norm() <= 1e-12 * y.norm().max(1.0));
            }
        }
    }

    #[test]
    fn hc_resonance_refused() {
        let q = p(1.3, 0.2);
        assert!(matches!(
            hc_gamma_coeffs(&q, c(0.0, -3.0), 10),
            Err(JacobiError::Resonance { k: 2 })
        ));
    }

    #[test]
    fn hc_growth_is_subexponential() {
        let s = hc_gamma_coeffs(&p(1.3, 0.2), c(2.0, 0.0), 200).unwrap();
        let root = s.gammas[200].norm().powf(1.0 / 200.0);
        assert!((root - 1.0).abs() < 0.05, "{root}");
        assert!(s.fit.r_squared > 0.9);
    }

    #[test]
    fn hc_self_convergence_and_limit() {
        let q = p(1.3, 0.2);
        let (a, _) = phi2_hc(&q, c(2.0, 0.0), 1.0, Some(100)).unwrap();
        let (b, _) = phi2_hc(&q, c(2.0, 0.0), 1.0, Some(200)).unwrap();
        assert!((a - b).norm() < 1e-12);
        let (v, _) = phi2_hc(&q, c(2.0, 0.0), 50.0, None).unwrap();
        assert!((v - 1.0).norm() < 1e-15);
        assert!(phi2_hc(&q, c(2.0, 0.0), 0.3, None).is_err());
    }

    #[test]
    fn large_t_closed_form() {
        let q = p(0.5, -0.5);
        let (v, _) = phi_large_t(&q, c(2.0, 0.0), 3.0, None).unwrap();
        let exact = 6f64.sin() / (2.0 * 3f64.sinh());
        assert!((v.re - exact).abs() < 1e-9);
        assert!(phi_large_t(&q, c(0.0, 0.0), 3.0, None).is_err());
    }

    #[test]
    fn large_t_matches_direct() {
        let q = p(1.3, 0.2);
        for &(l, t) in &[(0.5, 1.0), (3.0, 2.5), (20.0, 4.0), (7.0, 1.5)] {
            let (v, _) = phi_large_t(&q, c(l, 0.0), t, None).unwrap();
            let (d, _) = phi_direct(&q, c(l, 0.0), t).unwrap();
            assert!((v - d).norm() < 1e-10, "{l} {t}");
        }
    }

    #[test]
    fn large_t_relative_accuracy_for_large_alpha() {
        let q = p(2.5, 0.5);
        let (v, _) = phi_hc(&q, c(0.5, 0.5), 2.0).unwrap();
        let want = c(0.027819316954728483, -0.004453267841219453);
        assert!((v - want).norm() < 1e-13 * want.norm(), "{v}");
    }

    #[test]
    fn remainder_matches_difference_and_oracle_order() {
        let e = ep(1.3, 0.2);
        let q = p(1.3, 0.2);
        for m in 1..=3 {
            let (partial, _) = phi_bessel_expansion(&e, c(3.0, 0.0), 0.8, m).unwrap();
            let (full, _) = phi_direct(&q, c(3.0, 0.0), 0.8).unwrap();
            let r = expansion_remainder(&e, c(3.0, 0.0), 0.8, m).unwrap();
            assert!((r - (full - partial)).norm() < 1e-14, "M = {m}");
        }
        let ts: Vec<f64> = (0..12).map(|j| 0.01 * 20f64.powf(j as f64 / 11.0)).collect();
        let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
        for (m, want) in [(1, 3.974712845614020), (2, 6.021971271979772), (3, 8.047374812770514)] {
            let ys: Vec<f64> =
                ts.iter().map(|&t| expansion_remainder(&e, c(0.5, 0.0), t, m).unwrap().norm().ln()).collect();
            let n = xs.len() as f64;
            let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
            let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
            assert!((sxy / sxx - want).abs() < 1e-6, "M = {m}: {}", sxy / sxx);
        }
        assert_eq!(expansion_remainder(&e, c(2.0, 0.0), 0.0, 2).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn hc_near_lattice_uses_contour() {
        let q = p(1.0, 0.0);
        for l in [c(0.0, 0.0), c(0.1, 0.0), c(0.0, 1.05), c(0.2, -2.0)] {
            let (v, _) = phi_hc(&q, l, 1.5).unwrap();
            let (d, _) = phi_direct(&q, l, 1.5).unwrap();
            assert!((v - d).norm() < 1e-10, "{l}: {v} vs {d}");
        }
    }

    #[test]
    fn derivative_envelopes() {
        let q = p(1.3, 0.2);
        let d = lambda_derivative(&q, c(2.0, 0.0), 0.0, 1).unwrap();
        assert!(d.norm() < 1e-12);
        let d0 = lambda_derivative(&q, c(2.0, 0.3), 1.5, 0).unwrap();
        assert_eq!(d0, phi(&q, c(2.0, 0.3), 1.5, EvalMethod::Auto).unwrap());
        let grid: Vec<(Complex64, f64)> = (1..=10)
            .flat_map(|i| (1..=10).map(move |j| (c(0.5 * i as f64, 0.0), 0.4 * j as f64)))
            .collect();
        let k1 = fit_derivative_constant(&q, &grid, 1).unwrap();
        assert!(k1.is_finite() && k1 > 0.0);
        assert!(grid.iter().all(|&(l, t)| lambda_derivative_bound_check(&q, l, t, 1, k1 * 1.0001)));
    }

    proptest! {
        #[test]
        fn phi2_bounded_on_wedge(lr in -20.0f64..20.0, frac in 0.0f64..1.0, t in 1.0f64..6.0) {
            let l = c(lr, frac * 1.0);
            let (v, _) = phi2_hc(&p(1.3, 0.2), l, t, None).unwrap();
            prop_assert!(v.norm() < 10.0);
        }

        #[test]
        fn large_t_even(lr in 0.5f64..20.0, t in 1.0f64..8.0, tl in 6.0f64..12.0) {
            let q = p(2.5, 0.5);
            let (a, _) = phi_large_t(&q, c(lr, 0.0), t, None).unwrap();
            let (b, _) = phi_large_t(&q, c(-lr, 0.0), t, None).unwrap();
            prop_assert!((a - b).norm() < 1e-13 * a.norm().max(1e-3));
            let cl = crate::jacobi::c_function(&q, c(lr, 0.0)).unwrap().norm();
            let (far, _) = phi_large_t(&q, c(lr, 0.0), tl, None).unwrap();
            prop_assert!((far * (q.rho() * tl).exp()).norm() < 2.0 * cl * (1.0 + 1e-4));
        }
    }
}

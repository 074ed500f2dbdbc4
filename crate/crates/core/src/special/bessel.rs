use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gamma::{gamma, rgamma, EULER_GAMMA};
use super::is_nonpositive_integer;
use crate::dd::CDd;
use crate::error::{JacobiError, Result};

/// Bessel order, possibly complex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexOrder {
    pub mu: Complex64,
}

impl From<f64> for ComplexOrder {
    fn from(mu: f64) -> Self {
        ComplexOrder { mu: Complex64::new(mu, 0.0) }
    }
}

impl From<Complex64> for ComplexOrder {
    fn from(mu: Complex64) -> Self {
        ComplexOrder { mu }
    }
}

const SMALL_ARG: f64 = 1.5;
const MILLER_MAX_IM: f64 = 10.0;
const DD_SERIES_MAX: f64 = 40.0;

fn check_order(mu: Complex64) -> Result<()> {
    if is_nonpositive_integer(mu + 1.0) {
        return Err(JacobiError::Domain(format!("Bessel order {mu} is a negative integer")));
    }
    if !(mu.re.is_finite() && mu.im.is_finite()) {
        return Err(JacobiError::Domain(format!("Bessel order {mu} is not finite")));
    }
    Ok(())
}

fn e_series_f64(mu: Complex64, z: Complex64) -> Complex64 {
    let q = -z * z * 0.25;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..200 {
        term *= q / ((mu + k as f64) * k as f64);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

fn e_series_dd(mu: Complex64, z: Complex64) -> Complex64 {
    let zd = CDd::from_c64(z);
    let q = -(zd * zd).mul_f64(0.25);
    let m = CDd::from_c64(mu);
    let mut term = CDd::ONE;
    let mut sum = CDd::ONE;
    for k in 1..2000 {
        let kf = k as f64;
        term = term * q / m.add_f64(kf).mul_f64(kf);
        sum = sum + term;
        if term.norm() <= 1e-32 * sum.norm() && kf * kf > z.norm_sqr() {
            break;
        }
    }
    sum.to_c64()
}

/// Miller backward recurrence for `E_{mu+j}(z)`, `j = 0..=m`.
fn e_miller(mu: Complex64, z: Complex64, m: usize) -> Vec<Complex64> {
    let az = z.norm();
    let n = (m + 20).max((az + 20.0 + 10.0 * az.cbrt()).ceil() as usize) + 2;
    let mut f = vec![Complex64::new(0.0, 0.0); n + 2];
    f[n] = Complex64::new(1e-20, 0.0);
    let two_over_z = 2.0 / z;
    for k in (1..=n).rev() {
        f[k - 1] = two_over_z * (mu + k as f64) * f[k] - f[k + 1];
        if f[k - 1].norm() > 1e100 {
            for v in f[k - 1..].iter_mut() {
                *v *= 1e-100;
            }
        }
    }
    let mut s = f[0];
    let mut ck = Complex64::new(1.0, 0.0);
    let mut k = 1;
    while 2 * k <= n {
        s += (mu + 2.0 * k as f64) * ck * f[2 * k];
        ck *= (mu + k as f64) / (k as f64 + 1.0);
        k += 1;
    }
    let mut out = Vec::with_capacity(m + 1);
    let mut scale = Complex64::new(1.0, 0.0);
    let inv_half = 2.0 / z;
    for (j, fj) in f.iter().take(m + 1).enumerate() {
        if j > 0 {
            scale *= (mu + j as f64) * inv_half;
        }
        out.push(*fj / s * scale);
    }
    out
}

/// Normalized entire Bessel function `E_mu(z) = Γ(mu+1) (z/2)^{-mu} J_mu(z)`
/// for orders `mu, mu+1, ..., mu+m`.
pub fn bessel_e_seq(mu: Complex64, z: Complex64, m: usize) -> Result<Vec<Complex64>> {
    check_order(mu)?;
    let z = if z.re < 0.0 { -z } else { z };
    let az = z.norm();
    if az <= SMALL_ARG {
        return Ok((0..=m).map(|j| e_series_f64(mu + j as f64, z)).collect());
    }
    if z.im.abs() <= MILLER_MAX_IM {
        return Ok(e_miller(mu, z, m));
    }
    if az <= DD_SERIES_MAX {
        return Ok((0..=m).map(|j| e_series_dd(mu + j as f64, z)).collect());
    }
    Err(JacobiError::Regime {
        method: "bessel_e",
        reason: format!("argument {z} has |Im z| > {MILLER_MAX_IM} and |z| > {DD_SERIES_MAX}"),
    })
}

pub fn bessel_e(mu: Complex64, z: Complex64) -> Result<Complex64> {
    bessel_e_seq(mu, z, 0).map(|v| v[0])
}

/// `J_mu(z)` on the principal branch of `z^mu`, for `Re mu > -1`.
pub fn bessel_j_principal(mu: Complex64, z: Complex64) -> Result<Complex64> {
    if mu.re <= -1.0 {
        return Err(JacobiError::Domain(format!("bessel_j needs Re mu > -1, got {mu}")));
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(if mu == Complex64::new(0.0, 0.0) {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        });
    }
    let e = bessel_e(mu, z)?;
    Ok((z * 0.5).powc(mu) * rgamma(mu + 1.0) * e)
}

/// `J_mu(z)`; rejects the negative real axis for non-integer order.
pub fn bessel_j(mu: Complex64, z: Complex64) -> Result<Complex64> {
    let integer_order = mu.im == 0.0 && mu.re == mu.re.round();
    if z.im == 0.0 && z.re < 0.0 && !integer_order {
        return Err(JacobiError::Domain(format!(
            "z = {z} lies on the branch cut of z^mu for mu = {mu}"
        )));
    }
    bessel_j_principal(mu, z)
}

/// Modified Bessel function `𝒥_mu(z) = √π Γ(mu+1/2) / (2 Γ(mu+1)) · E_mu(z)`,
/// equal to `(1/2) B(1/2, mu+1/2)` at the origin.
pub fn bessel_calj(mu: Complex64, z: Complex64) -> Result<Complex64> {
    if mu.re <= -0.5 {
        return Err(JacobiError::Domain(format!("bessel_calj needs Re mu > -1/2, got {mu}")));
    }
    let pref = PI.sqrt() * gamma(mu + 0.5)? * rgamma(mu + 1.0) * 0.5;
    Ok(pref * bessel_e(mu, z)?)
}

fn bessel_i_series(nu: Complex64, z: Complex64) -> Complex64 {
    let q = z * z * 0.25;
    let mut pw = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut fact = 1.0;
    for k in 0..80 {
        if k > 0 {
            pw *= q;
            fact *= k as f64;
        }
        let term = pw * rgamma(nu + (k + 1) as f64) / fact;
        sum += term;
        if k > 3 && term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    (z * 0.5).powc(nu) * sum
}

fn k_series(nu: Complex64, z: Complex64) -> Complex64 {
    FRAC_PI_2 / (nu * PI).sin() * (bessel_i_series(-nu, z) - bessel_i_series(nu, z))
}

fn k0_series(z: Complex64) -> Complex64 {
    let q = z * z * 0.25;
    let mut pw = Complex64::new(1.0, 0.0);
    let mut fact2 = 1.0;
    let mut harmonic = 0.0;
    let mut i0 = Complex64::new(1.0, 0.0);
    let mut tail = Complex64::new(0.0, 0.0);
    for k in 1..80 {
        let kf = k as f64;
        pw *= q;
        fact2 *= kf * kf;
        harmonic += 1.0 / kf;
        let t = pw / fact2;
        i0 += t;
        tail += t * harmonic;
        if t.norm() <= 1e-18 * i0.norm() {
            break;
        }
    }
    -((z * 0.5).ln() + EULER_GAMMA) * i0 + tail
}

fn k_integral(nu: Complex64, z: Complex64) -> Complex64 {
    let slack = ((FRAC_PI_2 - z.arg().abs()) / FRAC_PI_2).clamp(0.1, 1.0);
    let h = 0.15 * slack;
    let mut sum = 0.5 * (-z).exp();
    for k in 1..100_000 {
        let u = k as f64 * h;
        let term = (-z * u.cosh()).exp() * (nu * u).cosh();
        sum += term;
        if z.re * u.sinh() > nu.re.abs() + 1.0 && term.norm() <= 1e-18 * sum.norm() {
            break;
        }
    }
    sum * h
}

/// Modified Bessel function of the third kind `K_mu(z)` for `Re z > 0`.
pub fn bessel_k_third(mu: Complex64, z: Complex64) -> Result<Complex64> {
    if !(z.re > 0.0) {
        return Err(JacobiError::Domain(format!("bessel_k_third needs Re z > 0, got {z}")));
    }
    if z.norm() > 2.0 {
        return Ok(k_integral(mu, z));
    }
    const DELTA: f64 = 1e-5;
    let n = mu.re.round();
    if mu.im.abs() < DELTA && (mu.re - n).abs() < DELTA {
        if n == 0.0 {
            return Ok(k0_series(z));
        }
        let lo = k_series(Complex64::new(n - DELTA, 0.0), z);
        let hi = k_series(Complex64::new(n + DELTA, 0.0), z);
        let s = (mu - (n - DELTA)) / (2.0 * DELTA);
        return Ok(lo + (hi - lo) * s);
    }
    Ok(k_series(mu, z))
}

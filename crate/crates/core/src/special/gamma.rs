use std::f64::consts::PI;

use num_complex::Complex64;

use super::is_nonpositive_integer;
use crate::error::{JacobiError, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// Lanczos approximation with g = 671/128 and 14 terms (Numerical Recipes, 3rd ed.),
// relative accuracy near 1e-15 on the right half-plane.
const LANCZOS_G: f64 = 5.242_187_5;
const LANCZOS_C0: f64 = 0.999_999_999_999_997_1;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_8e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

fn ln_gamma_right(z: Complex64) -> Complex64 {
    let tmp = z + LANCZOS_G;
    let head = (z + 0.5) * tmp.ln() - tmp;
    let mut ser = Complex64::new(LANCZOS_C0, 0.0);
    for (j, c) in LANCZOS.iter().enumerate() {
        ser += *c / (z + (j + 1) as f64);
    }
    head + (ser * SQRT_2PI / z).ln()
}

/// `ln sin(πz)` without overflow for large `|Im z|` (branch not normalized).
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im.abs() < 5.0 {
        return (z * PI).sin().ln();
    }
    let w = if z.im > 0.0 { z } else { z.conj() };
    let i = Complex64::i();
    let e = (i * 2.0 * PI * w).exp();
    let v = Complex64::new(0.0, 0.5).ln() - i * PI * w + (Complex64::new(1.0, 0.0) - e).ln();
    if z.im > 0.0 {
        v
    } else {
        v.conj()
    }
}

/// Principal-sheet-agnostic logarithm of Γ(z): only `exp` of the result is meaningful
/// when the imaginary part is large.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(JacobiError::Pole { what: "gamma", at: format!("{z}") });
    }
    if z.re >= 0.5 {
        Ok(ln_gamma_right(z))
    } else {
        Ok(Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma_right(1.0 - z))
    }
}

pub fn gamma(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(JacobiError::Pole { what: "gamma", at: format!("{z}") });
    }
    if z.re >= 0.5 {
        Ok(ln_gamma_right(z).exp())
    } else {
        Ok(PI / ((z * PI).sin() * ln_gamma_right(1.0 - z).exp()))
    }
}

/// Reciprocal Gamma, entire, zero at the nonpositive integers.
pub fn rgamma(z: Complex64) -> Complex64 {
    if is_nonpositive_integer(z) {
        return Complex64::new(0.0, 0.0);
    }
    if z.re >= 0.5 {
        (-ln_gamma_right(z)).exp()
    } else {
        (z * PI).sin() * ln_gamma_right(1.0 - z).exp() / PI
    }
}

pub fn ln_gamma_real(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    ln_gamma_right(Complex64::new(x, 0.0)).re
}

pub fn gamma_real(x: f64) -> Result<f64> {
    gamma(Complex64::new(x, 0.0)).map(|g| g.re)
}

/// Rising factorial `(a)_k`.
pub fn pochhammer(a: Complex64, k: usize) -> Complex64 {
    (0..k).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (a + j as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn elementary_values() {
        assert!((gamma(c(1.0, 0.0)).unwrap().re - 1.0).abs() < 1e-14);
        assert!((gamma(c(0.5, 0.0)).unwrap().re - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(c(4.0, 0.0)).unwrap().re - 6.0).abs() < 1e-13);
    }

    #[test]
    fn reference_values() {
        let cases = [
            (c(1.0, 2.0), c(0.151_904_002_670_036_14, 0.019_804_880_161_854_982)),
            (c(-2.5, 0.3), c(-0.613_822_997_437_741_5, -0.211_232_614_937_041_78)),
            (c(30.2, -10.0), c(-2.983_214_218_379_316e30, -1.488_372_610_790_001_4e30)),
        ];
        for (z, want) in cases {
            assert!(rel(gamma(z).unwrap(), want) < 1e-12, "{z}");
        }
        let lg = ln_gamma(c(0.7, 120.0)).unwrap();
        assert!((lg.re + 186.619_122_819_743_13).abs() < 1e-11);
    }

    #[test]
    fn poles_are_errors() {
        assert!(gamma(c(0.0, 0.0)).is_err());
        assert!(gamma(c(-3.0, 0.0)).is_err());
        assert_eq!(rgamma(c(-2.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn pochhammer_products() {
        assert_eq!(pochhammer(c(0.3, 0.1), 0), c(1.0, 0.0));
        assert_eq!(pochhammer(c(2.0, 0.0), 3), c(24.0, 0.0));
        assert_eq!(pochhammer(c(-1.0, 0.0), 3), c(0.0, 0.0));
    }

    proptest! {
        #[test]
        fn reflection_formula(re in -6.0f64..6.0, im in -4.0f64..4.0) {
            let z = c(re, im);
            prop_assume!((re - re.round()).abs() > 0.05 || im.abs() > 0.05);
            let v = gamma(z).unwrap() * gamma(1.0 - z).unwrap() * (z * PI).sin() / PI;
            prop_assert!((v - 1.0).norm() < 1e-10);
        }

        #[test]
        fn rgamma_is_reciprocal(re in -5.0f64..8.0, im in -3.0f64..3.0) {
            let z = c(re, im);
            prop_assume!((re - re.round()).abs() > 0.05 || im.abs() > 0.05);
            prop_assert!((rgamma(z) * gamma(z).unwrap() - 1.0).norm() < 1e-12);
        }
    }
}

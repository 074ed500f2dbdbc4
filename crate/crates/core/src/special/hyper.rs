use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::is_nonpositive_integer;
use crate::dd::CDd;
use crate::error::{JacobiError, Result};

/// Stopping rule for the hypergeometric-type series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesAccuracy {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesAccuracy {
    fn default() -> Self {
        SeriesAccuracy { rel_tol: 1e-13, max_terms: 10_000 }
    }
}

/// Largest transformed argument accepted before the series is declared too slow.
pub const MAX_SERIES_ARG: f64 = 0.999;

/// Sums `2F1(a, b; c; z)` term by term in double-double arithmetic.
///
/// Returns the value and an absolute error estimate made of the rounding
/// floor of the largest partial terms plus a geometric tail bound.
pub(crate) fn series_dd(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    z: CDd,
    acc: SeriesAccuracy,
) -> Result<(Complex64, f64)> {
    let za = z.norm();
    let ca = CDd::from_c64(a);
    let cb = CDd::from_c64(b);
    let cc = CDd::from_c64(c);
    let mut term = CDd::ONE;
    let mut sum = CDd::ONE;
    let mut abs_sum = 1.0f64;
    for k in 0..acc.max_terms {
        let kf = k as f64;
        let num = ca.add_f64(kf) * cb.add_f64(kf);
        if num.norm() == 0.0 {
            return Ok((sum.to_c64(), abs_sum * 1e-30 + sum.norm() * 2.2e-16));
        }
        let den = cc.add_f64(kf).mul_f64(kf + 1.0);
        let ratio = num / den * z;
        term = term * ratio;
        sum = sum + term;
        let t = term.norm();
        abs_sum += t;
        let q = ratio.norm().max(za);
        if q < 1.0 && k > 2 {
            let tail = t * q / (1.0 - q);
            if tail <= acc.rel_tol * 0.1 * sum.norm() + 1e-30 * abs_sum {
                return Ok((sum.to_c64(), tail + abs_sum * 1e-30 + sum.norm() * 2.2e-16));
            }
        }
    }
    Err(JacobiError::InsufficientTerms(format!(
        "2F1 series at |z| = {za:.6} not converged after {} terms",
        acc.max_terms
    )))
}

/// Gauss hypergeometric function with an absolute error estimate.
///
/// Uses the defining series when `|z|` is small and the Pfaff transformation
/// `F(a,b;c;z) = (1-z)^{-a} F(a, c-b; c; z/(z-1))` when that argument is smaller.
/// Terminating series are summed exactly for any `z`.
pub fn hyp2f1_with_err(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    z: Complex64,
    acc: SeriesAccuracy,
) -> Result<(Complex64, f64)> {
    if is_nonpositive_integer(c) {
        return Err(JacobiError::Parameter(format!(
            "2F1 lower parameter c = {c} is a nonpositive integer"
        )));
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok((Complex64::new(1.0, 0.0), 0.0));
    }
    let terminates = |p: Complex64| is_nonpositive_integer(p) && -p.re < acc.max_terms as f64;
    let zd = CDd::from_c64(z);
    if terminates(a) || terminates(b) {
        return series_dd(a, b, c, zd, acc);
    }
    let one = Complex64::new(1.0, 0.0);
    let w = z / (z - one);
    if z.re < 0.5 && (terminates(c - b) || terminates(c - a)) {
        let (p, q, e) = if terminates(c - b) { (a, c - b, a) } else { (c - a, b, b) };
        let (v, err) = series_dd(p, q, c, CDd::from_c64(w), acc)?;
        let pre = (one - z).powc(-e);
        return Ok((pre * v, err * pre.norm()));
    }
    if z.norm() <= w.norm() || z.re >= 0.5 {
        if z.norm() > MAX_SERIES_ARG {
            return Err(JacobiError::Divergence(format!(
                "no transformation brings z = {z} inside |z| <= {MAX_SERIES_ARG}"
            )));
        }
        return series_dd(a, b, c, zd, acc);
    }
    if w.norm() > MAX_SERIES_ARG {
        return Err(JacobiError::Divergence(format!(
            "Pfaff argument |z/(z-1)| = {:.6} exceeds {MAX_SERIES_ARG}",
            w.norm()
        )));
    }
    let (v, err) = series_dd(a, c - b, c, CDd::from_c64(w), acc)?;
    let pre = (one - z).powc(-a);
    Ok((pre * v, err * pre.norm()))
}

pub fn hyp2f1(a: Complex64, b: Complex64, c: Complex64, z: Complex64) -> Result<Complex64> {
    hyp2f1_with_err(a, b, c, z, SeriesAccuracy::default()).map(|(v, _)| v)
}

/// Real `2F1` by the plain series, for `|x| < 1` and `c` not a nonpositive integer.
/// Returns NaN outside the disc.
pub fn hyp2f1_real(a: f64, b: f64, c: f64, x: f64) -> f64 {
    if x.abs() >= 1.0 {
        return f64::NAN;
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..100_000 {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * x;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && k > 2 {
            break;
        }
        if term == 0.0 {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trivial_cases() {
        assert_eq!(hyp2f1(c(0.4, 1.0), c(0.0, 0.0), c(1.5, 0.0), c(0.7, 0.2)).unwrap(), c(1.0, 0.0));
        assert_eq!(hyp2f1(c(0.4, 1.0), c(2.0, 0.0), c(1.5, 0.0), c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn logarithm_case_against_brute_force() {
        let z: f64 = 0.3;
        let brute: f64 = (0..200).map(|k| z.powi(k) / (k as f64 + 1.0)).sum();
        let v = hyp2f1(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(z, 0.0)).unwrap();
        assert!((v.re - brute).abs() < 1e-14);
        assert!((v.re + (1.0 - z).ln() / z).abs() < 1e-14);
    }

    #[test]
    fn complex_reference_values() {
        let a = c(0.8, 1.5);
        let b = c(1.1, -0.4);
        let cc = c(2.3, 0.0);
        let v = hyp2f1(a, b, cc, c(-3.2, 0.0)).unwrap();
        let want = c(0.164_504_861_900_145_66, -0.225_793_079_816_467_56);
        assert!((v - want).norm() < 1e-13);
        let v = hyp2f1(a, b, cc, c(0.3, 0.5)).unwrap();
        let want = c(0.728_110_047_823_175_2, 0.370_154_311_720_325_1);
        assert!((v - want).norm() < 1e-13);
    }

    #[test]
    fn terminating_series_at_large_argument() {
        // F(-2, b; c; z) = 1 - 2bz/c + b(b+1)z²/(c(c+1))
        let (b, cc, z) = (0.7, 1.9, -40.0);
        let exact = 1.0 - 2.0 * b * z / cc + b * (b + 1.0) * z * z / (cc * (cc + 1.0));
        let v = hyp2f1(c(-2.0, 0.0), c(b, 0.0), c(cc, 0.0), c(z, 0.0)).unwrap();
        assert!((v.re - exact).abs() < 1e-12 * exact.abs());
    }

    #[test]
    fn divergence_reported() {
        let r = hyp2f1(c(0.3, 0.0), c(0.4, 0.0), c(1.2, 0.0), c(1.5, 0.0));
        assert!(matches!(r, Err(JacobiError::Divergence(_))));
        assert!(hyp2f1(c(0.3, 0.0), c(0.4, 0.0), c(-1.0, 0.0), c(0.2, 0.0)).is_err());
    }

    #[test]
    fn real_series_matches_complex() {
        let v = hyp2f1_real(2.1, 0.9, 1.8, 0.45);
        let w = hyp2f1(c(2.1, 0.0), c(0.9, 0.0), c(1.8, 0.0), c(0.45, 0.0)).unwrap();
        assert!((v - w.re).abs() < 1e-14 * v.abs());
    }

    proptest! {
        #[test]
        fn contiguous_relation(
            a in 0.2f64..2.0, b in -1.5f64..1.5, cc in 0.6f64..3.0,
            zr in -0.6f64..0.6, zi in -0.5f64..0.5,
        ) {
            let (a, b, cc, z) = (c(a, 0.1), c(b, 0.0), c(cc, 0.0), c(zr, zi));
            let f = |x| hyp2f1(x, b, cc, z).unwrap();
            let lhs = (cc - a) * f(a - 1.0) + (2.0 * a - cc + (b - a) * z) * f(a) + a * (z - 1.0) * f(a + 1.0);
            prop_assert!(lhs.norm() < 1e-9);
        }
    }
}

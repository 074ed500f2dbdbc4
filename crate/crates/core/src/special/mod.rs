//! Complex special functions: Gamma, Gauss hypergeometric, Bessel J and K.

mod bessel;
mod gamma;
mod hyper;

pub use bessel::{
    bessel_calj, bessel_e, bessel_e_seq, bessel_j, bessel_j_principal, bessel_k_third,
    ComplexOrder,
};
pub use gamma::{gamma, gamma_real, ln_gamma, ln_gamma_real, pochhammer, rgamma, EULER_GAMMA};
pub use hyper::{hyp2f1, hyp2f1_real, hyp2f1_with_err, SeriesAccuracy, MAX_SERIES_ARG};
pub(crate) use hyper::series_dd;

use num_complex::Complex64;

pub(crate) fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

//! Parameter adapters for rank-one symmetric spaces, Damek–Ricci spaces and
//! BC₁ root systems.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{JacobiError, Result};
use crate::jacobi::{c_function, JacobiParams};
use crate::special::{gamma_real, hyp2f1, ln_gamma};

/// Root multiplicities `p` of `α` and `q` of `2α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetricSpaceSpec {
    pub p: u32,
    pub q: u32,
}

impl SymmetricSpaceSpec {
    pub fn dimension(&self) -> u32 {
        self.p + self.q + 1
    }
}

/// `α = (p+q-1)/2`, `β = (q-1)/2`.
pub fn from_symmetric_space(spec: &SymmetricSpaceSpec) -> Result<JacobiParams> {
    if spec.p < 1 {
        return Err(JacobiError::Parameter("symmetric space needs p >= 1".into()));
    }
    let (p, q) = (spec.p as f64, spec.q as f64);
    JacobiParams::new(0.5 * (p + q - 1.0), 0.5 * (q - 1.0))
}

/// Dimensions of the `𝔳` and `𝔷` parts of the Lie algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DamekRicciSpec {
    pub m_v: u32,
    pub m_z: u32,
}

impl DamekRicciSpec {
    pub fn dimension(&self) -> u32 {
        self.m_v + self.m_z + 1
    }

    /// `2Q = m_v + 2 m_z`, as an integer.
    pub fn twice_homogeneous_dimension(&self) -> u32 {
        self.m_v + 2 * self.m_z
    }

    pub fn homogeneous_dimension(&self) -> f64 {
        0.5 * self.m_v as f64 + self.m_z as f64
    }
}

/// Jacobi parameters for a Damek–Ricci space in the variable `t = r/2`,
/// where the radial Laplace–Beltrami operator equals `spectral_factor · ℒ_{α,β}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DamekRicciMap {
    pub params: JacobiParams,
    /// `t = radial_scale · r`.
    pub radial_scale: f64,
    pub spectral_factor: f64,
}

pub fn from_damek_ricci(spec: &DamekRicciSpec) -> Result<DamekRicciMap> {
    if spec.m_v < 1 {
        return Err(JacobiError::Parameter("Damek–Ricci space needs m_v >= 1".into()));
    }
    let (v, z) = (spec.m_v as f64, spec.m_z as f64);
    let params = JacobiParams::new(0.5 * (v + z - 1.0), 0.5 * (z - 1.0))?;
    Ok(DamekRicciMap { params, radial_scale: 0.5, spectral_factor: 0.25 })
}

/// `|2A(r) - ((2α+1)coth(r/2) + (2β+1)tanh(r/2))|` with
/// `A(r) = ((m_v+m_z)/2) coth(r/2) + (m_z/2) tanh(r/2)` the first-order coefficient in `r`.
pub fn damek_ricci_coefficient_defect(spec: &DamekRicciSpec, r: f64) -> Result<f64> {
    let map = from_damek_ricci(spec)?;
    let t = map.radial_scale * r;
    let (v, z) = (spec.m_v as f64, spec.m_z as f64);
    let lb = 0.5 * (v + z) / t.tanh() + 0.5 * z * t.tanh();
    let (a, b) = (map.params.alpha(), map.params.beta());
    let jac = (2.0 * a + 1.0) / t.tanh() + (2.0 * b + 1.0) * t.tanh();
    Ok((2.0 * lb - jac).abs())
}

/// `c(λ) = 2^{Q-2iλ} Γ(n/2) Γ(2iλ) / (Γ(iλ + Q/2) Γ(iλ + m_v/4 + 1/2))`.
pub fn damek_ricci_c_function(spec: &DamekRicciSpec, lambda: f64) -> Result<Complex64> {
    if lambda == 0.0 {
        return Err(JacobiError::Pole { what: "Damek–Ricci c-function", at: "λ = 0".into() });
    }
    let i = Complex64::new(0.0, 1.0);
    let q = spec.homogeneous_dimension();
    let n = spec.dimension() as f64;
    let il = i * lambda;
    let ln = (q - 2.0 * il) * 2f64.ln() + ln_gamma(2.0 * il)?
        - ln_gamma(il + 0.5 * q)?
        - ln_gamma(il + 0.25 * spec.m_v as f64 + 0.5)?;
    Ok(ln.exp() * gamma_real(0.5 * n)?)
}

/// `(max - min) / mean` of the ratios `a_k / b_k`.
pub fn ratio_defect(a: &[f64], b: &[f64]) -> f64 {
    let r: Vec<f64> = a.iter().zip(b).map(|(x, y)| x / y).collect();
    if r.is_empty() {
        return 0.0;
    }
    let mean = r.iter().sum::<f64>() / r.len() as f64;
    let (lo, hi) = r.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
    (hi - lo) / mean.abs()
}

/// Constancy defect of `|c_DR(λ)|² / |c(λ/scale)|²` over the given `λ`, with `c` the Jacobi c-function.
pub fn damek_ricci_c_crosscheck(spec: &DamekRicciSpec, lambdas: &[f64]) -> Result<f64> {
    let map = from_damek_ricci(spec)?;
    let mut dr = Vec::with_capacity(lambdas.len());
    let mut jac = Vec::with_capacity(lambdas.len());
    for &l in lambdas {
        dr.push(damek_ricci_c_function(spec, l)?.norm_sqr());
        jac.push(c_function(&map.params, Complex64::new(l / map.radial_scale, 0.0))?.norm_sqr());
    }
    Ok(ratio_defect(&dr, &jac))
}

/// Multiplicities `k1 = k(2)`, `k2 = k(4)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BCRootSpec {
    pub k1: f64,
    pub k2: f64,
}

impl BCRootSpec {
    /// `k2 > 0` and `k1 > 1 - k2`.
    pub fn is_admissible(&self) -> bool {
        self.k2 > 0.0 && self.k1 > 1.0 - self.k2
    }

    pub fn rho(&self) -> f64 {
        self.k1 + 2.0 * self.k2
    }
}

/// `α = k1 + k2 - 1/2`, `β = k2 - 1/2`.
pub fn from_bc_root_system(spec: &BCRootSpec) -> Result<JacobiParams> {
    if !spec.is_admissible() {
        return Err(JacobiError::Parameter(format!(
            "multiplicities (k1, k2) = ({}, {}) need k2 > 0 and k1 > 1 - k2",
            spec.k1, spec.k2
        )));
    }
    JacobiParams::new(spec.k1 + spec.k2 - 0.5, spec.k2 - 0.5)
}

/// `F(λ, k; t) = ₂F₁((λ+ρ)/2, (ρ-λ)/2; k1+k2+1/2; -sinh²t)`.
pub fn bc_hypergeometric(spec: &BCRootSpec, lambda: Complex64, t: f64) -> Result<Complex64> {
    let rho = spec.rho();
    let c = Complex64::new(spec.k1 + spec.k2 + 0.5, 0.0);
    hyp2f1((lambda + rho) * 0.5, (rho - lambda) * 0.5, c, Complex64::new(-t.sinh().powi(2), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::{phi, EvalMethod};
    use proptest::prelude::*;

    #[test]
    fn complex_hyperbolic_plane() {
        let p = from_symmetric_space(&SymmetricSpaceSpec { p: 2, q: 1 }).unwrap();
        assert_eq!((p.alpha(), p.beta(), p.rho()), (1.0, 0.0, 2.0));
        let b = from_symmetric_space(&SymmetricSpaceSpec { p: 2, q: 0 }).unwrap();
        assert_eq!((b.alpha(), b.beta()), (0.5, -0.5));
        assert!(!b.is_strict() && b.is_evaluable());
        assert!(from_symmetric_space(&SymmetricSpaceSpec { p: 0, q: 3 }).is_err());
    }

    proptest! {
        #[test]
        fn symmetric_space_identities(p in 1u32..40, q in 0u32..40) {
            let spec = SymmetricSpaceSpec { p, q };
            let j = from_symmetric_space(&spec).unwrap();
            prop_assert_eq!(2.0 * (j.alpha() + 1.0), spec.dimension() as f64);
            prop_assert_eq!(j.rho(), 0.5 * (p as f64 + 2.0 * q as f64));
        }

        #[test]
        fn damek_ricci_rho_is_q(m_v in 1u32..64, m_z in 0u32..16) {
            let spec = DamekRicciSpec { m_v, m_z };
            let map = from_damek_ricci(&spec).unwrap();
            prop_assert_eq!(map.params.rho(), spec.homogeneous_dimension());
            prop_assert_eq!((2.0 * map.params.rho()) as u32, spec.twice_homogeneous_dimension());
            prop_assert_eq!(map.params.n_alpha(), spec.dimension() as f64);
        }
    }

    #[test]
    fn damek_ricci_example_and_coefficients() {
        let spec = DamekRicciSpec { m_v: 2, m_z: 1 };
        let map = from_damek_ricci(&spec).unwrap();
        assert_eq!((map.params.alpha(), map.params.beta(), map.params.rho()), (1.0, 0.0, 2.0));
        assert_eq!((map.radial_scale, map.spectral_factor), (0.5, 0.25));
        for r in [0.1, 0.7, 2.0, 5.0, 12.0] {
            assert!(damek_ricci_coefficient_defect(&spec, r).unwrap() < 1e-12);
        }
    }

    #[test]
    fn damek_ricci_c_ratio_is_constant() {
        let spec = DamekRicciSpec { m_v: 2, m_z: 1 };
        assert!(damek_ricci_c_crosscheck(&spec, &[1.0, 2.0, 4.0, 8.0]).unwrap() < 1e-6);
        assert!(damek_ricci_c_crosscheck(&DamekRicciSpec { m_v: 8, m_z: 3 }, &[0.5, 1.0, 2.0, 4.0]).unwrap() < 1e-6);
        assert!(damek_ricci_c_crosscheck(&spec, &[0.0, 1.0]).is_err());
        let v = [1.5, 2.5, 9.0];
        assert_eq!(ratio_defect(&v, &v), 0.0);
    }

    #[test]
    fn bc_parameters_and_admissibility() {
        let spec = BCRootSpec { k1: 1.0, k2: 1.0 };
        let p = from_bc_root_system(&spec).unwrap();
        assert_eq!((p.alpha(), p.beta(), p.rho()), (1.5, 0.5, 3.0));
        assert_eq!(spec.rho(), p.rho());
        assert!(from_bc_root_system(&BCRootSpec { k1: 0.5, k2: 0.2 }).is_err());
        assert!(!BCRootSpec { k1: 0.5, k2: 0.5 }.is_admissible());
        assert!(BCRootSpec { k1: 0.5 + 1e-9, k2: 0.5 }.is_admissible());
        assert!(!BCRootSpec { k1: 3.0, k2: 0.0 }.is_admissible());
    }

    #[test]
    fn bc_function_is_jacobi_function() {
        let spec = BCRootSpec { k1: 0.7, k2: 0.9 };
        let p = from_bc_root_system(&spec).unwrap();
        let i = Complex64::new(0.0, 1.0);
        for &(l, t) in &[(0.3, 0.2), (1.0, 1.5), (4.0, 0.8), (7.5, 2.5), (2.0, 3.0)] {
            let f = bc_hypergeometric(&spec, i * l, t).unwrap();
            let g = phi(&p, Complex64::new(l, 0.0), t, EvalMethod::Auto).unwrap();
            assert!((f - g).norm() < 1e-10, "λ = {l}, t = {t}: {f} vs {g}");
        }
    }
}

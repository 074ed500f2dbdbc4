//! Batched evaluation of `φ_λ(t)` on a fixed `t`-grid for many `λ`.
//!
//! Expansion coefficients are computed once per `t` and Harish-Chandra data
//! once per `λ`, so a transform touching `N_λ × N_t` points costs far less than
//! `N_λ × N_t` independent calls to [`phi`](crate::jacobi::phi).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::asymptotic::{
    expansion_coeffs_am, phi_bessel_cached, ExpansionParams, HcEvaluator, AUTO_ORDER, R0,
};
use crate::error::Result;
use crate::jacobi::{phi_detailed, phi_direct, terminating_orientation, EvalMethod, JacobiParams};

const EXPANSION_MIN_LAMBDA: f64 = 5.0;

#[derive(Debug)]
pub struct PhiGrid {
    params: JacobiParams,
    ts: Vec<f64>,
    expansion: Option<ExpansionParams>,
    am: Vec<Option<Vec<Complex64>>>,
}

impl PhiGrid {
    pub fn new(params: &JacobiParams, ts: &[f64]) -> Result<Self> {
        let expansion = ExpansionParams::try_from(params).ok();
        let am = match &expansion {
            Some(ep) => ts
                .par_iter()
                .map(|&t| {
                    if t > 0.0 && t <= R0 {
                        expansion_coeffs_am(ep, t, AUTO_ORDER + 3).ok()
                    } else {
                        None
                    }
                })
                .collect(),
            None => vec![None; ts.len()],
        };
        Ok(PhiGrid { params: *params, ts: ts.to_vec(), expansion, am })
    }

    pub fn ts(&self) -> &[f64] {
        &self.ts
    }

    pub fn params(&self) -> &JacobiParams {
        &self.params
    }

    /// `φ_λ(t_j)` for every grid point.
    pub fn row(&self, lambda: Complex64) -> Result<Vec<Complex64>> {
        let p = &self.params;
        let terminating = terminating_orientation(p, lambda).is_some();
        let t_hi = self.ts.iter().cloned().fold(0.0, f64::max);
        let hc = if !terminating && t_hi >= 1.0 {
            HcEvaluator::new(p, lambda, 1.0, t_hi).ok()
        } else {
            None
        };
        let auto = |t: f64| phi_detailed(p, lambda, t, EvalMethod::Auto).map(|v| v.value);
        let mut out = Vec::with_capacity(self.ts.len());
        for (j, &t) in self.ts.iter().enumerate() {
            let v = if t == 0.0 {
                Complex64::new(1.0, 0.0)
            } else if terminating {
                phi_direct(p, lambda, t)?.0
            } else if t <= R0 && lambda.norm() >= EXPANSION_MIN_LAMBDA && self.am[j].is_some() {
                let ep = self.expansion.as_ref().expect("coefficients imply expansion params");
                match phi_bessel_cached(ep, self.am[j].as_ref().unwrap(), lambda, t) {
                    Ok((v, _)) => v,
                    Err(_) => auto(t)?,
                }
            } else if t < 1.0 {
                match phi_direct(p, lambda, t) {
                    Ok((v, _)) => v,
                    Err(_) => auto(t)?,
                }
            } else {
                match &hc {
                    Some(h) => h.eval(t).0,
                    None => auto(t)?,
                }
            };
            out.push(v);
        }
        Ok(out)
    }

    /// `Σ_j w_j φ_λ(t_j)`.
    pub fn dot(&self, lambda: Complex64, weights: &[Complex64]) -> Result<Complex64> {
        let row = self.row(lambda)?;
        Ok(row.iter().zip(weights).map(|(a, b)| a * b).sum())
    }

    /// [`PhiGrid::dot`] for many `λ`, evaluated in parallel.
    pub fn dots(&self, lambdas: &[Complex64], weights: &[Complex64]) -> Result<Vec<Complex64>> {
        lambdas.par_iter().map(|&l| self.dot(l, weights)).collect()
    }

    /// Rows for many `λ`, evaluated in parallel.
    pub fn rows(&self, lambdas: &[Complex64]) -> Result<Vec<Vec<Complex64>>> {
        lambdas.par_iter().map(|&l| self.row(l)).collect()
    }
}

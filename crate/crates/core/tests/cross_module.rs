use jacobi_kit::geometry::{from_symmetric_space, SymmetricSpaceSpec};
use jacobi_kit::hypergroup::{convolve, ConvGrid};
use jacobi_kit::jacobi::{c_function, phi, EvalMethod, JacobiParams};
use jacobi_kit::operators::{heat_kernel_function, riesz_kernel_numeric, RieszOptions};
use jacobi_kit::quadrature::QuadratureSpec;
use jacobi_kit::transform::{forward_transform, RadialFunction};
use jacobi_kit::Complex64;

fn params() -> JacobiParams {
    JacobiParams::new(1.3, 0.2).unwrap()
}

#[test]
fn convolution_theorem() {
    let p = params();
    let quad = QuadratureSpec::default();
    let (f, g) = (RadialFunction::bump(1.0), RadialFunction::bump(0.5));
    let grid = ConvGrid::new(&p, 1.5, 0.25).unwrap();
    let h = convolve(&p, &f, &g, &grid).unwrap();
    let ls = [0.0, 1.0, 3.0];
    let fh = forward_transform(&p, &f, &ls, &quad).unwrap().values;
    let gh = forward_transform(&p, &g, &ls, &quad).unwrap().values;
    let hh = forward_transform(&p, &h, &ls, &quad.with_t_max(1.5)).unwrap().values;
    for k in 0..ls.len() {
        let want = fh[k] * gh[k];
        assert!((hh[k] - want).norm() < 1e-6 * want.norm().max(1e-3), "λ = {}: {} vs {}", ls[k], hh[k], want);
    }
}

#[test]
fn heat_kernel_transform_is_the_symbol() {
    let p = params();
    let quad = QuadratureSpec::default();
    let s = 0.5;
    let h = heat_kernel_function(&p, s, &quad).unwrap();
    let ls = [0.0, 0.7, 2.0, 3.5];
    let got = forward_transform(&p, &h, &ls, &quad.with_t_max(h.support_hint)).unwrap().values;
    for (l, v) in ls.iter().zip(got) {
        let want = (-s * (l * l + p.rho().powi(2))).exp();
        assert!((v.re - want).abs() < 1e-3 * want, "λ = {l}: {} vs {want}", v.re);
    }
}

#[test]
fn harish_chandra_asymptotics_at_large_t() {
    let p = params();
    let i = Complex64::new(0.0, 1.0);
    for l in [0.8, 2.5] {
        let lam = Complex64::new(l, 0.0);
        let t = 9.0;
        let lead = c_function(&p, lam).unwrap() * ((i * lam - p.rho()) * t).exp()
            + c_function(&p, -lam).unwrap() * ((-i * lam - p.rho()) * t).exp();
        let v = phi(&p, lam, t, EvalMethod::Auto).unwrap();
        assert!((v - lead).norm() < 1e-6 * (-p.rho() * t).exp(), "λ = {l}");
    }
}

#[test]
fn symmetric_space_params_feed_every_method() {
    let p = from_symmetric_space(&SymmetricSpaceSpec { p: 2, q: 1 }).unwrap();
    let lam = Complex64::new(1.5, 0.0);
    let t = 0.6;
    let reference = phi(&p, lam, t, EvalMethod::DirectHypergeometric).unwrap();
    for m in [EvalMethod::CosineIntegral, EvalMethod::LaplaceRepresentation, EvalMethod::Auto] {
        let v = phi(&p, lam, t, m).unwrap();
        assert!((v - reference).norm() < 1e-9, "{}", m.as_str());
    }
}

#[test]
fn plain_and_regularized_riesz_kernels_agree_above_n_alpha() {
    let p = params();
    let quad = QuadratureSpec::default();
    let a = 6.0;
    let ts = [0.2, 0.8, 1.6];
    let plain = riesz_kernel_numeric(&p, a, &ts, &quad, &RieszOptions::plain()).unwrap();
    let reg = riesz_kernel_numeric(&p, a, &ts, &quad, &RieszOptions::default()).unwrap();
    for (x, y) in plain.iter().zip(&reg) {
        assert!((x - y).norm() < 1e-3 * x.norm(), "{x} vs {y}");
    }
}

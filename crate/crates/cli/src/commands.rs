use clap::{ArgGroup, Args};
use jacobi_kit::asymptotic::{expansion_remainder, hc_gamma_coeffs, phi_bessel_expansion, ExpansionParams};
use jacobi_kit::geometry::{
    bc_hypergeometric, damek_ricci_c_crosscheck, damek_ricci_coefficient_defect, from_bc_root_system,
    from_damek_ricci, from_symmetric_space, BCRootSpec, DamekRicciSpec, SymmetricSpaceSpec,
};
use jacobi_kit::hypergroup::{convolve, ConvGrid};
use jacobi_kit::jacobi::{phi, phi_detailed, EvalMethod, JacobiParams};
use jacobi_kit::operators::{riesz_bounded_region, riesz_kernel_numeric, riesz_local_asymptote, Exponent, RieszOptions};
use jacobi_kit::quadrature::QuadratureSpec;
use jacobi_kit::transform::{forward_transform, plancherel_defect, roundtrip};
use jacobi_kit::Complex64;
use jacobi_selftest::{linear_fit, run_all};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{parse_pair, FunctionKind, FunctionSpec, GridSpec};
use crate::error::CliError;
use crate::output::{Cell, Table};

pub struct Context {
    pub params: JacobiParams,
    pub quad: QuadratureSpec,
    /// Whether `--quad-lmax` was given.
    pub lambda_max_set: bool,
}

/// Spectral cutoff for compactly supported inputs, whose transforms decay like `exp(-c√λ)`.
const COMPACT_LAMBDA_MAX: f64 = 240.0;

/// What a subcommand produces.
pub enum Output {
    Table(Table),
    Document(Value),
    Report { text: String, json: Value, success: bool },
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Real parts of λ.
    #[arg(long, default_value = "2", allow_hyphen_values = true)]
    lambda: GridSpec,
    /// Imaginary part shared by every λ.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    lambda_im: f64,
    /// Radii t >= 0.
    #[arg(long, allow_hyphen_values = true)]
    t: GridSpec,
    /// direct, cosine, laplace, bessel, hc or auto.
    #[arg(long, default_value = "auto")]
    method: EvalMethod,
}

pub fn eval(ctx: &Context, a: &EvalArgs) -> Result<Output, CliError> {
    let points = lambda_t_points(&a.lambda, a.lambda_im, &a.t);
    let values: Vec<_> = points
        .par_iter()
        .map(|&(l, t)| phi_detailed(&ctx.params, l, t, a.method))
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&["t", "lambda_re", "lambda_im", "phi_re", "phi_im", "method", "err_est"]);
    for (&(l, t), v) in points.iter().zip(values) {
        table.push(vec![
            Cell::Num(t),
            Cell::Num(l.re),
            Cell::Num(l.im),
            Cell::Num(v.value.re),
            Cell::Num(v.value.im),
            Cell::Text(v.method.as_str().into()),
            Cell::Num(v.err_est),
        ]);
    }
    Ok(Output::Table(table))
}

fn lambda_t_points(lambdas: &GridSpec, im: f64, ts: &GridSpec) -> Vec<(Complex64, f64)> {
    lambdas.0.iter().flat_map(|&re| ts.0.iter().map(move |&t| (Complex64::new(re, im), t))).collect()
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[arg(long, default_value = "10", allow_hyphen_values = true)]
    lambda: GridSpec,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    lambda_im: f64,
    #[arg(long, default_value = "0.1:1.1:11", allow_hyphen_values = true)]
    t: GridSpec,
    /// Expansion order M.
    #[arg(long, default_value_t = 3)]
    order: usize,
    /// Print Harish-Chandra coefficients Γ_0..Γ_K for each λ instead.
    #[arg(long, value_name = "K")]
    hc_coeffs: Option<usize>,
}

pub fn expand(ctx: &Context, a: &ExpandArgs) -> Result<Output, CliError> {
    if let Some(k) = a.hc_coeffs {
        return hc_table(ctx, a, k);
    }
    let ep = ExpansionParams::try_from(&ctx.params)?;
    let points = lambda_t_points(&a.lambda, a.lambda_im, &a.t);
    let rows: Vec<_> = points
        .par_iter()
        .map(|&(l, t)| -> Result<_, CliError> {
            let (v, err) = phi_bessel_expansion(&ep, l, t, a.order)?;
            let rem = expansion_remainder(&ep, l, t, a.order)?;
            let exact = phi(&ctx.params, l, t, EvalMethod::Auto)?;
            Ok((v, err, rem.norm(), (exact - v).norm()))
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&[
        "t", "lambda_re", "lambda_im", "order", "approx_re", "approx_im", "err_est", "remainder_abs", "deviation",
    ]);
    for (&(l, t), (v, err, rem, dev)) in points.iter().zip(rows) {
        table.push(vec![
            Cell::Num(t),
            Cell::Num(l.re),
            Cell::Num(l.im),
            Cell::Int(a.order as i64),
            Cell::Num(v.re),
            Cell::Num(v.im),
            Cell::Num(err),
            Cell::Num(rem),
            Cell::Num(dev),
        ]);
    }
    Ok(Output::Table(table))
}

fn hc_table(ctx: &Context, a: &ExpandArgs, k_max: usize) -> Result<Output, CliError> {
    let mut table = Table::new(&["lambda_re", "lambda_im", "k", "gamma_re", "gamma_im", "envelope"]);
    let mut fits = Vec::new();
    for &re in &a.lambda.0 {
        let l = Complex64::new(re, a.lambda_im);
        let s = hc_gamma_coeffs(&ctx.params, l, k_max)?;
        for (k, g) in s.gammas.iter().enumerate() {
            table.push(vec![
                Cell::Num(l.re),
                Cell::Num(l.im),
                Cell::Int(k as i64),
                Cell::Num(g.re),
                Cell::Num(g.im),
                Cell::Num(s.fit.envelope(k)),
            ]);
        }
        fits.push(json!({ "lambda_re": l.re, "lambda_im": l.im, "fit": s.fit }));
    }
    table.diagnostics = Some(json!({ "gangolli_fits": fits }));
    Ok(Output::Table(table))
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// bump:a, gaussian:w, indicator:a or heat:s.
    #[arg(long, default_value = "bump:1")]
    function: FunctionSpec,
    /// Spectral points for the forward transform.
    #[arg(long, default_value = "0:20:81", allow_hyphen_values = true)]
    lambda: GridSpec,
    /// Transform, invert and compare with the input on --t.
    #[arg(long)]
    roundtrip: bool,
    #[arg(long, default_value = "0:3:31", allow_hyphen_values = true)]
    t: GridSpec,
    /// Add the relative Plancherel defect to the diagnostics.
    #[arg(long)]
    plancherel: bool,
}

pub fn transform(ctx: &Context, a: &TransformArgs) -> Result<Output, CliError> {
    let f = a.function.build(&ctx.params, &ctx.quad)?;
    let quad = match a.function.kind {
        FunctionKind::Bump | FunctionKind::Indicator if !ctx.lambda_max_set => ctx.quad.with_lambda_max(COMPACT_LAMBDA_MAX),
        _ => ctx.quad,
    };
    let mut diag = serde_json::Map::new();
    let mut table = if a.roundtrip {
        let rt = roundtrip(&ctx.params, &f, &a.t.0, &quad)?;
        let mut table = Table::new(&["t", "f", "reconstructed_re", "reconstructed_im", "abs_error"]);
        for (&t, v) in rt.ts.iter().zip(&rt.reconstructed) {
            let ft = f.eval(t);
            table.push(vec![Cell::Num(t), Cell::Num(ft.re), Cell::Num(v.re), Cell::Num(v.im), Cell::Num((v - ft).norm())]);
        }
        diag.insert("max_error".into(), json!(rt.max_error));
        diag.insert("forward".into(), json!(rt.forward));
        diag.insert("inverse".into(), json!(rt.inverse));
        table
    } else {
        let tr = forward_transform(&ctx.params, &f, &a.lambda.0, &quad)?;
        let mut table = Table::new(&["lambda", "fhat_re", "fhat_im"]);
        for (&l, v) in a.lambda.0.iter().zip(&tr.values) {
            table.push(vec![Cell::Num(l), Cell::Num(v.re), Cell::Num(v.im)]);
        }
        diag.insert("forward".into(), json!(tr.diagnostics));
        table
    };
    if a.plancherel {
        diag.insert("plancherel_defect".into(), json!(plancherel_defect(&ctx.params, &f, &quad)?));
    }
    table.diagnostics = Some(Value::Object(diag));
    Ok(Output::Table(table))
}

#[derive(Debug, Args)]
pub struct ConvolveArgs {
    /// First factor, e.g. bump:1 or heat:0.5.
    #[arg(long)]
    f: FunctionSpec,
    /// Second factor.
    #[arg(long)]
    g: FunctionSpec,
    /// Radii at which f ⋆ g is evaluated.
    #[arg(long, default_value = "0:2:21", allow_hyphen_values = true)]
    x: GridSpec,
    /// Extent of the integration grid; defaults to the larger support.
    #[arg(long)]
    grid_tmax: Option<f64>,
    #[arg(long, default_value_t = 0.25)]
    panel: f64,
}

pub fn convolve_cmd(ctx: &Context, a: &ConvolveArgs) -> Result<Output, CliError> {
    let f = a.f.build(&ctx.params, &ctx.quad)?;
    let g = a.g.build(&ctx.params, &ctx.quad)?;
    let t_max = match a.grid_tmax {
        Some(t) => t,
        None => {
            let s = f.support_hint.max(g.support_hint);
            if !s.is_finite() {
                return Err(CliError::Usage("factors have unbounded support: pass --grid-tmax".into()));
            }
            s
        }
    };
    let grid = ConvGrid::new(&ctx.params, t_max, a.panel)?;
    let h = convolve(&ctx.params, &f, &g, &grid)?;
    let mut table = Table::new(&["x", "value_re", "value_im"]);
    for &x in &a.x.0 {
        if !(x >= 0.0) {
            return Err(CliError::Usage(format!("radius x = {x} must be nonnegative")));
        }
        let v = h.eval(x);
        table.push(vec![Cell::Num(x), Cell::Num(v.re), Cell::Num(v.im)]);
    }
    table.diagnostics = Some(json!({ "grid_tmax": t_max, "grid_nodes": grid.nodes.len(), "grid_mass": grid.mass() }));
    Ok(Output::Table(table))
}

#[derive(Debug, Args)]
pub struct RieszArgs {
    /// Order a > 0.
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, default_value = "0.001:0.1:9:log", allow_hyphen_values = true)]
    t: GridSpec,
    /// Fit the log-log slope of |k_a| over --t and compare with the local asymptote.
    #[arg(long)]
    slope: bool,
    /// Plain synthesis without damping; needs a > n_α.
    #[arg(long)]
    plain: bool,
}

pub fn riesz(ctx: &Context, a: &RieszArgs) -> Result<Output, CliError> {
    let opts = if a.plain { RieszOptions::plain() } else { RieszOptions::default() };
    let k = riesz_kernel_numeric(&ctx.params, a.a, &a.t.0, &ctx.quad, &opts)?;
    let mut table = Table::new(&["t", "k_re", "k_im"]);
    for (&t, v) in a.t.0.iter().zip(&k) {
        table.push(vec![Cell::Num(t), Cell::Num(v.re), Cell::Num(v.im)]);
    }
    if a.slope {
        let pairs: Vec<(f64, f64)> =
            a.t.0.iter().zip(&k).filter(|(t, v)| **t > 0.0 && v.norm() > 0.0).map(|(t, v)| (t.ln(), v.norm().ln())).collect();
        if pairs.len() < 2 {
            return Err(CliError::Usage("slope needs at least two positive radii".into()));
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let fit = linear_fit(&xs, &ys);
        let asymptote = riesz_local_asymptote(&ctx.params, a.a).ok().map(|r| r.tag);
        table.diagnostics = Some(json!({
            "slope": fit.slope,
            "r_squared": fit.r_squared,
            "n_alpha": ctx.params.n_alpha(),
            "expected_slope": a.a - ctx.params.n_alpha(),
            "asymptote": asymptote,
        }));
    }
    Ok(Output::Table(table))
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    /// Points per axis on [0, 1]² in (1/p, 1/q).
    #[arg(long, default_value_t = 51)]
    grid: usize,
}

pub fn region(ctx: &Context, a: &RegionArgs) -> Result<Output, CliError> {
    if a.grid < 2 {
        return Err(CliError::Usage("--grid needs at least 2 points".into()));
    }
    if !(a.a > 0.0 && a.a.is_finite()) {
        return Err(CliError::Usage(format!("order a must be positive, got {}", a.a)));
    }
    let axis: Vec<f64> = (0..a.grid).map(|j| j as f64 / (a.grid - 1) as f64).collect();
    let mut table = Table::new(&["inv_p", "inv_q", "bounded"]);
    for &ip in &axis {
        for &iq in &axis {
            let (p, q) = (Exponent::from_reciprocal(ip)?, Exponent::from_reciprocal(iq)?);
            table.push(vec![Cell::Num(ip), Cell::Num(iq), Cell::Bool(riesz_bounded_region(&ctx.params, a.a, p, q))]);
        }
    }
    Ok(Output::Table(table))
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("space").required(true).args(["symmetric", "damek_ricci", "bc"])))]
pub struct GeomArgs {
    /// Root multiplicities p,q of a rank-one symmetric space.
    #[arg(long, value_name = "P,Q", value_parser = parse_pair::<u32>)]
    symmetric: Option<(u32, u32)>,
    /// Dimensions m_v,m_z of a Damek–Ricci space.
    #[arg(long, value_name = "MV,MZ", value_parser = parse_pair::<u32>)]
    damek_ricci: Option<(u32, u32)>,
    /// BC₁ multiplicities k1,k2.
    #[arg(long, value_name = "K1,K2", value_parser = parse_pair::<f64>, allow_hyphen_values = true)]
    bc: Option<(f64, f64)>,
}

fn params_json(p: &JacobiParams) -> Value {
    json!({ "alpha": p.alpha(), "beta": p.beta(), "rho": p.rho(), "n_alpha": p.n_alpha() })
}

pub fn geom(a: &GeomArgs) -> Result<Output, CliError> {
    let doc = if let Some((p, q)) = a.symmetric {
        let spec = SymmetricSpaceSpec { p, q };
        let params = from_symmetric_space(&spec)?;
        json!({
            "space": "symmetric",
            "multiplicities": { "p": p, "q": q },
            "dimension": spec.dimension(),
            "params": params_json(&params),
            "n_alpha_equals_dimension": params.n_alpha() == spec.dimension() as f64,
            "rho_equals_half_sum": params.rho() == 0.5 * p as f64 + q as f64,
        })
    } else if let Some((m_v, m_z)) = a.damek_ricci {
        let spec = DamekRicciSpec { m_v, m_z };
        let map = from_damek_ricci(&spec)?;
        let coefficient_defect = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0]
            .iter()
            .map(|&r| damek_ricci_coefficient_defect(&spec, r))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let c_defect = damek_ricci_c_crosscheck(&spec, &[0.25, 0.5, 1.0, 2.0, 4.0, 8.0])?;
        json!({
            "space": "damek_ricci",
            "dimensions": { "m_v": m_v, "m_z": m_z },
            "dimension": spec.dimension(),
            "homogeneous_dimension": spec.homogeneous_dimension(),
            "params": params_json(&map.params),
            "radial_scale": map.radial_scale,
            "spectral_factor": map.spectral_factor,
            "rho_equals_homogeneous_dimension": map.params.rho() == spec.homogeneous_dimension(),
            "coefficient_defect": coefficient_defect,
            "c_function_ratio_defect": c_defect,
        })
    } else if let Some((k1, k2)) = a.bc {
        let spec = BCRootSpec { k1, k2 };
        let params = from_bc_root_system(&spec)?;
        let mut defect = 0.0f64;
        for &(l, t) in &[(0.5, 0.3), (1.0, 1.0), (2.5, 0.7), (0.0, 2.0), (4.0, 1.5)] {
            let f = bc_hypergeometric(&spec, Complex64::new(0.0, l), t)?;
            let p = phi(&params, Complex64::new(l, 0.0), t, EvalMethod::Auto)?;
            defect = defect.max((f - p).norm());
        }
        json!({
            "space": "bc",
            "multiplicities": { "k1": k1, "k2": k2 },
            "admissible": spec.is_admissible(),
            "params": params_json(&params),
            "rho_equals_k1_plus_2k2": params.rho() == spec.rho(),
            "hypergeometric_defect": defect,
        })
    } else {
        return Err(CliError::Usage("one of --symmetric, --damek-ricci or --bc is required".into()));
    };
    Ok(Output::Document(doc))
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// One parameter set per criterion instead of all three.
    #[arg(long)]
    fast: bool,
}

pub fn selftest(a: &SelftestArgs) -> Result<Output, CliError> {
    let outcomes = run_all(a.fast);
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let mut text: String = outcomes.iter().map(|o| format!("{o}\n")).collect();
    text.push_str(&format!("{passed}/{} criteria pass\n", outcomes.len()));
    Ok(Output::Report {
        json: json!({ "passed": passed, "total": outcomes.len(), "criteria": outcomes }),
        success: passed == outcomes.len(),
        text,
    })
}

use std::str::FromStr;

use jacobi_kit::jacobi::JacobiParams;
use jacobi_kit::operators::heat_kernel_function;
use jacobi_kit::quadrature::QuadratureSpec;
use jacobi_kit::transform::RadialFunction;

use crate::error::CliError;

/// A grid of reals: `x`, `x1,x2,...`, `a:b:n` (linear) or `a:b:n:log`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec(pub Vec<f64>);

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("'{x}' is not a number"));
        let parts: Vec<&str> = s.split(':').collect();
        let values = match parts.len() {
            1 => s.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
            3 | 4 => {
                let (a, b) = (num(parts[0])?, num(parts[1])?);
                let n: usize = parts[2].trim().parse().map_err(|_| format!("'{}' is not a count", parts[2]))?;
                let log = match parts.get(3).map(|x| x.trim()) {
                    None => false,
                    Some("log") => true,
                    Some(other) => return Err(format!("unknown grid spacing '{other}', expected 'log'")),
                };
                if log && !(a > 0.0 && b > 0.0) {
                    return Err("log grid needs positive endpoints".into());
                }
                (0..n)
                    .map(|j| {
                        let s = if n == 1 { 0.0 } else { j as f64 / (n - 1) as f64 };
                        if log {
                            (a.ln() + (b.ln() - a.ln()) * s).exp()
                        } else {
                            a + (b - a) * s
                        }
                    })
                    .collect()
            }
            _ => return Err(format!("'{s}' is not a grid: use x, x1,x2,..., a:b:n or a:b:n:log")),
        };
        if values.is_empty() {
            return Err("grid is empty".into());
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(format!("grid value {v} is not finite"));
        }
        Ok(GridSpec(values))
    }
}

/// Two comma-separated numbers.
pub fn parse_pair<T: FromStr>(s: &str) -> Result<(T, T), String> {
    let mut it = s.split(',').map(|x| x.trim().parse::<T>());
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
        _ => Err(format!("'{s}' is not a pair 'x,y'")),
    }
}

/// A bundled radial test function: `bump:a`, `gaussian:w`, `indicator:a` or `heat:s`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    pub kind: FunctionKind,
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionKind {
    Bump,
    Gaussian,
    Indicator,
    Heat,
}

impl FromStr for FunctionSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (name, scale) = s.split_once(':').unwrap_or((s, "1"));
        let kind = match name {
            "bump" => FunctionKind::Bump,
            "gaussian" => FunctionKind::Gaussian,
            "indicator" => FunctionKind::Indicator,
            "heat" => FunctionKind::Heat,
            _ => return Err(format!("unknown function '{name}': use bump, gaussian, indicator or heat")),
        };
        let scale: f64 = scale.parse().map_err(|_| format!("'{scale}' is not a number"))?;
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(format!("function scale must be positive, got {scale}"));
        }
        Ok(FunctionSpec { kind, scale })
    }
}

impl FunctionSpec {
    pub fn build(&self, params: &JacobiParams, quad: &QuadratureSpec) -> Result<RadialFunction, CliError> {
        Ok(match self.kind {
            FunctionKind::Bump => RadialFunction::bump(self.scale),
            FunctionKind::Gaussian => RadialFunction::gaussian(self.scale),
            FunctionKind::Indicator => RadialFunction::indicator(self.scale),
            FunctionKind::Heat => heat_kernel_function(params, self.scale, quad)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!("2".parse::<GridSpec>().unwrap().0, vec![2.0]);
        assert_eq!("1, 2.5,4".parse::<GridSpec>().unwrap().0, vec![1.0, 2.5, 4.0]);
        let g = "0:3:301".parse::<GridSpec>().unwrap().0;
        assert_eq!((g.len(), g[0], g[300]), (301, 0.0, 3.0));
        let g = "0.001:0.1:3:log".parse::<GridSpec>().unwrap().0;
        assert!((g[1] - 0.01).abs() < 1e-15);
        assert!("0:3:0".parse::<GridSpec>().is_err());
        assert!("0:1:3:cubic".parse::<GridSpec>().is_err());
        assert!("-1:1:3:log".parse::<GridSpec>().is_err());
        assert!("a,b".parse::<GridSpec>().is_err());
        assert!("1:2".parse::<GridSpec>().is_err());
    }

    #[test]
    fn pairs_and_functions() {
        assert_eq!(parse_pair::<u32>("2, 1").unwrap(), (2, 1));
        assert!(parse_pair::<u32>("2").is_err());
        assert!(parse_pair::<f64>("1,2,3").is_err());
        let f: FunctionSpec = "gaussian:0.7".parse().unwrap();
        assert_eq!((f.kind, f.scale), (FunctionKind::Gaussian, 0.7));
        assert_eq!("bump".parse::<FunctionSpec>().unwrap().scale, 1.0);
        assert!("bump:-1".parse::<FunctionSpec>().is_err());
        assert!("sinc:1".parse::<FunctionSpec>().is_err());
    }
}

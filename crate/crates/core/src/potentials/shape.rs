use std::fmt;
use std::sync::Arc;

use crate::error::{Result, ScatterError};
use crate::spline::CubicSpline;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One Gaussian bump `amplitude * exp(-(x - center)^2 / (2 width^2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

/// Which one-sided limit to take at a discontinuity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Functional form of a potential (or of a frequency profile).
#[derive(Clone)]
pub enum Shape {
    Constant(f64),
    /// `height * sech^2((x - center) / width)`
    Sech2 {
        height: f64,
        width: f64,
        center: f64,
    },
    /// `(lo + hi)/2 + (hi - lo)/2 * tanh(x / width)`
    TanhStep {
        v_minus: f64,
        v_plus: f64,
        width: f64,
    },
    /// `v0 cosh^2(mu) (tanh((x - mu L)/L) + tanh(mu))^2`
    PoschlTeller {
        v0: f64,
        mu: f64,
        width: f64,
    },
    /// Piecewise constant: `values[i]` holds on `(edges[i-1], edges[i])`.
    Steps {
        edges: Vec<f64>,
        values: Vec<f64>,
    },
    Gaussians(Vec<Gaussian>),
    Tabulated(CubicSpline),
    Custom {
        label: String,
        value: RealFn,
        derivative: Option<RealFn>,
    },
    Sum(Vec<Shape>),
    Shifted {
        inner: Box<Shape>,
        offset: f64,
    },
    /// `scale * (reference^2 - inner^2)`, the potential whose local
    /// wavenumber is `inner` at energy `scale * reference^2`.
    SquareMap {
        inner: Box<Shape>,
        scale: f64,
        reference: f64,
    },
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Constant(c) => write!(f, "Constant({c})"),
            Shape::Sech2 { height, width, center } => {
                write!(f, "Sech2(height={height}, width={width}, center={center})")
            }
            Shape::TanhStep { v_minus, v_plus, width } => write!(f, "TanhStep({v_minus} -> {v_plus}, width={width})"),
            Shape::PoschlTeller { v0, mu, width } => {
                write!(f, "PoschlTeller(v0={v0}, mu={mu}, width={width})")
            }
            Shape::Steps { edges, values } => write!(f, "Steps(edges={edges:?}, values={values:?})"),
            Shape::Gaussians(g) => write!(f, "Gaussians({g:?})"),
            Shape::Tabulated(s) => write!(f, "Tabulated({:?})", s.x_range()),
            Shape::Custom { label, .. } => write!(f, "Custom({label})"),
            Shape::Sum(parts) => f.debug_tuple("Sum").field(parts).finish(),
            Shape::Shifted { inner, offset } => write!(f, "Shifted({inner:?}, {offset})"),
            Shape::SquareMap {
                inner,
                scale,
                reference,
            } => {
                write!(f, "SquareMap({inner:?}, scale={scale}, reference={reference})")
            }
        }
    }
}

#[inline]
fn sech2(u: f64) -> f64 {
    let c = u.cosh();
    if c.is_infinite() {
        0.0
    } else {
        1.0 / (c * c)
    }
}

impl Shape {
    pub fn steps(edges: Vec<f64>, values: Vec<f64>) -> Result<Shape> {
        if values.len() != edges.len() + 1 {
            return Err(ScatterError::InvalidParameter(format!(
                "piecewise potential needs {} values for {} edges",
                edges.len() + 1,
                edges.len()
            )));
        }
        if edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ScatterError::InvalidParameter(
                "piecewise edges must be strictly increasing".into(),
            ));
        }
        Ok(Shape::Steps { edges, values })
    }

    /// Parses an expression in the variable `var` (e.g. `"0.3*sech(x)^2"`).
    pub fn expression(expr: &str, var: &str) -> Result<Shape> {
        let parsed: meval::Expr = expr
            .parse()
            .map_err(|e| ScatterError::Config(format!("cannot parse expression {expr:?}: {e}")))?;
        let var = var.to_string();
        // validate once so that evaluation never fails later
        expression_context::eval(&parsed, &var, 0.0)
            .map_err(|e| ScatterError::Config(format!("cannot evaluate expression {expr:?}: {e}")))?;
        let label = expr.to_string();
        let value: RealFn = Arc::new(move |x| expression_context::eval(&parsed, &var, x).unwrap_or(f64::NAN));
        Ok(Shape::Custom {
            label,
            value,
            derivative: None,
        })
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Shape::Constant(c) => *c,
            Shape::Sech2 { height, width, center } => height * sech2((x - center) / width),
            Shape::TanhStep { v_minus, v_plus, width } => {
                0.5 * (v_minus + v_plus) + 0.5 * (v_plus - v_minus) * (x / width).tanh()
            }
            Shape::PoschlTeller { v0, mu, width } => {
                let c = mu.cosh();
                let s = ((x - mu * width) / width).tanh() + mu.tanh();
                v0 * c * c * s * s
            }
            Shape::Steps { edges, values } => {
                // at an edge the right-hand value is used
                let i = edges.partition_point(|&e| e <= x);
                values[i]
            }
            Shape::Gaussians(g) => g
                .iter()
                .map(|b| {
                    let u = (x - b.center) / b.width;
                    b.amplitude * (-0.5 * u * u).exp()
                })
                .sum(),
            Shape::Tabulated(s) => s.value(x),
            Shape::Custom { value, .. } => value(x),
            Shape::Sum(parts) => parts.iter().map(|p| p.value(x)).sum(),
            Shape::Shifted { inner, offset } => inner.value(x - offset),
            Shape::SquareMap {
                inner,
                scale,
                reference,
            } => {
                let w = inner.value(x);
                scale * (reference * reference - w * w)
            }
        }
    }

    /// One-sided limit; differs from [`Shape::value`] only at jumps.
    pub fn value_side(&self, x: f64, side: Side) -> f64 {
        match self {
            Shape::Steps { edges, values } => {
                let i = match side {
                    Side::Left => edges.partition_point(|&e| e < x),
                    Side::Right => edges.partition_point(|&e| e <= x),
                };
                values[i]
            }
            Shape::Sum(parts) => parts.iter().map(|p| p.value_side(x, side)).sum(),
            Shape::Shifted { inner, offset } => inner.value_side(x - offset, side),
            Shape::SquareMap {
                inner,
                scale,
                reference,
            } => {
                let w = inner.value_side(x, side);
                scale * (reference * reference - w * w)
            }
            _ => self.value(x),
        }
    }

    /// Analytic derivative, if the shape knows it.
    pub fn derivative(&self, x: f64) -> Option<f64> {
        match self {
            Shape::Constant(_) => Some(0.0),
            Shape::Sech2 { height, width, center } => {
                let u = (x - center) / width;
                Some(-2.0 * height / width * sech2(u) * u.tanh())
            }
            Shape::TanhStep { v_minus, v_plus, width } => Some(0.5 * (v_plus - v_minus) / width * sech2(x / width)),
            Shape::PoschlTeller { v0, mu, width } => {
                let c = mu.cosh();
                let y = (x - mu * width) / width;
                let s = y.tanh() + mu.tanh();
                Some(2.0 * v0 * c * c * s * sech2(y) / width)
            }
            Shape::Steps { .. } => Some(0.0),
            Shape::Gaussians(g) => Some(
                g.iter()
                    .map(|b| {
                        let u = (x - b.center) / b.width;
                        -b.amplitude * u / b.width * (-0.5 * u * u).exp()
                    })
                    .sum(),
            ),
            Shape::Tabulated(s) => Some(s.derivative(x)),
            Shape::Custom { derivative, .. } => derivative.as_ref().map(|d| d(x)),
            Shape::Sum(parts) => parts.iter().map(|p| p.derivative(x)).sum(),
            Shape::Shifted { inner, offset } => inner.derivative(x - offset),
            Shape::SquareMap { inner, scale, .. } => inner.derivative(x).map(|d| -2.0 * scale * inner.value(x) * d),
        }
    }

    /// Locations of jump discontinuities.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = match self {
            Shape::Steps { edges, .. } => edges.clone(),
            Shape::Sum(parts) => parts.iter().flat_map(|p| p.breakpoints()).collect(),
            Shape::Shifted { inner, offset } => inner.breakpoints().into_iter().map(|b| b + offset).collect(),
            Shape::SquareMap { inner, .. } => inner.breakpoints(),
            _ => Vec::new(),
        };
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

mod expression_context {
    use meval::{Context, Expr};

    thread_local! {
        static CONTEXT: Context<'static> = {
            let mut ctx = Context::new();
            ctx.func("sech", |u: f64| 1.0 / u.cosh());
            ctx.func("csch", |u: f64| 1.0 / u.sinh());
            ctx.func("coth", |u: f64| 1.0 / u.tanh());
            ctx
        };
    }

    pub fn eval(expr: &Expr, var: &str, x: f64) -> Result<f64, meval::Error> {
        CONTEXT.with(|ctx| expr.eval_with_context(((var, x), ctx)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn central(shape: &Shape, x: f64) -> f64 {
        let h = 1e-5;
        (shape.value(x + h) - shape.value(x - h)) / (2.0 * h)
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        let shapes = vec![
            Shape::Sech2 {
                height: 0.7,
                width: 1.3,
                center: 0.4,
            },
            Shape::TanhStep {
                v_minus: -0.2,
                v_plus: 0.9,
                width: 0.6,
            },
            Shape::PoschlTeller {
                v0: -0.2,
                mu: 0.3,
                width: 1.0,
            },
            Shape::Gaussians(vec![
                Gaussian {
                    amplitude: 0.5,
                    center: -1.0,
                    width: 0.4,
                },
                Gaussian {
                    amplitude: -0.3,
                    center: 1.5,
                    width: 1.1,
                },
            ]),
        ];
        for s in &shapes {
            for x in [-2.1, -0.3, 0.0, 0.8, 2.5] {
                let d = s.derivative(x).unwrap();
                assert!((d - central(s, x)).abs() < 1e-8, "{s:?} at {x}");
            }
        }
    }

    #[test]
    fn steps_one_sided_limits() {
        let s = Shape::steps(vec![0.0, 1.0], vec![1.0, -3.0, 2.0]).unwrap();
        assert_eq!(s.value(-0.5), 1.0);
        assert_eq!(s.value(0.5), -3.0);
        assert_eq!(s.value_side(0.0, Side::Left), 1.0);
        assert_eq!(s.value_side(0.0, Side::Right), -3.0);
        assert_eq!(s.value_side(1.0, Side::Left), -3.0);
        assert_eq!(s.value_side(1.0, Side::Right), 2.0);
        assert_eq!(s.breakpoints(), vec![0.0, 1.0]);
    }

    #[test]
    fn expression_with_sech() {
        let s = Shape::expression("0.3*sech(x)^2 + 0.1", "x").unwrap();
        let x: f64 = 0.7;
        assert!((s.value(x) - (0.3 / x.cosh().powi(2) + 0.1)).abs() < 1e-15);
        assert!(Shape::expression("1 + ", "x").is_err());
        assert!(Shape::expression("y + 1", "x").is_err());
    }

    #[test]
    fn pt_extremum_is_zero_at_origin() {
        let s = Shape::PoschlTeller {
            v0: 1.3,
            mu: 0.4,
            width: 2.0,
        };
        assert!(s.value(0.0).abs() < 1e-15);
    }
}

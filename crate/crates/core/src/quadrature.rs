#![allow(clippy::excessive_precision)]

//! Adaptive Gauss-Kronrod (7/15) quadrature for complex-valued integrands on
//! a real interval.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::Neumaier;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-12, max_subdivisions: 2000 }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol >= 1e-14 && self.abs_tol >= 1e-14) {
            return Err(Error::Config(format!(
                "quadrature tolerances must be >= 1e-14 (rel {:e}, abs {:e})",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Config("max_subdivisions must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: Complex64,
    pub error_estimate: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

fn gauss_kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * w;
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    Segment { a, b, value, error }
}

/// Integrates `f` over `[points[0], points.last()]`, seeding the subdivision
/// at every listed point. The interval with the largest error estimate is
/// bisected until the total estimate meets `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<F>(f: F, points: &[f64], config: &QuadratureConfig) -> Result<Quadrature>
where
    F: Fn(f64) -> Complex64,
{
    config.validate()?;
    if points.len() < 2 || points.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config("quadrature breakpoints must be strictly increasing".into()));
    }
    let mut segments: Vec<Segment> = points.windows(2).map(|w| gauss_kronrod(&f, w[0], w[1])).collect();
    let mut subdivisions = 0;
    loop {
        let total: Complex64 = segments.iter().map(|s| s.value).sum();
        let err: f64 = segments.iter().map(|s| s.error).sum();
        if !total.is_finite() {
            return Err(Error::Domain("integrand is not finite on the interval".into()));
        }
        if err <= config.abs_tol.max(config.rel_tol * total.norm()) {
            break;
        }
        if subdivisions >= config.max_subdivisions {
            return Err(Error::Resource { what: "adaptive quadrature".into(), achieved: err });
        }
        // largest error first, earliest segment on ties
        let (worst, _) = segments.iter().enumerate().fold((0, f64::NEG_INFINITY), |best, (i, s)| {
            if s.error > best.1 {
                (i, s.error)
            } else {
                best
            }
        });
        let s = segments[worst];
        let mid = 0.5 * (s.a + s.b);
        if !(mid > s.a && mid < s.b) {
            return Err(Error::Resource { what: "adaptive quadrature (interval underflow)".into(), achieved: err });
        }
        segments[worst] = gauss_kronrod(&f, s.a, mid);
        segments.push(gauss_kronrod(&f, mid, s.b));
        subdivisions += 1;
    }
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut acc = Neumaier::new();
    let mut err = 0.0;
    for s in &segments {
        acc.add(s.value);
        err += s.error;
    }
    Ok(Quadrature { value: acc.sum(), error_estimate: err, subdivisions })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x| Complex64::new(x.powi(5), 2.0 * x), &[0.0, 2.0], &QuadratureConfig::default()).unwrap();
        assert!((q.value - Complex64::new(64.0 / 6.0, 4.0)).norm() < 1e-13);
        assert_eq!(q.subdivisions, 0);
    }

    #[test]
    fn sqrt_endpoint() {
        // int_0^1 sqrt(1 - x^2) dx = pi / 4
        let q = integrate(
            |x| Complex64::new((1.0 - x * x).max(0.0).sqrt(), 0.0),
            &[0.0, 1.0],
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!((q.value.re - std::f64::consts::FRAC_PI_4).abs() < 1e-10);
        assert!((q.value.re - std::f64::consts::FRAC_PI_4).abs() <= q.error_estimate);
    }

    #[test]
    fn complex_oscillatory() {
        // int_0^1 exp(10 i x) dx = (exp(10 i) - 1) / (10 i)
        let q = integrate(|x| Complex64::new(0.0, 10.0 * x).exp(), &[0.0, 1.0], &QuadratureConfig::default()).unwrap();
        let expect = (Complex64::new(0.0, 10.0).exp() - 1.0) / Complex64::new(0.0, 10.0);
        assert!((q.value - expect).norm() < 1e-12);
    }

    #[test]
    fn budget_exhaustion_is_a_resource_error() {
        let cfg = QuadratureConfig { max_subdivisions: 3, ..QuadratureConfig::default() };
        let r = integrate(|x| Complex64::new(x.abs().sqrt().recip().min(1e8), 0.0), &[0.0, 1.0], &cfg);
        assert!(matches!(r, Err(Error::Resource { .. })));
    }

    #[test]
    fn rejects_bad_setup() {
        let cfg = QuadratureConfig { rel_tol: 1e-16, ..QuadratureConfig::default() };
        assert!(integrate(|_| Complex64::new(1.0, 0.0), &[0.0, 1.0], &cfg).is_err());
        assert!(integrate(|_| Complex64::new(1.0, 0.0), &[1.0, 1.0], &QuadratureConfig::default()).is_err());
    }
}

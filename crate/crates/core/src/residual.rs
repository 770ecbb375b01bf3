//! The residual function `E(K, tau) = G2(K, tau) - G2(tau)`.
//!
//! It is computed from the lattice (shape summation minus the reference
//! value), from the integral transform
//! `E(K, tau) = 4 int_0^A h(x) / (tau^2 x^2 - h(x)^2) dx`,
//! and, for the rectangle, disk and diamond, in closed form.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eisenstein::{g2_ref, g2_shape, roundoff};
use crate::error::{Error, Result};
use crate::lattice::SumConfig;
use crate::quadrature::{integrate, QuadratureConfig};
use crate::shapes::ShapeSpec;
use crate::tau::TauPoint;
use crate::Defect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualMethod {
    Lattice,
    Integral,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualValue {
    pub value: Complex64,
    pub method: ResidualMethod,
    pub error_estimate: f64,
}

/// `h(x) / (tau^2 x^2 - h(x)^2)`. The denominator only vanishes when
/// `tau^2` is a nonnegative real, which cannot happen in the upper half-plane.
pub fn residual_integrand(shape: &ShapeSpec, tau: TauPoint) -> impl Fn(f64) -> Complex64 + '_ {
    let t2 = tau.value() * tau.value();
    move |x| {
        let h = shape.height(x);
        Complex64::new(h, 0.0) / (t2 * (x * x) - h * h)
    }
}

/// Integral form of the residual, by adaptive quadrature seeded at the
/// profile breakpoints.
pub fn residual_integral(shape: &ShapeSpec, tau: TauPoint, q: &QuadratureConfig) -> Result<ResidualValue> {
    shape.ensure_valid()?;
    let quad = integrate(residual_integrand(shape, tau), &shape.breakpoints(), q)?;
    Ok(ResidualValue {
        value: 4.0 * quad.value,
        method: ResidualMethod::Integral,
        error_estimate: 4.0 * quad.error_estimate,
    })
}

/// Closed forms for the builtin shapes, principal branch throughout:
///
/// * rectangle: `-(2/tau) [log(1 + c tau) - log(1 - c tau)]`
/// * disk: `-2 pi i / (tau + i)`
/// * diamond: `(4 log(-i tau) + 2 pi i tau) / (1 - tau^2)`
pub fn residual_closed_form(shape: &ShapeSpec, tau: TauPoint) -> Result<ResidualValue> {
    let t = tau.value();
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    let value = match shape {
        ShapeSpec::Rectangle { c } => {
            shape.ensure_valid()?;
            -2.0 / t * ((one + *c * t).ln() - (one - *c * t).ln())
        }
        ShapeSpec::Disk => -2.0 * PI * i / (t + i),
        ShapeSpec::Diamond => (4.0 * (-i * t).ln() + 2.0 * PI * i * t) / (one - t * t),
        ShapeSpec::Custom { .. } => return Err(Error::Unsupported("no closed form for custom shapes".into())),
    };
    // exact up to a few roundings of the elementary functions
    let error_estimate = (8.0 * f64::EPSILON * value.norm()).min(1e-14);
    Ok(ResidualValue { value, method: ResidualMethod::ClosedForm, error_estimate })
}

/// Lattice form `G2(K, tau) - G2(tau)`.
pub fn residual_lattice(shape: &ShapeSpec, tau: TauPoint, config: &SumConfig, tol: f64) -> Result<ResidualValue> {
    let shaped = g2_shape(shape, tau, config)?;
    let reference = g2_ref(tau, tol)?;
    Ok(ResidualValue {
        value: shaped.value - reference.value,
        method: ResidualMethod::Lattice,
        error_estimate: shaped.error_estimate + reference.error_estimate,
    })
}

/// `E(K^T, tau) - [tau^-2 E(K, -1/tau) - 2 pi i / tau]`, which vanishes
/// identically.
pub fn residual_functional_defect(shape: &ShapeSpec, tau: TauPoint, q: &QuadratureConfig) -> Result<Defect> {
    let transposed = shape.transpose()?;
    let inv = tau.inversion()?;
    let t = tau.value();
    let lhs = residual_integral(&transposed, tau, q)?;
    let rhs = residual_integral(shape, inv, q)?;
    let tinv2 = (t * t).inv();
    let value = lhs.value - (tinv2 * rhs.value - Complex64::new(0.0, 2.0 * PI) / t);
    let error_bound = lhs.error_estimate
        + tinv2.norm() * rhs.error_estimate
        + roundoff(lhs.value.norm() + tinv2.norm() * rhs.value.norm());
    Ok(Defect { value, error_bound })
}

/// `E(s K, tau) - E(K, tau)`; the residual only depends on the dilation class.
pub fn residual_scaling_defect(shape: &ShapeSpec, scale: f64, tau: TauPoint, q: &QuadratureConfig) -> Result<Defect> {
    if !(1e-3..=1e3).contains(&scale) {
        return Err(Error::Config(format!("scale {scale} outside [1e-3, 1e3]")));
    }
    let scaled = shape.scaled(scale)?;
    let a = residual_integral(&scaled, tau, q)?;
    let b = residual_integral(shape, tau, q)?;
    let value = a.value - b.value;
    Ok(Defect { value, error_bound: a.error_estimate + b.error_estimate + roundoff(a.value.norm()) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tau(re: f64, im: f64) -> TauPoint {
        TauPoint::from_parts(re, im).unwrap()
    }

    fn q() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn rectangle_half_at_i() {
        // tau = i turns the integrand into -1/(1 + x^2): E = -4 atan(c)
        let expect = -4.0 * 0.5f64.atan();
        let r = ShapeSpec::Rectangle { c: 0.5 };
        let cf = residual_closed_form(&r, TauPoint::i()).unwrap().value;
        let int = residual_integral(&r, TauPoint::i(), &q()).unwrap().value;
        assert!((cf.re - expect).abs() < 1e-14 && cf.im.abs() < 1e-14);
        assert!((int - cf).norm() < 1e-10);
        assert!((expect + 1.8545904).abs() < 1e-7);
    }

    #[test]
    fn self_transpose_shapes_give_minus_pi_at_i() {
        for s in [ShapeSpec::Disk, ShapeSpec::Diamond, ShapeSpec::Rectangle { c: 1.0 }] {
            let v = residual_integral(&s, TauPoint::i(), &q()).unwrap();
            assert!((v.value + PI).norm() < 1e-8, "{s}: {}", v.value);
        }
    }

    #[test]
    fn closed_form_examples() {
        let v = residual_closed_form(&ShapeSpec::Rectangle { c: 1e-6 }, TauPoint::i()).unwrap();
        assert!(v.value.norm() <= 5e-6);
        let v = residual_closed_form(&ShapeSpec::Rectangle { c: 1e6 }, TauPoint::i()).unwrap();
        assert!((v.value + 2.0 * PI).norm() <= 1e-5);
        let v = residual_closed_form(&ShapeSpec::Disk, tau(0.0, 2.0)).unwrap();
        assert!((v.value + Complex64::new(2.0 * PI / 3.0, 0.0)).norm() < 1e-15);
        let v = residual_closed_form(&ShapeSpec::Diamond, tau(0.0, 2.0)).unwrap();
        assert!((v.value.re - (4.0 * 2f64.ln() - 4.0 * PI) / 5.0).abs() < 1e-14);
        let custom = ShapeSpec::custom(vec![[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(matches!(residual_closed_form(&custom, TauPoint::i()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn closed_form_error_is_tiny() {
        let v = residual_closed_form(&ShapeSpec::Disk, TauPoint::i()).unwrap();
        assert!(v.error_estimate <= 1e-14);
    }

    #[test]
    fn integral_matches_closed_forms_on_grid() {
        let shapes = [
            ShapeSpec::Rectangle { c: 0.25 },
            ShapeSpec::Rectangle { c: 1.0 },
            ShapeSpec::Rectangle { c: 4.0 },
            ShapeSpec::Disk,
            ShapeSpec::Diamond,
        ];
        for s in &shapes {
            for re in [-0.5, 0.0, 0.3, 0.5] {
                for im in [0.8, 1.0, 2.0] {
                    let t = tau(re, im);
                    let a = residual_integral(s, t, &q()).unwrap().value;
                    let b = residual_closed_form(s, t).unwrap().value;
                    assert!((a - b).norm() <= 1e-8, "{s} at {t}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn functional_equation_examples() {
        let cases = [
            (ShapeSpec::Disk, tau(0.4, 1.1)),
            (ShapeSpec::Rectangle { c: 2.0 }, TauPoint::i()),
            (ShapeSpec::Diamond, TauPoint::i()),
        ];
        for (s, t) in cases {
            let d = residual_functional_defect(&s, t, &q()).unwrap();
            assert!(d.value.norm() <= 1e-8, "{s}: {}", d.value);
            assert!(d.value.norm() <= d.error_bound, "{s}: {} > {}", d.value.norm(), d.error_bound);
        }
    }

    #[test]
    fn functional_equation_custom_shape() {
        let s = ShapeSpec::custom(vec![[0.0, 1.5], [0.4, 1.4], [1.0, 1.0], [1.6, 0.3], [1.7, 0.0]]).unwrap();
        let d = residual_functional_defect(&s, tau(0.2, 0.9), &q()).unwrap();
        assert!(d.value.norm() <= 1e-8, "{}", d.value);
    }

    #[test]
    fn scaling_examples() {
        let diamond = ShapeSpec::Custom { profile: ShapeSpec::Diamond.as_profile().unwrap() };
        let d = residual_scaling_defect(&diamond, 3.0, TauPoint::i(), &q()).unwrap();
        assert!(d.value.norm() <= 1e-9);
        let rect = ShapeSpec::Custom { profile: ShapeSpec::Rectangle { c: 1.0 }.as_profile().unwrap() };
        let d = residual_scaling_defect(&rect, 0.5, tau(0.0, 2.0), &q()).unwrap();
        assert!(d.value.norm() <= 1e-9);
        for s in [ShapeSpec::Disk, ShapeSpec::Diamond, rect] {
            let d = residual_scaling_defect(&s, 1.0, tau(0.3, 1.2), &q()).unwrap();
            assert_eq!(d.value, Complex64::new(0.0, 0.0));
        }
        assert!(residual_scaling_defect(&ShapeSpec::Diamond, 1e4, TauPoint::i(), &q()).is_err());
    }

    #[test]
    fn rectangle_residual_grows_with_aspect() {
        let mut prev = 0.0;
        for k in -8..=8 {
            let c = 10f64.powf(k as f64 / 2.0);
            let v = residual_closed_form(&ShapeSpec::Rectangle { c }, TauPoint::i()).unwrap().value.norm();
            assert!(v > prev);
            prev = v;
        }
        let small = residual_closed_form(&ShapeSpec::Rectangle { c: 1e-4 }, TauPoint::i()).unwrap();
        let big = residual_closed_form(&ShapeSpec::Rectangle { c: 1e4 }, TauPoint::i()).unwrap();
        assert!(small.value.norm() < 1e-3);
        assert!((big.value.norm() - 2.0 * PI).abs() < 1e-3);
    }

    #[test]
    fn lattice_matches_for_disk() {
        let v = residual_lattice(&ShapeSpec::Disk, TauPoint::i(), &SumConfig::default(), 1e-14).unwrap();
        assert!((v.value + PI).norm() < 5e-3);
        assert_eq!(v.method, ResidualMethod::Lattice);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn conjugation_symmetry(re in -1.0f64..1.0, im in 0.3f64..2.5, k in 0usize..3) {
            let s = [ShapeSpec::Disk, ShapeSpec::Diamond, ShapeSpec::Rectangle { c: 0.7 }][k].clone();
            let t = tau(re, im);
            let a = residual_integral(&s, t, &q()).unwrap().value;
            let b = residual_integral(&s, t.reflect(), &q()).unwrap().value;
            prop_assert!((b - a.conj()).norm() <= 1e-10);
        }
    }
}

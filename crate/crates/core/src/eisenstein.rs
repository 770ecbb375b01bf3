//! The weight-2 Eisenstein series `G2(tau) = sum_m [ sum_n 1/(m tau + n)^2 ]`.
//!
//! Three independent evaluations are provided: the classical column closed
//! form (fast reference), the absolutely convergent rewriting with
//! telescoping terms subtracted, and shape summation over a dilated shape.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::column::{csc2_column, csc2_column_bound};
use crate::error::{Error, Result};
use crate::lattice::{shape_sum_limit, EisensteinTerm, SumConfig};
use crate::shapes::ShapeSpec;
use crate::sum::Neumaier;
use crate::tau::TauPoint;
use crate::Defect;

/// `sum_{n != 0} 1/n^2 = 2 zeta(2)`.
pub const ZETA2_TWICE: f64 = PI * PI / 3.0;

/// Term budget for [`g2_abs_series`].
pub const ABS_SERIES_BUDGET: u64 = 1_000_000_000;

/// Iteration cap for the geometric column series.
const MAX_COLUMNS: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EisensteinMethod {
    Reference,
    AbsSeries,
    Shape,
    ReversedOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EisensteinValue {
    pub value: Complex64,
    pub method: EisensteinMethod,
    pub error_estimate: f64,
}

/// Reference value `pi^2/3 + 2 pi^2 sum_{m>=1} 1/sin^2(pi m tau)`.
///
/// Terms decay like `exp(-2 pi m Im tau)`; the series stops once three
/// consecutive term bounds fall below `tol / 10`.
pub fn g2_ref(tau: TauPoint, tol: f64) -> Result<EisensteinValue> {
    if !(tol >= 1e-14) {
        return Err(Error::Config(format!("tolerance {tol:e} below 1e-14")));
    }
    let t = tau.value();
    let mut acc = Neumaier::new();
    acc.add(Complex64::new(ZETA2_TWICE, 0.0));
    let mut small = 0;
    let mut m = 1u64;
    loop {
        if m > MAX_COLUMNS {
            return Err(Error::Resource {
                what: "g2_ref column series".into(),
                achieved: 2.0 * csc2_column_bound(m as f64 * tau.im()),
            });
        }
        acc.add(2.0 * csc2_column(t * m as f64));
        if 2.0 * csc2_column_bound(m as f64 * tau.im()) < tol / 10.0 {
            small += 1;
            if small == 3 {
                break;
            }
        } else {
            small = 0;
        }
        m += 1;
    }
    let r = (-2.0 * PI * tau.im()).exp();
    // first omitted term, times the geometric tail factor
    let error_estimate = 2.0 * csc2_column_bound((m + 1) as f64 * tau.im()) / (1.0 - r);
    Ok(EisensteinValue { value: acc.sum(), method: EisensteinMethod::Reference, error_estimate })
}

/// One summand `1/((m tau + n)^2 (m tau + n + 1))` of the absolutely
/// convergent rewriting.
pub fn abs_series_term(tau: Complex64, m: i64, n: i64) -> Complex64 {
    let w = Complex64::new(m as f64 * tau.re + n as f64, m as f64 * tau.im);
    (w * w * (w + 1.0)).inv()
}

/// `G2(tau) = pi^2/3 + sum_{m != 0} sum_n 1/((m tau + n)^2 (m tau + n + 1))`.
///
/// The outer sum stops at `|m| <= M`, where the omitted columns are bounded
/// by their exact values `|pi^2 / sin^2(pi m tau)|`; each retained column is
/// truncated at `|n| <= N_m` with the cubic tail bound `1 / (N_m - |m Re tau| - 1)^2`.
pub fn g2_abs_series(tau: TauPoint, tol: f64) -> Result<EisensteinValue> {
    if !(tol >= 1e-10) {
        return Err(Error::Config(format!("tolerance {tol:e} below 1e-10")));
    }
    let y = tau.im();
    let r = (-2.0 * PI * y).exp();
    let outer_tail = |m_max: u64| 2.0 * csc2_column_bound((m_max + 1) as f64 * y) / (1.0 - r);
    let mut m_max = 1u64;
    while outer_tail(m_max) > tol / 2.0 {
        m_max += 1;
        if m_max > MAX_COLUMNS {
            return Err(Error::Resource { what: "g2_abs_series outer truncation".into(), achieved: outer_tail(m_max) });
        }
    }
    let per_column = tol / (4.0 * m_max as f64);
    let t = tau.value();
    let mut acc = Neumaier::new();
    acc.add(Complex64::new(ZETA2_TWICE, 0.0));
    let mut bound = outer_tail(m_max);
    let mut spent = 0u64;
    for mm in 1..=m_max as i64 {
        for m in [mm, -mm] {
            let shift = (m as f64 * t.re).abs();
            let cutoff = (shift + 1.0 + per_column.powf(-0.5)).ceil() as i64;
            spent += 2 * cutoff as u64 + 1;
            if spent > ABS_SERIES_BUDGET {
                return Err(Error::Resource { what: "g2_abs_series term budget".into(), achieved: f64::INFINITY });
            }
            let mut col = Neumaier::new();
            for n in -cutoff..=cutoff {
                col.add(abs_series_term(t, m, n));
            }
            acc.add(col.sum());
            let t0 = cutoff as f64 - shift - 1.0;
            bound += 1.0 / (t0 * t0);
        }
    }
    Ok(EisensteinValue { value: acc.sum(), method: EisensteinMethod::AbsSeries, error_estimate: bound })
}

/// Shape summation `G2(K, tau)` with `a(0,0) = 0`.
pub fn g2_shape(shape: &ShapeSpec, tau: TauPoint, config: &SumConfig) -> Result<EisensteinValue> {
    if config.exclude_m_zero {
        return Err(Error::Config("G2 shape summation keeps the m = 0 column".into()));
    }
    let config = SumConfig { zero_origin: true, ..config.clone() };
    let r = shape_sum_limit(shape, &EisensteinTerm::new(tau), &config)?;
    Ok(EisensteinValue { value: r.value, method: EisensteinMethod::Shape, error_estimate: r.error_estimate })
}

/// `tau^-2 G2(-1/tau) - G2(tau) + 2 pi i / tau`, which vanishes identically.
pub fn g2_quasimodularity_defect(tau: TauPoint, tol: f64) -> Result<Defect> {
    let inv = tau.inversion()?;
    let t = tau.value();
    let a = g2_ref(inv, tol)?;
    let b = g2_ref(tau, tol)?;
    let tinv2 = (t * t).inv();
    let value = tinv2 * a.value - b.value + Complex64::new(0.0, 2.0 * PI) / t;
    let error_bound =
        tinv2.norm() * a.error_estimate + b.error_estimate + roundoff(a.value.norm() * tinv2.norm() + b.value.norm());
    Ok(Defect { value, error_bound })
}

/// Relative roundoff allowance for comparing two computed quantities.
pub(crate) fn roundoff(scale: f64) -> f64 {
    1e-13 * scale.max(1.0)
}

/// The reversed-order sum `sum_n [ sum_m 1/(n + m tau)^2 ]`, columns in closed
/// form `pi^2 / (tau^2 sin^2(pi n / tau))`, over `|n| <= N` and `|n| <= 2N`
/// followed by one Richardson step in `1/N`. Converges to `G2(tau) - 2 pi i / tau`.
pub fn g2_reversed_order(tau: TauPoint, n_max: u64) -> Result<EisensteinValue> {
    if n_max < 10 {
        return Err(Error::Config(format!("N = {n_max} must be at least 10")));
    }
    let t = tau.value();
    let tinv = t.inv();
    let tinv2 = tinv * tinv;
    let partial = |n_top: u64| -> Complex64 {
        let mut acc = Neumaier::new();
        acc.add(ZETA2_TWICE * tinv2);
        for n in 1..=n_top {
            // the n and -n columns coincide
            acc.add(2.0 * tinv2 * csc2_column(tinv * n as f64));
        }
        acc.sum()
    };
    let s1 = partial(n_max);
    let s2 = partial(2 * n_max);
    let value = 2.0 * s2 - s1;
    Ok(EisensteinValue { value, method: EisensteinMethod::ReversedOrder, error_estimate: (value - s2).norm() })
}

//! The Weierstrass p-function for the lattice `Z tau + Z` and its shape
//! summation.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::column::{csc2_column, csc2_column_bound};
use crate::eisenstein::{g2_ref, roundoff, ZETA2_TWICE};
use crate::error::{Error, Result};
use crate::lattice::{shape_sum_limit, SumConfig, SumResult, WeierstrassTerm};
use crate::quadrature::QuadratureConfig;
use crate::residual::residual_integral;
use crate::shapes::ShapeSpec;
use crate::sum::Neumaier;
use crate::tau::TauPoint;
use crate::Defect;

/// Minimum distance from a lattice point after reduction.
pub const POLE_GUARD: f64 = 1e-9;

/// Maps `z` to `z - m tau - n` with `m = round(Im z / Im tau)` and
/// `n = round(Re(z - m tau))`, both rounding half to even.
pub fn reduce_to_fundamental(z: Complex64, tau: TauPoint) -> Complex64 {
    let t = tau.value();
    let m = (z.im / t.im).round_ties_even();
    let z1 = z - t * m;
    let n = z1.re.round_ties_even();
    Complex64::new(z1.re - n, z1.im)
}

/// A point off the period lattice `Z tau + Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticePointZ {
    pub z: Complex64,
    pub tau: TauPoint,
}

impl LatticePointZ {
    pub fn new(z: Complex64, tau: TauPoint) -> Result<Self> {
        if !z.is_finite() {
            return Err(Error::Domain(format!("z = {z} is not finite")));
        }
        let r = reduce_to_fundamental(z, tau);
        let t = tau.value();
        let mut nearest = f64::INFINITY;
        for m in -1..=1 {
            for n in -1..=1 {
                let p = t * m as f64 + n as f64;
                nearest = nearest.min((r - p).norm());
            }
        }
        if nearest < POLE_GUARD {
            return Err(Error::Domain(format!("z = {z} lies within {nearest:e} of a lattice point (pole)")));
        }
        Ok(Self { z, tau })
    }

    pub fn reduced(&self) -> Complex64 {
        reduce_to_fundamental(self.z, self.tau)
    }
}

/// `p(z)` by the column closed form
/// `pi^2/sin^2(pi z) - pi^2/3 + sum_{m != 0} [pi^2/sin^2(pi(z + m tau)) - pi^2/sin^2(pi m tau)]`
/// after reducing `z`, truncated once three consecutive column pairs are
/// bounded by `tol / 10`.
pub fn wp_ref(z: Complex64, tau: TauPoint, tol: f64) -> Result<Complex64> {
    if !(tol >= 1e-14) {
        return Err(Error::Config(format!("tolerance {tol:e} below 1e-14")));
    }
    let p = LatticePointZ::new(z, tau)?;
    let zr = p.reduced();
    let t = tau.value();
    let y = tau.im();
    let mut acc = Neumaier::new();
    acc.add(csc2_column(zr));
    acc.add(Complex64::new(-ZETA2_TWICE, 0.0));
    let mut small = 0;
    let mut m = 1u64;
    while small < 3 {
        let mt = t * m as f64;
        acc.add(csc2_column(zr + mt) + csc2_column(zr - mt) - 2.0 * csc2_column(mt));
        let bound = 2.0 * csc2_column_bound(m as f64 * y - zr.im.abs()) + 2.0 * csc2_column_bound(m as f64 * y);
        if bound < tol / 10.0 {
            small += 1;
        } else {
            small = 0;
        }
        m += 1;
        if m > 100_000_000 {
            return Err(Error::Resource { what: "wp_ref column series".into(), achieved: bound });
        }
    }
    Ok(acc.sum())
}

/// Brute-force `1/z^2 + sum' [1/(z + n + m tau)^2 - 1/(n + m tau)^2]` over the
/// square `|m|, |n| <= R`, m outer and n inner, ascending.
pub fn wp_abs_direct(z: Complex64, tau: TauPoint, radius: u64) -> Result<Complex64> {
    if radius < 10 {
        return Err(Error::Config(format!("R = {radius} must be at least 10")));
    }
    LatticePointZ::new(z, tau)?;
    let t = tau.value();
    let r = radius as i64;
    let mut acc = Neumaier::new();
    acc.add((z * z).inv());
    for m in -r..=r {
        for n in -r..=r {
            if m == 0 && n == 0 {
                continue;
            }
            let w = Complex64::new(m as f64 * t.re + n as f64, m as f64 * t.im);
            let zw = z + w;
            acc.add((zw * zw).inv() - (w * w).inv());
        }
    }
    Ok(acc.sum())
}

/// Shape summation `p(K, z) = sum_K 1/(z + n + m tau)^2`. No term is
/// excluded, so the configuration must not zero the origin.
pub fn wp_shape(shape: &ShapeSpec, z: Complex64, tau: TauPoint, config: &SumConfig) -> Result<SumResult> {
    if config.zero_origin || config.exclude_m_zero {
        return Err(Error::Config(
            "p-function shape summation includes every lattice point; set zero_origin = false".into(),
        ));
    }
    LatticePointZ::new(z, tau)?;
    shape_sum_limit(shape, &WeierstrassTerm::new(z, tau), config)
}

/// Tolerance used for the reference values inside the defect checks.
const REF_TOL: f64 = 1e-13;

/// `p(K, z) - p(z) - G2(tau) - E(K, tau)`, which vanishes identically.
pub fn wp_prop3_defect(
    shape: &ShapeSpec,
    z: Complex64,
    tau: TauPoint,
    config: &SumConfig,
    q: &QuadratureConfig,
) -> Result<Defect> {
    let shaped = wp_shape(shape, z, tau, config)?;
    let wp = wp_ref(z, tau, REF_TOL)?;
    let g2 = g2_ref(tau, REF_TOL)?;
    let e = residual_integral(shape, tau, q)?;
    let value = shaped.value - wp - g2.value - e.value;
    let error_bound = shaped.error_estimate + REF_TOL + g2.error_estimate + e.error_estimate;
    Ok(Defect { value, error_bound })
}

/// The two iterated sums of `1/(z + n + m tau)^2`, each with columns in closed
/// form and one Richardson step over `N -> 2N`:
/// `(sum_m [sum_n ...], sum_n [sum_m ...])`.
pub fn iterated_sums(z: Complex64, tau: TauPoint, n_max: u64) -> Result<(Complex64, Complex64)> {
    if n_max < 100 {
        return Err(Error::Config(format!("N = {n_max} must be at least 100")));
    }
    LatticePointZ::new(z, tau)?;
    let t = tau.value();
    let tinv = t.inv();
    let m_first = |top: i64| -> Complex64 {
        let mut acc = Neumaier::new();
        acc.add(csc2_column(z));
        for m in 1..=top {
            let mt = t * m as f64;
            acc.add(csc2_column(z + mt) + csc2_column(z - mt));
        }
        acc.sum()
    };
    let n_first = |top: i64| -> Complex64 {
        let mut acc = Neumaier::new();
        acc.add(csc2_column(z * tinv));
        for n in 1..=top {
            let nf = n as f64;
            acc.add(csc2_column((z + nf) * tinv) + csc2_column((z - nf) * tinv));
        }
        acc.sum() * tinv * tinv
    };
    let n = n_max as i64;
    let s_mn = 2.0 * m_first(2 * n) - m_first(n);
    let s_nm = 2.0 * n_first(2 * n) - n_first(n);
    Ok((s_mn, s_nm))
}

/// `sum_m [sum_n ...] - sum_n [sum_m ...] - 2 pi i / tau`, which vanishes.
pub fn wp_iterated_defect(z: Complex64, tau: TauPoint, n_max: u64) -> Result<Defect> {
    let (s_mn, s_nm) = iterated_sums(z, tau, n_max)?;
    let value = s_mn - s_nm - Complex64::new(0.0, 2.0 * PI) / tau.value();
    Ok(Defect { value, error_bound: roundoff(s_mn.norm() + s_nm.norm()) })
}

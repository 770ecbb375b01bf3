//! Shape summation over the integer points of `lambda * K`.
//!
//! Points are visited column by column. Each column `m` is summed with a
//! correctly rounded accumulator, n ascending, and the column sums are then
//! combined in the fixed order `m = 0, 1, -1, 2, -2, ...`. Because every
//! column is an independent unit, the parallel and sequential paths return
//! bit-identical results.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shapes::ShapeSpec;
use crate::sum::ExactSum;
use crate::tau::TauPoint;

/// A summand family `a(m, n)`. Implementations must be pure.
pub trait LatticeTerm: Sync {
    fn eval(&self, m: i64, n: i64) -> Complex64;

    /// True when `eval(-m, -n)` equals `eval(m, n)` bit for bit. The sum
    /// then evaluates column `m` once and reuses it for `-m`.
    fn is_even(&self) -> bool {
        false
    }
}

impl<F> LatticeTerm for F
where
    F: Fn(i64, i64) -> Complex64 + Sync,
{
    fn eval(&self, m: i64, n: i64) -> Complex64 {
        self(m, n)
    }
}

#[inline]
fn lattice_point(tau: Complex64, m: i64, n: i64) -> Complex64 {
    Complex64::new(m as f64 * tau.re + n as f64, m as f64 * tau.im)
}

/// `1 / (m tau + n)^2`.
#[derive(Debug, Clone, Copy)]
pub struct EisensteinTerm {
    pub tau: Complex64,
}

impl EisensteinTerm {
    pub fn new(tau: TauPoint) -> Self {
        Self { tau: tau.value() }
    }
}

impl LatticeTerm for EisensteinTerm {
    #[inline]
    fn eval(&self, m: i64, n: i64) -> Complex64 {
        let w = lattice_point(self.tau, m, n);
        (w * w).inv()
    }

    fn is_even(&self) -> bool {
        true
    }
}

/// `1 / (z + n + m tau)^2`.
#[derive(Debug, Clone, Copy)]
pub struct WeierstrassTerm {
    pub z: Complex64,
    pub tau: Complex64,
}

impl WeierstrassTerm {
    pub fn new(z: Complex64, tau: TauPoint) -> Self {
        Self { z, tau: tau.value() }
    }
}

impl LatticeTerm for WeierstrassTerm {
    #[inline]
    fn eval(&self, m: i64, n: i64) -> Complex64 {
        let w = self.z + lattice_point(self.tau, m, n);
        (w * w).inv()
    }
}

/// `1 / (m tau + n) - 1 / (m tau + n + 1)`, the telescoping family.
#[derive(Debug, Clone, Copy)]
pub struct TelescopeTerm {
    pub tau: Complex64,
}

impl TelescopeTerm {
    pub fn new(tau: TauPoint) -> Self {
        Self { tau: tau.value() }
    }
}

impl LatticeTerm for TelescopeTerm {
    #[inline]
    fn eval(&self, m: i64, n: i64) -> Complex64 {
        let w = lattice_point(self.tau, m, n);
        w.inv() - (w + 1.0).inv()
    }
}

/// Controls a shape summation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumConfig {
    /// Increasing scale factors at which partial sums are taken.
    pub lambda_schedule: Vec<u64>,
    /// Eliminate the `1/lambda` error term from consecutive doubled pairs.
    pub extrapolate: bool,
    /// Force `a(0, 0) = 0`.
    pub zero_origin: bool,
    /// Force the whole `m = 0` column to zero.
    pub exclude_m_zero: bool,
    /// Evaluate columns on the rayon pool. Results do not depend on this.
    #[serde(default = "default_parallel")]
    pub parallel: bool,
}

fn default_parallel() -> bool {
    true
}

pub const DEFAULT_SCHEDULE: [u64; 4] = [250, 500, 1000, 2000];

impl Default for SumConfig {
    fn default() -> Self {
        Self {
            lambda_schedule: DEFAULT_SCHEDULE.to_vec(),
            extrapolate: true,
            zero_origin: true,
            exclude_m_zero: false,
            parallel: true,
        }
    }
}

impl SumConfig {
    pub fn with_schedule(mut self, schedule: impl Into<Vec<u64>>) -> Self {
        self.lambda_schedule = schedule.into();
        self
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.lambda_schedule;
        if s.len() < 2 {
            return Err(Error::Config(format!("lambda schedule needs at least two entries, got {}", s.len())));
        }
        if s[0] == 0 {
            return Err(Error::Config("lambda must be a positive integer".into()));
        }
        for w in s.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Config(format!(
                    "lambda schedule must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
            if self.extrapolate && w[1] != 2 * w[0] {
                return Err(Error::Config(format!(
                    "extrapolation needs successive doublings ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of [`shape_sum_limit`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumResult {
    pub value: Complex64,
    /// `(lambda, partial sum)` for every scale in the schedule.
    pub partials: Vec<(u64, Complex64)>,
    pub error_estimate: f64,
}

impl SumResult {
    /// Empirical convergence orders `log2(|S1 - S0| / |S2 - S1|)` from
    /// consecutive triples of doubled partial sums.
    pub fn observed_orders(&self) -> Vec<f64> {
        self.partials
            .windows(3)
            .map(|w| {
                let d0 = (w[1].1 - w[0].1).norm();
                let d1 = (w[2].1 - w[1].1).norm();
                (d0 / d1).log2()
            })
            .collect()
    }
}

/// Visiting order of columns: `0, 1, -1, 2, -2, ...`.
pub fn column_order(max_column: i64) -> impl Iterator<Item = i64> {
    std::iter::once(0).chain((1..=max_column).flat_map(|m| [m, -m]))
}

fn column_sum<T: LatticeTerm + ?Sized>(
    shape: &ShapeSpec,
    term: &T,
    lambda: u64,
    m: i64,
    config: &SumConfig,
) -> Result<Complex64> {
    if m == 0 && config.exclude_m_zero {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let skip_origin = m == 0 && config.zero_origin;
    let mut acc = ExactSum::new();
    for n in shape.column_range(lambda, m) {
        if skip_origin && n == 0 {
            continue;
        }
        acc.add(term.eval(m, n));
    }
    let s = acc.sum();
    if s.is_finite() {
        return Ok(s);
    }
    // locate the offending point for the error report
    for n in shape.column_range(lambda, m) {
        if skip_origin && n == 0 {
            continue;
        }
        let v = term.eval(m, n);
        if !v.is_finite() {
            return Err(Error::TermEvaluation { m, n, value: v.to_string() });
        }
    }
    Err(Error::TermEvaluation { m, n: 0, value: format!("column sum overflowed to {s}") })
}

/// Sum of `term` over `(lambda K) ∩ Z^2`, honoring the origin and column
/// conventions of `config`.
pub fn shape_partial_sum<T: LatticeTerm + ?Sized>(
    shape: &ShapeSpec,
    term: &T,
    lambda: u64,
    config: &SumConfig,
) -> Result<Complex64> {
    if lambda == 0 {
        return Err(Error::Config("lambda must be a positive integer".into()));
    }
    let max_m = shape.max_column(lambda);
    let pair = |m: i64| -> Result<(Complex64, Complex64)> {
        let pos = column_sum(shape, term, lambda, m, config)?;
        if m == 0 {
            return Ok((pos, Complex64::new(0.0, 0.0)));
        }
        let neg = if term.is_even() { pos } else { column_sum(shape, term, lambda, -m, config)? };
        Ok((pos, neg))
    };
    let columns: Vec<(Complex64, Complex64)> = if config.parallel {
        (0..=max_m).into_par_iter().map(pair).collect::<Result<_>>()?
    } else {
        (0..=max_m).map(pair).collect::<Result<_>>()?
    };
    let mut acc = ExactSum::new();
    for (m, (pos, neg)) in columns.into_iter().enumerate() {
        acc.add(pos);
        if m > 0 {
            acc.add(neg);
        }
    }
    Ok(acc.sum())
}

/// Partial sums along the schedule, followed by one level of Richardson
/// extrapolation `S* = 2 S(2 lambda) - S(lambda)` when enabled.
///
/// The error estimate is the last increment of the extrapolated sequence, or
/// of the raw partial sums when extrapolation is off. With only one
/// extrapolated value it falls back to `|S* - S(lambda_max)|`.
pub fn shape_sum_limit<T: LatticeTerm + ?Sized>(shape: &ShapeSpec, term: &T, config: &SumConfig) -> Result<SumResult> {
    config.validate()?;
    shape.ensure_valid()?;
    let partials = config
        .lambda_schedule
        .iter()
        .map(|&l| shape_partial_sum(shape, term, l, config).map(|s| (l, s)))
        .collect::<Result<Vec<_>>>()?;
    let raw: Vec<Complex64> = partials.iter().map(|p| p.1).collect();
    let last = raw[raw.len() - 1];
    let (value, error_estimate) = if config.extrapolate {
        let ext: Vec<Complex64> = raw.windows(2).map(|w| 2.0 * w[1] - w[0]).collect();
        let v = ext[ext.len() - 1];
        let err = if ext.len() >= 2 { (v - ext[ext.len() - 2]).norm() } else { (v - last).norm() };
        (v, err)
    } else {
        (last, (last - raw[raw.len() - 2]).norm())
    };
    Ok(SumResult { value, partials, error_estimate })
}

/// The telescoping sum at scale `lambda` with the `m = 0` column excluded,
/// in closed column form: column `m` collapses to
/// `1/(m tau - N) - 1/(m tau + N + 1)` with `N = floor(lambda h(m/lambda))`.
pub fn telescope_sum(shape: &ShapeSpec, tau: TauPoint, lambda: u64) -> Result<Complex64> {
    if lambda == 0 {
        return Err(Error::Config("lambda must be a positive integer".into()));
    }
    shape.ensure_valid()?;
    let t = tau.value();
    let mut acc = ExactSum::new();
    for m in column_order(shape.max_column(lambda)).skip(1) {
        let top = *shape.column_range(lambda, m).end();
        let mt = t * m as f64;
        acc.add((mt - top as f64).inv() - (mt + (top + 1) as f64).inv());
    }
    Ok(acc.sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn one(_: i64, _: i64) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn config(zero_origin: bool) -> SumConfig {
        SumConfig { zero_origin, ..SumConfig::default() }
    }

    #[test]
    fn counts_points() {
        let r1 = ShapeSpec::Rectangle { c: 1.0 };
        assert_eq!(shape_partial_sum(&r1, &one, 2, &config(true)).unwrap(), Complex64::new(24.0, 0.0));
        let d = shape_partial_sum(&ShapeSpec::Disk, &one, 1, &config(false)).unwrap();
        assert_eq!(d, Complex64::new(5.0, 0.0));
    }

    #[test]
    fn odd_term_cancels() {
        let odd = |m: i64, _n: i64| Complex64::new(m as f64, 0.0);
        for lambda in [1, 5, 17, 100] {
            let s = shape_partial_sum(&ShapeSpec::Diamond, &odd, lambda, &config(true)).unwrap();
            assert_eq!(s, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn zero_term_has_zero_error() {
        let zero = |_: i64, _: i64| Complex64::new(0.0, 0.0);
        let r = shape_sum_limit(&ShapeSpec::Disk, &zero, &SumConfig::default()).unwrap();
        assert_eq!(r.value, Complex64::new(0.0, 0.0));
        assert_eq!(r.error_estimate, 0.0);
        assert_eq!(r.partials.len(), 4);
    }

    #[test]
    fn schedule_must_double_when_extrapolating() {
        let zero = |_: i64, _: i64| Complex64::new(0.0, 0.0);
        let cfg = SumConfig::default().with_schedule(vec![100, 300]);
        assert!(matches!(shape_sum_limit(&ShapeSpec::Disk, &zero, &cfg), Err(Error::Config(_))));
        let cfg = SumConfig { extrapolate: false, ..cfg };
        assert!(shape_sum_limit(&ShapeSpec::Disk, &zero, &cfg).is_ok());
        let cfg = SumConfig::default().with_schedule(vec![100]);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn singular_term_reports_point() {
        let tau = TauPoint::i();
        let cfg = config(false);
        let err = shape_partial_sum(&ShapeSpec::Disk, &EisensteinTerm::new(tau), 3, &cfg).unwrap_err();
        assert!(matches!(err, Error::TermEvaluation { m: 0, n: 0, .. }), "{err}");
    }

    #[test]
    fn richardson_removes_one_over_lambda() {
        // 1/lambda-weighted count: S(lambda) = count / lambda^2 = area + O(1/lambda)
        // for the rectangle, whose count is exactly (2 lambda + 1)^2 - 1.
        let r = ShapeSpec::Rectangle { c: 1.0 };
        let cfg = SumConfig { parallel: false, ..SumConfig::default() }.with_schedule(vec![8, 16, 32]);
        let partials: Vec<f64> = cfg
            .lambda_schedule
            .iter()
            .map(|&l| shape_partial_sum(&r, &one, l, &cfg).unwrap().re / (l * l) as f64)
            .collect();
        let ext = 2.0 * partials[2] - partials[1];
        assert!((ext - 4.0).abs() < (partials[2] - 4.0).abs() / 10.0);
    }

    #[test]
    fn parallel_matches_sequential_bitwise() {
        let tau = TauPoint::from_parts(0.3, 1.2).unwrap();
        let term = WeierstrassTerm::new(Complex64::new(0.4, 0.2), tau);
        let shape = ShapeSpec::Rectangle { c: 2.0 };
        let par = SumConfig { zero_origin: false, ..SumConfig::default() };
        let seq = SumConfig { parallel: false, ..par.clone() };
        let a = shape_partial_sum(&shape, &term, 300, &par).unwrap();
        let b = shape_partial_sum(&shape, &term, 300, &seq).unwrap();
        assert_eq!((a.re.to_bits(), a.im.to_bits()), (b.re.to_bits(), b.im.to_bits()));
    }

    #[test]
    fn area_growth() {
        for shape in [ShapeSpec::Rectangle { c: 1.0 }, ShapeSpec::Disk, ShapeSpec::Diamond] {
            let cfg = config(false);
            let mut worst: f64 = 0.0;
            for lambda in [250u64, 500, 1000] {
                let count = shape_partial_sum(&shape, &one, lambda, &cfg).unwrap().re;
                let l = lambda as f64;
                worst = worst.max((count / (l * l) - shape.area()).abs() * l);
            }
            assert!(worst < 10.0, "{shape}: C = {worst}");
        }
    }

    #[test]
    fn telescope_small_lambda_is_finite() {
        let tau = TauPoint::from_parts(0.0, 2.0).unwrap();
        for shape in [ShapeSpec::Rectangle { c: 1.0 }, ShapeSpec::Disk, ShapeSpec::Diamond] {
            assert!(telescope_sum(&shape, tau, 1).unwrap().is_finite());
        }
    }

    /// Independent enumeration of the bounding box with integer membership
    /// tests; columns summed separately and combined in the canonical order.
    fn brute_force<T: LatticeTerm>(shape: &ShapeSpec, term: &T, lambda: i64, zero_origin: bool) -> Complex64 {
        let inside = |m: i64, n: i64| match shape {
            ShapeSpec::Disk => m * m + n * n <= lambda * lambda,
            ShapeSpec::Diamond => m.abs() + n.abs() <= lambda,
            ShapeSpec::Rectangle { c } => (m.abs() as f64) <= c * lambda as f64 && n.abs() <= lambda,
            ShapeSpec::Custom { .. } => unreachable!(),
        };
        let bound = 5 * lambda;
        let mut total = ExactSum::new();
        for m in column_order(bound) {
            let mut col = ExactSum::new();
            for n in -bound..=bound {
                if inside(m, n) && !(zero_origin && m == 0 && n == 0) {
                    col.add(term.eval(m, n));
                }
            }
            total.add(col.sum());
        }
        total.sum()
    }

    fn shape_from(k: usize) -> ShapeSpec {
        [ShapeSpec::Disk, ShapeSpec::Diamond, ShapeSpec::Rectangle { c: 1.0 }, ShapeSpec::Rectangle { c: 0.37 }][k]
            .clone()
    }

    proptest! {
        #[test]
        fn paired_columns_equal_brute_force(
            k in 0usize..4, lambda in 1i64..=20, re in -1.0f64..1.0, im in 0.2f64..3.0,
        ) {
            let shape = shape_from(k);
            let tau = TauPoint::from_parts(re, im).unwrap();
            let term = EisensteinTerm::new(tau);
            let fast = shape_partial_sum(&shape, &term, lambda as u64, &config(true)).unwrap();
            let slow = brute_force(&shape, &term, lambda, true);
            prop_assert_eq!((fast.re.to_bits(), fast.im.to_bits()), (slow.re.to_bits(), slow.im.to_bits()));
        }

        #[test]
        fn telescope_closed_form_matches_direct(
            k in 0usize..4, lambda in 1u64..=50, re in -1.0f64..1.0, im in 0.2f64..3.0,
        ) {
            let shape = shape_from(k);
            let tau = TauPoint::from_parts(re, im).unwrap();
            let cfg = SumConfig { exclude_m_zero: true, ..SumConfig::default() };
            let direct = shape_partial_sum(&shape, &TelescopeTerm::new(tau), lambda, &cfg).unwrap();
            let closed = telescope_sum(&shape, tau, lambda).unwrap();
            prop_assert!((direct - closed).norm() <= 1e-12, "{} vs {}", direct, closed);
        }
    }
}

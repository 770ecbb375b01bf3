//! Error-free-transformation summation.
//!
//! Two accumulators are provided. [`ExactSum`] keeps a list of
//! non-overlapping partials (Shewchuk's algorithm) and returns the correctly
//! rounded sum, which makes the result independent of the order in which
//! terms were added. [`Neumaier`] is the cheaper running-compensation
//! variant used where the order is fixed anyway.

use num_complex::Complex64;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// Correctly rounded real summation over a growing list of partials.
#[derive(Debug, Clone, Default)]
pub struct ExactSumReal {
    partials: Vec<f64>,
    special: f64,
}

impl ExactSumReal {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, mut x: f64) {
        if !x.is_finite() {
            // inf/nan poison the result; keep IEEE semantics for them
            self.special += x;
            return;
        }
        let mut j = 0;
        for i in 0..self.partials.len() {
            let mut y = self.partials[i];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[j] = lo;
                j += 1;
            }
            x = hi;
        }
        self.partials.truncate(j);
        self.partials.push(x);
    }

    pub fn sum(&self) -> f64 {
        if self.special != 0.0 || self.special.is_nan() {
            return self.special;
        }
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return 0.0;
        }
        n -= 1;
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            let yr = hi - x;
            lo = y - yr;
            if lo != 0.0 {
                break;
            }
        }
        // half-way case: round using the sign of the next partial
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            let yr = x - hi;
            if y == yr {
                hi = x;
            }
        }
        hi
    }
}

/// Correctly rounded complex summation, componentwise.
#[derive(Debug, Clone, Default)]
pub struct ExactSum {
    re: ExactSumReal,
    im: ExactSumReal,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn sum(&self) -> Complex64 {
        Complex64::new(self.re.sum(), self.im.sum())
    }
}

impl FromIterator<Complex64> for ExactSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = ExactSum::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

/// Neumaier (improved Kahan-Babuska) compensated complex summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: Complex64,
    comp: Complex64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        let (sr, er) = two_sum(self.sum.re, z.re);
        let (si, ei) = two_sum(self.sum.im, z.im);
        self.sum = Complex64::new(sr, si);
        self.comp += Complex64::new(er, ei);
    }

    pub fn sum(&self) -> Complex64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cancellation_is_exact() {
        let mut s = ExactSumReal::new();
        for x in [1e100, 1.0, -1e100, 1e-20] {
            s.add(x);
        }
        assert_eq!(s.sum(), 1.0 + 1e-20);
    }

    #[test]
    fn neumaier_recovers_small_terms() {
        let mut s = Neumaier::new();
        s.add(Complex64::new(1.0, 0.0));
        for _ in 0..10 {
            s.add(Complex64::new(1e-16, 0.0));
        }
        assert_eq!(s.sum().re, 1.0 + 1e-15);
    }

    #[test]
    fn empty_sum_is_zero() {
        assert_eq!(ExactSum::new().sum(), Complex64::new(0.0, 0.0));
    }

    proptest! {
        #[test]
        fn exact_sum_is_order_independent(xs in proptest::collection::vec(-1e6f64..1e6, 0..60)) {
            let fwd: ExactSumReal = {
                let mut s = ExactSumReal::new();
                xs.iter().for_each(|&x| s.add(x));
                s
            };
            let mut rev = ExactSumReal::new();
            xs.iter().rev().for_each(|&x| rev.add(x));
            prop_assert_eq!(fwd.sum().to_bits(), rev.sum().to_bits());
        }
    }
}

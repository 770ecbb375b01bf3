//! Closed forms for a full column `sum_n 1/(w+n)^2 = pi^2 / sin^2(pi w)`.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Nome-like variable `exp(2 pi i w)` taken on the side where it is small.
#[inline]
fn small_nome(w: Complex64) -> Complex64 {
    let w = if w.im >= 0.0 { w } else { -w };
    (Complex64::new(0.0, 2.0 * PI) * w).exp()
}

/// `pi^2 / sin^2(pi w)`, evaluated as `-4 pi^2 q / (1 - q)^2` with `|q| <= 1`
/// so that large `|Im w|` neither overflows nor cancels.
pub fn csc2_column(w: Complex64) -> Complex64 {
    let q = small_nome(w);
    let d = Complex64::new(1.0, 0.0) - q;
    -4.0 * PI * PI * q / (d * d)
}

/// Upper bound for `|csc2_column(w)|` in terms of `|Im w|` alone.
pub fn csc2_column_bound(im: f64) -> f64 {
    let r = (-2.0 * PI * im.abs()).exp();
    4.0 * PI * PI * r / ((1.0 - r) * (1.0 - r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(w: Complex64, n: i64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for k in -n..=n {
            s += (w + k as f64).powi(-2);
        }
        s
    }

    #[test]
    fn matches_truncated_sum() {
        for w in [Complex64::new(0.3, 0.2), Complex64::new(-0.4, -1.1), Complex64::new(0.1, 0.0)] {
            let d = direct(w, 200_000);
            // tail of the symmetric truncation is about 2 / N
            assert!((csc2_column(w) - d).norm() < 2e-5, "w = {w}");
        }
    }

    #[test]
    fn agrees_with_trig_form_near_axis() {
        let w = Complex64::new(0.37, 0.05);
        let s = (w * PI).sin();
        let expect = PI * PI / (s * s);
        assert!((csc2_column(w) - expect).norm() < 1e-12 * expect.norm());
    }

    #[test]
    fn far_from_axis_is_tiny_not_nan() {
        let v = csc2_column(Complex64::new(0.2, 400.0));
        assert!(v.is_finite());
        assert!(v.norm() <= csc2_column_bound(400.0));
    }
}

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible imaginary part for a modular parameter.
pub const MIN_IMAG: f64 = 1e-6;

/// A point of the upper half-plane, kept at least [`MIN_IMAG`] above the
/// real axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Complex64", into = "Complex64")]
pub struct TauPoint(Complex64);

impl TauPoint {
    pub fn new(value: Complex64) -> Result<Self> {
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::Domain(format!("tau = {value} is not finite")));
        }
        if value.im < MIN_IMAG {
            return Err(Error::Domain(format!(
                "tau = {value} is too close to (or below) the real axis; need Im tau >= {MIN_IMAG:e}"
            )));
        }
        Ok(Self(value))
    }

    pub fn from_parts(re: f64, im: f64) -> Result<Self> {
        Self::new(Complex64::new(re, im))
    }

    /// `tau = i`, the fixed point of `tau -> -1/tau`.
    pub fn i() -> Self {
        Self(Complex64::i())
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn re(self) -> f64 {
        self.0.re
    }

    pub fn im(self) -> f64 {
        self.0.im
    }

    /// `-1 / tau`.
    pub fn inversion(self) -> Result<Self> {
        Self::new(-self.0.inv())
    }

    /// `-conj(tau)`, the reflection across the imaginary axis.
    pub fn reflect(self) -> Self {
        Self(Complex64::new(-self.0.re, self.0.im))
    }

    pub fn shifted(self, k: f64) -> Self {
        Self(self.0 + k)
    }
}

impl TryFrom<Complex64> for TauPoint {
    type Error = Error;

    fn try_from(value: Complex64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<TauPoint> for Complex64 {
    fn from(t: TauPoint) -> Self {
        t.0
    }
}

impl fmt::Display for TauPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_complex(self.0, f)
    }
}

impl FromStr for TauPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(parse_complex(s)?)
    }
}

/// Writes `a+bi` / `a-bi`.
pub fn fmt_complex(z: Complex64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if z.im.is_sign_negative() {
        write!(f, "{}-{}i", z.re, -z.im)
    } else {
        write!(f, "{}+{}i", z.re, z.im)
    }
}

/// Parses complex numbers written as `a+bi`, `a-bi`, `a`, or `bi`, with no
/// spaces. Exponents (`1e-3+2i`) are accepted.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || Error::Config(format!("cannot parse complex number '{s}' (expected a+bi)"));
    let s = s.trim();
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not the leading one or part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_cli_forms() {
        assert_eq!(parse_complex("0+1i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("0.3+1.2i").unwrap(), Complex64::new(0.3, 1.2));
        assert_eq!(parse_complex("-0.5+0.8i").unwrap(), Complex64::new(-0.5, 0.8));
        assert_eq!(parse_complex("1-2i").unwrap(), Complex64::new(1.0, -2.0));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("0.25").unwrap(), Complex64::new(0.25, 0.0));
        assert_eq!(parse_complex("1e-3+2e-1i").unwrap(), Complex64::new(1e-3, 0.2));
        assert!(parse_complex("1 + 2i").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn display_round_trips() {
        for z in [Complex64::new(0.3, 1.2), Complex64::new(-0.5, -0.8), Complex64::new(0.1, 0.0)] {
            let s = format!("{}", Fmt(z));
            assert_eq!(parse_complex(&s).unwrap(), z);
        }
    }

    struct Fmt(Complex64);
    impl fmt::Display for Fmt {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            fmt_complex(self.0, f)
        }
    }

    #[test]
    fn guard_rejects_lower_half_plane() {
        assert!(TauPoint::from_parts(0.0, 1e-7).is_err());
        assert!(TauPoint::from_parts(0.0, -1.0).is_err());
        assert!(TauPoint::from_parts(f64::NAN, 1.0).is_err());
        assert!(TauPoint::from_parts(0.0, 1e-6).is_ok());
    }

    #[test]
    fn inversion_of_i_is_i() {
        assert_eq!(TauPoint::i().inversion().unwrap().value(), Complex64::new(-0.0, 1.0));
    }
}

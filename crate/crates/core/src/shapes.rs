//! Convex shapes symmetric about both coordinate axes.
//!
//! A shape is described by its upper boundary `h`, an even function supported
//! on `[-A, A]`. Only the half `x >= 0` is stored; every query reflects its
//! argument first, so evenness holds exactly.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for the midpoint-concavity test on sampled profiles.
pub const CONCAVITY_TOL: f64 = 1e-12;

/// Slack used when flooring `lambda * h(m / lambda)` for sampled profiles, so
/// that lattice points on the boundary are not lost to interpolation roundoff.
const FLOOR_SLACK: f64 = 1e-9;

/// Piecewise-linear half profile: `(x, h)` samples with `x` running from 0 to
/// the support half-width `A`.
///
/// A positive final height is allowed and means the shape ends in a vertical
/// edge at `x = A` (the rectangle is the extreme case).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Profile {
    points: Vec<[f64; 2]>,
}

impl Profile {
    /// Wraps sample points without validating them. See [`ShapeSpec::validate`].
    pub fn new(points: Vec<[f64; 2]>) -> Self {
        Self { points }
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    fn support(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p[0])
    }

    fn height(&self, x: f64) -> f64 {
        let x = x.abs();
        let pts = &self.points;
        if pts.is_empty() || x > self.support() {
            return 0.0;
        }
        // first index with abscissa >= x
        let i = pts.partition_point(|p| p[0] < x);
        if i == 0 {
            return pts[0][1];
        }
        let [x0, h0] = pts[i - 1];
        let [x1, h1] = pts[i];
        if x == x1 {
            return h1;
        }
        let t = (x - x0) / (x1 - x0);
        h0 + t * (h1 - h0)
    }
}

/// A shape in the admissible class: compact, convex, symmetric about both
/// axes, with nonempty interior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeSpec {
    /// `[-c, c] x [-1, 1]`.
    Rectangle { c: f64 },
    /// Unit disk.
    Disk,
    /// Unit diamond `|x| + |y| <= 1`.
    Diamond,
    /// Sampled profile, piecewise linear between samples.
    Custom { profile: Profile },
}

/// One failed invariant reported by [`ShapeSpec::validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    NonPositiveAspect { c: f64 },
    TooFewPoints { len: usize },
    NonFinite { index: usize },
    FirstAbscissaNotZero { x0: f64 },
    AbscissaNotIncreasing { index: usize },
    NegativeHeight { index: usize },
    EmptyInterior { h0: f64 },
    NotNonincreasing { index: usize },
    NotConcave { index: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveAspect { c } => write!(f, "aspect ratio {c} is not positive"),
            Violation::TooFewPoints { len } => write!(f, "profile has {len} points, need at least 2"),
            Violation::NonFinite { index } => write!(f, "non-finite sample at index {index}"),
            Violation::FirstAbscissaNotZero { x0 } => write!(f, "first abscissa is {x0}, must be 0"),
            Violation::AbscissaNotIncreasing { index } => {
                write!(f, "abscissae not strictly increasing at index {index}")
            }
            Violation::NegativeHeight { index } => write!(f, "negative height at index {index}"),
            Violation::EmptyInterior { h0 } => write!(f, "h(0) = {h0}, shape has empty interior"),
            Violation::NotNonincreasing { index } => {
                write!(f, "height increases at index {index} (monotonicity)")
            }
            Violation::NotConcave { index } => write!(f, "height not concave at index {index}"),
        }
    }
}

impl ShapeSpec {
    /// Rectangle with aspect ratio `c`, validated.
    pub fn rectangle(c: f64) -> Result<Self> {
        Self::Rectangle { c }.validated()
    }

    /// Custom sampled profile, validated.
    pub fn custom(points: Vec<[f64; 2]>) -> Result<Self> {
        Self::Custom { profile: Profile::new(points) }.validated()
    }

    /// Parses a profile document: a JSON array of `[x, h]` pairs.
    pub fn from_profile_json(text: &str) -> Result<Self> {
        let points: Vec<[f64; 2]> =
            serde_json::from_str(text).map_err(|e| Error::InvalidShape(format!("profile document: {e}")))?;
        Self::custom(points)
    }

    fn validated(self) -> Result<Self> {
        self.ensure_valid()?;
        Ok(self)
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            let msg: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            Err(Error::InvalidShape(msg.join("; ")))
        }
    }

    /// Lists every violated invariant. An empty list means the shape is valid.
    pub fn validate(&self) -> Vec<Violation> {
        match self {
            ShapeSpec::Rectangle { c } => {
                if c.is_finite() && *c > 0.0 {
                    vec![]
                } else {
                    vec![Violation::NonPositiveAspect { c: *c }]
                }
            }
            ShapeSpec::Disk | ShapeSpec::Diamond => vec![],
            ShapeSpec::Custom { profile } => validate_profile(profile.points()),
        }
    }

    /// Upper boundary `h(x)`, zero outside the support.
    pub fn height(&self, x: f64) -> f64 {
        let x = x.abs();
        match self {
            ShapeSpec::Rectangle { c } => {
                if x <= *c {
                    1.0
                } else {
                    0.0
                }
            }
            ShapeSpec::Disk => {
                if x <= 1.0 {
                    (1.0 - x * x).sqrt()
                } else {
                    0.0
                }
            }
            ShapeSpec::Diamond => {
                if x <= 1.0 {
                    1.0 - x
                } else {
                    0.0
                }
            }
            ShapeSpec::Custom { profile } => profile.height(x),
        }
    }

    /// Support half-width `A`.
    pub fn support(&self) -> f64 {
        match self {
            ShapeSpec::Rectangle { c } => *c,
            ShapeSpec::Disk | ShapeSpec::Diamond => 1.0,
            ShapeSpec::Custom { profile } => profile.support(),
        }
    }

    /// Closed-set membership. Builtin shapes use exact predicates.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (x, y) = (x.abs(), y.abs());
        match self {
            ShapeSpec::Rectangle { c } => x <= *c && y <= 1.0,
            ShapeSpec::Disk => x * x + y * y <= 1.0,
            ShapeSpec::Diamond => x + y <= 1.0,
            ShapeSpec::Custom { profile } => x <= profile.support() && y <= profile.height(x),
        }
    }

    /// Area of the shape.
    pub fn area(&self) -> f64 {
        match self {
            ShapeSpec::Rectangle { c } => 4.0 * c,
            ShapeSpec::Disk => std::f64::consts::PI,
            ShapeSpec::Diamond => 2.0,
            ShapeSpec::Custom { profile } => {
                let half: f64 =
                    profile.points().windows(2).map(|w| 0.5 * (w[1][0] - w[0][0]) * (w[0][1] + w[1][1])).sum();
                4.0 * half
            }
        }
    }

    /// Points in `[0, A]` where `h` is not smooth, including both endpoints.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            ShapeSpec::Custom { profile } => profile.points().iter().map(|p| p[0]).collect(),
            other => vec![0.0, other.support()],
        }
    }

    /// Reflection about the line `y = x`.
    ///
    /// The transposed rectangle `[-1, 1] x [-c, c]` is renormalized to
    /// `Rectangle(1 / c)`; shape summation only sees the dilation class.
    pub fn transpose(&self) -> Result<Self> {
        self.ensure_valid()?;
        match self {
            ShapeSpec::Rectangle { c } => Ok(ShapeSpec::Rectangle { c: 1.0 / c }),
            ShapeSpec::Disk => Ok(ShapeSpec::Disk),
            ShapeSpec::Diamond => Ok(ShapeSpec::Diamond),
            ShapeSpec::Custom { profile } => Ok(ShapeSpec::Custom { profile: transpose_profile(profile.points())? }),
        }
    }

    /// The dilation `s * K`. Rectangle and diamond are re-expressed as exact
    /// sampled profiles; the disk has no exact piecewise-linear rendition.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::Config(format!("scale factor {s} must be positive")));
        }
        if s == 1.0 {
            return Ok(self.clone());
        }
        let points = match self {
            ShapeSpec::Custom { profile } => profile.points().to_vec(),
            ShapeSpec::Disk => return Err(Error::Unsupported("scaling the disk (no sampled rendition)".into())),
            builtin => builtin.as_profile()?.points().to_vec(),
        };
        let points = points.into_iter().map(|[x, h]| [s * x, s * h]).collect();
        ShapeSpec::custom(points)
    }

    /// Sampled rendition of a polygonal builtin shape.
    pub fn as_profile(&self) -> Result<Profile> {
        match self {
            ShapeSpec::Rectangle { c } => Ok(Profile::new(vec![[0.0, 1.0], [*c, 1.0]])),
            ShapeSpec::Diamond => Ok(Profile::new(vec![[0.0, 1.0], [1.0, 0.0]])),
            ShapeSpec::Custom { profile } => Ok(profile.clone()),
            ShapeSpec::Disk => Err(Error::Unsupported("disk has no exact sampled profile".into())),
        }
    }

    /// Largest column index `|m|` inside `lambda * K`.
    pub fn max_column(&self, lambda: u64) -> i64 {
        let l = lambda as i64;
        match self {
            ShapeSpec::Rectangle { c } => (c * lambda as f64).floor() as i64,
            ShapeSpec::Disk | ShapeSpec::Diamond => l,
            ShapeSpec::Custom { profile } => (profile.support() * lambda as f64 + FLOOR_SLACK).floor() as i64,
        }
    }

    /// Integer range of `n` with `(m, n)` in `lambda * K`.
    ///
    /// The range is symmetric, `[-N, N]`, and empty when column `m` lies
    /// outside the scaled support.
    pub fn column_range(&self, lambda: u64, m: i64) -> RangeInclusive<i64> {
        let l = lambda as i64;
        let am = m.unsigned_abs() as i64;
        if am > self.max_column(lambda) {
            #[allow(clippy::reversed_empty_ranges)]
            return 1..=0;
        }
        let top = match self {
            ShapeSpec::Rectangle { .. } => l,
            ShapeSpec::Disk => isqrt((l * l - am * am) as u64) as i64,
            ShapeSpec::Diamond => l - am,
            ShapeSpec::Custom { profile } => {
                let lf = lambda as f64;
                (lf * profile.height(am as f64 / lf) + FLOOR_SLACK).floor() as i64
            }
        };
        -top..=top
    }
}

fn isqrt(v: u64) -> u64 {
    let mut r = (v as f64).sqrt() as u64;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r
}

fn validate_profile(pts: &[[f64; 2]]) -> Vec<Violation> {
    let mut out = Vec::new();
    if pts.len() < 2 {
        out.push(Violation::TooFewPoints { len: pts.len() });
        return out;
    }
    for (index, p) in pts.iter().enumerate() {
        if !(p[0].is_finite() && p[1].is_finite()) {
            out.push(Violation::NonFinite { index });
        }
    }
    if !out.is_empty() {
        return out;
    }
    if pts[0][0] != 0.0 {
        out.push(Violation::FirstAbscissaNotZero { x0: pts[0][0] });
    }
    for index in 1..pts.len() {
        if pts[index][0] <= pts[index - 1][0] {
            out.push(Violation::AbscissaNotIncreasing { index });
        }
    }
    for (index, p) in pts.iter().enumerate() {
        if p[1] < 0.0 {
            out.push(Violation::NegativeHeight { index });
        }
    }
    if pts[0][1] <= 0.0 {
        out.push(Violation::EmptyInterior { h0: pts[0][1] });
    }
    let mut monotone = true;
    for index in 1..pts.len() {
        if pts[index][1] > pts[index - 1][1] {
            out.push(Violation::NotNonincreasing { index });
            monotone = false;
        }
    }
    // concavity is only meaningful once the profile is a nonincreasing graph
    if monotone {
        for index in 1..pts.len() - 1 {
            let [x0, h0] = pts[index - 1];
            let [x1, h1] = pts[index];
            let [x2, h2] = pts[index + 1];
            let chord = h0 + (h2 - h0) * (x1 - x0) / (x2 - x0);
            if h1 < chord - CONCAVITY_TOL {
                out.push(Violation::NotConcave { index });
            }
        }
    }
    out
}

/// Inverts a nonincreasing piecewise-linear profile by swapping coordinates.
///
/// A terminal vertical edge (positive final height) becomes a leading
/// plateau and vice versa. Plateaus anywhere else cannot be inverted.
fn transpose_profile(pts: &[[f64; 2]]) -> Result<Profile> {
    let k = pts.len() - 1;
    let a = pts[k][0];
    let mut plateau_end = 0;
    while plateau_end < k && pts[plateau_end + 1][1] == pts[0][1] {
        plateau_end += 1;
    }
    for i in plateau_end + 1..k {
        if pts[i + 1][1] >= pts[i][1] {
            return Err(Error::InvalidShape(format!(
                "profile is not strictly decreasing at index {}; cannot transpose",
                i + 1
            )));
        }
    }
    let mut out = Vec::with_capacity(pts.len() + 1);
    if pts[k][1] > 0.0 {
        out.push([0.0, a]);
    }
    // walk back from the tip to the end of the leading plateau
    for i in (plateau_end..=k).rev() {
        out.push([pts[i][1], pts[i][0]]);
    }
    Ok(Profile::new(out))
}

impl fmt::Display for ShapeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeSpec::Rectangle { c } => write!(f, "rect:c={c}"),
            ShapeSpec::Disk => f.write_str("disk"),
            ShapeSpec::Diamond => f.write_str("diamond"),
            ShapeSpec::Custom { profile } => write!(f, "custom({} points)", profile.points().len()),
        }
    }
}

/// Parses the builtin forms `rect:c=<float>`, `disk` and `diamond`.
/// Profile files are read by the caller and passed to
/// [`ShapeSpec::from_profile_json`].
impl FromStr for ShapeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disk" => Ok(ShapeSpec::Disk),
            "diamond" => Ok(ShapeSpec::Diamond),
            _ => {
                let c = s
                    .strip_prefix("rect:c=")
                    .ok_or_else(|| Error::InvalidShape(format!("unrecognized shape '{s}'")))?;
                let c: f64 = c.parse().map_err(|_| Error::InvalidShape(format!("bad aspect ratio in '{s}'")))?;
                ShapeSpec::rectangle(c)
            }
        }
    }
}

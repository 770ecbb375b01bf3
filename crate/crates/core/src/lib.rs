//! Shape summation of conditionally convergent lattice series.
//!
//! The weight-2 Eisenstein series `G2(tau) = sum_m sum_n 1/(m tau + n)^2` and
//! the lattice sum behind the Weierstrass p-function only converge
//! conditionally, so their value depends on the order of summation. This
//! crate sums them over the integer points of dilated convex shapes `lambda K`
//! and evaluates the shape-dependent residual `E(K, tau)` in three
//! independent ways: lattice summation, an integral over the boundary
//! profile of `K`, and closed forms for the rectangle, disk and diamond.
//!
//! ```
//! use shapesum::{residual_closed_form, residual_integral, QuadratureConfig, ShapeSpec, TauPoint};
//!
//! let tau = TauPoint::from_parts(0.3, 1.2)?;
//! let a = residual_integral(&ShapeSpec::Disk, tau, &QuadratureConfig::default())?;
//! let b = residual_closed_form(&ShapeSpec::Disk, tau)?;
//! assert!((a.value - b.value).norm() < 1e-8);
//! # Ok::<(), shapesum::Error>(())
//! ```

// NaN-rejecting guards are written as `!(x >= bound)` throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod column;
pub mod eisenstein;
pub mod error;
pub mod lattice;
pub mod quadrature;
pub mod residual;
pub mod shapes;
pub mod sum;
pub mod tau;
pub mod verify;
pub mod weierstrass;

pub use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use eisenstein::{
    g2_abs_series, g2_quasimodularity_defect, g2_ref, g2_reversed_order, g2_shape, EisensteinMethod, EisensteinValue,
};
pub use error::{Error, Result};
pub use lattice::{
    shape_partial_sum, shape_sum_limit, telescope_sum, EisensteinTerm, LatticeTerm, SumConfig, SumResult,
    TelescopeTerm, WeierstrassTerm,
};
pub use quadrature::QuadratureConfig;
pub use residual::{
    residual_closed_form, residual_functional_defect, residual_integral, residual_lattice, residual_scaling_defect,
    ResidualMethod, ResidualValue,
};
pub use shapes::{Profile, ShapeSpec, Violation};
pub use tau::TauPoint;
pub use weierstrass::{
    reduce_to_fundamental, wp_abs_direct, wp_iterated_defect, wp_prop3_defect, wp_ref, wp_shape, LatticePointZ,
};

/// The computed value of an expression that vanishes identically, together
/// with the accumulated error bound of its ingredients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Defect {
    pub value: Complex64,
    pub error_bound: f64,
}

impl Defect {
    pub fn within_bound(&self) -> bool {
        self.value.norm() <= self.error_bound
    }
}

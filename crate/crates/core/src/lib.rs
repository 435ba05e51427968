//! Curvature algebra of oriented Riemannian 4-manifolds.
//!
//! * [`twoform`] and [`operator`]: 2-forms, the Hodge star and curvature
//!   operators in a fixed basis convention.
//! * [`curvops`]: scalar/Weyl/Ricci decomposition, the Gursky–LeBrun
//!   defect `|s|/√6 − (|W+| + |W-|)`, equality-case classification and
//!   characteristic densities.
//! * [`models`]: exact catalog of model operators and analytic charts.
//! * [`secsign`]: sectional curvature of planes and certified sign of the
//!   sectional curvature.
//! * [`numgeom`]: curvature of coordinate metrics by finite differences,
//!   plus Gauss–Legendre quadrature.
//! * [`page`]: the Page metric on `CP² # -CP²` and its verification
//!   pipeline.
//! * [`geography`]: exact `(χ, τ)` inequalities.
//! * [`io`]: JSON and CSV formats shared by the command-line tool.

pub mod curvops;
pub mod error;
pub mod geography;
pub mod io;
pub mod models;
pub mod numgeom;
pub mod operator;
pub mod page;
pub mod secsign;
pub mod sphere_qp;
pub mod twoform;

#[doc(hidden)]
pub mod testing;

pub use curvops::{CoverClass, CurvatureSign, Decomposition, GlReport};
pub use error::Error;
pub use operator::{Basis, CurvatureOperator};
pub use twoform::TwoForm;

use serde::{Deserialize, Serialize};

/// Numerical tolerances shared across modules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Symmetry, Bianchi and trace checks.
    pub structural: f64,
    /// Saturation, eigenvalue multiplicity, Einstein and Kähler tests;
    /// scaled by `max(1, |s|)` where applicable.
    pub classification: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            structural: 1e-9,
            classification: 1e-7,
        }
    }
}

pub(crate) mod serde_mat3 {
    use nalgebra::Matrix3;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &Matrix3<f64>, ser: S) -> Result<S::Ok, S::Error> {
        let rows: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]));
        rows.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Matrix3<f64>, D::Error> {
        let rows = <[[f64; 3]; 3]>::deserialize(de)?;
        Ok(Matrix3::from_fn(|i, j| rows[i][j]))
    }
}

pub(crate) mod serde_mat4 {
    use nalgebra::Matrix4;
    use serde::{Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &Matrix4<f64>, ser: S) -> Result<S::Ok, S::Error> {
        let rows: [[f64; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]));
        rows.serialize(ser)
    }
}

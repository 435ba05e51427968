//! Curvature operators on the 6-dimensional space of 2-forms.
//!
//! Convention: for orthonormal `X, Y` the sectional curvature of their plane
//! is `<R(X∧Y), X∧Y>`, so the identity operator is the unit round 4-sphere.

use nalgebra::{Matrix3, Matrix6};
use serde::{Deserialize, Serialize};

use crate::error::CurvError;
use crate::twoform::{sd_asd_change, TwoForm};
use crate::Tolerances;

/// Basis in which an operator matrix is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    #[serde(rename = "coordinate")]
    Coordinate,
    #[serde(rename = "sd-asd")]
    SdAsd,
}

/// The three blocks of an operator in the sd-asd basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Blocks {
    /// Self-dual diagonal block.
    pub sd: Matrix3<f64>,
    /// Off-diagonal block, rows indexed by the sd basis, columns by asd.
    pub off: Matrix3<f64>,
    /// Anti-self-dual diagonal block.
    pub asd: Matrix3<f64>,
}

impl Blocks {
    pub fn assemble(&self) -> Matrix6<f64> {
        let mut m = Matrix6::zeros();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.sd);
        m.fixed_view_mut::<3, 3>(0, 3).copy_from(&self.off);
        m.fixed_view_mut::<3, 3>(3, 0).copy_from(&self.off.transpose());
        m.fixed_view_mut::<3, 3>(3, 3).copy_from(&self.asd);
        m
    }
}

/// Symmetric endomorphism of `Λ²` at a point, tagged with its basis.
///
/// Serialized as `{"basis": "coordinate" | "sd-asd", "matrix": [6 rows]}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "OperatorRows", from = "OperatorRows")]
pub struct CurvatureOperator {
    matrix: Matrix6<f64>,
    basis: Basis,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorRows {
    basis: Basis,
    matrix: [[f64; 6]; 6],
}

impl From<CurvatureOperator> for OperatorRows {
    fn from(op: CurvatureOperator) -> Self {
        OperatorRows {
            basis: op.basis,
            matrix: std::array::from_fn(|i| std::array::from_fn(|j| op.matrix[(i, j)])),
        }
    }
}

impl From<OperatorRows> for CurvatureOperator {
    fn from(rows: OperatorRows) -> Self {
        CurvatureOperator::new(Matrix6::from_fn(|i, j| rows.matrix[i][j]), rows.basis)
    }
}

impl CurvatureOperator {
    pub fn new(matrix: Matrix6<f64>, basis: Basis) -> Self {
        CurvatureOperator { matrix, basis }
    }

    pub fn coordinate(matrix: Matrix6<f64>) -> Self {
        Self::new(matrix, Basis::Coordinate)
    }

    pub fn identity() -> Self {
        Self::coordinate(Matrix6::identity())
    }

    pub fn zero() -> Self {
        Self::coordinate(Matrix6::zeros())
    }

    pub fn from_blocks(blocks: &Blocks) -> Self {
        Self::new(blocks.assemble(), Basis::SdAsd)
    }

    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.matrix
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    /// Matrix in the coordinate basis. Conversions only add, subtract and
    /// halve entries, so dyadic inputs convert exactly.
    pub fn coordinate_matrix(&self) -> Matrix6<f64> {
        match self.basis {
            Basis::Coordinate => self.matrix,
            Basis::SdAsd => {
                let q = sd_asd_change();
                (q.transpose() * self.matrix * q) * 0.5
            }
        }
    }

    pub fn sd_asd_matrix(&self) -> Matrix6<f64> {
        match self.basis {
            Basis::SdAsd => self.matrix,
            Basis::Coordinate => {
                let q = sd_asd_change();
                (q * self.matrix * q.transpose()) * 0.5
            }
        }
    }

    pub fn to_basis(&self, basis: Basis) -> Self {
        match basis {
            Basis::Coordinate => Self::coordinate(self.coordinate_matrix()),
            Basis::SdAsd => Self::new(self.sd_asd_matrix(), Basis::SdAsd),
        }
    }

    pub fn blocks(&self) -> Blocks {
        let m = self.sd_asd_matrix();
        Blocks {
            sd: m.fixed_view::<3, 3>(0, 0).into_owned(),
            off: m.fixed_view::<3, 3>(0, 3).into_owned(),
            asd: m.fixed_view::<3, 3>(3, 3).into_owned(),
        }
    }

    /// Largest entry of `|R − Rᵀ|`.
    pub fn symmetry_defect(&self) -> f64 {
        (self.matrix - self.matrix.transpose()).amax()
    }

    /// `|tr(sd block) − tr(asd block)|`; twice the cyclic Bianchi sum.
    pub fn bianchi_defect(&self) -> f64 {
        let b = self.blocks();
        (b.sd.trace() - b.asd.trace()).abs()
    }

    /// Checks both structural defects against `tol.structural`.
    pub fn check_admissible(&self, tol: &Tolerances) -> Result<(), CurvError> {
        if !self.matrix.iter().all(|x| x.is_finite()) {
            return Err(CurvError::NonFinite);
        }
        let sym = self.symmetry_defect();
        if sym > tol.structural {
            return Err(CurvError::NotSymmetric { defect: sym });
        }
        let bianchi = self.bianchi_defect();
        if bianchi > tol.structural {
            return Err(CurvError::BianchiViolation { defect: bianchi });
        }
        Ok(())
    }

    /// `R(ω)` for a form given in coordinates.
    pub fn apply(&self, form: &TwoForm) -> TwoForm {
        TwoForm::from_vector(&(self.coordinate_matrix() * form.as_vector()))
    }

    /// Operator norm of the (symmetrized) matrix.
    pub fn spectral_norm(&self) -> f64 {
        let m = self.matrix;
        let sym = (m + m.transpose()) * 0.5;
        sym.symmetric_eigenvalues().amax()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.matrix * factor, self.basis)
    }

    /// Reverses orientation by exchanging the sd and asd blocks.
    pub fn orientation_flipped(&self) -> Self {
        let b = self.blocks();
        Self::from_blocks(&Blocks {
            sd: b.asd,
            off: b.off.transpose(),
            asd: b.sd,
        })
        .to_basis(self.basis)
    }
}

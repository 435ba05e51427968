//! 2-forms on an oriented Euclidean 4-space.
//!
//! Coefficients are stored in the ordered basis
//! `(e1^e2, e1^e3, e1^e4, e2^e3, e2^e4, e3^e4)` of an oriented orthonormal
//! frame, which is orthonormal for the induced inner product.
//!
//! The self-dual space is spanned by the orthonormal forms
//!
//! ```text
//! f1+ = (e12 + e34)/√2   f2+ = (e13 - e24)/√2   f3+ = (e14 + e23)/√2
//! ```
//!
//! and the anti-self-dual space by
//!
//! ```text
//! f1- = (e12 - e34)/√2   f2- = (e13 + e24)/√2   f3- = (e14 - e23)/√2
//! ```
//!
//! Those six forms, in that order, make up the "sd-asd" basis used by
//! [`crate::operator::CurvatureOperator`].

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix6, Vector3, Vector4, Vector6};
use serde::{Deserialize, Serialize};

/// Labels of the coordinate basis, in storage order.
pub const COORDINATE_LABELS: [&str; 6] = ["e1^e2", "e1^e3", "e1^e4", "e2^e3", "e2^e4", "e3^e4"];

/// Labels of the sd-asd basis, in storage order.
pub const SD_ASD_LABELS: [&str; 6] = [
    "(e1^e2+e3^e4)/sqrt2",
    "(e1^e3-e2^e4)/sqrt2",
    "(e1^e4+e2^e3)/sqrt2",
    "(e1^e2-e3^e4)/sqrt2",
    "(e1^e3+e2^e4)/sqrt2",
    "(e1^e4-e2^e3)/sqrt2",
];

/// Unnormalized change of basis: row `i` is `√2` times the `i`-th sd-asd
/// basis form written in coordinates. All entries are `0` or `±1`, so
/// `Q·Qᵀ = 2·I` and conversions can be carried out with exact dyadic
/// arithmetic.
pub(crate) const SD_ASD_ROWS: [[i8; 6]; 6] = [
    [1, 0, 0, 0, 0, 1],
    [0, 1, 0, 0, -1, 0],
    [0, 0, 1, 1, 0, 0],
    [1, 0, 0, 0, 0, -1],
    [0, 1, 0, 0, 1, 0],
    [0, 0, 1, -1, 0, 0],
];

/// Index pairs `(i, j)`, `i < j`, of the coordinate basis forms.
pub const INDEX_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

pub(crate) fn sd_asd_change() -> Matrix6<f64> {
    Matrix6::from_fn(|i, j| f64::from(SD_ASD_ROWS[i][j]))
}

/// A 2-form in the coordinate basis.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TwoForm(pub [f64; 6]);

impl TwoForm {
    pub const ZERO: TwoForm = TwoForm([0.0; 6]);

    pub fn new(coefficients: [f64; 6]) -> Self {
        TwoForm(coefficients)
    }

    /// The `k`-th coordinate basis form.
    pub fn basis(k: usize) -> Self {
        let mut c = [0.0; 6];
        c[k] = 1.0;
        TwoForm(c)
    }

    /// `X ∧ Y` for vectors given in the orthonormal frame.
    pub fn wedge(x: &Vector4<f64>, y: &Vector4<f64>) -> Self {
        let mut c = [0.0; 6];
        for (k, &(i, j)) in INDEX_PAIRS.iter().enumerate() {
            c[k] = x[i] * y[j] - x[j] * y[i];
        }
        TwoForm(c)
    }

    pub fn coefficients(&self) -> &[f64; 6] {
        &self.0
    }

    pub fn as_vector(&self) -> Vector6<f64> {
        Vector6::from_row_slice(&self.0)
    }

    pub fn from_vector(v: &Vector6<f64>) -> Self {
        TwoForm([v[0], v[1], v[2], v[3], v[4], v[5]])
    }

    pub fn dot(&self, other: &TwoForm) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Hodge star of the oriented orthonormal frame.
    pub fn hodge_star(&self) -> Self {
        let [w12, w13, w14, w23, w24, w34] = self.0;
        TwoForm([w34, -w24, w23, w14, -w13, w12])
    }

    /// Plücker quantity `w12·w34 − w13·w24 + w14·w23`; `ω∧ω` is twice this
    /// times the volume form.
    pub fn plucker(&self) -> f64 {
        let [w12, w13, w14, w23, w24, w34] = self.0;
        w12 * w34 - w13 * w24 + w14 * w23
    }

    /// Splits `ω` into its self-dual and anti-self-dual parts.
    pub fn sd_split(&self) -> (TwoForm, TwoForm) {
        let star = self.hodge_star();
        let mut plus = [0.0; 6];
        let mut minus = [0.0; 6];
        for k in 0..6 {
            plus[k] = 0.5 * (self.0[k] + star.0[k]);
            minus[k] = 0.5 * (self.0[k] - star.0[k]);
        }
        (TwoForm(plus), TwoForm(minus))
    }

    /// Coordinates with respect to the orthonormal sd and asd bases.
    pub fn to_sd_asd(&self) -> (Vector3<f64>, Vector3<f64>) {
        let mut out = [0.0; 6];
        for (i, row) in SD_ASD_ROWS.iter().enumerate() {
            out[i] = row
                .iter()
                .zip(self.0.iter())
                .map(|(&q, &w)| f64::from(q) * w)
                .sum::<f64>()
                * std::f64::consts::FRAC_1_SQRT_2;
        }
        (
            Vector3::new(out[0], out[1], out[2]),
            Vector3::new(out[3], out[4], out[5]),
        )
    }

    /// Inverse of [`TwoForm::to_sd_asd`].
    pub fn from_sd_asd(plus: &Vector3<f64>, minus: &Vector3<f64>) -> Self {
        let coords = [plus[0], plus[1], plus[2], minus[0], minus[1], minus[2]];
        let mut c = [0.0; 6];
        for (k, slot) in c.iter_mut().enumerate() {
            *slot =
                (0..6).map(|i| f64::from(SD_ASD_ROWS[i][k]) * coords[i]).sum::<f64>() * std::f64::consts::FRAC_1_SQRT_2;
        }
        TwoForm(c)
    }

    /// Both characterizations of decomposability: vanishing Plücker
    /// quantity and equal self-dual and anti-self-dual norms. Returns
    /// `(plucker_test, norm_test)`.
    pub fn decomposability(&self, tolerance: f64) -> (bool, bool) {
        let scale = self.norm_squared().max(f64::MIN_POSITIVE);
        let (plus, minus) = self.sd_split();
        let plucker = self.plucker().abs() <= tolerance * scale;
        let norms = (plus.norm_squared() - minus.norm_squared()).abs() <= tolerance * scale;
        (plucker, norms)
    }

    pub fn is_decomposable(&self, tolerance: f64) -> bool {
        let (a, b) = self.decomposability(tolerance);
        a && b
    }
}

impl Add for TwoForm {
    type Output = TwoForm;
    fn add(self, rhs: TwoForm) -> TwoForm {
        let mut c = self.0;
        c.iter_mut().zip(rhs.0.iter()).for_each(|(a, b)| *a += b);
        TwoForm(c)
    }
}

impl Sub for TwoForm {
    type Output = TwoForm;
    fn sub(self, rhs: TwoForm) -> TwoForm {
        self + (-rhs)
    }
}

impl Neg for TwoForm {
    type Output = TwoForm;
    fn neg(self) -> TwoForm {
        TwoForm(self.0.map(|a| -a))
    }
}

impl Mul<TwoForm> for f64 {
    type Output = TwoForm;
    fn mul(self, rhs: TwoForm) -> TwoForm {
        TwoForm(rhs.0.map(|a| self * a))
    }
}

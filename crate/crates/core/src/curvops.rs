//! Decomposition of curvature operators into scalar, Weyl and traceless
//! Ricci parts, and the pointwise quantities built from it.
//!
//! In the sd-asd basis an operator has the block form
//!
//! ```text
//!     | W+ + s/12   B         |
//!     | Bᵀ          W- + s/12 |
//! ```
//!
//! with `W±` traceless and `B` carrying the traceless Ricci tensor. All
//! Weyl norms are Frobenius norms of the 3×3 blocks.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::CurvError;
use crate::operator::{Basis, Blocks, CurvatureOperator};
use crate::Tolerances;

/// Sorted eigenvalues `λ ≤ μ ≤ ν` of a Weyl half.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
}

impl Spectrum {
    pub fn of(m: &Matrix3<f64>) -> Self {
        let (values, _) = sorted_eigen(m);
        Spectrum {
            lambda: values[0],
            mu: values[1],
            nu: values[2],
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.lambda, self.mu, self.nu]
    }

    pub fn norm_squared(&self) -> f64 {
        self.lambda * self.lambda + self.mu * self.mu + self.nu * self.nu
    }
}

/// Eigen-decomposition of a symmetric 3×3 matrix with eigenvalues ascending
/// and eigenvectors as matching columns.
pub fn sorted_eigen(m: &Matrix3<f64>) -> (Vector3<f64>, Matrix3<f64>) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = Vector3::from_fn(|i, _| eig.eigenvalues[order[i]]);
    let vectors = Matrix3::from_fn(|r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spectra {
    pub plus: Spectrum,
    pub minus: Spectrum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Decomposition {
    pub s: f64,
    #[serde(with = "crate::serde_mat3")]
    pub w_plus: Matrix3<f64>,
    #[serde(with = "crate::serde_mat3")]
    pub w_minus: Matrix3<f64>,
    #[serde(with = "crate::serde_mat3")]
    pub ric_block: Matrix3<f64>,
    pub spectra: Spectra,
}

impl Decomposition {
    pub fn norm_w_plus(&self) -> f64 {
        self.w_plus.norm()
    }

    pub fn norm_w_minus(&self) -> f64 {
        self.w_minus.norm()
    }

    /// Einstein constant `s/4`.
    pub fn einstein_constant(&self) -> f64 {
        self.s / 4.0
    }

    pub fn is_einstein(&self, tol: &Tolerances) -> bool {
        self.ric_block.norm() <= tol.classification * self.s.abs().max(1.0)
    }

    fn require_einstein(&self, tol: &Tolerances) -> Result<(), CurvError> {
        if self.is_einstein(tol) {
            Ok(())
        } else {
            Err(CurvError::NotEinstein {
                norm: self.ric_block.norm(),
            })
        }
    }
}

pub fn decompose(op: &CurvatureOperator) -> Result<Decomposition, CurvError> {
    decompose_with(op, &Tolerances::default())
}

pub fn decompose_with(op: &CurvatureOperator, tol: &Tolerances) -> Result<Decomposition, CurvError> {
    op.check_admissible(tol)?;
    let Blocks { sd, off, asd } = op.blocks();
    let s = 2.0 * (sd.trace() + asd.trace());
    let shift = Matrix3::identity() * (s / 12.0);
    let w_plus = sd - shift;
    let w_minus = asd - shift;
    Ok(Decomposition {
        s,
        w_plus,
        w_minus,
        ric_block: off,
        spectra: Spectra {
            plus: Spectrum::of(&w_plus),
            minus: Spectrum::of(&w_minus),
        },
    })
}

/// Reassembles the coordinate-basis operator.
pub fn recompose(d: &Decomposition) -> Result<CurvatureOperator, CurvError> {
    recompose_with(d, &Tolerances::default())
}

pub fn recompose_with(d: &Decomposition, tol: &Tolerances) -> Result<CurvatureOperator, CurvError> {
    let (tp, tm) = (d.w_plus.trace(), d.w_minus.trace());
    if tp.abs() > tol.structural || tm.abs() > tol.structural {
        return Err(CurvError::InvalidBlocks {
            trace_plus: tp,
            trace_minus: tm,
        });
    }
    let shift = Matrix3::identity() * (d.s / 12.0);
    let blocks = Blocks {
        sd: d.w_plus + shift,
        off: d.ric_block,
        asd: d.w_minus + shift,
    };
    Ok(CurvatureOperator::from_blocks(&blocks).to_basis(Basis::Coordinate))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurvatureSign {
    NonPositive,
    NonNegative,
    Indefinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EqualityBranch {
    NonPositive,
    NonNegative,
    None,
}

/// Universal-cover model an equality-case operator is consistent with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoverClass {
    SphereProduct,
    Flat,
    HyperbolicPlaneProduct,
    NotSaturated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GlReport {
    /// `|s|/√6 − (|W+| + |W-|)`.
    pub defect: f64,
    pub norm_w_plus: f64,
    pub norm_w_minus: f64,
    pub equality_branch: EqualityBranch,
    pub saturated: bool,
    pub cover_class: CoverClass,
}

struct Multiplicities {
    /// `μ± = ν±` on both halves.
    top: bool,
    /// `λ± = μ±` on both halves.
    bottom: bool,
}

fn multiplicities(d: &Decomposition, tol: f64) -> Multiplicities {
    let close = |a: f64, b: f64| (a - b).abs() <= tol;
    let (p, m) = (d.spectra.plus, d.spectra.minus);
    Multiplicities {
        top: close(p.mu, p.nu) && close(m.mu, m.nu),
        bottom: close(p.lambda, p.mu) && close(m.lambda, m.mu),
    }
}

fn scale_tol(d: &Decomposition, tol: &Tolerances) -> f64 {
    tol.classification * d.s.abs().max(1.0)
}

pub fn gl_defect(d: &Decomposition) -> GlReport {
    gl_defect_with(d, &Tolerances::default())
}

/// Gursky–LeBrun defect and the equality-case test.
///
/// Saturation on the non-positive branch forces `μ± = ν± = |W±|/√6` and
/// `s ≤ 0`; on the non-negative branch `λ± = μ± = −|W±|/√6` and `s ≥ 0`.
/// The flat operator satisfies both and is reported on the non-positive
/// branch.
pub fn gl_defect_with(d: &Decomposition, tol: &Tolerances) -> GlReport {
    let norm_w_plus = d.norm_w_plus();
    let norm_w_minus = d.norm_w_minus();
    let defect = d.s.abs() / 6f64.sqrt() - (norm_w_plus + norm_w_minus);
    let t = scale_tol(d, tol);
    let mult = multiplicities(d, t);

    let branch = if defect.abs() > t {
        EqualityBranch::None
    } else if d.s <= t && mult.top {
        EqualityBranch::NonPositive
    } else if d.s >= -t && mult.bottom {
        EqualityBranch::NonNegative
    } else {
        EqualityBranch::None
    };
    let saturated = branch != EqualityBranch::None;
    let flat = d.s.abs() <= t && norm_w_plus + norm_w_minus <= t;
    let cover_class = match branch {
        _ if saturated && flat => CoverClass::Flat,
        EqualityBranch::NonPositive => CoverClass::HyperbolicPlaneProduct,
        EqualityBranch::NonNegative => CoverClass::SphereProduct,
        EqualityBranch::None => CoverClass::NotSaturated,
    };
    GlReport {
        defect,
        norm_w_plus,
        norm_w_minus,
        equality_branch: branch,
        saturated,
        cover_class,
    }
}

pub fn classify_equality(d: &Decomposition, sign: CurvatureSign) -> Result<CoverClass, CurvError> {
    classify_equality_with(d, sign, &Tolerances::default())
}

/// Which universal cover an Einstein operator with the given sectional
/// curvature sign is consistent with, when it saturates the inequality.
pub fn classify_equality_with(
    d: &Decomposition,
    sign: CurvatureSign,
    tol: &Tolerances,
) -> Result<CoverClass, CurvError> {
    d.require_einstein(tol)?;
    if sign == CurvatureSign::Indefinite {
        return Err(CurvError::IndefiniteSign);
    }
    let t = scale_tol(d, tol);
    if d.s.abs() <= t && d.norm_w_plus() + d.norm_w_minus() <= t {
        return Ok(CoverClass::Flat);
    }
    let report = gl_defect_with(d, tol);
    if report.defect.abs() > t {
        return Ok(CoverClass::NotSaturated);
    }
    let mult = multiplicities(d, t);
    Ok(match sign {
        CurvatureSign::NonNegative if mult.bottom => CoverClass::SphereProduct,
        CurvatureSign::NonPositive if mult.top => CoverClass::HyperbolicPlaneProduct,
        _ => CoverClass::NotSaturated,
    })
}

/// Exact rational invariants of a decomposition, taking every `f64` field at
/// its exact binary value.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactInvariants {
    pub s: BigRational,
    pub w_plus_sq: BigRational,
    pub w_minus_sq: BigRational,
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

fn exact_frobenius_sq(m: &Matrix3<f64>) -> BigRational {
    m.iter()
        .map(|&x| {
            let e = exact(x);
            &e * &e
        })
        .fold(BigRational::zero(), |acc, x| acc + x)
}

impl ExactInvariants {
    pub fn of(d: &Decomposition) -> Self {
        ExactInvariants {
            s: exact(d.s),
            w_plus_sq: exact_frobenius_sq(&d.w_plus),
            w_minus_sq: exact_frobenius_sq(&d.w_minus),
        }
    }

    /// `s²/24`.
    pub fn s_sq_over_24(&self) -> BigRational {
        &self.s * &self.s / BigRational::from_integer(BigInt::from(24))
    }

    /// `|W+|² − s²/24`, zero for Kähler metrics.
    pub fn kahler_residual(&self) -> BigRational {
        &self.w_plus_sq - self.s_sq_over_24()
    }

    /// Euler-to-signature density ratio
    /// `3(|W+|² + |W-|² + s²/24) / (2(|W+|² − |W-|²))`; the `π²` factors
    /// cancel.
    pub fn density_ratio(&self) -> Option<BigRational> {
        let sig = &self.w_plus_sq - &self.w_minus_sq;
        if sig.is_zero() {
            return None;
        }
        let euler = &self.w_plus_sq + &self.w_minus_sq + self.s_sq_over_24();
        let three = BigRational::from_integer(BigInt::from(3));
        let two = BigRational::from_integer(BigInt::from(2));
        Some(three * euler / (two * sig))
    }
}

/// Formats a rational as `p/q` (or `p` when integral).
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CharDensities {
    /// `(|W+|² + |W-|² + s²/24) / 8π²`.
    pub euler_density: f64,
    /// `(|W+|² − |W-|²) / 12π²`.
    pub signature_density: f64,
    pub ratio: Option<f64>,
    /// The ratio evaluated in exact rational arithmetic on the stored fields.
    pub ratio_exact: Option<String>,
}

pub fn char_densities(d: &Decomposition) -> Result<CharDensities, CurvError> {
    char_densities_with(d, &Tolerances::default())
}

pub fn char_densities_with(d: &Decomposition, tol: &Tolerances) -> Result<CharDensities, CurvError> {
    d.require_einstein(tol)?;
    Ok(densities_unchecked(d))
}

/// Densities without the Einstein check. Only meaningful for Einstein
/// inputs; callers working with finite-difference operators verify the
/// Einstein residual themselves.
pub fn densities_unchecked(d: &Decomposition) -> CharDensities {
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    let wp = d.norm_w_plus().powi(2);
    let wm = d.norm_w_minus().powi(2);
    let euler_density = (wp + wm + d.s * d.s / 24.0) / (8.0 * pi2);
    let signature_density = (wp - wm) / (12.0 * pi2);
    let exact = ExactInvariants::of(d).density_ratio();
    let ratio = exact.as_ref().map(|_| euler_density / signature_density);
    CharDensities {
        euler_density,
        signature_density,
        ratio,
        ratio_exact: exact.as_ref().map(format_rational),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct KahlerSignature {
    /// `|W+|² − |W-|²`.
    pub density: f64,
    pub non_negative: bool,
}

pub fn kahler_signature_check(d: &Decomposition) -> Result<KahlerSignature, CurvError> {
    kahler_signature_check_with(d, &Tolerances::default())
}

/// Signature integrand of a Kähler operator. The Kähler identity
/// `|W+|² = s²/24` is checked first.
pub fn kahler_signature_check_with(d: &Decomposition, tol: &Tolerances) -> Result<KahlerSignature, CurvError> {
    let wp = d.norm_w_plus().powi(2);
    let wm = d.norm_w_minus().powi(2);
    let target = d.s * d.s / 24.0;
    let scale = target.max(1.0);
    let residual = wp - target;
    if residual.abs() > tol.classification * scale {
        return Err(CurvError::NotKahler { residual });
    }
    let density = wp - wm;
    Ok(KahlerSignature {
        density,
        non_negative: density >= -tol.classification * scale,
    })
}

/// `|x|` of an exact rational, for diagnostics.
pub fn abs_exact(r: &BigRational) -> BigRational {
    r.abs()
}

//! Exact `(χ, τ)` inequalities for closed oriented 4-manifolds.
//!
//! Every flag is decided in integer arithmetic; the `15/8` comparison is
//! `8χ > 15|τ|`. The flags are necessary conditions only and never claim
//! that a point is realized by a manifold.

use std::io::{Read, Write};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::GeoError;

pub const SCAN_HEADER: [&str; 8] = [
    "chi",
    "tau",
    "gromov_luck",
    "einstein_nonpos_strict",
    "bmy",
    "bmy_equality",
    "c1sq",
    "both_orientations_complex",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GeoPoint {
    pub chi: i64,
    pub tau: i64,
}

impl GeoPoint {
    pub fn new(chi: i64, tau: i64) -> Self {
        GeoPoint { chi, tau }
    }

    /// The same manifold with the opposite orientation.
    pub fn flipped(&self) -> Self {
        GeoPoint {
            chi: self.chi,
            tau: -self.tau,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GeoReport {
    pub chi: i64,
    pub tau: i64,
    /// `χ ≥ |τ|`.
    pub gromov_luck: bool,
    /// `χ > (15/8)|τ|`.
    pub einstein_non_pos_strict: bool,
    /// `χ ≥ 3τ`.
    pub bmy: bool,
    pub bmy_equality: bool,
    /// `2χ + 3τ`.
    pub c1sq: i128,
    /// Both orientations can carry complex structures only if `τ` is even:
    /// the two `c₁²` differ by `6τ` and each must satisfy Noether's
    /// congruence `c₁² + χ ≡ 0 (mod 12)`.
    pub both_orientations_complex_possible: bool,
}

pub fn report(p: GeoPoint) -> GeoReport {
    let chi = i128::from(p.chi);
    let tau = i128::from(p.tau);
    GeoReport {
        chi: p.chi,
        tau: p.tau,
        gromov_luck: chi >= tau.abs(),
        einstein_non_pos_strict: 8 * chi > 15 * tau.abs(),
        bmy: chi >= 3 * tau,
        bmy_equality: chi == 3 * tau,
        c1sq: 2 * chi + 3 * tau,
        both_orientations_complex_possible: tau % 2 == 0,
    }
}

/// Outcome of combining `χ = 2 + τ` (from `b₁ = 0` and `b₂⁻ = 0`) with the
/// equality `χ = (15/8)τ` forced by `W- = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "camelCase")]
pub enum LatticeObstruction {
    #[serde(rename_all = "camelCase")]
    Solved {
        #[serde(serialize_with = "ratio_string")]
        tau_value: Ratio<i64>,
        #[serde(serialize_with = "ratio_string")]
        chi_value: Ratio<i64>,
        integral: bool,
    },
    NotApplicable,
}

fn ratio_string<S: serde::Serializer>(r: &Ratio<i64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn self_dual_lattice_obstruction(b1_zero: bool) -> LatticeObstruction {
    if !b1_zero {
        return LatticeObstruction::NotApplicable;
    }
    // 2 + τ = (15/8) τ  ⇒  τ (15/8 − 1) = 2.
    let slope = Ratio::new(15, 8);
    let tau = Ratio::from_integer(2) / (slope - Ratio::from_integer(1));
    let chi = Ratio::from_integer(2) + tau;
    debug_assert_eq!(chi, slope * tau);
    LatticeObstruction::Solved {
        tau_value: tau,
        chi_value: chi,
        integral: tau.is_integer(),
    }
}

/// All `(χ, τ)` with `0 ≤ χ ≤ chi_max` and `|τ| ≤ χ`, in lexicographic
/// order.
pub fn scan(chi_max: i64) -> Result<Vec<GeoReport>, GeoError> {
    if chi_max < 0 {
        return Err(GeoError::BadInput(format!(
            "chi-max must be non-negative, got {chi_max}"
        )));
    }
    if chi_max > 100_000 {
        return Err(GeoError::BadInput(format!(
            "chi-max {chi_max} is too large (limit 100000)"
        )));
    }
    Ok((0..=chi_max)
        .flat_map(|chi| (-chi..=chi).map(move |tau| report(GeoPoint::new(chi, tau))))
        .collect())
}

pub fn write_scan_csv<W: Write>(rows: &[GeoReport], out: W) -> Result<(), GeoError> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| GeoError::BadInput(e.to_string());
    w.write_record(SCAN_HEADER).map_err(io)?;
    for r in rows {
        w.write_record([
            r.chi.to_string(),
            r.tau.to_string(),
            r.gromov_luck.to_string(),
            r.einstein_non_pos_strict.to_string(),
            r.bmy.to_string(),
            r.bmy_equality.to_string(),
            r.c1sq.to_string(),
            r.both_orientations_complex_possible.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| GeoError::BadInput(e.to_string()))
}

/// Reads `chi,tau` rows (header required; extra columns are ignored).
pub fn read_points_csv<R: Read>(input: R) -> Result<Vec<GeoPoint>, GeoError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = rdr.headers().map_err(|e| GeoError::BadInput(e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| GeoError::BadInput(format!("missing column '{name}'")))
    };
    let (ci, ti) = (col("chi")?, col("tau")?);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| GeoError::BadInput(e.to_string()))?;
        let field = |k: usize, name: &str| -> Result<i64, GeoError> {
            let raw = rec.get(k).unwrap_or("");
            raw.parse::<i64>()
                .map_err(|_| GeoError::BadInput(format!("row {}: {name} = '{raw}' is not an integer", i + 2)))
        };
        out.push(GeoPoint::new(field(ci, "chi")?, field(ti, "tau")?));
    }
    Ok(out)
}

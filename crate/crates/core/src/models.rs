//! Catalog of model curvature operators and analytic charts whose curvature
//! is known in closed form.
//!
//! | name | operator |
//! |---|---|
//! | `flat` | 0 |
//! | `sphere4(r)` | `Identity / r²` |
//! | `hyperbolic4(r)` | `−Identity / r²` |
//! | `surfaceProduct(a, b)` | `diag(a, 0, 0, 0, 0, b)` (coordinate basis) |
//! | `fubiniStudy(s)` | `W+` spectrum `(−s/12, −s/12, s/6)`, `W- = 0`, `s > 0` |
//! | `bergman(s)` | same pattern with `s < 0` |

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{Matrix3, Matrix4, Matrix6, Vector3, Vector4, Vector6};
use serde::{Deserialize, Serialize};

use crate::curvops::{decompose_with, CoverClass, Spectrum};
use crate::error::ModelError;
use crate::numgeom::MetricChart;
use crate::operator::{Basis, Blocks, CurvatureOperator};
use crate::secsign::{certify_sec_sign_with, CertifyConfig, Verdict};
use crate::Tolerances;

pub const MODEL_NAMES: [&str; 6] = [
    "flat",
    "sphere4",
    "hyperbolic4",
    "surfaceProduct",
    "fubiniStudy",
    "bergman",
];
pub const CHART_NAMES: [&str; 3] = ["flatChart", "sphereProductChart", "hyperbolic4HalfSpace"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SecSign {
    NonNegative,
    NonPositive,
    Indefinite,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModelFlags {
    pub einstein: bool,
    pub kahler: bool,
    pub sec_sign: SecSign,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModelSpec {
    pub name: String,
    pub parameters: BTreeMap<String, f64>,
    pub operator: CurvatureOperator,
    pub flags: ModelFlags,
    pub known_cover: Option<CoverClass>,
}

/// Named real parameters, e.g. from `k=v` pairs.
pub type Params = BTreeMap<String, f64>;

fn param(params: &Params, name: &str, default: Option<f64>) -> Result<f64, ModelError> {
    let v = match (params.get(name), default) {
        (Some(&v), _) => v,
        (None, Some(d)) => d,
        (None, None) => {
            return Err(ModelError::BadParameter {
                name: name.into(),
                reason: "missing".into(),
            })
        }
    };
    if !v.is_finite() {
        return Err(ModelError::BadParameter {
            name: name.into(),
            reason: format!("not finite: {v}"),
        });
    }
    Ok(v)
}

fn positive(params: &Params, name: &str, default: Option<f64>) -> Result<f64, ModelError> {
    let v = param(params, name, default)?;
    if v <= 0.0 {
        return Err(ModelError::BadParameter {
            name: name.into(),
            reason: format!("must be positive, got {v}"),
        });
    }
    Ok(v)
}

fn check_known(params: &Params, allowed: &[&str]) -> Result<(), ModelError> {
    match params.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(ModelError::BadParameter {
            name: k.clone(),
            reason: format!("not a parameter of this model (expected {allowed:?})"),
        }),
        None => Ok(()),
    }
}

fn kahler_operator(s: f64) -> CurvatureOperator {
    let shift = s / 12.0;
    CurvatureOperator::from_blocks(&Blocks {
        sd: Matrix3::from_diagonal(&Vector3::new(-s / 12.0 + shift, -s / 12.0 + shift, s / 6.0 + shift)),
        off: Matrix3::zeros(),
        asd: Matrix3::identity() * shift,
    })
    .to_basis(Basis::Coordinate)
}

/// `W+` has the spectrum `(−s/12, −s/12, s/6)` of a Kähler metric with the
/// orientation of its complex structure.
fn kahler_pattern(spectrum: &Spectrum, s: f64, tol: &Tolerances) -> bool {
    let mut pattern = [-s / 12.0, -s / 12.0, s / 6.0];
    pattern.sort_by(f64::total_cmp);
    let eps = tol.classification * s.abs().max(1.0);
    spectrum
        .as_array()
        .iter()
        .zip(pattern)
        .all(|(a, b)| (a - b).abs() <= eps)
}

/// Builds a catalog model. Parameter names: `r` for `sphere4` and
/// `hyperbolic4` (default 1), `a` and `b` for `surfaceProduct` (required),
/// `s` for `fubiniStudy` (default 24) and `bergman` (default −24).
pub fn catalog(name: &str, params: &Params) -> Result<ModelSpec, ModelError> {
    let (operator, known_cover, stored) = match name {
        "flat" => {
            check_known(params, &[])?;
            (CurvatureOperator::zero(), Some(CoverClass::Flat), Params::new())
        }
        "sphere4" | "hyperbolic4" => {
            check_known(params, &["r"])?;
            let r = positive(params, "r", Some(1.0))?;
            let k = if name == "sphere4" { 1.0 } else { -1.0 } / (r * r);
            (
                CurvatureOperator::coordinate(Matrix6::identity() * k),
                Some(CoverClass::NotSaturated),
                Params::from([("r".to_string(), r)]),
            )
        }
        "surfaceProduct" => {
            check_known(params, &["a", "b"])?;
            let a = param(params, "a", None)?;
            let b = param(params, "b", None)?;
            let op = CurvatureOperator::coordinate(Matrix6::from_diagonal(&Vector6::new(a, 0.0, 0.0, 0.0, 0.0, b)));
            let cover = if a != b {
                None
            } else if a > 0.0 {
                Some(CoverClass::SphereProduct)
            } else if a < 0.0 {
                Some(CoverClass::HyperbolicPlaneProduct)
            } else {
                Some(CoverClass::Flat)
            };
            (op, cover, Params::from([("a".to_string(), a), ("b".to_string(), b)]))
        }
        "fubiniStudy" | "bergman" => {
            check_known(params, &["s"])?;
            let fs = name == "fubiniStudy";
            let s = param(params, "s", Some(if fs { 24.0 } else { -24.0 }))?;
            if (fs && s <= 0.0) || (!fs && s >= 0.0) {
                return Err(ModelError::BadParameter {
                    name: "s".into(),
                    reason: format!("{name} needs s {} 0, got {s}", if fs { ">" } else { "<" }),
                });
            }
            (
                kahler_operator(s),
                Some(CoverClass::NotSaturated),
                Params::from([("s".to_string(), s)]),
            )
        }
        other => return Err(ModelError::UnknownModel(other.to_string())),
    };
    let flags = model_flags(&operator)?;
    Ok(ModelSpec {
        name: name.to_string(),
        parameters: stored,
        operator,
        flags,
        known_cover,
    })
}

/// Flags computed from the operator itself.
pub fn model_flags(op: &CurvatureOperator) -> Result<ModelFlags, ModelError> {
    let tol = Tolerances::default();
    let d = decompose_with(op, &tol)?;
    let cert = certify_sec_sign_with(op, &CertifyConfig::default(), &tol)?;
    let eps = CertifyConfig::default().tolerance * op.spectral_norm().max(1.0);
    let sec_sign = match cert.verdict {
        Verdict::NonNegative if cert.q_max_upper <= eps => SecSign::Zero,
        Verdict::NonNegative => SecSign::NonNegative,
        Verdict::NonPositive => SecSign::NonPositive,
        // Catalog operators never land here; treat a failed certificate as
        // indefinite rather than claiming a sign.
        Verdict::Indefinite | Verdict::Inconclusive => SecSign::Indefinite,
    };
    Ok(ModelFlags {
        einstein: d.is_einstein(&tol),
        kahler: kahler_pattern(&d.spectra.plus, d.s, &tol),
        sec_sign,
    })
}

/// An analytic chart and the catalog model its curvature should equal.
#[derive(Debug, Clone)]
pub struct ChartModel {
    pub chart: MetricChart,
    pub model: ModelSpec,
    /// A point where the chart is well inside its domain.
    pub sample_point: [f64; 4],
}

/// `flatChart`, `sphereProductChart(a, b)` on `(θ₁, φ₁, θ₂, φ₂)` with
/// curvatures `a, b > 0` (default 1), and `hyperbolic4HalfSpace` on the
/// upper half space `x₄ > 0`.
pub fn chart_for(name: &str, params: &Params) -> Result<ChartModel, ModelError> {
    match name {
        "flatChart" => {
            check_known(params, &[])?;
            Ok(ChartModel {
                chart: MetricChart::new(name, [-10.0; 4], [10.0; 4], 0.01, |_| Matrix4::identity()),
                model: catalog("flat", &Params::new())?,
                sample_point: [0.0; 4],
            })
        }
        "sphereProductChart" => {
            check_known(params, &["a", "b"])?;
            let a = positive(params, "a", Some(1.0))?;
            let b = positive(params, "b", Some(1.0))?;
            let chart = MetricChart::new(name, [0.0, -PI, 0.0, -PI], [PI, PI, PI, PI], 0.01, move |p| {
                Matrix4::from_diagonal(&Vector4::new(
                    1.0 / a,
                    p[0].sin().powi(2) / a,
                    1.0 / b,
                    p[2].sin().powi(2) / b,
                ))
            });
            Ok(ChartModel {
                chart,
                model: catalog("surfaceProduct", &Params::from([("a".into(), a), ("b".into(), b)]))?,
                sample_point: [PI / 2.0, 0.0, PI / 2.0, 0.0],
            })
        }
        "hyperbolic4HalfSpace" => {
            check_known(params, &[])?;
            let chart = MetricChart::new(name, [-10.0, -10.0, -10.0, 0.0], [10.0, 10.0, 10.0, 10.0], 0.01, |p| {
                Matrix4::identity() / (p[3] * p[3])
            });
            Ok(ChartModel {
                chart,
                model: catalog("hyperbolic4", &Params::new())?,
                sample_point: [0.0, 0.0, 0.0, 1.0],
            })
        }
        other => Err(ModelError::UnknownChart(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvops::{char_densities, classify_equality, decompose, CurvatureSign, ExactInvariants};
    use crate::numgeom::curvature_at;
    use crate::secsign::einstein_sec_range;
    use num_traits::Zero;

    fn p(pairs: &[(&str, f64)]) -> Params {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn surface_products() {
        let m = catalog("surfaceProduct", &p(&[("a", -1.0), ("b", -1.0)])).unwrap();
        assert!(m.flags.einstein);
        assert!(m.flags.kahler);
        assert_eq!(m.flags.sec_sign, SecSign::NonPositive);
        assert_eq!(m.known_cover, Some(CoverClass::HyperbolicPlaneProduct));

        let m = catalog("surfaceProduct", &p(&[("a", 1.0), ("b", 2.0)])).unwrap();
        assert!(!m.flags.einstein);
        assert_eq!(m.flags.sec_sign, SecSign::NonNegative);
        assert_eq!(m.known_cover, None);

        let m = catalog("surfaceProduct", &p(&[("a", 1.0), ("b", -3.0)])).unwrap();
        assert_eq!(m.flags.sec_sign, SecSign::Indefinite);
    }

    #[test]
    fn space_forms() {
        let m = catalog("sphere4", &Params::new()).unwrap();
        assert_eq!(*m.operator.matrix(), Matrix6::identity());
        assert_eq!(m.flags.sec_sign, SecSign::NonNegative);
        assert!(!m.flags.kahler);
        let d = decompose(&m.operator).unwrap();
        assert_eq!(einstein_sec_range(&d).unwrap(), (1.0, 1.0));

        let m = catalog("hyperbolic4", &p(&[("r", 2.0)])).unwrap();
        assert_eq!(*m.operator.matrix(), Matrix6::identity() * -0.25);
        assert_eq!(m.flags.sec_sign, SecSign::NonPositive);

        let m = catalog("flat", &Params::new()).unwrap();
        assert_eq!(m.flags.sec_sign, SecSign::Zero);
        assert!(m.flags.einstein && m.flags.kahler);
    }

    #[test]
    fn kahler_models() {
        let fs = catalog("fubiniStudy", &Params::new()).unwrap();
        assert!(fs.flags.einstein && fs.flags.kahler);
        assert_eq!(fs.flags.sec_sign, SecSign::NonNegative);
        let d = decompose(&fs.operator).unwrap();
        assert_eq!(d.s, 24.0);
        assert_eq!(d.spectra.plus.as_array(), [-2.0, -2.0, 4.0]);
        assert_eq!(einstein_sec_range(&d).unwrap(), (1.0, 4.0));
        assert!(ExactInvariants::of(&d).kahler_residual().is_zero());
        assert_eq!(char_densities(&d).unwrap().ratio_exact.as_deref(), Some("3"));

        let b = catalog("bergman", &Params::new()).unwrap();
        assert!(b.flags.kahler);
        assert_eq!(b.flags.sec_sign, SecSign::NonPositive);
        let d = decompose(&b.operator).unwrap();
        assert!(ExactInvariants::of(&d).kahler_residual().is_zero());
    }

    #[test]
    fn known_covers_match_classification() {
        let cases: Vec<(&str, Params)> = vec![
            ("flat", Params::new()),
            ("sphere4", Params::new()),
            ("hyperbolic4", Params::new()),
            ("surfaceProduct", p(&[("a", 1.0), ("b", 1.0)])),
            ("surfaceProduct", p(&[("a", -2.0), ("b", -2.0)])),
            ("fubiniStudy", Params::new()),
            ("bergman", Params::new()),
        ];
        for (name, params) in cases {
            let m = catalog(name, &params).unwrap();
            let sign = match m.flags.sec_sign {
                SecSign::NonNegative => CurvatureSign::NonNegative,
                SecSign::NonPositive | SecSign::Zero => CurvatureSign::NonPositive,
                SecSign::Indefinite => unreachable!(),
            };
            let d = decompose(&m.operator).unwrap();
            assert_eq!(Some(classify_equality(&d, sign).unwrap()), m.known_cover, "{name}");
        }
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(
            catalog("torus", &Params::new()),
            Err(ModelError::UnknownModel(_))
        ));
        assert!(matches!(
            catalog("sphere4", &p(&[("r", -1.0)])),
            Err(ModelError::BadParameter { .. })
        ));
        assert!(matches!(
            catalog("surfaceProduct", &p(&[("a", 1.0)])),
            Err(ModelError::BadParameter { .. })
        ));
        assert!(matches!(
            catalog("fubiniStudy", &p(&[("s", -24.0)])),
            Err(ModelError::BadParameter { .. })
        ));
        assert!(matches!(
            catalog("flat", &p(&[("r", 1.0)])),
            Err(ModelError::BadParameter { .. })
        ));
        assert!(matches!(
            chart_for("klein", &Params::new()),
            Err(ModelError::UnknownChart(_))
        ));
    }

    #[test]
    fn charts_reproduce_catalog_at_sample_points() {
        for name in CHART_NAMES {
            let cm = chart_for(name, &Params::new()).unwrap();
            let c = curvature_at(&cm.chart, &cm.sample_point, None).unwrap();
            let err = (c.operator.coordinate_matrix() - cm.model.operator.coordinate_matrix()).amax();
            assert!(err <= 1e-6, "{name}: {err}");
        }
        let cm = chart_for("sphereProductChart", &Params::new()).unwrap();
        assert_eq!(cm.chart.metric_at(&cm.sample_point).unwrap(), Matrix4::identity());
    }
}

//! Cohomogeneity-one metrics `u² dt² + v²(σ₁² + σ₂²) + w² σ₃²` on
//! `(0, L) × S³`, the Page metric on `CP² # -CP²`, and the pipeline that
//! checks it: Einstein residual, a negatively curved plane, and `χ`, `τ` by
//! quadrature.
//!
//! The Page metric is taken from the cohomogeneity-one Einstein family
//!
//! ```text
//! v² = F,  u² = F/Δ,  w² = k²Δ/F,   F = ar² − k²/4a,
//! Δ = −(Λa/3) r⁴ + ((Λk²/2 + a)/a) r² + c₁ r + k²(Λk² + 4a)/16a³,
//! ```
//!
//! with `a = −1`, `Λ = 1`, `c₁ = 0`, `k = 2n`, where `Δ` has two simple roots
//! `±r₀` and `w` closes smoothly (`dw/dρ = 1/2` in arclength `ρ`) at both.
//! Then `Δ = (r₀² − r²)(q − r²)/3` and `n`, `r₀` are fixed by
//! `ν⁴ + 4ν³ − 6ν² + 12ν − 3 = 0`, `ν = r₀/n`, `n² = 3(1 + ν²)/(3 + 6ν² − ν⁴)`.
//! The radial coordinate is `ξ ∈ (0, π)` with `r = −r₀ cos ξ`, in which
//! `u, v, w²` are analytic up to the ends.
//!
//! None of this is trusted: [`verify_einstein`] recomputes the Ricci tensor
//! from the metric by finite differences.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix4;
use rayon::prelude::*;
use serde::Serialize;

use crate::curvops::{decompose_with, densities_unchecked, gl_defect_with};
use crate::error::{GeomError, PageError};
use crate::numgeom::{curvature_at, gauss_legendre_on, MetricChart, PointCurvature};
use crate::operator::CurvatureOperator;
use crate::secsign::{certify_sec_sign_with, einstein_sec_range_with, CertifyConfig, PlaneWitness};
use crate::Tolerances;

type Profile = dyn Fn(f64) -> [f64; 3] + Send + Sync;

/// Parameters of the Page metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PageParameters {
    /// Cosmological constant: `Ric = Λ g`.
    pub lambda: f64,
    pub nu: f64,
    pub n: f64,
    /// Fibre parameter `k = 2n`.
    pub k: f64,
    pub r0: f64,
    pub q: f64,
}

impl PageParameters {
    pub fn compute() -> Self {
        let f = |x: f64| x.powi(4) + 4.0 * x.powi(3) - 6.0 * x * x + 12.0 * x - 3.0;
        // f is increasing on [0, 1] with f(0) < 0 < f(1).
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let nu = 0.5 * (lo + hi);
        let n2 = 3.0 * (1.0 + nu * nu) / (3.0 + 6.0 * nu * nu - nu.powi(4));
        let n = n2.sqrt();
        let r0 = nu * n;
        let q = 3.0 * n2 * (1.0 - n2) / (r0 * r0);
        PageParameters {
            lambda: 1.0,
            nu,
            n,
            k: 2.0 * n,
            r0,
            q,
        }
    }

    /// `(u, v, w)` at `ξ`.
    pub fn profile(&self, xi: f64) -> [f64; 3] {
        let r = -self.r0 * xi.cos();
        let f = self.n * self.n - r * r;
        let u = (3.0 * f / (self.q - r * r)).sqrt();
        let v = f.sqrt();
        let w = 2.0 * self.n * self.r0 / 3f64.sqrt() * xi.sin().abs() * ((self.q - r * r) / f).sqrt();
        [u, v, w]
    }
}

/// Arclength slope of `w` and the value of `v` at one end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EndpointData {
    pub t: f64,
    pub v: f64,
    pub w: f64,
    /// `dw/dρ`; smooth closure of the `ψ` circle (period `4π`) needs `1/2`.
    pub w_slope: f64,
    /// `dv/dρ`, relevant when `v` also collapses.
    pub v_slope: f64,
}

#[derive(Clone)]
pub struct CohomOneMetric {
    pub name: String,
    /// The radial coordinate runs over `(0, length)`.
    pub length: f64,
    /// Einstein constant claimed by the construction, if any.
    pub lambda: Option<f64>,
    pub page: Option<PageParameters>,
    /// `+1`, or `−1` for the orientation-reversed chart.
    pub orientation: f64,
    pub suggested_step: f64,
    profile: Arc<Profile>,
}

impl fmt::Debug for CohomOneMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CohomOneMetric")
            .field("name", &self.name)
            .field("length", &self.length)
            .field("lambda", &self.lambda)
            .field("page", &self.page)
            .field("orientation", &self.orientation)
            .finish_non_exhaustive()
    }
}

impl CohomOneMetric {
    pub fn new<F>(name: impl Into<String>, length: f64, profile: F) -> Self
    where
        F: Fn(f64) -> [f64; 3] + Send + Sync + 'static,
    {
        CohomOneMetric {
            name: name.into(),
            length,
            lambda: None,
            page: None,
            orientation: 1.0,
            suggested_step: 0.01,
            profile: Arc::new(profile),
        }
    }

    /// `(u, v, w)` at `t`.
    pub fn uvw(&self, t: f64) -> [f64; 3] {
        (self.profile)(t)
    }

    /// `16π² u v² w`, the volume of the orbit per unit `t`.
    pub fn orbit_volume(&self, t: f64) -> f64 {
        let [u, v, w] = self.uvw(t);
        16.0 * PI * PI * u * v * v * w
    }

    /// Same functions, with `v` multiplied by `factor`.
    pub fn with_v_scaled(&self, factor: f64) -> Self {
        let inner = self.profile.clone();
        let mut out = self.clone();
        out.name = format!("{} (v x {factor})", self.name);
        out.profile = Arc::new(move |t| {
            let [u, v, w] = inner(t);
            [u, factor * v, w]
        });
        out
    }

    /// The same metric pulled back by `ψ → −ψ`, which reverses orientation.
    pub fn orientation_flipped(&self) -> Self {
        let mut out = self.clone();
        out.orientation = -self.orientation;
        out
    }

    /// Chart on `(t, θ, φ, ψ)` with
    /// `σ₁² + σ₂² = dθ² + sin²θ dφ²` and `σ₃ = dψ + cosθ dφ`.
    pub fn chart(&self) -> MetricChart {
        let profile = self.profile.clone();
        let sign = self.orientation;
        MetricChart::new(
            self.name.clone(),
            [0.0, 0.0, -PI, -2.0 * PI],
            [self.length, PI, PI, 2.0 * PI],
            self.suggested_step,
            move |p| {
                let [u, v, w] = profile(p[0]);
                let (st, ct) = p[1].sin_cos();
                let (v2, w2) = (v * v, w * w);
                let mut g = Matrix4::zeros();
                g[(0, 0)] = u * u;
                g[(1, 1)] = v2;
                g[(2, 2)] = v2 * st * st + w2 * ct * ct;
                g[(2, 3)] = sign * w2 * ct;
                g[(3, 2)] = g[(2, 3)];
                g[(3, 3)] = w2;
                g
            },
        )
    }

    /// Value of `v` and arclength slopes of `v, w` at both ends.
    pub fn endpoint_data(&self) -> [EndpointData; 2] {
        let h = 1e-6 * self.length;
        let end = |t: f64, inward: f64| {
            let [u0, v0, w0] = self.uvw(t);
            let [_, v1, w1] = self.uvw(t + inward * h);
            let [_, v2, w2] = self.uvw(t + 2.0 * inward * h);
            // Second-order one-sided difference.
            let d = |a: f64, b: f64, c: f64| (-3.0 * a + 4.0 * b - c) / (2.0 * h * u0);
            EndpointData {
                t,
                v: v0,
                w: w0,
                w_slope: d(w0, w1, w2),
                v_slope: d(v0, v1, v2),
            }
        };
        [end(0.0, 1.0), end(self.length, -1.0)]
    }

    /// Sample point on the orbit at `t`, away from the Euler-angle
    /// degeneracy at `θ ∈ {0, π}`.
    pub fn sample_point(t: f64) -> [f64; 4] {
        [t, PI / 2.0, 0.0, 0.0]
    }

    /// Curvature at the orbit through `t`, with the step reduced near the
    /// ends so that the stencil stays inside `(0, L)`.
    pub fn curvature(&self, t: f64) -> Result<PointCurvature, GeomError> {
        let dist = t.min(self.length - t);
        let step = self.suggested_step.min(dist / 4.0);
        curvature_at(&self.chart(), &Self::sample_point(t), Some(step))
    }
}

/// The Page metric.
pub fn page_metric() -> CohomOneMetric {
    let p = PageParameters::compute();
    let mut m = CohomOneMetric::new("page", PI, move |xi| p.profile(xi));
    m.lambda = Some(p.lambda);
    m.page = Some(p);
    m
}

/// Unit round `S⁴ = dt² + sin²t · (σ₁² + σ₂² + σ₃²)/4`.
pub fn round_s4() -> CohomOneMetric {
    let mut m = CohomOneMetric::new("roundS4", PI, |t| {
        let s = 0.5 * t.sin();
        [1.0, s, s]
    });
    m.lambda = Some(3.0);
    m
}

/// `n` Chebyshev points of the first kind on `(2h, L − 2h)`, `h` the
/// suggested step, so that every stencil at the full step stays inside the
/// chart. Closer to the ends the ψ circle collapses and the rounding error of
/// the differences grows like `1/(h²w²)`.
pub fn chebyshev_radii(m: &CohomOneMetric, n: usize) -> Vec<f64> {
    let margin = 2.0 * m.suggested_step;
    let half = 0.5 * (m.length - 2.0 * margin);
    (0..n)
        .map(|i| margin + half * (1.0 - ((2 * i + 1) as f64 * PI / (2 * n) as f64).cos()))
        .collect()
}

/// Tolerances for finite-difference operators: structural checks at ten
/// times the reported error.
fn numeric_tolerances(c: &PointCurvature) -> Tolerances {
    Tolerances {
        structural: (10.0 * c.error_estimate).max(1e-9),
        classification: 1e-6,
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EinsteinCheck {
    pub max_residual: f64,
    /// Mean of `s/4` over the radii.
    pub lambda: f64,
    /// `(max − min)/|mean|` of `s/4`.
    pub lambda_spread: f64,
    pub radii: Vec<f64>,
    pub residuals: Vec<f64>,
    pub lambdas: Vec<f64>,
    /// Reported, not asserted.
    pub gl_defects: Vec<f64>,
    pub max_error_estimate: f64,
}

pub fn verify_einstein(m: &CohomOneMetric, radii: &[f64]) -> Result<EinsteinCheck, GeomError> {
    if radii.is_empty() {
        return Err(GeomError::BadSteps("no radii".into()));
    }
    let points: Vec<PointCurvature> = radii.par_iter().map(|&t| m.curvature(t)).collect::<Result<_, _>>()?;
    let mut gl_defects = Vec::with_capacity(points.len());
    for c in &points {
        let tol = numeric_tolerances(c);
        let d = decompose_with(&c.operator, &tol)?;
        gl_defects.push(gl_defect_with(&d, &tol).defect);
    }
    let residuals: Vec<f64> = points.iter().map(|c| c.einstein_residual).collect();
    let lambdas: Vec<f64> = points.iter().map(|c| c.scalar / 4.0).collect();
    let mean = lambdas.iter().sum::<f64>() / lambdas.len() as f64;
    let (lo, hi) = lambdas
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    Ok(EinsteinCheck {
        max_residual: residuals.iter().copied().fold(0.0, f64::max),
        lambda: mean,
        lambda_spread: (hi - lo) / mean.abs().max(f64::MIN_POSITIVE),
        radii: radii.to_vec(),
        residuals,
        lambdas,
        gl_defects,
        max_error_estimate: points.iter().map(|c| c.error_estimate).fold(0.0, f64::max),
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NegativeCurvature {
    pub min_sec: f64,
    pub max_sec: f64,
    pub witness_radius: f64,
    pub witness: PlaneWitness,
}

/// Minimum sectional curvature over the given orbits, from the exact
/// Einstein range of each orbit's operator.
pub fn certify_negative_curvature(m: &CohomOneMetric, radii: &[f64]) -> Result<NegativeCurvature, PageError> {
    let ops: Vec<(f64, CurvatureOperator, Tolerances)> = radii
        .par_iter()
        .map(|&t| m.curvature(t).map(|c| (t, c.operator, numeric_tolerances(&c))))
        .collect::<Result<_, _>>()?;
    negative_curvature_of(&ops)
}

/// Same sweep over operators given directly, tagged by a radius label.
pub fn certify_negative_curvature_ops(ops: &[(f64, CurvatureOperator)]) -> Result<NegativeCurvature, PageError> {
    let tagged: Vec<_> = ops.iter().map(|&(t, op)| (t, op, Tolerances::default())).collect();
    negative_curvature_of(&tagged)
}

fn negative_curvature_of(ops: &[(f64, CurvatureOperator, Tolerances)]) -> Result<NegativeCurvature, PageError> {
    let mut best: Option<NegativeCurvature> = None;
    let mut max_sec = f64::NEG_INFINITY;
    for (t, op, tol) in ops {
        let d = decompose_with(op, tol)?;
        let (lo, hi) = einstein_sec_range_with(&d, tol)?;
        max_sec = max_sec.max(hi);
        if best.as_ref().is_none_or(|b| lo < b.min_sec) {
            let cert = certify_sec_sign_with(op, &CertifyConfig::default(), tol)?;
            best = Some(NegativeCurvature {
                min_sec: lo,
                max_sec: hi,
                witness_radius: *t,
                witness: cert.min_witness,
            });
        }
    }
    let mut out = best.ok_or(GeomError::BadSteps("no radii".into()))?;
    out.max_sec = max_sec;
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CharNumbers {
    pub chi: f64,
    pub tau: f64,
    /// Change of each value when the node count is doubled.
    pub chi_tolerance: f64,
    pub tau_tolerance: f64,
    pub nodes: usize,
    pub interval: (f64, f64),
    pub volume: f64,
}

/// Gauss–Legendre estimate of `χ = ∫ e·Vol` and `τ = ∫ p·Vol` with the
/// Euler and signature densities `e`, `p` of each orbit. The interval is
/// clamped to `[εL, (1 − ε)L]`.
pub fn integrate_char_numbers(m: &CohomOneMetric, nodes: usize) -> Result<CharNumbers, GeomError> {
    integrate_char_numbers_with(m, nodes, 1e-3)
}

pub fn integrate_char_numbers_with(m: &CohomOneMetric, nodes: usize, epsilon: f64) -> Result<CharNumbers, GeomError> {
    let interval = (epsilon * m.length, (1.0 - epsilon) * m.length);
    let rule = |n: usize| -> Result<(f64, f64, f64), GeomError> {
        let (ts, ws) = gauss_legendre_on(interval.0, interval.1, n)?;
        let rows: Vec<(f64, f64, f64)> = ts
            .par_iter()
            .zip(ws.par_iter())
            .map(|(&t, &wt)| -> Result<(f64, f64, f64), GeomError> {
                let c = m.curvature(t)?;
                let d = decompose_with(&c.operator, &numeric_tolerances(&c))?;
                let dens = densities_unchecked(&d);
                let vol = wt * m.orbit_volume(t);
                Ok((dens.euler_density * vol, dens.signature_density * vol, vol))
            })
            .collect::<Result<_, _>>()?;
        Ok(rows
            .iter()
            .fold((0.0, 0.0, 0.0), |acc, r| (acc.0 + r.0, acc.1 + r.1, acc.2 + r.2)))
    };
    let (chi_c, tau_c, _) = rule(nodes)?;
    let (chi, tau, volume) = rule(2 * nodes)?;
    let (chi_tolerance, tau_tolerance) = ((chi - chi_c).abs(), (tau - tau_c).abs());
    if chi_tolerance > 1e-3 {
        return Err(GeomError::NonConvergent {
            quantity: "chi",
            change: chi_tolerance,
        });
    }
    if tau_tolerance > 1e-3 {
        return Err(GeomError::NonConvergent {
            quantity: "tau",
            change: tau_tolerance,
        });
    }
    Ok(CharNumbers {
        chi,
        tau,
        chi_tolerance,
        tau_tolerance,
        nodes: 2 * nodes,
        interval,
        volume,
    })
}

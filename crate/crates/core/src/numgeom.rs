//! Curvature of coordinate metrics by finite differences, and Gauss–Legendre
//! quadrature.
//!
//! Derivatives of `g` use fourth-order central stencils; mixed second
//! derivatives use the tensor product of the first-derivative stencil. With
//! Christoffel symbols `Γⁿ_kl` the fully covariant Riemann tensor is
//!
//! ```text
//! R_iklm = ½(g_im,kl + g_kl,im − g_il,km − g_km,il) + g_np(Γⁿ_kl Γᵖ_im − Γⁿ_km Γᵖ_il)
//! ```
//!
//! and it is re-expressed in the orthonormal frame obtained by Gram–Schmidt
//! on the coordinate vectors, so that `R̂_abab` is the sectional curvature of
//! the frame plane `e_a ∧ e_b`.

// Tensor components read most clearly with explicit indices.
#![allow(clippy::needless_range_loop)]

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix4, Matrix6};
use serde::Serialize;

use crate::error::GeomError;
use crate::operator::CurvatureOperator;
use crate::twoform::INDEX_PAIRS;

pub type MetricFn = dyn Fn(&[f64; 4]) -> Matrix4<f64> + Send + Sync;

/// A metric on an open coordinate box of `R⁴`.
#[derive(Clone)]
pub struct MetricChart {
    pub name: String,
    pub lower: [f64; 4],
    pub upper: [f64; 4],
    pub suggested_step: f64,
    metric: Arc<MetricFn>,
}

impl fmt::Debug for MetricChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricChart")
            .field("name", &self.name)
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .field("suggested_step", &self.suggested_step)
            .finish_non_exhaustive()
    }
}

impl MetricChart {
    pub fn new<F>(name: impl Into<String>, lower: [f64; 4], upper: [f64; 4], suggested_step: f64, metric: F) -> Self
    where
        F: Fn(&[f64; 4]) -> Matrix4<f64> + Send + Sync + 'static,
    {
        MetricChart {
            name: name.into(),
            lower,
            upper,
            suggested_step,
            metric: Arc::new(metric),
        }
    }

    pub fn check_inside(&self, p: &[f64; 4]) -> Result<(), GeomError> {
        for axis in 0..4 {
            let v = p[axis];
            if !(v > self.lower[axis] && v < self.upper[axis]) {
                return Err(GeomError::OutsideDomain {
                    axis,
                    value: v,
                    lo: self.lower[axis],
                    hi: self.upper[axis],
                });
            }
        }
        Ok(())
    }

    /// Metric at `p`, checked to be inside the domain and positive definite.
    pub fn metric_at(&self, p: &[f64; 4]) -> Result<Matrix4<f64>, GeomError> {
        self.check_inside(p)?;
        let g = self.eval(p);
        if g.cholesky().is_none() {
            return Err(GeomError::SingularMetric { point: *p });
        }
        Ok(g)
    }

    fn eval(&self, p: &[f64; 4]) -> Matrix4<f64> {
        let g = (self.metric)(p);
        (g + g.transpose()) * 0.5
    }

    fn check_margin(&self, p: &[f64; 4], step: f64) -> Result<(), GeomError> {
        if !(step.is_finite() && step > 0.0) {
            return Err(GeomError::BadSteps(format!("step must be positive, got {step}")));
        }
        self.check_inside(p)?;
        let required = 2.0 * step;
        for axis in 0..4 {
            let margin = (p[axis] - self.lower[axis]).min(self.upper[axis] - p[axis]);
            if margin < required {
                return Err(GeomError::StepTooLarge {
                    axis,
                    step,
                    margin,
                    required,
                });
            }
        }
        Ok(())
    }
}

/// Curvature of a chart at one point, in the orthonormal frame.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PointCurvature {
    pub operator: CurvatureOperator,
    #[serde(with = "crate::serde_mat4")]
    pub ricci: Matrix4<f64>,
    pub scalar: f64,
    pub einstein_residual: f64,
    pub step_used: f64,
    pub error_estimate: f64,
    /// Columns are the frame vectors in coordinates.
    #[serde(with = "crate::serde_mat4")]
    pub frame: Matrix4<f64>,
}

// Stencil weights at offsets -2..=2, times 12h and 12h² respectively.
// Integer weights keep the sums exact on constant metrics.
const D1: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
const D2: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0];

struct Jet {
    g: Matrix4<f64>,
    /// `dg[k]` = ∂_k g.
    dg: [Matrix4<f64>; 4],
    /// `ddg[k][l]` = ∂_k ∂_l g.
    ddg: [[Matrix4<f64>; 4]; 4],
}

fn shifted(p: &[f64; 4], moves: &[(usize, f64)]) -> [f64; 4] {
    let mut q = *p;
    for &(axis, d) in moves {
        q[axis] += d;
    }
    q
}

fn jet(chart: &MetricChart, p: &[f64; 4], h: f64) -> Jet {
    let g = chart.eval(p);
    let mut dg = [Matrix4::zeros(); 4];
    let mut ddg = [[Matrix4::zeros(); 4]; 4];
    for k in 0..4 {
        let mut first = Matrix4::zeros();
        let mut second = Matrix4::zeros();
        for (i, off) in (-2..=2).enumerate() {
            let gi = if off == 0 {
                g
            } else {
                chart.eval(&shifted(p, &[(k, off as f64 * h)]))
            };
            first += gi * D1[i];
            second += gi * D2[i];
        }
        dg[k] = first / (12.0 * h);
        ddg[k][k] = second / (12.0 * h * h);
    }
    for k in 0..4 {
        for l in (k + 1)..4 {
            let mut mixed = Matrix4::zeros();
            for (i, oi) in (-2..=2).enumerate() {
                if D1[i] == 0.0 {
                    continue;
                }
                for (j, oj) in (-2..=2).enumerate() {
                    if D1[j] == 0.0 {
                        continue;
                    }
                    let q = shifted(p, &[(k, oi as f64 * h), (l, oj as f64 * h)]);
                    mixed += chart.eval(&q) * (D1[i] * D1[j]);
                }
            }
            ddg[k][l] = mixed / (144.0 * h * h);
            ddg[l][k] = ddg[k][l];
        }
    }
    Jet { g, dg, ddg }
}

/// Covariant Riemann tensor in coordinates, indexed `[i][k][l][m]`.
fn riemann(j: &Jet) -> Result<[[[[f64; 4]; 4]; 4]; 4], ()> {
    let ginv = j.g.try_inverse().ok_or(())?;
    let d = |a: usize, b: usize, k: usize| j.dg[k][(a, b)];
    let dd = |a: usize, b: usize, k: usize, l: usize| j.ddg[k][l][(a, b)];
    // Christoffel symbols of the first kind Γ_m,kl and second kind Γⁿ_kl.
    let mut first = [[[0.0; 4]; 4]; 4];
    for m in 0..4 {
        for k in 0..4 {
            for l in 0..4 {
                first[m][k][l] = 0.5 * (d(m, k, l) + d(m, l, k) - d(k, l, m));
            }
        }
    }
    let mut gamma = [[[0.0; 4]; 4]; 4];
    for n in 0..4 {
        for k in 0..4 {
            for l in 0..4 {
                gamma[n][k][l] = (0..4).map(|m| ginv[(n, m)] * first[m][k][l]).sum();
            }
        }
    }
    let mut r = [[[[0.0; 4]; 4]; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            for l in 0..4 {
                for m in 0..4 {
                    let second = 0.5 * (dd(i, m, k, l) + dd(k, l, i, m) - dd(i, l, k, m) - dd(k, m, i, l));
                    let mut quad = 0.0;
                    for n in 0..4 {
                        // g_np Γᵖ_im = Γ_n,im
                        quad += gamma[n][k][l] * first[n][i][m] - gamma[n][k][m] * first[n][i][l];
                    }
                    r[i][k][l][m] = second + quad;
                }
            }
        }
    }
    Ok(r)
}

/// Orthonormal frame from Gram–Schmidt on the coordinate vectors:
/// `E = (Lᵀ)⁻¹` with `g = LLᵀ`, upper triangular with positive diagonal.
fn frame(g: &Matrix4<f64>) -> Option<Matrix4<f64>> {
    let l = g.cholesky()?.l();
    l.transpose().try_inverse()
}

struct Raw {
    operator: Matrix6<f64>,
    ricci: Matrix4<f64>,
}

fn raw_curvature(chart: &MetricChart, p: &[f64; 4], h: f64, e: &Matrix4<f64>) -> Result<Raw, GeomError> {
    let j = jet(chart, p, h);
    let r = riemann(&j).map_err(|_| GeomError::SingularMetric { point: *p })?;
    let mut rhat = [[[[0.0; 4]; 4]; 4]; 4];
    // Contract one index at a time.
    let mut t1 = r;
    for step in 0..4 {
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for dd in 0..4 {
                        let mut acc = 0.0;
                        for x in 0..4 {
                            let (idx, coef) = match step {
                                0 => (t1[x][b][c][dd], e[(x, a)]),
                                1 => (t1[a][x][c][dd], e[(x, b)]),
                                2 => (t1[a][b][x][dd], e[(x, c)]),
                                _ => (t1[a][b][c][x], e[(x, dd)]),
                            };
                            acc += idx * coef;
                        }
                        rhat[a][b][c][dd] = acc;
                    }
                }
            }
        }
        t1 = rhat;
    }
    let mut operator = Matrix6::zeros();
    for (p1, &(a, b)) in INDEX_PAIRS.iter().enumerate() {
        for (p2, &(c, d)) in INDEX_PAIRS.iter().enumerate() {
            operator[(p1, p2)] = rhat[a][b][c][d];
        }
    }
    let ricci = Matrix4::from_fn(|b, d| (0..4).map(|a| rhat[a][b][a][d]).sum());
    Ok(Raw { operator, ricci })
}

fn einstein_residual(ricci: &Matrix4<f64>) -> (f64, f64) {
    let s = ricci.trace();
    let res = (ricci - Matrix4::identity() * (s / 4.0)).amax() / s.abs().max(1.0);
    (s, res)
}

/// Curvature at `point` with Richardson extrapolation over steps `h, h/2`.
/// `step = None` uses the chart's suggested step.
pub fn curvature_at(chart: &MetricChart, point: &[f64; 4], step: Option<f64>) -> Result<PointCurvature, GeomError> {
    let h = step.unwrap_or(chart.suggested_step);
    chart.check_margin(point, h)?;
    let g = chart.metric_at(point)?;
    let e = frame(&g).ok_or(GeomError::SingularMetric { point: *point })?;
    let coarse = raw_curvature(chart, point, h, &e)?;
    let fine = raw_curvature(chart, point, 0.5 * h, &e)?;
    let op = (fine.operator * 16.0 - coarse.operator) / 15.0;
    let op = (op + op.transpose()) * 0.5;
    let ricci = (fine.ricci * 16.0 - coarse.ricci) / 15.0;
    let ricci = (ricci + ricci.transpose()) * 0.5;
    if !op.iter().all(|x| x.is_finite()) {
        return Err(GeomError::SingularMetric { point: *point });
    }
    let (scalar, einstein_residual) = einstein_residual(&ricci);

    // Truncation estimate from the step pair plus a rounding floor for the
    // second differences at the finer step.
    let truncation = (fine.operator - coarse.operator).amax() / 15.0;
    let scale = g.amax() * e.amax().powi(2) * e.amax().powi(2);
    let hf = 0.5 * h;
    let rounding = 16.0 * f64::EPSILON * scale / (hf * hf);
    let error_estimate = truncation + rounding + 1e-14 * op.amax().max(1.0);

    Ok(PointCurvature {
        operator: CurvatureOperator::coordinate(op),
        ricci,
        scalar,
        einstein_residual,
        step_used: h,
        error_estimate,
        frame: e,
    })
}

/// Max error of the raw fourth-order operator per step.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConvergenceStudy {
    pub steps: Vec<f64>,
    pub max_errors: Vec<f64>,
    /// Least-squares slope of log error against log step; `None` when all
    /// errors are at rounding level.
    pub slope: Option<f64>,
}

pub fn convergence_study(chart: &MetricChart, point: &[f64; 4], steps: &[f64]) -> Result<ConvergenceStudy, GeomError> {
    if steps.len() < 3 {
        return Err(GeomError::BadSteps(format!(
            "need at least 3 steps, got {}",
            steps.len()
        )));
    }
    if steps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(GeomError::BadSteps("steps must be strictly decreasing".into()));
    }
    for &h in steps {
        chart.check_margin(point, h)?;
    }
    let finest = *steps.last().expect("non-empty");
    let reference = curvature_at(chart, point, Some(finest))?;
    let e = reference.frame;
    let refm = reference.operator.coordinate_matrix();
    let mut max_errors = Vec::with_capacity(steps.len());
    for &h in steps {
        let raw = raw_curvature(chart, point, h, &e)?;
        max_errors.push((raw.operator - refm).amax());
    }
    let slope = if max_errors.iter().all(|&x| x <= 1e-12) {
        None
    } else {
        Some(log_log_slope(steps, &max_errors))
    };
    Ok(ConvergenceStudy {
        steps: steps.to_vec(),
        max_errors,
        slope,
    })
}

fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(_, &e)| e > 0.0)
        .map(|(&h, &e)| (h.ln(), e.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Nodes and weights mapped to `[a, b]`.
pub fn gauss_legendre_on(a: f64, b: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>), GeomError> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(GeomError::BadInterval { a, b });
    }
    if n < 16 {
        return Err(GeomError::TooFewNodes { nodes: n });
    }
    let (x, w) = gauss_legendre(n);
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    Ok((
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|v| half * v).collect(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Quadrature {
    pub value: f64,
    /// Change of the value when the node count is doubled.
    pub tolerance: f64,
    pub nodes: usize,
}

/// `∫ f·weight` over `[a, b]` with `nodes` and `2·nodes` points; the value
/// reported is the finer one.
pub fn orbit_quadrature<F, W>(f: F, weight: W, interval: (f64, f64), nodes: usize) -> Result<Quadrature, GeomError>
where
    F: Fn(f64) -> f64,
    W: Fn(f64) -> f64,
{
    let rule = |n: usize| -> Result<f64, GeomError> {
        let (x, w) = gauss_legendre_on(interval.0, interval.1, n)?;
        Ok(x.iter().zip(&w).map(|(&t, &wt)| wt * f(t) * weight(t)).sum())
    };
    let coarse = rule(nodes)?;
    let fine = rule(2 * nodes)?;
    Ok(Quadrature {
        value: fine,
        tolerance: (fine - coarse).abs(),
        nodes: 2 * nodes,
    })
}

//! Maximization of `zᵀQz + 2bᵀz` over the unit sphere in `R³`.
//!
//! A maximizer satisfies `(σI − Q)z = b` with `σ ≥ λmax(Q)`. Writing `Q` in
//! its eigenbasis, `σ` is the root of the secular equation
//!
//! ```text
//! Σᵢ b̃ᵢ² / (σ − λᵢ)² = 1
//! ```
//!
//! on `(λmax, λmax + |b|]`, found by bisection. When `b̃` has no component
//! along the top eigenspace the root can sit at `λmax` itself (the "hard
//! case"); the missing norm is then taken along the top eigenvector.

use nalgebra::{Matrix3, Vector3};

use crate::curvops::sorted_eigen;

const BISECTION_STEPS: usize = 80;

/// A quadratic form on `R³` with its eigen-decomposition cached.
#[derive(Debug, Clone, Copy)]
pub struct SphereQuadratic {
    matrix: Matrix3<f64>,
    /// Ascending eigenvalues.
    values: Vector3<f64>,
    vectors: Matrix3<f64>,
}

impl SphereQuadratic {
    pub fn new(matrix: Matrix3<f64>) -> Self {
        let (values, vectors) = sorted_eigen(&matrix);
        SphereQuadratic {
            matrix,
            values,
            vectors,
        }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.matrix
    }

    pub fn lambda_max(&self) -> f64 {
        self.values[2]
    }

    pub fn top_eigenvector(&self) -> Vector3<f64> {
        canonical_sign(self.vectors.column(2).into_owned())
    }

    pub fn value(&self, z: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
        z.dot(&(self.matrix * z)) + 2.0 * b.dot(z)
    }

    /// Global maximizer over `|z| = 1` and the maximal value.
    pub fn maximize(&self, b: &Vector3<f64>) -> (Vector3<f64>, f64) {
        let bnorm = b.norm();
        let top = self.lambda_max();
        if bnorm == 0.0 {
            let z = self.top_eigenvector();
            return (z, self.value(&z, b));
        }
        let bt = self.vectors.transpose() * b;
        let secular = |sigma: f64| -> f64 {
            (0..3)
                .map(|i| {
                    if bt[i] == 0.0 {
                        0.0
                    } else {
                        let d = sigma - self.values[i];
                        (bt[i] / d).powi(2)
                    }
                })
                .sum()
        };
        let (mut lo, mut hi) = (top, top + bnorm);
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if secular(mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let sigma = hi;
        let mut zt = Vector3::from_fn(|i, _| {
            if bt[i] == 0.0 {
                0.0
            } else {
                bt[i] / (sigma - self.values[i])
            }
        });
        let n2 = zt.norm_squared();
        if n2 < 1.0 {
            // Near the hard case the top component is the badly conditioned
            // one; take it from the norm constraint, on the side of b.
            let top = (zt[2] * zt[2] + 1.0 - n2).sqrt();
            zt[2] = if bt[2] < 0.0 { -top } else { top };
        }
        let z = (self.vectors * zt).normalize();
        (z, self.value(&z, b))
    }
}

/// Flips `v` so that its first non-negligible coordinate is positive.
pub(crate) fn canonical_sign(v: Vector3<f64>) -> Vector3<f64> {
    match v.iter().find(|x| x.abs() > 1e-12) {
        Some(&x) if x < 0.0 => -v,
        _ => v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Dense sampling of the sphere, for comparison.
    /// Best point of a 400×400 grid, then polished by the ascent step
    /// `z ← normalize((Q + σI)z + b)`, which never decreases the objective
    /// once `Q + σI` is positive definite.
    fn brute_force(q: &SphereQuadratic, b: &Vector3<f64>) -> f64 {
        let n = 400;
        let mut best = (f64::NEG_INFINITY, Vector3::zeros());
        for i in 0..n {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let rho = (1.0 - z * z).sqrt();
            for j in 0..n {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                let p = Vector3::new(rho * phi.cos(), rho * phi.sin(), z);
                let v = q.value(&p, b);
                if v > best.0 {
                    best = (v, p);
                }
            }
        }
        let shifted = q.matrix() + Matrix3::identity() * (q.matrix().norm() + 1.0);
        let mut z = best.1;
        for _ in 0..20_000 {
            z = (shifted * z + b).normalize();
        }
        q.value(&z, b).max(best.0)
    }

    #[test]
    fn zero_linear_term_gives_top_eigenvalue() {
        let q = SphereQuadratic::new(Matrix3::from_diagonal(&Vector3::new(1.0, 3.0, -2.0)));
        let (z, v) = q.maximize(&Vector3::zeros());
        assert_eq!(v, 3.0);
        assert!((z - Vector3::new(0.0, 1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn hard_case() {
        // b orthogonal to the top eigenvector and small: the multiplier sits
        // at λmax and the maximizer has a top-eigenvector component.
        let q = SphereQuadratic::new(Matrix3::from_diagonal(&Vector3::new(0.0, 0.0, 1.0)));
        let b = Vector3::new(0.25, 0.0, 0.0);
        let (z, v) = q.maximize(&b);
        // z = (0.25, 0, √(1 − 1/16)), value = z₃² + 2·0.25·z₁.
        let expect = 1.0 - 0.0625 + 0.5 * 0.25;
        assert!((v - expect).abs() < 1e-12, "{v} vs {expect}");
        assert!((z.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_matrix() {
        let q = SphereQuadratic::new(Matrix3::zeros());
        let b = Vector3::new(0.0, -2.0, 0.0);
        let (z, v) = q.maximize(&b);
        assert!((v - 4.0).abs() < 1e-14);
        assert!((z - Vector3::new(0.0, -1.0, 0.0)).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn matches_dense_sampling(
            c in prop::array::uniform6(-2.0f64..2.0),
            b in prop::array::uniform3(-2.0f64..2.0),
        ) {
            let m = Matrix3::new(c[0], c[3], c[4], c[3], c[1], c[5], c[4], c[5], c[2]);
            let q = SphereQuadratic::new(m);
            let b = Vector3::from(b);
            let (z, v) = q.maximize(&b);
            prop_assert!((z.norm() - 1.0).abs() < 1e-14);
            let sampled = brute_force(&q, &b);
            prop_assert!(v >= sampled - 1e-12, "{v} < {sampled}");
            prop_assert!(v - sampled < 1e-8, "{v} vs {sampled}");
        }

        #[test]
        fn stationarity(
            c in prop::array::uniform6(-2.0f64..2.0),
            b in prop::array::uniform3(-2.0f64..2.0),
        ) {
            let m = Matrix3::new(c[0], c[3], c[4], c[3], c[1], c[5], c[4], c[5], c[2]);
            let q = SphereQuadratic::new(m);
            let b = Vector3::from(b);
            let (z, _) = q.maximize(&b);
            // The gradient Qz + b must be parallel to z.
            let g = m * z + b;
            prop_assert!(g.cross(&z).norm() < 1e-8 * (1.0 + g.norm()));
            prop_assert!(g.dot(&z) >= q.lambda_max() - 1e-9);
        }
    }
}

//! Sectional curvature of 2-planes and certification of its sign.
//!
//! Every unit decomposable 2-form is `(ψ+ + ψ-)/√2` for unit `ψ±` in the
//! self-dual and anti-self-dual spaces, so
//!
//! ```text
//! q(ψ+, ψ-) = <ψ+ + ψ-, R(ψ+ + ψ-)> = 2·sec
//! ```
//!
//! and the extremes of the sectional curvature are the extremes of this
//! biquadratic form over a product of two 2-spheres. Writing `R` in blocks
//! `A, B, C` (sd-asd basis),
//!
//! ```text
//! q = xᵀAx + 2xᵀBy + yᵀCy,   |x| = |y| = 1.
//! ```
//!
//! For fixed `x` the problem in `y` is a sphere-constrained quadratic solved
//! exactly by [`SphereQuadratic`]; lower bounds on the maximum come from
//! alternating those solves. Upper bounds are analytic: the block bound
//! `λmax(A) + λmax(C) + 2σmax(B)` and the shifted bound `2·λmax(R − t⋆)`,
//! valid for every `t` since `<ω, ⋆ω> = 0` on decomposable forms.

use nalgebra::{Matrix3, Matrix6, Vector3, Vector4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvops::{decompose_with, Decomposition};
use crate::error::{CurvError, SecSignError};
use crate::operator::{Blocks, CurvatureOperator};
use crate::sphere_qp::{canonical_sign, SphereQuadratic};
use crate::twoform::TwoForm;
use crate::Tolerances;

const MAX_SWEEPS: usize = 200;
const SWEEP_TOLERANCE: f64 = 1e-13;
const SHIFT_SEARCH_STEPS: usize = 120;

/// `<R(X∧Y), X∧Y> / |X∧Y|²`.
pub fn sec_of_plane(op: &CurvatureOperator, x: &Vector4<f64>, y: &Vector4<f64>) -> Result<f64, SecSignError> {
    let gram = x.norm_squared() * y.norm_squared() - x.dot(y).powi(2);
    if gram <= 1e-14 * x.norm_squared() * y.norm_squared() || gram == 0.0 {
        return Err(SecSignError::DegeneratePlane { gram });
    }
    let w = TwoForm::wedge(x, y);
    Ok(op.apply(&w).dot(&w) / gram)
}

fn check_unit(plus: &Vector3<f64>, minus: &Vector3<f64>) -> Result<(), SecSignError> {
    let (np, nm) = (plus.norm(), minus.norm());
    if (np - 1.0).abs() > 1e-10 || (nm - 1.0).abs() > 1e-10 {
        return Err(SecSignError::NotUnit { plus: np, minus: nm });
    }
    Ok(())
}

fn q_blocks(b: &Blocks, x: &Vector3<f64>, y: &Vector3<f64>) -> f64 {
    x.dot(&(b.sd * x)) + 2.0 * x.dot(&(b.off * y)) + y.dot(&(b.asd * y))
}

/// `<ψ+ + ψ-, R(ψ+ + ψ-)>` with `ψ±` given in the orthonormal sd and asd
/// bases. Equals twice the sectional curvature of the plane
/// [`plane_form`]`(ψ+, ψ-)`.
pub fn q_form(op: &CurvatureOperator, psi_plus: &Vector3<f64>, psi_minus: &Vector3<f64>) -> Result<f64, SecSignError> {
    check_unit(psi_plus, psi_minus)?;
    Ok(q_blocks(&op.blocks(), psi_plus, psi_minus))
}

/// The unit decomposable form `(ψ+ + ψ-)/√2` in coordinates.
pub fn plane_form(psi_plus: &Vector3<f64>, psi_minus: &Vector3<f64>) -> TwoForm {
    std::f64::consts::FRAC_1_SQRT_2 * TwoForm::from_sd_asd(psi_plus, psi_minus)
}

/// Orthonormal vectors spanning the plane of a decomposable form.
pub fn plane_vectors(form: &TwoForm) -> (Vector4<f64>, Vector4<f64>) {
    // Columns of the antisymmetric matrix of X∧Y span the plane.
    let mut omega = nalgebra::Matrix4::zeros();
    for (k, &(i, j)) in crate::twoform::INDEX_PAIRS.iter().enumerate() {
        omega[(i, j)] = form.0[k];
        omega[(j, i)] = -form.0[k];
    }
    let cols: Vec<Vector4<f64>> = (0..4).map(|c| omega.column(c).into_owned()).collect();
    let first = cols
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("four columns");
    let e1 = first.normalize();
    let second = cols
        .iter()
        .map(|c| c - e1 * e1.dot(c))
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("four columns");
    (e1, second.normalize())
}

/// Exact sectional-curvature range of an Einstein operator:
/// `s/12 + (λ+ + λ-)/2 ≤ sec ≤ s/12 + (ν+ + ν-)/2`.
pub fn einstein_sec_range(d: &Decomposition) -> Result<(f64, f64), CurvError> {
    einstein_sec_range_with(d, &Tolerances::default())
}

pub fn einstein_sec_range_with(d: &Decomposition, tol: &Tolerances) -> Result<(f64, f64), CurvError> {
    if !d.is_einstein(tol) {
        return Err(CurvError::NotEinstein {
            norm: d.ric_block.norm(),
        });
    }
    let (p, m) = (d.spectra.plus, d.spectra.minus);
    Ok((
        d.s / 12.0 + 0.5 * (p.lambda + m.lambda),
        d.s / 12.0 + 0.5 * (p.nu + m.nu),
    ))
}

/// A 2-plane given by unit `ψ±` in sd-asd coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlaneWitness {
    pub psi_plus: [f64; 3],
    pub psi_minus: [f64; 3],
    pub q_value: f64,
    pub sec_value: f64,
}

impl PlaneWitness {
    fn new(blocks: &Blocks, x: Vector3<f64>, y: Vector3<f64>) -> Self {
        // (x, y) and (−x, −y) are the same plane.
        let xc = canonical_sign(x);
        let y = if xc == x { y } else { -y };
        let q = q_blocks(blocks, &xc, &y);
        PlaneWitness {
            psi_plus: xc.into(),
            psi_minus: y.into(),
            q_value: q,
            sec_value: 0.5 * q,
        }
    }

    pub fn plus(&self) -> Vector3<f64> {
        Vector3::from(self.psi_plus)
    }

    pub fn minus(&self) -> Vector3<f64> {
        Vector3::from(self.psi_minus)
    }

    pub fn form(&self) -> TwoForm {
        plane_form(&self.plus(), &self.minus())
    }

    fn key(&self) -> [f64; 6] {
        let [a, b, c] = self.psi_plus;
        let [d, e, f] = self.psi_minus;
        [a, b, c, d, e, f]
    }

    /// Larger q wins; exact ties go to the lexicographically smaller
    /// coordinates.
    fn better_max(&self, other: &PlaneWitness) -> bool {
        match self.q_value.total_cmp(&other.q_value) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => {
                let (a, b) = (self.key(), other.key());
                a.iter()
                    .zip(b.iter())
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .is_some_and(|o| o.is_lt())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    NonNegative,
    NonPositive,
    Indefinite,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    EinsteinExact,
    AlternatingTRS,
}

/// Certified bounds on the extremes of `q = 2·sec`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SecSignCertificate {
    pub q_max_lower: f64,
    pub q_max_upper: f64,
    pub q_min_lower: f64,
    pub q_min_upper: f64,
    pub max_witness: PlaneWitness,
    pub min_witness: PlaneWitness,
    pub verdict: Verdict,
    pub method: Method,
}

impl SecSignCertificate {
    /// Certified sectional-curvature interval `[min, max]` (outer bounds).
    pub fn sec_bounds(&self) -> (f64, f64) {
        (0.5 * self.q_min_lower, 0.5 * self.q_max_upper)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CertifyConfig {
    pub restarts: usize,
    pub grid_size: usize,
    pub seed: u64,
    /// Relative tolerance for sign verdicts, scaled by `max(1, ‖R‖)`.
    pub tolerance: f64,
    /// Use the alternating optimizer even for Einstein input.
    #[serde(skip)]
    pub force_alternating: bool,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            restarts: 16,
            grid_size: 64,
            seed: 0,
            tolerance: 1e-8,
            force_alternating: false,
        }
    }
}

/// Fibonacci lattice of `n` points on the unit 2-sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<Vector3<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            Vector3::new(rho * phi.cos(), rho * phi.sin(), z)
        })
        .collect()
}

fn starts(config: &CertifyConfig) -> Vec<Vector3<f64>> {
    let mut out = fibonacci_sphere(config.grid_size);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    while out.len() < config.grid_size + config.restarts {
        let v = Vector3::from_fn(|_, _| StandardNormal.sample(&mut rng));
        let n: f64 = v.norm();
        if n > 1e-8 {
            out.push(v / n);
        }
    }
    if out.is_empty() {
        out.push(Vector3::x());
    }
    out
}

/// Alternating maximizer of `q` over the product of spheres.
struct Alternation {
    blocks: Blocks,
    sd: SphereQuadratic,
    asd: SphereQuadratic,
}

impl Alternation {
    fn new(blocks: Blocks) -> Self {
        Alternation {
            sd: SphereQuadratic::new(blocks.sd),
            asd: SphereQuadratic::new(blocks.asd),
            blocks,
        }
    }

    fn run(&self, start: &Vector3<f64>) -> PlaneWitness {
        let mut x = *start;
        let (mut y, _) = self.asd.maximize(&(self.blocks.off.transpose() * x));
        let mut q = q_blocks(&self.blocks, &x, &y);
        for _ in 0..MAX_SWEEPS {
            let (nx, _) = self.sd.maximize(&(self.blocks.off * y));
            let (ny, _) = self.asd.maximize(&(self.blocks.off.transpose() * nx));
            let nq = q_blocks(&self.blocks, &nx, &ny);
            if nq < q + SWEEP_TOLERANCE {
                if nq > q {
                    (x, y) = (nx, ny);
                }
                break;
            }
            (x, y, q) = (nx, ny, nq);
        }
        PlaneWitness::new(&self.blocks, x, y)
    }

    fn best(&self, starts: &[Vector3<f64>]) -> PlaneWitness {
        let results: Vec<PlaneWitness> = starts.par_iter().map(|s| self.run(s)).collect();
        results
            .into_iter()
            .reduce(|best, w| if w.better_max(&best) { w } else { best })
            .expect("at least one start")
    }
}

fn negate(b: &Blocks) -> Blocks {
    Blocks {
        sd: -b.sd,
        off: -b.off,
        asd: -b.asd,
    }
}

fn star_shift(m: &Matrix6<f64>, t: f64) -> Matrix6<f64> {
    let mut out = *m;
    for i in 0..3 {
        out[(i, i)] -= t;
        out[(i + 3, i + 3)] += t;
    }
    out
}

/// Lower bound on min q: the better of the block bound and
/// `max_t 2·λmin(R − t⋆)` (concave in `t`, golden-section search).
fn q_min_lower_bound(blocks: &Blocks) -> f64 {
    let sigma = blocks.off.singular_values().max();
    let block = blocks.sd.symmetric_eigenvalues().min() + blocks.asd.symmetric_eigenvalues().min() - 2.0 * sigma;

    let m = blocks.assemble();
    let f = |t: f64| 2.0 * star_shift(&m, t).symmetric_eigenvalues().min();
    let radius = 2.0 * m.abs().max() * 6.0 + 1.0;
    let (mut a, mut b) = (-radius, radius);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut best = f(0.0).max(fc).max(fd);
    for _ in 0..SHIFT_SEARCH_STEPS {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
            best = best.max(fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
            best = best.max(fd);
        }
    }
    block.max(best)
}

fn verdict(c: &SecSignCertificate, tol: f64) -> Verdict {
    if c.q_min_lower >= -tol {
        Verdict::NonNegative
    } else if c.q_max_upper <= tol {
        Verdict::NonPositive
    } else if c.q_max_lower > tol && c.q_min_upper < -tol {
        Verdict::Indefinite
    } else {
        Verdict::Inconclusive
    }
}

pub fn certify_sec_sign(op: &CurvatureOperator, config: &CertifyConfig) -> Result<SecSignCertificate, SecSignError> {
    certify_sec_sign_with(op, config, &Tolerances::default())
}

pub fn certify_sec_sign_with(
    op: &CurvatureOperator,
    config: &CertifyConfig,
    tol: &Tolerances,
) -> Result<SecSignCertificate, SecSignError> {
    let d = decompose_with(op, tol)?;
    let blocks = op.blocks();
    let verdict_tol = config.tolerance * op.spectral_norm().max(1.0);

    let mut cert = if d.is_einstein(tol) && !config.force_alternating {
        einstein_certificate(&d, &blocks, tol)?
    } else {
        alternating_certificate(&blocks, config)
    };
    cert.verdict = verdict(&cert, verdict_tol);
    Ok(cert)
}

fn einstein_certificate(d: &Decomposition, blocks: &Blocks, tol: &Tolerances) -> Result<SecSignCertificate, CurvError> {
    let (sec_min, sec_max) = einstein_sec_range_with(d, tol)?;
    let sigma = blocks.off.singular_values().max();
    let sd = SphereQuadratic::new(blocks.sd);
    let asd = SphereQuadratic::new(blocks.asd);
    let nsd = SphereQuadratic::new(-blocks.sd);
    let nasd = SphereQuadratic::new(-blocks.asd);
    Ok(SecSignCertificate {
        q_max_lower: 2.0 * sec_max - 2.0 * sigma,
        q_max_upper: 2.0 * sec_max + 2.0 * sigma,
        q_min_lower: 2.0 * sec_min - 2.0 * sigma,
        q_min_upper: 2.0 * sec_min + 2.0 * sigma,
        max_witness: PlaneWitness::new(blocks, sd.top_eigenvector(), asd.top_eigenvector()),
        min_witness: PlaneWitness::new(blocks, nsd.top_eigenvector(), nasd.top_eigenvector()),
        verdict: Verdict::Inconclusive,
        method: Method::EinsteinExact,
    })
}

fn alternating_certificate(blocks: &Blocks, config: &CertifyConfig) -> SecSignCertificate {
    let starts = starts(config);
    let max_witness = Alternation::new(*blocks).best(&starts);
    let neg = negate(blocks);
    let min_witness = {
        let w = Alternation::new(neg).best(&starts);
        PlaneWitness::new(blocks, w.plus(), w.minus())
    };
    let q_min_lower = q_min_lower_bound(blocks);
    let q_max_upper = -q_min_lower_bound(&neg);
    SecSignCertificate {
        q_max_lower: max_witness.q_value,
        q_max_upper: q_max_upper.max(max_witness.q_value),
        q_min_lower: q_min_lower.min(min_witness.q_value),
        q_min_upper: min_witness.q_value,
        max_witness,
        min_witness,
        verdict: Verdict::Inconclusive,
        method: Method::AlternatingTRS,
    }
}

/// Block bound `λmax(A) + λmax(C) + 2σmax(B)` on max q.
pub fn block_upper_bound(op: &CurvatureOperator) -> f64 {
    let b = op.blocks();
    b.sd.symmetric_eigenvalues().max() + b.asd.symmetric_eigenvalues().max() + 2.0 * b.off.singular_values().max()
}

/// The sd/asd blocks of `R` as a 3×3 triple, for callers that evaluate
/// `q` repeatedly.
pub fn q_blocks_of(op: &CurvatureOperator) -> (Matrix3<f64>, Matrix3<f64>, Matrix3<f64>) {
    let b = op.blocks();
    (b.sd, b.off, b.asd)
}

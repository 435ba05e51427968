//! Random operator generators shared by unit tests, integration tests and
//! benchmarks-in-tests. Not part of the stable API.

use nalgebra::{Matrix3, Matrix6, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::curvops::{Decomposition, Spectra, Spectrum};
use crate::operator::{Basis, Blocks, CurvatureOperator};

/// Removes the Bianchi defect by shifting the sd and asd diagonal blocks by
/// opposite multiples of the identity, and symmetrizes.
pub fn project_admissible(op: &CurvatureOperator) -> CurvatureOperator {
    let m = op.sd_asd_matrix();
    let m = (m + m.transpose()) * 0.5;
    let mut blocks = CurvatureOperator::new(m, Basis::SdAsd).blocks();
    let delta = (blocks.sd.trace() - blocks.asd.trace()) / 6.0;
    blocks.sd -= Matrix3::identity() * delta;
    blocks.asd += Matrix3::identity() * delta;
    CurvatureOperator::from_blocks(&blocks).to_basis(Basis::Coordinate)
}

pub fn random_symmetric3<R: Rng>(rng: &mut R) -> Matrix3<f64> {
    let m = Matrix3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
    (m + m.transpose()) * 0.5
}

pub fn random_traceless<R: Rng>(rng: &mut R) -> Matrix3<f64> {
    let m = random_symmetric3(rng);
    m - Matrix3::identity() * (m.trace() / 3.0)
}

/// Admissible operator with Gaussian entries, in the coordinate basis.
pub fn random_admissible<R: Rng>(rng: &mut R) -> CurvatureOperator {
    let m = Matrix6::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
    project_admissible(&CurvatureOperator::coordinate(m))
}

/// Admissible operator rescaled to unit spectral norm.
pub fn random_unit_norm<R: Rng>(rng: &mut R) -> CurvatureOperator {
    let op = random_admissible(rng);
    op.scaled(1.0 / op.spectral_norm())
}

/// Einstein operator `B = 0` with the given scalar curvature and Weyl halves.
pub fn einstein_operator(s: f64, w_plus: &Matrix3<f64>, w_minus: &Matrix3<f64>) -> CurvatureOperator {
    let shift = Matrix3::identity() * (s / 12.0);
    CurvatureOperator::from_blocks(&Blocks {
        sd: w_plus + shift,
        off: Matrix3::zeros(),
        asd: w_minus + shift,
    })
    .to_basis(Basis::Coordinate)
}

pub fn random_einstein<R: Rng>(rng: &mut R) -> CurvatureOperator {
    let s = rng.sample::<f64, _>(StandardNormal) * 6.0;
    einstein_operator(s, &random_traceless(rng), &random_traceless(rng))
}

/// Traceless symmetric matrix with prescribed spectrum in a random
/// orthonormal frame.
pub fn rotated_traceless<R: Rng>(rng: &mut R, spectrum: [f64; 3]) -> Matrix3<f64> {
    let g = Matrix3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
    let q = g.qr().q();
    q * Matrix3::from_diagonal(&Vector3::from(spectrum)) * q.transpose()
}

/// Decomposition assembled directly from its fields.
pub fn decomposition(s: f64, w_plus: Matrix3<f64>, w_minus: Matrix3<f64>, ric: Matrix3<f64>) -> Decomposition {
    Decomposition {
        s,
        w_plus,
        w_minus,
        ric_block: ric,
        spectra: Spectra {
            plus: Spectrum::of(&w_plus),
            minus: Spectrum::of(&w_minus),
        },
    }
}

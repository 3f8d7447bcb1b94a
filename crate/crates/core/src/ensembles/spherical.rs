//! The spherical ensemble: eigenvalues of `A⁻¹B` for complex Ginibre `A`, `B`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::geometry::{inverse_stereographic, ComplexPoint, SpherePoint};

const MAX_CONDITION: f64 = 1e14;
const MAX_REDRAWS: usize = 16;

fn ginibre<R: Rng + ?Sized>(r: usize, rng: &mut R) -> DMatrix<Complex64> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    // column-major fill order, fixed for reproducibility
    DMatrix::from_fn(r, r, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(scale * re, scale * im)
    })
}

fn condition_number(a: &DMatrix<Complex64>) -> f64 {
    let sv = a.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

/// The `r` eigenvalues of `A⁻¹B`; `A` is redrawn while its condition number
/// exceeds `1e14`.
pub fn spherical_ensemble_eigenvalues<R: Rng + ?Sized>(r: usize, rng: &mut R) -> Result<Vec<Complex64>> {
    if r == 0 {
        return invalid("matrix size must be at least 1");
    }
    let b = ginibre(r, rng);
    let mut a = ginibre(r, rng);
    let mut redraws = 0;
    while condition_number(&a) > MAX_CONDITION {
        redraws += 1;
        if redraws > MAX_REDRAWS {
            return Err(Error::Sampler("could not draw a well-conditioned A".into()));
        }
        a = ginibre(r, rng);
    }
    if r == 1 {
        return Ok(vec![b[(0, 0)] / a[(0, 0)]]);
    }
    let m = a.lu().solve(&b).ok_or_else(|| Error::Sampler("LU solve failed".into()))?;
    let schur = m
        .try_schur(f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Sampler("Schur iteration did not converge".into()))?;
    let eig = schur
        .eigenvalues()
        .ok_or_else(|| Error::Sampler("Schur form is not triangular".into()))?;
    Ok(eig.iter().cloned().collect())
}

pub fn sample_spherical_ensemble<R: Rng + ?Sized>(r: usize, rng: &mut R) -> Result<Vec<SpherePoint>> {
    Ok(spherical_ensemble_eigenvalues(r, rng)?
        .into_iter()
        .map(|z| inverse_stereographic(ComplexPoint::from(z)))
        .collect())
}

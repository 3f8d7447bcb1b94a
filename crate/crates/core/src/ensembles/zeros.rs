//! Zeros of random elliptic (Kostlan) polynomials.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::geometry::{inverse_stereographic, ComplexPoint, SpherePoint};

const MAX_ITER: usize = 200;
const RETRIES: usize = 3;
const STEP_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-10;
// relative residual at rounding level: the root is as good as it gets
const BACKWARD_TOL: f64 = 4.0 * f64::EPSILON;
const DEGENERATE_LEADING: f64 = 1e-300;

/// Coefficients `a_0..=a_r`, `a_j` complex Gaussian with `E|a_j|² = C(r, j)`.
pub fn elliptic_coefficients<R: Rng + ?Sized>(r: usize, rng: &mut R) -> Vec<Complex64> {
    let mut binom = 1.0f64;
    (0..=r)
        .map(|j| {
            if j > 0 {
                binom = binom * (r + 1 - j) as f64 / j as f64;
            }
            let sd = (binom / 2.0).sqrt();
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(sd * re, sd * im)
        })
        .collect()
}

/// `p(z)/p'(z)` and the relative residual `|p(z)| / Σ|a_j||z|^j`.
fn newton_ratio(coeffs: &[Complex64], z: Complex64) -> (Complex64, f64) {
    let deg = coeffs.len() - 1;
    if z.norm() <= 1.0 {
        let (mut p, mut dp) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let mut scale = 0.0;
        let az = z.norm();
        for &a in coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
            scale = scale * az + a.norm();
        }
        if p.norm() == 0.0 {
            return (Complex64::new(0.0, 0.0), 0.0);
        }
        (p / dp, p.norm() / scale.max(f64::MIN_POSITIVE))
    } else {
        // p(z) = z^deg q(w), q(w) = Σ a_{deg-j} w^j, w = 1/z
        let w = z.inv();
        let aw = w.norm();
        let (mut q, mut dq) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let mut scale = 0.0;
        for &a in coeffs.iter() {
            dq = dq * w + q;
            q = q * w + a;
            scale = scale * aw + a.norm();
        }
        if q.norm() == 0.0 {
            return (Complex64::new(0.0, 0.0), 0.0);
        }
        let ratio = z / (Complex64::new(deg as f64, 0.0) - w * dq / q);
        (ratio, q.norm() / scale.max(f64::MIN_POSITIVE))
    }
}

/// Roots and diagnostics of one Aberth–Ehrlich solve.
#[derive(Debug, Clone)]
pub struct RootReport {
    pub roots: Vec<ComplexPoint>,
    pub iterations: usize,
    pub max_residual: f64,
    pub attempts: usize,
}

fn aberth_attempt(coeffs: &[Complex64], offset: f64) -> Option<(Vec<Complex64>, usize, f64)> {
    let deg = coeffs.len() - 1;
    let radius = (coeffs[0].norm() / coeffs[deg].norm()).powf(1.0 / deg as f64);
    let radius = if radius.is_finite() && radius > 0.0 { radius } else { 1.0 };
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(radius, TAU * k as f64 / deg as f64 + offset))
        .collect();
    for iter in 1..=MAX_ITER {
        let mut converged = true;
        for k in 0..deg {
            let (ratio, residual) = newton_ratio(coeffs, z[k]);
            if residual <= BACKWARD_TOL * deg as f64 {
                continue;
            }
            if !(ratio.re.is_finite() && ratio.im.is_finite()) {
                converged = false;
                continue;
            }
            let repulsion: Complex64 = (0..deg).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !(step.re.is_finite() && step.im.is_finite()) {
                converged = false;
                continue;
            }
            z[k] -= step;
            if step.norm() > STEP_TOL * (1.0 + z[k].norm()) {
                converged = false;
            }
        }
        if converged {
            let max_residual = z.iter().map(|&zk| newton_ratio(coeffs, zk).1).fold(0.0, f64::max);
            if max_residual <= RESIDUAL_TOL {
                return Some((z, iter, max_residual));
            }
        }
    }
    None
}

/// All roots of `Σ a_j z^j` with multiplicity.
///
/// Leading coefficients below `1e-300` in modulus are read as roots at
/// infinity. A failed solve is retried from a rotated starting circle; the
/// third failure is reported as an error.
pub fn aberth_roots(coeffs: &[Complex64]) -> Result<RootReport> {
    if coeffs.len() < 2 {
        return invalid("a polynomial of degree >= 1 is required");
    }
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].norm() < DEGENERATE_LEADING {
        deg -= 1;
    }
    let at_infinity = coeffs.len() - 1 - deg;
    let mut roots = vec![ComplexPoint::Infinity; at_infinity];
    if deg == 0 {
        return Ok(RootReport { roots, iterations: 0, max_residual: 0.0, attempts: 0 });
    }
    let active = &coeffs[..=deg];
    if deg == 1 {
        roots.push(ComplexPoint::from(-active[0] / active[1]));
        return Ok(RootReport { roots, iterations: 0, max_residual: 0.0, attempts: 1 });
    }
    for attempt in 0..=RETRIES {
        // irrational offsets keep the start off any symmetry of the roots
        let offset = 0.4 + 1.234_567_89 * attempt as f64;
        if let Some((z, iterations, max_residual)) = aberth_attempt(active, offset) {
            roots.extend(z.into_iter().map(ComplexPoint::from));
            return Ok(RootReport { roots, iterations, max_residual, attempts: attempt + 1 });
        }
    }
    Err(Error::Sampler(format!(
        "Aberth iteration did not converge for a degree-{deg} polynomial after {RETRIES} retries"
    )))
}

/// Zeros of a random elliptic polynomial of degree `r`, on the sphere.
pub fn sample_elliptic_zeros<R: Rng + ?Sized>(r: usize, rng: &mut R) -> Result<Vec<SpherePoint>> {
    if r == 0 {
        return invalid("degree must be at least 1");
    }
    let coeffs = elliptic_coefficients(r, rng);
    let report = aberth_roots(&coeffs)?;
    Ok(report.roots.into_iter().map(inverse_stereographic).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::testing::{octant_chi2, CHI2_7_999};
    use crate::rng::stream;

    fn finite(r: &ComplexPoint) -> Complex64 {
        match r {
            ComplexPoint::Finite(z) => *z,
            ComplexPoint::Infinity => panic!("unexpected root at infinity"),
        }
    }

    #[test]
    fn coefficient_variances_follow_binomials() {
        let mut rng = stream(1, 0);
        let n = 100_000;
        let mut acc = [0.0; 4];
        for _ in 0..n {
            for (a, c) in acc.iter_mut().zip(elliptic_coefficients(3, &mut rng)) {
                *a += c.norm_sqr();
            }
        }
        for (a, expected) in acc.iter().zip([1.0, 3.0, 3.0, 1.0]) {
            // |a|² is exponential: relative sd 1/sqrt(n)
            assert!((a / n as f64 - expected).abs() < 4.0 * expected / (n as f64).sqrt());
        }
    }

    #[test]
    fn roots_of_known_polynomial() {
        // (z - 1)(z + 2)(z - i) = z³ + (1 - i) z² + (-2 - i) z + 2i
        let c = [Complex64::new(0.0, 2.0), Complex64::new(-2.0, -1.0), Complex64::new(1.0, -1.0), Complex64::new(1.0, 0.0)];
        let report = aberth_roots(&c).unwrap();
        let mut found: Vec<Complex64> = report.roots.iter().map(finite).collect();
        for target in [Complex64::new(1.0, 0.0), Complex64::new(-2.0, 0.0), Complex64::new(0.0, 1.0)] {
            let pos = found.iter().position(|z| (z - target).norm() < 1e-12).expect("root found");
            found.remove(pos);
        }
    }

    #[test]
    fn vieta_and_residuals_on_random_draws() {
        let mut rng = stream(33, 0);
        for r in [2, 5, 16, 64, 200] {
            for _ in 0..5 {
                let c = elliptic_coefficients(r, &mut rng);
                let report = aberth_roots(&c).unwrap();
                assert_eq!(report.roots.len(), r);
                assert!(report.max_residual <= 1e-10);
                let sum: Complex64 = report.roots.iter().map(finite).sum();
                let vieta = -c[r - 1] / c[r];
                assert!((sum - vieta).norm() <= 1e-8 * vieta.norm().max(1.0), "r = {r}");
            }
        }
    }

    #[test]
    fn iterate_landing_on_exact_root() {
        // an iterate hits p(z) = 0 exactly on the second sweep
        let c = [
            Complex64::new(0.835_540_075_220_492_8, 0.622_638_353_694_555_2),
            Complex64::new(-0.803_050_493_451_042_2, -0.866_353_631_019_341),
            Complex64::new(-1.447_126_141_963_692, -0.001_648_579_555_182_522),
            Complex64::new(0.188_366_641_866_331_76, 0.269_843_302_524_543_14),
        ];
        let report = aberth_roots(&c).unwrap();
        let mut moduli: Vec<f64> = report.roots.iter().map(|z| finite(z).norm()).collect();
        moduli.sort_by(f64::total_cmp);
        for (m, expected) in moduli.iter().zip([0.573_820_598_832, 1.226_484_349_666, 4.499_133_773_086]) {
            assert!((m - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_leading_coefficient_goes_to_north_pole() {
        let mut c = elliptic_coefficients(4, &mut stream(2, 0));
        c[4] = Complex64::new(1e-310, 0.0);
        let report = aberth_roots(&c).unwrap();
        assert_eq!(report.roots.iter().filter(|r| **r == ComplexPoint::Infinity).count(), 1);
        assert_eq!(inverse_stereographic(report.roots[0]), SpherePoint::NORTH);
    }

    #[test]
    fn degree_one_zero_is_uniform() {
        let mut rng = stream(3, 0);
        let pts: Vec<SpherePoint> = (0..80_000).map(|_| sample_elliptic_zeros(1, &mut rng).unwrap()[0]).collect();
        assert!(octant_chi2(&pts) < CHI2_7_999);
    }
}

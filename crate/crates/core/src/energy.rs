//! Logarithmic energies and their expectations under random fiber phases.

use std::f64::consts::{LN_2, PI, SQRT_2};

use rayon::prelude::*;

use crate::error::{domain, invalid, Result};
use crate::geometry::{so3_dist_sq, Rotation3, SpherePoint};
use crate::specfun::quadrature::{integrate_with, neumaier_sum, Options};

/// Squared distances below this mark a coincident pair.
pub const COINCIDENCE_TOL: f64 = 1e-14;
/// Side of the square index tiles of the pair loop.
pub const TILE: usize = 64;

const PARALLEL_FROM: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyValue {
    pub value: f64,
    pub is_infinite: bool,
}

impl EnergyValue {
    fn finite(value: f64) -> Self {
        EnergyValue { value, is_infinite: false }
    }

    fn infinite() -> Self {
        EnergyValue { value: f64::INFINITY, is_infinite: true }
    }
}

/// Fixed-shape pairwise reduction.
fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// `Σ_{i<j} w(i, j)` over row tiles; `None` if any term is flagged.
fn tiled_pair_sum<T: Sync, F>(items: &[T], term: F) -> Option<f64>
where
    F: Fn(&T, &T) -> Option<f64> + Sync,
{
    let n = items.len();
    let tiles = n.div_ceil(TILE);
    let tile_sum = |ti: usize| -> Option<f64> {
        let rows = ti * TILE..((ti + 1) * TILE).min(n);
        let mut terms = Vec::with_capacity(TILE * TILE);
        let mut acc = Vec::with_capacity(tiles - ti);
        for tj in ti..tiles {
            terms.clear();
            let cols = tj * TILE..((tj + 1) * TILE).min(n);
            for i in rows.clone() {
                for j in cols.clone() {
                    if j > i {
                        terms.push(term(&items[i], &items[j])?);
                    }
                }
            }
            acc.push(neumaier_sum(terms.iter().copied()));
        }
        Some(neumaier_sum(acc))
    };
    let sums: Option<Vec<f64>> = if n >= PARALLEL_FROM {
        (0..tiles).into_par_iter().map(tile_sum).collect()
    } else {
        (0..tiles).map(tile_sum).collect()
    };
    sums.map(|s| pairwise_sum(&s))
}

/// `-(1/2) Σ_{i≠j} log(6 - 2 tr(O_iᵀ O_j))`.
pub fn log_energy(matrices: &[Rotation3]) -> EnergyValue {
    let half = tiled_pair_sum(matrices, |a, b| {
        let d2 = so3_dist_sq(a, b);
        if d2 < COINCIDENCE_TOL {
            None
        } else {
            Some(d2.ln())
        }
    });
    match half {
        // ordered pairs double the unordered sum, which cancels the 1/2
        Some(v) => EnergyValue::finite(-v),
        None => EnergyValue::infinite(),
    }
}

/// `log(1 + sqrt((1 - t)/2))` with `t` clamped to `[-1, 1]`.
pub fn sphere_kernel(t: f64) -> f64 {
    (0.5 * (1.0 - t.clamp(-1.0, 1.0))).sqrt().ln_1p()
}

/// `Σ_{i≠i'} sphere_kernel(<p_i, p_i'>)` over ordered pairs.
pub fn sphere_kernel_energy(points: &[SpherePoint]) -> f64 {
    2.0 * tiled_pair_sum(points, |p, q| Some(sphere_kernel(p.dot(q)))).unwrap_or(0.0)
}

/// Expected energy of the fiber construction over `points` with `s`
/// rotations per fiber, given the kernel energy of the points.
pub fn predicted_energy_from_kernel(r: usize, s: usize, kernel_energy: f64) -> f64 {
    let n = (r * s) as f64;
    let s = s as f64;
    -(n * n / 2.0) * LN_2 + (n / 2.0) * LN_2 - n * s.ln() - s * s * kernel_energy
}

/// `-(n²/2) log 2 + (n/2) log 2 - n log s - s² Σ_{i≠i'} K(<p_i, p_i'>)`.
pub fn predicted_energy(points: &[SpherePoint], s: usize) -> Result<f64> {
    if points.is_empty() || s == 0 {
        return invalid("predicted_energy needs r >= 1 and s >= 1");
    }
    Ok(predicted_energy_from_kernel(points.len(), s, sphere_kernel_energy(points)))
}

fn check_circle_hypothesis(alpha: f64, beta: f64) -> Result<()> {
    if !(beta.abs() <= alpha / 3.0) {
        return domain(format!("circle average needs |β| <= α/3 (α = {alpha}, β = {beta})"));
    }
    Ok(())
}

/// `(1/2π) ∫ log(α + β tr(H R(φ))) dφ = 2 log((sqrt(α-β) + sqrt(α+β+2β h33))/2)`
/// for any rotation `H` with `e3ᵀ H e3 = h33`.
pub fn circle_average(h33: f64, alpha: f64, beta: f64) -> Result<f64> {
    check_circle_hypothesis(alpha, beta)?;
    let h33 = h33.clamp(-1.0, 1.0);
    let inner = (alpha + beta + 2.0 * beta * h33).max(0.0);
    Ok(2.0 * (((alpha - beta).sqrt() + inner.sqrt()) / 2.0).ln())
}

/// The left-hand side of [`circle_average`] by quadrature over the circle.
///
/// With `tr(H R(φ)) = h33 + C cos(φ - φ₀)` the integrand is rewritten as
/// `(a - |b|) + 2|b| sin²(ψ/2)`, `a = α + β h33`, `b = β C`, so the
/// logarithmic singularity at a tangency stays resolvable in floating point.
pub fn circle_average_quadrature(h: &Rotation3, alpha: f64, beta: f64) -> Result<f64> {
    check_circle_hypothesis(alpha, beta)?;
    let m = h.rows();
    let c = (m[0][0] + m[1][1]).hypot(m[0][1] - m[1][0]);
    let a = alpha + beta * m[2][2];
    let b = (beta * c).abs();
    let gap = (a - b).max(0.0);
    let integral = integrate_with(
        |psi: f64| (gap + 2.0 * b * (0.5 * psi).sin().powi(2)).max(f64::MIN_POSITIVE).ln(),
        0.0,
        PI,
        Options { abs_tol: 1e-12, rel_tol: 0.0, max_panels: 20_000 },
    )?;
    Ok(integral.value / PI)
}

/// Expected crossed energy `Σ_{j,k} -log‖O_j - O'_k‖⁻¹` between fibers over
/// `p` and `q`: `s² log(√2 + sqrt(1 - <p, q>))`.
pub fn crossed_expectation(p: &SpherePoint, q: &SpherePoint, s: usize) -> f64 {
    let t = p.dot(q).clamp(-1.0, 1.0);
    let s = s as f64;
    s * s * (SQRT_2 + (1.0 - t).sqrt()).ln()
}

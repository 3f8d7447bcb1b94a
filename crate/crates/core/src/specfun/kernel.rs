//! The spherical surrogate kernel `f(t) = -log(1 + sqrt((1-t)/2))`: its
//! Legendre (d = 2 Gegenbauer) coefficients and derivatives.

use crate::error::{domain, invalid, Result};
use crate::specfun::orthopoly::legendre;
use crate::specfun::quadrature::{integrate_with, Options};

/// `f(t) = -log(1 + sqrt((1-t)/2))`, clamped to `[-1, 1]`.
pub fn kernel(t: f64) -> f64 {
    let u = (0.5 * (1.0 - t.clamp(-1.0, 1.0))).sqrt();
    -u.ln_1p()
}

/// Coefficient `n` of `f` in the expansion `f = Σ f̂(n) P_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GegenbauerCoefficient {
    pub n: usize,
    pub value: f64,
    pub error: f64,
}

/// `f̂(n) = (2n+1)/2 ∫_{-1}^{1} f(t) P_n(t) dt`, computed after `t = 1 - 2u²`.
pub fn kernel_gegenbauer_coeff(n: usize) -> Result<GegenbauerCoefficient> {
    kernel_gegenbauer_coeff_with(n, Options { abs_tol: 1e-14, rel_tol: 1e-12, max_panels: 4000 })
}

pub fn kernel_gegenbauer_coeff_with(n: usize, opts: Options) -> Result<GegenbauerCoefficient> {
    let integral = integrate_with(|u| -u.ln_1p() * legendre(n, 1.0 - 2.0 * u * u) * 4.0 * u, 0.0, 1.0, opts)?;
    let scale = (2 * n + 1) as f64 / 2.0;
    Ok(GegenbauerCoefficient { n, value: scale * integral.value, error: scale * integral.error })
}

/// Block sizes of every integer partition of 1..=6.
const PARTITIONS: [&[&[usize]]; 6] = [
    &[&[1]],
    &[&[2], &[1, 1]],
    &[&[3], &[2, 1], &[1, 1, 1]],
    &[&[4], &[3, 1], &[2, 2], &[2, 1, 1], &[1, 1, 1, 1]],
    &[&[5], &[4, 1], &[3, 2], &[3, 1, 1], &[2, 2, 1], &[2, 1, 1, 1], &[1, 1, 1, 1, 1]],
    &[
        &[6],
        &[5, 1],
        &[4, 2],
        &[4, 1, 1],
        &[3, 3],
        &[3, 2, 1],
        &[3, 1, 1, 1],
        &[2, 2, 2],
        &[2, 2, 1, 1],
        &[2, 1, 1, 1, 1],
        &[1, 1, 1, 1, 1, 1],
    ],
];

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn double_factorial_odd(m: i64) -> f64 {
    // (2k-3)!! with (-1)!! = 1
    let mut acc = 1.0;
    let mut j = m;
    while j > 1 {
        acc *= j as f64;
        j -= 2;
    }
    acc
}

/// Number of set partitions of an `n`-set with the given block sizes.
fn partition_weight(blocks: &[usize]) -> f64 {
    let n: usize = blocks.iter().sum();
    let mut denom = 1.0;
    let mut counts = [0usize; 7];
    for &b in blocks {
        denom *= factorial(b);
        counts[b] += 1;
    }
    for &c in &counts {
        denom *= factorial(c);
    }
    factorial(n) / denom
}

/// `f^{(n)}(t)` for `1 ≤ n ≤ 6` by Faà di Bruno's formula with
/// `f = g ∘ h`, `g(x) = -log(√2 + x)`, `h(t) = sqrt(1 - t)`:
/// `g^{(k)}(x) = (-1)^k (k-1)! (√2 + x)^{-k}`,
/// `h^{(k)}(t) = -((2k-3)!!/2^k) (1 - t)^{-(2k-1)/2}`.
pub fn kernel_derivative(n: usize, t: f64) -> Result<f64> {
    if !(1..=6).contains(&n) {
        return invalid(format!("derivative order {n} outside 1..=6"));
    }
    if !(t > -1.0 && t < 1.0) {
        return domain(format!("kernel derivatives need t in (-1, 1), got {t}"));
    }
    let h = (1.0 - t).sqrt();
    let hd: Vec<f64> = (0..=n)
        .map(|k| {
            if k == 0 {
                h
            } else {
                -double_factorial_odd(2 * k as i64 - 3) / 2f64.powi(k as i32)
                    * (1.0 - t).powf(-(2.0 * k as f64 - 1.0) / 2.0)
            }
        })
        .collect();
    let base = std::f64::consts::SQRT_2 + h;
    let mut total = 0.0;
    for blocks in PARTITIONS[n - 1] {
        let k = blocks.len();
        let gk = if k % 2 == 0 { 1.0 } else { -1.0 } * factorial(k - 1) * base.powi(-(k as i32));
        let prod: f64 = blocks.iter().map(|&b| hd[b]).product();
        total += partition_weight(blocks) * gk * prod;
    }
    Ok(total)
}

/// `f'(t) = 1/(4u(1+u))`, `u = sqrt((1-t)/2)`.
pub fn kernel_first_derivative(t: f64) -> f64 {
    let u = (0.5 * (1.0 - t)).sqrt();
    1.0 / (4.0 * u * (1.0 + u))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_count_set_partitions() {
        // Σ over integer partitions of the set-partition counts is the Bell number
        let bell = [1.0, 2.0, 5.0, 15.0, 52.0, 203.0];
        for n in 1..=6 {
            let total: f64 = PARTITIONS[n - 1].iter().map(|b| partition_weight(b)).sum();
            assert_eq!(total, bell[n - 1]);
            assert!(PARTITIONS[n - 1].iter().all(|b| b.iter().sum::<usize>() == n));
        }
    }

    #[test]
    fn first_derivative_matches_closed_form() {
        let expected = 1.0 / (2.0 + 2.0 * std::f64::consts::SQRT_2);
        assert!((kernel_derivative(1, 0.0).unwrap() - expected).abs() < 1e-15);
        for i in 0..=18 {
            let t = -0.9 + 0.1 * i as f64;
            let a = kernel_derivative(1, t).unwrap();
            assert!((a - kernel_first_derivative(t)).abs() < 1e-14 * a);
        }
    }

    #[test]
    fn second_derivative_by_central_difference() {
        let h = 1e-4;
        let fd = (kernel_first_derivative(h) - kernel_first_derivative(-h)) / (2.0 * h);
        assert!((kernel_derivative(2, 0.0).unwrap() - fd).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(kernel_derivative(0, 0.0).is_err());
        assert!(kernel_derivative(7, 0.0).is_err());
        assert!(kernel_derivative(2, 1.0).is_err());
        assert!(kernel_derivative(2, -1.0).is_err());
    }

    #[test]
    fn leading_coefficients() {
        let c0 = kernel_gegenbauer_coeff(0).unwrap();
        assert!((c0.value + 0.5).abs() < 1e-12);
        assert!(kernel_gegenbauer_coeff(1).unwrap().value > 0.0);
    }

    #[test]
    fn kernel_values() {
        assert_eq!(kernel(1.0), 0.0);
        assert!((kernel(-1.0) + 2f64.ln()).abs() < 1e-15);
    }
}

//! Jacobi, Gegenbauer and Legendre polynomials by three-term recurrence.

use crate::error::{domain, Result};
use crate::specfun::gamma::log_gamma;

/// `P_n^{(α,β)}(x)`.
pub fn jacobi_p(n: usize, alpha: f64, beta: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let ab = alpha + beta;
    let mut p0 = 1.0;
    let mut p1 = (alpha + 1.0) + (ab + 2.0) * (x - 1.0) / 2.0;
    for k in 2..=n {
        let k = k as f64;
        let c = 2.0 * k + ab;
        let a1 = 2.0 * k * (k + ab) * (c - 2.0);
        let a2 = (c - 1.0) * (c * (c - 2.0) * x + alpha * alpha - beta * beta);
        let a3 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c;
        let p2 = (a2 * p1 - a3 * p0) / a1;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// `C_n^{(λ)}(x)` for `λ > 0`.
pub fn gegenbauer(n: usize, lambda: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut c0 = 1.0;
    let mut c1 = 2.0 * lambda * x;
    for k in 2..=n {
        let k = k as f64;
        let c2 = (2.0 * x * (k + lambda - 1.0) * c1 - (k + 2.0 * lambda - 2.0) * c0) / k;
        c0 = c1;
        c1 = c2;
    }
    c1
}

/// `C_n^{(λ)}(x)` through the Jacobi relation
/// `C_n^{(λ)} = Γ(λ+1/2) Γ(n+2λ) / (Γ(2λ) Γ(n+λ+1/2)) · P_n^{(λ-1/2, λ-1/2)}`.
pub fn gegenbauer_via_jacobi(n: usize, lambda: f64, x: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return domain(format!("Gegenbauer parameter must be positive, got {lambda}"));
    }
    let n_f = n as f64;
    let log_pref = log_gamma(lambda + 0.5)? + log_gamma(n_f + 2.0 * lambda)?
        - log_gamma(2.0 * lambda)?
        - log_gamma(n_f + lambda + 0.5)?;
    Ok(log_pref.exp() * jacobi_p(n, lambda - 0.5, lambda - 0.5, x))
}

/// `P_n(x)`.
pub fn legendre(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    p1
}

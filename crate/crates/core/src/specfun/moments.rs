//! Integrals of squared Bessel functions against power and logarithmic weights.
//!
//! `∫₀^∞ w(t) J_ν(t)² dt` is split at a point `T ≥ 30`. The head is plain
//! adaptive quadrature. On the tail `J_ν² = (2/(πt)) (P cos ω - Q sin ω)²`
//! separates into a smooth mean `(P² + Q²)/(πt)` and a part oscillating in
//! `2ω`; the latter is integrated over half-periods between zeros of
//! `cos 2ω` and the partial sums are extrapolated with Wynn's epsilon.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2, PI};

use crate::error::{domain, Result};
use crate::specfun::bessel::{bessel_j, hankel_pq, hankel_phase, BesselOrder};
use crate::specfun::gamma::{digamma, log_gamma};
use crate::specfun::orthopoly::jacobi_p;
use crate::specfun::quadrature::{integrate_algebraic_tail, integrate_with, wynn_epsilon, Options};

const SPLIT_FROM: f64 = 30.0;
const TAIL_PANELS: usize = 80;

fn squared_bessel_integral<W: Fn(f64) -> f64>(order: BesselOrder, weight: W, tol: f64) -> Result<f64> {
    let nu = order.nu();
    let offset = (0.5 * nu + 0.25) * PI + FRAC_PI_4;
    let m = ((SPLIT_FROM - offset) / FRAC_PI_2).ceil().max(0.0);
    let split = offset + m * FRAC_PI_2;
    let opts = Options { abs_tol: tol * 0.1, rel_tol: 0.0, max_panels: 20_000 };

    let head = integrate_with(
        |t| {
            let j = bessel_j(nu, t).unwrap_or(0.0);
            weight(t) * j * j
        },
        0.0,
        split,
        opts,
    )?;

    let mean = integrate_algebraic_tail(
        |t| {
            let (p, q) = hankel_pq(nu, t);
            weight(t) * (p * p + q * q) / (PI * t)
        },
        split,
        opts,
    )?;

    let oscillating = |t: f64| {
        let (p, q) = hankel_pq(nu, t);
        let w2 = 2.0 * hankel_phase(nu, t);
        weight(t) * 2.0 / (PI * t) * (0.5 * (p * p - q * q) * w2.cos() - p * q * w2.sin())
    };
    let mut sums = Vec::with_capacity(TAIL_PANELS);
    let mut acc = 0.0;
    for k in 0..TAIL_PANELS {
        let a = split + k as f64 * FRAC_PI_2;
        let piece = integrate_with(oscillating, a, a + FRAC_PI_2, Options { abs_tol: tol * 1e-3, ..opts })?;
        acc += piece.value;
        sums.push(acc);
    }
    Ok(head.value + mean.value + wynn_epsilon(&sums))
}

fn check_power_range(s: f64, nu: f64) -> Result<()> {
    if !(s > -1.0 && s < 2.0 * nu) {
        return domain(format!("∫ t^(-s-1) J_ν² diverges unless -1 < s < 2ν (s = {s}, ν = {nu})"));
    }
    Ok(())
}

/// `∫₀^∞ t^{-s-1} J_ν(t)² dt` by quadrature.
pub fn bessel_moment(s: f64, nu: f64) -> Result<f64> {
    let order = BesselOrder::from_f64(nu)?;
    check_power_range(s, nu)?;
    squared_bessel_integral(order, |t| t.powf(-s - 1.0), 1e-11)
}

/// `Γ(s+1) Γ(ν - s/2) / (2^{s+1} Γ(1 + s/2)² Γ(ν + 1 + s/2))`.
pub fn bessel_moment_closed_form(s: f64, nu: f64) -> Result<f64> {
    check_power_range(s, nu)?;
    let log = log_gamma(s + 1.0)? + log_gamma(nu - 0.5 * s)?
        - (s + 1.0) * LN_2
        - 2.0 * log_gamma(1.0 + 0.5 * s)?
        - log_gamma(nu + 1.0 + 0.5 * s)?;
    Ok(log.exp())
}

/// `∫₀^∞ (log t / t) J_ν(t)² dt` by quadrature.
pub fn bessel_log_moment(nu: f64) -> Result<f64> {
    let order = BesselOrder::from_f64(nu)?;
    if !(nu > 0.0) {
        return domain("the logarithmic moment needs ν > 0");
    }
    squared_bessel_integral(order, |t| t.ln() / t, 1e-11)
}

/// `(ψ(ν) + log 2)/(2ν) + 1/(4ν²)`.
pub fn bessel_log_moment_closed_form(nu: f64) -> Result<f64> {
    if !(nu > 0.0) {
        return domain("the logarithmic moment needs ν > 0");
    }
    Ok((digamma(nu)? + LN_2) / (2.0 * nu) + 1.0 / (4.0 * nu * nu))
}

/// `L ∫_{L^{-1/2}}^{π/2} P_L^{(1,0)}(cos θ)² log(1 + sin(θ/2)) sin θ dθ / log L`,
/// which stays bounded above and below as `L` grows.
pub fn jacobi_log_trend(l: usize) -> Result<f64> {
    if l < 2 {
        return domain("the trend ratio needs L >= 2");
    }
    let lf = l as f64;
    let integral = integrate_with(
        |th: f64| {
            let p = jacobi_p(l, 1.0, 0.0, th.cos());
            p * p * (0.5 * th).sin().ln_1p() * th.sin()
        },
        lf.powf(-0.5),
        FRAC_PI_2,
        Options { abs_tol: 1e-12, rel_tol: 1e-10, max_panels: 20_000 },
    )?;
    Ok(lf * integral.value / lf.ln())
}

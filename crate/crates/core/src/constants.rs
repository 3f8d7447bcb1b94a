//! Named constants, fiber-count rules and expected kernel energies.

use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use crate::energy::{predicted_energy_from_kernel, sphere_kernel};
use crate::ensembles::{equal_area_partition, region_diameter, EnsembleKind};
use crate::error::{domain, invalid, Result};
use crate::specfun::gamma::{log_gamma, EULER_GAMMA};
use crate::specfun::orthopoly::{gegenbauer, jacobi_p};
use crate::specfun::quadrature::{integrate_improper_with, integrate_with, Options};

/// `κ = -(1 + log 2)/2`, the mean of `log ‖O - O'‖⁻¹` over Haar pairs.
pub const KAPPA: f64 = -(1.0 + LN_2) / 2.0;

/// Printed reference digits of `J`.
pub const J_REFERENCE: f64 = -0.578_789_34;

pub fn kappa() -> f64 {
    KAPPA
}

/// `-(2/π) ∫₀^π log(√8 sin(θ/2)) sin²(θ/2) dθ`, the rotation-angle form of `κ`.
pub fn kappa_quadrature() -> Result<f64> {
    let v = integrate_with(
        |t: f64| {
            let s = (0.5 * t).sin();
            (8f64.sqrt() * s).ln() * s * s
        },
        0.0,
        PI,
        Options::abs(1e-13),
    )?;
    Ok(-2.0 / PI * v.value)
}

/// Taylor coefficients of `N(t)/(e^t - 1)³` about 0, where
/// `N(t) = 2e^{2t} - 4e^t - 4te^{2t} + t²e^t + t²e^{2t} + 4te^t + 2`.
fn j_series() -> Vec<f64> {
    const TERMS: usize = 24;
    let len = TERMS + 4;
    let mut fact = vec![1.0f64; len + 1];
    for k in 1..=len {
        fact[k] = fact[k - 1] * k as f64;
    }
    let pow = |b: f64, k: usize| b.powi(k as i32);
    let inv_fact = |k: isize| if k < 0 { 0.0 } else { 1.0 / fact[k as usize] };
    let numer: Vec<f64> = (0..len)
        .map(|k| {
            let ki = k as isize;
            let mut c = 2.0 * pow(2.0, k) * inv_fact(ki) - 4.0 * inv_fact(ki);
            if k >= 1 {
                c += -4.0 * pow(2.0, k - 1) * inv_fact(ki - 1) + 4.0 * inv_fact(ki - 1);
            }
            if k >= 2 {
                c += inv_fact(ki - 2) + pow(2.0, k - 2) * inv_fact(ki - 2);
            }
            if k == 0 {
                c += 2.0;
            }
            c
        })
        .collect();
    let denom: Vec<f64> = (0..len)
        .map(|k| if k == 0 { 0.0 } else { (pow(3.0, k) - 3.0 * pow(2.0, k) + 3.0) / fact[k] })
        .collect();
    // both series start at t³
    let mut q = vec![0.0; TERMS];
    for k in 0..TERMS {
        let mut acc = numer[k + 3];
        for j in 0..k {
            acc -= q[j] * denom[k - j + 3];
        }
        q[k] = acc / denom[3];
    }
    q
}

/// `N(t)/(e^t - 1)³`, by series near zero and in scaled form elsewhere.
pub fn j_ratio(t: f64) -> f64 {
    use std::sync::OnceLock;
    static SERIES: OnceLock<Vec<f64>> = OnceLock::new();
    if t < 0.25 {
        let q = SERIES.get_or_init(j_series);
        return q.iter().rev().fold(0.0, |acc, &c| acc * t + c);
    }
    let (e1, e2, e3) = ((-t).exp(), (-2.0 * t).exp(), (-3.0 * t).exp());
    let numer = 2.0 * e1 - 4.0 * e2 - 4.0 * t * e1 + t * t * e2 + t * t * e1 + 4.0 * t * e2 + 2.0 * e3;
    let denom = (-(-t).exp_m1()).powi(3);
    numer / denom
}

/// `J = ∫₀^∞ sqrt(t) N(t)/(e^t - 1)³ dt`, computed as `2∫₀^∞ x² ratio(x²) dx`.
pub fn constant_j() -> Result<f64> {
    let v = integrate_improper_with(|x| 2.0 * x * x * j_ratio(x * x), 0.0, Options::abs(1e-13))?;
    Ok(v.value)
}

/// `-(1/3) log(4/(9|J|)) - (2/3) sqrt|J|` from a given `J`.
pub fn c_zeros_from(j: f64) -> f64 {
    let a = j.abs();
    -(4.0 / (9.0 * a)).ln() / 3.0 - 2.0 / 3.0 * a.sqrt()
}

pub fn c_zeros() -> Result<f64> {
    Ok(c_zeros_from(constant_j()?))
}

/// `-(5/6) log 2 + (2/3) log 3 + (1/3) log π + 2/3`.
pub fn c_sph() -> f64 {
    -5.0 / 6.0 * LN_2 + 2.0 / 3.0 * 3f64.ln() + PI.ln() / 3.0 + 2.0 / 3.0
}

/// `7/3 - γ + (log 2)/6 - (log 3)/3`.
pub fn c_harmonic_so3() -> f64 {
    7.0 / 3.0 - EULER_GAMMA + LN_2 / 6.0 - 3f64.ln() / 3.0
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct NamedConstant {
    pub name: &'static str,
    pub value: f64,
    pub method: &'static str,
    pub tolerance: f64,
}

/// The named constants with the method used and the tolerance achieved.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ClosedFormConstants {
    pub kappa: NamedConstant,
    pub kappa_quadrature: NamedConstant,
    pub j: NamedConstant,
    pub c_zeros: NamedConstant,
    pub c_sph: NamedConstant,
    pub c_harmonic_so3: NamedConstant,
}

impl ClosedFormConstants {
    pub fn compute() -> Result<Self> {
        let j = constant_j()?;
        let c = |name, value, method, tolerance| NamedConstant { name, value, method, tolerance };
        Ok(ClosedFormConstants {
            kappa: c("kappa", KAPPA, "closed-form", 1e-16),
            kappa_quadrature: c("kappa_quadrature", kappa_quadrature()?, "quadrature", 1e-12),
            j: c("J", j, "quadrature", 1e-12),
            c_zeros: c("C_zeros", c_zeros_from(j), "closed-form from quadrature J", 1e-12),
            c_sph: c("C_sph", c_sph(), "closed-form", 1e-16),
            c_harmonic_so3: c("C_harmonic_so3", c_harmonic_so3(), "closed-form", 1e-16),
        })
    }

    pub fn entries(&self) -> Vec<&NamedConstant> {
        vec![&self.kappa, &self.kappa_quadrature, &self.j, &self.c_zeros, &self.c_sph, &self.c_harmonic_so3]
    }
}

/// Fiber count minimizing the predicted energy for `r` points of `kind`.
pub fn optimal_s(kind: EnsembleKind, r: usize) -> Result<usize> {
    if r == 0 {
        return invalid("r must be at least 1");
    }
    let rf = r as f64;
    let raw = match kind {
        EnsembleKind::Uniform => 2.0,
        EnsembleKind::Zeros => (4.0 * rf / (9.0 * J_REFERENCE.abs())).sqrt(),
        EnsembleKind::Spherical => (16.0 * rf / (9.0 * PI)).sqrt(),
        EnsembleKind::Eap => rf.sqrt(),
        EnsembleKind::Harmonic => {
            if r == 1 {
                1.0
            } else {
                rf.sqrt() / rf.ln()
            }
        }
    };
    Ok((raw.floor() as usize).max(1))
}

/// `(r, s, n)` rows for `r = 2..=r_max` (perfect squares only for the
/// harmonic ensemble).
pub fn realizable_n(kind: EnsembleKind, r_max: usize) -> Result<Vec<(usize, usize, usize)>> {
    let mut rows = Vec::new();
    for r in 2..=r_max {
        if kind == EnsembleKind::Harmonic && !is_square(r) {
            continue;
        }
        let s = optimal_s(kind, r)?;
        rows.push((r, s, r * s));
    }
    Ok(rows)
}

fn is_square(r: usize) -> bool {
    let l = (r as f64).sqrt().round() as usize;
    l * l == r
}

/// `(γ_{r,1}(u), γ_{r,2}(u))` with `Q = (1+u²)^r - 1`:
/// `γ_{r,1} = (1 - r u²/Q)² (1+u²)^{r-2}/Q`, `γ_{r,2} = (1 - r u² (1+u²)^{r-1}/Q)²/Q`.
pub fn gamma_r(r: usize, u: f64) -> (f64, f64) {
    if u <= 0.0 {
        return (0.0, 0.0);
    }
    let rf = r as f64;
    let l = (u * u).ln_1p();
    let tail = -(-rf * l).exp_m1();
    // (1+u²)^{r-k}/Q = e^{-kL} / (1 - e^{-rL})
    let ratio = |k: f64| (-k * l).exp() / tail;
    let inv_q = ratio(rf);
    let a = 1.0 - rf * u * u * inv_q;
    let b = 1.0 - rf * u * u * ratio(1.0);
    (a * a * ratio(2.0), b * b * inv_q)
}

fn zeros_weight(u: f64) -> f64 {
    u * (u / (1.0 + u * u).sqrt()).ln_1p()
}

/// `2 ∫₀^∞ u log(1 + u/sqrt(1+u²)) (γ_r(u) - (1+u²)^{-2}) du`, the
/// deviation of `I_r/r²` from its limit `1/2`.
fn zeros_deviation(r: usize) -> Result<f64> {
    let f = |u: f64| {
        let (g1, g2) = gamma_r(r, u);
        let lim = 1.0 / (1.0 + u * u).powi(2);
        2.0 * zeros_weight(u) * ((g1 - lim) + g2)
    };
    let scale = 1.0 / (r as f64).sqrt();
    let opts = Options { abs_tol: 1e-16, rel_tol: 1e-11, max_panels: 20_000 };
    let mut total = 0.0;
    let mut a = 0.0;
    for b in [scale, 4.0 * scale, 1.0] {
        if b > a {
            total += integrate_with(f, a, b, opts)?.value;
            a = b;
        }
    }
    total += integrate_improper_with(f, a, opts)?.value;
    Ok(total)
}

/// `I_r/r²` for the zeros ensemble.
pub fn zeros_normalized_kernel_energy(r: usize) -> Result<f64> {
    if r == 0 {
        return invalid("r must be at least 1");
    }
    Ok(0.5 + zeros_deviation(r)?)
}

/// `J_r = (I_r - r²/2)/sqrt(r)`.
pub fn zeros_j_sequence(r: usize) -> Result<f64> {
    if r < 2 {
        return invalid("J_r needs r >= 2");
    }
    Ok((r as f64).powf(1.5) * zeros_deviation(r)?)
}

/// Lower bound `r²/2 - r log(1 + sqrt(C₀/(2r)))` on the expected kernel
/// energy of the equal-area ensemble, with `C₀ = r · diam²/2` measured on the
/// partition.
pub fn eap_kernel_lower_bound(r: usize) -> Result<(f64, f64)> {
    if r == 0 {
        return invalid("r must be at least 1");
    }
    let rf = r as f64;
    let diam = equal_area_partition(r).iter().map(region_diameter).fold(0.0, f64::max);
    let c0 = rf * diam * diam / 2.0;
    Ok((rf * rf / 2.0 - rf * (c0 / (2.0 * rf)).sqrt().ln_1p(), c0))
}

/// Upper bound on the expected SO(3) energy of the equal-area construction.
pub fn eap_energy_upper_bound(r: usize, s: usize) -> Result<f64> {
    Ok(predicted_energy_from_kernel(r, s, eap_kernel_lower_bound(r)?.0))
}

/// `E Σ_{i≠i'} K(<p_i, p_i'>)` for `r` points of `kind`.
pub fn expected_kernel_energy(kind: EnsembleKind, r: usize) -> Result<f64> {
    if r == 0 {
        return invalid("r must be at least 1");
    }
    let rf = r as f64;
    match kind {
        EnsembleKind::Uniform => Ok(rf * (rf - 1.0) / 2.0),
        EnsembleKind::Spherical => {
            let ratio = (log_gamma(rf)? - log_gamma(rf + 0.5)?).exp();
            Ok(rf * rf / 2.0 - PI.sqrt() / 2.0 * rf * ratio + 0.5)
        }
        EnsembleKind::Zeros => Ok(rf * rf * zeros_normalized_kernel_energy(r)?),
        EnsembleKind::Harmonic => {
            if !is_square(r) {
                return domain(format!("the harmonic ensemble needs r = (L+1)², got {r}"));
            }
            let l = (rf.sqrt().round() as usize) - 1;
            let norm = ((l + 1) * (l + 1)) as f64;
            let v = integrate_with(
                |t| {
                    let p = jacobi_p(l, 1.0, 0.0, t);
                    (1.0 - p * p / norm) * sphere_kernel(t)
                },
                -1.0,
                1.0,
                Options { abs_tol: 1e-14, rel_tol: 1e-12, max_panels: 20_000 },
            )?;
            Ok(rf * rf / 2.0 * v.value)
        }
        EnsembleKind::Eap => domain("the equal-area ensemble has only a bound; see eap_kernel_lower_bound"),
    }
}

/// Expected SO(3) energy for `r` points of `kind` and `s` rotations per fiber.
pub fn predicted_ensemble_energy(kind: EnsembleKind, r: usize, s: usize) -> Result<f64> {
    if s == 0 {
        return invalid("s must be at least 1");
    }
    Ok(predicted_energy_from_kernel(r, s, expected_kernel_energy(kind, r)?))
}

/// `(4/π) ∫₀^{π/2} log(√8 sin θ) C_{2L}^{(2)}(cos θ)² sin²θ dθ`.
pub fn so3_harmonic_integral(l: usize) -> Result<f64> {
    let v = integrate_with(
        |th: f64| {
            let c = gegenbauer(2 * l, 2.0, th.cos());
            let s = th.sin();
            (8f64.sqrt() * s).ln() * c * c * s * s
        },
        0.0,
        PI / 2.0,
        Options { abs_tol: 1e-13, rel_tol: 1e-13, max_panels: 20_000 },
    )?;
    Ok(4.0 / PI * v.value)
}

/// Limit of `(I(L) + (4/3) L³ log L) / ((4/3) L³)`.
pub fn so3_harmonic_trend_limit() -> f64 {
    (7.0 - 3.0 * EULER_GAMMA - 6.0 * LN_2) / 3.0 + 1.5 * LN_2
}

pub fn so3_harmonic_trend(l: usize) -> Result<f64> {
    if l < 2 {
        return invalid("the trend ratio needs L >= 2");
    }
    let lf = l as f64;
    let cube = 4.0 / 3.0 * lf.powi(3);
    Ok((so3_harmonic_integral(l)? + cube * lf.ln()) / cube)
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundViolation {
    pub u: f64,
    pub bound: &'static str,
    pub value: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaBoundsReport {
    pub r: usize,
    pub points: usize,
    pub violations: Vec<BoundViolation>,
}

impl GammaBoundsReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the pointwise bounds on `γ_{r,1}`, `γ_{r,2}` and their sum on a
/// log-spaced grid of `grid` points in `[1e-4, 1e2]/sqrt(r)`.
pub fn gamma_r_bounds_check(r: usize, grid: usize) -> Result<GammaBoundsReport> {
    if r < 2 {
        return invalid("the bounds are stated for r >= 2");
    }
    if grid < 2 {
        return invalid("grid needs at least two points");
    }
    let rf = r as f64;
    let split = rf.powf(-0.5);
    let mut violations = Vec::new();
    let slack = 1.0 + 1e-12;
    for k in 0..grid {
        let u = split * 10f64.powf(-4.0 + 6.0 * k as f64 / (grid - 1) as f64);
        let (g1, g2) = gamma_r(r, u);
        let mut check = |bound: &'static str, value: f64, limit: f64| {
            if value > limit * slack {
                violations.push(BoundViolation { u, bound, value, limit });
            }
        };
        let u2 = u * u;
        if u < split {
            check("gamma1 <= 11 r u^2", g1, 11.0 * rf * u2);
            check("gamma2 <= 2 r u^2", g2, 2.0 * rf * u2);
            check("gamma <= 13 r u^2", g1 + g2, 13.0 * rf * u2);
        } else {
            let decay = 1.0 / (1.0 + u2).powi(2);
            let log_b2 = (8.0 * rf * rf * u2 * u2).ln() - (rf + 2.0) * u2.ln_1p();
            check("gamma1 <= 2/(1+u^2)^2", g1, 2.0 * decay);
            check("gamma2 <= 8 r^2 u^4/(1+u^2)^(r+2)", g2, log_b2.exp());
            check("gamma <= 34/(1+u^2)^2", g1 + g2, 34.0 * decay);
        }
    }
    Ok(GammaBoundsReport { r, points: grid, violations })
}

//! Bessel functions of the first kind for the orders the energy estimates need.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{domain, Result};

/// Supported orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselOrder {
    Zero,
    One,
    ThreeHalves,
}

impl BesselOrder {
    pub fn from_f64(nu: f64) -> Result<Self> {
        match nu {
            v if v == 0.0 => Ok(BesselOrder::Zero),
            v if v == 1.0 => Ok(BesselOrder::One),
            v if v == 1.5 => Ok(BesselOrder::ThreeHalves),
            v => domain(format!("Bessel order {v} is not supported (0, 1 or 3/2)")),
        }
    }

    pub fn nu(self) -> f64 {
        match self {
            BesselOrder::Zero => 0.0,
            BesselOrder::One => 1.0,
            BesselOrder::ThreeHalves => 1.5,
        }
    }
}

/// Above this argument integer orders switch to the Hankel expansion.
pub const ASYMPTOTIC_FROM: f64 = 25.0;

/// `J_ν(x)` for `ν ∈ {0, 1, 3/2}` and `x ≥ 0`.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    let order = BesselOrder::from_f64(nu)?;
    if !(x >= 0.0) || !x.is_finite() {
        return domain(format!("bessel_j needs a finite x >= 0, got {x}"));
    }
    Ok(match order {
        BesselOrder::ThreeHalves => j_three_halves(x),
        BesselOrder::Zero => j_integer(0, x),
        BesselOrder::One => j_integer(1, x),
    })
}

pub fn j0(x: f64) -> f64 {
    j_integer(0, x.abs())
}

pub fn j1(x: f64) -> f64 {
    let v = j_integer(1, x.abs());
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// `J_{3/2}(x) = sqrt(2/(πx)) (sin x / x - cos x)`.
pub fn j_three_halves(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let bracket = if x < 0.5 {
        // Σ_{k≥1} (-1)^{k+1} 2k x^{2k} / (2k+1)!
        let x2 = x * x;
        let mut term = x2 / 3.0;
        let mut sum = term;
        let mut k = 1.0;
        loop {
            // ratio of consecutive terms
            term *= -x2 * (k + 1.0) / (k * (2.0 * k + 2.0) * (2.0 * k + 3.0));
            sum += term;
            k += 1.0;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        x.sin() / x - x.cos()
    };
    (2.0 / (PI * x)).sqrt() * bracket
}

fn j_integer(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x < 2.0 {
        power_series(n, x)
    } else if x < ASYMPTOTIC_FROM {
        miller(n, x)
    } else {
        let (p, q) = hankel_pq(n as f64, x);
        let (s, c) = x.sin_cos();
        let (cw, sw) = if n == 0 {
            ((c + s) * FRAC_1_SQRT_2, (s - c) * FRAC_1_SQRT_2)
        } else {
            ((s - c) * FRAC_1_SQRT_2, (-s - c) * FRAC_1_SQRT_2)
        };
        (2.0 / (PI * x)).sqrt() * (p * cw - q * sw)
    }
}

fn power_series(n: u32, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = if n == 0 { 1.0 } else { h };
    let mut sum = term;
    let h2 = h * h;
    for k in 1..60 {
        let k = k as f64;
        term *= -h2 / (k * (k + n as f64));
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Backward recurrence normalized by `J₀ + 2 Σ J_{2k} = 1`.
fn miller(n: u32, x: f64) -> f64 {
    let start = 2 * ((x as usize + 20 + (40.0 * x).sqrt() as usize) / 2);
    let (mut next, mut cur) = (0.0f64, 1e-30f64);
    let mut norm = 0.0;
    let mut wanted = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        // cur now holds J_{k-1}
        if (k - 1) as u32 == n {
            wanted = cur;
        }
        if k - 1 > 0 && (k - 1) % 2 == 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            wanted *= 1e-250;
        }
    }
    norm += cur;
    wanted / norm
}

/// Hankel amplitudes `P(ν, x)`, `Q(ν, x)` with
/// `J_ν(x) = sqrt(2/(πx)) (P cos ω - Q sin ω)`, `ω = x - νπ/2 - π/4`.
///
/// The series terminate for half-integer orders; otherwise they are summed
/// up to the smallest term, which is accurate for `x ≳ 20`.
pub fn hankel_pq(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let (mut p, mut q) = (0.0, 0.0);
    let mut term = 1.0f64;
    let mut last = f64::INFINITY;
    for k in 0..200 {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        }
        let mag = term.abs();
        if k > 0 && mag > last {
            break;
        }
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if mag == 0.0 || mag < 1e-17 * p.abs().max(1e-300) {
            break;
        }
        last = mag;
    }
    (p, q)
}

/// Phase `ω = x - νπ/2 - π/4` of the Hankel expansion.
pub fn hankel_phase(nu: f64, x: f64) -> f64 {
    x - (0.5 * nu + 0.25) * PI
}

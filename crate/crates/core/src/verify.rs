//! Self-check suites: each check compares an exact identity, a quadrature or
//! a Monte Carlo estimate with its closed form and reports pass/fail.

use std::f64::consts::PI;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::constants::{
    c_harmonic_so3, c_sph, c_zeros, constant_j, eap_energy_upper_bound, expected_kernel_energy, kappa_quadrature,
    optimal_s, zeros_j_sequence, zeros_normalized_kernel_energy, KAPPA,
};
use crate::construct::{build_fiber, fiber_energy_closed_form};
use crate::energy::{circle_average, circle_average_quadrature, log_energy, sphere_kernel};
use crate::ensembles::{equal_area_partition, region_diameter, EnsembleKind, EnsembleSpec, FiberCount};
use crate::error::{invalid, Error, Result};
use crate::experiment::{
    generate, monte_carlo, run_experiment, run_kernel_experiment, run_phase_experiment, thread_pool,
    ExperimentConfig, Z_PASS,
};
use crate::geometry::{haar_rotation, so3_dist_sq, uniform_sphere_point};
use crate::rng::stream;
use crate::specfun::kernel::{kernel, kernel_derivative, kernel_gegenbauer_coeff};
use crate::specfun::moments::{bessel_log_moment, bessel_moment, jacobi_log_trend};
use crate::specfun::orthopoly::{gegenbauer, gegenbauer_via_jacobi};

const SEED: u64 = 0x5033_e4e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Identities and quadratures at full tolerance, Monte Carlo at a tenth of the sample sizes.
    Fast,
    /// Every check at its stated sample size.
    Full,
}

impl Suite {
    fn trials(self, full: u64) -> u64 {
        match self {
            Suite::Fast => (full / 10).max(1),
            Suite::Full => full,
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fast" => Ok(Suite::Fast),
            "full" => Ok(Suite::Full),
            other => invalid(format!("unknown suite '{other}' (fast, full)")),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

pub const CHECK_COUNT: u32 = 13;

pub fn check_name(id: u32) -> &'static str {
    match id {
        1 => "kappa",
        2 => "closed-form constants",
        3 => "fiber energy identity",
        4 => "circle average",
        5 => "expected energy, fixed points",
        6 => "continuous kernel energy",
        7 => "spherical ensemble",
        8 => "elliptic zeros ensemble",
        9 => "equal-area partition",
        10 => "kernel positive definiteness",
        11 => "Bessel and Jacobi identities",
        12 => "headline residual trend",
        13 => "determinism",
        _ => "unknown",
    }
}

/// Runs check `id` (1 to 13); an internal error counts as a failure.
pub fn run_check(id: u32, suite: Suite) -> CheckResult {
    let start = Instant::now();
    let outcome = match id {
        1 => check_kappa(suite),
        2 => check_constants(),
        3 => check_fiber_identity(),
        4 => check_circle_average(),
        5 => check_fixed_points(suite),
        6 => check_continuous_kernel(suite),
        7 => check_spherical(suite),
        8 => check_zeros(suite),
        9 => check_equal_area(suite),
        10 => check_positive_definite(),
        11 => check_appendix(),
        12 => check_headline(suite),
        13 => check_determinism(),
        _ => invalid(format!("no check {id}")),
    };
    let (pass, detail) = match outcome {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    CheckResult { id, name: check_name(id), pass, detail, seconds: start.elapsed().as_secs_f64() }
}

pub fn run_suite(suite: Suite) -> Vec<CheckResult> {
    (1..=CHECK_COUNT).map(|id| run_check(id, suite)).collect()
}

type Outcome = Result<(bool, String)>;

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn check_kappa(suite: Suite) -> Outcome {
    let q = kappa_quadrature()?;
    let mc = monte_carlo(suite.trials(1_000_000), SEED, |rng| {
        let (a, b) = (haar_rotation(rng), haar_rotation(rng));
        Ok(Some(-0.5 * so3_dist_sq(&a, &b).ln()))
    })?;
    let z = (mc.mean - KAPPA) / mc.std_error;
    let pass = within(q, KAPPA, 1e-10) && z.abs() <= Z_PASS;
    Ok((pass, format!("quadrature {q:.15} (|Δ| {:.1e}); MC {:.6} ± {:.1e}, z = {z:.2}", (q - KAPPA).abs(), mc.mean, mc.std_error)))
}

fn check_constants() -> Outcome {
    let (j, cz, cs, ch) = (constant_j()?, c_zeros()?, c_sph(), c_harmonic_so3());
    let pass = within(j, -0.578_789_34, 1e-6)
        && within(cz, -0.419_150_2, 1e-6)
        && within(cs, 1.203_028, 1e-6)
        && within(ch, 1.5054, 1e-4);
    Ok((pass, format!("J = {j:.12}, C_zeros = {cz:.12}, C_sph = {cs:.12}, C_harmonic_so3 = {ch:.12}")))
}

fn check_fiber_identity() -> Outcome {
    let start = Instant::now();
    let mut rng = stream(SEED, 3);
    let mut worst = 0.0f64;
    for s in 1..=64 {
        let p = uniform_sphere_point(&mut rng);
        let fiber = build_fiber(&p, s, 2.0 * PI * rand::Rng::random::<f64>(&mut rng))?;
        // Σ_{i≠j} log‖O_i - O_j‖ is minus the energy
        let direct = -log_energy(&fiber.matrices).value;
        let exact = fiber_energy_closed_form(s);
        let err = if exact == 0.0 { direct.abs() } else { ((direct - exact) / exact).abs() };
        worst = worst.max(err);
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((worst <= 1e-9 && secs < 5.0, format!("max relative error {worst:.1e} over s = 1..64 in {secs:.2} s")))
}

fn check_circle_average() -> Outcome {
    let mut rng = stream(SEED, 4);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let h = haar_rotation(&mut rng);
        let exact = circle_average(h.get(2, 2), 6.0, -2.0)?;
        let quad = circle_average_quadrature(&h, 6.0, -2.0)?;
        worst = worst.max((exact - quad).abs());
    }
    Ok((worst <= 1e-8, format!("max |closed form - quadrature| {worst:.1e} over 100 Haar frames")))
}

fn check_fixed_points(suite: Suite) -> Outcome {
    let start = Instant::now();
    let mut rng = stream(SEED, 5);
    let mut worst = 0.0f64;
    let mut all = true;
    for r in [2, 5, 10] {
        let points: Vec<_> = (0..r).map(|_| uniform_sphere_point(&mut rng)).collect();
        for s in 1..=3 {
            let rep = run_phase_experiment(&points, s, suite.trials(100_000), SEED + (10 * r + s) as u64)?;
            all &= rep.pass;
            worst = worst.max(rep.z_score.abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((all && secs < 60.0, format!("9 point sets, max |z| = {worst:.2}, {secs:.1} s")))
}

fn check_continuous_kernel(suite: Suite) -> Outcome {
    let mc = monte_carlo(suite.trials(1_000_000), SEED + 6, |rng| {
        let (p, q) = (uniform_sphere_point(rng), uniform_sphere_point(rng));
        Ok(Some(sphere_kernel(p.dot(&q))))
    })?;
    let z = (mc.mean - 0.5) / mc.std_error;
    Ok((z.abs() <= Z_PASS, format!("pair mean {:.6} ± {:.1e}, z = {z:.2}", mc.mean, mc.std_error)))
}

fn check_spherical(suite: Suite) -> Outcome {
    let rep = run_kernel_experiment(EnsembleKind::Spherical, 8, suite.trials(2000), SEED + 7)?;
    let two = expected_kernel_energy(EnsembleKind::Spherical, 2)?;
    let pass = rep.pass && within(two, 7.0 / 6.0, 1e-12);
    Ok((pass, format!("r = 8: MC {:.5} vs {:.5}, z = {:.2}; r = 2 exact {two:.15}", rep.mean, rep.prediction, rep.z_score)))
}

fn check_zeros(suite: Suite) -> Outcome {
    let mut pass = true;
    let mut detail = String::new();
    for r in [4, 8] {
        let rep = run_kernel_experiment(EnsembleKind::Zeros, r, suite.trials(2000), SEED + 8 + r as u64)?;
        pass &= rep.pass;
        detail += &format!("r = {r}: z = {:.2}; ", rep.z_score);
    }
    let i1000 = zeros_normalized_kernel_energy(1000)?;
    pass &= within(i1000, 0.5, 0.02);
    let j = constant_j()?;
    let seq = [64, 256, 1024, 4096].map(zeros_j_sequence).into_iter().collect::<Result<Vec<f64>>>()?;
    let monotone = seq.windows(2).all(|w| w[1] < w[0]);
    let bracketed = seq.iter().all(|&v| v >= j && v <= seq[0]);
    pass &= monotone && bracketed;
    detail += &format!("I_1000/r² = {i1000:.5}; J_r = {seq:.7?} → J = {j:.7}");
    Ok((pass, detail))
}

fn check_equal_area(suite: Suite) -> Outcome {
    let mut area_err = 0.0f64;
    let mut diam_ratio = 0.0f64;
    for r in [2, 10, 100, 1000] {
        let target = 4.0 * PI / r as f64;
        for region in equal_area_partition(r) {
            area_err = area_err.max((region.area() - target).abs());
            diam_ratio = diam_ratio.max(region_diameter(&region) * (r as f64).sqrt());
        }
    }
    let spec = EnsembleSpec::new(EnsembleKind::Eap, 100, FiberCount::Fixed(10), SEED + 9)?;
    let rep = run_experiment(&ExperimentConfig::new(spec, suite.trials(200))?)?;
    let bound = eap_energy_upper_bound(100, 10)?;
    let pass = area_err <= 1e-9 && diam_ratio <= 7.0 && rep.mean <= bound;
    Ok((pass, format!(
        "max area error {area_err:.1e}; max diameter·√r {diam_ratio:.3}; energy at (100, 10) {:.2} ± {:.2} vs bound {bound:.2}",
        rep.mean, rep.std_error
    )))
}

fn check_positive_definite() -> Outcome {
    let f0 = kernel_gegenbauer_coeff(0)?.value;
    let mut min_coeff = f64::INFINITY;
    for n in 1..=50 {
        min_coeff = min_coeff.min(kernel_gegenbauer_coeff(n)?.value);
    }
    let mut min_deriv = f64::INFINITY;
    let mut worst_fd = 0.0f64;
    let h = 1e-5;
    for k in 0..=180 {
        let t = -0.9 + 0.01 * k as f64;
        for n in 1..=4 {
            let d = kernel_derivative(n, t)?;
            let below = |x: f64| if n == 1 { Ok(kernel(x)) } else { kernel_derivative(n - 1, x) };
            let fd = (below(t + h)? - below(t - h)?) / (2.0 * h);
            min_deriv = min_deriv.min(d);
            worst_fd = worst_fd.max(((d - fd) / d).abs());
        }
    }
    let pass = within(f0, -0.5, 1e-8) && min_coeff > 0.0 && min_deriv > 0.0 && worst_fd <= 1e-5;
    Ok((pass, format!(
        "f̂(0) = {f0:.12}; min f̂(1..50) = {min_coeff:.3e}; min derivative {min_deriv:.3e}; finite-difference error {worst_fd:.1e}"
    )))
}

const TREND_BRACKET: (f64, f64) = (0.3, 0.4);

fn check_appendix() -> Outcome {
    let m = bessel_moment(0.0, 1.5)?;
    let lm = bessel_log_moment(1.5)?;
    let lm_exact = (7.0 - 3.0 * crate::specfun::gamma::EULER_GAMMA - 3.0 * std::f64::consts::LN_2) / 9.0;
    let mut rec = 0.0f64;
    for n in 0..=60 {
        let scale = gegenbauer(n, 2.0, 1.0);
        for i in 0..=200 {
            let x = -1.0 + 0.01 * i as f64;
            rec = rec.max((gegenbauer(n, 2.0, x) - gegenbauer_via_jacobi(n, 2.0, x)?).abs() / scale);
        }
    }
    let trend = [16, 32, 64, 128].map(jacobi_log_trend).into_iter().collect::<Result<Vec<f64>>>()?;
    let bracketed = trend.iter().all(|&v| v >= TREND_BRACKET.0 && v <= TREND_BRACKET.1);
    let pass = within(m, 1.0 / 3.0, 1e-8) && within(lm, lm_exact, 1e-8) && rec <= 1e-9 && bracketed;
    Ok((pass, format!(
        "∫J²/t = {m:.12}; log moment error {:.1e}; recurrence error {rec:.1e}; trend {trend:.4?} in [{}, {}]",
        (lm - lm_exact).abs(),
        TREND_BRACKET.0,
        TREND_BRACKET.1
    )))
}

/// Bracket for the normalized energy residual of the zeros construction.
#[derive(Debug, Clone, Deserialize)]
pub struct HeadlineBracket {
    pub ensemble: String,
    pub r: Vec<usize>,
    pub center: f64,
    pub half_width: f64,
}

impl HeadlineBracket {
    pub fn registered() -> Self {
        serde_json::from_str(include_str!("../fixtures/headline_bracket.json")).expect("fixture parses")
    }
}

/// `(E - κn² + (1/3) n log n)/n`.
pub fn normalized_residual(energy: f64, n: usize) -> f64 {
    let nf = n as f64;
    (energy - KAPPA * nf * nf + nf * nf.ln() / 3.0) / nf
}

fn check_headline(suite: Suite) -> Outcome {
    let bracket = HeadlineBracket::registered();
    let kind: EnsembleKind = bracket.ensemble.parse()?;
    let mut pass = true;
    let mut spreads = Vec::new();
    let mut detail = String::new();
    for &r in &bracket.r {
        let s = optimal_s(kind, r)?;
        let spec = EnsembleSpec::new(kind, r, FiberCount::Fixed(s), SEED + 12 + r as u64)?;
        let rep = run_experiment(&ExperimentConfig::new(spec, suite.trials(400))?)?;
        let residual = normalized_residual(rep.mean, rep.n);
        let spread = rep.std_error * (rep.trials as f64).sqrt() / rep.n as f64;
        pass &= residual.is_finite() && (residual - bracket.center).abs() <= bracket.half_width;
        spreads.push(spread);
        detail += &format!("r = {r} (n = {}): residual {residual:.4}, spread {spread:.2e}; ", rep.n);
    }
    pass &= spreads.windows(2).all(|w| w[1] < w[0]);
    detail += &format!("bracket {} ± {}", bracket.center, bracket.half_width);
    Ok((pass, detail))
}

fn check_determinism() -> Outcome {
    let one = thread_pool(Some(1))?;
    let eight = thread_pool(Some(8))?;
    let mut pass = true;
    for (kind, r) in [(EnsembleKind::Uniform, 300), (EnsembleKind::Zeros, 40), (EnsembleKind::Eap, 300)] {
        let spec = EnsembleSpec::new(kind, r, FiberCount::Auto, SEED + 13)?;
        let a = one.install(|| generate(&spec))?;
        let b = eight.install(|| generate(&spec))?;
        pass &= a.to_json() == b.to_json() && a.to_csv() == b.to_csv();
        let cfg = ExperimentConfig::new(EnsembleSpec::new(kind, r.min(40), FiberCount::Auto, SEED + 13)?, 64)?;
        let a = one.install(|| run_experiment(&cfg))?;
        let b = eight.install(|| run_experiment(&cfg))?;
        pass &= a.to_json() == b.to_json() && a.to_csv() == b.to_csv();
    }
    Ok((pass, "configurations and reports compared byte for byte across 1 and 8 workers".to_string()))
}

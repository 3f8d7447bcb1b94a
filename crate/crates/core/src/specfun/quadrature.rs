//! Adaptive Gauss–Legendre quadrature.
//!
//! Each panel is integrated with a 12-point and a 24-point rule; the 24-point
//! value is kept and the difference serves as a (pessimistic) error estimate.
//! The panel with the largest estimate is bisected until the summed estimate
//! meets the target or the panel budget runs out.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{invalid, Error, Result};

/// Default absolute tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default panel budget.
pub const DEFAULT_MAX_PANELS: usize = 20_000;

/// A fixed rule on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub a: f64,
    pub b: f64,
}

impl QuadratureRule {
    /// `n`-point Gauss–Legendre rule on `[a, b]`.
    pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<Self> {
        if n == 0 {
            return invalid("a quadrature rule needs at least one node");
        }
        if !(a.is_finite() && b.is_finite()) {
            return invalid("quadrature bounds must be finite");
        }
        let (x, w) = legendre_nodes(n);
        let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
        Ok(QuadratureRule {
            nodes: x.iter().map(|t| c + h * t).collect(),
            weights: w.iter().map(|v| h * v).collect(),
            a,
            b,
        })
    }

    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Nodes and weights of the `n`-point rule on `[-1, 1]` by Newton iteration
/// on the Legendre recurrence.
pub fn legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (z * p1 - p0) / (z * z - 1.0))
}

struct Pair {
    low: (Vec<f64>, Vec<f64>),
    high: (Vec<f64>, Vec<f64>),
}

fn pair() -> &'static Pair {
    static PAIR: OnceLock<Pair> = OnceLock::new();
    PAIR.get_or_init(|| Pair { low: legendre_nodes(12), high: legendre_nodes(24) })
}

/// Tolerances and budget for [`integrate_with`].
#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { abs_tol: DEFAULT_TOL, rel_tol: 0.0, max_panels: DEFAULT_MAX_PANELS }
    }
}

impl Options {
    pub fn abs(tol: f64) -> Self {
        Options { abs_tol: tol, ..Default::default() }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then_with(|| other.a.total_cmp(&self.a))
    }
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let p = pair();
    let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
    let eval = |rule: &(Vec<f64>, Vec<f64>)| -> f64 {
        h * rule.0.iter().zip(&rule.1).map(|(&x, &w)| w * f(c + h * x)).sum::<f64>()
    };
    let low = eval(&p.low);
    let high = eval(&p.high);
    Panel { a, b, value: high, error: (high - low).abs() }
}

/// Compensated sum, fixed order.
pub(crate) fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Adaptive integration of `f` over the finite interval `[a, b]`.
pub fn integrate_with<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: Options) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite()) {
        return invalid("integrate needs finite bounds; use integrate_improper");
    }
    if !(opts.abs_tol > 0.0 || opts.rel_tol > 0.0) {
        return invalid("at least one tolerance must be positive");
    }
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0, panels: 0 });
    }
    let mut heap = BinaryHeap::new();
    let first = panel(&f, a, b);
    let (mut total, mut err) = (first.value, first.error);
    heap.push(first);
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if err <= target {
            break;
        }
        if heap.len() >= opts.max_panels {
            return Err(Error::Quadrature { estimate: total, error: err, panels: heap.len(), tol: target });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::Quadrature { estimate: total, error: err, panels: heap.len() + 1, tol: target });
        }
        let left = panel(&f, worst.a, mid);
        let right = panel(&f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        if !total.is_finite() {
            return Err(Error::Quadrature { estimate: total, error: err, panels: heap.len(), tol: target });
        }
        heap.push(left);
        heap.push(right);
    }
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = neumaier_sum(panels.iter().map(|p| p.value));
    let error = panels.iter().map(|p| p.error).sum();
    Ok(Integral { value, error, panels: panels.len() })
}

/// Adaptive integration over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    Ok(integrate_with(f, a, b, Options::abs(tol))?.value)
}

/// Integration over `[a, ∞)` by the substitution `t = a + u/(1-u)`.
pub fn integrate_improper_with<F: Fn(f64) -> f64>(f: F, a: f64, opts: Options) -> Result<Integral> {
    if !a.is_finite() {
        return invalid("lower bound of an improper integral must be finite");
    }
    let g = |u: f64| {
        let v = 1.0 - u;
        let t = a + u / v;
        if !t.is_finite() {
            return 0.0;
        }
        let y = f(t) / (v * v);
        if y.is_finite() {
            y
        } else {
            0.0
        }
    };
    let result = integrate_with(g, 0.0, 1.0, opts)?;
    // tail check: the mapped integrand must stay (nearly) bounded at the far end
    let eps = 1e-12;
    let edge = g(1.0 - eps).abs() * eps;
    if edge > 1e-4 * result.value.abs().max(1.0) {
        return Err(Error::Quadrature {
            estimate: result.value,
            error: result.error + edge,
            panels: result.panels,
            tol: opts.abs_tol,
        });
    }
    Ok(result)
}

pub fn integrate_improper<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> Result<f64> {
    Ok(integrate_improper_with(f, a, Options::abs(tol))?.value)
}

/// Integration over `[a, ∞)`, `a > 0`, by the substitution `t = a/w²`;
/// suited to algebraically decaying integrands, which become smooth in `w`.
pub fn integrate_algebraic_tail<F: Fn(f64) -> f64>(f: F, a: f64, opts: Options) -> Result<Integral> {
    if !(a > 0.0 && a.is_finite()) {
        return invalid("the algebraic tail map needs a finite positive lower bound");
    }
    integrate_with(
        |w| {
            if w <= 0.0 {
                return 0.0;
            }
            let t = a / (w * w);
            let y = f(t) * 2.0 * a / (w * w * w);
            if y.is_finite() {
                y
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        opts,
    )
}

/// Limit of a sequence of partial sums by Wynn's epsilon algorithm.
pub fn wynn_epsilon(partial_sums: &[f64]) -> f64 {
    let n = partial_sums.len();
    if n == 0 {
        return 0.0;
    }
    if n < 3 {
        return partial_sums[n - 1];
    }
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = partial_sums.to_vec();
    let mut best = partial_sums[n - 1];
    let mut best_gap = f64::INFINITY;
    let mut col = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            let e = if diff == 0.0 { f64::INFINITY } else { prev[i + 1] + 1.0 / diff };
            next.push(e);
        }
        col += 1;
        if col % 2 == 0 && next.len() >= 2 {
            let k = next.len();
            let (a, b) = (next[k - 1], next[k - 2]);
            if a.is_finite() && b.is_finite() && (a - b).abs() < best_gap {
                best_gap = (a - b).abs();
                best = a;
            }
        }
        if next.iter().any(|v| !v.is_finite()) {
            break;
        }
        prev = cur;
        cur = next;
    }
    best
}

//! Seeded, parallel Monte Carlo runs.
//!
//! Trial `t` draws everything from `stream(master_seed, t)`. Trial values are
//! computed in parallel blocks and folded into the running moments in trial
//! order, so a report depends on the seed and never on the worker count.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{eap_energy_upper_bound, expected_kernel_energy, predicted_ensemble_energy};
use crate::construct::{build_configuration, ConfigMeta, Configuration};
use crate::energy::{log_energy, predicted_energy, sphere_kernel_energy};
use crate::ensembles::{sample, EnsembleKind, EnsembleSpec};
use crate::error::{domain, invalid, Error, Result};
use crate::geometry::SpherePoint;
use crate::rng::{stream, StreamRng};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "SO3_ENERGY_THREADS";
/// Largest tolerated fraction of excluded trials.
pub const MAX_EXCLUDED_FRACTION: f64 = 1e-3;
/// `|z|` at or below this passes.
pub const Z_PASS: f64 = 4.0;

const BLOCK: u64 = 1 << 12;

/// Worker count from [`THREADS_ENV`], if set to a positive integer.
pub fn default_workers() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// A dedicated pool with `workers` threads (or the environment default).
pub fn thread_pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers.or_else(default_workers) {
        if n == 0 {
            return invalid("worker count must be at least 1");
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))
}

/// Streaming mean and variance.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero below two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub std_dev: f64,
    pub std_error: f64,
    pub trials: u64,
    pub excluded: u64,
}

/// Runs `trials` independent trials of `f`, each on its own stream. A trial
/// returning `None` is excluded from the moments and counted.
pub fn monte_carlo<F>(trials: u64, master_seed: u64, f: F) -> Result<Summary>
where
    F: Fn(&mut StreamRng) -> Result<Option<f64>> + Sync,
{
    if trials == 0 {
        return invalid("trials must be at least 1");
    }
    let mut acc = Welford::default();
    let mut excluded = 0u64;
    let mut start = 0u64;
    while start < trials {
        let end = (start + BLOCK).min(trials);
        let values: Vec<Result<Option<f64>>> =
            (start..end).into_par_iter().map(|t| f(&mut stream(master_seed, t))).collect();
        for v in values {
            match v? {
                Some(x) => acc.push(x),
                None => excluded += 1,
            }
        }
        start = end;
    }
    if excluded as f64 > MAX_EXCLUDED_FRACTION * trials as f64 {
        return domain(format!(
            "{excluded} of {trials} trials excluded (limit {:.1}%)",
            100.0 * MAX_EXCLUDED_FRACTION
        ));
    }
    if acc.count() == 0 {
        return domain("every trial was excluded");
    }
    Ok(Summary {
        mean: acc.mean(),
        std_dev: acc.variance().sqrt(),
        std_error: acc.std_error(),
        trials,
        excluded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => invalid(format!("unknown format '{other}' (json, csv)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    pub spec: EnsembleSpec,
    pub trials: u64,
    pub master_seed: u64,
    pub format: ReportFormat,
}

impl ExperimentConfig {
    /// The master seed is taken from `spec.seed`.
    pub fn new(spec: EnsembleSpec, trials: u64) -> Result<Self> {
        if trials == 0 {
            return invalid("trials must be at least 1");
        }
        Ok(ExperimentConfig { spec, trials, master_seed: spec.seed, format: ReportFormat::Json })
    }
}

/// What the measured mean is compared with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictionKind {
    /// Exact expectation: passes when `|z| <= 4`.
    Expectation,
    /// Upper bound: passes when `z <= 4`.
    UpperBound,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub ensemble: String,
    pub r: usize,
    pub s: usize,
    pub n: usize,
    pub seed: u64,
    pub trials: u64,
    pub excluded: u64,
    pub mean: f64,
    pub std_error: f64,
    pub prediction: f64,
    pub prediction_kind: PredictionKind,
    pub z_score: f64,
    pub pass: bool,
}

impl EstimateReport {
    pub fn from_summary(
        ensemble: impl Into<String>,
        (r, s): (usize, usize),
        seed: u64,
        summary: &Summary,
        prediction: f64,
        prediction_kind: PredictionKind,
    ) -> Self {
        let z_score = z_score(summary.mean, summary.std_error, prediction);
        let pass = match prediction_kind {
            PredictionKind::Expectation => z_score.abs() <= Z_PASS,
            PredictionKind::UpperBound => z_score <= Z_PASS,
        };
        EstimateReport {
            ensemble: ensemble.into(),
            r,
            s,
            n: r * s,
            seed,
            trials: summary.trials,
            excluded: summary.excluded,
            mean: summary.mean,
            std_error: summary.std_error,
            prediction,
            prediction_kind,
            z_score,
            pass,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let kind = match self.prediction_kind {
            PredictionKind::Expectation => "expectation",
            PredictionKind::UpperBound => "upper_bound",
        };
        let mut out = String::from(
            "ensemble,r,s,n,seed,trials,excluded,mean,std_error,prediction,prediction_kind,z_score,pass\n",
        );
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{:?},{:?},{:?},{},{:?},{}",
            self.ensemble,
            self.r,
            self.s,
            self.n,
            self.seed,
            self.trials,
            self.excluded,
            self.mean,
            self.std_error,
            self.prediction,
            kind,
            self.z_score,
            self.pass
        );
        out
    }

    pub fn encode(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Csv => self.to_csv(),
        }
    }
}

/// `(mean - prediction)/se`; with `se = 0` this is 0 on exact agreement and
/// signed infinity otherwise.
pub fn z_score(mean: f64, std_error: f64, prediction: f64) -> f64 {
    let diff = mean - prediction;
    if std_error > 0.0 {
        diff / std_error
    } else if diff.abs() <= 1e-12 * prediction.abs().max(1.0) {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    }
}

/// Predicted mean energy for the spec, and whether it is exact or a bound.
pub fn ensemble_prediction(kind: EnsembleKind, r: usize, s: usize) -> Result<(f64, PredictionKind)> {
    match kind {
        EnsembleKind::Eap => Ok((eap_energy_upper_bound(r, s)?, PredictionKind::UpperBound)),
        _ => Ok((predicted_ensemble_energy(kind, r, s)?, PredictionKind::Expectation)),
    }
}

/// One configuration for `spec`, drawn from `stream(spec.seed, 0)`.
pub fn generate(spec: &EnsembleSpec) -> Result<Configuration> {
    let s = spec.fiber_count()?;
    let mut rng = stream(spec.seed, 0);
    let points = sample(spec.kind, spec.r, &mut rng)?;
    let config = build_configuration(&points, s, &mut rng)?;
    let meta = ConfigMeta::new(spec.kind.name(), spec.r, s, spec.seed);
    Ok(Configuration::new(meta, config.matrices().to_vec()))
}

/// Per trial: sample the point process, build the fibers, take the energy.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<EstimateReport> {
    let kind = cfg.spec.kind;
    if !kind.is_sampled() {
        return domain(format!("the {kind} ensemble has no sampler"));
    }
    let (r, s) = (cfg.spec.r, cfg.spec.fiber_count()?);
    let (prediction, prediction_kind) = ensemble_prediction(kind, r, s)?;
    let summary = monte_carlo(cfg.trials, cfg.master_seed, |rng| {
        let points = sample(kind, r, rng)?;
        let config = build_configuration(&points, s, rng)?;
        let e = log_energy(config.matrices());
        Ok((!e.is_infinite).then_some(e.value))
    })?;
    Ok(EstimateReport::from_summary(kind.name(), (r, s), cfg.master_seed, &summary, prediction, prediction_kind))
}

/// Fixed base points, random phases only.
pub fn run_phase_experiment(points: &[SpherePoint], s: usize, trials: u64, seed: u64) -> Result<EstimateReport> {
    let prediction = predicted_energy(points, s)?;
    let summary = monte_carlo(trials, seed, |rng| {
        let config = build_configuration(points, s, rng)?;
        let e = log_energy(config.matrices());
        Ok((!e.is_infinite).then_some(e.value))
    })?;
    Ok(EstimateReport::from_summary("fixed", (points.len(), s), seed, &summary, prediction, PredictionKind::Expectation))
}

/// Kernel energy of the point process alone, against its expectation.
pub fn run_kernel_experiment(kind: EnsembleKind, r: usize, trials: u64, seed: u64) -> Result<EstimateReport> {
    let prediction = expected_kernel_energy(kind, r)?;
    let summary = monte_carlo(trials, seed, |rng| Ok(Some(sphere_kernel_energy(&sample(kind, r, rng)?))))?;
    Ok(EstimateReport::from_summary(kind.name(), (r, 1), seed, &summary, prediction, PredictionKind::Expectation))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::FiberCount;
    use crate::geometry::uniform_sphere_point;

    #[test]
    fn welford_matches_two_pass() {
        let xs = [1e9 + 4.0, 1e9 + 7.0, 1e9 + 13.0, 1e9 + 16.0];
        let mut w = Welford::default();
        xs.iter().for_each(|&x| w.push(x));
        assert_eq!(w.mean(), 1e9 + 10.0);
        assert!((w.variance() - 30.0).abs() < 1e-6);
        assert_eq!(Welford::default().std_error(), 0.0);
    }

    #[test]
    fn zero_trials_rejected() {
        let spec = EnsembleSpec::new(EnsembleKind::Uniform, 5, FiberCount::Fixed(2), 1).unwrap();
        assert!(matches!(ExperimentConfig::new(spec, 0), Err(Error::InvalidArgument(_))));
        assert!(monte_carlo(0, 1, |_| Ok(Some(0.0))).is_err());
    }

    #[test]
    fn exclusion_policy() {
        let one_in_500 = |rng: &mut StreamRng| {
            use rand::Rng;
            let x: f64 = rng.random();
            Ok((x >= 0.002).then_some(x))
        };
        assert!(monte_carlo(20_000, 3, one_in_500).is_err());
        let s = monte_carlo(20_000, 3, |rng| {
            use rand::Rng;
            let x: f64 = rng.random();
            Ok((x >= 1e-4).then_some(x))
        })
        .unwrap();
        assert!(s.excluded > 0 && s.trials == 20_000);
    }

    #[test]
    fn reports_independent_of_workers() {
        let spec = EnsembleSpec::new(EnsembleKind::Zeros, 6, FiberCount::Auto, 99).unwrap();
        let cfg = ExperimentConfig::new(spec, 300).unwrap();
        let one = thread_pool(Some(1)).unwrap().install(|| run_experiment(&cfg)).unwrap();
        let eight = thread_pool(Some(8)).unwrap().install(|| run_experiment(&cfg)).unwrap();
        assert_eq!(one.to_json(), eight.to_json());
        assert_eq!(one.to_csv(), eight.to_csv());
    }

    #[test]
    fn uniform_matches_prediction() {
        let spec = EnsembleSpec::new(EnsembleKind::Uniform, 5, FiberCount::Fixed(2), 2024).unwrap();
        let report = run_experiment(&ExperimentConfig::new(spec, 20_000).unwrap()).unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.n, 10);
    }

    #[test]
    fn phase_experiment_single_point() {
        // one fiber: the energy is the same for every phase
        let p = [uniform_sphere_point(&mut stream(5, 0))];
        let report = run_phase_experiment(&p, 4, 50, 1).unwrap();
        assert!(report.std_error < 1e-12);
        assert!(report.z_score.abs() <= Z_PASS, "{report:?}");
    }

    #[test]
    fn csv_report_shape() {
        let summary = Summary { mean: 1.5, std_dev: 1.0, std_error: 0.25, trials: 16, excluded: 0 };
        let rep = EstimateReport::from_summary("uniform", (3, 2), 7, &summary, 1.0, PredictionKind::Expectation);
        let csv = rep.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1], "uniform,3,2,6,7,16,0,1.5,0.25,1.0,expectation,2.0,true");
        assert_eq!(z_score(1.0, 0.0, 1.0), 0.0);
        assert_eq!(z_score(2.0, 0.0, 1.0), f64::INFINITY);
    }
}

//! Spherical point processes feeding the fiber construction.

mod eap;
mod spherical;
mod zeros;

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{domain, invalid, Error, Result};
use crate::geometry::{uniform_sphere_point, SpherePoint};

pub use eap::{equal_area_partition, region_diameter, sample_equal_area, EqualAreaRegion, RegionKind};
pub use spherical::{sample_spherical_ensemble, spherical_ensemble_eigenvalues};
pub use zeros::{aberth_roots, elliptic_coefficients, sample_elliptic_zeros, RootReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnsembleKind {
    Uniform,
    Zeros,
    Eap,
    Spherical,
    /// Harmonic ensemble on S²: expectations only, no sampler.
    Harmonic,
}

impl EnsembleKind {
    pub const SAMPLED: [EnsembleKind; 4] =
        [EnsembleKind::Uniform, EnsembleKind::Zeros, EnsembleKind::Eap, EnsembleKind::Spherical];

    pub fn name(self) -> &'static str {
        match self {
            EnsembleKind::Uniform => "uniform",
            EnsembleKind::Zeros => "zeros",
            EnsembleKind::Eap => "eap",
            EnsembleKind::Spherical => "spherical",
            EnsembleKind::Harmonic => "harmonic",
        }
    }

    pub fn is_sampled(self) -> bool {
        self != EnsembleKind::Harmonic
    }
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" | "iid" => Ok(EnsembleKind::Uniform),
            "zeros" | "elliptic" => Ok(EnsembleKind::Zeros),
            "eap" | "equal-area" => Ok(EnsembleKind::Eap),
            "spherical" => Ok(EnsembleKind::Spherical),
            "harmonic" => Ok(EnsembleKind::Harmonic),
            other => domain(format!("unknown ensemble '{other}' (uniform, zeros, eap, spherical, harmonic)")),
        }
    }
}

/// Fiber count: fixed, or the ensemble's optimal rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiberCount {
    Auto,
    Fixed(usize),
}

impl FromStr for FiberCount {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(FiberCount::Auto);
        }
        match s.parse::<usize>() {
            Ok(0) | Err(_) => invalid(format!("fiber count must be a positive integer or 'auto', got '{s}'")),
            Ok(v) => Ok(FiberCount::Fixed(v)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub r: usize,
    pub s: FiberCount,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, r: usize, s: FiberCount, seed: u64) -> Result<Self> {
        if r == 0 {
            return invalid("r must be at least 1");
        }
        Ok(EnsembleSpec { kind, r, s, seed })
    }

    /// The fiber count, resolving `Auto` through the ensemble's rule.
    pub fn fiber_count(&self) -> Result<usize> {
        match self.s {
            FiberCount::Fixed(s) => Ok(s),
            FiberCount::Auto => crate::constants::optimal_s(self.kind, self.r),
        }
    }
}

/// `r` i.i.d. uniform points.
pub fn sample_uniform<R: Rng + ?Sized>(r: usize, rng: &mut R) -> Vec<SpherePoint> {
    (0..r).map(|_| uniform_sphere_point(rng)).collect()
}

/// One draw of `r` points from the given process.
pub fn sample<R: Rng + ?Sized>(kind: EnsembleKind, r: usize, rng: &mut R) -> Result<Vec<SpherePoint>> {
    if r == 0 {
        return invalid("r must be at least 1");
    }
    match kind {
        EnsembleKind::Uniform => Ok(sample_uniform(r, rng)),
        EnsembleKind::Zeros => sample_elliptic_zeros(r, rng),
        EnsembleKind::Eap => Ok(sample_equal_area(r, rng)),
        EnsembleKind::Spherical => sample_spherical_ensemble(r, rng),
        EnsembleKind::Harmonic => domain("the harmonic ensemble has no sampler; only its expectations are available"),
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::sphere_kernel_energy;
    use crate::rng::stream;

    #[test]
    fn parse_names() {
        for k in [EnsembleKind::Uniform, EnsembleKind::Zeros, EnsembleKind::Eap, EnsembleKind::Spherical, EnsembleKind::Harmonic] {
            assert_eq!(k.name().parse::<EnsembleKind>().unwrap(), k);
        }
        assert!("diamond".parse::<EnsembleKind>().is_err());
        assert_eq!("auto".parse::<FiberCount>().unwrap(), FiberCount::Auto);
        assert_eq!("3".parse::<FiberCount>().unwrap(), FiberCount::Fixed(3));
        assert!("0".parse::<FiberCount>().is_err());
        assert!(sample(EnsembleKind::Harmonic, 4, &mut stream(0, 0)).is_err());
    }

    #[test]
    fn uniform_mean_vector_is_small() {
        let mut rng = stream(2024, 0);
        let n = 1_000_000;
        let (mut sx, mut sy, mut sz) = (0.0, 0.0, 0.0);
        for p in sample_uniform(n, &mut rng) {
            assert!((p.dot(&p) - 1.0).abs() < 1e-12);
            sx += p.x();
            sy += p.y();
            sz += p.z();
        }
        let norm = (sx * sx + sy * sy + sz * sz).sqrt() / n as f64;
        // each coordinate has variance 1/3
        assert!(norm < 4.0 * (1.0 / n as f64).sqrt() * 3f64.sqrt());
    }

    #[test]
    fn uniform_kernel_energy_mean() {
        let mut rng = stream(8, 0);
        let r = 5;
        let trials = 20_000;
        let vals: Vec<f64> = (0..trials).map(|_| sphere_kernel_energy(&sample_uniform(r, &mut rng))).collect();
        let mean = vals.iter().sum::<f64>() / trials as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        let se = (var / trials as f64).sqrt();
        assert!((mean - 10.0).abs() < 4.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn samplers_are_deterministic() {
        for kind in EnsembleKind::SAMPLED {
            let a = sample(kind, 7, &mut stream(5, 9)).unwrap();
            let b = sample(kind, 7, &mut stream(5, 9)).unwrap();
            let c = sample(kind, 7, &mut stream(5, 10)).unwrap();
            assert_eq!(a, b, "{kind}");
            assert_ne!(a, c, "{kind}");
            assert_eq!(a.len(), 7);
        }
    }
}

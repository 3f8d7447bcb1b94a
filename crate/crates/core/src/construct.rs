//! Fibers of equally spaced rotations and the configurations built from them.
//!
//! Fiber `i` over base point `p_i` holds `H_{p_i} R(2π(j+1)/s + φ_i)` for
//! `j = 0..s`, so slot `j` carries the root of unity `e^{2πi(j+1)/s}`.
//! Configurations store fibers one after another: flat index `k = i s + j`.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{base_frame, rotation_about_z, Rotation3, SpherePoint};
use crate::rng::stream;

/// On-disk format version.
pub const FORMAT_VERSION: u32 = 1;

const PARALLEL_FIBERS: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct Fiber {
    pub base: SpherePoint,
    pub s: usize,
    pub phase: f64,
    pub matrices: Vec<Rotation3>,
}

pub fn build_fiber(p: &SpherePoint, s: usize, phase: f64) -> Result<Fiber> {
    if s == 0 {
        return invalid("a fiber needs at least one rotation (s >= 1)");
    }
    if !phase.is_finite() {
        return invalid(format!("phase must be finite, got {phase}"));
    }
    let h = base_frame(p);
    let step = std::f64::consts::TAU / s as f64;
    let matrices = (0..s).map(|j| h * rotation_about_z(step * (j + 1) as f64 + phase)).collect();
    Ok(Fiber { base: *p, s, phase, matrices })
}

/// `Σ_{i≠j} log ‖O_i - O_j‖_F` over one fiber: `s(s-1)/2 · log 2 + s log s`.
pub fn fiber_energy_closed_form(s: usize) -> f64 {
    let s = s as f64;
    s * (s - 1.0) / 2.0 * std::f64::consts::LN_2 + if s > 0.0 { s * s.ln() } else { 0.0 }
}

/// Flat position of slot `j` in fiber `i`.
pub fn flat_index(fiber: usize, slot: usize, s: usize) -> usize {
    fiber * s + slot
}

/// Inverse of [`flat_index`].
pub fn fiber_slot(k: usize, s: usize) -> (usize, usize) {
    (k / s, k % s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigMeta {
    pub ensemble: String,
    pub r: usize,
    pub s: usize,
    pub seed: u64,
    pub version: u32,
}

impl ConfigMeta {
    pub fn new(ensemble: impl Into<String>, r: usize, s: usize, seed: u64) -> Self {
        ConfigMeta { ensemble: ensemble.into(), r, s, seed, version: FORMAT_VERSION }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub meta: ConfigMeta,
    matrices: Vec<Rotation3>,
}

#[derive(Serialize, Deserialize)]
struct ConfigFile {
    meta: ConfigMeta,
    matrices: Vec<[f64; 9]>,
}

/// Output format for configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => invalid(format!("unknown format '{other}' (json or csv)")),
        }
    }
}

const CSV_HEADER: &str = "m00,m01,m02,m10,m11,m12,m20,m21,m22";

impl Configuration {
    pub fn new(meta: ConfigMeta, matrices: Vec<Rotation3>) -> Self {
        Configuration { meta, matrices }
    }

    pub fn matrices(&self) -> &[Rotation3] {
        &self.matrices
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn to_json(&self) -> String {
        let file = ConfigFile {
            meta: self.meta.clone(),
            matrices: self.matrices.iter().map(Rotation3::to_row_major).collect(),
        };
        serde_json::to_string(&file).expect("configuration serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ConfigFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let matrices = file
            .matrices
            .iter()
            .map(Rotation3::from_row_major)
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Format(e.to_string()))?;
        Ok(Configuration { meta: file.meta, matrices })
    }

    /// Header plus one row-major matrix per line; metadata is not stored.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 + self.matrices.len() * 200);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for m in &self.matrices {
            for (k, v) in m.to_row_major().iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write!(out, "{v:?}").expect("writing to a String");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == CSV_HEADER => {}
            _ => return Err(Error::Format(format!("expected CSV header '{CSV_HEADER}'"))),
        }
        let mut matrices = Vec::new();
        for (row, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let values: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Format(format!("row {}: {e}", row + 1)))?;
            let arr: [f64; 9] = values
                .try_into()
                .map_err(|_| Error::Format(format!("row {}: expected 9 columns", row + 1)))?;
            matrices.push(Rotation3::from_row_major(&arr).map_err(|e| Error::Format(format!("row {}: {e}", row + 1)))?);
        }
        let n = matrices.len();
        Ok(Configuration { meta: ConfigMeta::new("unknown", n, 1, 0), matrices })
    }

    pub fn encode(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    /// Parses either format, recognising JSON by its opening brace.
    pub fn decode(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::from_csv(text)
        }
    }

    pub fn write(&self, path: &Path, format: Format) -> Result<()> {
        std::fs::write(path, self.encode(format))?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::decode(&std::fs::read_to_string(path)?)
    }
}

/// Fiber phases: one key drawn from `rng`, then one uniform draw per fiber
/// from the stream `(key, fiber index)`.
pub fn fiber_phases<R: Rng + ?Sized>(r: usize, rng: &mut R) -> Vec<f64> {
    let key: u64 = rng.random();
    let draw = |i: usize| stream(key, i as u64).random::<f64>() * std::f64::consts::TAU;
    if r >= PARALLEL_FIBERS {
        (0..r).into_par_iter().map(draw).collect()
    } else {
        (0..r).map(draw).collect()
    }
}

/// Places a fiber of `s` rotations with an independent uniform phase over
/// every point.
pub fn build_configuration<R: Rng + ?Sized>(points: &[SpherePoint], s: usize, rng: &mut R) -> Result<Configuration> {
    let phases = fiber_phases(points.len(), rng);
    build_configuration_with_phases(points, s, &phases)
}

pub fn build_configuration_with_phases(points: &[SpherePoint], s: usize, phases: &[f64]) -> Result<Configuration> {
    if points.is_empty() {
        return invalid("a configuration needs at least one base point");
    }
    if s == 0 {
        return invalid("a fiber needs at least one rotation (s >= 1)");
    }
    if phases.len() != points.len() {
        return invalid(format!("{} phases for {} points", phases.len(), points.len()));
    }
    let mut matrices = Vec::with_capacity(points.len() * s);
    for (p, &phase) in points.iter().zip(phases) {
        matrices.extend(build_fiber(p, s, phase)?.matrices);
    }
    Ok(Configuration::new(ConfigMeta::new("custom", points.len(), s, 0), matrices))
}

//! Hyperplane rounding: binning continuous phases into k equally spaced sectors.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{check_k, cut_weight_raw, PartitionAssignment, SpinConfiguration, WeightedGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryMode {
    Uniform,
    Random,
}

impl std::str::FromStr for BoundaryMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(BoundaryMode::Uniform),
            "random" => Ok(BoundaryMode::Random),
            other => Err(Error::InvalidArgument(format!("unknown boundary mode {other:?}"))),
        }
    }
}

/// Rotations of the binning pattern. The pattern has period `2 pi / k`, so
/// every angle lies in `[0, 2 pi / k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundarySet {
    k: usize,
    mode: BoundaryMode,
    angles: Vec<f64>,
}

impl BoundarySet {
    /// `phi_m = m (2 pi / k) / count` for `m = 0..count`.
    pub fn uniform(k: usize, count: usize) -> Result<Self> {
        check_k(k)?;
        check_count(count)?;
        let period = 2.0 * PI / k as f64;
        let angles = (0..count).map(|m| m as f64 * period / count as f64).collect();
        Ok(BoundarySet {
            k,
            mode: BoundaryMode::Uniform,
            angles,
        })
    }

    /// `count` i.i.d. rotations, uniform on `[0, 2 pi / k)`. The first `m`
    /// angles do not depend on `count`, so sets with one seed are nested.
    pub fn random(k: usize, count: usize, seed: u64) -> Result<Self> {
        check_k(k)?;
        check_count(count)?;
        let period = 2.0 * PI / k as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let angles = (0..count).map(|_| rng.gen::<f64>() * period).collect();
        Ok(BoundarySet {
            k,
            mode: BoundaryMode::Random,
            angles,
        })
    }

    pub fn new(k: usize, mode: BoundaryMode, count: usize, seed: u64) -> Result<Self> {
        match mode {
            BoundaryMode::Uniform => Self::uniform(k, count),
            BoundaryMode::Random => Self::random(k, count, seed),
        }
    }

    /// Explicit angles. May be empty; [`best_cut`] rejects that.
    pub fn from_angles(k: usize, angles: Vec<f64>) -> Result<Self> {
        check_k(k)?;
        Ok(BoundarySet {
            k,
            mode: BoundaryMode::Random,
            angles,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mode(&self) -> BoundaryMode {
        self.mode
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// The first `count` boundaries.
    pub fn prefix(&self, count: usize) -> Self {
        BoundarySet {
            k: self.k,
            mode: self.mode,
            angles: self.angles[..count.min(self.angles.len())].to_vec(),
        }
    }
}

fn check_count(count: usize) -> Result<()> {
    if count == 0 {
        Err(Error::InvalidArgument("boundary count must be >= 1".into()))
    } else {
        Ok(())
    }
}

#[inline]
fn bin_phase(theta: f64, k: usize, boundary: f64) -> u8 {
    let width = 2.0 * PI / k as f64;
    let x = (theta - boundary + width / 2.0).rem_euclid(2.0 * PI);
    let s = x / width;
    let m = s.floor();
    let mut idx = m as usize;
    if s == m {
        // Exactly on a boundary: between sectors m - 1 and m, take the lower index.
        idx = (idx % k).min((idx + k - 1) % k);
    }
    (idx % k) as u8
}

/// Assigns each spin to the nearest of the `k` sector centers
/// `boundary + 2 pi n / k`.
pub fn bin_spins(spins: &SpinConfiguration, k: usize, boundary: f64) -> Result<PartitionAssignment> {
    check_k(k)?;
    let labels = spins
        .phases()
        .iter()
        .map(|&t| bin_phase(t, k, boundary))
        .collect();
    Ok(PartitionAssignment::from_raw(k, labels))
}

/// Best rounding over a boundary set, with the weight trace of every boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutResult {
    pub best_weight: f64,
    pub best_assignment: PartitionAssignment,
    pub best_boundary: f64,
    pub per_boundary_weights: Vec<f64>,
}

/// Heaviest binning over the boundary set. Ties keep the first boundary,
/// except that a rounding using two or more labels replaces a single-label one.
pub fn best_cut(
    graph: &WeightedGraph,
    spins: &SpinConfiguration,
    boundaries: &BoundarySet,
) -> Result<CutResult> {
    if graph.n() != spins.len() {
        return Err(Error::DimensionMismatch {
            expected: graph.n(),
            got: spins.len(),
        });
    }
    if boundaries.is_empty() {
        return Err(Error::InvalidArgument("empty boundary set".into()));
    }
    let k = boundaries.k();
    let mut labels = vec![0u8; spins.len()];
    let mut trace = Vec::with_capacity(boundaries.len());
    let mut best: Option<(f64, f64, Vec<u8>)> = None;
    for &phi in boundaries.angles() {
        for (l, &t) in labels.iter_mut().zip(spins.phases()) {
            *l = bin_phase(t, k, phi);
        }
        let w = cut_weight_raw(graph, &labels);
        trace.push(w);
        let split = labels.iter().any(|&l| l != labels[0]);
        let better = |b: &(f64, f64, Vec<u8>)| w > b.0 || (w == b.0 && split && b.2.iter().all(|&l| l == b.2[0]));
        if best.as_ref().map_or(true, better) {
            best = Some((w, phi, labels.clone()));
        }
    }
    let (best_weight, best_boundary, labels) = best.expect("nonempty boundary set");
    Ok(CutResult {
        best_weight,
        best_assignment: PartitionAssignment::from_raw(k, labels),
        best_boundary,
        per_boundary_weights: trace,
    })
}

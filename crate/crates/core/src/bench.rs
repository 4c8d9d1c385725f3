//! Benchmark harness: random dense instances, annealed and rounded, scored
//! against brute-force extremes.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annealer::{anneal, AnnealSchedule};
use crate::error::{Error, Result};
use crate::graph::{check_k, couplings_from_weights, random_dense_graph, xy_energy};
use crate::oracle::{
    brute_force_cut_with_limit, energy_gap, enumeration_size, normalized_error,
    DEFAULT_ENUMERATION_LIMIT,
};
use crate::rounding::{best_cut, BoundaryMode, BoundarySet};

/// Width of the S_W histogram bins.
pub const HISTOGRAM_BIN_WIDTH: f64 = 0.01;
pub const DEFAULT_GAP_BINS: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchmarkConfig {
    pub sizes: Vec<usize>,
    /// Graphs per size; a single entry applies to every size.
    pub graphs_per_size: Vec<usize>,
    pub k_values: Vec<usize>,
    pub boundary_counts: Vec<usize>,
    pub boundary_mode: BoundaryMode,
    pub schedule: AnnealSchedule,
    pub base_seed: u64,
    pub enumeration_limit: u128,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            sizes: vec![6, 12, 18],
            graphs_per_size: vec![500, 200, 100],
            k_values: vec![3],
            boundary_counts: vec![100],
            boundary_mode: BoundaryMode::Uniform,
            schedule: AnnealSchedule::default(),
            base_seed: 0,
            enumeration_limit: DEFAULT_ENUMERATION_LIMIT,
        }
    }
}

impl BenchmarkConfig {
    pub fn graphs_for(&self, size_index: usize) -> usize {
        match self.graphs_per_size.as_slice() {
            [one] => *one,
            many => many.get(size_index).copied().unwrap_or(0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.sizes.is_empty() || self.sizes.iter().any(|&n| n < 2) {
            return bad(format!("sizes must be >= 2: {:?}", self.sizes));
        }
        if self.graphs_per_size.is_empty() || self.graphs_per_size.iter().any(|&g| g == 0) {
            return bad("graphs_per_size must be positive".into());
        }
        if self.graphs_per_size.len() != 1 && self.graphs_per_size.len() != self.sizes.len() {
            return bad("graphs_per_size needs one entry or one per size".into());
        }
        if self.k_values.is_empty() {
            return bad("k_values is empty".into());
        }
        for &k in &self.k_values {
            check_k(k)?;
        }
        if self.boundary_counts.is_empty() || self.boundary_counts.iter().any(|&m| m == 0) {
            return bad("boundary_counts must be positive".into());
        }
        self.schedule.validate()
    }

    /// `(n, k)` pairs whose enumeration exceeds the limit.
    pub fn infeasible(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &n in &self.sizes {
            for &k in &self.k_values {
                if enumeration_size(n, k) > self.enumeration_limit {
                    out.push((n, k));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub w_sl: f64,
    pub w_bf_max: f64,
    pub w_bf_min: f64,
    pub s_w: f64,
    /// `min(H_XY) - min(H_T)` in units of `n * sigma`; only for k = 3.
    pub gap: Option<f64>,
    pub xy_energy: f64,
    pub converged: bool,
    /// Best rounding used a single label.
    pub trivial: bool,
    pub boundaries: usize,
}

impl GraphRecord {
    /// S_W recomputed from the stored weights.
    pub fn recomputed_error(&self) -> f64 {
        (self.w_bf_max - self.w_sl) / (self.w_bf_max - self.w_bf_min)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub bin_left: f64,
    pub bin_right: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub n: usize,
    pub k: usize,
    pub boundaries: usize,
    pub graphs: usize,
    pub converged: usize,
    pub excluded_fraction: f64,
    pub trivial: usize,
    pub mean_s_w: f64,
    pub std_s_w: f64,
    pub histogram: Vec<HistogramBin>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSummary {
    pub groups: Vec<GroupSummary>,
    /// `(n, k)` combinations skipped because brute force was infeasible.
    pub skipped: Vec<(usize, usize)>,
}

impl BenchmarkSummary {
    pub fn group(&self, n: usize, k: usize, boundaries: usize) -> Option<&GroupSummary> {
        self.groups
            .iter()
            .find(|g| g.n == n && g.k == k && g.boundaries == boundaries)
    }
}

/// Deterministic per-graph seed.
pub fn graph_seed(base: u64, n: usize, index: usize) -> u64 {
    splitmix(base ^ splitmix((n as u64) << 32 | index as u64))
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// All records for one graph: one per (k, boundary count).
fn run_graph(cfg: &BenchmarkConfig, n: usize, index: usize, ks: &[usize]) -> Result<Vec<GraphRecord>> {
    let seed = graph_seed(cfg.base_seed, n, index);
    let graph = random_dense_graph(n, seed)?;
    let couplings = couplings_from_weights(&graph);
    let mut schedule = cfg.schedule.clone();
    schedule.seed = splitmix(seed ^ 0xA5A5);
    let outcome = anneal(&couplings, &schedule)?;
    let xy = xy_energy(&couplings, &outcome.spins)?;
    let max_count = *cfg.boundary_counts.iter().max().expect("validated");

    let mut records = Vec::new();
    for &k in ks {
        let oracle = brute_force_cut_with_limit(&graph, k, cfg.enumeration_limit)?;
        let gap = if k == 3 {
            energy_gap(&graph, xy, &oracle).ok()
        } else {
            None
        };
        let full = BoundarySet::new(k, cfg.boundary_mode, max_count, splitmix(seed ^ k as u64))?;
        for &m in &cfg.boundary_counts {
            let set = match cfg.boundary_mode {
                BoundaryMode::Uniform => BoundarySet::uniform(k, m)?,
                BoundaryMode::Random => full.prefix(m),
            };
            let cut = best_cut(&graph, &outcome.spins, &set)?;
            let s_w = normalized_error(cut.best_weight, &oracle)?;
            records.push(GraphRecord {
                seed,
                n,
                k,
                w_sl: cut.best_weight,
                w_bf_max: oracle.max_weight,
                w_bf_min: oracle.min_weight,
                s_w,
                gap,
                xy_energy: xy,
                converged: outcome.converged,
                trivial: cut.best_assignment.distinct_labels() < 2,
                boundaries: m,
            });
        }
    }
    Ok(records)
}

/// Runs every feasible `(n, k)`; infeasible pairs are listed in the summary.
pub fn run_benchmark(cfg: &BenchmarkConfig) -> Result<(Vec<GraphRecord>, BenchmarkSummary)> {
    cfg.validate()?;
    let skipped = cfg.infeasible();
    let mut jobs = Vec::new();
    for (si, &n) in cfg.sizes.iter().enumerate() {
        let ks: Vec<usize> = cfg
            .k_values
            .iter()
            .copied()
            .filter(|k| !skipped.contains(&(n, *k)))
            .collect();
        if ks.is_empty() {
            continue;
        }
        for index in 0..cfg.graphs_for(si) {
            jobs.push((n, index, ks.clone()));
        }
    }
    let per_graph: Vec<Vec<GraphRecord>> = jobs
        .par_iter()
        .map(|(n, index, ks)| run_graph(cfg, *n, *index, ks))
        .collect::<Result<_>>()?;
    let records: Vec<GraphRecord> = per_graph.into_iter().flatten().collect();
    let summary = summarize(&records, skipped);
    Ok((records, summary))
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
    } else {
        0.0
    };
    (mean, std)
}

/// Equal-width S_W histogram starting at zero.
pub fn error_histogram(values: &[f64]) -> Vec<HistogramBin> {
    let top = values.iter().cloned().fold(0.0, f64::max);
    let bins = ((top / HISTOGRAM_BIN_WIDTH).floor() as usize + 1).max(1);
    let mut counts = vec![0usize; bins];
    for &v in values {
        let i = ((v.max(0.0) / HISTOGRAM_BIN_WIDTH).floor() as usize).min(bins - 1);
        counts[i] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramBin {
            bin_left: i as f64 * HISTOGRAM_BIN_WIDTH,
            bin_right: (i + 1) as f64 * HISTOGRAM_BIN_WIDTH,
            count,
        })
        .collect()
}

/// Per `(n, k, boundaries)` statistics over converged records.
pub fn summarize(records: &[GraphRecord], skipped: Vec<(usize, usize)>) -> BenchmarkSummary {
    let mut keys: Vec<(usize, usize, usize)> = records.iter().map(|r| (r.n, r.k, r.boundaries)).collect();
    keys.sort_unstable();
    keys.dedup();
    let groups = keys
        .into_iter()
        .map(|(n, k, m)| {
            let group: Vec<&GraphRecord> = records
                .iter()
                .filter(|r| r.n == n && r.k == k && r.boundaries == m)
                .collect();
            let used: Vec<f64> = group.iter().filter(|r| r.converged).map(|r| r.s_w).collect();
            let (mean, std) = mean_std(&used);
            GroupSummary {
                n,
                k,
                boundaries: m,
                graphs: group.len(),
                converged: used.len(),
                excluded_fraction: 1.0 - used.len() as f64 / group.len() as f64,
                trivial: group.iter().filter(|r| r.trivial).count(),
                mean_s_w: mean,
                std_s_w: std,
                histogram: error_histogram(&used),
            }
        })
        .collect();
    BenchmarkSummary { groups, skipped }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapBin {
    pub gap_left: f64,
    pub gap_right: f64,
    pub count: usize,
    pub mean_s_w: f64,
    pub std_s_w: f64,
}

/// Mean S_W against the XY/ternary ground-state gap, in equal-width bins.
/// Uses converged records that carry a gap.
pub fn gap_study(records: &[GraphRecord], bins: usize) -> Result<Vec<GapBin>> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.converged)
        .filter_map(|r| r.gap.map(|g| (g, r.s_w)))
        .collect();
    if pts.is_empty() {
        return Err(Error::InvalidArgument("no records with an energy gap".into()));
    }
    let lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if hi == lo {
        let vals: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let (mean, std) = mean_std(&vals);
        return Ok(vec![GapBin {
            gap_left: lo,
            gap_right: hi,
            count: vals.len(),
            mean_s_w: mean,
            std_s_w: std,
        }]);
    }
    let bins = bins.max(1);
    let width = (hi - lo) / bins as f64;
    let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); bins];
    for (g, s) in pts {
        let i = (((g - lo) / width).floor() as usize).min(bins - 1);
        buckets[i].push(s);
    }
    Ok(buckets
        .into_iter()
        .enumerate()
        .map(|(i, vals)| {
            let (mean, std) = mean_std(&vals);
            GapBin {
                gap_left: lo + i as f64 * width,
                gap_right: lo + (i + 1) as f64 * width,
                count: vals.len(),
                mean_s_w: mean,
                std_s_w: std,
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KcutRow {
    pub n: usize,
    pub k: usize,
    pub boundaries: usize,
    pub graphs: usize,
    pub mean_s_w: f64,
    pub std_s_w: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub n: usize,
    pub k: usize,
    pub w_sl: f64,
    pub w_bf: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KcutComparison {
    /// Mean S_W per `(n, k, boundaries)`.
    pub table: Vec<KcutRow>,
    /// `(W_SL, W_BF)` pairs at the largest boundary count.
    pub scatter: Vec<ScatterPoint>,
    pub records: Vec<GraphRecord>,
    pub skipped: Vec<(usize, usize)>,
}

impl KcutComparison {
    pub fn mean(&self, n: usize, k: usize, boundaries: usize) -> Option<f64> {
        self.table
            .iter()
            .find(|r| r.n == n && r.k == k && r.boundaries == boundaries)
            .map(|r| r.mean_s_w)
    }

    /// Mean S_W against boundary count for one `(n, k)`, ascending in count.
    pub fn boundary_curve(&self, n: usize, k: usize) -> Vec<(usize, f64)> {
        let mut pts: Vec<(usize, f64)> = self
            .table
            .iter()
            .filter(|r| r.n == n && r.k == k)
            .map(|r| (r.boundaries, r.mean_s_w))
            .collect();
        pts.sort_by_key(|p| p.0);
        pts
    }
}

/// Max-2/3/4-cut comparison. Boundaries default to nested random prefixes so
/// the error curve over boundary count is monotone per graph.
pub fn kcut_comparison(cfg: &BenchmarkConfig) -> Result<KcutComparison> {
    let (records, summary) = run_benchmark(cfg)?;
    let max_count = *cfg.boundary_counts.iter().max().expect("validated");
    let table = summary
        .groups
        .iter()
        .map(|g| KcutRow {
            n: g.n,
            k: g.k,
            boundaries: g.boundaries,
            graphs: g.converged,
            mean_s_w: g.mean_s_w,
            std_s_w: g.std_s_w,
        })
        .collect();
    let scatter = records
        .iter()
        .filter(|r| r.converged && r.boundaries == max_count)
        .map(|r| ScatterPoint {
            n: r.n,
            k: r.k,
            w_sl: r.w_sl,
            w_bf: r.w_bf_max,
        })
        .collect();
    Ok(KcutComparison {
        table,
        scatter,
        records,
        skipped: summary.skipped,
    })
}

pub fn write_records_jsonl(records: &[GraphRecord], path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_records_jsonl(path: &Path) -> Result<Vec<GraphRecord>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}

pub fn write_histogram_csv(bins: &[HistogramBin], path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "bin_left,bin_right,count")?;
    for b in bins {
        writeln!(out, "{},{},{}", b.bin_left, b.bin_right, b.count)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_gap_curve_csv(bins: &[GapBin], path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "gap_left,gap_right,count,mean_s_w,std_s_w")?;
    for b in bins {
        writeln!(
            out,
            "{},{},{},{},{}",
            b.gap_left, b.gap_right, b.count, b.mean_s_w, b.std_s_w
        )?;
    }
    out.flush()?;
    Ok(())
}

//! Exact max-k-cut / min-k-cut by exhaustive enumeration, plus the error
//! metrics that compare a heuristic cut against the exact extremes.
//!
//! Vertex 0 is pinned to label 0 (label permutations leave cut weights
//! unchanged). The remaining vertices split into an *outer* block walked in
//! reflected k-ary Gray order, one label change per step, and a small *inner*
//! block whose `k^t` label combinations are scored from per-label sums. Only
//! cuts using at least two labels are considered.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    check_k, couplings_from_weights, cut_weight_raw, ternary_energy, PartitionAssignment,
    WeightedGraph,
};

/// Default cap on enumerated states, `k^(n-1)`.
pub const DEFAULT_ENUMERATION_LIMIT: u128 = 1_000_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub k: usize,
    pub max_weight: f64,
    pub min_weight: f64,
    pub argmax: PartitionAssignment,
    pub argmin: PartitionAssignment,
}

pub fn brute_force_cut(graph: &WeightedGraph, k: usize) -> Result<OracleResult> {
    brute_force_cut_with_limit(graph, k, DEFAULT_ENUMERATION_LIMIT)
}

/// Number of states the oracle visits for `n` vertices.
pub fn enumeration_size(n: usize, k: usize) -> u128 {
    (k as u128).saturating_pow(n.saturating_sub(1) as u32)
}

pub fn brute_force_cut_with_limit(
    graph: &WeightedGraph,
    k: usize,
    limit: u128,
) -> Result<OracleResult> {
    check_k(k)?;
    let n = graph.n();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "brute-force cut needs n >= 2, got {n}"
        )));
    }
    let states = enumeration_size(n, k);
    if states > limit {
        return Err(Error::TooLarge { states, limit });
    }

    let free = n - 1;
    let inner_len = free.min(match k {
        2 => 5,
        3 => 3,
        _ => 2,
    });
    let outer_len = free - inner_len;
    // Prefix vertices fixed per chunk; chunk order is fixed, so the result does
    // not depend on how many workers run.
    let prefix_len = outer_len.min(3);
    let chunks = k.pow(prefix_len as u32);

    let ctx = Enumeration::new(graph, k, outer_len, inner_len);
    let partials: Vec<Extremes> = (0..chunks)
        .into_par_iter()
        .map(|c| ctx.run_chunk(c, prefix_len))
        .collect();

    let mut best = partials[0].clone();
    for p in &partials[1..] {
        best.merge(p);
    }

    let max_weight = cut_weight_raw(graph, &best.argmax);
    let min_weight = cut_weight_raw(graph, &best.argmin);
    Ok(OracleResult {
        k,
        max_weight,
        min_weight,
        argmax: PartitionAssignment::from_raw(k, best.argmax),
        argmin: PartitionAssignment::from_raw(k, best.argmin),
    })
}

#[derive(Clone, Debug)]
struct Extremes {
    max: f64,
    argmax: Vec<u8>,
    min: f64,
    argmin: Vec<u8>,
}

impl Extremes {
    fn merge(&mut self, other: &Extremes) {
        if other.max > self.max {
            self.max = other.max;
            self.argmax.clone_from(&other.argmax);
        }
        if other.min < self.min {
            self.min = other.min;
            self.argmin.clone_from(&other.argmin);
        }
    }
}

struct Enumeration<'a> {
    graph: &'a WeightedGraph,
    k: usize,
    n: usize,
    outer_len: usize,
    inner_len: usize,
    /// Inner label combinations, `combos[c * inner_len + u]`; combo 0 is all zeros.
    combos: Vec<u8>,
    /// Cut weight among inner vertices for each combination.
    inner_cut: Vec<f64>,
}

impl<'a> Enumeration<'a> {
    fn new(graph: &'a WeightedGraph, k: usize, outer_len: usize, inner_len: usize) -> Self {
        let n = graph.n();
        let inner_start = 1 + outer_len;
        let count = k.pow(inner_len as u32);
        let mut combos = Vec::with_capacity(count * inner_len);
        let mut inner_cut = Vec::with_capacity(count);
        for c in 0..count {
            let mut rest = c;
            let start = combos.len();
            for _ in 0..inner_len {
                combos.push((rest % k) as u8);
                rest /= k;
            }
            let labels = &combos[start..];
            let mut w = 0.0;
            for a in 0..inner_len {
                for b in (a + 1)..inner_len {
                    if labels[a] != labels[b] {
                        w += graph.weight(inner_start + a, inner_start + b);
                    }
                }
            }
            inner_cut.push(w);
        }
        Enumeration {
            graph,
            k,
            n,
            outer_len,
            inner_len,
            combos,
            inner_cut,
        }
    }

    fn run_chunk(&self, chunk: usize, prefix_len: usize) -> Extremes {
        let (k, n) = (self.k, self.n);
        let inner_start = 1 + self.outer_len;
        let mut labels = vec![0u8; n];
        let mut rest = chunk;
        for v in 1..=prefix_len {
            labels[v] = (rest % k) as u8;
            rest /= k;
        }

        // sums[c * n + u]: weight from u to assigned (pinned + outer) vertices labelled c.
        let mut sums = vec![0.0; k * n];
        let mut outer_cut = 0.0;
        for v in 0..inner_start {
            let c = labels[v] as usize;
            let row = self.graph.row(v);
            for (s, w) in sums[c * n..(c + 1) * n].iter_mut().zip(row) {
                *s += w;
            }
            for u in 0..v {
                if labels[u] != labels[v] {
                    outer_cut += row[u];
                }
            }
        }
        // Constant part of the inner-to-assigned cut: total weight from each inner vertex.
        let inner_total: f64 = (inner_start..n)
            .map(|u| (0..k).map(|c| sums[c * n + u]).sum::<f64>())
            .sum();
        let mut nonzero_outer = labels[1..inner_start].iter().filter(|l| **l != 0).count();

        let mut ext = Extremes {
            max: f64::NEG_INFINITY,
            argmax: labels.clone(),
            min: f64::INFINITY,
            argmin: labels.clone(),
        };

        let gray_start = 1 + prefix_len;
        let digits = inner_start - gray_start;
        let mut dir = vec![1i8; digits];
        let mut inner_sums = vec![0.0; self.inner_len * k];

        loop {
            // Score every inner combination against the current outer labels.
            for u in 0..self.inner_len {
                for c in 0..k {
                    inner_sums[u * k + c] = sums[c * n + inner_start + u];
                }
            }
            let base = outer_cut + inner_total;
            let skip_zero = nonzero_outer == 0;
            let (mut best_hi, mut arg_hi) = (f64::NEG_INFINITY, usize::MAX);
            let (mut best_lo, mut arg_lo) = (f64::INFINITY, usize::MAX);
            for (ci, combo) in self.combos.chunks_exact(self.inner_len).enumerate() {
                if skip_zero && ci == 0 {
                    continue;
                }
                let mut w = base + self.inner_cut[ci];
                for (u, &l) in combo.iter().enumerate() {
                    w -= inner_sums[u * k + l as usize];
                }
                if w > best_hi {
                    best_hi = w;
                    arg_hi = ci;
                }
                if w < best_lo {
                    best_lo = w;
                    arg_lo = ci;
                }
            }
            if arg_hi != usize::MAX && best_hi > ext.max {
                ext.max = best_hi;
                self.write_labels(&mut ext.argmax, &labels, arg_hi);
            }
            if arg_lo != usize::MAX && best_lo < ext.min {
                ext.min = best_lo;
                self.write_labels(&mut ext.argmin, &labels, arg_lo);
            }

            // Advance the reflected Gray code by one digit.
            let mut j = 0;
            let changed = loop {
                if j == digits {
                    break None;
                }
                let cur = labels[gray_start + j] as i8;
                let next = cur + dir[j];
                if (0..k as i8).contains(&next) {
                    break Some((gray_start + j, cur as usize, next as usize));
                }
                dir[j] = -dir[j];
                j += 1;
            };
            let Some((v, from, to)) = changed else { break };
            labels[v] = to as u8;
            if from == 0 {
                nonzero_outer += 1;
            } else if to == 0 {
                nonzero_outer -= 1;
            }
            outer_cut += sums[from * n + v] - sums[to * n + v];
            let row = self.graph.row(v);
            let (lo, hi) = (from.min(to), from.max(to));
            let (left, right) = sums.split_at_mut(hi * n);
            let lo_row = &mut left[lo * n..(lo + 1) * n];
            let hi_row = &mut right[..n];
            let (from_row, to_row) = if from < to { (lo_row, hi_row) } else { (hi_row, lo_row) };
            for ((f, t), w) in from_row.iter_mut().zip(to_row.iter_mut()).zip(row) {
                *f -= w;
                *t += w;
            }
        }
        ext
    }

    fn write_labels(&self, out: &mut [u8], outer: &[u8], combo: usize) {
        let inner_start = 1 + self.outer_len;
        out[..inner_start].copy_from_slice(&outer[..inner_start]);
        out[inner_start..]
            .copy_from_slice(&self.combos[combo * self.inner_len..(combo + 1) * self.inner_len]);
    }
}

/// Default node budget for [`exact_max_cut`].
pub const DEFAULT_NODE_LIMIT: u64 = 2_000_000_000;

/// Exact max-k-cut by depth-first branch and bound, for instances too large
/// to enumerate but with enough structure to prune well. Single-label cuts
/// are excluded, as in [`brute_force_cut`]. Fails with [`Error::TooLarge`]
/// once `node_limit` search nodes have been expanded.
pub fn exact_max_cut(
    graph: &WeightedGraph,
    k: usize,
    node_limit: u64,
) -> Result<(f64, PartitionAssignment)> {
    check_k(k)?;
    let n = graph.n();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "exact cut needs n >= 2, got {n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let strength: Vec<f64> = (0..n).map(|i| graph.row(i).iter().map(|w| w.abs()).sum()).collect();
    order.sort_by(|&a, &b| strength[b].total_cmp(&strength[a]).then(a.cmp(&b)));
    let w: Vec<f64> = order
        .iter()
        .flat_map(|&a| order.iter().map(move |&b| graph.weight(a, b)))
        .collect();
    // positive weight among positions d..n
    let mut pos_suffix = vec![0.0; n + 1];
    for d in (0..n).rev() {
        let row: f64 = (d + 1..n).map(|b| w[d * n + b].max(0.0)).sum();
        pos_suffix[d] = pos_suffix[d + 1] + row;
    }
    let mut search = Bnb {
        n,
        k,
        w,
        pos_suffix,
        same: vec![0.0; n * k],
        tot: vec![0.0; n],
        labels: vec![0u8; n],
        best: f64::NEG_INFINITY,
        best_labels: None,
        nodes: 0,
        node_limit,
    };
    search.dfs(0, 0.0, 0)?;
    let pos_labels = search.best_labels.expect("n >= 2 admits a two-label cut");
    let mut labels = vec![0u8; n];
    for (p, &v) in order.iter().enumerate() {
        labels[v] = pos_labels[p];
    }
    Ok((cut_weight_raw(graph, &labels), PartitionAssignment::from_raw(k, labels)))
}

struct Bnb {
    n: usize,
    k: usize,
    w: Vec<f64>,
    pos_suffix: Vec<f64>,
    same: Vec<f64>,
    tot: Vec<f64>,
    labels: Vec<u8>,
    best: f64,
    best_labels: Option<Vec<u8>>,
    nodes: u64,
    node_limit: u64,
}

impl Bnb {
    fn gain(&self, v: usize, l: usize) -> f64 {
        self.tot[v] - self.same[v * self.k + l]
    }

    fn dfs(&mut self, d: usize, cut: f64, used: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return Err(Error::TooLarge {
                states: self.nodes as u128,
                limit: self.node_limit as u128,
            });
        }
        let (n, k) = (self.n, self.k);
        if d == n {
            if used >= 2 && cut > self.best {
                self.best = cut;
                self.best_labels = Some(self.labels.clone());
            }
            return Ok(());
        }
        let mut bound = cut + self.pos_suffix[d];
        for v in d..n {
            bound += (0..k).map(|l| self.gain(v, l)).fold(f64::NEG_INFINITY, f64::max);
        }
        if bound <= self.best {
            return Ok(());
        }
        let mut choices: Vec<(usize, f64)> = (0..(used + 1).min(k)).map(|l| (l, self.gain(d, l))).collect();
        choices.sort_by(|a, b| b.1.total_cmp(&a.1));
        for (l, g) in choices {
            self.labels[d] = l as u8;
            for u in d + 1..n {
                let wu = self.w[d * n + u];
                self.same[u * k + l] += wu;
                self.tot[u] += wu;
            }
            let r = self.dfs(d + 1, cut + g, used.max(l + 1));
            for u in d + 1..n {
                let wu = self.w[d * n + u];
                self.same[u * k + l] -= wu;
                self.tot[u] -= wu;
            }
            r?;
        }
        Ok(())
    }
}

/// `S_W = (W_max - W_found) / (W_max - W_min)`, unclamped.
pub fn normalized_error(found: f64, oracle: &OracleResult) -> Result<f64> {
    let span = oracle.max_weight - oracle.min_weight;
    if span <= 0.0 {
        return Err(Error::DegenerateOracle(oracle.max_weight));
    }
    Ok((oracle.max_weight - found) / span)
}

/// Sample standard deviation of the pair weights (`n (n - 1) / 2` entries).
pub fn weight_std(graph: &WeightedGraph) -> f64 {
    let w = graph.pair_weights();
    if w.len() < 2 {
        return 0.0;
    }
    let mean = w.iter().sum::<f64>() / w.len() as f64;
    let var = w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (w.len() - 1) as f64;
    var.sqrt()
}

/// `min(H_XY) - min(H_T)` in units of `n * sigma`.
///
/// `min(H_T)` is the ternary energy of the exact max-3-cut assignment
/// (`H_T = 2 sum W - 3 cut` under `J = -W`).
pub fn energy_gap(graph: &WeightedGraph, xy_min: f64, k3_oracle: &OracleResult) -> Result<f64> {
    if k3_oracle.k != 3 {
        return Err(Error::UnsupportedK(k3_oracle.k));
    }
    let sigma = weight_std(graph);
    if sigma == 0.0 {
        return Err(Error::InvalidArgument(
            "energy gap undefined: weight standard deviation is zero".into(),
        ));
    }
    let couplings = couplings_from_weights(graph);
    let ht_min = ternary_energy(&couplings, &k3_oracle.argmax)?;
    Ok((xy_min - ht_min) / (graph.n() as f64 * sigma))
}

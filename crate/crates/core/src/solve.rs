//! End-to-end max-k-cut: anneal, round, keep the best converged run.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annealer::{anneal, AnnealSchedule};
use crate::error::{Error, Result};
use crate::graph::{check_k, cut_weight_raw, xy_energy, CouplingMatrix, PartitionAssignment, WeightedGraph};
use crate::oracle::{
    brute_force_cut_with_limit, enumeration_size, exact_max_cut, DEFAULT_ENUMERATION_LIMIT,
    DEFAULT_NODE_LIMIT,
};
use crate::rounding::{best_cut, BoundaryMode, BoundarySet};

/// Couplings are shrunk until the largest absolute row sum is at most this,
/// which keeps the explicit integrator stable at the default step.
pub const MAX_ROW_SUM: f64 = 16.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    /// Stuart-Landau annealer plus hyperplane rounding.
    Sl,
    /// Exact search.
    Brute,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    pub k: usize,
    pub boundaries: usize,
    pub boundary_mode: BoundaryMode,
    pub runs: usize,
    pub seed: u64,
    /// Extra batches of `runs` tried when no run converges.
    pub max_retries: usize,
    /// Finish each rounded cut with single-vertex moves ([`polish`]).
    pub polish: bool,
    pub schedule: AnnealSchedule,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            k: 3,
            boundaries: 100,
            boundary_mode: BoundaryMode::Uniform,
            runs: 1,
            seed: 0,
            max_retries: 3,
            polish: false,
            schedule: AnnealSchedule::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub converged: bool,
    /// `None` when the run diverged.
    pub xy_energy: Option<f64>,
    pub weight: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub weight: f64,
    pub assignment: PartitionAssignment,
    /// Rounding boundary of the winning run (annealer only).
    pub boundary: Option<f64>,
    pub runs: Vec<RunRecord>,
}

/// Scale factor applied to the couplings before annealing.
pub fn coupling_scale(couplings: &CouplingMatrix) -> f64 {
    let n = couplings.n();
    let row_max = (0..n)
        .map(|i| couplings.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    if row_max > MAX_ROW_SUM {
        MAX_ROW_SUM / row_max
    } else {
        1.0
    }
}

pub fn solve(graph: &WeightedGraph, solver: Solver, opts: &SolveOptions) -> Result<Solution> {
    match solver {
        Solver::Sl => solve_sl(graph, opts),
        Solver::Brute => solve_exact(graph, opts.k),
    }
}

/// Exact max-k-cut: enumeration when feasible, branch and bound otherwise.
pub fn solve_exact(graph: &WeightedGraph, k: usize) -> Result<Solution> {
    check_k(k)?;
    let (weight, assignment) = if enumeration_size(graph.n(), k) <= DEFAULT_ENUMERATION_LIMIT {
        let r = brute_force_cut_with_limit(graph, k, DEFAULT_ENUMERATION_LIMIT)?;
        (r.max_weight, r.argmax)
    } else {
        exact_max_cut(graph, k, DEFAULT_NODE_LIMIT)?
    };
    Ok(Solution {
        weight,
        assignment,
        boundary: None,
        runs: Vec::new(),
    })
}

/// Anneals `runs` seeds (`seed`, `seed + 1`, ...), rounds each over the
/// boundary set, and keeps the heaviest cut among converged runs. If none
/// converges, the next batch of seeds is tried, up to `max_retries` times.
pub fn solve_sl(graph: &WeightedGraph, opts: &SolveOptions) -> Result<Solution> {
    check_k(opts.k)?;
    if opts.runs == 0 {
        return Err(Error::InvalidArgument("runs must be >= 1".into()));
    }
    let n = graph.n();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("graph needs n >= 2, got {n}")));
    }
    let couplings = CouplingMatrix::from_weights(graph);
    let scale = coupling_scale(&couplings);
    let scaled = CouplingMatrix::from_dense(
        n,
        couplings.as_dense().iter().map(|x| x * scale).collect(),
    )?;
    let boundaries = BoundarySet::new(opts.k, opts.boundary_mode, opts.boundaries, opts.seed)?;

    let mut records = Vec::new();
    let mut best: Option<Solution> = None;
    for attempt in 0..=opts.max_retries {
        let base = opts.seed.wrapping_add((attempt * opts.runs) as u64);
        let batch: Vec<(RunRecord, Option<(f64, PartitionAssignment, f64)>)> = (0..opts.runs)
            .into_par_iter()
            .map(|i| {
                let mut s = opts.schedule.clone();
                s.seed = base.wrapping_add(i as u64);
                match anneal(&scaled, &s) {
                    Ok(out) => {
                        let mut cut = best_cut(graph, &out.spins, &boundaries)?;
                        if opts.polish {
                            let (w, a) = polish(graph, &cut.best_assignment);
                            cut.best_weight = w;
                            cut.best_assignment = a;
                        }
                        let e = xy_energy(&couplings, &out.spins)?;
                        let rec = RunRecord {
                            seed: s.seed,
                            converged: out.converged,
                            xy_energy: Some(e),
                            weight: Some(cut.best_weight),
                            error: None,
                        };
                        let win = out
                            .converged
                            .then(|| (cut.best_weight, cut.best_assignment, cut.best_boundary));
                        Ok((rec, win))
                    }
                    Err(e @ (Error::Divergence { .. } | Error::NotConverged(_))) => Ok((
                        RunRecord {
                            seed: s.seed,
                            converged: false,
                            xy_energy: None,
                            weight: None,
                            error: Some(e.to_string()),
                        },
                        None,
                    )),
                    Err(e) => Err(e),
                }
            })
            .collect::<Result<_>>()?;
        for (rec, win) in batch {
            records.push(rec);
            if let Some((w, a, phi)) = win {
                if best.as_ref().map_or(true, |b| w > b.weight) {
                    best = Some(Solution {
                        weight: w,
                        assignment: a,
                        boundary: Some(phi),
                        runs: Vec::new(),
                    });
                }
            }
        }
        if best.is_some() {
            break;
        }
    }
    match best {
        Some(mut s) => {
            s.runs = records;
            Ok(s)
        }
        None => Err(Error::NotConverged(format!(
            "no converged run in {} attempts",
            records.len()
        ))),
    }
}

/// Best-improvement local search: repeatedly moves the single vertex whose
/// relabeling gains the most cut weight, until no move gains. Moves that
/// would leave only one label in use are skipped.
pub fn polish(graph: &WeightedGraph, start: &PartitionAssignment) -> (f64, PartitionAssignment) {
    let n = graph.n();
    let k = start.k();
    let mut labels = start.labels().to_vec();
    // same[v * k + l]: weight from v to vertices labeled l
    let mut same = vec![0.0; n * k];
    for v in 0..n {
        for (u, &w) in graph.row(v).iter().enumerate() {
            if u != v {
                same[v * k + labels[u] as usize] += w;
            }
        }
    }
    let mut counts = vec![0usize; k];
    for &l in &labels {
        counts[l as usize] += 1;
    }
    let tol = 1e-12 * graph.row(0).len() as f64 * graph.as_dense().iter().fold(0.0f64, |m, w| m.max(w.abs()));
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for v in 0..n {
            let from = labels[v] as usize;
            let distinct = counts.iter().filter(|&&c| c > 0).count();
            for to in 0..k {
                if to == from || (counts[from] == 1 && counts[to] > 0 && distinct == 2) {
                    continue;
                }
                // cut gains edges to `from`, loses edges to `to`
                let gain = same[v * k + from] - same[v * k + to];
                if gain > tol && best.map_or(true, |b| gain > b.0) {
                    best = Some((gain, v, to));
                }
            }
        }
        let Some((_, v, to)) = best else { break };
        let from = labels[v] as usize;
        labels[v] = to as u8;
        counts[from] -= 1;
        counts[to] += 1;
        for (u, &w) in graph.row(v).iter().enumerate() {
            if u != v {
                same[u * k + from] -= w;
                same[u * k + to] += w;
            }
        }
    }
    (cut_weight_raw(graph, &labels), PartitionAssignment::from_raw(k, labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{house_graph, random_dense_graph};

    #[test]
    fn house_both_solvers() {
        let g = house_graph();
        let opts = SolveOptions {
            runs: 4,
            ..Default::default()
        };
        let sl = solve(&g, Solver::Sl, &opts).unwrap();
        assert_eq!(sl.weight, 6.0);
        assert_eq!(sl.runs.len(), 4);
        let bf = solve(&g, Solver::Brute, &opts).unwrap();
        assert_eq!(bf.weight, 6.0);
        assert!(bf.boundary.is_none());
    }

    #[test]
    fn scale_only_shrinks() {
        let house = CouplingMatrix::from_weights(&house_graph());
        assert_eq!(coupling_scale(&house), 1.0);
        let g = WeightedGraph::from_edges(3, &[(0, 1, 100.0), (1, 2, 100.0)]).unwrap();
        let s = coupling_scale(&CouplingMatrix::from_weights(&g));
        assert!((s - 16.0 / 200.0).abs() < 1e-15);
    }

    #[test]
    fn heavy_weights_are_stable() {
        let g = random_dense_graph(8, 3).unwrap();
        let mut heavy = WeightedGraph::empty(8).unwrap();
        for (i, j, w) in g.edges() {
            heavy.set_weight(i, j, 1e4 * w).unwrap();
        }
        let s = solve_sl(&heavy, &SolveOptions::default()).unwrap();
        assert!(s.weight > 0.0);
    }

    #[test]
    fn polish_reaches_local_optimum() {
        for seed in 0..20 {
            let g = random_dense_graph(9, seed).unwrap();
            let start = PartitionAssignment::new(3, vec![0, 1, 2, 0, 1, 2, 0, 1, 2]).unwrap();
            let (w, a) = polish(&g, &start);
            assert!(w >= crate::graph::cut_weight(&g, &start).unwrap() - 1e-12);
            assert_eq!(crate::graph::cut_weight(&g, &a).unwrap(), w);
            assert!(a.distinct_labels() >= 2);
            // no single move improves
            for v in 0..9 {
                for l in 0..3u8 {
                    let mut t = a.labels().to_vec();
                    t[v] = l;
                    let t = PartitionAssignment::new(3, t).unwrap();
                    if t.distinct_labels() >= 2 {
                        assert!(crate::graph::cut_weight(&g, &t).unwrap() <= w + 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_bad_options() {
        let g = house_graph();
        let mut o = SolveOptions::default();
        o.runs = 0;
        assert!(solve_sl(&g, &o).is_err());
        o.runs = 1;
        o.k = 5;
        assert!(matches!(solve_sl(&g, &o), Err(Error::UnsupportedK(5))));
    }
}

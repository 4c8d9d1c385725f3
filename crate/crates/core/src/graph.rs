//! Weighted graphs, coupling matrices and spin states.
//!
//! Every Hamiltonian in this crate sums over *ordered* pairs `i != j`, so each
//! undirected edge contributes twice. Cut weights sum over unordered pairs.
//! With `J = -W` this gives `H_T = -C + (3/2) * sum_{ordered cross} J`, and
//! the house graph's XY ground state sits at -8.7419.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;

/// Dense symmetric real matrix with zero diagonal, row-major.
#[derive(Clone, PartialEq)]
struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    fn from_dense(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(Error::InvalidGraph(format!(
                    "nonzero diagonal entry at {i}"
                )));
            }
            for j in (i + 1)..n {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                if !a.is_finite() || !b.is_finite() {
                    return Err(Error::InvalidGraph(format!("non-finite entry at ({i}, {j})")));
                }
                if (a - b).abs() > SYMMETRY_TOL * (1.0 + a.abs()) {
                    return Err(Error::InvalidGraph(format!(
                        "asymmetric entry ({i}, {j}): {a} vs {b}"
                    )));
                }
            }
        }
        Ok(SymMatrix { n, data })
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, w: f64) {
        self.data[i * self.n + j] = w;
        self.data[j * self.n + i] = w;
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut l = f.debug_list();
        for i in 0..self.n {
            l.entry(&self.row(i));
        }
        l.finish()
    }
}

/// Undirected edge-weighted graph over `n` vertices (the max-k-cut instance).
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    weights: SymMatrix,
}

impl WeightedGraph {
    /// Graph with no edges.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph needs at least one vertex".into()));
        }
        Ok(WeightedGraph {
            weights: SymMatrix::zeros(n),
        })
    }

    /// Builds from a row-major `n * n` matrix; checks symmetry and a zero diagonal.
    pub fn from_dense(n: usize, weights: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph needs at least one vertex".into()));
        }
        Ok(WeightedGraph {
            weights: SymMatrix::from_dense(n, weights)?,
        })
    }

    /// Builds from an undirected edge list. Repeated pairs accumulate.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for &(i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) out of range for n = {n}"
                )));
            }
            if i == j {
                return Err(Error::InvalidGraph(format!("self loop at vertex {i}")));
            }
            if !w.is_finite() {
                return Err(Error::InvalidGraph(format!("non-finite weight on ({i}, {j})")));
            }
            let cur = g.weight(i, j);
            g.weights.set(i, j, cur + w);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.weights.n
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights.get(i, j)
    }

    pub fn set_weight(&mut self, i: usize, j: usize, w: f64) -> Result<()> {
        let n = self.n();
        if i >= n || j >= n || i == j || !w.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "cannot set weight {w} on ({i}, {j}) for n = {n}"
            )));
        }
        self.weights.set(i, j, w);
        Ok(())
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        self.weights.row(i)
    }

    /// Row-major dense weight matrix.
    pub fn as_dense(&self) -> &[f64] {
        &self.weights.data
    }

    /// Nonzero edges `(i, j, w)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let w = self.weight(i, j);
                if w != 0.0 {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    /// All `n (n - 1) / 2` upper-triangle entries, zeros included.
    pub fn pair_weights(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                out.push(self.weight(i, j));
            }
        }
        out
    }

    /// Sum of weights over unordered pairs.
    pub fn total_weight(&self) -> f64 {
        self.pair_weights().iter().sum()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row(i).iter().filter(|w| **w != 0.0).count()
    }
}

/// Symmetric coupling matrix `J` with zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingMatrix {
    couplings: SymMatrix,
}

impl CouplingMatrix {
    pub fn from_dense(n: usize, couplings: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("coupling matrix needs n >= 1".into()));
        }
        Ok(CouplingMatrix {
            couplings: SymMatrix::from_dense(n, couplings)?,
        })
    }

    /// `J_ij = -W_ij`: max-cut weights become antiferromagnetic couplings.
    pub fn from_weights(graph: &WeightedGraph) -> Self {
        let data = graph.as_dense().iter().map(|w| -w).collect();
        CouplingMatrix {
            couplings: SymMatrix {
                n: graph.n(),
                data,
            },
        }
    }

    pub fn n(&self) -> usize {
        self.couplings.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.couplings.get(i, j)
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        self.couplings.row(i)
    }

    pub fn as_dense(&self) -> &[f64] {
        &self.couplings.data
    }

    /// `C = sum_{i != j} J_ij` over ordered pairs.
    pub fn ordered_sum(&self) -> f64 {
        self.couplings.data.iter().sum()
    }
}

/// See [`CouplingMatrix::from_weights`].
pub fn couplings_from_weights(graph: &WeightedGraph) -> CouplingMatrix {
    CouplingMatrix::from_weights(graph)
}

/// Wraps an angle into `[-pi, pi)`.
#[inline]
pub fn wrap_phase(theta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = theta - two_pi * ((theta + PI) / two_pi).floor();
    if r >= PI {
        r -= two_pi;
    }
    if r < -PI {
        r = -PI;
    }
    r
}

/// Continuous planar spins; every phase lies in `[-pi, pi)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpinConfiguration {
    phases: Vec<f64>,
}

impl SpinConfiguration {
    /// Canonicalizes every phase into `[-pi, pi)`. Non-finite phases are rejected.
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        if let Some(p) = phases.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite phase {p}")));
        }
        Ok(SpinConfiguration {
            phases: phases.into_iter().map(wrap_phase).collect(),
        })
    }

    /// Phases `2 pi l / k` for each label.
    pub fn from_assignment(assignment: &PartitionAssignment) -> Self {
        let step = 2.0 * PI / assignment.k() as f64;
        SpinConfiguration {
            phases: assignment
                .labels()
                .iter()
                .map(|&l| wrap_phase(step * l as f64))
                .collect(),
        }
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// Adds `delta` to every phase.
    pub fn rotated(&self, delta: f64) -> Self {
        SpinConfiguration {
            phases: self.phases.iter().map(|p| wrap_phase(p + delta)).collect(),
        }
    }
}

impl<'de> Deserialize<'de> for SpinConfiguration {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            phases: Vec<f64>,
        }
        let raw = Raw::deserialize(d)?;
        SpinConfiguration::new(raw.phases).map_err(serde::de::Error::custom)
    }
}

/// A k-way partition: one label in `0..k` per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PartitionAssignment {
    k: usize,
    labels: Vec<u8>,
}

impl PartitionAssignment {
    pub fn new(k: usize, labels: Vec<u8>) -> Result<Self> {
        check_k(k)?;
        if let Some(&l) = labels.iter().find(|&&l| l as usize >= k) {
            return Err(Error::InvalidArgument(format!("label {l} out of range for k = {k}")));
        }
        Ok(PartitionAssignment { k, labels })
    }

    /// Trusted constructor for hot loops that already guarantee `labels < k`.
    pub(crate) fn from_raw(k: usize, labels: Vec<u8>) -> Self {
        debug_assert!(labels.iter().all(|&l| (l as usize) < k));
        PartitionAssignment { k, labels }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn distinct_labels(&self) -> usize {
        let mut seen = [false; 256];
        self.labels.iter().for_each(|&l| seen[l as usize] = true);
        seen.iter().filter(|s| **s).count()
    }

    /// Applies `perm[old] = new` to every label.
    pub fn relabeled(&self, perm: &[u8]) -> Result<Self> {
        if perm.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                got: perm.len(),
            });
        }
        Self::new(self.k, self.labels.iter().map(|&l| perm[l as usize]).collect())
    }
}

impl<'de> Deserialize<'de> for PartitionAssignment {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            k: usize,
            labels: Vec<u8>,
        }
        let raw = Raw::deserialize(d)?;
        PartitionAssignment::new(raw.k, raw.labels).map_err(serde::de::Error::custom)
    }
}

pub fn check_k(k: usize) -> Result<()> {
    if (2..=4).contains(&k) {
        Ok(())
    } else {
        Err(Error::UnsupportedK(k))
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// `H_XY = -sum_{i != j} J_ij cos(theta_i - theta_j)` over ordered pairs.
pub fn xy_energy(couplings: &CouplingMatrix, spins: &SpinConfiguration) -> Result<f64> {
    check_len(couplings.n(), spins.len())?;
    Ok(xy_energy_raw(couplings, spins.phases()))
}

pub(crate) fn xy_energy_raw(couplings: &CouplingMatrix, theta: &[f64]) -> f64 {
    let n = couplings.n();
    let mut e = 0.0;
    for i in 0..n {
        let row = couplings.row(i);
        for j in (i + 1)..n {
            if row[j] != 0.0 {
                e += row[j] * (theta[i] - theta[j]).cos();
            }
        }
    }
    -2.0 * e
}

/// Ternary (q = 3 Potts) energy: `s_i . s_j` is 1 for equal labels, -1/2 otherwise.
pub fn ternary_energy(couplings: &CouplingMatrix, assignment: &PartitionAssignment) -> Result<f64> {
    if assignment.k() != 3 {
        return Err(Error::UnsupportedK(assignment.k()));
    }
    check_len(couplings.n(), assignment.len())?;
    let n = couplings.n();
    let labels = assignment.labels();
    let mut e = 0.0;
    for i in 0..n {
        let row = couplings.row(i);
        for j in (i + 1)..n {
            let dot = if labels[i] == labels[j] { 1.0 } else { -0.5 };
            e += row[j] * dot;
        }
    }
    Ok(-2.0 * e)
}

/// Total weight of edges whose endpoints carry different labels.
pub fn cut_weight(graph: &WeightedGraph, assignment: &PartitionAssignment) -> Result<f64> {
    check_len(graph.n(), assignment.len())?;
    Ok(cut_weight_raw(graph, assignment.labels()))
}

pub(crate) fn cut_weight_raw(graph: &WeightedGraph, labels: &[u8]) -> f64 {
    let n = graph.n();
    let mut w = 0.0;
    for i in 0..n {
        let row = graph.row(i);
        let li = labels[i];
        for j in (i + 1)..n {
            if labels[j] != li {
                w += row[j];
            }
        }
    }
    w
}

/// Dense graph with i.i.d. standard normal weights on every pair, seeded.
pub fn random_dense_graph(n: usize, seed: u64) -> Result<WeightedGraph> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "random dense graph needs n >= 2, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = WeightedGraph::empty(n)?;
    for i in 0..n {
        for j in (i + 1)..n {
            let w: f64 = StandardNormal.sample(&mut rng);
            g.weights.set(i, j, w);
        }
    }
    Ok(g)
}

/// Five-vertex house: square 0-1-2-3 plus apex 4 on edge 0-1, unit weights.
pub fn house_graph() -> WeightedGraph {
    let edges = [
        (0, 1, 1.0),
        (1, 2, 1.0),
        (2, 3, 1.0),
        (3, 0, 1.0),
        (0, 4, 1.0),
        (1, 4, 1.0),
    ];
    WeightedGraph::from_edges(5, &edges).expect("house graph is well formed")
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl WeightedGraph {
    /// JSON form: `{"n": .., "edges": [[i, j, w], ...]}` with `i < j`.
    pub fn to_json(&self) -> String {
        let file = GraphFile {
            n: self.n(),
            edges: self.edges(),
        };
        serde_json::to_string_pretty(&file).expect("graph serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(s)?;
        Self::from_edge_file(file)
    }

    fn from_edge_file(file: GraphFile) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for &(i, j, _) in &file.edges {
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(Error::InvalidGraph(format!("pair ({i}, {j}) listed twice")));
            }
        }
        Self::from_edges(file.n, &file.edges)
    }

    /// Whitespace edge list, one `i j w` per line; `#` starts a comment.
    /// `n` is one past the largest index unless a `# n = N` header is present.
    pub fn from_edge_list_str(s: &str) -> Result<Self> {
        let mut edges = Vec::new();
        let mut n_hint = None;
        for (lineno, line) in s.lines().enumerate() {
            let trimmed = line.trim();
            if let Some(comment) = trimmed.strip_prefix('#') {
                if let Some(v) = comment.trim().strip_prefix("n") {
                    if let Some(v) = v.trim().strip_prefix('=') {
                        n_hint = v.trim().parse::<usize>().ok();
                    }
                }
                continue;
            }
            if trimmed.is_empty() {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::InvalidGraph(format!(
                    "line {}: expected `i j w`, got {:?}",
                    lineno + 1,
                    trimmed
                )));
            }
            let bad = |f: &str| Error::InvalidGraph(format!("line {}: bad field {f:?}", lineno + 1));
            let i: usize = fields[0].parse().map_err(|_| bad(fields[0]))?;
            let j: usize = fields[1].parse().map_err(|_| bad(fields[1]))?;
            let w: f64 = fields[2].parse().map_err(|_| bad(fields[2]))?;
            edges.push((i, j, w));
        }
        let inferred = edges.iter().map(|&(i, j, _)| i.max(j) + 1).max().unwrap_or(0);
        let n = n_hint.unwrap_or(inferred).max(inferred);
        Self::from_edge_file(GraphFile { n, edges })
    }

    /// Reads JSON when the content starts with `{`, otherwise the edge-list text form.
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let parsed = if text.trim_start().starts_with('{') {
            Self::from_json_str(&text)
        } else {
            Self::from_edge_list_str(&text)
        };
        parsed.map_err(|e| match e {
            Error::Io(_) => e,
            other => Error::parse(path, other.to_string()),
        })
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn afm_triangle() -> CouplingMatrix {
        let g = WeightedGraph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        couplings_from_weights(&g)
    }

    #[test]
    fn house_all_aligned_xy_energy() {
        let j = couplings_from_weights(&house_graph());
        let spins = SpinConfiguration::new(vec![0.0; 5]).unwrap();
        assert_eq!(xy_energy(&j, &spins).unwrap(), 12.0);
    }

    #[test]
    fn triangle_at_120_degrees() {
        let spins =
            SpinConfiguration::new(vec![0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0]).unwrap();
        let e = xy_energy(&afm_triangle(), &spins).unwrap();
        assert!((e + 3.0).abs() < 1e-12, "{e}");
    }

    #[test]
    fn house_proper_three_coloring() {
        let g = house_graph();
        let j = couplings_from_weights(&g);
        let a = PartitionAssignment::new(3, vec![0, 1, 0, 1, 2]).unwrap();
        assert_eq!(ternary_energy(&j, &a).unwrap(), -6.0);
        assert_eq!(cut_weight(&g, &a).unwrap(), 6.0);
    }

    #[test]
    fn uniform_labels() {
        let g = random_dense_graph(7, 3).unwrap();
        let j = couplings_from_weights(&g);
        let a = PartitionAssignment::new(3, vec![2; 7]).unwrap();
        assert!((ternary_energy(&j, &a).unwrap() + j.ordered_sum()).abs() < 1e-12);
        assert_eq!(cut_weight(&g, &a).unwrap(), 0.0);
    }

    #[test]
    fn house_apex_isolated() {
        let a = PartitionAssignment::new(3, vec![0, 0, 0, 0, 1]).unwrap();
        assert_eq!(cut_weight(&house_graph(), &a).unwrap(), 2.0);
    }

    #[test]
    fn ternary_energy_rejects_other_k() {
        let j = afm_triangle();
        let a = PartitionAssignment::new(2, vec![0, 1, 0]).unwrap();
        assert!(matches!(ternary_energy(&j, &a), Err(Error::UnsupportedK(2))));
    }

    #[test]
    fn dimension_mismatch() {
        let g = house_graph();
        let a = PartitionAssignment::new(3, vec![0, 1]).unwrap();
        assert!(matches!(cut_weight(&g, &a), Err(Error::DimensionMismatch { .. })));
        let s = SpinConfiguration::new(vec![0.0]).unwrap();
        assert!(xy_energy(&couplings_from_weights(&g), &s).is_err());
    }

    #[test]
    fn couplings_flip_sign() {
        let g = random_dense_graph(6, 1).unwrap();
        let j = couplings_from_weights(&g);
        for (w, c) in g.as_dense().iter().zip(j.as_dense()) {
            assert_eq!(*c, -*w);
        }
        let zero = couplings_from_weights(&WeightedGraph::empty(4).unwrap());
        assert!(zero.as_dense().iter().all(|c| *c == 0.0));
        let house = couplings_from_weights(&house_graph());
        assert_eq!(house.as_dense().iter().filter(|c| **c == -1.0).count(), 12);
    }

    #[test]
    fn random_graph_is_deterministic() {
        assert_eq!(random_dense_graph(6, 42).unwrap(), random_dense_graph(6, 42).unwrap());
        assert_ne!(random_dense_graph(6, 42).unwrap(), random_dense_graph(6, 43).unwrap());
        assert!(random_dense_graph(1, 0).is_err());
    }

    #[test]
    fn random_weights_have_zero_mean() {
        let mut sum = 0.0;
        let mut count = 0usize;
        for seed in 0..10_000 {
            let w = random_dense_graph(12, seed).unwrap().pair_weights();
            assert_eq!(w.len(), 66);
            sum += w.iter().sum::<f64>();
            count += w.len();
        }
        assert!((sum / count as f64).abs() < 0.05);
    }

    #[test]
    fn house_topology() {
        let g = house_graph();
        assert_eq!(g.edges().len(), 6);
        assert!(g.edges().iter().all(|e| e.2 == 1.0));
        assert_eq!(g.degree(4), 2);
    }

    #[test]
    fn wrap_phase_range() {
        for x in [-10.0, -PI, PI, 0.0, 3.0 * PI, -3.0 * PI, 1e-17, -1e-17] {
            let r = wrap_phase(x);
            assert!((-PI..PI).contains(&r), "{x} -> {r}");
            assert!(((x - r) / (2.0 * PI)).fract().abs() < 1e-9
                || ((x - r) / (2.0 * PI)).fract().abs() > 1.0 - 1e-9);
        }
        assert_eq!(wrap_phase(PI), -PI);
    }

    #[test]
    fn invalid_graphs() {
        assert!(WeightedGraph::from_dense(2, vec![0.0, 1.0, 2.0, 0.0]).is_err());
        assert!(WeightedGraph::from_dense(2, vec![1.0, 1.0, 1.0, 0.0]).is_err());
        assert!(WeightedGraph::from_edges(2, &[(0, 0, 1.0)]).is_err());
        assert!(WeightedGraph::from_edges(2, &[(0, 2, 1.0)]).is_err());
        assert!(WeightedGraph::empty(0).is_err());
        assert!(PartitionAssignment::new(3, vec![0, 3]).is_err());
        assert!(PartitionAssignment::new(5, vec![0]).is_err());
    }

    #[test]
    fn graph_json_and_edge_list() {
        let g = house_graph();
        let back = WeightedGraph::from_json_str(&g.to_json()).unwrap();
        assert_eq!(g, back);
        let text = "# house\n0 1 1\n1 2 1\n2 3 1\n3 0 1\n0 4 1\n1 4 1\n";
        assert_eq!(WeightedGraph::from_edge_list_str(text).unwrap(), g);
        let padded = WeightedGraph::from_edge_list_str("# n = 4\n0 1 2.5\n").unwrap();
        assert_eq!(padded.n(), 4);
        assert!(WeightedGraph::from_json_str(r#"{"n":2,"edges":[[0,1,1],[1,0,1]]}"#).is_err());
        assert!(WeightedGraph::from_edge_list_str("0 1\n").is_err());
    }
}

//! Constrained via minimization on three layers, reduced to max-3-cut.
//!
//! Critical segments joined by conflicts form a critical region, and every
//! region is assigned one of three layers. A free segment between two
//! regions costs a via when its endpoints have different orientations and
//! the regions share a layer (counted by `alpha`), or the same orientation
//! and the regions differ (`beta`). Hence `vias = A - sum_{cut pairs} (alpha - beta)`.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::solve::{solve, SolveOptions, Solver};

pub const LAYERS: usize = 3;

/// Default cap on `3^(R-1)` for [`oracle_min_vias`].
pub const DEFAULT_VIA_ORACLE_LIMIT: u128 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalSegment {
    pub id: String,
    pub orientation: Orientation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeSegment {
    pub a: String,
    pub b: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitLayout {
    pub critical_segments: Vec<CriticalSegment>,
    /// Pairs of critical segments that cross.
    #[serde(default)]
    pub conflicts: Vec<(String, String)>,
    #[serde(default)]
    pub free_segments: Vec<FreeSegment>,
}

impl CircuitLayout {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let layout: CircuitLayout =
            serde_json::from_str(&text).map_err(|e| Error::parse(path, e.to_string()))?;
        layout.validate()?;
        Ok(layout)
    }

    fn index(&self) -> Result<HashMap<&str, usize>> {
        let mut idx = HashMap::new();
        for (i, s) in self.critical_segments.iter().enumerate() {
            if idx.insert(s.id.as_str(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate segment id {:?}", s.id)));
            }
        }
        Ok(idx)
    }

    /// Ids unique, references resolve, no self-pairs.
    pub fn validate(&self) -> Result<()> {
        let idx = self.index()?;
        let look = |id: &str| {
            idx.get(id)
                .copied()
                .ok_or_else(|| Error::InvalidGraph(format!("unknown segment id {id:?}")))
        };
        for (a, b) in &self.conflicts {
            let (i, j) = (look(a)?, look(b)?);
            if i == j {
                return Err(Error::InvalidGraph(format!("segment {a:?} conflicts with itself")));
            }
        }
        for f in &self.free_segments {
            if look(&f.a)? == look(&f.b)? {
                return Err(Error::InvalidGraph(format!("free segment joins {:?} to itself", f.a)));
            }
        }
        Ok(())
    }
}

/// Critical regions: connected components of the conflict graph. Members
/// are sorted and regions are ordered by their smallest member id, so the
/// result does not depend on input order.
pub fn build_regions(layout: &CircuitLayout) -> Result<Vec<Vec<String>>> {
    layout.validate()?;
    let idx = layout.index()?;
    let n = layout.critical_segments.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (a, b) in &layout.conflicts {
        let (ra, rb) = (find(&mut parent, idx[a.as_str()]), find(&mut parent, idx[b.as_str()]));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(layout.critical_segments[i].id.clone());
    }
    let mut regions: Vec<Vec<String>> = groups
        .into_values()
        .map(|mut g| {
            g.sort();
            g
        })
        .collect();
    regions.sort();
    Ok(regions)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionPair {
    pub i: usize,
    pub j: usize,
    pub alpha: u64,
    pub beta: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedLayout {
    pub regions: Vec<Vec<String>>,
    /// Region pairs (`i < j`) joined by at least one free segment.
    pub pairs: Vec<RegionPair>,
    /// `A = sum alpha`.
    pub a: u64,
    /// `segment id -> (region, orientation)`
    #[serde(skip)]
    pub membership: HashMap<String, (usize, Orientation)>,
}

impl ReducedLayout {
    pub fn region_count(&self) -> usize {
        self.regions.len()
    }

    pub fn alpha(&self, i: usize, j: usize) -> u64 {
        self.pair(i, j).map_or(0, |p| p.alpha)
    }

    pub fn beta(&self, i: usize, j: usize) -> u64 {
        self.pair(i, j).map_or(0, |p| p.beta)
    }

    fn pair(&self, i: usize, j: usize) -> Option<&RegionPair> {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.pairs.iter().find(|p| p.i == i && p.j == j)
    }

    /// `W_ij = alpha_ij - beta_ij`.
    pub fn weights(&self) -> WeightedGraph {
        let r = self.regions.len();
        let mut g = WeightedGraph::empty(r).expect("region count");
        for p in &self.pairs {
            g.set_weight(p.i, p.j, p.alpha as f64 - p.beta as f64).expect("indices in range");
        }
        g
    }

    /// Layer of each segment (its region's layer).
    pub fn segment_layers(&self, region_layers: &[u8]) -> Result<BTreeMap<String, u8>> {
        check_assignment(self, region_layers)?;
        Ok(self
            .membership
            .iter()
            .map(|(id, &(r, _))| (id.clone(), region_layers[r]))
            .collect())
    }
}

/// Counts free segments between regions. Free segments inside one region
/// are ignored; repeated ones accumulate.
pub fn reduce(layout: &CircuitLayout) -> Result<ReducedLayout> {
    let regions = build_regions(layout)?;
    let mut membership = HashMap::new();
    let orient: HashMap<&str, Orientation> = layout
        .critical_segments
        .iter()
        .map(|s| (s.id.as_str(), s.orientation))
        .collect();
    for (r, members) in regions.iter().enumerate() {
        for id in members {
            membership.insert(id.clone(), (r, orient[id.as_str()]));
        }
    }
    let mut counts: BTreeMap<(usize, usize), (u64, u64)> = BTreeMap::new();
    for f in &layout.free_segments {
        let (ra, oa) = membership[&f.a];
        let (rb, ob) = membership[&f.b];
        if ra == rb {
            continue;
        }
        let e = counts.entry((ra.min(rb), ra.max(rb))).or_default();
        if oa != ob {
            e.0 += 1;
        } else {
            e.1 += 1;
        }
    }
    let pairs: Vec<RegionPair> = counts
        .into_iter()
        .map(|((i, j), (alpha, beta))| RegionPair { i, j, alpha, beta })
        .collect();
    let a = pairs.iter().map(|p| p.alpha).sum();
    Ok(ReducedLayout {
        regions,
        pairs,
        a,
        membership,
    })
}

fn check_assignment(reduced: &ReducedLayout, layers: &[u8]) -> Result<()> {
    if layers.len() != reduced.regions.len() {
        return Err(Error::DimensionMismatch {
            expected: reduced.regions.len(),
            got: layers.len(),
        });
    }
    if let Some(&l) = layers.iter().find(|&&l| l as usize >= LAYERS) {
        return Err(Error::InvalidArgument(format!("layer {l} out of range")));
    }
    Ok(())
}

/// `sum_{same layer} alpha + sum_{different layers} beta`.
pub fn via_count(reduced: &ReducedLayout, layers: &[u8]) -> Result<u64> {
    check_assignment(reduced, layers)?;
    Ok(via_count_raw(reduced, layers))
}

fn via_count_raw(reduced: &ReducedLayout, layers: &[u8]) -> u64 {
    reduced
        .pairs
        .iter()
        .map(|p| if layers[p.i] == layers[p.j] { p.alpha } else { p.beta })
        .sum()
}

/// Exact minimum via count by enumerating region layers (first region pinned).
pub fn oracle_min_vias(reduced: &ReducedLayout, limit: u128) -> Result<u64> {
    let r = reduced.regions.len();
    if r < 2 {
        return Ok(0);
    }
    let states = (LAYERS as u128).saturating_pow(r as u32 - 1);
    if states > limit {
        return Err(Error::TooLarge { states, limit });
    }
    let states = states as u64;
    let decode = |mut code: u64, out: &mut [u8]| {
        out[0] = 0;
        for l in out.iter_mut().skip(1) {
            *l = (code % LAYERS as u64) as u8;
            code /= LAYERS as u64;
        }
    };
    let chunk = 1u64 << 14;
    Ok((0..states.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut layers = vec![0u8; r];
            let mut best = u64::MAX;
            for code in c * chunk..((c + 1) * chunk).min(states) {
                decode(code, &mut layers);
                best = best.min(via_count_raw(reduced, &layers));
            }
            best
        })
        .min()
        .unwrap_or(0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvmSolution {
    pub region_layers: Vec<u8>,
    pub via_count: u64,
    pub cut_weight: f64,
    pub a: u64,
    /// Distinct layers assigned to regions.
    pub layers_used: usize,
}

/// Maximizes the cut of `W = alpha - beta` over three layers. The solver
/// only proposes multi-layer assignments; the single-layer one (cut 0) is
/// used when the proposal cuts negative weight.
pub fn solve_cvm(layout: &CircuitLayout, solver: Solver, opts: &SolveOptions) -> Result<(ReducedLayout, CvmSolution)> {
    let reduced = reduce(layout)?;
    let r = reduced.region_count();
    let mut layers = vec![0u8; r];
    let mut cut = 0.0;
    if r >= 2 && !reduced.pairs.is_empty() {
        let graph = reduced.weights();
        let opts = SolveOptions { k: LAYERS, ..opts.clone() };
        let sol = solve(&graph, solver, &opts)?;
        if sol.weight >= 0.0 {
            cut = sol.weight;
            layers = sol.assignment.labels().to_vec();
        }
    }
    let vias = via_count_raw(&reduced, &layers);
    debug_assert_eq!(vias as f64, reduced.a as f64 - cut);
    let used: std::collections::BTreeSet<u8> = layers.iter().copied().collect();
    let solution = CvmSolution {
        via_count: vias,
        cut_weight: cut,
        a: reduced.a,
        layers_used: used.len(),
        region_layers: layers,
    };
    Ok((reduced, solution))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionLayer {
    pub members: Vec<String>,
    pub layer: u8,
}

/// Contents of `layers.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayersFile {
    pub regions: Vec<RegionLayer>,
    pub segments: BTreeMap<String, u8>,
    pub via_count: u64,
    #[serde(rename = "A")]
    pub a: u64,
    pub cut_weight: f64,
    pub layers_used: usize,
    /// Exhaustive minimum, when it was computed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_min_vias: Option<u64>,
}

impl LayersFile {
    pub fn new(reduced: &ReducedLayout, sol: &CvmSolution) -> Result<Self> {
        Ok(LayersFile {
            regions: reduced
                .regions
                .iter()
                .zip(&sol.region_layers)
                .map(|(m, &layer)| RegionLayer {
                    members: m.clone(),
                    layer,
                })
                .collect(),
            segments: reduced.segment_layers(&sol.region_layers)?,
            via_count: sol.via_count,
            a: sol.a,
            cut_weight: sol.cut_weight,
            layers_used: sol.layers_used,
            oracle_min_vias: None,
        })
    }
}

fn seg(id: &str, o: Orientation) -> CriticalSegment {
    CriticalSegment {
        id: id.to_string(),
        orientation: o,
    }
}

fn free(a: &str, b: &str) -> FreeSegment {
    FreeSegment {
        a: a.to_string(),
        b: b.to_string(),
    }
}

/// Random valid layout with `regions` critical regions of one to three
/// segments each and `free_count` free segments between random segment pairs.
pub fn random_layout(regions: usize, free_count: usize, seed: u64) -> CircuitLayout {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut layout = CircuitLayout::default();
    for r in 0..regions {
        let size = rng.gen_range(1..=3);
        for s in 0..size {
            let o = if rng.gen_bool(0.5) {
                Orientation::Horizontal
            } else {
                Orientation::Vertical
            };
            let id = format!("r{r}s{s}");
            if s > 0 {
                let p = rng.gen_range(0..s);
                layout.conflicts.push((format!("r{r}s{p}"), id.clone()));
            }
            layout.critical_segments.push(seg(&id, o));
        }
    }
    let n = layout.critical_segments.len();
    if n >= 2 {
        for _ in 0..free_count {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            let (a, b) = (&layout.critical_segments[a].id, &layout.critical_segments[b].id);
            layout.free_segments.push(free(a, b));
        }
    }
    layout
}

/// Instance whose minimum is two vias on two of the three layers: a
/// crossing pair `X = {h1, v1}` and two lone horizontals `Y = {h2}`,
/// `Z = {h3}`. Alpha and beta cancel on X-Y and X-Z, and a same-orientation
/// link makes separating Y from Z cost a via, so the optimum puts X on one
/// layer and Y, Z together on another.
pub fn two_via_layout() -> CircuitLayout {
    use Orientation::*;
    CircuitLayout {
        critical_segments: vec![
            seg("h1", Horizontal),
            seg("v1", Vertical),
            seg("h2", Horizontal),
            seg("h3", Horizontal),
        ],
        conflicts: vec![("h1".into(), "v1".into())],
        free_segments: vec![
            free("h1", "h2"),
            free("v1", "h2"),
            free("v1", "h3"),
            free("h1", "h3"),
            free("h2", "h3"),
        ],
    }
}

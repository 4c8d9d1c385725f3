//! Command-line front end. Every subcommand reads an optional JSON config,
//! applies flag overrides on top and writes its outputs under `--out`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bench::{
    gap_study, kcut_comparison, run_benchmark, write_gap_curve_csv, write_histogram_csv,
    write_records_jsonl, BenchmarkConfig, DEFAULT_GAP_BINS,
};
use crate::cvm::{oracle_min_vias, solve_cvm, CircuitLayout, LayersFile, DEFAULT_VIA_ORACLE_LIMIT};
use crate::error::{Error, Result};
use crate::gpe::{
    density_pgm, layout_threshold, phase_ppm, run_layout_states, GpeParams, PumpLayout, SimConfig,
};
use crate::graph::{SpinConfiguration, WeightedGraph};
use crate::oracle::{brute_force_cut_with_limit, enumeration_size, normalized_error};
use crate::rounding::{best_cut, BoundaryMode, BoundarySet};
use crate::segment::{overlay, segment, Image, LabelsFile, SegmentationParams, WeightSign};
use crate::solve::{solve, RunRecord, SolveOptions, Solver};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotConverged(_) | Error::Divergence { .. } => EXIT_SOLVER,
        Error::TooLarge { .. } => EXIT_RESOURCE,
        _ => EXIT_INPUT,
    }
}

#[derive(Parser, Debug)]
#[command(name = "oscicut", version, about = "Max-k-cut with oscillator networks")]
#[command(after_help = "Set OSCICUT_THREADS to cap the number of worker threads.\n\
Exit codes: 0 ok, 2 input error, 3 solver did not converge, 4 resource limit.")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve max-k-cut on a graph file; writes result.json.
    Anneal(AnnealArgs),
    /// Random-graph error study; writes records.jsonl, summary.json and CSVs.
    Benchmark(BenchArgs),
    /// Segment an image via max-3-cut of a sampled pixel graph; writes labels.json and overlay.ppm.
    Segment(SegmentArgs),
    /// Three-layer via minimization; writes layers.json.
    Cvm(CvmArgs),
    /// Condensate network simulation; writes phases.json and phase map renders.
    Gpe(GpeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverArg {
    Sl,
    Gpe,
    Brute,
}

impl SolverArg {
    fn graph_solver(self) -> Result<Solver> {
        match self {
            SolverArg::Sl => Ok(Solver::Sl),
            SolverArg::Brute => Ok(Solver::Brute),
            SolverArg::Gpe => Err(Error::InvalidArgument(
                "the gpe solver needs a pump layout; use the gpe subcommand".into(),
            )),
        }
    }
}

#[derive(Args, Debug, Default)]
pub struct SolveFlags {
    /// Number of subsets, 2 to 4 [default: 3]
    #[arg(long)]
    pub k: Option<usize>,
    /// Rounding boundaries per run [default: 100]
    #[arg(long)]
    pub boundaries: Option<usize>,
    /// Boundary placement [default: uniform]
    #[arg(long, value_parser = clap::value_parser!(BoundaryMode))]
    pub boundary_mode: Option<BoundaryMode>,
    /// Independent annealer runs [default: 1]
    #[arg(long)]
    pub runs: Option<usize>,
    /// Base seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// sl (oscillator annealer) or brute (exact) [default: sl]
    #[arg(long, value_enum)]
    pub solver: Option<SolverArg>,
    /// Finish rounded cuts with single-vertex moves
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub polish: Option<bool>,
    /// Annealer ramp duration [default: 1000]
    #[arg(long)]
    pub total_time: Option<f64>,
    /// Annealer step [default: 0.01]
    #[arg(long)]
    pub dt: Option<f64>,
    /// Annealer hold after the ramp [default: 200]
    #[arg(long)]
    pub hold_time: Option<f64>,
}

impl SolveFlags {
    fn apply(&self, solver: &mut SolverArg, o: &mut SolveOptions) {
        if let Some(v) = self.k {
            o.k = v;
        }
        if let Some(v) = self.boundaries {
            o.boundaries = v;
        }
        if let Some(v) = self.boundary_mode {
            o.boundary_mode = v;
        }
        if let Some(v) = self.runs {
            o.runs = v;
        }
        if let Some(v) = self.seed {
            o.seed = v;
        }
        if let Some(v) = self.solver {
            *solver = v;
        }
        if let Some(v) = self.polish {
            o.polish = v;
        }
        if let Some(v) = self.total_time {
            o.schedule.total_time = v;
        }
        if let Some(v) = self.dt {
            o.schedule.dt = v;
        }
        if let Some(v) = self.hold_time {
            o.schedule.hold_time = v;
        }
    }
}

#[derive(Args, Debug)]
pub struct AnnealArgs {
    /// Graph file (JSON or edge list)
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// JSON config; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub solve: SolveFlags,
    /// Largest brute-force enumeration attempted for S_W [default: 1e7]
    #[arg(long)]
    pub oracle_limit: Option<u128>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnealConfig {
    pub graph: Option<PathBuf>,
    pub solver: SolverArg,
    pub solve: SolveOptions,
    pub oracle_limit: u128,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            graph: None,
            solver: SolverArg::Sl,
            solve: SolveOptions::default(),
            oracle_limit: 10_000_000,
        }
    }
}

/// Contents of `result.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealResult {
    pub n: usize,
    pub k: usize,
    pub solver: SolverArg,
    pub weight: f64,
    pub assignment: Vec<u8>,
    pub boundary: Option<f64>,
    pub oracle_max: Option<f64>,
    pub oracle_min: Option<f64>,
    pub s_w: Option<f64>,
    pub runs: Vec<RunRecord>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Graph sizes, comma separated [default: 6,12,18]
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Same as --sizes
    #[arg(long = "n", value_delimiter = ',', conflicts_with = "sizes")]
    pub n: Option<Vec<usize>>,
    /// Graphs per size; one value applies to all sizes [default: 500,200,100]
    #[arg(long, value_delimiter = ',')]
    pub graphs: Option<Vec<usize>>,
    /// Subset counts, comma separated [default: 3]
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
    /// Boundary counts, comma separated [default: 100]
    #[arg(long, value_delimiter = ',')]
    pub boundaries: Option<Vec<usize>>,
    #[arg(long, value_parser = clap::value_parser!(BoundaryMode))]
    pub boundary_mode: Option<BoundaryMode>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Max-2/3/4-cut comparison: defaults switch to n=10, 160 graphs,
    /// k=2,3,4, random nested boundaries 1..100
    #[arg(long)]
    pub kcut_compare: bool,
    /// Bins of the energy-gap curve [default: 12]
    #[arg(long)]
    pub gap_bins: Option<usize>,
    #[arg(long)]
    pub total_time: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub hold_time: Option<f64>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchFileConfig {
    pub benchmark: BenchmarkConfig,
    pub gap_bins: usize,
    pub kcut_compare: bool,
}

impl Default for BenchFileConfig {
    fn default() -> Self {
        BenchFileConfig {
            benchmark: BenchmarkConfig::default(),
            gap_bins: DEFAULT_GAP_BINS,
            kcut_compare: false,
        }
    }
}

/// Defaults of the max-2/3/4-cut comparison.
pub fn kcut_defaults() -> BenchmarkConfig {
    BenchmarkConfig {
        sizes: vec![10],
        graphs_per_size: vec![160],
        k_values: vec![2, 3, 4],
        boundary_counts: vec![1, 2, 5, 10, 20, 50, 100],
        boundary_mode: BoundaryMode::Random,
        ..Default::default()
    }
}

#[derive(Args, Debug)]
pub struct SegmentArgs {
    /// Input PPM image
    #[arg(long)]
    pub image: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Weight method 1 to 5 [default: 1]
    #[arg(long)]
    pub method: Option<u8>,
    /// Sampled pixels [default: 200]
    #[arg(long)]
    pub m: Option<usize>,
    /// Connectivity radius in pixels [default: 400]
    #[arg(long)]
    pub r: Option<f64>,
    /// Difference exponent [default: 0.1]
    #[arg(long)]
    pub q: Option<f64>,
    /// dissimilarity or similarity weights [default: dissimilarity]
    #[arg(long, value_parser = clap::value_parser!(WeightSign))]
    pub sign: Option<WeightSign>,
    /// Color quantization levels per channel for the color weights
    #[arg(long)]
    pub levels: Option<u32>,
    #[command(flatten)]
    pub solve: SolveFlags,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SegmentConfig {
    pub image: Option<PathBuf>,
    pub solver: SolverArg,
    pub segmentation: SegmentationParams,
    pub solve: SolveOptions,
}

impl Default for SegmentConfig {
    fn default() -> Self {
        SegmentConfig {
            image: None,
            solver: SolverArg::Sl,
            segmentation: SegmentationParams::default(),
            solve: SolveOptions {
                polish: true,
                ..Default::default()
            },
        }
    }
}

#[derive(Args, Debug)]
pub struct CvmArgs {
    /// Circuit layout JSON
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub solve: SolveFlags,
    /// Largest layer enumeration attempted for the exact via count [default: 5e7]
    #[arg(long)]
    pub oracle_limit: Option<u128>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CvmConfig {
    pub circuit: Option<PathBuf>,
    pub solver: SolverArg,
    pub solve: SolveOptions,
    pub oracle_limit: u128,
}

impl Default for CvmConfig {
    fn default() -> Self {
        CvmConfig {
            circuit: None,
            solver: SolverArg::Sl,
            solve: SolveOptions::default(),
            oracle_limit: DEFAULT_VIA_ORACLE_LIMIT,
        }
    }
}

#[derive(Args, Debug)]
pub struct GpeArgs {
    /// Pump layout JSON; omitted means the house layout
    #[arg(long)]
    pub layout: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Independent runs [default: 1]
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Pump power density; omitted means pump factor times the single-ring threshold
    #[arg(long)]
    pub p0: Option<f64>,
    /// Multiple of the threshold used when --p0 is absent
    #[arg(long)]
    pub pump_factor: Option<f64>,
    /// Simulated time in ps
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Time step in ps
    #[arg(long)]
    pub dt: Option<f64>,
    /// Grid points per side (power of two)
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub boundaries: Option<usize>,
    /// Only gpe is accepted here
    #[arg(long, value_enum)]
    pub solver: Option<SolverArg>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GpeConfig {
    pub layout: Option<PathBuf>,
    pub runs: usize,
    pub p0: Option<f64>,
    pub pump_factor: f64,
    pub params: GpeParams,
    pub sim: SimConfig,
    pub k: usize,
    pub boundaries: usize,
}

/// Default multiple of the single-ring threshold.
pub const DEFAULT_PUMP_FACTOR: f64 = 1.2;

impl Default for GpeConfig {
    fn default() -> Self {
        GpeConfig {
            layout: None,
            runs: 1,
            p0: None,
            pump_factor: DEFAULT_PUMP_FACTOR,
            params: GpeParams::default(),
            sim: SimConfig::default(),
            k: 3,
            boundaries: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub seed: u64,
    pub stationary: bool,
    pub drift: f64,
    pub phases: Vec<f64>,
    pub densities: Vec<f64>,
    /// Best binned cut of the neighbor graph; absent without phases.
    pub weight: Option<f64>,
    pub assignment: Option<Vec<u8>>,
}

/// Contents of `phases.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasesFile {
    pub p0: f64,
    pub threshold: Option<f64>,
    pub edges: Vec<(usize, usize, f64)>,
    pub runs: Vec<PhaseRecord>,
}

fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::parse(p, e.to_string()))?;
            serde_json::from_str(&text).map_err(|e| Error::parse(p, e.to_string()))
        }
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn required(path: Option<PathBuf>, flag: &str) -> Result<PathBuf> {
    path.ok_or_else(|| Error::InvalidArgument(format!("{flag} is required")))
}

fn cmd_anneal(args: AnnealArgs) -> Result<()> {
    let mut cfg: AnnealConfig = load_config(args.config.as_deref())?;
    if args.graph.is_some() {
        cfg.graph = args.graph;
    }
    args.solve.apply(&mut cfg.solver, &mut cfg.solve);
    if let Some(v) = args.oracle_limit {
        cfg.oracle_limit = v;
    }
    crate::graph::check_k(cfg.solve.k)?;
    let solver = cfg.solver.graph_solver()?;
    let graph = WeightedGraph::read(&required(cfg.graph, "--graph")?)?;
    let sol = solve(&graph, solver, &cfg.solve)?;
    let oracle = if enumeration_size(graph.n(), cfg.solve.k) <= cfg.oracle_limit {
        Some(brute_force_cut_with_limit(&graph, cfg.solve.k, cfg.oracle_limit)?)
    } else {
        None
    };
    let s_w = oracle.as_ref().and_then(|o| normalized_error(sol.weight, o).ok());
    let result = AnnealResult {
        n: graph.n(),
        k: cfg.solve.k,
        solver: cfg.solver,
        weight: sol.weight,
        assignment: sol.assignment.labels().to_vec(),
        boundary: sol.boundary,
        oracle_max: oracle.as_ref().map(|o| o.max_weight),
        oracle_min: oracle.as_ref().map(|o| o.min_weight),
        s_w,
        runs: sol.runs,
    };
    fs::create_dir_all(&args.out)?;
    write_json(&args.out.join("result.json"), &result)
}

fn cmd_benchmark(args: BenchArgs) -> Result<()> {
    let mut cfg: BenchFileConfig = match args.config.as_deref() {
        Some(p) => load_config(Some(p))?,
        None if args.kcut_compare => BenchFileConfig {
            benchmark: kcut_defaults(),
            kcut_compare: true,
            ..Default::default()
        },
        None => BenchFileConfig::default(),
    };
    cfg.kcut_compare |= args.kcut_compare;
    let b = &mut cfg.benchmark;
    if let Some(v) = args.sizes.or(args.n) {
        b.sizes = v;
    }
    if let Some(v) = args.graphs {
        b.graphs_per_size = v;
    }
    if let Some(v) = args.k {
        b.k_values = v;
    }
    if let Some(v) = args.boundaries {
        b.boundary_counts = v;
    }
    if let Some(v) = args.boundary_mode {
        b.boundary_mode = v;
    }
    if let Some(v) = args.seed {
        b.base_seed = v;
    }
    if let Some(v) = args.total_time {
        b.schedule.total_time = v;
    }
    if let Some(v) = args.dt {
        b.schedule.dt = v;
    }
    if let Some(v) = args.hold_time {
        b.schedule.hold_time = v;
    }
    if let Some(v) = args.gap_bins {
        cfg.gap_bins = v;
    }
    for &k in &cfg.benchmark.k_values {
        crate::graph::check_k(k)?;
    }
    fs::create_dir_all(&args.out)?;
    let out = &args.out;
    if cfg.kcut_compare {
        let cmp = kcut_comparison(&cfg.benchmark)?;
        write_records_jsonl(&cmp.records, &out.join("records.jsonl"))?;
        write_json(&out.join("kcut_table.json"), &cmp.table)?;
        let mut table = String::from("n,k,boundaries,graphs,mean_s_w,std_s_w\n");
        for r in &cmp.table {
            table += &format!("{},{},{},{},{},{}\n", r.n, r.k, r.boundaries, r.graphs, r.mean_s_w, r.std_s_w);
        }
        fs::write(out.join("kcut_table.csv"), table)?;
        let mut scatter = String::from("n,k,w_sl,w_bf\n");
        for p in &cmp.scatter {
            scatter += &format!("{},{},{},{}\n", p.n, p.k, p.w_sl, p.w_bf);
        }
        fs::write(out.join("scatter.csv"), scatter)?;
        return Ok(());
    }
    let (records, summary) = run_benchmark(&cfg.benchmark)?;
    write_records_jsonl(&records, &out.join("records.jsonl"))?;
    write_json(&out.join("summary.json"), &summary)?;
    for g in &summary.groups {
        write_histogram_csv(
            &g.histogram,
            &out.join(format!("histogram_n{}_k{}_m{}.csv", g.n, g.k, g.boundaries)),
        )?;
    }
    let with_gap: Vec<_> = records.iter().filter(|r| r.gap.is_some()).cloned().collect();
    if !with_gap.is_empty() {
        for &n in &cfg.benchmark.sizes {
            let group: Vec<_> = with_gap.iter().filter(|r| r.n == n).cloned().collect();
            if let Ok(bins) = gap_study(&group, cfg.gap_bins) {
                write_gap_curve_csv(&bins, &out.join(format!("gap_curve_n{n}.csv")))?;
            }
        }
    }
    Ok(())
}

fn cmd_segment(args: SegmentArgs) -> Result<()> {
    let mut cfg: SegmentConfig = load_config(args.config.as_deref())?;
    if args.image.is_some() {
        cfg.image = args.image;
    }
    let p = &mut cfg.segmentation;
    if let Some(v) = args.method {
        p.method = v;
    }
    if let Some(v) = args.m {
        p.m = v;
    }
    if let Some(v) = args.r {
        p.r = v;
    }
    if let Some(v) = args.q {
        p.q = v;
    }
    if let Some(v) = args.sign {
        p.sign = v;
    }
    if args.levels.is_some() {
        p.levels = args.levels;
    }
    args.solve.apply(&mut cfg.solver, &mut cfg.solve);
    if let Some(v) = args.solve.seed {
        cfg.segmentation.seed = v;
    }
    crate::graph::check_k(cfg.solve.k)?;
    let solver = cfg.solver.graph_solver()?;
    let img = Image::read_ppm(&required(cfg.image, "--image")?)?;
    let seg = segment(&img, &cfg.segmentation, solver, &cfg.solve)?;
    fs::create_dir_all(&args.out)?;
    write_json(&args.out.join("labels.json"), &LabelsFile::new(&seg, &cfg.segmentation))?;
    overlay(&img, &seg.pixel_graph.samples, &seg.labels).write_ppm(&args.out.join("overlay.ppm"))
}

fn cmd_cvm(args: CvmArgs) -> Result<()> {
    let mut cfg: CvmConfig = load_config(args.config.as_deref())?;
    if args.circuit.is_some() {
        cfg.circuit = args.circuit;
    }
    args.solve.apply(&mut cfg.solver, &mut cfg.solve);
    if let Some(v) = args.oracle_limit {
        cfg.oracle_limit = v;
    }
    let solver = cfg.solver.graph_solver()?;
    let layout = CircuitLayout::read(&required(cfg.circuit, "--circuit")?)?;
    let (reduced, sol) = solve_cvm(&layout, solver, &cfg.solve)?;
    let mut file = LayersFile::new(&reduced, &sol)?;
    file.oracle_min_vias = match oracle_min_vias(&reduced, cfg.oracle_limit) {
        Ok(v) => Some(v),
        Err(Error::TooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    fs::create_dir_all(&args.out)?;
    write_json(&args.out.join("layers.json"), &file)
}

fn cmd_gpe(args: GpeArgs) -> Result<()> {
    let mut cfg: GpeConfig = load_config(args.config.as_deref())?;
    if let Some(s) = args.solver {
        if s != SolverArg::Gpe {
            return Err(Error::InvalidArgument("the gpe subcommand only runs the gpe solver".into()));
        }
    }
    if args.layout.is_some() {
        cfg.layout = args.layout;
    }
    if let Some(v) = args.runs {
        cfg.runs = v;
    }
    if let Some(v) = args.seed {
        cfg.sim.seed = v;
    }
    if args.p0.is_some() {
        cfg.p0 = args.p0;
    }
    if let Some(v) = args.pump_factor {
        cfg.pump_factor = v;
    }
    if let Some(v) = args.t_end {
        cfg.sim.t_end = v;
    }
    if let Some(v) = args.dt {
        cfg.sim.dt = v;
    }
    if let Some(v) = args.k {
        cfg.k = v;
    }
    if let Some(v) = args.boundaries {
        cfg.boundaries = v;
    }
    crate::graph::check_k(cfg.k)?;
    let mut layout = match &cfg.layout {
        Some(p) => PumpLayout::read(p)?,
        None => PumpLayout::house(crate::gpe::DEFAULT_SPACING),
    };
    if let Some(v) = args.points {
        layout.points = v;
    }
    layout.validate(cfg.sim.absorber_width)?;
    let graph = layout.neighbor_graph()?;
    let (p0, threshold) = match cfg.p0 {
        Some(p) => (p, None),
        None => {
            let t = layout_threshold(&cfg.params, &layout, &cfg.sim)?;
            (cfg.pump_factor * t, Some(t))
        }
    };
    let runs = run_layout_states(&cfg.params, &layout, p0, &cfg.sim, cfg.runs)?;
    let boundaries = BoundarySet::uniform(cfg.k, cfg.boundaries)?;
    fs::create_dir_all(&args.out)?;
    let mut records = Vec::new();
    for (run, state) in &runs {
        let (weight, assignment) = if run.phases.is_empty() {
            (None, None)
        } else {
            let spins = SpinConfiguration::new(run.phases.clone())?;
            let cut = best_cut(&graph, &spins, &boundaries)?;
            (Some(cut.best_weight), Some(cut.best_assignment.labels().to_vec()))
        };
        if let Some(st) = state {
            let stem = format!("phasemap_seed{}", run.seed);
            fs::write(args.out.join(format!("{stem}.pgm")), density_pgm(layout.points, &st.psi))?;
            fs::write(args.out.join(format!("{stem}.ppm")), phase_ppm(layout.points, &st.psi))?;
        }
        records.push(PhaseRecord {
            seed: run.seed,
            stationary: run.stationary,
            drift: run.drift,
            phases: run.phases.clone(),
            densities: run.densities.clone(),
            weight,
            assignment,
        });
    }
    let file = PhasesFile {
        p0,
        threshold,
        edges: graph.edges(),
        runs: records,
    };
    write_json(&args.out.join("phases.json"), &file)
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("OSCICUT_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::InvalidArgument(format!("OSCICUT_THREADS must be a positive integer, got {v:?}")))?;
        // a pool may already exist when called repeatedly in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

pub fn execute(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Anneal(a) => cmd_anneal(a),
        Command::Benchmark(a) => cmd_benchmark(a),
        Command::Segment(a) => cmd_segment(a),
        Command::Cvm(a) => cmd_cvm(a),
        Command::Gpe(a) => cmd_gpe(a),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Errors go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "error: {e}");
            exit_code(&e)
        }
    }
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use oscicut::bench::{read_records_jsonl, BenchmarkSummary};
use oscicut::cli::{AnnealResult, GpeConfig, PhasesFile, EXIT_INPUT, EXIT_OK};
use oscicut::cvm::{random_layout, two_via_layout, LayersFile};
use oscicut::gpe::{PumpLayout, SimConfig};
use oscicut::graph::{house_graph, WeightedGraph};
use oscicut::segment::{three_block_image, Image, LabelsFile};

fn oscicut(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oscicut"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("OSCICUT_THREADS", "2")
        .output()
        .unwrap()
}

fn json<T: serde::de::DeserializeOwned>(path: &Path) -> T {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn house_file(dir: &Path) -> String {
    let p = dir.join("house.json");
    house_graph().write_json(&p).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn anneal_house() {
    let tmp = tempfile::tempdir().unwrap();
    let g = house_file(tmp.path());
    let out = oscicut(&["anneal", "--graph", &g, "--k", "3", "--boundaries", "100", "--runs", "4"], tmp.path());
    assert_eq!(out.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&out.stderr));
    let r: AnnealResult = json(&tmp.path().join("result.json"));
    assert_eq!(r.weight, 6.0);
    assert_eq!(r.oracle_max, Some(6.0));
    assert_eq!(r.oracle_min, Some(2.0));
    assert_eq!(r.s_w, Some(0.0));
    assert_eq!(r.runs.len(), 4);
    assert!(r.runs.iter().all(|run| run.xy_energy.is_some()));
}

#[test]
fn anneal_brute_on_edge_list() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("square.txt");
    fs::write(&p, "# n = 4\n0 1 1\n1 2 1\n2 3 1\n3 0 1\n").unwrap();
    let out = oscicut(&["anneal", "--graph", p.to_str().unwrap(), "--solver", "brute", "--k", "2"], tmp.path());
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let r: AnnealResult = json(&tmp.path().join("result.json"));
    assert_eq!(r.weight, 4.0);
}

#[test]
fn usage_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let g = house_file(tmp.path());
    for args in [
        vec!["anneal", "--graph", g.as_str(), "--k", "5"],
        vec!["anneal", "--graph", "/nonexistent/graph.json"],
        vec!["anneal", "--graph", g.as_str(), "--solver", "gpe"],
        vec!["anneal"],
        vec!["segment", "--image", g.as_str()],
        vec!["gpe", "--solver", "sl"],
        vec!["frobnicate"],
    ] {
        let out = oscicut(&args, tmp.path());
        assert_eq!(out.status.code(), Some(EXIT_INPUT), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn malformed_graph_is_an_input_error() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("bad.json");
    fs::write(&p, "{\"n\": 2, \"edges\": [[0, 5, 1.0]]}").unwrap();
    let out = oscicut(&["anneal", "--graph", p.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(EXIT_INPUT));
}

#[test]
fn flags_override_config() {
    let tmp = tempfile::tempdir().unwrap();
    let g = house_file(tmp.path());
    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, format!("{{\"graph\": {g:?}, \"solve\": {{\"k\": 2, \"runs\": 2}}}}")).unwrap();
    let out = oscicut(&["anneal", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let r: AnnealResult = json(&tmp.path().join("result.json"));
    assert_eq!((r.k, r.runs.len()), (2, 2));
    let out = oscicut(&["anneal", "--config", cfg.to_str().unwrap(), "--k", "3"], tmp.path());
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let r: AnnealResult = json(&tmp.path().join("result.json"));
    assert_eq!((r.k, r.weight), (3, 6.0));
}

#[test]
fn benchmark_outputs_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let out = oscicut(&["benchmark", "--sizes", "5,6", "--graphs", "6", "--seed", "1"], tmp.path());
    assert_eq!(out.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&out.stderr));
    let records = read_records_jsonl(&tmp.path().join("records.jsonl")).unwrap();
    assert_eq!(records.len(), 12);
    for r in &records {
        if r.converged {
            assert!((r.s_w - r.recomputed_error()).abs() < 1e-12);
            assert!(r.trivial || (0.0..=1.0).contains(&r.s_w), "{r:?}");
        }
    }
    let summary: BenchmarkSummary = json(&tmp.path().join("summary.json"));
    assert_eq!(summary.groups.len(), 2);
    let hist = fs::read_to_string(tmp.path().join("histogram_n6_k3_m100.csv")).unwrap();
    let total: usize = hist.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(total, summary.group(6, 3, 100).unwrap().converged);
    assert!(tmp.path().join("gap_curve_n6.csv").exists());
}

#[test]
fn kcut_compare_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = oscicut(
        &["benchmark", "--kcut-compare", "--n", "6", "--graphs", "5", "--boundaries", "1,10"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(tmp.path().join("kcut_table.csv")).unwrap();
    // header plus k = 2, 3, 4 at two boundary counts
    assert_eq!(csv.lines().count(), 7);
    let scatter = fs::read_to_string(tmp.path().join("scatter.csv")).unwrap();
    assert_eq!(scatter.lines().count(), 1 + 15);
    let v: serde_json::Value = json(&tmp.path().join("kcut_table.json"));
    assert!(v.is_object() || v.is_array());
}

#[test]
fn segment_three_blocks() {
    let tmp = tempfile::tempdir().unwrap();
    let img = tmp.path().join("blocks.ppm");
    three_block_image().write_ppm(&img).unwrap();
    let out = oscicut(
        &["segment", "--image", img.to_str().unwrap(), "--method", "4", "--m", "25", "--r", "4", "--q", "0.01", "--runs", "4"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&out.stderr));
    let labels: LabelsFile = json(&tmp.path().join("labels.json"));
    assert_eq!(labels.samples.len(), 25);
    let stripe = |x: usize| if x < 2 { 0 } else if x < 4 { 1 } else { 2 };
    let mut by_stripe = [None; 3];
    for s in &labels.samples {
        let e = by_stripe[stripe(s.x)].get_or_insert(s.label);
        assert_eq!(*e, s.label);
    }
    let used: std::collections::BTreeSet<_> = by_stripe.iter().flatten().collect();
    assert_eq!(used.len(), 3);
    let overlay = Image::read_ppm(&tmp.path().join("overlay.ppm")).unwrap();
    assert_eq!((overlay.width(), overlay.height()), (5, 5));
}

#[test]
fn cvm_matches_oracle() {
    let tmp = tempfile::tempdir().unwrap();
    for (name, layout) in [("two_via", two_via_layout()), ("random", random_layout(6, 10, 11))] {
        let p = tmp.path().join(format!("{name}.json"));
        fs::write(&p, serde_json::to_string(&layout).unwrap()).unwrap();
        let dir = tmp.path().join(name);
        let out = oscicut(&["cvm", "--circuit", p.to_str().unwrap(), "--runs", "4"], &dir);
        assert_eq!(out.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&out.stderr));
        let f: LayersFile = json(&dir.join("layers.json"));
        assert_eq!(Some(f.via_count), f.oracle_min_vias, "{name}");
        assert_eq!(f.via_count as f64, f.a as f64 - f.cut_weight);
    }
}

#[test]
fn gpe_small_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let layout = PumpLayout {
        centers: vec![[0.0, 0.0]],
        ring_radius: 2.5,
        ring_width: 1.0,
        length: 24.0,
        points: 32,
        ..Default::default()
    };
    let lp = tmp.path().join("layout.json");
    fs::write(&lp, serde_json::to_string(&layout).unwrap()).unwrap();
    let cfg = GpeConfig {
        sim: SimConfig {
            t_end: 20.0,
            window: 5.0,
            absorber_width: 3.0,
            ..Default::default()
        },
        p0: Some(3.0),
        runs: 2,
        ..Default::default()
    };
    let cp = tmp.path().join("gpe.json");
    fs::write(&cp, serde_json::to_string(&cfg).unwrap()).unwrap();
    let out = oscicut(&["gpe", "--layout", lp.to_str().unwrap(), "--config", cp.to_str().unwrap(), "--seed", "7"], tmp.path());
    assert_eq!(out.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&out.stderr));
    let f: PhasesFile = json(&tmp.path().join("phases.json"));
    assert_eq!(f.p0, 3.0);
    assert_eq!(f.runs.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![7, 8]);
    for r in &f.runs {
        let stem = format!("phasemap_seed{}", r.seed);
        assert!(fs::read(tmp.path().join(format!("{stem}.pgm"))).unwrap().starts_with(b"P5\n32 32\n255\n"));
        assert!(fs::read(tmp.path().join(format!("{stem}.ppm"))).unwrap().starts_with(b"P6\n32 32\n255\n"));
    }
}

#[test]
fn graph_json_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("g.json");
    let g = oscicut::graph::random_dense_graph(7, 2).unwrap();
    g.write_json(&p).unwrap();
    assert_eq!(WeightedGraph::read(&p).unwrap(), g);
}

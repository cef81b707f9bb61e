use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use homology_lab::complex::{parse_complex, write_complex};
use homology_lab_cli::run;
use serde_json::Value;
use tempfile::TempDir;

fn lab(args: &[&str]) -> (i32, Value, String) {
    let mut argv = vec!["homology-lab"];
    argv.extend_from_slice(args);
    let out = run(argv);
    let v = if out.stdout.is_empty() {
        Value::Null
    } else {
        serde_json::from_str(&out.stdout).expect("stdout is JSON")
    };
    (out.code, v, out.stderr)
}

fn ok(args: &[&str]) -> Value {
    let (code, v, err) = lab(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    v
}

struct Dir(TempDir);

impl Dir {
    fn new() -> Self {
        Dir(TempDir::new().unwrap())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }

    fn s(&self, name: &str) -> String {
        self.path(name).display().to_string()
    }

    fn write(&self, name: &str, text: &str) -> String {
        fs::write(self.path(name), text).unwrap();
        self.s(name)
    }

    fn gen(&self, kind: &str, name: &str) -> String {
        ok(&["gen", "--kind", kind, "--out", &self.s(name), "--seed", "0"]);
        self.s(name)
    }
}

#[test]
fn exact_betti_of_hollow_triangle() {
    let d = Dir::new();
    let h = d.gen("hollow_triangle", "h.jsonl");
    let v = ok(&["betti", "--input", &h, "--r", "1", "--mode", "exact", "--seed", "1"]);
    assert_eq!(v["betti"], 1);
    assert!((v["normalized"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(v["config"]["params"]["seed"], 1);
    assert_eq!(v["config"]["r"], 1);
}

#[test]
fn generated_circle_has_one_loop() {
    let d = Dir::new();
    let path = d.s("c4.jsonl");
    let g = ok(&["gen", "--kind", "circle", "--m", "4", "--out", &path, "--seed", "0"]);
    assert_eq!(g["counts"], serde_json::json!([4, 4]));
    let v = ok(&["betti", "--r", "1", "--mode", "exact", "--input", &path, "--seed", "0"]);
    assert_eq!(v["betti"], 1);
}

#[test]
fn empty_layer_exits_with_two() {
    let d = Dir::new();
    let h = d.gen("hollow_triangle", "h.jsonl");
    let (code, v, err) = lab(&["betti", "--r", "5", "--input", &h, "--seed", "0"]);
    assert_eq!(code, 2);
    assert!(v.is_null());
    let diag: Value = serde_json::from_str(err.lines().last().unwrap()).unwrap();
    assert_eq!(diag["error"], "EmptyLayer");
}

#[test]
fn bad_inputs_exit_with_two() {
    let d = Dir::new();
    let h = d.gen("hollow_triangle", "h.jsonl");
    let broken = d.write("broken.jsonl", "{\"n\": 3}\n{\"s\": [0, 1, 2]}\n");
    for args in [
        vec!["betti", "--input", &broken, "--r", "1", "--seed", "0"],
        vec!["betti", "--input", &h, "--r", "1", "--delta", "2", "--seed", "0"],
        vec![
            "betti",
            "--input",
            &h,
            "--r",
            "1",
            "--probe-kind",
            "gaussian",
            "--seed",
            "0",
        ],
        vec!["betti", "--input", "/nonexistent.jsonl", "--r", "0", "--seed", "0"],
        vec!["gen", "--kind", "circle", "--out", "/tmp/x.jsonl", "--seed", "0"],
    ] {
        let (code, _, err) = lab(&args);
        assert_eq!(code, 2, "{args:?}");
        assert!(serde_json::from_str::<Value>(err.lines().last().unwrap()).is_ok());
    }
}

#[test]
fn stochastic_betti_reports_oracle() {
    let d = Dir::new();
    let t = d.gen("torus", "t.jsonl");
    let v = ok(&[
        "betti",
        "--input",
        &t,
        "--r",
        "1",
        "--seed",
        "4",
        "--probe-kind",
        "hadamard",
    ]);
    assert_eq!(v["method"], "stochastic");
    assert_eq!(v["oracle"]["betti"], 2);
    assert_eq!(v["betti"], 2);
    assert_eq!(v["config"]["params"]["delta"], "oracle");
    assert!(v["stderr"].as_f64().unwrap() >= 0.0);
    let quiet = ok(&["betti", "--input", &t, "--r", "1", "--seed", "4", "--no-oracle"]);
    assert!(quiet.get("oracle").is_none());
    assert_eq!(quiet["config"]["params"]["delta"], "normalization");
}

#[test]
fn round_trip_is_byte_equal() {
    let d = Dir::new();
    for kind in [
        "point",
        "hollow_triangle",
        "filled_triangle",
        "tetrahedron_boundary",
        "torus",
        "sphere2",
        "figure_eight",
        "filled_square",
        "two_hollow_triangles",
    ] {
        let p = d.gen(kind, "k.jsonl");
        let text = fs::read_to_string(&p).unwrap();
        assert_eq!(write_complex(&parse_complex(&text, false).unwrap()), text, "{kind}");
    }
    let p = d.s("rips.jsonl");
    ok(&[
        "gen",
        "--kind",
        "random-vietoris-rips",
        "--n-points",
        "12",
        "--threshold",
        "0.5",
        "--out",
        &p,
        "--seed",
        "9",
    ]);
    let text = fs::read_to_string(&p).unwrap();
    assert_eq!(write_complex(&parse_complex(&text, false).unwrap()), text);
}

#[test]
fn identical_config_gives_identical_bytes_across_thread_counts() {
    let d = Dir::new();
    let t = d.gen("torus", "t.jsonl");
    let base = ["betti", "--input", &t, "--r", "1", "--seed", "11"];
    let runs: Vec<String> = ["1", "4", "4"]
        .iter()
        .map(|n| {
            let mut args = base.to_vec();
            args.extend(["--threads", n]);
            run(std::iter::once("homology-lab").chain(args)).stdout
        })
        .collect();
    assert!(!runs[0].is_empty());
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[1], runs[2]);
    assert!(!runs[0].contains("threads"));
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_homology-lab"))
}

#[test]
fn seed_falls_back_to_environment_then_to_a_printed_draw() {
    let d = Dir::new();
    let h = d.gen("hollow_triangle", "h.jsonl");
    let out = binary()
        .args(["betti", "--input", &h, "--r", "1"])
        .env("HOMOLOGY_LAB_SEED", "42")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["params"]["seed"], 42);
    assert!(out.stderr.is_empty());

    let out = binary()
        .args(["betti", "--input", &h, "--r", "1"])
        .env_remove("HOMOLOGY_LAB_SEED")
        .output()
        .unwrap();
    assert!(out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    let drawn: u64 = err.trim().strip_prefix("seed: ").unwrap().parse().unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["params"]["seed"], drawn);

    let out = binary()
        .args(["betti", "--input", &h, "--r", "1"])
        .env("HOMOLOGY_LAB_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn binary_exit_codes_match_run() {
    let d = Dir::new();
    let h = d.gen("hollow_triangle", "h.jsonl");
    let out = binary()
        .args(["betti", "--input", &h, "--r", "5", "--seed", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

fn sweep(d: &Dir, points: &str, thresholds: &str, r: &str) -> (Value, String) {
    let p = d.write("points.json", points);
    let csv = d.s("profile.csv");
    let v = ok(&[
        "betti",
        "--points",
        &p,
        "--thresholds",
        thresholds,
        "--r",
        r,
        "--mode",
        "exact",
        "--emit-plot-data",
        &csv,
        "--seed",
        "0",
    ]);
    (v, fs::read_to_string(&csv).unwrap())
}

#[test]
fn plot_data_for_two_points() {
    let d = Dir::new();
    let (v, csv) = sweep(&d, "[[0, 0], [1, 0]]", "0.5,1.5", "0");
    assert_eq!(csv, "threshold,r,betti,method\n0.5,0,2,exact\n1.5,0,1,exact\n");
    assert_eq!(v["profile"].as_array().unwrap().len(), 2);
}

#[test]
fn empty_sweep_is_header_only() {
    let d = Dir::new();
    let (v, csv) = sweep(&d, "[[0, 0], [1, 0]]", "", "0");
    assert_eq!(csv, "threshold,r,betti,method\n");
    assert_eq!(v["profile"], serde_json::json!([]));
}

#[test]
fn circle_cloud_loop_appears_and_fills() {
    let d = Dir::new();
    let pts: Vec<[f64; 2]> = (0..8)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / 8.0;
            [a.cos(), a.sin()]
        })
        .collect();
    let (_, csv) = sweep(&d, &serde_json::to_string(&pts).unwrap(), "0.5,1.0,2.1", "1");
    let betti: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(betti, ["0", "1", "0"]);
}

#[test]
fn unordered_thresholds_are_rejected() {
    let d = Dir::new();
    let p = d.write("points.json", "[[0, 0], [1, 0]]");
    let (code, _, _) = lab(&[
        "betti",
        "--points",
        &p,
        "--thresholds",
        "1.5,0.5",
        "--r",
        "0",
        "--seed",
        "0",
    ]);
    assert_eq!(code, 2);
}

fn filtration(d: &Dir) -> String {
    d.gen("hollow_triangle", "k1.jsonl");
    d.gen("filled_triangle", "k2.jsonl");
    d.write("f.json", "{\"k1\": \"k1.jsonl\", \"k2\": \"k2.jsonl\"}")
}

#[test]
fn persistent_betti_of_filling_the_triangle() {
    let d = Dir::new();
    let f = filtration(&d);
    let v = ok(&[
        "persistent-betti",
        "--filtration",
        &f,
        "--r",
        "1",
        "--mode",
        "exact",
        "--seed",
        "0",
    ]);
    assert_eq!(v["betti"], 0);
    assert_eq!(v["route_a"], 0);
    assert_eq!(v["route_b"], 0);
    assert_eq!(v["betti_k1"], 1);
    let v = ok(&[
        "persistent-betti",
        "--k1",
        &d.s("k1.jsonl"),
        "--k2",
        &d.s("k2.jsonl"),
        "--r",
        "1",
        "--seed",
        "3",
    ]);
    assert_eq!(v["oracle"]["betti"], 0);
    assert_eq!(v["betti"], 0);
    let (code, _, err) = lab(&[
        "persistent-betti",
        "--k1",
        &d.s("k2.jsonl"),
        "--k2",
        &d.s("k1.jsonl"),
        "--r",
        "1",
        "--seed",
        "0",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("NotASubcomplex"));
}

const LOOP: &str = "{\"r\": 1, \"coeffs\": [[1, 1, 1], [2, -1, 1], [3, 1, 1]]}";

#[test]
fn triviality_depends_on_the_filling() {
    let d = Dir::new();
    let h = d.gen("hollow_triangle", "h.jsonl");
    let t = d.gen("filled_triangle", "t.jsonl");
    let c = d.write("loop.json", LOOP);
    for mode in ["exact", "stochastic"] {
        let v = ok(&[
            "test-trivial",
            "--input",
            &h,
            "--chain",
            &c,
            "--mode",
            mode,
            "--seed",
            "2",
        ]);
        assert_eq!(v["answer"], false, "{mode}");
        assert_eq!(v["method"], mode);
        let v = ok(&[
            "test-trivial",
            "--input",
            &t,
            "--chain",
            &c,
            "--mode",
            mode,
            "--seed",
            "2",
        ]);
        assert_eq!(v["answer"], true, "{mode}");
    }
    let v = ok(&["test-trivial", "--input", &h, "--chain", &c, "--seed", "2"]);
    assert_eq!(v["oracle"]["answer"], false);
    let edge = d.write("edge.json", "{\"r\": 1, \"coeffs\": [[1, 1, 1]]}");
    let (code, _, err) = lab(&["test-trivial", "--input", &h, "--chain", &edge, "--seed", "0"]);
    assert_eq!(code, 2);
    assert!(err.contains("NotACycle"));
    let far = d.write("far.json", "{\"r\": 1, \"coeffs\": [[9, 1, 1]]}");
    let (code, _, err) = lab(&["test-trivial", "--input", &h, "--chain", &far, "--seed", "0"]);
    assert_eq!(code, 2);
    assert!(err.contains("IndexOutOfRange"));
}

#[test]
fn equivalence_by_homology_and_cohomology() {
    let d = Dir::new();
    let two = d.gen("two_hollow_triangles", "two.jsonl");
    let k = parse_complex(&fs::read_to_string(&two).unwrap(), false).unwrap();
    let cycles = homology_lab::homology::sample_cycles(&k, 1, 2, 1).unwrap();
    let f1 = d.write("c1.json", &chain_text(&cycles[0]));
    let f2 = d.write("c2.json", &chain_text(&cycles[1]));
    let exact = ok(&[
        "test-equiv",
        "--input",
        &two,
        "--chain",
        &f1,
        &f2,
        "--mode",
        "exact",
        "--seed",
        "0",
    ]);
    let witness = d.s("w.json");
    let coh = ok(&[
        "test-equiv",
        "--input",
        &two,
        "--chain",
        &f1,
        &f2,
        "--method",
        "cohomology",
        "--witnesses",
        "8",
        "--dump-witness",
        &witness,
        "--seed",
        "5",
    ]);
    assert_eq!(coh["answer"], exact["answer"]);
    assert_eq!(coh["oracle"]["answer"], exact["answer"]);
    let used = coh["witnesses"].as_u64().unwrap();
    assert!((1..=8).contains(&used));
    let w: Value = serde_json::from_str(&fs::read_to_string(&witness).unwrap()).unwrap();
    assert_eq!(w["values"].as_array().unwrap().len(), k.count(1));
    let same = ok(&[
        "test-equiv",
        "--input",
        &two,
        "--chain",
        &f1,
        &f1,
        "--method",
        "cohomology",
        "--seed",
        "5",
    ]);
    assert_eq!(same["answer"], true);
    assert_eq!(same["witnesses"], 8);
}

fn chain_text(c: &homology_lab::homology::Chain) -> String {
    homology_lab::complex::chain_file_to_string(&c.to_file().unwrap())
}

#[test]
fn detection_rejects_a_lone_edge_and_keeps_cycles() {
    let d = Dir::new();
    let h = d.gen("hollow_triangle", "h.jsonl");
    let c = d.write("loop.json", LOOP);
    let v = ok(&[
        "detect-cycle",
        "--input",
        &h,
        "--chain",
        &c,
        "--eta",
        "0.01",
        "--seed",
        "0",
    ]);
    assert_eq!(v["answer"], "likely_cycle");
    assert_eq!(v["p"], 0.0);
    assert_eq!(v["oracle"]["is_cycle"], true);
    let e = d.write("edge.json", "{\"r\": 1, \"coeffs\": [[1, 1, 1]]}");
    let v = ok(&[
        "detect-cycle",
        "--input",
        &h,
        "--chain",
        &e,
        "--eta",
        "0.01",
        "--seed",
        "0",
    ]);
    assert_eq!(v["answer"], "not_cycle");
    assert!((v["p"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-12);
    assert_eq!(v["trials"], 100);
}

#[test]
fn tracking_a_loop_that_gets_filled() {
    let d = Dir::new();
    let h = d.gen("hollow_triangle", "h.jsonl");
    let t = d.gen("filled_triangle", "t.jsonl");
    let c = d.write("loop.json", LOOP);
    let v = ok(&[
        "track", "--stage", &h, "--stage", &t, "--chain", &c, "--mode", "exact", "--seed", "0",
    ]);
    let flags: Vec<bool> = v["stages"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["trivial"].as_bool().unwrap())
        .collect();
    assert_eq!(flags, [false, true]);
    let (code, _, err) = lab(&["track", "--stage", &t, "--stage", &h, "--chain", &c, "--seed", "0"]);
    assert_eq!(code, 2);
    assert!(err.contains("NotAFiltrationChain"));
}

#[test]
fn betti_by_tracking_figure_eight() {
    let d = Dir::new();
    let f8 = d.gen("figure_eight", "f8.jsonl");
    let v = ok(&[
        "betti-track",
        "--input",
        &f8,
        "--r",
        "1",
        "--samples",
        "10",
        "--mode",
        "exact",
        "--seed",
        "1",
    ]);
    assert_eq!(v["betti"], 2);
    let v = ok(&[
        "betti-track",
        "--input",
        &f8,
        "--r",
        "1",
        "--samples",
        "10",
        "--seed",
        "1",
    ]);
    assert_eq!(v["oracle"]["betti"], 2);
    assert!(v["betti"].as_u64().unwrap() <= 2);
}

fn matrix_market_header(p: &Path) -> (String, Vec<usize>) {
    let text = fs::read_to_string(p).unwrap();
    let mut lines = text.lines();
    let banner = lines.next().unwrap().to_string();
    let dims = lines
        .next()
        .unwrap()
        .split_whitespace()
        .map(|x| x.parse().unwrap())
        .collect();
    (banner, dims)
}

#[test]
fn operators_dump_as_matrix_market() {
    let d = Dir::new();
    let h = d.gen("hollow_triangle", "h.jsonl");
    let out = d.path("d1.mtx");
    let v = ok(&[
        "dump-operator",
        "--input",
        &h,
        "--operator",
        "boundary",
        "--r",
        "1",
        "--out",
        &d.s("d1.mtx"),
        "--seed",
        "0",
    ]);
    assert_eq!((v["rows"].as_u64(), v["cols"].as_u64()), (Some(3), Some(3)));
    let (banner, dims) = matrix_market_header(&out);
    assert!(banner.starts_with("%%MatrixMarket matrix coordinate"));
    assert_eq!(dims, [3, 3, 6]);

    let f = filtration(&d);
    ok(&[
        "dump-operator",
        "--filtration",
        &f,
        "--operator",
        "persistent-laplacian",
        "--r",
        "1",
        "--out",
        &d.s("pl.mtx"),
        "--seed",
        "0",
    ]);
    assert_eq!(matrix_market_header(&d.path("pl.mtx")).1[..2], [3, 3]);

    ok(&[
        "betti",
        "--input",
        &h,
        "--r",
        "1",
        "--mode",
        "exact",
        "--dump-operator",
        &d.s("lap.mtx"),
        "--seed",
        "0",
    ]);
    assert_eq!(matrix_market_header(&d.path("lap.mtx")).1[..2], [3, 3]);
}

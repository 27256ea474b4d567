mod common;

use common::*;
use pctopo::bosh::{bosh_total_loss, BoshConfig, CompletionPair, IdentityMap};
use pctopo::degrade::{degrade, DegradeMode, DegradeSpec, Manifest, Viewpoint};
use pctopo::distance::{ChamferVariant, Reduction};
use pctopo::io::{load_pointcloud, parse_xyz, Format};
use pctopo::metrics::{aggregate_report, MetricsConfig};
use pctopo::ph::{parse_diagram_csv, write_diagram_csv, FiltrationConvention};
use pctopo::{Cloud, Point};

fn err_line(args: &[&str]) -> (i32, String) {
    let out = pctopo(args);
    (out.status.code().unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn ph_square_csv() {
    let dir = tempfile::tempdir().unwrap();
    let square = dir.path().join("square.xyz");
    std::fs::write(&square, SQUARE).unwrap();
    let csv = ok(&["ph", p(&square)]);
    assert_eq!(csv, "dim,birth,death\n0,0,1\n0,0,1\n0,0,1\n0,0,inf\n1,1,1.4142135623730951\n");
    assert_eq!(ok(&["ph", p(&square), "--dims", "1", "--convention", "radius"]), "dim,birth,death\n1,0.5,0.7071067811865476\n");
}

#[test]
fn ph_writes_svg_and_diagram_svg_matches() {
    let dir = tempfile::tempdir().unwrap();
    let square = dir.path().join("square.xyz");
    std::fs::write(&square, SQUARE).unwrap();
    let (csv, svg) = (dir.path().join("d.csv"), dir.path().join("d.svg"));
    ok(&["ph", p(&square), "-o", p(&csv), "--svg", p(&svg)]);
    let rendered = ok(&["diagram-svg", p(&csv), "--title", "square.xyz"]);
    assert_eq!(std::fs::read_to_string(&svg).unwrap(), rendered);
    assert!(rendered.starts_with("<svg") && rendered.contains("class=\"h1\""));
}

#[test]
fn degrade_is_byte_identical_and_regenerable() {
    let dir = tempfile::tempdir().unwrap();
    let gt = dir.path().join("gt.xyz");
    std::fs::write(&gt, scatter(300, 5)).unwrap();
    let run = |name: &str, mode: &str| {
        let out = dir.path().join(name);
        ok(&["degrade", p(&gt), "-o", p(&out), "--mode", mode, "-n", "120", "--seed", "42"]);
        let manifest = std::fs::read(dir.path().join(format!("{name}.manifest.json"))).unwrap();
        (std::fs::read(&out).unwrap(), manifest)
    };
    for mode in ["partial", "nonuniform", "uniform"] {
        let a = run(&format!("a_{mode}.xyz"), mode);
        let b = run(&format!("b_{mode}.xyz"), mode);
        assert_eq!(a, b, "{mode}");
        let manifest: Manifest<f64> = Manifest::from_json(std::str::from_utf8(&a.1).unwrap()).unwrap();
        let gt_cloud: Cloud = load_pointcloud(&gt, Format::Xyz).unwrap();
        let again = pctopo::degrade::regenerate(&gt_cloud, &manifest).unwrap();
        assert_eq!(again, parse_xyz(std::str::from_utf8(&a.0).unwrap()).unwrap());
        assert_eq!(manifest.spec.seed, 42);
    }
}

#[test]
fn degrade_matches_library_with_explicit_viewpoint() {
    let dir = tempfile::tempdir().unwrap();
    let gt = dir.path().join("gt.xyz");
    std::fs::write(&gt, scatter(100, 8)).unwrap();
    let out = dir.path().join("o.xyz");
    ok(&["degrade", p(&gt), "-o", p(&out), "--mode", "partial", "-n", "30", "--viewpoint", "-1,2,0.5", "--seed", "1"]);
    let cloud: Cloud = load_pointcloud(&gt, Format::Xyz).unwrap();
    let spec = DegradeSpec {
        mode: DegradeMode::Partial,
        n: 30,
        viewpoint: Some(Viewpoint { position: Point::new(-1.0, 2.0, 0.5) }),
        weighting: None,
        seed: 1,
    };
    let want = degrade(&cloud, &spec).unwrap();
    assert_eq!(load_pointcloud::<f64>(&out, Format::Xyz).unwrap(), want);
}

#[test]
fn degrade_without_seed_records_one() {
    let dir = tempfile::tempdir().unwrap();
    let gt = dir.path().join("gt.xyz");
    std::fs::write(&gt, scatter(50, 2)).unwrap();
    let out = dir.path().join("o.xyz");
    let res = pctopo(&["degrade", p(&gt), "-o", p(&out), "--mode", "uniform", "-n", "10"]);
    assert!(res.status.success());
    let stderr = String::from_utf8(res.stderr).unwrap();
    let seed: u64 = stderr.trim().strip_prefix("seed: ").unwrap().parse().unwrap();
    let manifest: Manifest<f64> =
        Manifest::from_json(&std::fs::read_to_string(dir.path().join("o.xyz.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest.spec.seed, seed);
}

#[test]
fn metrics_single_cloud_equals_library() {
    let dir = tempfile::tempdir().unwrap();
    let class = dir.path().join("root").join("only");
    std::fs::create_dir_all(&class).unwrap();
    std::fs::write(class.join("c.xyz"), scatter(80, 3)).unwrap();
    let csv = dir.path().join("r.csv");
    ok(&["metrics", p(&dir.path().join("root")), "--csv", p(&csv)]);
    let cloud: Cloud = load_pointcloud(class.join("c.xyz"), Format::Xyz).unwrap();
    let lib = aggregate_report(&[("only".to_string(), vec![cloud])], &MetricsConfig::default()).unwrap();
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), lib.to_csv());
}

#[test]
fn metrics_text_to_stdout_by_default() {
    let dir = tempfile::tempdir().unwrap();
    let classes = three_class_corpus(dir.path());
    let text = ok(&["metrics", p(dir.path()), "--label", "Synth", "--ph1-budget", "16"]);
    assert!(text.contains("# ph1_budget: 16"));
    assert!(text.contains("# ph1_points_max: 16"));
    for c in classes {
        assert!(text.contains(c));
    }
}

#[test]
fn budget_env_var_sets_default() {
    let dir = tempfile::tempdir().unwrap();
    let cloud = dir.path().join("c.xyz");
    std::fs::write(&cloud, scatter(60, 4)).unwrap();
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_pctopo"))
        .args(["ph", p(&cloud)])
        .env("PCTOPO_MAX_SIMPLICES", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error: size_guard: "), "{err}");
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn errors_are_single_machine_readable_lines() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.xyz");
    let (code, err) = err_line(&["ph", p(&missing)]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error: io: ") && err.lines().count() == 1, "{err}");

    let bad = dir.path().join("bad.xyz");
    std::fs::write(&bad, "0 0 0\n1 nan 0\n").unwrap();
    let (_, err) = err_line(&["convert", p(&bad), p(&dir.path().join("o.xyz"))]);
    assert!(err.starts_with("error: non_finite: "), "{err}");
    assert!(!dir.path().join("o.xyz").exists());

    let (code, err) = err_line(&["ph", p(&bad), "--no-such-flag"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error: usage: ") && err.lines().count() == 1, "{err}");

    let (code, err) = err_line(&["ph", p(&missing), "--convention", "sideways"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error: usage: "), "{err}");
}

#[test]
fn skeletonize_writes_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.xyz");
    std::fs::write(&input, scatter(20, 9)).unwrap();
    let out = dir.path().join("traj");
    ok(&["skeletonize", p(&input), "--out-dir", p(&out), "--iterations", "50", "--snapshot-every", "25"]);
    let mut names: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["log.csv", "snapshot_000000.xyz", "snapshot_000025.xyz", "snapshot_000050.xyz"]);
    let log = std::fs::read_to_string(out.join("log.csv")).unwrap();
    assert_eq!(log.lines().count(), 52);
}

#[test]
fn bosh_identity_and_external_net_agree() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.xyz"), "0 0 0\n2 0 0\n").unwrap();
    std::fs::write(dir.path().join("p.xyz"), "0 0 0\n").unwrap();
    let pairs = dir.path().join("pairs.csv");
    std::fs::write(&pairs, "complete,partial\nc.xyz,p.xyz\n").unwrap();
    let identity = ok(&["bosh", p(&pairs), "--sizes", "1"]);
    assert_eq!(identity, "pair,term,value\n0,backbone0,4\n0,partial,4\ntotal,,8\n");
    assert_eq!(ok(&["bosh", p(&pairs), "--sizes", "1", "--net-cmd", "cat"]), identity);

    let (code, err) = err_line(&["bosh", p(&pairs), "--sizes", "1", "--net-cmd", "exit 3"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error: net: "), "{err}");
    let (_, err) = err_line(&["bosh", p(&pairs), "--sampler", "uniform"]);
    assert!(err.starts_with("error: invalid_argument: "), "{err}");
}

#[test]
fn bosh_matches_library_on_halving_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let mut lines = String::from("complete,partial\n");
    let mut lib_pairs: Vec<CompletionPair<f64>> = Vec::new();
    for i in 0..3 {
        let (c, pt) = (scatter(64, i), scatter(20, 100 + i));
        std::fs::write(dir.path().join(format!("c{i}.xyz")), &c).unwrap();
        std::fs::write(dir.path().join(format!("p{i}.xyz")), &pt).unwrap();
        lines.push_str(&format!("c{i}.xyz,p{i}.xyz\n"));
        lib_pairs.push(CompletionPair::new(parse_xyz(&c).unwrap(), parse_xyz(&pt).unwrap()).unwrap());
    }
    let pairs = dir.path().join("pairs.csv");
    std::fs::write(&pairs, lines).unwrap();
    let cli = ok(&["bosh", p(&pairs), "--backbones", "3", "--metric", "l1", "--reduction", "mean"]);
    let lib = bosh_total_loss(&lib_pairs, &IdentityMap, &BoshConfig::halving(3), ChamferVariant::L1, Reduction::Mean).unwrap();
    assert_eq!(cli, lib.to_csv());
}

#[test]
fn diagram_csv_round_trips_through_parser() {
    let dir = tempfile::tempdir().unwrap();
    let cloud = dir.path().join("c.xyz");
    std::fs::write(&cloud, scatter(30, 6)).unwrap();
    let csv = ok(&["ph", p(&cloud)]);
    let parsed = parse_diagram_csv::<f64>(&csv, FiltrationConvention::Diameter).unwrap();
    assert_eq!(write_diagram_csv(&parsed), csv);
}

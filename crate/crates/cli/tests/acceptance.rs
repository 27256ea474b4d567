//! Command-line contract. Run with
//! `cargo test -p pctopo-cli --test acceptance -- --nocapture`.

mod common;

use common::*;
use pctopo::io::{parse_xyz, to_xyz_string};
use pctopo::Cloud;

fn report(id: &str, title: &str, pass: bool, detail: impl std::fmt::Display) -> bool {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {id:>2} [{verdict}] {title}: {detail}");
    pass
}

#[test]
fn criterion_11_cli_contract() {
    let dir = tempfile::tempdir().unwrap();

    let original: Cloud = parse_xyz(&scatter(200, 11)).unwrap();
    let xyz = dir.path().join("a.xyz");
    std::fs::write(&xyz, to_xyz_string(&original)).unwrap();
    let (ply, back) = (dir.path().join("a.ply"), dir.path().join("b.xyz"));
    ok(&["convert", p(&xyz), p(&ply)]);
    ok(&["convert", p(&ply), p(&back)]);
    let round_trip = std::fs::read(&xyz).unwrap() == std::fs::read(&back).unwrap()
        && parse_xyz::<f64>(&std::fs::read_to_string(&back).unwrap()).unwrap() == original;

    let square = dir.path().join("square.xyz");
    std::fs::write(&square, SQUARE).unwrap();
    let csv = ok(&["ph", p(&square)]);
    let has_row = csv.lines().any(|l| l == "1,1,1.4142135623730951");

    let root = dir.path().join("corpus");
    let classes = three_class_corpus(&root);
    let report_csv = dir.path().join("report.csv");
    let report_txt = dir.path().join("report.txt");
    ok(&["metrics", p(&root), "--label", "Synthetic", "--csv", p(&report_csv), "--text", p(&report_txt)]);
    let text = std::fs::read_to_string(&report_txt).unwrap();
    let rows: Vec<Vec<String>> = std::fs::read_to_string(&report_csv)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    let names: Vec<&str> = rows.iter().skip(1).map(|r| r[0].as_str()).collect();
    let csv_layout = rows[0] == ["class", "noise", "non_uniformity", "h0_mean", "h1_mean"]
        && names == [classes.as_slice(), &["Mean"]].concat();
    let mean_consistent = (1..5).all(|col| {
        let vals: Vec<f64> = rows[1..4].iter().map(|r| r[col].parse().unwrap()).collect();
        let mean: f64 = rows[4][col].parse().unwrap();
        (vals.iter().sum::<f64>() / 3.0 - mean).abs() <= 1e-12 * mean.abs().max(1.0)
    });
    let table: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    let cells = |l: &str| l.split('|').map(|c| c.trim().to_string()).collect::<Vec<_>>();
    let header = cells(table[1]);
    let mut expected_header = vec!["dataset".to_string()];
    for _ in 0..3 {
        expected_header.extend(classes.iter().map(|c| c.to_string()));
        expected_header.push("Mean".into());
    }
    let groups: Vec<String> = cells(table[0]).into_iter().filter(|c| !c.is_empty()).collect();
    let text_layout = table.len() == 3
        && header == expected_header
        && groups == ["Noise", "Non-Uniformity", "PH-based (H0; H1)"]
        && cells(table[2])[0] == "Synthetic"
        && text.contains("# plane_k: 10");

    let pass = round_trip && has_row && csv_layout && mean_consistent && text_layout;
    let detail = format!(
        "round-trip lossless {round_trip}, square row present {has_row}, csv layout {csv_layout}, mean row consistent {mean_consistent}, table layout {text_layout}"
    );
    assert!(report("11", "CLI contract", pass, detail));
}

#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub fn pctopo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pctopo")).args(args).output().expect("binary runs")
}

pub fn ok(args: &[&str]) -> String {
    let out = pctopo(args);
    assert!(out.status.success(), "pctopo {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

pub const SQUARE: &str = "0 0 0\n1 0 0\n1 1 0\n0 1 0\n";

/// Deterministic pseudo-random points from an LCG, so the fixture needs no RNG
/// crate.
pub fn scatter(n: usize, seed: u64) -> String {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    (0..n).map(|_| format!("{} {} {}\n", next(), next(), next())).collect()
}

/// ROOT/<class>/cloud_<i>.xyz for three classes of two clouds each.
pub fn three_class_corpus(root: &Path) -> Vec<&'static str> {
    let classes = vec!["airplane", "car", "chair"];
    for (c, name) in classes.iter().enumerate() {
        let dir = root.join(name);
        std::fs::create_dir_all(&dir).unwrap();
        for i in 0..2 {
            std::fs::write(dir.join(format!("cloud_{i}.xyz")), scatter(40 + 10 * c, (c * 10 + i) as u64)).unwrap();
        }
    }
    classes
}

#![allow(dead_code)]

use pctopo::Cloud;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit_cube(rng: &mut ChaCha8Rng, n: usize) -> Cloud {
    let pts: Vec<[f64; 3]> = (0..n).map(|_| [rng.random(), rng.random(), rng.random()]).collect();
    Cloud::from_arrays(&pts).unwrap()
}

pub fn gaussian_blob(rng: &mut ChaCha8Rng, n: usize, center: [f64; 3], sigma: f64) -> Vec<[f64; 3]> {
    let nd = Normal::new(0.0, sigma).unwrap();
    (0..n)
        .map(|_| {
            [
                center[0] + nd.sample(rng),
                center[1] + nd.sample(rng),
                center[2] + nd.sample(rng),
            ]
        })
        .collect()
}

pub fn standard_normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<[f64; 3]> {
    (0..n)
        .map(|_| [StandardNormal.sample(rng), StandardNormal.sample(rng), StandardNormal.sample(rng)])
        .collect()
}

/// `side × side` grid with unit spacing in the z = 0 plane.
pub fn planar_grid(side: usize) -> Vec<[f64; 3]> {
    (0..side * side).map(|i| [(i % side) as f64, (i / side) as f64, 0.0]).collect()
}

pub fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

pub fn arrays(pc: &Cloud) -> Vec<[f64; 3]> {
    pc.iter().map(|p| p.to_array()).collect()
}

/// Dimension-0 pairs by Kruskal over every sorted edge, with a plain
/// union-find. Returns sorted `(birth, death)`; the essential class has an
/// infinite death.
pub fn kruskal_ph0(pts: &[[f64; 3]]) -> Vec<(f64, f64)> {
    let n = pts.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((dist(pts[i], pts[j]), i, j));
        }
    }
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut out = vec![(0.0, f64::INFINITY)];
    for (w, i, j) in edges {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a] = b;
            out.push((0.0, w));
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

pub fn brute_nearest(from: &[[f64; 3]], to: &[[f64; 3]]) -> Vec<f64> {
    from.iter()
        .map(|&a| to.iter().map(|&b| dist(a, b)).fold(f64::INFINITY, f64::min))
        .collect()
}

/// Chamfer by double loop: `(L1 sum, L2 sum)` where L1 sums distances and L2
/// sums squared distances, both directions.
pub fn brute_chamfer(x: &[[f64; 3]], y: &[[f64; 3]]) -> (f64, f64) {
    let f = brute_nearest(x, y);
    let b = brute_nearest(y, x);
    let l1 = f.iter().sum::<f64>() + b.iter().sum::<f64>();
    let l2 = f.iter().map(|d| d * d).sum::<f64>() + b.iter().map(|d| d * d).sum::<f64>();
    (l1, l2)
}

pub fn brute_hausdorff(x: &[[f64; 3]], y: &[[f64; 3]]) -> (f64, f64) {
    let f = brute_nearest(x, y).into_iter().fold(0.0, f64::max);
    let b = brute_nearest(y, x).into_iter().fold(0.0, f64::max);
    (f, (f + b) / 2.0)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Prints the criterion line and returns whether it passed.
pub fn report(id: &str, title: &str, pass: bool, detail: impl std::fmt::Display) -> bool {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {id:>2} [{verdict}] {title}: {detail}");
    pass
}

/// Dimension-1 pairs with positive persistence from a dense Z/2 reduction of
/// the full boundary matrix of the Rips complex up to triangles. Filtration
/// order: value, then dimension, then vertex tuple.
pub fn naive_ph1(pts: &[[f64; 3]]) -> Vec<(f64, f64)> {
    let n = pts.len();
    let mut simplices: Vec<(f64, usize, Vec<usize>)> = (0..n).map(|v| (0.0, 0, vec![v])).collect();
    for i in 0..n {
        for j in i + 1..n {
            simplices.push((dist(pts[i], pts[j]), 1, vec![i, j]));
            for k in j + 1..n {
                let v = dist(pts[i], pts[j]).max(dist(pts[i], pts[k])).max(dist(pts[j], pts[k]));
                simplices.push((v, 2, vec![i, j, k]));
            }
        }
    }
    simplices.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let position: std::collections::HashMap<Vec<usize>, usize> =
        simplices.iter().enumerate().map(|(i, s)| (s.2.clone(), i)).collect();
    let m = simplices.len();
    let mut columns: Vec<Vec<bool>> = simplices
        .iter()
        .map(|(_, d, v)| {
            let mut col = vec![false; m];
            if *d > 0 {
                for skip in 0..v.len() {
                    let face: Vec<usize> = v.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &x)| x).collect();
                    col[position[&face]] = true;
                }
            }
            col
        })
        .collect();
    let low = |c: &Vec<bool>| c.iter().rposition(|&b| b);
    let mut owner: Vec<Option<usize>> = vec![None; m];
    let mut out = Vec::new();
    for j in 0..m {
        while let Some(l) = low(&columns[j]) {
            match owner[l] {
                Some(k) => {
                    let other = columns[k].clone();
                    for (a, b) in columns[j].iter_mut().zip(other) {
                        *a ^= b;
                    }
                }
                None => {
                    owner[l] = Some(j);
                    if simplices[l].1 == 1 && simplices[j].0 > simplices[l].0 {
                        out.push((simplices[l].0, simplices[j].0));
                    }
                    break;
                }
            }
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

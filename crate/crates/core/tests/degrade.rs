mod common;

use common::*;
use pctopo::degrade::{
    degrade, make_pairs, random_viewpoint, regenerate, uniform_sample, viewpoint_partial, DegradeMode,
    DegradeSpec, Manifest, Viewpoint, Weighting,
};
use pctopo::metrics::non_uniformity;
use pctopo::{Cloud, Point};

fn key(p: &Point) -> [u64; 3] {
    [p.x.to_bits(), p.y.to_bits(), p.z.to_bits()]
}

#[test]
fn viewpoint_directions_cover_octants_evenly() {
    let pc = unit_cube(&mut rng(20), 50);
    let c = pc.centroid().unwrap();
    let mut counts = [0f64; 8];
    let trials = 8000;
    for seed in 0..trials {
        let v = random_viewpoint(&pc, seed, 1.5).unwrap().position - c;
        let octant = (v.x > 0.0) as usize | ((v.y > 0.0) as usize) << 1 | ((v.z > 0.0) as usize) << 2;
        counts[octant] += 1.0;
    }
    let expected = trials as f64 / 8.0;
    let chi2: f64 = counts.iter().map(|o| (o - expected).powi(2) / expected).sum();
    // 0.99 quantile of chi-squared with 7 degrees of freedom.
    assert!(chi2 < 18.475, "chi2 = {chi2}, counts {counts:?}");
}

#[test]
fn viewpoint_distance_scales_with_radius_factor() {
    let pc = unit_cube(&mut rng(21), 40);
    let (lo, hi) = pc.bounding_box().unwrap();
    let half = hi.dist(&lo) / 2.0;
    for seed in 0..20 {
        let v = random_viewpoint(&pc, seed, 2.0).unwrap();
        let d = v.position.dist(&pc.centroid().unwrap());
        assert!(rel_err(d, 2.0 * half) < 1e-12);
    }
}

#[test]
fn partial_keeps_the_closest_points() {
    let pc = unit_cube(&mut rng(22), 100);
    let vp = Viewpoint { position: Point::new(2.0, 2.0, 2.0) };
    let kept = viewpoint_partial(&pc, &vp, 30).unwrap();
    assert_eq!(kept.len(), 70);
    let kept_keys: std::collections::HashSet<_> = kept.iter().map(key).collect();
    let farthest_kept = kept.iter().map(|p| p.dist(&vp.position)).fold(0.0, f64::max);
    for p in pc.iter().filter(|p| !kept_keys.contains(&key(p))) {
        assert!(p.dist(&vp.position) >= farthest_kept);
    }
    let single = viewpoint_partial(&pc, &vp, 99).unwrap();
    let closest = pc.iter().min_by(|a, b| a.dist(&vp.position).partial_cmp(&b.dist(&vp.position)).unwrap()).unwrap();
    assert_eq!(single.points(), &[*closest]);
}

#[test]
fn inverse_weighting_concentrates_near_viewpoint() {
    let pc = Cloud::from_arrays(&planar_grid(20)).unwrap();
    let vp = Viewpoint { position: Point::new(-1.0, -1.0, 0.0) };
    let spec = |w, seed| DegradeSpec { mode: DegradeMode::Nonuniform, n: 100, viewpoint: Some(vp), weighting: Some(w), seed };
    let mean_dist = |c: &Cloud| c.iter().map(|p| p.dist(&vp.position)).sum::<f64>() / c.len() as f64;
    let near = mean_dist(&degrade(&pc, &spec(Weighting::Inverse, 3)).unwrap());
    let far = mean_dist(&degrade(&pc, &spec(Weighting::Proportional, 3)).unwrap());
    let flat = mean_dist(&uniform_sample(&pc, 100, 3).unwrap());
    assert!(near < flat && flat < far, "{near} {flat} {far}");
    assert!(non_uniformity(&degrade(&pc, &spec(Weighting::Inverse, 3)).unwrap()).unwrap() > 0.0);
}

#[test]
fn manifest_regenerates_output() {
    let gt = unit_cube(&mut rng(23), 200);
    let specs = vec![
        DegradeSpec { mode: DegradeMode::Uniform, n: 50, viewpoint: None, weighting: None, seed: 9 },
        DegradeSpec {
            mode: DegradeMode::Nonuniform,
            n: 80,
            viewpoint: Some(random_viewpoint(&gt, 9, 1.5).unwrap()),
            weighting: Some(Weighting::Proportional),
            seed: 9,
        },
    ];
    for pair in make_pairs(&gt, Some("gt.xyz"), &specs).unwrap() {
        let parsed: Manifest<f64> = Manifest::from_json(&pair.manifest.to_json()).unwrap();
        assert_eq!(parsed, pair.manifest);
        assert_eq!(regenerate(&gt, &parsed).unwrap(), pair.degraded);
    }
    let other = unit_cube(&mut rng(24), 200);
    let manifest = &make_pairs(&gt, None, &specs[..1]).unwrap()[0].manifest;
    assert!(regenerate(&other, manifest).is_err());
}

#[test]
fn different_seeds_differ() {
    let gt = unit_cube(&mut rng(25), 200);
    assert_ne!(uniform_sample(&gt, 50, 1).unwrap(), uniform_sample(&gt, 50, 2).unwrap());
}

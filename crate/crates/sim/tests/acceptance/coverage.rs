//! Clustering against exhaustive search, tessellation membership and area.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use hts_core::coverage::{cluster_users, tessellate, Cluster, ClusterSet, CoverageUser};
use hts_core::rng::{derive_stream, uniform, Purpose};
use hts_core::scenario::ClusterMethod;
use hts_core::RngStream;

use crate::{Checks, Outcome};

type V = [f64; 3];

const POLYGON: [[f64; 2]; 4] = [[43.0, 3.0], [43.0, 11.0], [51.0, 11.0], [51.0, 3.0]];

fn unit(lat: f64, lon: f64) -> V {
    let (la, lo) = (lat.to_radians(), lon.to_radians());
    [la.cos() * lo.cos(), la.cos() * lo.sin(), la.sin()]
}

fn dot(a: V, b: V) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: V, b: V) -> V {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn great_circle(a: V, b: V) -> f64 {
    cross(a, b).iter().map(|x| x * x).sum::<f64>().sqrt().atan2(dot(a, b))
}

/// Minimum weighted within-cluster squared distance over all 2-partitions
/// whose demand ratio respects the tolerance.
fn exhaustive_two_partition(points: &[V], w: &[f64], tolerance: f64) -> Option<BTreeSet<BTreeSet<usize>>> {
    let n = points.len();
    let mut best: Option<(f64, u32)> = None;
    // user 0 always sits in the first group
    for mask in 0..(1u32 << (n - 1)) {
        let in_b = |i: usize| i > 0 && mask & (1 << (i - 1)) != 0;
        let count_b = (0..n).filter(|&i| in_b(i)).count();
        if count_b == 0 {
            continue;
        }
        let mut cost = 0.0;
        let mut demand = [0.0; 2];
        for side in [false, true] {
            let members: Vec<usize> = (0..n).filter(|&i| in_b(i) == side).collect();
            let total: f64 = members.iter().map(|&i| w[i]).sum();
            demand[side as usize] = total;
            let mut mean = [0.0; 3];
            for &i in &members {
                for d in 0..3 {
                    mean[d] += w[i] * points[i][d] / total;
                }
            }
            for &i in &members {
                let diff: f64 = (0..3).map(|d| (points[i][d] - mean[d]).powi(2)).sum();
                cost += w[i] * diff;
            }
        }
        if demand[0].max(demand[1]) / demand[0].min(demand[1]) > tolerance {
            continue;
        }
        if best.is_none_or(|(c, _)| cost < c) {
            best = Some((cost, mask));
        }
    }
    let (_, mask) = best?;
    let a: BTreeSet<usize> = (0..n).filter(|&i| i == 0 || mask & (1 << (i - 1)) == 0).collect();
    let b: BTreeSet<usize> = (0..n).filter(|&i| !a.contains(&i)).collect();
    Some([a, b].into_iter().collect())
}

fn two_groups(rng: &mut RngStream, n: usize) -> Vec<CoverageUser> {
    let centers = [[45.0, 5.0], [49.0, 9.0]];
    (0..n)
        .map(|i| {
            let c = centers[i % 2];
            CoverageUser {
                id: format!("u{i:02}"),
                lat_deg: c[0] + 0.6 * (uniform(rng) - 0.5),
                lon_deg: c[1] + 0.6 * (uniform(rng) - 0.5),
                demand_bps: 1e8 * (1.0 + 0.2 * uniform(rng)),
            }
        })
        .collect()
}

fn clustering(checks: &mut Checks) -> usize {
    let mut instances = 0;
    for n in [4usize, 6, 8, 10, 12] {
        for seed in 0..3u64 {
            let mut rng = derive_stream(600 + n as u64, Purpose::User, seed);
            let users = two_groups(&mut rng, n);
            let points: Vec<V> = users.iter().map(|u| unit(u.lat_deg, u.lon_deg)).collect();
            let w: Vec<f64> = users.iter().map(|u| u.demand_bps).collect();
            let Some(want) = exhaustive_two_partition(&points, &w, 1.25) else {
                checks.check(false, || format!("N={n} #{seed}: no feasible partition"));
                continue;
            };
            for method in [ClusterMethod::KMeans, ClusterMethod::KMedoids] {
                let mut crng = derive_stream(seed, Purpose::Clustering, 0);
                let got = match cluster_users(&users, 2, method, 1.25, &mut crng) {
                    Ok(cs) => cs,
                    Err(e) => {
                        checks.check(false, || format!("N={n} #{seed} {method:?}: {e}"));
                        continue;
                    }
                };
                let parts: BTreeSet<BTreeSet<usize>> = got.clusters.iter().map(|c| c.members.iter().copied().collect()).collect();
                checks.check(parts == want, || format!("N={n} #{seed} {method:?}: {parts:?} vs exhaustive {want:?}"));
                instances += 1;
            }
        }
    }
    instances
}

fn inside_polygon(p: V, poly: &[V]) -> Option<bool> {
    let n = poly.len();
    let signs: Vec<f64> = (0..n).map(|i| dot(cross(poly[i], poly[(i + 1) % n]), p)).collect();
    if signs.iter().any(|s| s.abs() < 1e-12) {
        return None;
    }
    Some(signs.iter().all(|s| *s > 0.0) || signs.iter().all(|s| *s < 0.0))
}

/// Girard: area = sum of interior angles - (n - 2) pi.
fn girard_area(poly: &[V]) -> f64 {
    let n = poly.len();
    let tangent = |at: V, to: V| {
        let d = dot(at, to);
        let t = [to[0] - d * at[0], to[1] - d * at[1], to[2] - d * at[2]];
        let l = dot(t, t).sqrt();
        [t[0] / l, t[1] / l, t[2] / l]
    };
    let angles: f64 = (0..n)
        .map(|i| {
            let v = poly[i];
            let a = tangent(v, poly[(i + n - 1) % n]);
            let b = tangent(v, poly[(i + 1) % n]);
            dot(a, b).clamp(-1.0, 1.0).acos()
        })
        .sum();
    angles - (n as f64 - 2.0) * PI
}

fn tessellation(checks: &mut Checks) -> (usize, f64) {
    let poly: Vec<V> = POLYGON.iter().map(|p| unit(p[0], p[1])).collect();
    let area = girard_area(&poly);
    let mut sampled = 0;
    let mut worst_area: f64 = 0.0;
    for inst in 0..3u64 {
        let mut rng = derive_stream(650, Purpose::User, inst);
        let clusters: Vec<Cluster> = (0..10)
            .map(|i| Cluster {
                members: vec![i],
                member_ids: vec![format!("c{i}")],
                centroid_deg: [43.5 + 7.0 * uniform(&mut rng), 3.5 + 7.0 * uniform(&mut rng)],
                demand_bps: 1.0,
            })
            .collect();
        let set = ClusterSet { clusters };
        let t = match tessellate(&set, &POLYGON) {
            Ok(t) => t,
            Err(e) => {
                checks.check(false, || format!("instance {inst}: {e}"));
                continue;
            }
        };
        let sites: Vec<V> = t.sites_deg.iter().map(|s| unit(s[0], s[1])).collect();
        let mut inst_samples = 0;
        while inst_samples < 10_000 {
            let (lat, lon) = (42.5 + 9.0 * uniform(&mut rng), 2.5 + 9.0 * uniform(&mut rng));
            let p = unit(lat, lon);
            let Some(inside) = inside_polygon(p, &poly) else { continue };
            let located = t.locate(lat, lon);
            if !inside {
                checks.check(located.is_none(), || format!("instance {inst}: ({lat}, {lon}) outside the polygon located in cell {located:?}"));
                continue;
            }
            let mut d: Vec<(f64, usize)> = sites.iter().enumerate().map(|(i, s)| (great_circle(p, *s), i)).collect();
            d.sort_by(|a, b| a.0.total_cmp(&b.0));
            if d[1].0 - d[0].0 < 1e-9 {
                continue;
            }
            inst_samples += 1;
            let want = d[0].1;
            checks.check(located == Some(want), || format!("instance {inst}: ({lat}, {lon}) in cell {located:?}, nearest centroid {want}"));
        }
        sampled += inst_samples;
        let covered = t.covered_area_sr();
        let rel = (covered - area).abs() / area;
        worst_area = worst_area.max(rel);
        checks.check(rel <= 1e-6, || format!("instance {inst}: cell areas sum to {covered} sr, polygon {area} sr"));
        let rel_cov = (t.coverage_area_sr - area).abs() / area;
        checks.check(rel_cov <= 1e-6, || format!("instance {inst}: coverage area {} sr vs {area} sr", t.coverage_area_sr));
    }
    (sampled, worst_area)
}

pub fn run() -> Outcome {
    let mut checks = Checks::default();
    let instances = clustering(&mut checks);
    let (sampled, worst_area) = tessellation(&mut checks);
    checks.finish(|_| format!("{instances} exhaustive clustering matches, {sampled} membership samples, worst area error {worst_area:.1e}"))
}

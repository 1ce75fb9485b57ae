//! Traffic-aware footprint design: balanced user clustering, spherical
//! Voronoi tessellation of the coverage area, beam assignment and per-user
//! antenna gains.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{beam_gain, db_to_linear};
use crate::error::{Error, Result};
use crate::geometry::{add, angle_between, cross, dot, lat_lon_from_vec, normalize, scale, sub, surface_point, unit_from_lat_lon, Vec3};
use crate::rng::uniform;
use crate::scenario::{CatalogBeam, ClusterMethod};

/// Iteration cap for Lloyd, PAM swaps and the balancing post-pass.
pub const MAX_ITERATIONS: usize = 1000;

const KMEANS_RESTARTS: usize = 8;

/// Offset applied to coincident centroids before tessellating, degrees.
pub const DUPLICATE_PERTURBATION_DEG: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageUser {
    pub id: String,
    pub lat_deg: f64,
    pub lon_deg: f64,
    pub demand_bps: f64,
}

impl CoverageUser {
    fn unit(&self) -> Vec3 {
        unit_from_lat_lon(self.lat_deg.to_radians(), self.lon_deg.to_radians())
    }
}

fn to_deg(v: Vec3) -> [f64; 2] {
    let (lat, lon) = lat_lon_from_vec(v);
    [lat.to_degrees(), lon.to_degrees()]
}

fn unit_deg(p: [f64; 2]) -> Vec3 {
    unit_from_lat_lon(p[0].to_radians(), p[1].to_radians())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    /// Indices into the user list, ascending.
    pub members: Vec<usize>,
    pub member_ids: Vec<String>,
    /// Demand-weighted centroid `[lat_deg, lon_deg]`.
    pub centroid_deg: [f64; 2],
    pub demand_bps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSet {
    pub clusters: Vec<Cluster>,
}

impl ClusterSet {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Largest over smallest cluster demand.
    pub fn balance_ratio(&self) -> f64 {
        balance_ratio(self.clusters.iter().map(|c| c.demand_bps))
    }

    /// Cluster index of every user.
    pub fn labels(&self, users: usize) -> Vec<usize> {
        let mut labels = alloc::vec![usize::MAX; users];
        for (c, cl) in self.clusters.iter().enumerate() {
            for &m in &cl.members {
                labels[m] = c;
            }
        }
        labels
    }
}

fn balance_ratio(demands: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = demands.fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(d), hi.max(d)));
    if lo > 0.0 {
        hi / lo
    } else if hi > 0.0 {
        f64::INFINITY
    } else {
        1.0
    }
}

/// Demand-weighted mean direction; unweighted if the members carry no demand.
fn weighted_centroid(points: &[Vec3], weights: &[f64], members: impl Iterator<Item = usize> + Clone) -> Vec3 {
    let total: f64 = members.clone().map(|i| weights[i]).sum();
    let mut s = [0.0; 3];
    for i in members {
        let w = if total > 0.0 { weights[i] } else { 1.0 };
        s = add(s, scale(points[i], w));
    }
    if dot(s, s) > 0.0 {
        normalize(s)
    } else {
        s
    }
}

fn chord2(a: Vec3, b: Vec3) -> f64 {
    let d = sub(a, b);
    dot(d, d)
}

fn nearest(p: Vec3, centers: &[Vec3], dist: impl Fn(Vec3, Vec3) -> f64) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, &z) in centers.iter().enumerate() {
        let d = dist(p, z);
        if d < best_d {
            best = c;
            best_d = d;
        }
    }
    best
}

/// Draw an index with probability proportional to `w`.
fn draw_weighted<R: Rng + ?Sized>(w: &[f64], rng: &mut R) -> Option<usize> {
    let total: f64 = w.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    let target = uniform(rng) * total;
    let mut acc = 0.0;
    let mut last = None;
    for (i, &x) in w.iter().enumerate() {
        if x > 0.0 {
            acc += x;
            last = Some(i);
            if acc > target {
                return Some(i);
            }
        }
    }
    last
}

fn kmeans_once<R: Rng + ?Sized>(points: &[Vec3], weights: &[f64], k: usize, rng: &mut R) -> (Vec<usize>, f64) {
    let n = points.len();
    // k-means++ seeding on w * D^2, falling back to D^2 when the remaining mass carries no demand.
    let seed_w: Vec<f64> = weights.iter().map(|w| if weights.iter().any(|x| *x > 0.0) { *w } else { 1.0 }).collect();
    let mut centers = Vec::with_capacity(k);
    centers.push(points[draw_weighted(&seed_w, rng).unwrap_or(0)]);
    while centers.len() < k {
        let d2: Vec<f64> = points.iter().map(|p| centers.iter().map(|c| chord2(*p, *c)).fold(f64::INFINITY, f64::min)).collect();
        let wd: Vec<f64> = d2.iter().zip(&seed_w).map(|(d, w)| d * w).collect();
        let pick = draw_weighted(&wd, rng).or_else(|| draw_weighted(&d2, rng)).unwrap_or(0);
        centers.push(points[pick]);
    }
    let mut labels = alloc::vec![usize::MAX; n];
    for _ in 0..MAX_ITERATIONS {
        let next: Vec<usize> = points.iter().map(|p| nearest(*p, &centers, chord2)).collect();
        let changed = next != labels;
        labels = next;
        repair_empty(points, &mut labels, &centers, k);
        for (c, center) in centers.iter_mut().enumerate() {
            *center = weighted_centroid(points, weights, (0..n).filter(|&i| labels[i] == c));
        }
        if !changed {
            break;
        }
    }
    let cost = (0..n).map(|i| weights[i] * chord2(points[i], centers[labels[i]])).sum();
    (labels, cost)
}

/// Give every empty cluster the point farthest from its centre among clusters with spare members.
fn repair_empty(points: &[Vec3], labels: &mut [usize], centers: &[Vec3], k: usize) {
    for c in 0..k {
        if labels.contains(&c) {
            continue;
        }
        let mut counts = alloc::vec![0usize; k];
        for &l in labels.iter() {
            counts[l] += 1;
        }
        let donor = (0..labels.len())
            .filter(|&i| counts[labels[i]] > 1)
            .max_by(|&a, &b| chord2(points[a], centers[labels[a]]).total_cmp(&chord2(points[b], centers[labels[b]])).then(b.cmp(&a)));
        if let Some(i) = donor {
            labels[i] = c;
        }
    }
}

fn pam(points: &[Vec3], weights: &[f64], k: usize) -> Vec<usize> {
    let n = points.len();
    let w: Vec<f64> = weights.iter().map(|x| if weights.iter().any(|y| *y > 0.0) { *x } else { 1.0 }).collect();
    let d = |i: usize, j: usize| angle_between(points[i], points[j]);
    let cost = |medoids: &[usize]| -> f64 { (0..n).map(|i| w[i] * medoids.iter().map(|&m| d(i, m)).fold(f64::INFINITY, f64::min)).sum() };
    // BUILD
    let mut medoids: Vec<usize> = Vec::with_capacity(k);
    while medoids.len() < k {
        let mut best = None;
        let mut best_cost = f64::INFINITY;
        for cand in 0..n {
            if medoids.contains(&cand) || medoids.iter().any(|&m| points[m] == points[cand]) {
                continue;
            }
            medoids.push(cand);
            let c = cost(&medoids);
            medoids.pop();
            if c < best_cost {
                best_cost = c;
                best = Some(cand);
            }
        }
        match best {
            Some(b) => medoids.push(b),
            None => break,
        }
    }
    // SWAP
    let mut current = cost(&medoids);
    for _ in 0..MAX_ITERATIONS {
        let mut best: Option<(usize, usize, f64)> = None;
        for slot in 0..medoids.len() {
            for cand in 0..n {
                if medoids.iter().any(|&m| points[m] == points[cand]) {
                    continue;
                }
                let old = medoids[slot];
                medoids[slot] = cand;
                let c = cost(&medoids);
                medoids[slot] = old;
                if c < current - 1e-12 * current.abs().max(1e-300) && best.is_none_or(|b| c < b.2) {
                    best = Some((slot, cand, c));
                }
            }
        }
        match best {
            Some((slot, cand, c)) => {
                medoids[slot] = cand;
                current = c;
            }
            None => break,
        }
    }
    let centers: Vec<Vec3> = medoids.iter().map(|&m| points[m]).collect();
    points.iter().map(|p| nearest(*p, &centers, angle_between)).collect()
}

/// Move boundary users until `max/min` demand is within `tolerance`.
///
/// Each move takes a user out of the heaviest cluster (or, failing that,
/// into the lightest one) to the cluster where it adds the least distance,
/// and is accepted only if it strictly lowers the sum of squared cluster
/// demands, so the pass always terminates.
fn balance(points: &[Vec3], weights: &[f64], labels: &mut [usize], k: usize, tolerance: f64) -> Result<()> {
    let n = points.len();
    let demands = |labels: &[usize]| {
        let mut d = alloc::vec![0.0; k];
        for i in 0..n {
            d[labels[i]] += weights[i];
        }
        d
    };
    for _ in 0..MAX_ITERATIONS {
        let d = demands(labels);
        let ratio = balance_ratio(d.iter().copied());
        if ratio <= tolerance {
            return Ok(());
        }
        let centers: Vec<Vec3> = (0..k).map(|c| weighted_centroid(points, weights, (0..n).filter(|&i| labels[i] == c))).collect();
        let mut counts = alloc::vec![0usize; k];
        for &l in labels.iter() {
            counts[l] += 1;
        }
        let heavy = (0..k).max_by(|&a, &b| d[a].total_cmp(&d[b]).then(b.cmp(&a))).unwrap_or(0);
        let light = (0..k).min_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b))).unwrap_or(0);
        let best_move = |from: Option<usize>, to: Option<usize>| {
            let mut best: Option<(usize, usize, f64)> = None;
            for i in 0..n {
                let src = labels[i];
                let wi = weights[i];
                if from.is_some_and(|f| f != src) || counts[src] < 2 || !(wi > 0.0) {
                    continue;
                }
                for dst in 0..k {
                    if dst == src || to.is_some_and(|t| t != dst) || !(wi < d[src] - d[dst]) {
                        continue;
                    }
                    let extra = angle_between(points[i], centers[dst]) - angle_between(points[i], centers[src]);
                    if best.is_none_or(|b| extra < b.2) {
                        best = Some((i, dst, extra));
                    }
                }
            }
            best
        };
        match best_move(Some(heavy), None).or_else(|| best_move(None, Some(light))) {
            Some((i, dst, _)) => labels[i] = dst,
            None => return Err(Error::BalanceUnachievable { ratio, tolerance }),
        }
    }
    let ratio = balance_ratio(demands(labels).into_iter());
    if ratio <= tolerance {
        Ok(())
    } else {
        Err(Error::BalanceUnachievable { ratio, tolerance })
    }
}

fn build_cluster_set(users: &[CoverageUser], points: &[Vec3], weights: &[f64], labels: &[usize], k: usize) -> ClusterSet {
    let clusters = (0..k)
        .map(|c| {
            let members: Vec<usize> = (0..users.len()).filter(|&i| labels[i] == c).collect();
            let centroid = weighted_centroid(points, weights, members.iter().copied());
            Cluster {
                member_ids: members.iter().map(|&i| users[i].id.clone()).collect(),
                demand_bps: members.iter().map(|&i| weights[i]).sum(),
                centroid_deg: to_deg(centroid),
                members,
            }
        })
        .collect();
    ClusterSet { clusters }
}

/// Demand-weighted clustering of users on the sphere with a balancing post-pass.
///
/// Users are ordered by their position in `users`; ties between equidistant
/// centres go to the lowest cluster index.
pub fn cluster_users<R: Rng + ?Sized>(
    users: &[CoverageUser],
    k: usize,
    method: ClusterMethod,
    balance_tolerance: f64,
    rng: &mut R,
) -> Result<ClusterSet> {
    let n = users.len();
    if k == 0 || k > n {
        return Err(Error::DegenerateInput(format!("cluster count {k} must lie in 1..={n}")));
    }
    if !(balance_tolerance >= 1.0) {
        return Err(Error::DegenerateInput(format!("balance tolerance {balance_tolerance} must be >= 1")));
    }
    for u in users {
        if !(u.demand_bps >= 0.0) || !u.demand_bps.is_finite() || !u.lat_deg.is_finite() || !u.lon_deg.is_finite() {
            return Err(Error::DegenerateInput(format!("user {} has invalid position or demand", u.id)));
        }
    }
    let weights: Vec<f64> = users.iter().map(|u| u.demand_bps).collect();
    if !(weights.iter().sum::<f64>() > 0.0) {
        return Err(Error::DegenerateInput("total demand must be > 0".into()));
    }
    let points: Vec<Vec3> = users.iter().map(CoverageUser::unit).collect();
    let mut distinct: Vec<Vec3> = Vec::new();
    for p in &points {
        if !distinct.contains(p) {
            distinct.push(*p);
        }
    }
    if distinct.len() < k {
        return Err(Error::DegenerateInput(format!("{} distinct user positions cannot form {k} clusters", distinct.len())));
    }
    let mut labels = match method {
        ClusterMethod::KMeans => {
            let mut best: Option<(Vec<usize>, f64)> = None;
            for _ in 0..KMEANS_RESTARTS {
                let (l, c) = kmeans_once(&points, &weights, k, rng);
                if best.as_ref().is_none_or(|b| c < b.1) {
                    best = Some((l, c));
                }
            }
            best.map(|b| b.0).unwrap_or_default()
        }
        ClusterMethod::KMedoids => pam(&points, &weights, k),
    };
    balance(&points, &weights, &mut labels, k, balance_tolerance)?;
    Ok(build_cluster_set(users, &points, &weights, &labels, k))
}

/// Local tangent-plane frame for the gnomonic projection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Gnomonic {
    center: Vec3,
    east: Vec3,
    north: Vec3,
}

impl Gnomonic {
    fn new(center: Vec3) -> Self {
        let z = [0.0, 0.0, 1.0];
        let east = if norm2(cross(z, center)) > 1e-12 { normalize(cross(z, center)) } else { [0.0, 1.0, 0.0] };
        let north = cross(center, east);
        Self { center, east, north }
    }

    fn project(&self, x: Vec3) -> Option<[f64; 2]> {
        let c = dot(x, self.center);
        (c > 1e-9).then(|| [dot(x, self.east) / c, dot(x, self.north) / c])
    }

    fn unproject(&self, p: [f64; 2]) -> Vec3 {
        normalize(add(self.center, add(scale(self.east, p[0]), scale(self.north, p[1]))))
    }

    /// Coefficients `(a, b, c)` of `a + b u + c v >= 0` for the hemisphere `x . n >= 0`.
    fn half_plane(&self, n: Vec3) -> [f64; 3] {
        [dot(n, self.center), dot(n, self.east), dot(n, self.north)]
    }
}

fn norm2(a: Vec3) -> f64 {
    dot(a, a)
}

fn cross2(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn clip(poly: &[[f64; 2]], hp: [f64; 3]) -> Vec<[f64; 2]> {
    let f = |p: [f64; 2]| hp[0] + hp[1] * p[0] + hp[2] * p[1];
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let (fa, fb) = (f(a), f(b));
        if fa >= 0.0 {
            out.push(a);
        }
        if (fa >= 0.0) != (fb >= 0.0) {
            let t = fa / (fa - fb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

/// Solid angle of a convex spherical polygon given by unit vertices.
pub fn spherical_polygon_area(vertices: &[Vec3]) -> f64 {
    if vertices.len() < 3 {
        return 0.0;
    }
    let a = vertices[0];
    let mut total = 0.0;
    for w in vertices[1..].windows(2) {
        let (b, c) = (w[0], w[1]);
        let num = dot(a, cross(b, c)).abs();
        let den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
        total += 2.0 * num.atan2(den);
    }
    total
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub cluster: usize,
    /// Vertices `[lat_deg, lon_deg]`, counter-clockwise seen from outside the Earth.
    pub vertices_deg: Vec<[f64; 2]>,
    /// Solid angle in steradians.
    pub area_sr: f64,
    plane: Vec<[f64; 2]>,
}

impl Cell {
    pub fn area_m2(&self) -> f64 {
        self.area_sr * crate::consts::EARTH_RADIUS_M * crate::consts::EARTH_RADIUS_M
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tessellation {
    pub cells: Vec<Cell>,
    pub coverage_deg: Vec<[f64; 2]>,
    pub coverage_area_sr: f64,
    /// Centroids used as Voronoi sites, after any de-duplication.
    pub sites_deg: Vec<[f64; 2]>,
    /// Clusters whose centroid was nudged off a duplicate.
    pub perturbed: Vec<usize>,
    frame: Gnomonic,
}

impl Tessellation {
    /// Cell whose polygon contains the point, if any.
    pub fn locate(&self, lat_deg: f64, lon_deg: f64) -> Option<usize> {
        let p = self.frame.project(unit_deg([lat_deg, lon_deg]))?;
        self.cells.iter().position(|c| {
            let n = c.plane.len();
            n >= 3 && (0..n).all(|i| cross2(c.plane[i], c.plane[(i + 1) % n], p) >= -1e-15)
        })
    }

    pub fn contains(&self, lat_deg: f64, lon_deg: f64) -> bool {
        let Some(p) = self.frame.project(unit_deg([lat_deg, lon_deg])) else {
            return false;
        };
        let poly: Vec<[f64; 2]> = self.coverage_deg.iter().filter_map(|v| self.frame.project(unit_deg(*v))).collect();
        let n = poly.len();
        (0..n).all(|i| cross2(poly[i], poly[(i + 1) % n], p) >= 0.0)
    }

    /// Sum of cell areas, steradians.
    pub fn covered_area_sr(&self) -> f64 {
        self.cells.iter().map(|c| c.area_sr).sum()
    }
}

/// Voronoi diagram of the cluster centroids on the sphere, clipped to a
/// convex coverage polygon (`[lat_deg, lon_deg]` vertices, great-circle edges).
///
/// Every cell is the polygon intersected with the hemispheres closer to its
/// site than to each other site; the gnomonic projection turns those
/// great-circle bisectors into straight lines, so clipping is exact.
pub fn tessellate(clusters: &ClusterSet, coverage_polygon: &[[f64; 2]]) -> Result<Tessellation> {
    if clusters.is_empty() {
        return Err(Error::DegenerateGeometry("at least one centroid is required".into()));
    }
    if coverage_polygon.len() < 3 {
        return Err(Error::DegenerateGeometry("coverage polygon needs at least 3 vertices".into()));
    }
    let verts: Vec<Vec3> = coverage_polygon.iter().map(|p| unit_deg(*p)).collect();
    let center = verts.iter().fold([0.0; 3], |s, v| add(s, *v));
    if norm2(center) < 1e-12 {
        return Err(Error::DegenerateGeometry("coverage polygon has no well-defined centre".into()));
    }
    let frame = Gnomonic::new(normalize(center));
    let mut poly = verts
        .iter()
        .map(|v| frame.project(*v))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::DegenerateGeometry("coverage polygon must lie within one hemisphere".into()))?;
    let signed: f64 = (0..poly.len()).map(|i| cross2([0.0, 0.0], poly[i], poly[(i + 1) % poly.len()])).sum();
    if signed < 0.0 {
        poly.reverse();
    }
    let n = poly.len();
    let scale_2d = poly.iter().map(|p| p[0].abs().max(p[1].abs())).fold(0.0, f64::max);
    for i in 0..n {
        if cross2(poly[i], poly[(i + 1) % n], poly[(i + 2) % n]) < -1e-12 * scale_2d * scale_2d {
            return Err(Error::DegenerateGeometry("coverage polygon must be convex".into()));
        }
    }
    if !(signed.abs() > 0.0) {
        return Err(Error::DegenerateGeometry("coverage polygon has zero area".into()));
    }
    let coverage_deg: Vec<[f64; 2]> = poly.iter().map(|p| to_deg(frame.unproject(*p))).collect();
    let coverage_area_sr = spherical_polygon_area(&poly.iter().map(|p| frame.unproject(*p)).collect::<Vec<_>>());

    let mut sites: Vec<Vec3> = Vec::with_capacity(clusters.len());
    let mut perturbed = Vec::new();
    for (c, cl) in clusters.clusters.iter().enumerate() {
        let mut s = unit_deg(cl.centroid_deg);
        let mut bump = 0;
        while sites.iter().any(|t| angle_between(*t, s) == 0.0) {
            bump += 1;
            let lat = cl.centroid_deg[0] + DUPLICATE_PERTURBATION_DEG * bump as f64;
            s = unit_deg([lat, cl.centroid_deg[1]]);
        }
        if bump > 0 {
            perturbed.push(c);
        }
        sites.push(s);
    }

    let cells = (0..sites.len())
        .map(|i| {
            let mut plane = poly.clone();
            for j in 0..sites.len() {
                if i != j && !plane.is_empty() {
                    plane = clip(&plane, frame.half_plane(sub(sites[i], sites[j])));
                }
            }
            let sphere: Vec<Vec3> = plane.iter().map(|p| frame.unproject(*p)).collect();
            Cell {
                cluster: i,
                vertices_deg: sphere.iter().map(|v| to_deg(*v)).collect(),
                area_sr: spherical_polygon_area(&sphere),
                plane,
            }
        })
        .collect();
    Ok(Tessellation {
        cells,
        coverage_deg,
        coverage_area_sr,
        sites_deg: sites.iter().map(|s| to_deg(*s)).collect(),
        perturbed,
        frame,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannedBeam {
    pub cluster: usize,
    pub center_deg: [f64; 2],
    pub half_power_beamwidth_deg: f64,
    /// Linear peak gain.
    pub peak_gain: f64,
    pub demand_bps: f64,
    /// Fraction of the cluster demand inside the half-power cone.
    pub containment: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserGain {
    pub id: String,
    pub cluster: usize,
    pub off_axis_deg: f64,
    /// Linear satellite antenna gain towards the user.
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamPlan {
    pub beams: Vec<PlannedBeam>,
    pub users: Vec<UserGain>,
}

/// Off-axis angle (rad) of `target` from a beam pointed at `center`, seen from `satellite`.
fn off_axis(satellite: Vec3, center: Vec3, target: Vec3) -> f64 {
    angle_between(sub(target, satellite), sub(center, satellite))
}

/// One beam per cluster, centred on the cluster's demand-weighted centroid.
///
/// The half-power width is the narrowest catalog entry whose cone, seen from
/// the satellite, holds at least `containment` of the cluster's demand.
pub fn assign_beams(
    tessellation: &Tessellation,
    clusters: &ClusterSet,
    users: &[CoverageUser],
    satellite: Vec3,
    catalog: &[CatalogBeam],
    containment: f64,
) -> Result<BeamPlan> {
    if tessellation.cells.len() != clusters.len() {
        return Err(Error::dims("coverage", "tessellation cells", clusters.len(), tessellation.cells.len()));
    }
    if catalog.is_empty() {
        return Err(Error::DegenerateInput("beam catalog is empty".into()));
    }
    if !(containment > 0.0 && containment <= 1.0) {
        return Err(Error::DegenerateInput(format!("containment {containment} must lie in (0, 1]")));
    }
    let mut widths: Vec<&CatalogBeam> = catalog.iter().collect();
    widths.sort_by(|a, b| a.half_power_beamwidth_deg.total_cmp(&b.half_power_beamwidth_deg));
    let labels = clusters.labels(users.len());
    if labels.contains(&usize::MAX) {
        return Err(Error::DegenerateInput("cluster set does not cover every user".into()));
    }
    let mut beams = Vec::with_capacity(clusters.len());
    for (c, cl) in clusters.clusters.iter().enumerate() {
        let center = surface_point(cl.centroid_deg[0].to_radians(), cl.centroid_deg[1].to_radians());
        let mut offsets: Vec<(f64, f64)> = cl
            .members
            .iter()
            .map(|&i| {
                let u = &users[i];
                (off_axis(satellite, center, surface_point(u.lat_deg.to_radians(), u.lon_deg.to_radians())).to_degrees(), u.demand_bps)
            })
            .collect();
        offsets.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = offsets.iter().map(|o| o.1).sum();
        let held = |width: f64| {
            if total > 0.0 {
                offsets.iter().filter(|o| o.0 <= width * (1.0 + 1e-12)).map(|o| o.1).sum::<f64>() / total
            } else {
                1.0
            }
        };
        let chosen = widths.iter().find(|b| held(b.half_power_beamwidth_deg) >= containment);
        let Some(beam) = chosen else {
            let mut acc = 0.0;
            let required = offsets
                .iter()
                .find(|o| {
                    acc += o.1;
                    acc / total >= containment
                })
                .map_or(f64::NAN, |o| o.0);
            return Err(Error::NoFittingBeam { cluster: c, required });
        };
        beams.push(PlannedBeam {
            cluster: c,
            center_deg: cl.centroid_deg,
            half_power_beamwidth_deg: beam.half_power_beamwidth_deg,
            peak_gain: db_to_linear(beam.peak_gain_dbi),
            demand_bps: cl.demand_bps,
            containment: held(beam.half_power_beamwidth_deg),
        });
    }
    let users = users
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let b = &beams[labels[i]];
            let center = surface_point(b.center_deg[0].to_radians(), b.center_deg[1].to_radians());
            let theta = off_axis(satellite, center, surface_point(u.lat_deg.to_radians(), u.lon_deg.to_radians()));
            Ok(UserGain {
                id: u.id.clone(),
                cluster: labels[i],
                off_axis_deg: theta.to_degrees(),
                gain: beam_gain(theta, b.half_power_beamwidth_deg.to_radians(), b.peak_gain)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BeamPlan { beams, users })
}

/// Fixed inputs of the four-step footprint design.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveragePlanner {
    pub clusters: usize,
    pub method: ClusterMethod,
    pub balance_tolerance: f64,
    pub demand_containment: f64,
    pub shift_threshold: f64,
    pub polygon_deg: Vec<[f64; 2]>,
    pub catalog: Vec<CatalogBeam>,
    pub satellite: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoveragePlan {
    pub clusters: ClusterSet,
    pub tessellation: Tessellation,
    pub beams: BeamPlan,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Replan {
    Replanned(CoveragePlan),
    Unchanged {
        /// Largest relative change of a cluster's demand.
        shift: f64,
    },
}

impl CoveragePlanner {
    pub fn plan<R: Rng + ?Sized>(&self, users: &[CoverageUser], rng: &mut R) -> Result<CoveragePlan> {
        let clusters = cluster_users(users, self.clusters, self.method, self.balance_tolerance, rng)?;
        let tessellation = tessellate(&clusters, &self.polygon_deg)?;
        let beams = assign_beams(&tessellation, &clusters, users, self.satellite, &self.catalog, self.demand_containment)?;
        Ok(CoveragePlan { clusters, tessellation, beams })
    }

    /// Rerun the full design when any cluster's demand moved by more than the shift threshold.
    pub fn replan_on_demand_shift<R: Rng + ?Sized>(&self, old: &BeamPlan, users_new: &[CoverageUser], rng: &mut R) -> Result<Replan> {
        let shift = demand_shift(old, users_new)?;
        if shift > self.shift_threshold {
            Ok(Replan::Replanned(self.plan(users_new, rng)?))
        } else {
            Ok(Replan::Unchanged { shift })
        }
    }
}

/// Largest `|D_new - D_old| / D_old` over the clusters of `old`.
///
/// Users keep their old cluster by ID; users the plan has not seen join the
/// beam whose centre is closest.
pub fn demand_shift(old: &BeamPlan, users_new: &[CoverageUser]) -> Result<f64> {
    if old.beams.is_empty() {
        return Err(Error::DegenerateInput("prior plan has no beams".into()));
    }
    let centers: Vec<Vec3> = old.beams.iter().map(|b| unit_deg(b.center_deg)).collect();
    let mut new_demand = alloc::vec![0.0; old.beams.len()];
    for u in users_new {
        let c = old
            .users
            .iter()
            .find(|g| g.id == u.id)
            .map_or_else(|| nearest(u.unit(), &centers, angle_between), |g| g.cluster);
        new_demand[c] += u.demand_bps;
    }
    Ok(old
        .beams
        .iter()
        .zip(&new_demand)
        .map(|(b, d)| if b.demand_bps > 0.0 { (d - b.demand_bps).abs() / b.demand_bps } else if *d > 0.0 { f64::INFINITY } else { 0.0 })
        .fold(0.0, f64::max))
}

//! Spherical-Earth geometry in an Earth-centred frame (meters, radians).

use num_traits::Float;

use crate::consts::EARTH_RADIUS_M;

pub type Vec3 = [f64; 3];

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalize(a: Vec3) -> Vec3 {
    scale(a, 1.0 / norm(a))
}

/// Angle between two vectors, robust near 0 and pi.
pub fn angle_between(a: Vec3, b: Vec3) -> f64 {
    norm(cross(a, b)).atan2(dot(a, b))
}

/// Unit vector for geodetic (latitude, longitude) given in radians.
pub fn unit_from_lat_lon(lat: f64, lon: f64) -> Vec3 {
    [lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()]
}

/// (latitude, longitude) in radians of a nonzero vector.
pub fn lat_lon_from_vec(v: Vec3) -> (f64, f64) {
    let n = norm(v);
    ((v[2] / n).clamp(-1.0, 1.0).asin(), v[1].atan2(v[0]))
}

/// Position on the spherical Earth surface.
pub fn surface_point(lat: f64, lon: f64) -> Vec3 {
    scale(unit_from_lat_lon(lat, lon), EARTH_RADIUS_M)
}

/// Elevation angle of `target` seen from the ground point `ground`.
pub fn elevation(ground: Vec3, target: Vec3) -> f64 {
    let up = normalize(ground);
    let los = sub(target, ground);
    (dot(up, los) / norm(los)).clamp(-1.0, 1.0).asin()
}

/// Great-circle angle between two unit (or same-length) vectors.
pub fn central_angle(a: Vec3, b: Vec3) -> f64 {
    angle_between(a, b)
}

pub fn deg(x: f64) -> f64 {
    x.to_radians()
}

//! Physical constants shared by every model.

/// Spherical Earth radius, meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;
/// Earth gravitational parameter, m^3/s^2.
pub const EARTH_MU_M3_S2: f64 = 3.986_004_418e14;
/// Sidereal rotation rate of the Earth, rad/s.
pub const SIDEREAL_RATE_RAD_S: f64 = 7.292_115_9e-5;
/// Boltzmann constant, J/K.
pub const BOLTZMANN_J_K: f64 = 1.380_649e-23;

/// Bundle of the geodetic constants, for callers that want to pass them around as a value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodeticConstants {
    pub earth_radius_m: f64,
    pub speed_of_light_m_s: f64,
    pub earth_mu_m3_s2: f64,
}

impl GeodeticConstants {
    pub const STANDARD: GeodeticConstants = GeodeticConstants {
        earth_radius_m: EARTH_RADIUS_M,
        speed_of_light_m_s: SPEED_OF_LIGHT_M_S,
        earth_mu_m3_s2: EARTH_MU_M3_S2,
    };
}

impl Default for GeodeticConstants {
    fn default() -> Self {
        Self::STANDARD
    }
}

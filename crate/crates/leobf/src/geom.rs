//! Orbit propagation and satellite-relative geometry.
//!
//! A satellite trajectory is defined by six Keplerian elements and propagated
//! with two-body dynamics; Earth rotation converts the inertial position to
//! ECEF. Ground stations live on a spherical Earth. Arrival directions are
//! expressed in the satellite's local North-East-Down frame, with the Down
//! axis pointing at the geocenter (boresight = nadir), then converted to
//! spherical (azimuth from North toward East, off-nadir angle from Down,
//! range).

use crate::error::{Error, Result};
use std::f64::consts::{PI, TAU};

/// Spherical Earth radius used for ground-station placement (km).
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Equatorial radius used as the lower bound for orbit semi-major axes (km).
pub const EARTH_EQUATORIAL_RADIUS_KM: f64 = 6378.137;

/// Earth gravitational parameter (km^3/s^2).
pub const MU_EARTH_KM3_S2: f64 = 398_600.4418;

/// Earth rotation rate (rad/s).
pub const EARTH_ROTATION_RAD_S: f64 = 7.292_115_9e-5;

/// Plain 3-vector in km (or km/s for velocities).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        Vec3::new(self.x / n, self.y / n, self.z / n)
    }

    pub fn scale(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn add(self, other: Vec3) -> Vec3 {
        Vec3::new(self.x + other.x, self.y + other.y, self.z + other.z)
    }

    pub fn sub(self, other: Vec3) -> Vec3 {
        Vec3::new(self.x - other.x, self.y - other.y, self.z - other.z)
    }
}

/// Earth-centered Earth-fixed Cartesian position (km).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcefPosition {
    pub x_km: f64,
    pub y_km: f64,
    pub z_km: f64,
}

impl EcefPosition {
    pub fn new(x_km: f64, y_km: f64, z_km: f64) -> Self {
        Self { x_km, y_km, z_km }
    }

    /// Builds a position from geocentric latitude/longitude on the spherical
    /// Earth plus an altitude above it.
    pub fn from_lat_lon(lat_deg: f64, lon_deg: f64, alt_km: f64) -> Self {
        let lat = lat_deg.to_radians();
        let lon = lon_deg.to_radians();
        let r = EARTH_RADIUS_KM + alt_km;
        Self::new(
            r * lat.cos() * lon.cos(),
            r * lat.cos() * lon.sin(),
            r * lat.sin(),
        )
    }

    pub fn as_vec(self) -> Vec3 {
        Vec3::new(self.x_km, self.y_km, self.z_km)
    }

    pub fn from_vec(v: Vec3) -> Self {
        Self::new(v.x, v.y, v.z)
    }

    pub fn norm_km(self) -> f64 {
        self.as_vec().norm()
    }

    /// Geocentric latitude (deg).
    pub fn latitude_deg(self) -> f64 {
        (self.z_km / self.norm_km()).asin().to_degrees()
    }

    /// Longitude (deg) in (-180, 180].
    pub fn longitude_deg(self) -> f64 {
        self.y_km.atan2(self.x_km).to_degrees()
    }
}

/// Keplerian orbital elements. Angles are stored normalized to [0, 360).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitalElements {
    semi_major_axis_km: f64,
    eccentricity: f64,
    inclination_deg: f64,
    raan_deg: f64,
    arg_periapsis_deg: f64,
    true_anomaly_deg: f64,
}

fn normalize_deg(angle: f64) -> f64 {
    let a = angle % 360.0;
    if a < 0.0 {
        a + 360.0
    } else {
        a
    }
}

impl OrbitalElements {
    pub fn new(
        semi_major_axis_km: f64,
        eccentricity: f64,
        inclination_deg: f64,
        raan_deg: f64,
        arg_periapsis_deg: f64,
        true_anomaly_deg: f64,
    ) -> Result<Self> {
        if !semi_major_axis_km.is_finite() || semi_major_axis_km <= EARTH_EQUATORIAL_RADIUS_KM {
            return Err(Error::InvalidElements(format!(
                "semi_major_axis_km = {semi_major_axis_km} must exceed {EARTH_EQUATORIAL_RADIUS_KM}"
            )));
        }
        if !eccentricity.is_finite() || !(0.0..1.0).contains(&eccentricity) {
            return Err(Error::InvalidElements(format!(
                "eccentricity = {eccentricity} must be in [0, 1)"
            )));
        }
        for (name, v) in [
            ("inclination_deg", inclination_deg),
            ("raan_deg", raan_deg),
            ("arg_periapsis_deg", arg_periapsis_deg),
            ("true_anomaly_deg", true_anomaly_deg),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidElements(format!("{name} must be finite")));
            }
        }
        Ok(Self {
            semi_major_axis_km,
            eccentricity,
            inclination_deg: normalize_deg(inclination_deg),
            raan_deg: normalize_deg(raan_deg),
            arg_periapsis_deg: normalize_deg(arg_periapsis_deg),
            true_anomaly_deg: normalize_deg(true_anomaly_deg),
        })
    }

    pub fn semi_major_axis_km(&self) -> f64 {
        self.semi_major_axis_km
    }

    pub fn eccentricity(&self) -> f64 {
        self.eccentricity
    }

    pub fn inclination_deg(&self) -> f64 {
        self.inclination_deg
    }

    pub fn raan_deg(&self) -> f64 {
        self.raan_deg
    }

    pub fn arg_periapsis_deg(&self) -> f64 {
        self.arg_periapsis_deg
    }

    pub fn true_anomaly_deg(&self) -> f64 {
        self.true_anomaly_deg
    }

    /// Orbital period 2*pi*sqrt(a^3/mu) (s).
    pub fn period_s(&self) -> f64 {
        TAU * (self.semi_major_axis_km.powi(3) / MU_EARTH_KM3_S2).sqrt()
    }

    /// Altitude above the spherical Earth at the orbit radius for the stored
    /// true anomaly (km).
    pub fn altitude_km(&self) -> f64 {
        let nu = self.true_anomaly_deg.to_radians();
        let r = self.semi_major_axis_km * (1.0 - self.eccentricity.powi(2))
            / (1.0 + self.eccentricity * nu.cos());
        r - EARTH_RADIUS_KM
    }
}

/// Direction of arrival at the satellite in its NED frame, as spherical
/// coordinates: azimuth from North toward East, off-nadir angle from the
/// Down axis, and slant range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrivalDirection {
    pub azimuth_rad: f64,
    pub off_nadir_rad: f64,
    pub range_km: f64,
}

impl ArrivalDirection {
    pub fn new(azimuth_rad: f64, off_nadir_rad: f64, range_km: f64) -> Result<Self> {
        if !range_km.is_finite() || range_km <= 0.0 {
            return Err(Error::InvalidDirection(format!(
                "range_km = {range_km} must be positive"
            )));
        }
        if !off_nadir_rad.is_finite() || !(0.0..=PI).contains(&off_nadir_rad) {
            return Err(Error::InvalidDirection(format!(
                "off_nadir_rad = {off_nadir_rad} must be in [0, pi]"
            )));
        }
        if !azimuth_rad.is_finite() {
            return Err(Error::InvalidDirection("azimuth_rad must be finite".into()));
        }
        let mut az = azimuth_rad % TAU;
        if az < 0.0 {
            az += TAU;
        }
        Ok(Self {
            azimuth_rad: az,
            off_nadir_rad,
            range_km,
        })
    }
}

fn rot_z(v: Vec3, angle: f64) -> Vec3 {
    let (s, c) = angle.sin_cos();
    Vec3::new(c * v.x - s * v.y, s * v.x + c * v.y, v.z)
}

fn rot_x(v: Vec3, angle: f64) -> Vec3 {
    let (s, c) = angle.sin_cos();
    Vec3::new(v.x, c * v.y - s * v.z, s * v.y + c * v.z)
}

/// Solves Kepler's equation M = E - e*sin(E) for the eccentric anomaly by
/// Newton iteration (tolerance 1e-12 rad, at most 50 iterations).
fn solve_kepler(mean_anomaly: f64, eccentricity: f64) -> f64 {
    let m = mean_anomaly.rem_euclid(TAU);
    let mut e_anom = if eccentricity < 0.8 { m } else { PI };
    for _ in 0..50 {
        let f = e_anom - eccentricity * e_anom.sin() - m;
        let fp = 1.0 - eccentricity * e_anom.cos();
        let delta = f / fp;
        e_anom -= delta;
        if delta.abs() < 1e-12 {
            break;
        }
    }
    e_anom
}

/// Satellite position in the inertial frame at time `t_s` after epoch (km).
///
/// The inertial and Earth-fixed frames coincide at t = 0.
pub fn propagate_inertial(elements: &OrbitalElements, t_s: f64) -> Vec3 {
    let a = elements.semi_major_axis_km;
    let e = elements.eccentricity;
    let nu0 = elements.true_anomaly_deg.to_radians();

    // True anomaly at epoch -> mean anomaly at epoch.
    let e0 = 2.0 * ((1.0 - e).sqrt() * (nu0 / 2.0).sin()).atan2((1.0 + e).sqrt() * (nu0 / 2.0).cos());
    let m0 = e0 - e * e0.sin();

    let mean_motion = (MU_EARTH_KM3_S2 / a.powi(3)).sqrt();
    let m = m0 + mean_motion * t_s;
    let e_anom = solve_kepler(m, e);
    let nu = 2.0 * ((1.0 + e).sqrt() * (e_anom / 2.0).sin()).atan2((1.0 - e).sqrt() * (e_anom / 2.0).cos());
    let r = a * (1.0 - e * e_anom.cos());

    let perifocal = Vec3::new(r * nu.cos(), r * nu.sin(), 0.0);
    let in_plane = rot_z(perifocal, elements.arg_periapsis_deg.to_radians());
    let tilted = rot_x(in_plane, elements.inclination_deg.to_radians());
    rot_z(tilted, elements.raan_deg.to_radians())
}

/// Satellite ECEF position at time `t_s` after epoch.
///
/// Two-body propagation in the inertial frame followed by the Earth-rotation
/// transform (frames aligned at t = 0).
pub fn propagate(elements: &OrbitalElements, t_s: f64) -> EcefPosition {
    let eci = propagate_inertial(elements, t_s);
    EcefPosition::from_vec(rot_z(eci, -EARTH_ROTATION_RAD_S * t_s))
}

/// Unit North/East/Down axes of the satellite-local frame, in ECEF.
///
/// Down points at the geocenter. Directly over a pole the North projection
/// degenerates; the x-axis projection is used there instead.
fn ned_basis(sat: Vec3) -> (Vec3, Vec3, Vec3) {
    let r_hat = sat.normalized();
    let down = r_hat.scale(-1.0);
    let z_hat = Vec3::new(0.0, 0.0, 1.0);
    let mut north = z_hat.sub(r_hat.scale(z_hat.dot(r_hat)));
    if north.norm() < 1e-12 {
        let x_hat = Vec3::new(1.0, 0.0, 0.0);
        north = x_hat.sub(r_hat.scale(x_hat.dot(r_hat)));
    }
    let north = north.normalized();
    let east = down.cross(north);
    (north, east, down)
}

/// Converts a ground position to the satellite's arrival direction.
pub fn ecef_to_arrival(sat: EcefPosition, ground: EcefPosition) -> Result<ArrivalDirection> {
    let delta = ground.as_vec().sub(sat.as_vec());
    let range = delta.norm();
    if range < 1e-9 {
        return Err(Error::CoincidentPositions);
    }
    let (north, east, down) = ned_basis(sat.as_vec());
    let n = delta.dot(north);
    let e = delta.dot(east);
    let d = delta.dot(down);
    let off_nadir = (d / range).clamp(-1.0, 1.0).acos();
    let mut azimuth = e.atan2(n);
    if azimuth < 0.0 {
        azimuth += TAU;
    }
    Ok(ArrivalDirection {
        azimuth_rad: azimuth,
        off_nadir_rad: off_nadir,
        range_km: range,
    })
}

/// Reconstructs the ECEF point seen from `sat` along `direction`.
pub fn arrival_to_ecef(sat: EcefPosition, direction: &ArrivalDirection) -> EcefPosition {
    let (north, east, down) = ned_basis(sat.as_vec());
    let (s_az, c_az) = direction.azimuth_rad.sin_cos();
    let (s_th, c_th) = direction.off_nadir_rad.sin_cos();
    let unit = north
        .scale(s_th * c_az)
        .add(east.scale(s_th * s_az))
        .add(down.scale(c_th));
    EcefPosition::from_vec(sat.as_vec().add(unit.scale(direction.range_km)))
}

/// Moves a ground point `distance_km` along the great circle with initial
/// bearing `bearing_rad` (from local North toward East), staying on the
/// sphere of the input's radius. Zero distance returns the input unchanged.
pub fn ground_displace(ground: EcefPosition, distance_km: f64, bearing_rad: f64) -> EcefPosition {
    if distance_km == 0.0 {
        return ground;
    }
    let g = ground.as_vec();
    let radius = g.norm();
    let r_hat = g.normalized();
    let z_hat = Vec3::new(0.0, 0.0, 1.0);
    let mut east = z_hat.cross(r_hat);
    if east.norm() < 1e-12 {
        east = Vec3::new(0.0, 1.0, 0.0);
    }
    let east = east.normalized();
    let north = r_hat.cross(east);
    let tangent = north.scale(bearing_rad.cos()).add(east.scale(bearing_rad.sin()));
    let angle = distance_km / radius;
    EcefPosition::from_vec(r_hat.scale(angle.cos()).add(tangent.scale(angle.sin())).scale(radius))
}

/// Great-circle distance between two points assumed on a common sphere (km).
pub fn great_circle_distance_km(a: EcefPosition, b: EcefPosition) -> f64 {
    let av = a.as_vec();
    let bv = b.as_vec();
    // atan2 form stays accurate for nearly parallel vectors.
    let angle = av.cross(bv).norm().atan2(av.dot(bv));
    a.norm_km() * angle
}

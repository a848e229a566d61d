//! Static footprint geometry: hexagonal cell lattice, reuse colouring,
//! slant ranges and the oblique-projection deviation angle.
//!
//! All lengths are kilometres.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slack allowed on the arccos argument before the geometry is declared
/// inconsistent.
pub const ARCCOS_CLAMP: f64 = 1e-9;

/// Mean earth radius, km.
pub const MEAN_EARTH_RADIUS_KM: f64 = 6371.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error(
        "inconsistent geometry: arccos argument {argument} out of range \
         (d_o_s={cell_to_sat_km} km, d_Mn_s={user_to_sat_km} km, d_Mn_o={user_to_center_km} km)"
    )]
    Domain {
        argument: f64,
        cell_to_sat_km: f64,
        user_to_sat_km: f64,
        user_to_center_km: f64,
    },
    #[error("invalid geometry value: {0}")]
    InvalidValue(String),
    #[error("unsupported reuse factor {0}; expected one of 1, 3, 4, 7")]
    UnsupportedReuse(u32),
    #[error("footprint needs at least one cell")]
    NoCells,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EarthModel {
    pub radius_km: f64,
}

impl EarthModel {
    pub fn new(radius_km: f64) -> Result<Self, GeometryError> {
        if !(radius_km > 0.0) || !radius_km.is_finite() {
            return Err(GeometryError::InvalidValue(format!(
                "earth radius must be positive, got {radius_km}"
            )));
        }
        Ok(Self { radius_km })
    }

    /// Distance from a point on the surface to a satellite at `altitude_km`
    /// above the subsatellite point, where the point sits `arc_km` of great
    /// circle away from the subsatellite point.
    pub fn slant_range(&self, altitude_km: f64, arc_km: f64) -> f64 {
        let r = self.radius_km;
        let orbit = r + altitude_km;
        let central = arc_km / r;
        // r^2 + orbit^2 - 2 r orbit cos(c) == altitude^2 + 2 r orbit (1 - cos c)
        (altitude_km * altitude_km + 2.0 * r * orbit * one_minus_cos(central)).sqrt()
    }
}

impl Default for EarthModel {
    fn default() -> Self {
        Self {
            radius_km: MEAN_EARTH_RADIUS_KM,
        }
    }
}

/// Position on the local tangent grid around the subsatellite point, given
/// as great-circle arc offsets east and north.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcPosition {
    pub east_km: f64,
    pub north_km: f64,
}

impl ArcPosition {
    pub fn arc_from_origin(&self) -> f64 {
        self.east_km.hypot(self.north_km)
    }

    pub fn arc_to(&self, other: &ArcPosition) -> f64 {
        (self.east_km - other.east_km).hypot(self.north_km - other.north_km)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReuseColor(pub u32);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellGeometry {
    pub cell_id: u32,
    /// Cell centre to satellite, km.
    pub d_o_s: f64,
    pub center: ArcPosition,
    pub color: ReuseColor,
}

impl CellGeometry {
    pub fn is_co_channel(&self, other: &CellGeometry) -> bool {
        self.cell_id != other.cell_id && self.color == other.color
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserPosition {
    pub user_id: String,
    pub cell_id: u32,
    /// User to satellite, km. Also serves as the straight-line range used by
    /// the link budget.
    pub d_mn_s: f64,
    /// Great-circle distance from user to its cell centre, km.
    pub d_mn_o: f64,
}

impl UserPosition {
    /// Places a user at an arc offset from its cell centre and derives both
    /// distances from the footprint.
    pub fn place(
        user_id: impl Into<String>,
        cell: &CellGeometry,
        offset: ArcPosition,
        earth: &EarthModel,
        altitude_km: f64,
    ) -> Result<Self, GeometryError> {
        let pos = ArcPosition {
            east_km: cell.center.east_km + offset.east_km,
            north_km: cell.center.north_km + offset.north_km,
        };
        let d_mn_o = offset.arc_from_origin();
        if d_mn_o > std::f64::consts::PI * earth.radius_km {
            return Err(GeometryError::InvalidValue(format!(
                "user offset {d_mn_o} km exceeds half a great circle"
            )));
        }
        Ok(Self {
            user_id: user_id.into(),
            cell_id: cell.cell_id,
            d_mn_s: earth.slant_range(altitude_km, pos.arc_from_origin()),
            d_mn_o,
        })
    }

    /// Straight-line user to satellite distance.
    pub fn d_n(&self) -> f64 {
        self.d_mn_s
    }
}

/// `1 - cos(x)` without cancellation for small `x`.
fn one_minus_cos(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let x2 = x * x;
        // Taylor series through x^8; remainder below 1e-26 on this range.
        x2 * (0.5 - x2 * (1.0 / 24.0 - x2 * (1.0 / 720.0 - x2 / 40320.0)))
    } else {
        1.0 - x.cos()
    }
}

/// Deviation angle between a user and the centre line of its cell, radians.
pub fn deviation_angle(
    cell_to_sat_km: f64,
    user_to_sat_km: f64,
    user_to_center_km: f64,
    earth: &EarthModel,
) -> Result<f64, GeometryError> {
    if !(cell_to_sat_km > 0.0) || !(user_to_sat_km > 0.0) {
        return Err(GeometryError::InvalidValue(format!(
            "satellite distances must be positive (d_o_s={cell_to_sat_km}, d_Mn_s={user_to_sat_km})"
        )));
    }
    if !(user_to_center_km >= 0.0) {
        return Err(GeometryError::InvalidValue(format!(
            "user to centre distance must be non-negative, got {user_to_center_km}"
        )));
    }
    let r = earth.radius_km;
    let chord_sq = 2.0 * r * r * one_minus_cos(user_to_center_km / r);
    let numerator = cell_to_sat_km * cell_to_sat_km + user_to_sat_km * user_to_sat_km - chord_sq;
    let argument = numerator / (2.0 * cell_to_sat_km * user_to_sat_km);
    if !(argument.abs() <= 1.0 + ARCCOS_CLAMP) {
        return Err(GeometryError::Domain {
            argument,
            cell_to_sat_km,
            user_to_sat_km,
            user_to_center_km,
        });
    }
    Ok(argument.clamp(-1.0, 1.0).acos())
}

/// Deviation angle for a placed user.
pub fn user_deviation_angle(
    cell: &CellGeometry,
    user: &UserPosition,
    earth: &EarthModel,
) -> Result<f64, GeometryError> {
    deviation_angle(cell.d_o_s, user.d_mn_s, user.d_mn_o, earth)
}

/// Inputs for [`build_footprint`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FootprintSpec {
    pub n_cells: u32,
    pub reuse_factor: u32,
    /// Centre-to-centre distance between adjacent cells, km.
    pub cell_spacing_km: f64,
    pub altitude_km: f64,
    pub earth: EarthModel,
}

/// Axial hex coordinates, spiral order from the centre cell outwards.
fn hex_spiral(n: usize) -> Vec<(i64, i64)> {
    const DIRS: [(i64, i64); 6] = [(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)];
    let mut out = Vec::with_capacity(n);
    out.push((0, 0));
    let mut ring = 1i64;
    while out.len() < n {
        // start of ring `k` sits k steps in direction 4 from the origin
        let (mut q, mut r) = (DIRS[4].0 * ring, DIRS[4].1 * ring);
        for dir in DIRS {
            for _ in 0..ring {
                if out.len() == n {
                    return out;
                }
                out.push((q, r));
                q += dir.0;
                r += dir.1;
            }
        }
        ring += 1;
    }
    out
}

fn reuse_color(q: i64, r: i64, reuse: u32) -> u32 {
    let c = match reuse {
        1 => 0,
        3 => (q - r).rem_euclid(3),
        4 => q.rem_euclid(2) + 2 * r.rem_euclid(2),
        7 => (q + 3 * r).rem_euclid(7),
        _ => unreachable!("reuse factor validated by caller"),
    };
    c as u32
}

/// Builds a hexagonal footprint with the standard reuse tiling. The seed
/// permutes the colour labels only; the co-channel structure is fixed by
/// the reuse factor.
pub fn build_footprint(
    spec: &FootprintSpec,
    layout_seed: u64,
) -> Result<Vec<CellGeometry>, GeometryError> {
    if spec.n_cells == 0 {
        return Err(GeometryError::NoCells);
    }
    if !matches!(spec.reuse_factor, 1 | 3 | 4 | 7) {
        return Err(GeometryError::UnsupportedReuse(spec.reuse_factor));
    }
    if !(spec.altitude_km > 0.0) || !(spec.cell_spacing_km > 0.0) {
        return Err(GeometryError::InvalidValue(
            "altitude and cell spacing must be positive".into(),
        ));
    }
    let mut labels: Vec<u32> = (0..spec.reuse_factor).collect();
    labels.shuffle(&mut ChaCha8Rng::seed_from_u64(layout_seed));

    let s = spec.cell_spacing_km;
    let cells = hex_spiral(spec.n_cells as usize)
        .into_iter()
        .enumerate()
        .map(|(i, (q, r))| {
            // pointy-top axial to planar
            let center = ArcPosition {
                east_km: s * (q as f64 + r as f64 / 2.0),
                north_km: s * (r as f64 * 3f64.sqrt() / 2.0),
            };
            CellGeometry {
                cell_id: i as u32,
                d_o_s: spec
                    .earth
                    .slant_range(spec.altitude_km, center.arc_from_origin()),
                center,
                color: ReuseColor(labels[reuse_color(q, r, spec.reuse_factor) as usize]),
            }
        })
        .collect();
    Ok(cells)
}

/// Cells sharing `victim`'s band, excluding the victim itself.
pub fn co_channel_cells<'a>(
    cells: &'a [CellGeometry],
    victim: &'a CellGeometry,
) -> impl Iterator<Item = &'a CellGeometry> + 'a {
    cells.iter().filter(move |c| victim.is_co_channel(c))
}

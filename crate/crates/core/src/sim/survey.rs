use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use super::streams;
use crate::channel::{sinr_capacity, AntennaPattern, InterfererLink, LinkParams, NoiseModel};
use crate::geometry::{
    build_footprint, deviation_angle, user_deviation_angle, ArcPosition, UserPosition,
};
use crate::ids::AccountId;

/// Uplink budget of one buyer at the satellite, with the other buyers in
/// co-channel cells as interferers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkSurveyRow {
    pub buyer: AccountId,
    pub cell: u32,
    pub color: u32,
    pub slant_range_km: f64,
    pub deviation_rad: f64,
    pub sat_gain: f64,
    pub received_power_w: f64,
    pub interference_w: f64,
    pub sinr: f64,
    pub capacity: f64,
}

pub fn link_survey(config: &ScenarioConfig) -> Result<Vec<LinkSurveyRow>, String> {
    let spec = config
        .geometry
        .footprint_spec()
        .map_err(|e| e.to_string())?;
    let layout_seed = streams::stream_u64(config.seed, streams::GEOMETRY);
    let cells = build_footprint(&spec, layout_seed).map_err(|e| e.to_string())?;
    let r = &config.radio;
    let antenna = AntennaPattern::new(r.g_sat_peak, r.beam_3db_deg.to_radians(), r.g_sat_floor)
        .map_err(|e| e.to_string())?;
    let noise = NoiseModel {
        n0: r.n0_w_per_hz,
        bandwidth_hz: r.bandwidth_hz,
    };
    let link = |distance_km: f64, g_sat: f64| LinkParams {
        p_tx: r.p_tx_w,
        g_user: r.g_user,
        g_sat,
        distance_km,
        wavelength_m: r.wavelength_m,
        fading: r.fading,
        activity: r.activity,
        polarization_isolation: r.polarization_isolation,
    };

    let mut placed = Vec::with_capacity(config.buyers.len());
    for b in &config.buyers {
        let cell = &cells[b.cell as usize];
        let offset = ArcPosition {
            east_km: b.east_km,
            north_km: b.north_km,
        };
        let user = UserPosition::place(b.id.as_str(), cell, offset, &spec.earth, spec.altitude_km)
            .map_err(|e| e.to_string())?;
        let pos = ArcPosition {
            east_km: cell.center.east_km + b.east_km,
            north_km: cell.center.north_km + b.north_km,
        };
        placed.push((b, cell, user, pos));
    }

    let mut rows = Vec::with_capacity(placed.len());
    for (b, cell, user, _) in &placed {
        let angle = user_deviation_angle(cell, user, &spec.earth).map_err(|e| e.to_string())?;
        let g_sat = antenna.gain(angle);
        let mut interferers = Vec::new();
        for (_, other_cell, other, other_pos) in &placed {
            if !cell.is_co_channel(other_cell) {
                continue;
            }
            // off-axis angle of the interferer seen from the victim beam
            let off_axis = deviation_angle(
                cell.d_o_s,
                other.d_mn_s,
                other_pos.arc_to(&cell.center),
                &spec.earth,
            )
            .map_err(|e| e.to_string())?;
            interferers.push(InterfererLink {
                color: cell.color,
                link: link(other.d_n(), antenna.gain(off_axis)),
            });
        }
        let budget = sinr_capacity(&link(user.d_n(), g_sat), cell.color, &interferers, &noise)
            .map_err(|e| e.to_string())?;
        rows.push(LinkSurveyRow {
            buyer: b.id.clone(),
            cell: cell.cell_id,
            color: cell.color.0,
            slant_range_km: user.d_n(),
            deviation_rad: angle,
            sat_gain: g_sat,
            received_power_w: budget.received_power,
            interference_w: budget.interference,
            sinr: budget.sinr,
            capacity: budget.capacity,
        });
    }
    Ok(rows)
}

//! Uplink link budget under spectrum reuse.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::ReuseColor;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("invalid link parameter: {0}")]
    Domain(String),
    #[error(
        "interferer in colour {interferer:?} cannot interfere with a victim in colour {victim:?}"
    )]
    NotCoChannel {
        victim: ReuseColor,
        interferer: ReuseColor,
    },
}

/// Gaussian-rolloff beam pattern with a floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaPattern {
    pub peak_gain: f64,
    pub rolloff_3db_rad: f64,
    pub floor_gain: f64,
}

impl AntennaPattern {
    pub fn new(
        peak_gain: f64,
        rolloff_3db_rad: f64,
        floor_gain: f64,
    ) -> Result<Self, ChannelError> {
        if !(floor_gain > 0.0) || !(peak_gain >= floor_gain) || !(rolloff_3db_rad > 0.0) {
            return Err(ChannelError::Domain(format!(
                "antenna pattern needs peak >= floor > 0 and positive rolloff \
                 (peak={peak_gain}, floor={floor_gain}, rolloff={rolloff_3db_rad})"
            )));
        }
        Ok(Self {
            peak_gain,
            rolloff_3db_rad,
            floor_gain,
        })
    }

    /// Constant pattern, handy when the beam shape is irrelevant.
    pub fn isotropic(gain: f64) -> Self {
        Self {
            peak_gain: gain,
            rolloff_3db_rad: 1.0,
            floor_gain: gain,
        }
    }

    pub fn gain(&self, angle_rad: f64) -> f64 {
        let x = angle_rad / self.rolloff_3db_rad;
        (self.peak_gain * (-std::f64::consts::LN_2 * x * x).exp()).max(self.floor_gain)
    }
}

/// One transmitter's path to the satellite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    /// Transmit power, W.
    pub p_tx: f64,
    /// User antenna gain toward the satellite.
    pub g_user: f64,
    /// Satellite beam gain at the user's deviation angle.
    pub g_sat: f64,
    /// Straight-line distance to the satellite, km.
    pub distance_km: f64,
    /// Carrier wavelength, m.
    pub wavelength_m: f64,
    /// Fading loss, divides the received power.
    pub fading: f64,
    /// Activity factor in [0, 1]; only used when the link is an interferer.
    pub activity: f64,
    /// Polarisation isolation toward the victim cell, in [0, 1].
    pub polarization_isolation: f64,
}

impl LinkParams {
    pub fn validate(&self) -> Result<(), ChannelError> {
        let bad = |what: &str, v: f64| Err(ChannelError::Domain(format!("{what} = {v}")));
        if !(self.p_tx >= 0.0) {
            return bad("transmit power", self.p_tx);
        }
        if !(self.distance_km > 0.0) {
            return bad("distance", self.distance_km);
        }
        if !(self.wavelength_m > 0.0) {
            return bad("wavelength", self.wavelength_m);
        }
        if !(self.fading > 0.0) {
            return bad("fading", self.fading);
        }
        if !(self.g_user >= 0.0) || !(self.g_sat >= 0.0) {
            return bad("antenna gain", self.g_user.min(self.g_sat));
        }
        if !(0.0..=1.0).contains(&self.activity) {
            return bad("activity factor", self.activity);
        }
        if !(0.0..=1.0).contains(&self.polarization_isolation) {
            return bad("polarization isolation", self.polarization_isolation);
        }
        Ok(())
    }

    /// Free-space loss factor (4 pi d / lambda)^2 with d in metres.
    pub fn free_space_loss(&self) -> f64 {
        let ratio = 4.0 * std::f64::consts::PI * self.distance_km * 1e3 / self.wavelength_m;
        ratio * ratio
    }
}

/// A co-channel transmitter tagged with the reuse colour of its cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfererLink {
    pub color: ReuseColor,
    pub link: LinkParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Noise spectral density, W/Hz.
    pub n0: f64,
    /// Bandwidth, Hz.
    pub bandwidth_hz: f64,
}

impl NoiseModel {
    pub fn power(&self) -> Result<f64, ChannelError> {
        if !(self.n0 > 0.0) || !(self.bandwidth_hz > 0.0) {
            return Err(ChannelError::Domain(format!(
                "noise needs N0 > 0 and B > 0 (N0={}, B={})",
                self.n0, self.bandwidth_hz
            )));
        }
        Ok(self.n0 * self.bandwidth_hz)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub received_power: f64,
    pub interference: f64,
    pub sinr: f64,
    /// bit/s/Hz
    pub capacity: f64,
}

pub fn receive_power(link: &LinkParams) -> Result<f64, ChannelError> {
    link.validate()?;
    Ok(link.p_tx * link.g_user * link.g_sat / (link.free_space_loss() * link.fading))
}

/// Sum of interferer powers at the satellite, scaled by activity and
/// polarisation isolation. Every interferer must share the victim's colour.
pub fn aggregate_interference(
    victim: ReuseColor,
    interferers: &[InterfererLink],
) -> Result<f64, ChannelError> {
    let mut total = 0.0;
    for i in interferers {
        if i.color != victim {
            return Err(ChannelError::NotCoChannel {
                victim,
                interferer: i.color,
            });
        }
        total += receive_power(&i.link)? * i.link.activity * i.link.polarization_isolation;
    }
    Ok(total)
}

pub fn sinr_capacity(
    signal: &LinkParams,
    victim: ReuseColor,
    interferers: &[InterfererLink],
    noise: &NoiseModel,
) -> Result<LinkBudget, ChannelError> {
    let received_power = receive_power(signal)?;
    let interference = aggregate_interference(victim, interferers)?;
    let sinr = received_power / (interference + noise.power()?);
    Ok(LinkBudget {
        received_power,
        interference,
        sinr,
        capacity: (1.0 + sinr).log2(),
    })
}

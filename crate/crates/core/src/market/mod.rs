//! Interference-pricing game between the satellite (leader) and a
//! terrestrial entrant (follower) sharing a band with a protected
//! incumbent.
//!
//! The satellite sets an interference price `pi`; a user with preference
//! `theta` answers with the power that maximises its utility subject to its
//! own SINR floor and the incumbent's SINR protection. The satellite's
//! profit integrates the users' payments over the preference density.

mod density;
mod game;
pub mod quadrature;
pub mod search;
mod trade;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use density::PreferenceDensity;
pub use game::{
    best_response_power, expected_payment, incumbent_sinr, optimal_price, participates,
    satellite_utility, user_payment, user_sinr, user_utility, BestResponse, Binding, PriceRange,
    PricingSolution, SIMPSON_TOL,
};
pub use trade::{build_trade, parse_memo, to_millicoins, NoTrade, TradeMemo, TradeOutcome};

use crate::ledger::LedgerError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MarketError {
    #[error("invalid market parameter: {0}")]
    InvalidParams(String),
    #[error("buyer {buyer} holds {balance} milli-coins, trade costs {amount}")]
    InsufficientBalance {
        buyer: String,
        balance: u64,
        amount: u64,
    },
    #[error(transparent)]
    Ledger(#[from] LedgerError),
}

/// Utility-model parameters. Bandwidths share one normalised unit with the
/// noise densities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MarketParams {
    /// Monetary weight of user capacity (coin per bit/s/Hz).
    pub omega: f64,
    /// Bandwidth price (coin per unit bandwidth).
    pub epsilon: f64,
    pub kappa: f64,
    /// Marginal cost per channel.
    pub x_loss: f64,
    /// Channels of the traded spectrum type.
    pub n_channels: u32,
    /// Leased bandwidth.
    pub bandwidth_i: f64,
    /// Entrant noise bandwidth.
    pub bandwidth_c: f64,
    /// Incumbent noise bandwidth.
    pub bandwidth_n: f64,
    /// Entrant-to-satellite channel coefficient.
    pub f_cs: f64,
    /// Incumbent channel coefficient.
    pub f_ns: f64,
    /// Incumbent transmit power.
    pub p_n: f64,
    pub n0_alpha_c: f64,
    pub n0_alpha_n: f64,
    /// SINR floor for both entrant and incumbent.
    pub gamma_tar: f64,
    pub density: PreferenceDensity,
}

impl Default for MarketParams {
    fn default() -> Self {
        Self {
            omega: 1.0,
            epsilon: 0.01,
            kappa: 0.5,
            x_loss: 0.1,
            n_channels: 5,
            bandwidth_i: 10.0,
            bandwidth_c: 10.0,
            bandwidth_n: 10.0,
            f_cs: 0.2,
            f_ns: 0.1,
            p_n: 1.0,
            n0_alpha_c: 0.001,
            n0_alpha_n: 0.002,
            gamma_tar: 0.3,
            density: PreferenceDensity::Uniform { lo: 0.5, hi: 1.5 },
        }
    }
}

impl MarketParams {
    pub fn validate(&self) -> Result<(), MarketError> {
        let positive = [
            ("omega", self.omega),
            ("kappa", self.kappa),
            ("bandwidth_i", self.bandwidth_i),
            ("bandwidth_c", self.bandwidth_c),
            ("bandwidth_n", self.bandwidth_n),
            ("f_cs", self.f_cs),
            ("f_ns", self.f_ns),
            ("p_n", self.p_n),
            ("n0_alpha_c", self.n0_alpha_c),
            ("n0_alpha_n", self.n0_alpha_n),
            ("gamma_tar", self.gamma_tar),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(MarketError::InvalidParams(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        for (name, v) in [("epsilon", self.epsilon), ("x_loss", self.x_loss)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(MarketError::InvalidParams(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        if self.n_channels == 0 {
            return Err(MarketError::InvalidParams(
                "n_channels must be at least 1".into(),
            ));
        }
        self.density.validate()
    }

    /// Sets the leased bandwidth and both noise bandwidths together.
    pub fn with_bandwidth(mut self, b: f64) -> Self {
        self.bandwidth_i = b;
        self.bandwidth_c = b;
        self.bandwidth_n = b;
        self
    }

    /// Interference plus noise seen by the entrant.
    pub fn entrant_disturbance(&self) -> f64 {
        self.p_n * self.f_ns + self.n0_alpha_c * self.bandwidth_c
    }

    /// Bandwidth charge `epsilon * B_i`.
    pub fn bandwidth_charge(&self) -> f64 {
        self.epsilon * self.bandwidth_i
    }
}

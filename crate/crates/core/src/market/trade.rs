use serde::{Deserialize, Serialize};

use super::game::{participates, Binding, PricingSolution};
use super::{MarketError, MarketParams};
use crate::ids::AccountId;
use crate::ledger::{CoinAccount, IdentityRegistry, Transaction, MILLI_PER_COIN};

/// Why a buyer did not trade.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoTrade {
    /// The SINR floors admit no power.
    Infeasible,
    /// Best response leaves the buyer with negative utility.
    Abstains,
    /// Charge rounds to zero milli-coins.
    ZeroCharge,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TradeOutcome {
    Trade(Transaction),
    NoTrade(NoTrade),
}

/// Trade terms recorded in a purchase memo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeMemo {
    pub band: String,
    pub bandwidth: f64,
    pub pi: f64,
    pub power: f64,
    pub theta: f64,
}

impl TradeMemo {
    pub fn render(&self) -> String {
        format!(
            "band={};B={};pi={};p={};theta={}",
            self.band, self.bandwidth, self.pi, self.power, self.theta
        )
    }
}

pub fn parse_memo(memo: &str) -> Option<TradeMemo> {
    let mut band = None;
    let (mut bandwidth, mut pi, mut power, mut theta) = (None, None, None, None);
    for part in memo.split(';') {
        let (k, v) = part.split_once('=')?;
        match k {
            "band" => band = Some(v.to_owned()),
            "B" => bandwidth = v.parse().ok(),
            "pi" => pi = v.parse().ok(),
            "p" => power = v.parse().ok(),
            "theta" => theta = v.parse().ok(),
            _ => return None,
        }
    }
    Some(TradeMemo {
        band: band?,
        bandwidth: bandwidth?,
        pi: pi?,
        power: power?,
        theta: theta?,
    })
}

/// Converts coins to milli-coins, rounding half to even. Values within
/// 1e-9 milli-coin of a half are treated as ties.
pub fn to_millicoins(coins: f64) -> u64 {
    let m = coins * MILLI_PER_COIN as f64;
    let floor = m.floor();
    let frac = m - floor;
    let rounded = if (frac - 0.5).abs() < 1e-9 {
        if floor % 2.0 == 0.0 {
            floor
        } else {
            floor + 1.0
        }
    } else {
        m.round()
    };
    rounded.max(0.0) as u64
}

/// Settles one buyer's purchase at the solved price: bandwidth charge plus
/// the interference charge at the buyer's best-response power.
#[allow(clippy::too_many_arguments)]
pub fn build_trade(
    params: &MarketParams,
    solution: &PricingSolution,
    registry: &IdentityRegistry,
    buyer: &CoinAccount,
    seller: &AccountId,
    theta: f64,
    band: &str,
    timestamp: u64,
) -> Result<TradeOutcome, MarketError> {
    let pi = solution.pi_star;
    let Some(br) = participates(params, pi, theta) else {
        let reason = if super::best_response_power(params, pi, theta).binding == Binding::Infeasible
        {
            NoTrade::Infeasible
        } else {
            NoTrade::Abstains
        };
        return Ok(TradeOutcome::NoTrade(reason));
    };
    let charge = params.bandwidth_charge() + pi * theta * br.p_c_star * params.f_cs;
    let amount = to_millicoins(charge);
    if amount == 0 {
        return Ok(TradeOutcome::NoTrade(NoTrade::ZeroCharge));
    }
    if buyer.balance < amount {
        return Err(MarketError::InsufficientBalance {
            buyer: buyer.account_id.to_string(),
            balance: buyer.balance,
            amount,
        });
    }
    let memo = TradeMemo {
        band: band.to_owned(),
        bandwidth: params.bandwidth_i,
        pi,
        power: br.p_c_star,
        theta,
    };
    let tx = Transaction::purchase(
        registry,
        buyer.account_id.clone(),
        seller.clone(),
        amount,
        memo.render(),
        timestamp,
    )?;
    Ok(TradeOutcome::Trade(tx))
}

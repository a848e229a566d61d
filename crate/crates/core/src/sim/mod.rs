//! Seeded end-to-end scenario runs and pricing sweeps.
//!
//! A run repeats trading epochs over one scenario: solve the satellite's
//! price, draw each buyer's preference, build the purchases, then settle
//! them through a consensus round. Epochs are a simulation device for
//! exercising the ledger and reputation dynamics; the pricing game itself
//! is static.

mod config;
pub mod streams;
mod survey;
mod sweep;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{
    linspace, BuyerConfig, ConfigError, ExperimentConfig, GeometryConfig, LedgerConfig,
    PricingConfig, RadioConfig, ReputationConfig, ScenarioConfig, SeedLog,
};
pub use survey::{link_survey, LinkSurveyRow};
pub use sweep::{
    fig4_csv, fig5_csv, sweep_fig4, sweep_fig5, Fig4Row, Fig5Row, FIG4_HEADER, FIG5_HEADER,
};

use crate::consensus::{ConsensusEngine, SimNetwork, TraceRecord};
use crate::ids::{AccountId, NodeId};
use crate::ledger::{
    chain_digest, Balances, Block, CoinAccount, Digest, IdentityRegistry, Validator,
};
use crate::market::{
    build_trade, optimal_price, MarketError, NoTrade, PricingSolution, TradeOutcome,
};
use crate::reputation::{InteractionLog, ReputationRow, ReputationTable};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("epoch {epoch}, {step}: {message}")]
    Step {
        epoch: u64,
        step: &'static str,
        message: String,
    },
}

fn step_err(epoch: u64, step: &'static str, e: impl std::fmt::Display) -> SimError {
    SimError::Step {
        epoch,
        step,
        message: e.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TradeStatus {
    Traded,
    Infeasible,
    Abstains,
    ZeroCharge,
    InsufficientBalance,
}

impl TradeStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            TradeStatus::Traded => "traded",
            TradeStatus::Infeasible => "infeasible",
            TradeStatus::Abstains => "abstains",
            TradeStatus::ZeroCharge => "zero_charge",
            TradeStatus::InsufficientBalance => "insufficient_balance",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuyerTrade {
    pub buyer: AccountId,
    pub theta: f64,
    pub status: TradeStatus,
    /// Milli-coins; zero unless traded.
    pub amount: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: u64,
    pub pi_star: f64,
    pub u_s_star: f64,
    pub trades: Vec<BuyerTrade>,
    pub leader: NodeId,
    pub height: u64,
    pub block_hash: Digest,
    pub retries: u32,
    pub excluded: Vec<NodeId>,
    pub qualified_after: Vec<NodeId>,
    pub reputation_after: BTreeMap<NodeId, f64>,
}

pub const EPOCH_CSV_HEADER: [&str; 9] = [
    "epoch", "leader", "height", "retries", "pi_star", "u_s_star", "trades", "volume", "excluded",
];

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub seed: u64,
    pub epochs_run: u64,
    pub pricing: PricingSolution,
    pub epochs: Vec<EpochRecord>,
    pub chain_height: u64,
    pub tip_hash: Digest,
    pub chain_digest: Digest,
    pub trace_hash: Digest,
    pub honest_digests: BTreeMap<NodeId, Digest>,
    pub initial_total: u128,
    pub minted: u128,
    pub balances: Vec<CoinAccount>,
    pub reputation: Vec<ReputationRow>,
    pub node_reputation: BTreeMap<NodeId, f64>,
    pub threshold: f64,
    pub link_survey: Vec<LinkSurveyRow>,
    #[serde(skip)]
    pub chain: Vec<Block>,
    #[serde(skip)]
    pub trace: Vec<TraceRecord>,
    #[serde(skip)]
    pub table: ReputationTable,
}

impl RunReport {
    pub fn final_total(&self) -> u128 {
        self.balances.iter().map(|a| a.balance as u128).sum()
    }

    pub fn balance(&self, account: &AccountId) -> u64 {
        self.balances
            .iter()
            .find(|a| &a.account_id == account)
            .map_or(0, |a| a.balance)
    }

    pub fn epochs_csv(&self, delim: char) -> String {
        let d = delim.to_string();
        let mut out = EPOCH_CSV_HEADER.join(&d);
        out.push('\n');
        for e in &self.epochs {
            let traded = e.trades.iter().filter(|t| t.status == TradeStatus::Traded);
            let count = traded.clone().count();
            let volume: u64 = traded.map(|t| t.amount).sum();
            let excluded: Vec<&str> = e.excluded.iter().map(|n| n.as_str()).collect();
            let row = [
                e.epoch.to_string(),
                e.leader.to_string(),
                e.height.to_string(),
                e.retries.to_string(),
                e.pi_star.to_string(),
                e.u_s_star.to_string(),
                count.to_string(),
                volume.to_string(),
                excluded.join(" "),
            ];
            out.push_str(&row.join(&d));
            out.push('\n');
        }
        out
    }
}

/// Identity registry for a scenario: every node, buyer and the satellite.
pub fn scenario_registry(config: &ScenarioConfig) -> IdentityRegistry {
    let mut registry = IdentityRegistry::new(config.seed);
    for n in &config.nodes {
        registry.issue(n.node_id.as_str());
    }
    for b in &config.buyers {
        registry.issue(b.id.as_str());
    }
    registry.issue(config.ledger.satellite_account.as_str());
    registry
}

/// Opening balances: buyers as configured, the satellite at zero.
pub fn initial_balances(config: &ScenarioConfig) -> Balances {
    let mut b = Balances::default();
    for buyer in &config.buyers {
        b.0.insert(buyer.id.clone(), buyer.balance);
    }
    b.0.entry(config.ledger.satellite_account.clone())
        .or_insert(0);
    b
}

/// Reputation table with every operator/node pair seeded.
pub fn initial_table(config: &ScenarioConfig) -> Result<ReputationTable, ConfigError> {
    let rep = &config.reputation;
    let err = |e: crate::reputation::ReputationError| ConfigError::Invalid(e.to_string());
    let mut table = ReputationTable::new(rep.phi, config.threshold()).map_err(err)?;
    let prior = rep
        .default_seed
        .map_or(InteractionLog::default(), |s| InteractionLog {
            positive: s.positive,
            negative: s.negative,
            suc: s.suc,
        });
    for op in &rep.operators {
        table.add_operator(op.clone());
        for n in &config.nodes {
            let log = n
                .initial_reputation_log
                .iter()
                .rev()
                .find(|s| &s.operator == op)
                .map_or(prior, |s| s.log());
            table
                .set_log(op.clone(), n.node_id.clone(), log)
                .map_err(err)?;
        }
    }
    Ok(table)
}

fn reputations(config: &ScenarioConfig, table: &ReputationTable) -> BTreeMap<NodeId, f64> {
    config
        .nodes
        .iter()
        .map(|n| {
            (
                n.node_id.clone(),
                table.node_reputation(&n.node_id).unwrap_or(0.0),
            )
        })
        .collect()
}

/// Runs every epoch of the scenario.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunReport, SimError> {
    config.validate()?;
    let seed = config.seed;
    let registry = scenario_registry(config);
    let initial = initial_balances(config);
    let initial_total = initial.total();
    let mut table = initial_table(config)?;
    let validator = Validator::new(registry.clone(), config.ledger.chain_params(), initial);
    let network = SimNetwork::new(streams::stream(seed, streams::NETWORK), config.network);
    let mut engine = ConsensusEngine::new(
        config.nodes.clone(),
        validator,
        network,
        streams::stream(seed, streams::BEHAVIOR),
        config.ledger.max_retries,
    );
    let mut market_rng = streams::stream(seed, streams::MARKET);
    let link_survey = link_survey(config).map_err(|e| step_err(0, "geometry", e))?;

    // The game is static, so every epoch's solve gives the same price.
    let pricing = optimal_price(&config.market, config.pricing.range(), config.pricing.grid)
        .map_err(|e| step_err(1, "pricing", e))?;

    let sat = &config.ledger.satellite_account;
    let mut epochs = Vec::with_capacity(config.epochs as usize);
    for epoch in 1..=config.epochs {
        let mut spendable = engine.balances().clone();
        let mut txs = Vec::new();
        let mut trades = Vec::new();
        for buyer in &config.buyers {
            let theta = config.market.density.sample(&mut market_rng);
            let account = CoinAccount {
                account_id: buyer.id.clone(),
                balance: spendable.balance(&buyer.id),
                wallet_address: crate::ledger::wallet_address(&buyer.id),
            };
            let band = format!("cell{}", buyer.cell);
            let outcome = build_trade(
                &config.market,
                &pricing,
                &registry,
                &account,
                sat,
                theta,
                &band,
                engine.network().now(),
            );
            let (status, amount) = match outcome {
                Ok(TradeOutcome::Trade(tx)) => {
                    let amount = tx.amount;
                    spendable
                        .debit(&buyer.id, amount, tx.tx_id)
                        .map_err(|e| step_err(epoch, "trade", e))?;
                    txs.push(tx);
                    (TradeStatus::Traded, amount)
                }
                Ok(TradeOutcome::NoTrade(NoTrade::Infeasible)) => (TradeStatus::Infeasible, 0),
                Ok(TradeOutcome::NoTrade(NoTrade::Abstains)) => (TradeStatus::Abstains, 0),
                Ok(TradeOutcome::NoTrade(NoTrade::ZeroCharge)) => (TradeStatus::ZeroCharge, 0),
                Err(MarketError::InsufficientBalance { .. }) => {
                    (TradeStatus::InsufficientBalance, 0)
                }
                Err(e) => return Err(step_err(epoch, "trade", e)),
            };
            trades.push(BuyerTrade {
                buyer: buyer.id.clone(),
                theta,
                status,
                amount,
            });
        }
        let round = engine
            .run_round(&mut table, txs)
            .map_err(|e| step_err(epoch, "consensus", e))?;
        if !round.dropped_txs.is_empty() {
            return Err(step_err(
                epoch,
                "consensus",
                format!(
                    "{} purchase(s) dropped by the leader",
                    round.dropped_txs.len()
                ),
            ));
        }
        epochs.push(EpochRecord {
            epoch,
            pi_star: pricing.pi_star,
            u_s_star: pricing.u_s_star,
            trades,
            leader: round.leader,
            height: round.block.height(),
            block_hash: round.block.hash(),
            retries: round.retries,
            excluded: round.excluded,
            qualified_after: engine.ranking(&table),
            reputation_after: reputations(config, &table),
        });
    }

    let chain = engine.chain().to_vec();
    let tip = chain.last().expect("chain holds genesis");
    let node_reputation = reputations(config, &table);
    Ok(RunReport {
        seed,
        epochs_run: config.epochs,
        pricing,
        epochs,
        chain_height: tip.height(),
        tip_hash: tip.hash(),
        chain_digest: chain_digest(&chain),
        trace_hash: engine.trace_hash(),
        honest_digests: engine.honest_digests(),
        initial_total,
        minted: tip.height() as u128 * config.ledger.mining_reward as u128,
        balances: engine.balances().accounts(),
        reputation: table.rows(),
        node_reputation,
        threshold: table.threshold(),
        link_survey,
        trace: engine.trace().to_vec(),
        chain,
        table,
    })
}

/// Audits a chain dump. With a scenario the full rules apply, including
/// signatures and settlement against the scenario's opening balances;
/// without one only the structure is checked.
pub fn audit_chain(
    dump: &str,
    config: Option<&ScenarioConfig>,
) -> Result<crate::ledger::ChainVerdict, crate::ledger::dump::DumpError> {
    let chain = crate::ledger::dump::parse_chain(dump)?;
    let genesis = Block::genesis();
    Ok(match config {
        Some(c) => Validator::new(
            scenario_registry(c),
            c.ledger.chain_params(),
            initial_balances(c),
        )
        .validate_chain(&chain, &genesis),
        None => crate::ledger::check_structure(&chain, &genesis),
    })
}

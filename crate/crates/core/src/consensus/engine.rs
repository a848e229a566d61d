use std::collections::BTreeMap;

use rand::RngCore;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::network::SimNetwork;
use super::{
    trace_hash, Behavior, ConsensusMessage, MessageKind, NodeConfig, RoundFailure, TraceRecord,
    Verdict,
};
use crate::ids::NodeId;
use crate::ledger::{
    chain_digest, mine_block, Balances, Block, Digest, MineOutcome, MiningContext, Transaction,
    TxKind, Validator,
};
use crate::reputation::{Outcome, ReputationTable};

/// A node's local copy of the chain and the balances after its tip.
#[derive(Debug, Clone, PartialEq)]
pub struct Replica {
    pub chain: Vec<Block>,
    pub state: Balances,
}

impl Replica {
    pub fn new(genesis: Block, initial: Balances) -> Self {
        Self {
            chain: vec![genesis],
            state: initial,
        }
    }

    pub fn tip(&self) -> &Block {
        self.chain.last().expect("replica holds at least genesis")
    }

    pub fn digest(&self) -> Digest {
        chain_digest(&self.chain)
    }

    /// Checks `block` against the local tip without applying it.
    pub fn check(&self, validator: &Validator, block: &Block) -> Option<Balances> {
        validator.check_next(self.tip(), &self.state, block).ok()
    }

    fn apply(&mut self, validator: &Validator, block: &Block) -> bool {
        if self.tip().hash() == block.hash() {
            return true;
        }
        match self.check(validator, block) {
            Some(next) => {
                self.chain.push(block.clone());
                self.state = next;
                true
            }
            None => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VoteOutcome {
    Approved,
    Objected,
    BadWatermark,
    Missing,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteRecord {
    /// 0 for the proposal, then one per retry.
    pub attempt: u32,
    pub node: NodeId,
    pub outcome: VoteOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundReport {
    pub round: u64,
    pub leader: NodeId,
    pub block: Block,
    /// Nodes that received the PROPOSE.
    pub proposed_to: Vec<NodeId>,
    pub retries: u32,
    pub votes: Vec<VoteRecord>,
    /// Persistent objectors or silent nodes the commit went ahead without.
    pub excluded: Vec<NodeId>,
    /// Pending transactions left out as invalid or unaffordable.
    pub dropped_txs: Vec<Digest>,
    /// Higher-ranked nodes that could not produce the block.
    pub skipped_leaders: Vec<NodeId>,
}

/// Node-side handling of PROPOSE or RETRY. Offline nodes stay silent.
pub fn verify_proposal(
    node: &NodeConfig,
    msg: &ConsensusMessage,
    validator: &Validator,
    replica: &Replica,
    rng: &mut dyn RngCore,
) -> Option<ConsensusMessage> {
    let reply = |verdict| {
        ConsensusMessage::signed(
            validator.registry(),
            MessageKind::VerifyResult,
            msg.round,
            &node.node_id,
            msg.block_hash,
            msg.nonce_phi,
            Some(verdict),
            None,
        )
    };
    match node.behavior {
        Behavior::Offline => None,
        Behavior::MaliciousReject => Some(reply(Verdict::Object)),
        Behavior::MaliciousTamper => {
            let mut m = reply(Verdict::Approve);
            let mut forged = vec![0u8; 32];
            rng.fill_bytes(&mut forged);
            m.watermark = forged;
            Some(m)
        }
        Behavior::Honest => {
            let ok = msg.block.as_ref().is_some_and(|b| {
                b.hash() == msg.block_hash && replica.check(validator, b).is_some()
            });
            Some(reply(if ok {
                Verdict::Approve
            } else {
                Verdict::Object
            }))
        }
    }
}

/// Drives commit rounds. Owns the canonical ledger, every node's replica,
/// the network and the message trace.
#[derive(Debug, Clone)]
pub struct ConsensusEngine {
    nodes: BTreeMap<NodeId, NodeConfig>,
    validator: Validator,
    canonical: Replica,
    replicas: BTreeMap<NodeId, Replica>,
    network: SimNetwork,
    behavior_rng: ChaCha8Rng,
    trace: Vec<TraceRecord>,
    max_retries: u32,
    round: u64,
}

impl ConsensusEngine {
    pub fn new(
        nodes: Vec<NodeConfig>,
        validator: Validator,
        network: SimNetwork,
        behavior_rng: ChaCha8Rng,
        max_retries: u32,
    ) -> Self {
        let genesis = Block::genesis();
        let canonical = Replica::new(genesis, validator.initial_balances().clone());
        let replicas = nodes
            .iter()
            .map(|n| (n.node_id.clone(), canonical.clone()))
            .collect();
        Self {
            nodes: nodes.into_iter().map(|n| (n.node_id.clone(), n)).collect(),
            validator,
            canonical,
            replicas,
            network,
            behavior_rng,
            trace: Vec::new(),
            max_retries,
            round: 0,
        }
    }

    pub fn chain(&self) -> &[Block] {
        &self.canonical.chain
    }

    pub fn balances(&self) -> &Balances {
        &self.canonical.state
    }

    pub fn validator(&self) -> &Validator {
        &self.validator
    }

    pub fn nodes(&self) -> impl Iterator<Item = &NodeConfig> {
        self.nodes.values()
    }

    pub fn replica(&self, node: &NodeId) -> Option<&Replica> {
        self.replicas.get(node)
    }

    pub fn trace(&self) -> &[TraceRecord] {
        &self.trace
    }

    pub fn trace_hash(&self) -> Digest {
        trace_hash(&self.trace)
    }

    pub fn network(&self) -> &SimNetwork {
        &self.network
    }

    pub fn rounds_run(&self) -> u64 {
        self.round
    }

    /// Chain digest of every honest node's replica.
    pub fn honest_digests(&self) -> BTreeMap<NodeId, Digest> {
        self.nodes
            .values()
            .filter(|n| n.behavior == Behavior::Honest)
            .map(|n| (n.node_id.clone(), self.replicas[&n.node_id].digest()))
            .collect()
    }

    /// Qualified nodes by descending reputation, ties to the lowest id.
    pub fn ranking(&self, table: &ReputationTable) -> Vec<NodeId> {
        let mut ranked: Vec<(f64, NodeId)> = self
            .nodes
            .keys()
            .filter(|id| table.is_qualified_miner(id))
            .map(|id| (table.node_reputation(id).unwrap_or(0.0), id.clone()))
            .collect();
        ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
        ranked.into_iter().map(|(_, id)| id).collect()
    }

    fn deadline(&self) -> u64 {
        self.network.now() + 2 * self.network.model().max_delay() + 1
    }

    /// Keeps verified purchases the canonical state can settle, in order.
    fn affordable(&self, pending: Vec<Transaction>) -> (Vec<Transaction>, Vec<Digest>) {
        let mut scratch = self.canonical.state.clone();
        let mut keep = Vec::new();
        let mut dropped = Vec::new();
        for tx in pending {
            let ok = tx.kind == TxKind::SpectrumPurchase
                && tx.verify(self.validator.registry()).is_ok()
                && scratch.balance(&tx.payer) >= tx.amount
                && scratch.debit(&tx.payer, tx.amount, tx.tx_id).is_ok()
                && scratch.credit(&tx.payee, tx.amount).is_ok();
            if ok {
                keep.push(tx);
            } else {
                dropped.push(tx.tx_id);
            }
        }
        (keep, dropped)
    }

    /// Delivers queued messages until the network is idle. Votes addressed
    /// to `leader` for the current round are collected into `votes`.
    fn pump(&mut self, leader: &NodeId, votes: &mut BTreeMap<NodeId, ConsensusMessage>) {
        while let Some(d) = self.network.next_delivery() {
            let registry = self.validator.registry();
            self.trace.push(TraceRecord {
                tick: d.tick,
                sender: d.msg.sender.clone(),
                receiver: d.to.clone(),
                kind: d.msg.kind,
                round: d.msg.round,
                verdict: d.msg.verdict,
                watermark_valid: d.msg.watermark_valid(registry),
            });
            let Some(node) = self.nodes.get(&d.to) else {
                continue;
            };
            match d.msg.kind {
                MessageKind::Propose | MessageKind::Retry => {
                    let replica = &self.replicas[&d.to];
                    if let Some(reply) = verify_proposal(
                        node,
                        &d.msg,
                        &self.validator,
                        replica,
                        &mut self.behavior_rng,
                    ) {
                        self.network.send(&d.msg.sender, reply);
                    }
                }
                MessageKind::VerifyResult => {
                    if &d.to == leader && d.msg.round == self.round {
                        votes.insert(d.msg.sender.clone(), d.msg);
                    }
                }
                MessageKind::Commit => {
                    if node.behavior != Behavior::Offline {
                        if let (Some(block), Some(replica)) =
                            (&d.msg.block, self.replicas.get_mut(&d.to))
                        {
                            replica.apply(&self.validator, block);
                        }
                    }
                }
            }
        }
    }

    /// Runs one round: leader election, mining, proposal, votes, retries
    /// and commit. Every vote is recorded in `table`.
    pub fn run_round(
        &mut self,
        table: &mut ReputationTable,
        pending: Vec<Transaction>,
    ) -> Result<RoundReport, RoundFailure> {
        self.round += 1;
        let round = self.round;
        let ranking = self.ranking(table);
        if ranking.is_empty() {
            return Err(RoundFailure::NoQualifiedNode { round });
        }
        let phi = self.network.beacon();
        let (txs, dropped_txs) = self.affordable(pending);

        let mut skipped_leaders = Vec::new();
        let mut mined = None;
        for candidate in &ranking {
            let node = &self.nodes[candidate];
            if node.behavior == Behavior::Offline {
                skipped_leaders.push(candidate.clone());
                continue;
            }
            let ctx = MiningContext {
                registry: self.validator.registry(),
                table,
                params: self.validator.params(),
                state: &self.canonical.state,
                timestamp: self.network.now(),
            };
            let outcome = mine_block(
                &ctx,
                self.canonical.tip(),
                txs.clone(),
                candidate,
                node.compute_power,
            )
            .map_err(|source| RoundFailure::Ledger { round, source })?;
            match outcome {
                MineOutcome::Mined(b) => {
                    mined = Some((candidate.clone(), b));
                    break;
                }
                MineOutcome::Exhausted { .. } => skipped_leaders.push(candidate.clone()),
            }
        }
        let Some((leader, block)) = mined else {
            return Err(RoundFailure::NoMiner {
                round,
                tried: skipped_leaders,
            });
        };
        let block_hash = block.hash();
        let proposed_to: Vec<NodeId> = ranking
            .iter()
            .filter(|id| **id != leader)
            .cloned()
            .collect();
        let mut ids = proposed_to.clone();
        ids.sort();

        let mut targets = ids;
        let mut votes_log = Vec::new();
        let mut retries = 0;
        for attempt in 0..=self.max_retries {
            if targets.is_empty() {
                break;
            }
            if attempt > 0 {
                retries += 1;
            }
            let kind = if attempt == 0 {
                MessageKind::Propose
            } else {
                MessageKind::Retry
            };
            let deadline = self.deadline();
            for to in &targets {
                let msg = ConsensusMessage::signed(
                    self.validator.registry(),
                    kind,
                    round,
                    &leader,
                    block_hash,
                    phi,
                    None,
                    Some(block.clone()),
                );
                self.network.send(to, msg);
            }
            let mut votes = BTreeMap::new();
            self.pump(&leader, &mut votes);
            self.network.advance_to(deadline);

            let mut unresolved = Vec::new();
            for node in &targets {
                let (outcome, recorded, suc) = match votes.get(node) {
                    Some(m) if !m.watermark_valid(self.validator.registry()) => {
                        (VoteOutcome::BadWatermark, Outcome::Negative, 1.0)
                    }
                    Some(m)
                        if m.verdict == Some(Verdict::Approve) && m.block_hash == block_hash =>
                    {
                        (VoteOutcome::Approved, Outcome::Positive, 1.0)
                    }
                    Some(_) => (VoteOutcome::Objected, Outcome::Negative, 1.0),
                    None => (VoteOutcome::Missing, Outcome::Negative, 0.0),
                };
                table
                    .record_from_all(node, recorded, suc)
                    .map_err(|source| RoundFailure::Reputation { round, source })?;
                if outcome != VoteOutcome::Approved {
                    unresolved.push(node.clone());
                }
                votes_log.push(VoteRecord {
                    attempt,
                    node: node.clone(),
                    outcome,
                });
            }
            targets = unresolved;
        }

        let next = self
            .canonical
            .check(&self.validator, &block)
            .expect("a freshly mined block extends the canonical tip");
        self.canonical.chain.push(block.clone());
        self.canonical.state = next;
        if let Some(r) = self.replicas.get_mut(&leader) {
            r.apply(&self.validator, &block);
        }
        table
            .record_from_all(&leader, Outcome::Positive, 1.0)
            .map_err(|source| RoundFailure::Reputation { round, source })?;

        let deadline = self.deadline();
        let receivers: Vec<NodeId> = self
            .nodes
            .keys()
            .filter(|id| **id != leader)
            .cloned()
            .collect();
        for to in &receivers {
            let msg = ConsensusMessage::signed(
                self.validator.registry(),
                MessageKind::Commit,
                round,
                &leader,
                block_hash,
                phi,
                None,
                Some(block.clone()),
            );
            self.network.send(to, msg);
        }
        self.pump(&leader, &mut BTreeMap::new());
        self.network.advance_to(deadline);

        Ok(RoundReport {
            round,
            leader,
            block,
            proposed_to,
            retries,
            votes: votes_log,
            excluded: targets,
            dropped_txs,
            skipped_leaders,
        })
    }
}

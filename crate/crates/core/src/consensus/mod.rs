//! Reputation-gated commit rounds over a simulated message network.
//!
//! Each round the best-reputed qualified node mines a block and proposes it
//! to the other qualified nodes, which answer with watermarked votes.
//! Objectors and silent nodes are asked again up to `max_retries` times;
//! after that the block commits over the approvers and every vote is
//! recorded in the reputation table.

mod engine;
mod network;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::{NodeId, OperatorId};
use crate::ledger::{codec::Encoder, Block, Digest, IdentityRegistry, LedgerError};
use crate::reputation::{InteractionLog, ReputationError};

pub use engine::{verify_proposal, ConsensusEngine, Replica, RoundReport, VoteOutcome, VoteRecord};
pub use network::{DelayModel, Delivery, SimNetwork};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Behavior {
    Honest,
    MaliciousReject,
    MaliciousTamper,
    Offline,
}

impl Behavior {
    pub fn as_str(&self) -> &'static str {
        match self {
            Behavior::Honest => "honest",
            Behavior::MaliciousReject => "malicious_reject",
            Behavior::MaliciousTamper => "malicious_tamper",
            Behavior::Offline => "offline",
        }
    }
}

/// One operator's prior view of a node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedInteraction {
    pub operator: OperatorId,
    pub positive: u64,
    pub negative: u64,
    pub suc: f64,
}

impl SeedInteraction {
    pub fn log(&self) -> InteractionLog {
        InteractionLog {
            positive: self.positive,
            negative: self.negative,
            suc: self.suc,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeConfig {
    pub node_id: NodeId,
    /// Nonces tried per mining attempt.
    pub compute_power: u64,
    pub behavior: Behavior,
    #[serde(default)]
    pub initial_reputation_log: Vec<SeedInteraction>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MessageKind {
    Propose,
    VerifyResult,
    Commit,
    Retry,
}

impl MessageKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MessageKind::Propose => "PROPOSE",
            MessageKind::VerifyResult => "VERIFY_RESULT",
            MessageKind::Commit => "COMMIT",
            MessageKind::Retry => "RETRY",
        }
    }

    fn code(&self) -> u8 {
        match self {
            MessageKind::Propose => 0,
            MessageKind::VerifyResult => 1,
            MessageKind::Commit => 2,
            MessageKind::Retry => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Approve,
    Object,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Approve => "approve",
            Verdict::Object => "object",
        }
    }
}

fn verdict_code(v: Option<Verdict>) -> u8 {
    match v {
        None => 0,
        Some(Verdict::Approve) => 1,
        Some(Verdict::Object) => 2,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusMessage {
    pub kind: MessageKind,
    pub round: u64,
    pub sender: NodeId,
    pub block_hash: Digest,
    pub nonce_phi: u64,
    pub verdict: Option<Verdict>,
    pub watermark: Vec<u8>,
    /// Block data travelling with PROPOSE, RETRY and COMMIT.
    pub block: Option<Block>,
}

/// Bytes the sender's watermark covers.
pub fn watermark_preimage(
    round: u64,
    block_hash: &Digest,
    verdict: Option<Verdict>,
    phi: u64,
) -> Vec<u8> {
    let mut e = Encoder::new();
    e.str("watermark")
        .u64(round)
        .bytes(&block_hash.0)
        .u8(verdict_code(verdict))
        .u64(phi);
    e.finish()
}

impl ConsensusMessage {
    /// Builds a message watermarked with the sender's identity.
    #[allow(clippy::too_many_arguments)]
    pub fn signed(
        registry: &IdentityRegistry,
        kind: MessageKind,
        round: u64,
        sender: &NodeId,
        block_hash: Digest,
        nonce_phi: u64,
        verdict: Option<Verdict>,
        block: Option<Block>,
    ) -> Self {
        let watermark = registry
            .sign(
                sender.as_str(),
                &watermark_preimage(round, &block_hash, verdict, nonce_phi),
            )
            .unwrap_or_default();
        Self {
            kind,
            round,
            sender: sender.clone(),
            block_hash,
            nonce_phi,
            verdict,
            watermark,
            block,
        }
    }

    pub fn watermark_valid(&self, registry: &IdentityRegistry) -> bool {
        registry.verify(
            self.sender.as_str(),
            &watermark_preimage(self.round, &self.block_hash, self.verdict, self.nonce_phi),
            &self.watermark,
        )
    }
}

/// One delivered message, as seen by the trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub tick: u64,
    pub sender: NodeId,
    pub receiver: NodeId,
    pub kind: MessageKind,
    pub round: u64,
    pub verdict: Option<Verdict>,
    pub watermark_valid: bool,
}

pub const TRACE_HEADER: &str = "tick\tsender\treceiver\tkind\tround\tverdict\twatermark_valid";

impl TraceRecord {
    pub fn to_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.tick,
            self.sender,
            self.receiver,
            self.kind.as_str(),
            self.round,
            self.verdict.map_or("-", |v| v.as_str()),
            self.watermark_valid
        )
    }

    fn encode_into(&self, e: &mut Encoder) {
        e.u64(self.tick)
            .str(self.sender.as_str())
            .str(self.receiver.as_str())
            .u8(self.kind.code())
            .u64(self.round)
            .u8(verdict_code(self.verdict))
            .u8(self.watermark_valid as u8);
    }
}

/// Line-delimited trace dump with a header row.
pub fn dump_trace(trace: &[TraceRecord]) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in trace {
        out.push_str(&r.to_line());
        out.push('\n');
    }
    out
}

/// SHA-256 over the canonical encoding of every record, in order.
pub fn trace_hash(trace: &[TraceRecord]) -> Digest {
    let mut e = Encoder::new();
    e.u64(trace.len() as u64);
    for r in trace {
        r.encode_into(&mut e);
    }
    Digest::of(&e.finish())
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RoundFailure {
    #[error("round {round}: no qualified node")]
    NoQualifiedNode { round: u64 },
    #[error("round {round}: no qualified node could mine (tried {tried:?})")]
    NoMiner { round: u64, tried: Vec<NodeId> },
    #[error("round {round}: ledger: {source}")]
    Ledger { round: u64, source: LedgerError },
    #[error("round {round}: reputation: {source}")]
    Reputation { round: u64, source: ReputationError },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
}

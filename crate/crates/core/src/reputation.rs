//! Trading reputation of edge nodes.
//!
//! Each (operator, node) pair keeps interaction counts and the latest
//! communication quality. The pair's opinion is a trust triple
//! `(trusted, untrusted, indefinite)`, and a node's reputation is the sum
//! over operators of `trusted + phi * indefinite`. Nodes whose reputation
//! drops below the table threshold lose mining qualification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::{NodeId, OperatorId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReputationError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("communication quality must lie in [0, 1], got {0}")]
    InvalidQuality(f64),
    #[error("invalid reputation parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionLog {
    pub positive: u64,
    pub negative: u64,
    /// Latest observed communication quality, in [0, 1].
    pub suc: f64,
}

impl Default for InteractionLog {
    fn default() -> Self {
        Self {
            positive: 0,
            negative: 0,
            suc: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrustTriple {
    pub trusted: f64,
    pub untrusted: f64,
    pub indefinite: f64,
}

impl TrustTriple {
    pub const UNKNOWN: TrustTriple = TrustTriple {
        trusted: 0.0,
        untrusted: 0.0,
        indefinite: 1.0,
    };

    pub fn sum(&self) -> f64 {
        self.trusted + self.untrusted + self.indefinite
    }

    /// Contribution of this opinion to a node's reputation.
    pub fn score(&self, phi: f64) -> f64 {
        self.trusted + phi * self.indefinite
    }
}

/// Opinion implied by an interaction log. A pair with no interactions is
/// fully indefinite regardless of quality.
pub fn trust_triple(log: &InteractionLog) -> TrustTriple {
    let total = log.positive + log.negative;
    if total == 0 {
        return TrustTriple::UNKNOWN;
    }
    let indefinite = 1.0 - log.suc;
    let definite = 1.0 - indefinite;
    let total = total as f64;
    TrustTriple {
        trusted: definite * log.positive as f64 / total,
        untrusted: definite * log.negative as f64 / total,
        indefinite,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReputationEntry {
    pub log: InteractionLog,
    pub triple: TrustTriple,
}

impl ReputationEntry {
    fn from_log(log: InteractionLog) -> Self {
        Self {
            log,
            triple: trust_triple(&log),
        }
    }
}

/// One row of the audit dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReputationRow {
    pub operator_id: OperatorId,
    pub node_id: NodeId,
    pub positive: u64,
    pub negative: u64,
    pub suc: f64,
    pub trusted: f64,
    pub untrusted: f64,
    pub indefinite: f64,
}

pub const CSV_HEADER: &str = "operator_id,node_id,N_p,N_n,suc,Tru,Unt,Ind";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReputationTable {
    entries: BTreeMap<(OperatorId, NodeId), ReputationEntry>,
    operators: BTreeSet<OperatorId>,
    nodes: BTreeSet<NodeId>,
    phi: f64,
    threshold: f64,
}

impl ReputationTable {
    pub fn new(phi: f64, threshold: f64) -> Result<Self, ReputationError> {
        if !(0.0..=1.0).contains(&phi) {
            return Err(ReputationError::InvalidParameter(format!("phi = {phi}")));
        }
        if !(threshold >= 0.0) {
            return Err(ReputationError::InvalidParameter(format!(
                "threshold = {threshold}"
            )));
        }
        Ok(Self {
            entries: BTreeMap::new(),
            operators: BTreeSet::new(),
            nodes: BTreeSet::new(),
            phi,
            threshold,
        })
    }

    /// Default qualification bar, `0.5 * operators * (1 + phi) / 2`.
    pub fn default_threshold(operators: usize, phi: f64) -> f64 {
        0.5 * operators as f64 * (1.0 + phi) / 2.0
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn add_operator(&mut self, op: OperatorId) {
        self.operators.insert(op);
    }

    pub fn register_node(&mut self, node: NodeId) {
        self.nodes.insert(node);
    }

    pub fn operators(&self) -> impl Iterator<Item = &OperatorId> {
        self.operators.iter()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &NodeId> {
        self.nodes.iter()
    }

    pub fn entry(&self, op: &OperatorId, node: &NodeId) -> Option<&ReputationEntry> {
        self.entries.get(&(op.clone(), node.clone()))
    }

    /// Overwrites a pair's log, e.g. from seed data.
    pub fn set_log(
        &mut self,
        op: OperatorId,
        node: NodeId,
        log: InteractionLog,
    ) -> Result<(), ReputationError> {
        check_quality(log.suc)?;
        self.operators.insert(op.clone());
        self.nodes.insert(node.clone());
        self.entries
            .insert((op, node), ReputationEntry::from_log(log));
        Ok(())
    }

    pub fn record_interaction(
        &mut self,
        op: &OperatorId,
        node: &NodeId,
        outcome: Outcome,
        suc: f64,
    ) -> Result<&ReputationEntry, ReputationError> {
        check_quality(suc)?;
        self.operators.insert(op.clone());
        self.nodes.insert(node.clone());
        let entry = self
            .entries
            .entry((op.clone(), node.clone()))
            .or_insert_with(|| ReputationEntry::from_log(InteractionLog::default()));
        match outcome {
            Outcome::Positive => entry.log.positive += 1,
            Outcome::Negative => entry.log.negative += 1,
        }
        entry.log.suc = suc;
        entry.triple = trust_triple(&entry.log);
        Ok(entry)
    }

    /// Records the same outcome from every registered operator.
    pub fn record_from_all(
        &mut self,
        node: &NodeId,
        outcome: Outcome,
        suc: f64,
    ) -> Result<(), ReputationError> {
        let ops: Vec<OperatorId> = self.operators.iter().cloned().collect();
        for op in &ops {
            self.record_interaction(op, node, outcome, suc)?;
        }
        Ok(())
    }

    pub fn remove_entry(&mut self, op: &OperatorId, node: &NodeId) -> Option<ReputationEntry> {
        self.entries.remove(&(op.clone(), node.clone()))
    }

    pub fn node_reputation(&self, node: &NodeId) -> Result<f64, ReputationError> {
        if !self.nodes.contains(node) {
            return Err(ReputationError::UnknownNode(node.clone()));
        }
        Ok(self
            .entries
            .iter()
            .filter(|((_, n), _)| n == node)
            .map(|(_, e)| e.triple.score(self.phi))
            .sum())
    }

    /// Threshold is inclusive. Unknown nodes have no reputation.
    pub fn is_qualified_miner(&self, node: &NodeId) -> bool {
        self.node_reputation(node).unwrap_or(0.0) >= self.threshold
    }

    pub fn rows(&self) -> Vec<ReputationRow> {
        self.entries
            .iter()
            .map(|((op, node), e)| ReputationRow {
                operator_id: op.clone(),
                node_id: node.clone(),
                positive: e.log.positive,
                negative: e.log.negative,
                suc: e.log.suc,
                trusted: e.triple.trusted,
                untrusted: e.triple.untrusted,
                indefinite: e.triple.indefinite,
            })
            .collect()
    }

    pub fn to_csv(&self, delim: char) -> String {
        let mut out = CSV_HEADER.replace(',', &delim.to_string());
        out.push('\n');
        for r in self.rows() {
            let _ = writeln!(
                out,
                "{op}{d}{node}{d}{np}{d}{nn}{d}{suc}{d}{t}{d}{u}{d}{i}",
                d = delim,
                op = r.operator_id,
                node = r.node_id,
                np = r.positive,
                nn = r.negative,
                suc = r.suc,
                t = r.trusted,
                u = r.untrusted,
                i = r.indefinite,
            );
        }
        out
    }
}

fn check_quality(suc: f64) -> Result<(), ReputationError> {
    if (0.0..=1.0).contains(&suc) {
        Ok(())
    } else {
        Err(ReputationError::InvalidQuality(suc))
    }
}

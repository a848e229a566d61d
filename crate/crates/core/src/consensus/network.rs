use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap};

use rand::{Rng, RngCore};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ConsensusMessage;
use crate::ids::NodeId;

/// Per-link delivery delay: `base` ticks plus a per-link constant drawn
/// uniformly from `0..=jitter`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DelayModel {
    pub base: u64,
    pub jitter: u64,
}

impl Default for DelayModel {
    fn default() -> Self {
        Self { base: 1, jitter: 0 }
    }
}

impl DelayModel {
    pub fn max_delay(&self) -> u64 {
        self.base + self.jitter
    }
}

#[derive(Debug, Clone)]
pub struct Delivery {
    pub tick: u64,
    pub to: NodeId,
    pub msg: ConsensusMessage,
}

#[derive(Debug, Clone)]
struct Queued {
    tick: u64,
    seq: u64,
    to: NodeId,
    msg: ConsensusMessage,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        (self.tick, self.seq) == (other.tick, other.seq)
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.tick, self.seq).cmp(&(other.tick, other.seq))
    }
}

/// Deterministic message network. Each directed link has a fixed delay, so
/// messages between a pair arrive in send order.
#[derive(Debug, Clone)]
pub struct SimNetwork {
    rng: ChaCha8Rng,
    model: DelayModel,
    links: BTreeMap<(NodeId, NodeId), u64>,
    queue: BinaryHeap<Reverse<Queued>>,
    seq: u64,
    now: u64,
}

impl SimNetwork {
    pub fn new(rng: ChaCha8Rng, model: DelayModel) -> Self {
        Self {
            rng,
            model,
            links: BTreeMap::new(),
            queue: BinaryHeap::new(),
            seq: 0,
            now: 0,
        }
    }

    pub fn now(&self) -> u64 {
        self.now
    }

    pub fn model(&self) -> DelayModel {
        self.model
    }

    /// Delay of the directed link, drawn on first use.
    pub fn link_delay(&mut self, from: &NodeId, to: &NodeId) -> u64 {
        let model = self.model;
        let rng = &mut self.rng;
        *self
            .links
            .entry((from.clone(), to.clone()))
            .or_insert_with(|| {
                let extra = if model.jitter == 0 {
                    0
                } else {
                    rng.random_range(0..=model.jitter)
                };
                model.base + extra
            })
    }

    /// Queues `msg` from its sender to `to`; returns the delivery tick.
    pub fn send(&mut self, to: &NodeId, msg: ConsensusMessage) -> u64 {
        let tick = self.now + self.link_delay(&msg.sender, to);
        self.queue.push(Reverse(Queued {
            tick,
            seq: self.seq,
            to: to.clone(),
            msg,
        }));
        self.seq += 1;
        tick
    }

    /// Pops the earliest message and advances the clock to its tick.
    pub fn next_delivery(&mut self) -> Option<Delivery> {
        let Reverse(q) = self.queue.pop()?;
        self.now = self.now.max(q.tick);
        Some(Delivery {
            tick: q.tick,
            to: q.to,
            msg: q.msg,
        })
    }

    pub fn is_idle(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn advance_to(&mut self, tick: u64) {
        self.now = self.now.max(tick);
    }

    /// Random draw for the round beacon.
    pub fn beacon(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

use serde::{Deserialize, Serialize};

use super::block::Block;
use super::identity::IdentityRegistry;
use super::state::{apply_block, Balances};
use super::ChainParams;

/// Which rule a block broke.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockFault {
    GenesisMismatch,
    Height { expected: u64, found: u64 },
    PrevHash,
    Timestamp,
    Difficulty { expected: u32, found: u32 },
    InsufficientWork,
    MerkleRoot,
    MinerSignature,
    Transaction(String),
    Settlement(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum ChainVerdict {
    Valid,
    Invalid { height: u64, fault: BlockFault },
}

impl ChainVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, ChainVerdict::Valid)
    }

    pub fn invalid_height(&self) -> Option<u64> {
        match self {
            ChainVerdict::Valid => None,
            ChainVerdict::Invalid { height, .. } => Some(*height),
        }
    }
}

/// Full-node validation rules. Holds the identity registry, chain
/// parameters and the pre-funded balances the chain starts from.
#[derive(Debug, Clone)]
pub struct Validator {
    registry: IdentityRegistry,
    params: ChainParams,
    initial: Balances,
}

impl Validator {
    pub fn new(registry: IdentityRegistry, params: ChainParams, initial: Balances) -> Self {
        Self {
            registry,
            params,
            initial,
        }
    }

    pub fn params(&self) -> &ChainParams {
        &self.params
    }

    pub fn registry(&self) -> &IdentityRegistry {
        &self.registry
    }

    pub fn initial_balances(&self) -> &Balances {
        &self.initial
    }

    /// Checks `block` as the successor of `parent` and returns the balances
    /// after it. `state` is the balance set after `parent`.
    pub fn check_next(
        &self,
        parent: &Block,
        state: &Balances,
        block: &Block,
    ) -> Result<Balances, BlockFault> {
        let h = &block.header;
        let expected = parent.height() + 1;
        if h.height != expected {
            return Err(BlockFault::Height {
                expected,
                found: h.height,
            });
        }
        if h.prev_hash != parent.hash() {
            return Err(BlockFault::PrevHash);
        }
        if h.timestamp < parent.header.timestamp {
            return Err(BlockFault::Timestamp);
        }
        if h.difficulty != self.params.difficulty {
            return Err(BlockFault::Difficulty {
                expected: self.params.difficulty,
                found: h.difficulty,
            });
        }
        let hash = h.hash();
        if hash.leading_zero_bits() < h.difficulty {
            return Err(BlockFault::InsufficientWork);
        }
        if super::block::merkle_root(&block.transactions) != h.merkle_root {
            return Err(BlockFault::MerkleRoot);
        }
        if !self
            .registry
            .verify(h.miner_id.as_str(), &hash.0, &block.miner_signature)
        {
            return Err(BlockFault::MinerSignature);
        }
        for tx in &block.transactions {
            tx.verify(&self.registry)
                .map_err(|e| BlockFault::Transaction(e.to_string()))?;
        }
        apply_block(state, block, &self.params).map_err(|e| BlockFault::Settlement(e.to_string()))
    }

    /// Reports the lowest height that breaks any rule, or `Valid`.
    pub fn validate_chain(&self, chain: &[Block], genesis: &Block) -> ChainVerdict {
        self.replay(chain, genesis)
            .map(|_| ChainVerdict::Valid)
            .unwrap_or_else(|v| v)
    }

    /// Validates and returns the final balances.
    pub fn replay(&self, chain: &[Block], genesis: &Block) -> Result<Balances, ChainVerdict> {
        let Some(first) = chain.first() else {
            return Err(ChainVerdict::Invalid {
                height: 0,
                fault: BlockFault::GenesisMismatch,
            });
        };
        if first != genesis {
            return Err(ChainVerdict::Invalid {
                height: 0,
                fault: BlockFault::GenesisMismatch,
            });
        }
        let mut state = self.initial.clone();
        for pair in chain.windows(2) {
            state = self
                .check_next(&pair[0], &state, &pair[1])
                .map_err(|fault| ChainVerdict::Invalid {
                    height: pair[0].height() + 1,
                    fault,
                })?;
        }
        Ok(state)
    }
}

/// Identity-free audit: genesis, linkage, heights, timestamps, each header's
/// own proof of work and Merkle roots. Signatures and balances are not
/// checked because they need the identity registry and opening balances.
pub fn check_structure(chain: &[Block], genesis: &Block) -> ChainVerdict {
    match chain.first() {
        Some(first) if first == genesis => {}
        _ => {
            return ChainVerdict::Invalid {
                height: 0,
                fault: BlockFault::GenesisMismatch,
            }
        }
    }
    for pair in chain.windows(2) {
        let (parent, b) = (&pair[0], &pair[1]);
        let height = parent.height() + 1;
        let fault = if b.header.height != height {
            Some(BlockFault::Height {
                expected: height,
                found: b.header.height,
            })
        } else if b.header.prev_hash != parent.hash() {
            Some(BlockFault::PrevHash)
        } else if b.header.timestamp < parent.header.timestamp {
            Some(BlockFault::Timestamp)
        } else if !b.header.meets_difficulty() {
            Some(BlockFault::InsufficientWork)
        } else if super::block::merkle_root(&b.transactions) != b.header.merkle_root {
            Some(BlockFault::MerkleRoot)
        } else {
            None
        };
        if let Some(fault) = fault {
            return ChainVerdict::Invalid { height, fault };
        }
    }
    ChainVerdict::Valid
}

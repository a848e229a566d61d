//! Hash-linked spectrum-coin ledger with proof-of-work blocks.

mod block;
pub mod codec;
pub mod dump;
mod identity;
mod mine;
mod state;
mod tx;
mod validate;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::{AccountId, NodeId};

pub use block::{merkle_root, Block, BlockHeader, GENESIS_MINER};
pub use identity::{keyed_digest, Digest, IdentityRegistry};
pub use mine::{mine_block, MineOutcome, MiningContext};
pub use state::{apply_block, wallet_address, Balances, CoinAccount};
pub use tx::{Transaction, TxKind, SYSTEM_ACCOUNT};
pub use validate::{check_structure, BlockFault, ChainVerdict, Validator};

/// One coin in milli-coins.
pub const MILLI_PER_COIN: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainParams {
    /// Leading zero bits required of every non-genesis header hash.
    pub difficulty: u32,
    /// Milli-coins minted to the miner of each block.
    pub mining_reward: u64,
}

impl Default for ChainParams {
    fn default() -> Self {
        Self {
            difficulty: 8,
            mining_reward: 10 * MILLI_PER_COIN,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LedgerError {
    #[error("node {0} is not qualified to mine")]
    Unqualified(NodeId),
    #[error("identity {0} was never issued")]
    UnknownIdentity(String),
    #[error("transaction {0} id does not match its contents")]
    TxId(Digest),
    #[error("transaction {0} has an invalid signature")]
    TxSignature(Digest),
    #[error("transaction {tx_id}: {account} holds {balance} milli-coins, needs {amount}")]
    InsufficientBalance {
        tx_id: Digest,
        account: AccountId,
        balance: u64,
        amount: u64,
    },
    #[error("mining reward: {0}")]
    Coinbase(String),
    #[error("balance overflow")]
    Overflow,
}

/// Order-sensitive digest of a chain over every block's hash and miner
/// signature.
pub fn chain_digest(chain: &[Block]) -> Digest {
    let mut e = codec::Encoder::new();
    for b in chain {
        e.bytes(&b.hash().0).bytes(&b.miner_signature);
    }
    Digest::of(&e.finish())
}

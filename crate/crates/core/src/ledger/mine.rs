use super::block::{merkle_root, Block, BlockHeader};
use super::identity::IdentityRegistry;
use super::state::{apply_block, Balances};
use super::tx::{Transaction, TxKind};
use super::{ChainParams, LedgerError};
use crate::ids::{AccountId, NodeId};
use crate::reputation::ReputationTable;

/// Everything a miner needs besides the block contents.
#[derive(Debug, Clone, Copy)]
pub struct MiningContext<'a> {
    pub registry: &'a IdentityRegistry,
    pub table: &'a ReputationTable,
    pub params: &'a ChainParams,
    /// Balances after `parent`.
    pub state: &'a Balances,
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MineOutcome {
    Mined(Block),
    /// No nonce in `0..tried` met the difficulty.
    Exhausted {
        tried: u64,
    },
}

/// Proof-of-work search over nonces `0..nonce_budget`, returning the lowest
/// nonce that meets the difficulty. The reward is prepended to `txs`.
pub fn mine_block(
    ctx: &MiningContext<'_>,
    parent: &Block,
    txs: Vec<Transaction>,
    miner: &NodeId,
    nonce_budget: u64,
) -> Result<MineOutcome, LedgerError> {
    if !ctx.table.is_qualified_miner(miner) {
        return Err(LedgerError::Unqualified(miner.clone()));
    }
    if !ctx.registry.is_registered(miner.as_str()) {
        return Err(LedgerError::UnknownIdentity(miner.to_string()));
    }
    for tx in &txs {
        if tx.kind != TxKind::SpectrumPurchase {
            return Err(LedgerError::Coinbase(
                "user transactions cannot mint rewards".into(),
            ));
        }
        tx.verify(ctx.registry)?;
    }
    let height = parent.height() + 1;
    let mut all = Vec::with_capacity(txs.len() + 1);
    all.push(Transaction::reward(
        AccountId::from(miner),
        ctx.params.mining_reward,
        height,
        ctx.timestamp,
    ));
    all.extend(txs);

    let mut header = BlockHeader {
        height,
        prev_hash: parent.hash(),
        merkle_root: merkle_root(&all),
        timestamp: ctx.timestamp,
        miner_id: miner.clone(),
        nonce: 0,
        difficulty: ctx.params.difficulty,
    };
    let candidate = Block {
        header: header.clone(),
        transactions: all,
        miner_signature: Vec::new(),
    };
    // balance feasibility against the parent state
    apply_block(ctx.state, &candidate, ctx.params)?;

    for nonce in 0..nonce_budget {
        header.nonce = nonce;
        let hash = header.hash();
        if hash.leading_zero_bits() >= header.difficulty {
            let miner_signature = ctx
                .registry
                .sign(miner.as_str(), &hash.0)
                .expect("miner registration checked above");
            return Ok(MineOutcome::Mined(Block {
                header,
                transactions: candidate.transactions,
                miner_signature,
            }));
        }
    }
    Ok(MineOutcome::Exhausted {
        tried: nonce_budget,
    })
}

use serde::{Deserialize, Serialize};

use super::codec::{DecodeError, Decoder, Encoder};
use super::identity::Digest;
use super::tx::Transaction;
use crate::ids::NodeId;

pub const GENESIS_MINER: &str = "genesis";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockHeader {
    pub height: u64,
    pub prev_hash: Digest,
    pub merkle_root: Digest,
    pub timestamp: u64,
    pub miner_id: NodeId,
    pub nonce: u64,
    /// Required leading zero bits of the header hash.
    pub difficulty: u32,
}

impl BlockHeader {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut e = Encoder::new();
        e.u64(self.height)
            .bytes(&self.prev_hash.0)
            .bytes(&self.merkle_root.0)
            .u64(self.timestamp)
            .str(self.miner_id.as_str())
            .u64(self.nonce)
            .u32(self.difficulty);
        e.finish()
    }

    pub fn hash(&self) -> Digest {
        Digest::of(&self.to_bytes())
    }

    pub fn meets_difficulty(&self) -> bool {
        self.hash().leading_zero_bits() >= self.difficulty
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub header: BlockHeader,
    pub transactions: Vec<Transaction>,
    /// Miner's keyed digest over the header hash. Empty for genesis.
    pub miner_signature: Vec<u8>,
}

impl Block {
    pub fn genesis() -> Self {
        Self {
            header: BlockHeader {
                height: 0,
                prev_hash: Digest::ZERO,
                merkle_root: merkle_root(&[]),
                timestamp: 0,
                miner_id: NodeId::from(GENESIS_MINER),
                nonce: 0,
                difficulty: 0,
            },
            transactions: Vec::new(),
            miner_signature: Vec::new(),
        }
    }

    pub fn hash(&self) -> Digest {
        self.header.hash()
    }

    pub fn height(&self) -> u64 {
        self.header.height
    }

    pub fn encode_transactions(txs: &[Transaction]) -> Vec<u8> {
        let mut e = Encoder::new();
        e.u32(txs.len() as u32);
        for tx in txs {
            e.bytes(&tx.to_bytes());
        }
        e.finish()
    }

    pub fn decode_transactions(buf: &[u8]) -> Result<Vec<Transaction>, DecodeError> {
        let mut d = Decoder::new(buf);
        let n = d.u32()?;
        let mut out = Vec::with_capacity(n.min(1 << 16) as usize);
        for _ in 0..n {
            let mut inner = Decoder::new(d.bytes()?);
            out.push(Transaction::decode_from(&mut inner)?);
            inner.finish()?;
        }
        d.finish()?;
        Ok(out)
    }
}

fn leaf_hash(tx: &Transaction) -> Digest {
    let mut pre = vec![0u8];
    pre.extend_from_slice(&tx.to_bytes());
    Digest::of(&pre)
}

fn node_hash(l: &Digest, r: &Digest) -> Digest {
    let mut pre = Vec::with_capacity(65);
    pre.push(1u8);
    pre.extend_from_slice(&l.0);
    pre.extend_from_slice(&r.0);
    Digest::of(&pre)
}

/// Binary Merkle root over the full encoding of every transaction; odd
/// levels duplicate their last node. The empty list hashes to zero.
pub fn merkle_root(txs: &[Transaction]) -> Digest {
    if txs.is_empty() {
        return Digest::ZERO;
    }
    let mut level: Vec<Digest> = txs.iter().map(leaf_hash).collect();
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|pair| node_hash(&pair[0], pair.get(1).unwrap_or(&pair[0])))
            .collect();
    }
    level[0]
}

//! Line-oriented chain dump.
//!
//! One block per line, tab-separated, every column hex-encoded:
//!
//! | # | column          | bytes                                   |
//! |---|-----------------|-----------------------------------------|
//! | 0 | height          | u64 big-endian                          |
//! | 1 | prev_hash       | 32                                      |
//! | 2 | merkle_root     | 32                                      |
//! | 3 | timestamp       | u64 big-endian                          |
//! | 4 | miner_id        | UTF-8                                   |
//! | 5 | nonce           | u64 big-endian                          |
//! | 6 | difficulty      | u32 big-endian                          |
//! | 7 | miner_signature | raw tag (empty for genesis)             |
//! | 8 | transactions    | u32 count, then length-prefixed records |
//!
//! Lines starting with `#` are comments.

use thiserror::Error;

use super::block::{Block, BlockHeader};
use super::codec::DecodeError;
use super::identity::Digest;
use crate::ids::NodeId;

pub const DUMP_HEADER: &str =
    "# satshare chain v1: height prev_hash merkle_root timestamp miner_id nonce difficulty miner_signature transactions";

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("line {line}: expected 9 columns, found {found}")]
    Columns { line: usize, found: usize },
    #[error("line {line}, column {column}: {reason}")]
    Field {
        line: usize,
        column: usize,
        reason: String,
    },
}

pub fn dump_block(b: &Block) -> String {
    let h = &b.header;
    [
        hex::encode(h.height.to_be_bytes()),
        h.prev_hash.to_hex(),
        h.merkle_root.to_hex(),
        hex::encode(h.timestamp.to_be_bytes()),
        hex::encode(h.miner_id.as_str()),
        hex::encode(h.nonce.to_be_bytes()),
        hex::encode(h.difficulty.to_be_bytes()),
        hex::encode(&b.miner_signature),
        hex::encode(Block::encode_transactions(&b.transactions)),
    ]
    .join("\t")
}

pub fn dump_chain(chain: &[Block]) -> String {
    let mut out = String::from(DUMP_HEADER);
    out.push('\n');
    for b in chain {
        out.push_str(&dump_block(b));
        out.push('\n');
    }
    out
}

pub fn parse_chain(text: &str) -> Result<Vec<Block>, DumpError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(i, l)| parse_block(i + 1, l))
        .collect()
}

fn parse_block(line: usize, text: &str) -> Result<Block, DumpError> {
    let cols: Vec<&str> = text.trim_end_matches('\r').split('\t').collect();
    if cols.len() != 9 {
        return Err(DumpError::Columns {
            line,
            found: cols.len(),
        });
    }
    let field = |column: usize, reason: String| DumpError::Field {
        line,
        column,
        reason,
    };
    let raw = |column: usize| hex::decode(cols[column]).map_err(|e| field(column, e.to_string()));
    let fixed = |column: usize, n: usize| -> Result<Vec<u8>, DumpError> {
        let v = raw(column)?;
        if v.len() != n {
            return Err(field(
                column,
                format!("expected {n} bytes, found {}", v.len()),
            ));
        }
        Ok(v)
    };
    let u64_at = |c: usize| fixed(c, 8).map(|v| u64::from_be_bytes(v.try_into().unwrap()));
    let digest_at = |c: usize| fixed(c, 32).map(|v| Digest::from_slice(&v).unwrap());

    let miner = String::from_utf8(raw(4)?).map_err(|_| field(4, "miner id is not UTF-8".into()))?;
    let transactions =
        Block::decode_transactions(&raw(8)?).map_err(|e: DecodeError| field(8, e.to_string()))?;
    Ok(Block {
        header: BlockHeader {
            height: u64_at(0)?,
            prev_hash: digest_at(1)?,
            merkle_root: digest_at(2)?,
            timestamp: u64_at(3)?,
            miner_id: NodeId(miner),
            nonce: u64_at(5)?,
            difficulty: u32::from_be_bytes(fixed(6, 4)?.try_into().unwrap()),
        },
        transactions,
        miner_signature: raw(7)?,
    })
}

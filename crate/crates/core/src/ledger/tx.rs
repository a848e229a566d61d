use serde::{Deserialize, Serialize};

use super::codec::{DecodeError, Decoder, Encoder};
use super::identity::{Digest, IdentityRegistry};
use super::LedgerError;
use crate::ids::AccountId;

/// Payer of minted rewards.
pub const SYSTEM_ACCOUNT: &str = "system";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TxKind {
    SpectrumPurchase,
    MiningReward,
}

impl TxKind {
    fn code(self) -> u8 {
        match self {
            TxKind::SpectrumPurchase => 0,
            TxKind::MiningReward => 1,
        }
    }

    fn from_code(c: u8) -> Result<Self, DecodeError> {
        match c {
            0 => Ok(TxKind::SpectrumPurchase),
            1 => Ok(TxKind::MiningReward),
            other => Err(DecodeError::Invalid(format!("transaction kind {other}"))),
        }
    }
}

/// A spectrum-coin transfer. Amounts are milli-coins.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transaction {
    pub tx_id: Digest,
    pub payer: AccountId,
    pub payee: AccountId,
    pub amount: u64,
    pub kind: TxKind,
    pub memo: String,
    pub signature: Vec<u8>,
    pub timestamp: u64,
}

impl Transaction {
    fn body_bytes(
        payer: &AccountId,
        payee: &AccountId,
        amount: u64,
        kind: TxKind,
        memo: &str,
        timestamp: u64,
    ) -> Vec<u8> {
        let mut e = Encoder::new();
        e.str(payer.as_str())
            .str(payee.as_str())
            .u64(amount)
            .u8(kind.code())
            .str(memo)
            .u64(timestamp);
        e.finish()
    }

    /// Digest the id must equal.
    pub fn computed_id(&self) -> Digest {
        Digest::of(&Self::body_bytes(
            &self.payer,
            &self.payee,
            self.amount,
            self.kind,
            &self.memo,
            self.timestamp,
        ))
    }

    /// Builds and signs a purchase with the payer's issued identity.
    pub fn purchase(
        registry: &IdentityRegistry,
        payer: AccountId,
        payee: AccountId,
        amount: u64,
        memo: String,
        timestamp: u64,
    ) -> Result<Self, LedgerError> {
        let body = Self::body_bytes(
            &payer,
            &payee,
            amount,
            TxKind::SpectrumPurchase,
            &memo,
            timestamp,
        );
        let tx_id = Digest::of(&body);
        let signature = registry
            .sign(payer.as_str(), &tx_id.0)
            .ok_or_else(|| LedgerError::UnknownIdentity(payer.to_string()))?;
        Ok(Self {
            tx_id,
            payer,
            payee,
            amount,
            kind: TxKind::SpectrumPurchase,
            memo,
            signature,
            timestamp,
        })
    }

    /// Unsigned reward minted to a miner.
    pub fn reward(miner: AccountId, amount: u64, height: u64, timestamp: u64) -> Self {
        let payer = AccountId::from(SYSTEM_ACCOUNT);
        let memo = format!("reward height={height}");
        let tx_id = Digest::of(&Self::body_bytes(
            &payer,
            &miner,
            amount,
            TxKind::MiningReward,
            &memo,
            timestamp,
        ));
        Self {
            tx_id,
            payer,
            payee: miner,
            amount,
            kind: TxKind::MiningReward,
            memo,
            signature: Vec::new(),
            timestamp,
        }
    }

    /// Id and signature checks; rewards are exempt from signing.
    pub fn verify(&self, registry: &IdentityRegistry) -> Result<(), LedgerError> {
        if self.computed_id() != self.tx_id {
            return Err(LedgerError::TxId(self.tx_id));
        }
        match self.kind {
            TxKind::MiningReward => {
                if self.payer.as_str() != SYSTEM_ACCOUNT || !self.signature.is_empty() {
                    return Err(LedgerError::TxSignature(self.tx_id));
                }
            }
            TxKind::SpectrumPurchase => {
                if !registry.verify(self.payer.as_str(), &self.tx_id.0, &self.signature) {
                    return Err(LedgerError::TxSignature(self.tx_id));
                }
            }
        }
        Ok(())
    }

    pub fn encode_into(&self, e: &mut Encoder) {
        e.bytes(&self.tx_id.0)
            .str(self.payer.as_str())
            .str(self.payee.as_str())
            .u64(self.amount)
            .u8(self.kind.code())
            .str(&self.memo)
            .bytes(&self.signature)
            .u64(self.timestamp);
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut e = Encoder::new();
        self.encode_into(&mut e);
        e.finish()
    }

    pub fn decode_from(d: &mut Decoder<'_>) -> Result<Self, DecodeError> {
        let tx_id = Digest::from_slice(d.bytes()?)
            .ok_or_else(|| DecodeError::Invalid("tx id length".into()))?;
        Ok(Self {
            tx_id,
            payer: AccountId(d.string()?),
            payee: AccountId(d.string()?),
            amount: d.u64()?,
            kind: TxKind::from_code(d.u8()?)?,
            memo: d.string()?,
            signature: d.bytes()?.to_vec(),
            timestamp: d.u64()?,
        })
    }
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::block::Block;
use super::identity::Digest;
use super::tx::TxKind;
use super::{ChainParams, LedgerError};
use crate::ids::AccountId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoinAccount {
    pub account_id: AccountId,
    /// Milli-coins.
    pub balance: u64,
    pub wallet_address: String,
}

/// Wallet address derived from the account id.
pub fn wallet_address(account: &AccountId) -> String {
    let mut pre = b"wallet:".to_vec();
    pre.extend_from_slice(account.as_str().as_bytes());
    Digest::of(&pre).to_hex()[..40].to_owned()
}

/// Committed balances in milli-coins. Accounts never seen hold zero.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Balances(pub BTreeMap<AccountId, u64>);

impl Balances {
    pub fn balance(&self, account: &AccountId) -> u64 {
        self.0.get(account).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u128 {
        self.0.values().map(|&v| v as u128).sum()
    }

    pub fn credit(&mut self, account: &AccountId, amount: u64) -> Result<(), LedgerError> {
        let slot = self.0.entry(account.clone()).or_insert(0);
        *slot = slot.checked_add(amount).ok_or(LedgerError::Overflow)?;
        Ok(())
    }

    pub fn debit(
        &mut self,
        account: &AccountId,
        amount: u64,
        tx_id: Digest,
    ) -> Result<(), LedgerError> {
        let balance = self.balance(account);
        if balance < amount {
            return Err(LedgerError::InsufficientBalance {
                tx_id,
                account: account.clone(),
                balance,
                amount,
            });
        }
        self.0.insert(account.clone(), balance - amount);
        Ok(())
    }

    pub fn accounts(&self) -> Vec<CoinAccount> {
        self.0
            .iter()
            .map(|(id, &balance)| CoinAccount {
                account_id: id.clone(),
                balance,
                wallet_address: wallet_address(id),
            })
            .collect()
    }
}

/// Settles a block against `state`. All-or-nothing: on error the input is
/// untouched.
pub fn apply_block(
    state: &Balances,
    block: &Block,
    params: &ChainParams,
) -> Result<Balances, LedgerError> {
    let mut next = state.clone();
    let mut rewarded = false;
    for (i, tx) in block.transactions.iter().enumerate() {
        match tx.kind {
            TxKind::MiningReward => {
                if i != 0 || rewarded {
                    return Err(LedgerError::Coinbase(
                        "reward must be the first and only reward".into(),
                    ));
                }
                if tx.amount != params.mining_reward {
                    return Err(LedgerError::Coinbase(format!(
                        "reward {} differs from configured {}",
                        tx.amount, params.mining_reward
                    )));
                }
                if tx.payee != AccountId::from(&block.header.miner_id) {
                    return Err(LedgerError::Coinbase("reward not paid to the miner".into()));
                }
                next.credit(&tx.payee, tx.amount)?;
                rewarded = true;
            }
            TxKind::SpectrumPurchase => {
                next.debit(&tx.payer, tx.amount, tx.tx_id)?;
                next.credit(&tx.payee, tx.amount)?;
            }
        }
    }
    if block.header.height > 0 && !rewarded {
        return Err(LedgerError::Coinbase("missing mining reward".into()));
    }
    Ok(next)
}

//! Simulated identities issued by the authorisation centre.
//!
//! Signatures and watermarks are HMAC-SHA256 tags under a per-identity
//! secret. Verification needs the registry, which stands in for the
//! centre's key material.

use std::collections::BTreeMap;
use std::fmt;

use hmac::{Hmac, Mac};
use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};

type HmacSha256 = Hmac<Sha256>;

/// SHA-256 output.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Digest(pub [u8; 32]);

impl Digest {
    pub const ZERO: Digest = Digest([0; 32]);

    pub fn of(data: &[u8]) -> Self {
        Digest(Sha256::digest(data).into())
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        let v = hex::decode(s).ok()?;
        Some(Digest(v.try_into().ok()?))
    }

    pub fn from_slice(s: &[u8]) -> Option<Self> {
        Some(Digest(s.try_into().ok()?))
    }

    pub fn leading_zero_bits(&self) -> u32 {
        let mut n = 0;
        for b in self.0 {
            if b == 0 {
                n += 8;
            } else {
                n += b.leading_zeros();
                break;
            }
        }
        n
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", &self.to_hex()[..16])
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for Digest {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Digest {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Digest::from_hex(&s).ok_or_else(|| serde::de::Error::custom("expected 64 hex digits"))
    }
}

pub fn keyed_digest(secret: &[u8], message: &[u8]) -> Vec<u8> {
    let mut mac = HmacSha256::new_from_slice(secret).expect("HMAC accepts any key length");
    mac.update(message);
    mac.finalize().into_bytes().to_vec()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdentityRegistry {
    setup_seed: u64,
    secrets: BTreeMap<String, [u8; 32]>,
}

impl IdentityRegistry {
    pub fn new(setup_seed: u64) -> Self {
        Self {
            setup_seed,
            secrets: BTreeMap::new(),
        }
    }

    /// Issues (or re-derives) the secret for `id`. Derivation depends only
    /// on the setup seed and the id.
    pub fn issue(&mut self, id: &str) {
        let mut pre = b"satshare-authority".to_vec();
        pre.extend_from_slice(&self.setup_seed.to_be_bytes());
        pre.extend_from_slice(id.as_bytes());
        self.secrets.insert(id.to_owned(), Digest::of(&pre).0);
    }

    pub fn is_registered(&self, id: &str) -> bool {
        self.secrets.contains_key(id)
    }

    pub fn sign(&self, id: &str, message: &[u8]) -> Option<Vec<u8>> {
        self.secrets.get(id).map(|k| keyed_digest(k, message))
    }

    pub fn verify(&self, id: &str, message: &[u8], tag: &[u8]) -> bool {
        let Some(key) = self.secrets.get(id) else {
            return false;
        };
        let mut mac = HmacSha256::new_from_slice(key).expect("HMAC accepts any key length");
        mac.update(message);
        mac.verify_slice(tag).is_ok()
    }
}

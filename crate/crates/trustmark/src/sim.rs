//! Simulated ledger and outside storage, standing in for the real chains.
//!
//! The ledger is an append-only transaction log parameterized by a chain
//! profile; it enforces the chain's per-transaction message capacity and
//! nothing else. Each transaction stores an optional 32-byte reference to its
//! predecessor at a fixed offset of the stored record, the way real chains
//! link transactions outside the embedded message itself.
//!
//! The storage stub is semi-honest: it returns stored bytes unmodified or
//! reports them missing. Tests may tamper with objects explicitly to exercise
//! integrity checks.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::embed::{ChainProfile, StorageKind, StorageRef};
use crate::error::Error;
use crate::group::sha256;

/// One simulated transaction: the embedded message body plus the predecessor
/// link occupying bytes 0..32 of the stored record (zero when unlinked).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimTx {
    #[serde(with = "hex_array")]
    pub txid: [u8; 32],
    #[serde(with = "hex_array")]
    pub prev: [u8; 32],
    #[serde(with = "hex_vec")]
    pub body: Vec<u8>,
    pub seq: u64,
}

impl SimTx {
    pub const NO_PREV: [u8; 32] = [0u8; 32];

    pub fn has_prev(&self) -> bool {
        self.prev != Self::NO_PREV
    }

    /// Stored record layout: predecessor txid, then the message body.
    pub fn record_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(32 + self.body.len());
        out.extend_from_slice(&self.prev);
        out.extend_from_slice(&self.body);
        out
    }
}

/// Append-only transaction log with `txid = SHA256(record || seq)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimLedger {
    pub profile: ChainProfile,
    txs: Vec<SimTx>,
    #[serde(skip)]
    index: HashMap<[u8; 32], usize>,
}

impl SimLedger {
    pub fn new(profile: ChainProfile) -> SimLedger {
        SimLedger {
            profile,
            txs: Vec::new(),
            index: HashMap::new(),
        }
    }

    /// Appends a transaction. Rejects bodies beyond the chain's capacity.
    pub fn submit_tx(&mut self, body: &[u8], prev: Option<[u8; 32]>) -> Result<[u8; 32], Error> {
        if body.is_empty() {
            return Err(Error::Usage("transaction body must be nonempty".into()));
        }
        if let Some(max) = self.profile.max_chunk {
            if body.len() > max {
                return Err(Error::Usage(format!(
                    "body of {} bytes exceeds {} capacity of {max}",
                    body.len(),
                    self.profile.chain.name()
                )));
            }
        }
        if let Some(prev_txid) = prev {
            if !self.index.contains_key(&prev_txid) {
                return Err(Error::MissingTx(hex::encode(prev_txid)));
            }
        }
        let seq = self.txs.len() as u64;
        let tx = SimTx {
            txid: [0u8; 32],
            prev: prev.unwrap_or(SimTx::NO_PREV),
            body: body.to_vec(),
            seq,
        };
        let txid = sha256(&[&tx.record_bytes(), &seq.to_be_bytes()]);
        let tx = SimTx { txid, ..tx };
        self.index.insert(txid, self.txs.len());
        self.txs.push(tx);
        Ok(txid)
    }

    pub fn get_tx(&self, txid: &[u8; 32]) -> Result<&SimTx, Error> {
        self.index
            .get(txid)
            .map(|&i| &self.txs[i])
            .ok_or_else(|| Error::MissingTx(hex::encode(txid)))
    }

    pub fn len(&self) -> usize {
        self.txs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.txs.is_empty()
    }

    pub fn transactions(&self) -> &[SimTx] {
        &self.txs
    }

    /// Rebuilds the txid index after deserialization.
    pub fn reindex(&mut self) {
        self.index = self
            .txs
            .iter()
            .enumerate()
            .map(|(i, tx)| (tx.txid, i))
            .collect();
    }

    pub fn to_json(&self) -> Result<String, Error> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<SimLedger, Error> {
        let mut ledger: SimLedger = serde_json::from_str(json)?;
        ledger.reindex();
        Ok(ledger)
    }
}

/// Semi-honest outside storage with content-derived references.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SimStorage {
    objects: BTreeMap<String, StoredObject>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct StoredObject {
    kind: StorageKind,
    #[serde(with = "hex_vec")]
    bytes: Vec<u8>,
}

impl SimStorage {
    pub fn new() -> SimStorage {
        SimStorage::default()
    }

    /// Stores `bytes` and returns a reference of the requested kind. URL
    /// references are 66 bytes, storage paths 48 bytes, matching the
    /// reference shapes the embedding layer is sized for.
    pub fn put(&mut self, bytes: &[u8], kind: StorageKind) -> StorageRef {
        let digest = sha256(&[bytes]);
        let rendered = match kind {
            StorageKind::Url => format!("https://storage.example/o/{}", hex::encode(&digest[..20])),
            StorageKind::IpfsPath => format!("/ipfs/{}", hex::encode(&digest[..21])),
        };
        let reference = StorageRef {
            kind,
            bytes: rendered.clone().into_bytes(),
        };
        self.objects.insert(
            rendered,
            StoredObject {
                kind,
                bytes: bytes.to_vec(),
            },
        );
        reference
    }

    pub fn get(&self, reference: &StorageRef) -> Option<&[u8]> {
        let key = String::from_utf8_lossy(&reference.bytes).into_owned();
        self.objects
            .get(&key)
            .filter(|o| o.kind == reference.kind)
            .map(|o| o.bytes.as_slice())
    }

    pub fn remove(&mut self, reference: &StorageRef) {
        let key = String::from_utf8_lossy(&reference.bytes).into_owned();
        self.objects.remove(&key);
    }

    /// Deliberately corrupts a stored object; used to exercise the integrity
    /// checks that the semi-honest contract makes otherwise unreachable.
    pub fn tamper(&mut self, reference: &StorageRef, byte_index: usize, mask: u8) -> Result<(), Error> {
        let key = String::from_utf8_lossy(&reference.bytes).into_owned();
        let object = self
            .objects
            .get_mut(&key)
            .ok_or_else(|| Error::MissingStorage(key.clone()))?;
        if byte_index >= object.bytes.len() {
            return Err(Error::Usage("tamper index out of range".into()));
        }
        object.bytes[byte_index] ^= mask;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn to_json(&self) -> Result<String, Error> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<SimStorage, Error> {
        Ok(serde_json::from_str(json)?)
    }
}

pub(crate) mod hex_array {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8; 32], serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&hex::encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<[u8; 32], D::Error> {
        let s = String::deserialize(deserializer)?;
        let v = hex::decode(&s).map_err(D::Error::custom)?;
        v.try_into()
            .map_err(|_| D::Error::custom("expected 32 bytes"))
    }
}

pub(crate) mod hex_vec {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&hex::encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(deserializer)?;
        hex::decode(&s).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::ChainProfile;
    use crate::group::sha256;

    #[test]
    fn submit_then_get_is_identity() {
        let mut ledger = SimLedger::new(ChainProfile::nem());
        let txid = ledger.submit_tx(b"hello", None).unwrap();
        assert_eq!(ledger.get_tx(&txid).unwrap().body, b"hello");
    }

    #[test]
    fn identical_payloads_get_distinct_txids() {
        let mut ledger = SimLedger::new(ChainProfile::nem());
        let a = ledger.submit_tx(b"same", None).unwrap();
        let b = ledger.submit_tx(b"same", None).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn unknown_txid_is_missing() {
        let ledger = SimLedger::new(ChainProfile::btc(200_000));
        assert!(matches!(
            ledger.get_tx(&[42u8; 32]),
            Err(Error::MissingTx(_))
        ));
    }

    #[test]
    fn capacity_is_enforced() {
        let mut ledger = SimLedger::new(ChainProfile::btc(200_000));
        assert!(ledger.submit_tx(&[1u8; 80], None).is_ok());
        assert!(ledger.submit_tx(&[1u8; 81], None).is_err());
        assert!(ledger.submit_tx(b"", None).is_err());
    }

    #[test]
    fn links_require_existing_predecessors() {
        let mut ledger = SimLedger::new(ChainProfile::eth());
        assert!(ledger.submit_tx(b"x", Some([9u8; 32])).is_err());
        let a = ledger.submit_tx(b"first", None).unwrap();
        let b = ledger.submit_tx(b"second", Some(a)).unwrap();
        let record = ledger.get_tx(&b).unwrap().record_bytes();
        assert_eq!(&record[..32], &a);
    }

    #[test]
    fn stored_bytes_are_never_mutated() {
        let mut ledger = SimLedger::new(ChainProfile::nem());
        let body = vec![7u8; 600];
        let digest = sha256(&[&body]);
        let txid = ledger.submit_tx(&body, None).unwrap();
        for _ in 0..10 {
            ledger.submit_tx(b"noise", None).unwrap();
        }
        assert_eq!(sha256(&[&ledger.get_tx(&txid).unwrap().body]), digest);
    }

    #[test]
    fn ledger_json_round_trips() {
        let mut ledger = SimLedger::new(ChainProfile::btc(200_000));
        let a = ledger.submit_tx(b"one", None).unwrap();
        ledger.submit_tx(b"two", Some(a)).unwrap();
        let parsed = SimLedger::from_json(&ledger.to_json().unwrap()).unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed.get_tx(&a).unwrap().body, b"one");
    }

    #[test]
    fn storage_round_trip_and_reference_shapes() {
        let mut storage = SimStorage::new();
        let url_ref = storage.put(b"object-a", StorageKind::Url);
        let ipfs_ref = storage.put(b"object-b", StorageKind::IpfsPath);
        assert_eq!(url_ref.bytes.len(), 66);
        assert_eq!(ipfs_ref.bytes.len(), 48);
        assert_eq!(storage.get(&url_ref).unwrap(), b"object-a");
        assert_eq!(storage.get(&ipfs_ref).unwrap(), b"object-b");

        storage.remove(&url_ref);
        assert!(storage.get(&url_ref).is_none());
    }

    #[test]
    fn tampering_is_visible_in_digest() {
        let mut storage = SimStorage::new();
        let reference = storage.put(b"fragile", StorageKind::Url);
        let before = sha256(&[storage.get(&reference).unwrap()]);
        storage.tamper(&reference, 0, 0x80).unwrap();
        let after = sha256(&[storage.get(&reference).unwrap()]);
        assert_ne!(before, after);
    }
}

//! Chain-embedding codecs: canonical token bytes, per-chain chunking, txid
//! linking for multi-transaction payloads, the digest-plus-storage-reference
//! mode, and fee estimation.
//!
//! Two embedding modes exist. Case 1 places the full token on chain, split
//! greedily into message-capacity chunks. Case 2 places only the token's
//! SHA-256 digest and a reference to an outside store holding the token.
//! Multi-chunk payloads are ordered by each transaction's predecessor link,
//! which lives at a fixed offset of the stored record and costs no message
//! capacity; extraction walks the links backward from the head transaction.

use serde::{Deserialize, Serialize};

use crate::ars::RingSig;
use crate::error::Error;
use crate::group::sha256;
use crate::sim::{SimLedger, SimStorage, SimTx};
use crate::token::{ChainId, Token, TokenMessage};

/// Per-chain embedding constraints and fee model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainProfile {
    pub chain: ChainId,
    /// Message bytes a single transaction can carry; `None` means the chain
    /// has no practical bound for these payload sizes.
    pub max_chunk: Option<usize>,
    pub fee: FeeModel,
}

/// How remittance charges are computed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum FeeModel {
    /// Flat rate per transaction, in satoshi.
    Btc { sat_per_tx: u64 },
    /// Base gas plus calldata gas per byte (16 nonzero / 4 zero).
    Eth,
    /// `(ceil(len/32) + 1) * 0.05 XEM` per message.
    Nem,
}

impl ChainProfile {
    pub fn btc(sat_per_tx: u64) -> ChainProfile {
        ChainProfile {
            chain: ChainId::Btc,
            max_chunk: Some(80),
            fee: FeeModel::Btc { sat_per_tx },
        }
    }

    pub fn eth() -> ChainProfile {
        ChainProfile {
            chain: ChainId::Eth,
            max_chunk: None,
            fee: FeeModel::Eth,
        }
    }

    pub fn nem() -> ChainProfile {
        ChainProfile {
            chain: ChainId::Nem,
            max_chunk: Some(1024),
            fee: FeeModel::Nem,
        }
    }

    /// The default profile for a chain, with the reference BTC rate of
    /// 0.002 BTC per confirmed transaction.
    pub fn default_for(chain: ChainId) -> ChainProfile {
        match chain {
            ChainId::Btc => ChainProfile::btc(200_000),
            ChainId::Eth => ChainProfile::eth(),
            ChainId::Nem => ChainProfile::nem(),
        }
    }
}

/// Full token on chain, or digest plus storage reference.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbedMode {
    Case1Full,
    Case2Digest,
}

impl EmbedMode {
    fn byte(self) -> u8 {
        match self {
            EmbedMode::Case1Full => 0x01,
            EmbedMode::Case2Digest => 0x02,
        }
    }

    fn from_byte(b: u8) -> Result<EmbedMode, Error> {
        match b {
            0x01 => Ok(EmbedMode::Case1Full),
            0x02 => Ok(EmbedMode::Case2Digest),
            other => Err(Error::Encoding(format!("unknown embed mode {other:#04x}"))),
        }
    }
}

/// Whether chunks are chained by predecessor txid or stand alone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkMode {
    Single,
    TxidChain,
}

/// Reference to an object held by outside storage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StorageRef {
    pub kind: StorageKind,
    #[serde(with = "crate::sim::hex_vec")]
    pub bytes: Vec<u8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StorageKind {
    Url,
    IpfsPath,
}

impl StorageRef {
    fn kind_byte(&self) -> u8 {
        match self.kind {
            StorageKind::Url => 0x01,
            StorageKind::IpfsPath => 0x02,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(3 + self.bytes.len());
        out.push(self.kind_byte());
        out.extend_from_slice(&(self.bytes.len() as u16).to_be_bytes());
        out.extend_from_slice(&self.bytes);
        out
    }

    pub fn parse(bytes: &[u8]) -> Result<(StorageRef, usize), Error> {
        if bytes.len() < 3 {
            return Err(Error::Encoding("storage reference truncated".into()));
        }
        let kind = match bytes[0] {
            0x01 => StorageKind::Url,
            0x02 => StorageKind::IpfsPath,
            other => {
                return Err(Error::Encoding(format!(
                    "unknown storage reference kind {other:#04x}"
                )))
            }
        };
        let len = u16::from_be_bytes([bytes[1], bytes[2]]) as usize;
        if bytes.len() < 3 + len {
            return Err(Error::Encoding("storage reference truncated".into()));
        }
        Ok((
            StorageRef {
                kind,
                bytes: bytes[3..3 + len].to_vec(),
            },
            3 + len,
        ))
    }

    pub fn rendered(&self) -> String {
        String::from_utf8_lossy(&self.bytes).into_owned()
    }
}

/// An ordered set of transaction bodies ready for submission.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkPlan {
    pub chain: ChainId,
    pub mode: EmbedMode,
    pub link_mode: LinkMode,
    pub chunks: Vec<Vec<u8>>,
}

impl ChunkPlan {
    pub fn chunk_sizes(&self) -> Vec<usize> {
        self.chunks.iter().map(|c| c.len()).collect()
    }
}

/// Canonical wire form of a token: message, ring id, signature. Deterministic,
/// with an exact inverse.
pub fn encode_token(token: &Token) -> Vec<u8> {
    let mut out = token.msg.to_bytes();
    out.extend_from_slice(&token.ring_id);
    out.extend_from_slice(&token.sig.to_bytes());
    out
}

/// Inverse of [`encode_token`] for ring shape `(n, m)`.
pub fn decode_token(bytes: &[u8], n: usize, m: usize) -> Result<Token, Error> {
    let (msg, consumed) = TokenMessage::parse(bytes)?;
    let rest = &bytes[consumed..];
    if rest.len() != 32 + RingSig::byte_len(n, m) {
        return Err(Error::Encoding(format!(
            "token has {} trailing bytes, expected {}",
            rest.len(),
            32 + RingSig::byte_len(n, m)
        )));
    }
    let mut ring_id = [0u8; 32];
    ring_id.copy_from_slice(&rest[..32]);
    let sig = RingSig::from_bytes(n, m, &rest[32..])?;
    Ok(Token { msg, sig, ring_id })
}

fn split_chunks(payload: &[u8], profile: &ChainProfile) -> Vec<Vec<u8>> {
    match profile.max_chunk {
        Some(max) => payload.chunks(max).map(|c| c.to_vec()).collect(),
        None => vec![payload.to_vec()],
    }
}

fn plan(payload: Vec<u8>, profile: &ChainProfile, mode: EmbedMode) -> ChunkPlan {
    let mut tagged = Vec::with_capacity(1 + payload.len());
    tagged.push(mode.byte());
    tagged.extend_from_slice(&payload);
    let chunks = split_chunks(&tagged, profile);
    let link_mode = if chunks.len() > 1 {
        LinkMode::TxidChain
    } else {
        LinkMode::Single
    };
    ChunkPlan {
        chain: profile.chain,
        mode,
        link_mode,
        chunks,
    }
}

/// Plans a direct embedding of `payload` (normally [`encode_token`] output):
/// greedy ceiling-division split into message-capacity chunks.
pub fn plan_case1(payload: &[u8], profile: &ChainProfile) -> Result<ChunkPlan, Error> {
    if payload.is_empty() {
        return Err(Error::Usage("cannot embed an empty payload".into()));
    }
    Ok(plan(payload.to_vec(), profile, EmbedMode::Case1Full))
}

/// Plans a digest embedding: the payload is the SHA-256 digest of the token
/// bytes followed by the storage reference that holds them.
pub fn plan_case2(
    token_bytes: &[u8],
    storage_ref: &StorageRef,
    profile: &ChainProfile,
) -> Result<ChunkPlan, Error> {
    if token_bytes.is_empty() {
        return Err(Error::Usage("cannot embed an empty token".into()));
    }
    if storage_ref.bytes.is_empty() {
        return Err(Error::Usage("storage reference must be nonempty".into()));
    }
    let digest = sha256(&[token_bytes]);
    let mut payload = Vec::with_capacity(32 + 3 + storage_ref.bytes.len());
    payload.extend_from_slice(&digest);
    payload.extend_from_slice(&storage_ref.to_bytes());
    Ok(plan(payload, profile, EmbedMode::Case2Digest))
}

/// Submits the plan's chunks in order. Every chunk after the first records the
/// txid of its predecessor; the returned head txid is the final transaction,
/// from which the chain is walked backward.
pub fn link_and_submit(plan: &ChunkPlan, ledger: &mut SimLedger) -> Result<[u8; 32], Error> {
    if plan.chunks.is_empty() {
        return Err(Error::Usage("plan has no chunks".into()));
    }
    let mut prev: Option<[u8; 32]> = None;
    for (index, chunk) in plan.chunks.iter().enumerate() {
        let txid = ledger
            .submit_tx(chunk, prev)
            .map_err(|e| Error::LedgerRejected {
                index,
                reason: e.to_string(),
            })?;
        prev = Some(txid);
    }
    Ok(prev.expect("at least one chunk"))
}

/// Walks predecessor links from `head_txid` and reassembles the embedded
/// payload. Returns the embedding mode and the payload body.
pub fn recover_payload(
    head_txid: &[u8; 32],
    ledger: &SimLedger,
) -> Result<(EmbedMode, Vec<u8>), Error> {
    let mut bodies: Vec<&[u8]> = Vec::new();
    let mut cursor: &SimTx = ledger.get_tx(head_txid)?;
    let mut steps = 0usize;
    loop {
        bodies.push(&cursor.body);
        if !cursor.has_prev() {
            break;
        }
        steps += 1;
        if steps > ledger.len() {
            return Err(Error::Encoding("predecessor links form a cycle".into()));
        }
        cursor = ledger.get_tx(&cursor.prev)?;
    }
    bodies.reverse();
    let mut payload: Vec<u8> = Vec::with_capacity(bodies.iter().map(|b| b.len()).sum());
    for body in bodies {
        payload.extend_from_slice(body);
    }
    if payload.is_empty() {
        return Err(Error::Encoding("empty embedded payload".into()));
    }
    let mode = EmbedMode::from_byte(payload[0])?;
    Ok((mode, payload[1..].to_vec()))
}

/// Recovers a token from the ledger. Case 1 decodes the reassembled bytes
/// directly; case 2 fetches the object from `storage`, verifies its SHA-256
/// digest against the embedded one, then decodes. A missing object and a
/// digest mismatch are distinct errors.
pub fn extract(
    head_txid: &[u8; 32],
    ledger: &SimLedger,
    storage: Option<&SimStorage>,
    n: usize,
    m: usize,
) -> Result<Token, Error> {
    let (mode, payload) = recover_payload(head_txid, ledger)?;
    match mode {
        EmbedMode::Case1Full => decode_token(&payload, n, m),
        EmbedMode::Case2Digest => {
            if payload.len() < 32 {
                return Err(Error::Encoding("digest payload truncated".into()));
            }
            let mut digest = [0u8; 32];
            digest.copy_from_slice(&payload[..32]);
            let (reference, consumed) = StorageRef::parse(&payload[32..])?;
            if 32 + consumed != payload.len() {
                return Err(Error::Encoding("trailing bytes after storage reference".into()));
            }
            let storage =
                storage.ok_or_else(|| Error::MissingStorage(reference.rendered()))?;
            let object = storage
                .get(&reference)
                .ok_or_else(|| Error::MissingStorage(reference.rendered()))?;
            if sha256(&[object]) != digest {
                return Err(Error::DigestMismatch(reference.rendered()));
            }
            decode_token(object, n, m)
        }
    }
}

/// A remittance charge in the chain's native unit, kept as exact integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "unit", rename_all = "lowercase")]
pub enum FeeQuote {
    Btc { sats: u64 },
    Eth { gas: u64 },
    Nem { micro_xem: u64 },
}

impl FeeQuote {
    pub fn describe(&self) -> String {
        match self {
            FeeQuote::Btc { sats } => format!("{} BTC", format_fixed(*sats, 100_000_000)),
            FeeQuote::Eth { gas } => format!("{gas} gas"),
            FeeQuote::Nem { micro_xem } => format!("{} XEM", format_fixed(*micro_xem, 1_000_000)),
        }
    }
}

fn format_fixed(value: u64, denom: u64) -> String {
    let whole = value / denom;
    let frac = value % denom;
    if frac == 0 {
        return format!("{whole}");
    }
    let mut digits = format!("{:0width$}", frac, width = denom.ilog10() as usize);
    while digits.ends_with('0') {
        digits.pop();
    }
    format!("{whole}.{digits}")
}

/// Fee for the chunk byte contents. ETH charges calldata gas per byte value;
/// the other models depend only on sizes.
pub fn estimate_fee(profile: &ChainProfile, chunks: &[Vec<u8>]) -> FeeQuote {
    match &profile.fee {
        FeeModel::Btc { sat_per_tx } => FeeQuote::Btc {
            sats: sat_per_tx * chunks.len() as u64,
        },
        FeeModel::Eth => {
            let mut gas = 0u64;
            for chunk in chunks {
                let zeros = chunk.iter().filter(|b| **b == 0).count() as u64;
                let nonzeros = chunk.len() as u64 - zeros;
                gas += 21_000 + 16 * nonzeros + 4 * zeros;
            }
            FeeQuote::Eth { gas }
        }
        FeeModel::Nem => FeeQuote::Nem {
            micro_xem: chunks
                .iter()
                .map(|c| (c.len() as u64 / 32 + u64::from(c.len() % 32 != 0) + 1) * 50_000)
                .sum(),
        },
    }
}

/// Fee from chunk sizes alone. ETH bytes are assumed nonzero, the worst case
/// for calldata gas.
pub fn estimate_fee_sizes(profile: &ChainProfile, sizes: &[usize]) -> FeeQuote {
    match &profile.fee {
        FeeModel::Eth => FeeQuote::Eth {
            gas: sizes.iter().map(|len| 21_000 + 16 * *len as u64).sum(),
        },
        _ => {
            let chunks: Vec<Vec<u8>> = sizes.iter().map(|len| vec![0x5A; *len]).collect();
            estimate_fee(profile, &chunks)
        }
    }
}

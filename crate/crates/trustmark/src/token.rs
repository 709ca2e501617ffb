//! The token protocol: message format, issuance, revocation, submitter
//! validation, revocation-link verification, and auditor wrappers.
//!
//! A token is a signed message about a target address. Issuance tokens carry a
//! Pedersen commitment to a fresh linking secret; revocation tokens reveal the
//! secret and decommitment together with the transaction hash of the token
//! being revoked. Since only the original admitter knows the opening, only
//! they can produce an accepted revocation, while both tokens stay anonymous.

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use crate::ars::{self, AdmitterKeypair, OpenProof, Ring, RingSig};
use crate::crs::PublicParams;
use crate::error::Error;
use crate::group::{GroupElement, Scalar};
use crate::pedersen::{self, CommitKey, Commitment, Decommit};

/// Chains a target address can live on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainId {
    Btc,
    Eth,
    Nem,
}

impl ChainId {
    pub fn code(self) -> u8 {
        match self {
            ChainId::Btc => 0x01,
            ChainId::Eth => 0x02,
            ChainId::Nem => 0x03,
        }
    }

    pub fn from_code(code: u8) -> Result<ChainId, Error> {
        match code {
            0x01 => Ok(ChainId::Btc),
            0x02 => Ok(ChainId::Eth),
            0x03 => Ok(ChainId::Nem),
            other => Err(Error::Encoding(format!("unknown chain id byte {other:#04x}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ChainId::Btc => "btc",
            ChainId::Eth => "eth",
            ChainId::Nem => "nem",
        }
    }
}

/// Trustworthiness or untrustworthiness of the target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrustFlag {
    Trust,
    Untrust,
}

impl TrustFlag {
    fn byte(self) -> u8 {
        match self {
            TrustFlag::Trust => 0x01,
            TrustFlag::Untrust => 0x00,
        }
    }

    fn from_byte(b: u8) -> Result<TrustFlag, Error> {
        match b {
            0x01 => Ok(TrustFlag::Trust),
            0x00 => Ok(TrustFlag::Untrust),
            other => Err(Error::Encoding(format!("invalid flag byte {other:#04x}"))),
        }
    }
}

/// Address of the target user on a specific chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetAddress {
    pub chain: ChainId,
    #[serde(with = "hex_bytes")]
    pub bytes: Vec<u8>,
}

/// Exactly one of: a commitment (issuance) or its opening plus the hash of the
/// transaction being revoked (revocation).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenPayload {
    Issue {
        commitment: Commitment,
    },
    Revoke {
        r_link: Scalar,
        dec: Scalar,
        orig_txid: [u8; 32],
    },
}

/// The message an admitter signs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenMessage {
    pub target: TargetAddress,
    pub flag: TrustFlag,
    pub auditor_pk: GroupElement,
    /// Unix seconds.
    pub expiry: u64,
    pub payload: TokenPayload,
    pub note: String,
}

const MESSAGE_VERSION: u8 = 0x01;
const PAYLOAD_ISSUE: u8 = 0x01;
const PAYLOAD_REVOKE: u8 = 0x02;

impl TokenMessage {
    /// Canonical signed encoding: version, chain, length-prefixed address,
    /// flag, auditor key, big-endian expiry, tagged payload, length-prefixed
    /// note. Fixed layout so signatures are portable.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(128 + self.target.bytes.len() + self.note.len());
        out.push(MESSAGE_VERSION);
        out.push(self.target.chain.code());
        out.extend_from_slice(&(self.target.bytes.len() as u16).to_be_bytes());
        out.extend_from_slice(&self.target.bytes);
        out.push(self.flag.byte());
        out.extend_from_slice(&self.auditor_pk.encode());
        out.extend_from_slice(&self.expiry.to_be_bytes());
        match &self.payload {
            TokenPayload::Issue { commitment } => {
                out.push(PAYLOAD_ISSUE);
                out.extend_from_slice(&commitment.0.encode());
            }
            TokenPayload::Revoke {
                r_link,
                dec,
                orig_txid,
            } => {
                out.push(PAYLOAD_REVOKE);
                out.extend_from_slice(&r_link.encode());
                out.extend_from_slice(&dec.encode());
                out.extend_from_slice(orig_txid);
            }
        }
        let note_bytes = self.note.as_bytes();
        out.extend_from_slice(&(note_bytes.len() as u16).to_be_bytes());
        out.extend_from_slice(note_bytes);
        out
    }

    /// Strict inverse of [`to_bytes`]: rejects unknown tags, bad lengths, and
    /// trailing bytes. Returns the message and the number of bytes consumed.
    pub fn parse(bytes: &[u8]) -> Result<(TokenMessage, usize), Error> {
        let mut cursor = Cursor::new(bytes);
        let version = cursor.take_byte()?;
        if version != MESSAGE_VERSION {
            return Err(Error::Encoding(format!("unknown message version {version:#04x}")));
        }
        let chain = ChainId::from_code(cursor.take_byte()?)?;
        let addr_len = cursor.take_u16()? as usize;
        let addr = cursor.take_bytes(addr_len)?.to_vec();
        let flag = TrustFlag::from_byte(cursor.take_byte()?)?;
        let auditor_pk = GroupElement::decode(cursor.take_bytes(32)?)?;
        let expiry = cursor.take_u64()?;
        let payload = match cursor.take_byte()? {
            PAYLOAD_ISSUE => TokenPayload::Issue {
                commitment: Commitment(GroupElement::decode(cursor.take_bytes(32)?)?),
            },
            PAYLOAD_REVOKE => {
                let r_link = Scalar::decode(cursor.take_bytes(32)?)?;
                let dec = Scalar::decode(cursor.take_bytes(32)?)?;
                let mut orig_txid = [0u8; 32];
                orig_txid.copy_from_slice(cursor.take_bytes(32)?);
                TokenPayload::Revoke {
                    r_link,
                    dec,
                    orig_txid,
                }
            }
            other => {
                return Err(Error::Encoding(format!("unknown payload tag {other:#04x}")));
            }
        };
        let note_len = cursor.take_u16()? as usize;
        let note = String::from_utf8(cursor.take_bytes(note_len)?.to_vec())
            .map_err(|_| Error::Encoding("note is not valid UTF-8".into()))?;
        Ok((
            TokenMessage {
                target: TargetAddress { chain, bytes: addr },
                flag,
                auditor_pk,
                expiry,
                payload,
                note,
            },
            cursor.consumed(),
        ))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<TokenMessage, Error> {
        let (msg, consumed) = Self::parse(bytes)?;
        if consumed != bytes.len() {
            return Err(Error::Encoding("trailing bytes after message".into()));
        }
        Ok(msg)
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    offset: usize,
}

impl<'a> Cursor<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Cursor { bytes, offset: 0 }
    }

    fn take_bytes(&mut self, len: usize) -> Result<&'a [u8], Error> {
        if self.offset + len > self.bytes.len() {
            return Err(Error::Encoding("message truncated".into()));
        }
        let slice = &self.bytes[self.offset..self.offset + len];
        self.offset += len;
        Ok(slice)
    }

    fn take_byte(&mut self) -> Result<u8, Error> {
        Ok(self.take_bytes(1)?[0])
    }

    fn take_u16(&mut self) -> Result<u16, Error> {
        Ok(u16::from_be_bytes(self.take_bytes(2)?.try_into().unwrap()))
    }

    fn take_u64(&mut self) -> Result<u64, Error> {
        Ok(u64::from_be_bytes(self.take_bytes(8)?.try_into().unwrap()))
    }

    fn consumed(&self) -> usize {
        self.offset
    }
}

/// A signed token plus the digest of the ring it was signed over. Verifiers
/// resolve the ring through the admitter registry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub msg: TokenMessage,
    pub sig: RingSig,
    pub ring_id: [u8; 32],
}

/// The linking secret an admitter keeps after issuing a token; revealing it is
/// what authorizes a revocation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinkSecret {
    pub r_link: Scalar,
    pub dec: Scalar,
}

/// Issues a token for `target`, designating `auditor_pk`. Returns the token
/// and the linking secret the admitter must keep to be able to revoke later.
#[allow(clippy::too_many_arguments)]
pub fn issue_token<R: RngCore + CryptoRng>(
    pp: &PublicParams,
    key: &CommitKey,
    admitter: &AdmitterKeypair,
    ring: &Ring,
    auditor_pk: &GroupElement,
    target: TargetAddress,
    flag: TrustFlag,
    expiry: u64,
    note: &str,
    now: u64,
    rng: &mut R,
) -> Result<(Token, LinkSecret), Error> {
    if !ring.contains(&admitter.pk) {
        return Err(Error::Usage("admitter's key is not in the ring".into()));
    }
    if expiry <= now {
        return Err(Error::Usage("expiry must be in the future".into()));
    }
    let r_link = Scalar::random(rng);
    let (commitment, dec) = pedersen::commit(key, r_link, rng);
    let msg = TokenMessage {
        target,
        flag,
        auditor_pk: *auditor_pk,
        expiry,
        payload: TokenPayload::Issue { commitment },
        note: note.to_string(),
    };
    let sig = ars::sign(pp, auditor_pk, &msg.to_bytes(), ring, &admitter.sk, rng)?;
    Ok((
        Token {
            msg,
            sig,
            ring_id: ring.ring_id(),
        },
        LinkSecret {
            r_link,
            dec: dec.0,
        },
    ))
}

/// Revokes a previously issued token by revealing its linking secret and the
/// hash of the transaction carrying it.
#[allow(clippy::too_many_arguments)]
pub fn revoke_token<R: RngCore + CryptoRng>(
    pp: &PublicParams,
    admitter: &AdmitterKeypair,
    ring: &Ring,
    auditor_pk: &GroupElement,
    target: TargetAddress,
    flag: TrustFlag,
    link: &LinkSecret,
    orig_txid: [u8; 32],
    expiry: u64,
    note: &str,
    now: u64,
    rng: &mut R,
) -> Result<Token, Error> {
    if !ring.contains(&admitter.pk) {
        return Err(Error::Usage("admitter's key is not in the ring".into()));
    }
    if expiry <= now {
        return Err(Error::Usage("expiry must be in the future".into()));
    }
    let msg = TokenMessage {
        target,
        flag,
        auditor_pk: *auditor_pk,
        expiry,
        payload: TokenPayload::Revoke {
            r_link: link.r_link,
            dec: link.dec,
            orig_txid,
        },
        note: note.to_string(),
    };
    let sig = ars::sign(pp, auditor_pk, &msg.to_bytes(), ring, &admitter.sk, rng)?;
    Ok(Token {
        msg,
        sig,
        ring_id: ring.ring_id(),
    })
}

/// Directory of known admitter keys, auditor keys, and published rings.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct AdmitterRegistry {
    pub admitters: Vec<GroupElement>,
    pub auditors: Vec<GroupElement>,
    pub rings: Vec<PublishedRing>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PublishedRing {
    pub ring_id: String,
    pub members: Vec<GroupElement>,
}

impl AdmitterRegistry {
    pub fn register_admitter(&mut self, pk: GroupElement) {
        if !self.admitters.contains(&pk) {
            self.admitters.push(pk);
        }
    }

    pub fn register_auditor(&mut self, opk: GroupElement) {
        if !self.auditors.contains(&opk) {
            self.auditors.push(opk);
        }
    }

    /// Publishes a ring; members must already be registered admitters.
    pub fn publish_ring(&mut self, ring: &Ring) -> Result<[u8; 32], Error> {
        for pk in ring.members() {
            if !self.admitters.contains(pk) {
                return Err(Error::Usage("ring contains an unregistered key".into()));
            }
        }
        let id = ring.ring_id();
        let id_hex = hex::encode(id);
        if self.rings.iter().all(|r| r.ring_id != id_hex) {
            self.rings.push(PublishedRing {
                ring_id: id_hex,
                members: ring.members().to_vec(),
            });
        }
        Ok(id)
    }

    pub fn ring_by_id(&self, ring_id: &[u8; 32]) -> Option<Ring> {
        let id_hex = hex::encode(ring_id);
        self.rings
            .iter()
            .find(|r| r.ring_id == id_hex)
            .and_then(|r| Ring::new(r.members.clone()).ok())
    }

    pub fn is_known_admitter(&self, pk: &GroupElement) -> bool {
        self.admitters.contains(pk)
    }

    pub fn is_known_auditor(&self, opk: &GroupElement) -> bool {
        self.auditors.contains(opk)
    }

    pub fn to_json(&self) -> Result<String, Error> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<AdmitterRegistry, Error> {
        Ok(serde_json::from_str(json)?)
    }
}

/// Which submitter step rejected the token.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckOutcome {
    /// All four checks passed; the token is ready to embed.
    Accept,
    /// The numbered step failed.
    Abort { step: u8, reason: String },
}

impl CheckOutcome {
    pub fn is_accept(&self) -> bool {
        matches!(self, CheckOutcome::Accept)
    }
}

/// Runs the submitter's validation steps in order: (1) every ring member is a
/// known admitter, (2) the designated auditor is registered, (3) the expiry
/// has not passed, (4) the signature verifies.
pub fn submitter_check(
    pp: &PublicParams,
    token: &Token,
    registry: &AdmitterRegistry,
    now: u64,
) -> CheckOutcome {
    let ring = match registry.ring_by_id(&token.ring_id) {
        Some(ring) => ring,
        None => {
            return CheckOutcome::Abort {
                step: 1,
                reason: format!("unknown ring {}", hex::encode(token.ring_id)),
            };
        }
    };
    for pk in ring.members() {
        if !registry.is_known_admitter(pk) {
            return CheckOutcome::Abort {
                step: 1,
                reason: format!("ring contains unknown public key {}", pk.to_hex()),
            };
        }
    }
    if !registry.is_known_auditor(&token.msg.auditor_pk) {
        return CheckOutcome::Abort {
            step: 2,
            reason: format!(
                "designated auditor {} is not registered",
                token.msg.auditor_pk.to_hex()
            ),
        };
    }
    if token.msg.expiry < now {
        return CheckOutcome::Abort {
            step: 3,
            reason: format!("expiry {} has passed (now {})", token.msg.expiry, now),
        };
    }
    if !ars::verify(
        pp,
        &token.msg.auditor_pk,
        &token.msg.to_bytes(),
        &ring,
        &token.sig,
    ) {
        return CheckOutcome::Abort {
            step: 4,
            reason: "signature verification failed".into(),
        };
    }
    CheckOutcome::Accept
}

/// Checks that `revocation` legitimately revokes `original`: the payload
/// variants match, the revocation names the transaction that carried the
/// original (`original_txid`), its signature verifies over `revocation_ring`,
/// and the revealed opening matches the original's commitment. Acceptance
/// depends only on the commitment opening and the txid, not on which ring the
/// revocation was signed over.
pub fn verify_revocation(
    pp: &PublicParams,
    key: &CommitKey,
    revocation: &Token,
    revocation_ring: &Ring,
    original: &Token,
    original_txid: &[u8; 32],
) -> bool {
    let (r_link, dec, orig_txid) = match &revocation.msg.payload {
        TokenPayload::Revoke {
            r_link,
            dec,
            orig_txid,
        } => (*r_link, *dec, orig_txid),
        _ => return false,
    };
    let commitment = match &original.msg.payload {
        TokenPayload::Issue { commitment } => commitment,
        _ => return false,
    };
    if orig_txid != original_txid {
        return false;
    }
    if !ars::verify(
        pp,
        &revocation.msg.auditor_pk,
        &revocation.msg.to_bytes(),
        revocation_ring,
        &revocation.sig,
    ) {
        return false;
    }
    pedersen::com_open(key, commitment, r_link, &Decommit(dec))
}

/// Opens a token with an auditor secret key; the signed message is the
/// token's canonical encoding.
pub fn audit_open(
    pp: &PublicParams,
    token: &Token,
    ring: &Ring,
    osk: &Scalar,
) -> Option<(GroupElement, OpenProof)> {
    ars::open(pp, &token.msg.to_bytes(), ring, &token.sig, osk)
}

/// Judges an opening claim for a token.
pub fn audit_judge(
    pp: &PublicParams,
    token: &Token,
    ring: &Ring,
    claimed_pk: &GroupElement,
    proof: &OpenProof,
) -> bool {
    ars::judge(
        pp,
        &token.msg.auditor_pk,
        &token.msg.to_bytes(),
        ring,
        &token.sig,
        claimed_pk,
        proof,
    )
}

mod hex_bytes {
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

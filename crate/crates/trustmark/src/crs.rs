//! Common parameters and how to generate them honestly.
//!
//! The bases `h, h_1..h_n` must have no known discrete log relative to `g`.
//! Two paths are provided: deterministic hash-to-group derivation, and a
//! multi-party contribution ceremony in which every participant publishes
//! `g^tau_i` with a proof of knowledge of `tau_i` and the result is the sum of
//! all shares. One honest contributor suffices; the security assumption is
//! that the contributors do not all collude. Contribution secrets are returned
//! to the caller once and never stored.

use std::io::{BufRead, Write};

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::group::{base_generator, hash_to_scalar, sha256, GroupElement, Scalar};
use crate::pedersen::CommitKey;

/// Ring-shape parameters and the commitment bases shared by every algorithm.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicParams {
    pub g: GroupElement,
    pub h: GroupElement,
    /// Vector-commitment bases `h_1..h_n`.
    pub bases: Vec<GroupElement>,
    /// Digit base of the membership proof.
    pub n: usize,
    /// Number of digit levels.
    pub m: usize,
    /// Ring capacity `N = n^m`.
    pub ring_capacity: usize,
}

impl PublicParams {
    /// Bases derived by hash-to-group under fixed labels; byte-identical on
    /// every call and every platform.
    pub fn derive_deterministic(n: usize, m: usize) -> Result<PublicParams, Error> {
        if n < 2 || m < 1 {
            return Err(Error::Usage(format!(
                "ring shape requires n >= 2 and m >= 1, got n={n}, m={m}"
            )));
        }
        let ring_capacity = n
            .checked_pow(m as u32)
            .ok_or_else(|| Error::Usage("ring capacity n^m overflows".into()))?;
        let key = CommitKey::derive(n)?;
        let pp = PublicParams {
            g: key.g,
            h: key.h,
            bases: key.bases,
            n,
            m,
            ring_capacity,
        };
        pp.validate()?;
        Ok(pp)
    }

    /// Checks structural invariants: `N = n^m`, all elements valid, pairwise
    /// distinct, and `g` the fixed base generator.
    pub fn validate(&self) -> Result<(), Error> {
        if self.n < 2 || self.m < 1 {
            return Err(Error::Usage("invalid ring shape".into()));
        }
        if self.ring_capacity != self.n.pow(self.m as u32) {
            return Err(Error::Usage("ring capacity is not n^m".into()));
        }
        if self.bases.len() != self.n {
            return Err(Error::Usage("base count must equal n".into()));
        }
        if self.g != base_generator() {
            return Err(Error::Usage("g must be the fixed base generator".into()));
        }
        let mut all = vec![self.g, self.h];
        all.extend_from_slice(&self.bases);
        for e in &all {
            if e.is_identity() {
                return Err(Error::Usage("identity element in parameters".into()));
            }
        }
        for i in 0..all.len() {
            for j in (i + 1)..all.len() {
                if all[i] == all[j] {
                    return Err(Error::Usage("parameter elements must be distinct".into()));
                }
            }
        }
        Ok(())
    }

    /// Digest binding signatures to this exact parameter set.
    pub fn digest(&self) -> [u8; 32] {
        let mut data = Vec::with_capacity(8 + 32 * (2 + self.bases.len()));
        data.extend_from_slice(&(self.n as u32).to_be_bytes());
        data.extend_from_slice(&(self.m as u32).to_be_bytes());
        data.extend_from_slice(&self.g.encode());
        data.extend_from_slice(&self.h.encode());
        for b in &self.bases {
            data.extend_from_slice(&b.encode());
        }
        sha256(&[b"tm/pp/v1", &data])
    }

    pub fn commit_key(&self) -> CommitKey {
        CommitKey {
            g: self.g,
            h: self.h,
            bases: self.bases.clone(),
        }
    }

    /// Params file: every element hex-encoded plus the ring shape.
    pub fn to_json(&self) -> Result<String, Error> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<PublicParams, Error> {
        let pp: PublicParams = serde_json::from_str(json)?;
        pp.validate()?;
        Ok(pp)
    }
}

/// One participant's share `g^tau` with a Schnorr proof of knowledge of `tau`
/// bound to the ceremony label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contribution {
    pub share: GroupElement,
    pub pok: SchnorrProof,
}

/// Fiat-Shamir Schnorr proof `(t, z)` with the challenge recomputed by the
/// verifier.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchnorrProof {
    pub commitment: GroupElement,
    pub response: Scalar,
}

impl SchnorrProof {
    pub fn to_bytes(&self) -> [u8; 64] {
        let mut out = [0u8; 64];
        out[..32].copy_from_slice(&self.commitment.encode());
        out[32..].copy_from_slice(&self.response.encode());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<SchnorrProof, Error> {
        if bytes.len() != 64 {
            return Err(Error::Encoding("schnorr proof must be 64 bytes".into()));
        }
        Ok(SchnorrProof {
            commitment: GroupElement::decode(&bytes[..32])?,
            response: Scalar::decode(&bytes[32..])?,
        })
    }
}

fn pok_challenge(label: &[u8], share: &GroupElement, commitment: &GroupElement) -> Scalar {
    let mut data = Vec::with_capacity(4 + label.len() + 64);
    data.extend_from_slice(&(label.len() as u32).to_be_bytes());
    data.extend_from_slice(label);
    data.extend_from_slice(&share.encode());
    data.extend_from_slice(&commitment.encode());
    hash_to_scalar(b"crs/pok/v1", &data).expect("nonempty tag")
}

/// Produces a fresh share for the element named by `label`. The secret
/// exponent is handed back to the caller exactly once; the ceremony machinery
/// never sees it again.
pub fn contribute<R: RngCore + CryptoRng>(
    label: &[u8],
    rng: &mut R,
) -> Result<(Contribution, Scalar), Error> {
    if label.is_empty() {
        return Err(Error::Usage("ceremony label must be nonempty".into()));
    }
    let g = base_generator();
    let tau = Scalar::random(rng);
    let share = tau * g;
    let w = Scalar::random(rng);
    let commitment = w * g;
    let c = pok_challenge(label, &share, &commitment);
    let response = w + c * tau;
    Ok((
        Contribution {
            share,
            pok: SchnorrProof {
                commitment,
                response,
            },
        },
        tau,
    ))
}

/// Returns true iff the proof of knowledge is valid for `share` under `label`.
pub fn verify_contribution(label: &[u8], contribution: &Contribution) -> bool {
    if label.is_empty() || contribution.share.is_identity() {
        return false;
    }
    let c = pok_challenge(label, &contribution.share, &contribution.pok.commitment);
    contribution.response_check(c)
}

impl Contribution {
    fn response_check(&self, challenge: Scalar) -> bool {
        self.pok.response * base_generator() == self.pok.commitment + challenge * self.share
    }
}

/// Sums all verified shares. Rejects the whole batch if any proof fails, so an
/// unverified contribution can never reach the fold.
pub fn aggregate(label: &[u8], contributions: &[Contribution]) -> Result<GroupElement, Error> {
    if contributions.is_empty() {
        return Err(Error::Usage("cannot aggregate zero contributions".into()));
    }
    for (i, c) in contributions.iter().enumerate() {
        if !verify_contribution(label, c) {
            return Err(Error::Usage(format!(
                "contribution {i} failed verification for label {:?}",
                String::from_utf8_lossy(label)
            )));
        }
    }
    Ok(contributions.iter().map(|c| c.share).sum())
}

/// One line of the append-only ceremony transcript file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub label: String,
    pub share_hex: String,
    pub pok_hex: String,
    pub contributor_id: String,
}

impl TranscriptEntry {
    pub fn new(label: &str, contribution: &Contribution, contributor_id: &str) -> Self {
        TranscriptEntry {
            label: label.to_string(),
            share_hex: contribution.share.to_hex(),
            pok_hex: hex::encode(contribution.pok.to_bytes()),
            contributor_id: contributor_id.to_string(),
        }
    }

    pub fn contribution(&self) -> Result<Contribution, Error> {
        let share = GroupElement::from_hex(&self.share_hex)?;
        let pok_bytes =
            hex::decode(&self.pok_hex).map_err(|_| Error::Encoding("invalid pok hex".into()))?;
        Ok(Contribution {
            share,
            pok: SchnorrProof::from_bytes(&pok_bytes)?,
        })
    }
}

/// Appends one JSON object per line; the transcript is never rewritten.
pub fn append_transcript_entry<W: Write>(writer: &mut W, entry: &TranscriptEntry) -> Result<(), Error> {
    let line = serde_json::to_string(entry)?;
    writeln!(writer, "{line}")?;
    Ok(())
}

/// Reads a JSON-lines ceremony transcript.
pub fn read_transcript<R: BufRead>(reader: R) -> Result<Vec<TranscriptEntry>, Error> {
    let mut entries = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        entries.push(serde_json::from_str(&line)?);
    }
    Ok(entries)
}

/// Verifies every entry for `label` and folds the shares.
pub fn aggregate_transcript(entries: &[TranscriptEntry], label: &str) -> Result<GroupElement, Error> {
    let contributions = entries
        .iter()
        .filter(|e| e.label == label)
        .map(|e| e.contribution())
        .collect::<Result<Vec<_>, _>>()?;
    aggregate(label.as_bytes(), &contributions)
}

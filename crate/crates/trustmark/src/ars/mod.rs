//! Accountable ring signatures.
//!
//! A signer encrypts their own verification key under a designated auditor's
//! key and proves in zero knowledge that the plaintext is a ring member whose
//! secret key they hold. Anyone can verify the signature against the ring;
//! only the designated auditor can decrypt the signer's key, and the opening
//! comes with a proof of correct decryption that anyone can judge.
//!
//! Verification keys are commitments to zero (`pk = h^sk`), so a signature
//! simultaneously proves ring membership and knowledge of the member's secret.

mod one_out_of_many;

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use crate::crs::PublicParams;
use crate::error::Error;
use crate::group::{base_generator, hash_to_scalar, sha256, GroupElement, Scalar};

use one_out_of_many::{MembershipProof, Witness};


/// Designated auditor keypair: `opk = g^osk`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AuditorKeypair {
    pub opk: GroupElement,
    pub osk: Scalar,
}

/// Token admitter keypair: `pk = h^sk` (a commitment to zero).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdmitterKeypair {
    pub pk: GroupElement,
    pub sk: Scalar,
}

/// Ordered list of admitter keys a signature hides among.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ring {
    members: Vec<GroupElement>,
}

impl Ring {
    pub fn new(members: Vec<GroupElement>) -> Result<Ring, Error> {
        if members.is_empty() {
            return Err(Error::Usage("ring must contain at least one key".into()));
        }
        Ok(Ring { members })
    }

    pub fn members(&self) -> &[GroupElement] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, pk: &GroupElement) -> bool {
        self.members.contains(pk)
    }

    /// Digest of the ordered member encodings.
    pub fn ring_id(&self) -> [u8; 32] {
        let mut data = Vec::with_capacity(32 * self.members.len());
        for pk in &self.members {
            data.extend_from_slice(&pk.encode());
        }
        sha256(&[&data])
    }

    /// Pads to the proof's `n^m` slots by repeating the final member.
    /// Duplicate entries are legal; the verifier checks nothing about them.
    pub(crate) fn padded_slots(&self, pp: &PublicParams) -> Result<Vec<GroupElement>, Error> {
        if self.members.len() > pp.ring_capacity {
            return Err(Error::Usage(format!(
                "ring of {} exceeds capacity {}",
                self.members.len(),
                pp.ring_capacity
            )));
        }
        let mut slots = self.members.clone();
        let last = *slots.last().expect("ring is nonempty");
        slots.resize(pp.ring_capacity, last);
        Ok(slots)
    }
}

/// An accountable ring signature: the ElGamal ciphertext of the signer's key
/// plus the membership proof transcript.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingSig {
    pub(crate) enc_u: GroupElement,
    pub(crate) enc_v: GroupElement,
    pub(crate) proof: MembershipProof,
}

/// Verifiable opening: the signer's key and a proof that the ciphertext in the
/// signature decrypts to it under the auditor's key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenProof {
    pub signer_pk: GroupElement,
    commit_g: GroupElement,
    commit_u: GroupElement,
    response: Scalar,
}

/// Opener key generation.
pub fn okgen<R: RngCore + CryptoRng>(pp: &PublicParams, rng: &mut R) -> AuditorKeypair {
    let _ = pp;
    let mut osk = Scalar::random(rng);
    while osk.is_zero() {
        osk = Scalar::random(rng);
    }
    AuditorKeypair {
        opk: osk * base_generator(),
        osk,
    }
}

/// User (admitter) key generation.
pub fn ukgen<R: RngCore + CryptoRng>(pp: &PublicParams, rng: &mut R) -> AdmitterKeypair {
    let mut sk = Scalar::random(rng);
    while sk.is_zero() {
        sk = Scalar::random(rng);
    }
    AdmitterKeypair { pk: sk * pp.h, sk }
}

/// Fiat-Shamir context prefix: everything the transcript is bound to besides
/// the prover's own messages.
fn signing_context(pp: &PublicParams, opk: &GroupElement, ring: &Ring, message: &[u8]) -> Vec<u8> {
    let mut context = Vec::with_capacity(128);
    context.extend_from_slice(&pp.digest());
    context.extend_from_slice(&opk.encode());
    context.extend_from_slice(&ring.ring_id());
    context.extend_from_slice(&sha256(&[message]));
    context
}

/// Signs `message` on behalf of `ring`, designating the auditor `opk`.
/// The signer's public key must be a ring member.
pub fn sign<R: RngCore + CryptoRng>(
    pp: &PublicParams,
    opk: &GroupElement,
    message: &[u8],
    ring: &Ring,
    sk: &Scalar,
    rng: &mut R,
) -> Result<RingSig, Error> {
    let pk = *sk * pp.h;
    let index = ring
        .members
        .iter()
        .position(|member| *member == pk)
        .ok_or_else(|| Error::Usage("signer's public key is not in the ring".into()))?;
    let slots = ring.padded_slots(pp)?;

    let rho = Scalar::random(rng);
    let enc_u = rho * base_generator();
    let enc_v = rho * *opk + pk;

    let context = signing_context(pp, opk, ring, message);
    let proof = one_out_of_many::prove(
        pp,
        opk,
        &slots,
        &enc_u,
        &enc_v,
        &Witness {
            index,
            sk: *sk,
            enc_randomness: rho,
        },
        &context,
        rng,
    )?;

    Ok(RingSig {
        enc_u,
        enc_v,
        proof,
    })
}

/// Verifies a signature. Deterministic; never panics on hostile input.
pub fn verify(
    pp: &PublicParams,
    opk: &GroupElement,
    message: &[u8],
    ring: &Ring,
    sig: &RingSig,
) -> bool {
    let slots = match ring.padded_slots(pp) {
        Ok(slots) => slots,
        Err(_) => return false,
    };
    let context = signing_context(pp, opk, ring, message);
    one_out_of_many::verify(pp, opk, &slots, &sig.enc_u, &sig.enc_v, &sig.proof, &context)
}

#[allow(clippy::too_many_arguments)]
fn open_challenge(
    pp: &PublicParams,
    opk: &GroupElement,
    ring: &Ring,
    message: &[u8],
    sig: &RingSig,
    signer_pk: &GroupElement,
    commit_g: &GroupElement,
    commit_u: &GroupElement,
) -> Scalar {
    let mut data = signing_context(pp, opk, ring, message);
    data.extend_from_slice(&sha256(&[&sig.to_bytes()]));
    data.extend_from_slice(&signer_pk.encode());
    data.extend_from_slice(&commit_g.encode());
    data.extend_from_slice(&commit_u.encode());
    hash_to_scalar(b"ars/v1/open", &data).expect("nonempty tag")
}

/// Opens a signature with the auditor secret key. Returns the signer's key and
/// a decryption proof, or `None` if the signature is invalid under this key or
/// decrypts outside the ring (which is what a non-designated auditor sees).
pub fn open(
    pp: &PublicParams,
    message: &[u8],
    ring: &Ring,
    sig: &RingSig,
    osk: &Scalar,
) -> Option<(GroupElement, OpenProof)> {
    let opk = *osk * base_generator();
    if !verify(pp, &opk, message, ring, sig) {
        return None;
    }
    let signer_pk = sig.enc_v - *osk * sig.enc_u;
    if !ring.contains(&signer_pk) {
        return None;
    }

    // Deterministic proof nonce so opening the same signature twice yields
    // identical bytes.
    let mut nonce_data = osk.encode().to_vec();
    nonce_data.extend_from_slice(&sha256(&[&sig.to_bytes()]));
    nonce_data.extend_from_slice(&sha256(&[message]));
    let w = hash_to_scalar(b"ars/v1/open-nonce", &nonce_data).expect("nonempty tag");

    let commit_g = w * base_generator();
    let commit_u = w * sig.enc_u;
    let c = open_challenge(pp, &opk, ring, message, sig, &signer_pk, &commit_g, &commit_u);
    let response = w + c * *osk;
    let proof = OpenProof {
        signer_pk,
        commit_g,
        commit_u,
        response,
    };
    Some((signer_pk, proof))
}

/// Judges an opening claim: accepts iff the signature is valid, the claimed
/// key is a ring member, and the proof shows the ciphertext decrypts to it.
pub fn judge(
    pp: &PublicParams,
    opk: &GroupElement,
    message: &[u8],
    ring: &Ring,
    sig: &RingSig,
    claimed_pk: &GroupElement,
    proof: &OpenProof,
) -> bool {
    if proof.signer_pk != *claimed_pk || !ring.contains(claimed_pk) {
        return false;
    }
    if !verify(pp, opk, message, ring, sig) {
        return false;
    }
    let c = open_challenge(
        pp,
        opk,
        ring,
        message,
        sig,
        claimed_pk,
        &proof.commit_g,
        &proof.commit_u,
    );
    // Equality of discrete logs: log_g(opk) = log_u(v - pk).
    let lhs_g = proof.response * base_generator();
    let rhs_g = proof.commit_g + c * *opk;
    let lhs_u = proof.response * sig.enc_u;
    let rhs_u = proof.commit_u + c * (sig.enc_v - *claimed_pk);
    lhs_g == rhs_g && lhs_u == rhs_u
}

impl RingSig {
    /// Group elements in a serialized signature for shape `(n, m)`.
    pub fn element_count(m: usize) -> usize {
        2 + 7 * m
    }

    /// Scalars in a serialized signature for shape `(n, m)`.
    pub fn scalar_count(n: usize, m: usize) -> usize {
        m * (n - 1) + 2
    }

    /// Total serialized length in bytes for shape `(n, m)`.
    pub fn byte_len(n: usize, m: usize) -> usize {
        32 * (Self::element_count(m) + Self::scalar_count(n, m))
    }

    /// Fixed layout: all group elements in transcript order, then all scalars.
    pub fn to_bytes(&self) -> Vec<u8> {
        let m = self.proof.level_a.len();
        let n = self.proof.digit_responses.len() / m + 1;
        let mut out = Vec::with_capacity(Self::byte_len(n, m));
        out.extend_from_slice(&self.enc_u.encode());
        out.extend_from_slice(&self.enc_v.encode());
        for j in 0..m {
            out.extend_from_slice(&self.proof.level_a[j].encode());
            out.extend_from_slice(&self.proof.level_b[j].encode());
            out.extend_from_slice(&self.proof.level_c[j].encode());
            out.extend_from_slice(&self.proof.level_d[j].encode());
        }
        for q in &self.proof.level_q {
            out.extend_from_slice(&q.encode());
        }
        for (e1, e2) in &self.proof.level_e {
            out.extend_from_slice(&e1.encode());
            out.extend_from_slice(&e2.encode());
        }
        for f in &self.proof.digit_responses {
            out.extend_from_slice(&f.encode());
        }
        out.extend_from_slice(&self.proof.mask_combined.encode());
        out.extend_from_slice(&self.proof.mask_cipher.encode());
        out
    }

    /// Parses the fixed layout for ring shape `(n, m)`, rejecting wrong
    /// lengths and non-canonical encodings.
    pub fn from_bytes(n: usize, m: usize, bytes: &[u8]) -> Result<RingSig, Error> {
        if n < 2 || m < 1 {
            return Err(Error::Usage("invalid ring shape".into()));
        }
        if bytes.len() != Self::byte_len(n, m) {
            return Err(Error::Encoding(format!(
                "signature must be {} bytes for shape ({n}, {m}), got {}",
                Self::byte_len(n, m),
                bytes.len()
            )));
        }
        let mut offset = 0usize;
        let mut next_element = |bytes: &[u8]| -> Result<GroupElement, Error> {
            let e = GroupElement::decode(&bytes[offset..offset + 32])?;
            offset += 32;
            Ok(e)
        };
        let enc_u = next_element(bytes)?;
        let enc_v = next_element(bytes)?;
        let mut level_a = Vec::with_capacity(m);
        let mut level_b = Vec::with_capacity(m);
        let mut level_c = Vec::with_capacity(m);
        let mut level_d = Vec::with_capacity(m);
        for _ in 0..m {
            level_a.push(next_element(bytes)?);
            level_b.push(next_element(bytes)?);
            level_c.push(next_element(bytes)?);
            level_d.push(next_element(bytes)?);
        }
        let mut level_q = Vec::with_capacity(m);
        for _ in 0..m {
            level_q.push(next_element(bytes)?);
        }
        let mut level_e = Vec::with_capacity(m);
        for _ in 0..m {
            let e1 = next_element(bytes)?;
            let e2 = next_element(bytes)?;
            level_e.push((e1, e2));
        }
        let mut digit_responses = Vec::with_capacity(m * (n - 1));
        for _ in 0..m * (n - 1) {
            digit_responses.push(Scalar::decode(&bytes[offset..offset + 32])?);
            offset += 32;
        }
        let mask_combined = Scalar::decode(&bytes[offset..offset + 32])?;
        offset += 32;
        let mask_cipher = Scalar::decode(&bytes[offset..offset + 32])?;

        Ok(RingSig {
            enc_u,
            enc_v,
            proof: MembershipProof {
                level_a,
                level_b,
                level_c,
                level_d,
                level_q,
                level_e,
                digit_responses,
                mask_combined,
                mask_cipher,
            },
        })
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }
}

impl OpenProof {
    pub const BYTES: usize = 128;

    pub fn to_bytes(&self) -> [u8; Self::BYTES] {
        let mut out = [0u8; Self::BYTES];
        out[..32].copy_from_slice(&self.signer_pk.encode());
        out[32..64].copy_from_slice(&self.commit_g.encode());
        out[64..96].copy_from_slice(&self.commit_u.encode());
        out[96..].copy_from_slice(&self.response.encode());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<OpenProof, Error> {
        if bytes.len() != Self::BYTES {
            return Err(Error::Encoding(format!(
                "open proof must be {} bytes",
                Self::BYTES
            )));
        }
        Ok(OpenProof {
            signer_pk: GroupElement::decode(&bytes[..32])?,
            commit_g: GroupElement::decode(&bytes[32..64])?,
            commit_u: GroupElement::decode(&bytes[64..96])?,
            response: Scalar::decode(&bytes[96..])?,
        })
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }
}

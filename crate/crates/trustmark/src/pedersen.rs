//! Pedersen commitments: the linking commitment `C = g^M h^dec` carried by
//! issuance tokens, and the vector form `C = h^r * prod h_i^{m_i}` consumed by
//! the membership proof. Perfectly hiding, computationally binding under the
//! discrete-log assumption, and homomorphic in both message and randomness.

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::group::{base_generator, hash_to_group, GroupElement, Scalar};

/// Commitment bases. Nobody may know `log_g h` or `log_g h_i`; the bases come
/// either from hash-to-group derivation or from a contribution ceremony.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitKey {
    pub g: GroupElement,
    pub h: GroupElement,
    /// Bases `h_1..h_n` for the vector form.
    pub bases: Vec<GroupElement>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Commitment(pub GroupElement);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decommit(pub Scalar);

impl CommitKey {
    /// Hash-derived key with `n` vector bases; fully reproducible.
    pub fn derive(n: usize) -> Result<CommitKey, Error> {
        if n == 0 {
            return Err(Error::Usage("commit key needs at least one base".into()));
        }
        let h = hash_to_group(b"crs/h", b"")?;
        let bases = (1..=n)
            .map(|i| hash_to_group(format!("crs/h{i}").as_bytes(), b""))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CommitKey {
            g: base_generator(),
            h,
            bases,
        })
    }

    pub fn arity(&self) -> usize {
        self.bases.len()
    }
}

/// Commits to `message` with fresh uniform randomness.
pub fn commit<R: RngCore + CryptoRng>(
    key: &CommitKey,
    message: Scalar,
    rng: &mut R,
) -> (Commitment, Decommit) {
    let dec = Scalar::random(rng);
    (commit_with(key, message, dec), Decommit(dec))
}

/// Deterministic form used by tests and by callers that manage randomness.
pub fn commit_with(key: &CommitKey, message: Scalar, dec: Scalar) -> Commitment {
    Commitment(message * key.g + dec * key.h)
}

/// Returns true iff `C = g^M h^dec`.
pub fn com_open(key: &CommitKey, c: &Commitment, message: Scalar, dec: &Decommit) -> bool {
    commit_with(key, message, dec.0) == *c
}

/// Vector commitment `h^r * prod_i h_{i+1}^{messages[i]}`. Requires exactly
/// `key.arity()` messages.
pub fn vector_commit(
    key: &CommitKey,
    messages: &[Scalar],
    randomness: Scalar,
) -> Result<Commitment, Error> {
    if messages.len() != key.arity() {
        return Err(Error::Usage(format!(
            "vector commitment expects {} messages, got {}",
            key.arity(),
            messages.len()
        )));
    }
    let mut scalars = Vec::with_capacity(messages.len() + 1);
    let mut points = Vec::with_capacity(messages.len() + 1);
    scalars.push(randomness);
    points.push(key.h);
    scalars.extend_from_slice(messages);
    points.extend_from_slice(&key.bases);
    Ok(Commitment(GroupElement::multiscalar_mul(&scalars, &points)))
}

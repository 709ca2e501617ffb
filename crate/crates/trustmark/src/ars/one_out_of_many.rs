//! One-out-of-many membership proof over the ring's key slots.
//!
//! The prover holds a secret slot index `l`, the opening `sk` of the slot key
//! `vk_l = h^sk`, and the randomness `rho` of the ElGamal ciphertext
//! `(u, v) = (g^rho, opk^rho * vk_l)`. The proof convinces a verifier that the
//! ciphertext encrypts some ring slot whose opening the prover knows, without
//! revealing which.
//!
//! The index is decomposed into `m` base-`n` digits (low digit first). Each
//! digit row is committed with the `n`-ary vector commitment, proved
//! well-formed with the standard bit-row argument (commitments `A B C D` per
//! level), and the digit polynomial `p_i(x) = prod_j f_{j, i_j}` ties the rows
//! to the slot list: its degree-`m` coefficient is 1 exactly at the secret
//! slot. Level elements `Q_k` (slot-key side) and `E_k` (ciphertext side)
//! absorb the lower-order coefficients.
//!
//! All base-`h` check equations are folded into one response with powers of an
//! aggregation challenge, so the transcript carries `m(n-1)` digit responses
//! plus exactly two masking responses. Both challenges are recomputed by the
//! verifier from the full Fiat-Shamir transcript.

// Indexed loops below mirror the per-level algebra.
#![allow(clippy::needless_range_loop)]

use rand::{CryptoRng, RngCore};

use crate::crs::PublicParams;
use crate::error::Error;
use crate::group::{base_generator, hash_to_scalar, GroupElement, Scalar};

/// Domain tags for the two Fiat-Shamir challenges.
const TAG_CHALLENGE: &[u8] = b"ars/v1/x";
const TAG_AGGREGATION: &[u8] = b"ars/v1/agg";

/// Per-level commitments and the two masking responses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct MembershipProof {
    /// Digit-row mask commitments `A_j`.
    pub level_a: Vec<GroupElement>,
    /// Digit-row commitments `B_j`.
    pub level_b: Vec<GroupElement>,
    /// Cross-term commitments `C_j`.
    pub level_c: Vec<GroupElement>,
    /// Squared-mask commitments `D_j`.
    pub level_d: Vec<GroupElement>,
    /// Slot-key side level elements `Q_k`.
    pub level_q: Vec<GroupElement>,
    /// Ciphertext side level pairs `E_k`.
    pub level_e: Vec<(GroupElement, GroupElement)>,
    /// Digit responses `f_{j,i}` for `i in 1..n`, row-major.
    pub digit_responses: Vec<Scalar>,
    /// Folded response for every base-`h` equation.
    pub mask_combined: Scalar,
    /// Response for the ciphertext equations.
    pub mask_cipher: Scalar,
}

pub(crate) struct Witness {
    /// Secret slot index in `[0, n^m)`.
    pub index: usize,
    /// Opening of the slot key: `vk = h^sk`.
    pub sk: Scalar,
    /// ElGamal encryption randomness.
    pub enc_randomness: Scalar,
}

/// Decomposes `index` into `levels` base-`base` digits, low digit first.
pub(crate) fn digits(index: usize, base: usize, levels: usize) -> Vec<usize> {
    let mut rem = index;
    let mut out = Vec::with_capacity(levels);
    for _ in 0..levels {
        out.push(rem % base);
        rem /= base;
    }
    out
}

/// Coefficients of `p_i(X) = prod_j (b_{j,i_j} X + a_{j,i_j})` for every slot
/// `i`, as vectors of length `m + 1` (constant term first). The degree-`m`
/// coefficient is 1 at the secret index and 0 elsewhere.
fn digit_polynomials(
    n: usize,
    m: usize,
    bit_rows: &[Vec<Scalar>],
    mask_rows: &[Vec<Scalar>],
) -> Vec<Vec<Scalar>> {
    let slots = n.pow(m as u32);
    let mut polys = Vec::with_capacity(slots);
    for i in 0..slots {
        let mut coeffs = vec![Scalar::zero(); m + 1];
        coeffs[0] = Scalar::one();
        for (j, digit) in digits(i, n, m).into_iter().enumerate() {
            let lin = bit_rows[j][digit];
            let con = mask_rows[j][digit];
            // Multiply coeffs, currently of degree j, by (lin*X + con).
            let mut next = vec![Scalar::zero(); m + 1];
            for d in 0..=j {
                next[d + 1] += coeffs[d] * lin;
                next[d] += coeffs[d] * con;
            }
            coeffs = next;
        }
        polys.push(coeffs);
    }
    polys
}

/// Vector commitment without allocating a `CommitKey`.
fn vec_commit(pp: &PublicParams, row: &[Scalar], randomness: Scalar) -> GroupElement {
    let mut scalars = Vec::with_capacity(row.len() + 1);
    let mut points = Vec::with_capacity(row.len() + 1);
    scalars.push(randomness);
    points.push(pp.h);
    scalars.extend_from_slice(row);
    points.extend_from_slice(&pp.bases);
    GroupElement::multiscalar_mul(&scalars, &points)
}

fn powers(x: Scalar, count: usize) -> Vec<Scalar> {
    let mut out = Vec::with_capacity(count);
    let mut acc = Scalar::one();
    for _ in 0..count {
        out.push(acc);
        acc = acc * x;
    }
    out
}

/// Serializes the commitment elements in transcript order. The same order is
/// used for the wire layout and for challenge derivation.
fn commitment_bytes(
    u: &GroupElement,
    v: &GroupElement,
    proof_elements: &ProofElements<'_>,
) -> Vec<u8> {
    let mut data = Vec::new();
    data.extend_from_slice(&u.encode());
    data.extend_from_slice(&v.encode());
    for j in 0..proof_elements.level_a.len() {
        data.extend_from_slice(&proof_elements.level_a[j].encode());
        data.extend_from_slice(&proof_elements.level_b[j].encode());
        data.extend_from_slice(&proof_elements.level_c[j].encode());
        data.extend_from_slice(&proof_elements.level_d[j].encode());
    }
    for q in proof_elements.level_q {
        data.extend_from_slice(&q.encode());
    }
    for (e1, e2) in proof_elements.level_e {
        data.extend_from_slice(&e1.encode());
        data.extend_from_slice(&e2.encode());
    }
    data
}

struct ProofElements<'a> {
    level_a: &'a [GroupElement],
    level_b: &'a [GroupElement],
    level_c: &'a [GroupElement],
    level_d: &'a [GroupElement],
    level_q: &'a [GroupElement],
    level_e: &'a [(GroupElement, GroupElement)],
}

/// Both challenges, derived from the context prefix and every prover message.
fn challenges(context: &[u8], commitments: &[u8]) -> (Scalar, Scalar) {
    let mut transcript = Vec::with_capacity(context.len() + commitments.len());
    transcript.extend_from_slice(context);
    transcript.extend_from_slice(commitments);
    let x = hash_to_scalar(TAG_CHALLENGE, &transcript).expect("nonempty tag");
    let agg = hash_to_scalar(TAG_AGGREGATION, &transcript).expect("nonempty tag");
    (x, agg)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn prove<R: RngCore + CryptoRng>(
    pp: &PublicParams,
    opk: &GroupElement,
    slots: &[GroupElement],
    u: &GroupElement,
    v: &GroupElement,
    witness: &Witness,
    context: &[u8],
    rng: &mut R,
) -> Result<MembershipProof, Error> {
    let (n, m) = (pp.n, pp.m);
    if slots.len() != pp.ring_capacity {
        return Err(Error::Usage("slot list must have n^m entries".into()));
    }
    if witness.index >= slots.len() {
        return Err(Error::Usage("secret index out of range".into()));
    }

    let index_digits = digits(witness.index, n, m);

    // Digit rows and their masks. Mask rows sum to zero so the digit
    // polynomials sum to x^m across slots.
    let mut bit_rows = Vec::with_capacity(m);
    let mut mask_rows = Vec::with_capacity(m);
    for digit in &index_digits {
        let mut bits = vec![Scalar::zero(); n];
        bits[*digit] = Scalar::one();
        bit_rows.push(bits);

        let mut masks = vec![Scalar::zero(); n];
        let mut sum = Scalar::zero();
        for slot in masks.iter_mut().skip(1) {
            *slot = Scalar::random(rng);
            sum += *slot;
        }
        masks[0] = -sum;
        mask_rows.push(masks);
    }

    let mut rand_a = Vec::with_capacity(m);
    let mut rand_b = Vec::with_capacity(m);
    let mut rand_c = Vec::with_capacity(m);
    let mut rand_d = Vec::with_capacity(m);
    let mut level_a = Vec::with_capacity(m);
    let mut level_b = Vec::with_capacity(m);
    let mut level_c = Vec::with_capacity(m);
    let mut level_d = Vec::with_capacity(m);
    let two = Scalar::from_u64(2);
    for j in 0..m {
        let cross: Vec<Scalar> = (0..n)
            .map(|i| mask_rows[j][i] * (Scalar::one() - two * bit_rows[j][i]))
            .collect();
        let neg_sq: Vec<Scalar> = (0..n).map(|i| -(mask_rows[j][i] * mask_rows[j][i])).collect();
        let (ra, rb, rc, rd) = (
            Scalar::random(rng),
            Scalar::random(rng),
            Scalar::random(rng),
            Scalar::random(rng),
        );
        level_a.push(vec_commit(pp, &mask_rows[j], ra));
        level_b.push(vec_commit(pp, &bit_rows[j], rb));
        level_c.push(vec_commit(pp, &cross, rc));
        level_d.push(vec_commit(pp, &neg_sq, rd));
        rand_a.push(ra);
        rand_b.push(rb);
        rand_c.push(rc);
        rand_d.push(rd);
    }

    // Lower-order digit polynomial coefficients, absorbed by the level
    // elements so the final check collapses to single exponentiations.
    let polys = digit_polynomials(n, m, &bit_rows, &mask_rows);
    let mut rand_q = Vec::with_capacity(m);
    let mut rand_e = Vec::with_capacity(m);
    let mut level_q = Vec::with_capacity(m);
    let mut level_e = Vec::with_capacity(m);
    for k in 0..m {
        let coeffs: Vec<Scalar> = polys.iter().map(|p| p[k]).collect();
        let slot_sum = GroupElement::multiscalar_mul(&coeffs, slots);
        let qk = Scalar::random(rng);
        let ek = Scalar::random(rng);
        level_q.push(qk * pp.h + slot_sum);
        level_e.push((ek * base_generator(), ek * *opk - slot_sum));
        rand_q.push(qk);
        rand_e.push(ek);
    }

    let commitments = commitment_bytes(
        u,
        v,
        &ProofElements {
            level_a: &level_a,
            level_b: &level_b,
            level_c: &level_c,
            level_d: &level_d,
            level_q: &level_q,
            level_e: &level_e,
        },
    );
    let (x, agg) = challenges(context, &commitments);

    let mut digit_responses = Vec::with_capacity(m * (n - 1));
    for j in 0..m {
        for i in 1..n {
            digit_responses.push(bit_rows[j][i] * x + mask_rows[j][i]);
        }
    }

    let x_powers = powers(x, m + 1);
    let agg_powers = powers(agg, 2 * m + 1);

    let mut mask_combined = Scalar::zero();
    for j in 0..m {
        let z_a = rand_a[j] + x * rand_b[j];
        let z_c = rand_d[j] + x * rand_c[j];
        mask_combined += agg_powers[2 * j] * z_a + agg_powers[2 * j + 1] * z_c;
    }
    let mut z_d = witness.sk * x_powers[m];
    let mut mask_cipher = witness.enc_randomness * x_powers[m];
    for k in 0..m {
        z_d -= rand_q[k] * x_powers[k];
        mask_cipher -= rand_e[k] * x_powers[k];
    }
    mask_combined += agg_powers[2 * m] * z_d;

    Ok(MembershipProof {
        level_a,
        level_b,
        level_c,
        level_d,
        level_q,
        level_e,
        digit_responses,
        mask_combined,
        mask_cipher,
    })
}

pub(crate) fn verify(
    pp: &PublicParams,
    opk: &GroupElement,
    slots: &[GroupElement],
    u: &GroupElement,
    v: &GroupElement,
    proof: &MembershipProof,
    context: &[u8],
) -> bool {
    let (n, m) = (pp.n, pp.m);
    if slots.len() != pp.ring_capacity
        || proof.level_a.len() != m
        || proof.level_b.len() != m
        || proof.level_c.len() != m
        || proof.level_d.len() != m
        || proof.level_q.len() != m
        || proof.level_e.len() != m
        || proof.digit_responses.len() != m * (n - 1)
    {
        return false;
    }

    let commitments = commitment_bytes(
        u,
        v,
        &ProofElements {
            level_a: &proof.level_a,
            level_b: &proof.level_b,
            level_c: &proof.level_c,
            level_d: &proof.level_d,
            level_q: &proof.level_q,
            level_e: &proof.level_e,
        },
    );
    let (x, agg) = challenges(context, &commitments);

    // Reconstruct every digit response; slot 0 completes each row to x.
    let mut f = vec![vec![Scalar::zero(); n]; m];
    for j in 0..m {
        let mut sum = Scalar::zero();
        for i in 1..n {
            let value = proof.digit_responses[j * (n - 1) + (i - 1)];
            f[j][i] = value;
            sum += value;
        }
        f[j][0] = x - sum;
    }

    // Evaluated digit polynomials per slot.
    let slot_count = pp.ring_capacity;
    let mut p_eval = Vec::with_capacity(slot_count);
    for i in 0..slot_count {
        let mut acc = Scalar::one();
        for (j, digit) in digits(i, n, m).into_iter().enumerate() {
            acc = acc * f[j][digit];
        }
        p_eval.push(acc);
    }

    let x_powers = powers(x, m + 1);
    let agg_powers = powers(agg, 2 * m + 1);

    // Folded base-h equation, assembled as one multiscalar product that must
    // equal the identity.
    let mut scalars: Vec<Scalar> = Vec::new();
    let mut points: Vec<GroupElement> = Vec::new();
    let mut base_coeffs = vec![Scalar::zero(); n];
    for j in 0..m {
        let w_a = agg_powers[2 * j];
        let w_c = agg_powers[2 * j + 1];
        scalars.push(w_a);
        points.push(proof.level_a[j]);
        scalars.push(w_a * x);
        points.push(proof.level_b[j]);
        scalars.push(w_c);
        points.push(proof.level_d[j]);
        scalars.push(w_c * x);
        points.push(proof.level_c[j]);
        for i in 0..n {
            let fx = f[j][i];
            base_coeffs[i] -= w_a * fx + w_c * (fx * (x - fx));
        }
    }
    for (i, coeff) in base_coeffs.into_iter().enumerate() {
        scalars.push(coeff);
        points.push(pp.bases[i]);
    }
    let w_key = agg_powers[2 * m];
    for (i, slot) in slots.iter().enumerate() {
        scalars.push(w_key * p_eval[i]);
        points.push(*slot);
    }
    for k in 0..m {
        scalars.push(-(w_key * x_powers[k]));
        points.push(proof.level_q[k]);
    }
    scalars.push(-proof.mask_combined);
    points.push(pp.h);
    if !GroupElement::multiscalar_mul(&scalars, &points).is_identity() {
        return false;
    }

    // Ciphertext equations: both components must open to the same response.
    let mut scalars_g = vec![x_powers[m]];
    let mut points_g = vec![*u];
    for k in 0..m {
        scalars_g.push(-x_powers[k]);
        points_g.push(proof.level_e[k].0);
    }
    scalars_g.push(-proof.mask_cipher);
    points_g.push(base_generator());
    if !GroupElement::multiscalar_mul(&scalars_g, &points_g).is_identity() {
        return false;
    }

    let mut scalars_y = vec![x_powers[m]];
    let mut points_y = vec![*v];
    for (i, slot) in slots.iter().enumerate() {
        scalars_y.push(-p_eval[i]);
        points_y.push(*slot);
    }
    for k in 0..m {
        scalars_y.push(-x_powers[k]);
        points_y.push(proof.level_e[k].1);
    }
    scalars_y.push(-proof.mask_cipher);
    points_y.push(*opk);
    GroupElement::multiscalar_mul(&scalars_y, &points_y).is_identity()
}

"""Pedersen vector commitments over the 256-slot evaluation domain, with
inner-product-argument openings and the aggregated multiproof that makes
Verkle witnesses compact.

A commitment is a single 48-byte group element.  A single-point opening is a
Bulletproofs-style inner-product argument: log2(256) = 8 rounds of two cross
terms each, plus one final scalar, so 16 group elements + 1 scalar = 800
bytes.  The multiproof aggregates any number of openings into one quotient
commitment, one helper scalar, and one opening proof; its serialized size is
constant (881 bytes) regardless of how many openings it covers.

Aggregation follows the random-linear-combination scheme: after absorbing
all commitments and claimed (point, value) pairs, a challenge r combines the
per-opening quotients g(X) = sum r^i (f_i(X) - y_i)/(X - z_i); the prover
commits to g, a second challenge t picks the evaluation point, and a single
opening of h - g at t (with h(X) = sum r^i f_i(X)/(t - z_i)) finishes the
argument.  The verifier reconstructs the commitment to h homomorphically.

Fiat-Shamir note: absorbing the per-opening commitments into the transcript
is the caller's responsibility (prover and verifier must do it identically);
multiprove/verify_multiproof absorb the points and values themselves.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Sequence

import gmpy2
from gmpy2 import mpz

from .algebra import (
    FIELD_BYTES,
    FIELD_MODULUS,
    GROUP_BYTES,
    EvaluationDomain,
    FieldElement,
    GroupElement,
    Polynomial,
    SerializationError,
    Transcript,
    _msm_raw,
    _P as _PM,
    batch_inverse,
    derive_generators,
)

__all__ = [
    "DOMAIN_SIZE",
    "CommitmentKey",
    "Commitment",
    "OpeningProof",
    "MultiProof",
    "default_key",
    "commit",
    "open_at",
    "verify_open",
    "multiprove",
    "verify_multiproof",
]

DOMAIN_SIZE = 256
_ROUNDS = 8  # log2(DOMAIN_SIZE)
_Q = mpz(FIELD_MODULUS)

DEFAULT_KEY_SEED = b"witnessbench-commitment-key-v1"

OPENING_PROOF_BYTES = 2 * _ROUNDS * GROUP_BYTES + FIELD_BYTES  # 800
MULTIPROOF_BYTES = 1 + GROUP_BYTES + FIELD_BYTES + OPENING_PROOF_BYTES  # 881


class CommitmentKey:
    """256 independent bases plus one auxiliary base, all derived from a
    seed by hash-to-group; regeneration from the same seed is bit-identical."""

    def __init__(self, seed: bytes = DEFAULT_KEY_SEED):
        self.seed = seed
        self.bases: tuple[GroupElement, ...] = tuple(
            derive_generators(seed, b"vc-basis", DOMAIN_SIZE)
        )
        self.q_base: GroupElement = derive_generators(seed, b"vc-aux", 1)[0]
        self.domain = EvaluationDomain.roots_of_unity(DOMAIN_SIZE)
        # provers need the pairwise inverse table; build it here so the
        # first opening does not pay the setup cost inside a timed region
        self.domain._inv_diff_table()

    def domain_point(self, index: int) -> FieldElement:
        return FieldElement(self.domain.points[index])


@functools.lru_cache(maxsize=4)
def default_key(seed: bytes = DEFAULT_KEY_SEED) -> CommitmentKey:
    return CommitmentKey(seed)


@dataclass(frozen=True)
class Commitment:
    point: GroupElement

    def serialize(self) -> bytes:
        return self.point.serialize()

    @classmethod
    def deserialize(cls, data: bytes) -> "Commitment":
        return cls(GroupElement.deserialize(data))


@dataclass(frozen=True)
class OpeningProof:
    """Cross terms (L_j, R_j) for each halving round plus the final scalar."""

    left: tuple[GroupElement, ...]
    right: tuple[GroupElement, ...]
    final_scalar: FieldElement

    def serialize(self) -> bytes:
        out = bytearray()
        for l, r in zip(self.left, self.right):
            out += l.serialize()
            out += r.serialize()
        out += self.final_scalar.to_bytes()
        return bytes(out)

    @classmethod
    def deserialize(cls, data: bytes) -> "OpeningProof":
        if len(data) != OPENING_PROOF_BYTES:
            raise SerializationError(
                f"opening proof must be {OPENING_PROOF_BYTES} bytes, got {len(data)}"
            )
        left, right = [], []
        off = 0
        for _ in range(_ROUNDS):
            left.append(GroupElement.deserialize(data[off : off + GROUP_BYTES]))
            off += GROUP_BYTES
            right.append(GroupElement.deserialize(data[off : off + GROUP_BYTES]))
            off += GROUP_BYTES
        final = FieldElement.from_bytes(data[off : off + FIELD_BYTES])
        return cls(tuple(left), tuple(right), final)


@dataclass(frozen=True)
class MultiProof:
    """Constant-size aggregate: quotient commitment, helper evaluation of
    the aggregate at the challenge point, and one opening proof.  The empty
    aggregation is a distinguished sentinel."""

    aggregate: Commitment | None
    helper_eval: FieldElement | None
    opening: OpeningProof | None

    @classmethod
    def empty(cls) -> "MultiProof":
        return cls(None, None, None)

    @property
    def is_empty(self) -> bool:
        return self.aggregate is None

    def serialize(self) -> bytes:
        if self.is_empty:
            return b"\x00"
        return (
            b"\x01"
            + self.aggregate.serialize()
            + self.helper_eval.to_bytes()
            + self.opening.serialize()
        )

    @classmethod
    def deserialize(cls, data: bytes) -> "MultiProof":
        if len(data) == 1 and data == b"\x00":
            return cls.empty()
        if len(data) != MULTIPROOF_BYTES or data[0] != 1:
            raise SerializationError("malformed multiproof encoding")
        off = 1
        aggregate = Commitment.deserialize(data[off : off + GROUP_BYTES])
        off += GROUP_BYTES
        helper = FieldElement.from_bytes(data[off : off + FIELD_BYTES])
        off += FIELD_BYTES
        opening = OpeningProof.deserialize(data[off:])
        return cls(aggregate, helper, opening)


def commit(key: CommitmentKey, poly: Polynomial) -> Commitment:
    """Pedersen commitment: sum of evaluation_i * basis_i."""
    evals = poly.raw()
    if len(evals) != DOMAIN_SIZE:
        raise ValueError(f"polynomial must have {DOMAIN_SIZE} evaluations")
    return Commitment(
        GroupElement._raw(_msm_raw((e, b._v) for e, b in zip(evals, key.bases)))
    )


def _commit_raw(key: CommitmentKey, evals: Sequence[mpz]) -> Commitment:
    return Commitment(
        GroupElement._raw(_msm_raw((e, b._v) for e, b in zip(evals, key.bases)))
    )


# ---------------------------------------------------------------------------
# single-point opening (inner-product argument)


def open_at(
    key: CommitmentKey, poly: Polynomial, z: FieldElement, transcript: Transcript
) -> tuple[FieldElement, OpeningProof]:
    """Prove f(z) = y for the committed evaluation-form polynomial.

    The commitment must already be absorbed into the transcript by the
    caller.  Returns (y, proof).
    """
    domain = key.domain
    a = list(poly.raw())
    b = domain.barycentric_coeffs(z.value)
    y = FieldElement._raw(sum(ai * bi for ai, bi in zip(a, b)) % _Q)

    transcript.absorb_scalar(b"ipa-z", z)
    transcript.absorb_scalar(b"ipa-y", y)
    beta = transcript.challenge(b"ipa-beta")
    u = key.q_base.mul(beta)._v

    g = [base._v for base in key.bases]

    lefts: list[GroupElement] = []
    rights: list[GroupElement] = []
    n = DOMAIN_SIZE
    while n > 1:
        half = n // 2
        a_l, a_r = a[:half], a[half:]
        b_l, b_r = b[:half], b[half:]
        g_l, g_r = g[:half], g[half:]

        cross_l = sum(x * yv for x, yv in zip(a_r, b_l)) % _Q
        cross_r = sum(x * yv for x, yv in zip(a_l, b_r)) % _Q
        left = _msm_raw(zip(a_r, g_l)) * gmpy2.powmod(u, cross_l, _PM) % _PM
        right = _msm_raw(zip(a_l, g_r)) * gmpy2.powmod(u, cross_r, _PM) % _PM
        left_pt = GroupElement._raw(left)
        right_pt = GroupElement._raw(right)
        lefts.append(left_pt)
        rights.append(right_pt)

        transcript.absorb_point(b"ipa-l", left_pt)
        transcript.absorb_point(b"ipa-r", right_pt)
        x = transcript.challenge(b"ipa-x").value
        x_inv = gmpy2.invert(x, _Q)

        a = [(al + x * ar) % _Q for al, ar in zip(a_l, a_r)]
        b = [(bl + x_inv * br) % _Q for bl, br in zip(b_l, b_r)]
        g = [
            gl * gmpy2.powmod(gr, x_inv, _PM) % _PM
            for gl, gr in zip(g_l, g_r)
        ]
        n = half

    return y, OpeningProof(tuple(lefts), tuple(rights), FieldElement._raw(a[0]))


def verify_open(
    key: CommitmentKey,
    com: Commitment,
    z: FieldElement,
    y: FieldElement,
    proof: OpeningProof,
    transcript: Transcript,
) -> bool:
    """Check an opening proof; the transcript must replay the prover's
    absorption sequence (commitment absorbed by the caller)."""
    if len(proof.left) != _ROUNDS or len(proof.right) != _ROUNDS:
        raise SerializationError("opening proof has wrong round count")

    transcript.absorb_scalar(b"ipa-z", z)
    transcript.absorb_scalar(b"ipa-y", y)
    beta = transcript.challenge(b"ipa-beta")
    u = key.q_base.mul(beta)._v

    xs = []
    for left_pt, right_pt in zip(proof.left, proof.right):
        transcript.absorb_point(b"ipa-l", left_pt)
        transcript.absorb_point(b"ipa-r", right_pt)
        xs.append(transcript.challenge(b"ipa-x").value)
    xs_inv = batch_inverse(xs)

    # s_i = prod over rounds j of x_j^(-bit), where round j consumes the
    # (high) bit 7-j of the index; matches the prover's fold G <- G_L + x^-1 G_R.
    s = [mpz(1)] * DOMAIN_SIZE
    for j in range(_ROUNDS):
        bit = 1 << (_ROUNDS - 1 - j)
        xj_inv = xs_inv[j]
        for i in range(DOMAIN_SIZE):
            if i & bit:
                s[i] = s[i] * xj_inv % _Q

    b0 = mpz(0)
    for bi, si in zip(key.domain.barycentric_coeffs(z.value), s):
        b0 += bi * si
    b0 %= _Q

    g0 = _msm_raw((si, base._v) for si, base in zip(s, key.bases))

    p_final = com.point._v * gmpy2.powmod(u, y.value, _PM) % _PM
    for x, x_inv, left_pt, right_pt in zip(xs, xs_inv, proof.left, proof.right):
        p_final = (
            p_final
            * gmpy2.powmod(left_pt._v, x, _PM)
            % _PM
            * gmpy2.powmod(right_pt._v, x_inv, _PM)
            % _PM
        )

    a0 = proof.final_scalar.value
    expected = (
        gmpy2.powmod(g0, a0, _PM) * gmpy2.powmod(u, a0 * b0 % _Q, _PM) % _PM
    )
    return p_final == expected


# ---------------------------------------------------------------------------
# aggregated multiproof


def multiprove(
    key: CommitmentKey,
    openings: Sequence[tuple[Polynomial, FieldElement, FieldElement]],
    transcript: Transcript,
) -> MultiProof:
    """Aggregate any number of (poly, z, y) openings into one constant-size
    proof.  Inconsistent triples yield a proof the verifier rejects."""
    if not openings:
        return MultiProof.empty()

    domain = key.domain
    for _, z, y in openings:
        transcript.absorb_scalar(b"mp-z", z)
        transcript.absorb_scalar(b"mp-y", y)
    r = transcript.challenge(b"mp-r").value

    # g(X) = sum r^i (f_i(X) - y_i) / (X - z_i), in evaluation form
    g = [mpz(0)] * DOMAIN_SIZE
    r_pow = mpz(1)
    for poly, z, y in openings:
        evals = poly.raw()
        idx = domain.index_of.get(int(z.value))
        if idx is not None:
            quotient = domain.quotient_at_index(evals, idx)
        else:
            quotient = domain.quotient_outside(evals, z.value, y.value)
        for i in range(DOMAIN_SIZE):
            g[i] += r_pow * quotient[i]
        r_pow = r_pow * r % _Q
    g = [v % _Q for v in g]

    d_com = _commit_raw(key, g)
    transcript.absorb_point(b"mp-d", d_com.point)
    t = transcript.challenge(b"mp-t").value

    denoms = [(t - z.value) % _Q for _, z, _ in openings]
    try:
        denom_invs = batch_inverse(denoms)
    except ZeroDivisionError:
        # astronomically unlikely challenge collision with an opened point
        raise ValueError("aggregation challenge collided with an opening point")

    # h(X) = sum r^i f_i(X) / (t - z_i), in evaluation form
    h = [mpz(0)] * DOMAIN_SIZE
    r_pow = mpz(1)
    for (poly, _, _), denom_inv in zip(openings, denom_invs):
        scale = r_pow * denom_inv % _Q
        evals = poly.raw()
        for i in range(DOMAIN_SIZE):
            h[i] += scale * evals[i]
        r_pow = r_pow * r % _Q

    h_minus_g = Polynomial(domain, [(hv - gv) % _Q for hv, gv in zip(h, g)])
    e_com = _commit_raw(key, [v % _Q for v in h])
    agg_com = Commitment(e_com.point - d_com.point)

    transcript.absorb_point(b"mp-agg", agg_com.point)
    y_agg, opening = open_at(key, h_minus_g, FieldElement._raw(t), transcript)
    return MultiProof(d_com, y_agg, opening)


def verify_multiproof(
    key: CommitmentKey,
    coms: Sequence[Commitment],
    points: Sequence[tuple[FieldElement, FieldElement]],
    proof: MultiProof,
    transcript: Transcript,
) -> bool:
    """Check that all (z_i, y_i) openings hold simultaneously for the listed
    commitments.  Runtime is linear in the number of openings; the proof
    itself is constant size."""
    if len(coms) != len(points):
        raise ValueError(f"{len(coms)} commitments vs {len(points)} points")
    if not coms:
        return proof.is_empty
    if proof.is_empty:
        return False

    for z, y in points:
        transcript.absorb_scalar(b"mp-z", z)
        transcript.absorb_scalar(b"mp-y", y)
    r = transcript.challenge(b"mp-r").value

    transcript.absorb_point(b"mp-d", proof.aggregate.point)
    t = transcript.challenge(b"mp-t").value

    denoms = [(t - z.value) % _Q for z, _ in points]
    try:
        denom_invs = batch_inverse(denoms)
    except ZeroDivisionError:
        return False

    # E = sum (r^i / (t - z_i)) C_i, with per-commitment coefficient folding
    coeff_by_com: dict[bytes, mpz] = {}
    com_by_key: dict[bytes, Commitment] = {}
    y_agg = mpz(0)
    r_pow = mpz(1)
    for com, (z, y), denom_inv in zip(coms, points, denom_invs):
        coeff = r_pow * denom_inv % _Q
        ser = com.serialize()
        coeff_by_com[ser] = (coeff_by_com.get(ser, mpz(0)) + coeff) % _Q
        com_by_key[ser] = com
        y_agg = (y_agg + coeff * y.value) % _Q
        r_pow = r_pow * r % _Q

    if proof.helper_eval.value != y_agg:
        return False

    e_point = GroupElement._raw(
        _msm_raw((c, com_by_key[s].point._v) for s, c in coeff_by_com.items())
    )
    agg_point = e_point - proof.aggregate.point
    transcript.absorb_point(b"mp-agg", agg_point)
    return verify_open(
        key,
        Commitment(agg_point),
        FieldElement._raw(t),
        FieldElement._raw(y_agg),
        proof.opening,
        transcript,
    )

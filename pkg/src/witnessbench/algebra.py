"""Prime-field, group, and polynomial arithmetic for the witness schemes.

The scalar field F_q uses the 255-bit prime with 2-adicity 32 that is common
in zk tooling, so multiplicative subgroups of any power-of-two order up to
2^32 exist (we use order 256, one slot per tree child).

The commitment group is the order-q subgroup of Z_P^* for the 384-bit prime
P = COFACTOR * q + 1.  A group element therefore serializes naturally to
exactly 48 bytes (little-endian residue mod P), and scalar multiplication is
a single modular exponentiation, which keeps a pure-Python implementation
practical.  The API uses additive notation (identity, +, scalar *) to match
the vector-commitment literature even though the underlying operation is
modular multiplication.
"""

from __future__ import annotations

import hashlib
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpz

__all__ = [
    "FIELD_MODULUS",
    "GROUP_MODULUS",
    "GROUP_COFACTOR",
    "FieldElement",
    "GroupElement",
    "SerializationError",
    "EvaluationDomain",
    "Polynomial",
    "Transcript",
    "msm",
    "lagrange_eval",
    "hash_to_field",
    "hash_to_group",
    "derive_generators",
    "batch_inverse",
]

# 255-bit scalar field prime; q - 1 is divisible by 2^32.
FIELD_MODULUS = 0x73EDA753299D7D483339D80809A1D80553BDA402FFFE5BFEFFFFFFFF00000001

# Smallest even cofactor c with P = c*q + 1 prime and P exactly 384 bits.
GROUP_COFACTOR = 0x1A7FC6FB27F26A99D2A88658945E86B46
GROUP_MODULUS = GROUP_COFACTOR * FIELD_MODULUS + 1

# Smallest primitive root of F_q; used to derive roots of unity.
_FIELD_GENERATOR = 7

_Q = mpz(FIELD_MODULUS)
_P = mpz(GROUP_MODULUS)
_C = mpz(GROUP_COFACTOR)

FIELD_BYTES = 32
GROUP_BYTES = 48


class SerializationError(ValueError):
    """Raised for malformed byte encodings (wrong length, out of range,
    point not in the prime-order subgroup).  Distinct from a proof that
    deserializes fine but fails verification."""


def _hash_expand(label: bytes, data: bytes) -> bytes:
    """64 bytes of digest material, domain-separated by label."""
    h0 = hashlib.sha256(b"\x00" + len(label).to_bytes(1, "little") + label + data).digest()
    h1 = hashlib.sha256(b"\x01" + len(label).to_bytes(1, "little") + label + data).digest()
    return h0 + h1


def hash_to_field(label: bytes, data: bytes) -> "FieldElement":
    """Map arbitrary bytes to a field element (64-byte expansion, so the
    bias from the modular reduction is negligible)."""
    return FieldElement(int.from_bytes(_hash_expand(label, data), "little"))


def _hash_to_field_int(label: bytes, data: bytes) -> mpz:
    return mpz(int.from_bytes(_hash_expand(label, data), "little")) % _Q


class FieldElement:
    """Residue modulo the field prime, always kept canonical in [0, q)."""

    __slots__ = ("value",)

    def __init__(self, value: int):
        self.value = mpz(value) % _Q

    @classmethod
    def _raw(cls, value: mpz) -> "FieldElement":
        # Internal fast path: value already canonical.
        fe = cls.__new__(cls)
        fe.value = value
        return fe

    def __add__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement._raw((self.value + other.value) % _Q)

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement._raw((self.value - other.value) % _Q)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement._raw(self.value * other.value % _Q)

    def __neg__(self) -> "FieldElement":
        return FieldElement._raw(-self.value % _Q)

    def __pow__(self, exponent: int) -> "FieldElement":
        return FieldElement._raw(gmpy2.powmod(self.value, exponent, _Q))

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise ZeroDivisionError("cannot invert 0 in the field")
        return FieldElement._raw(gmpy2.invert(self.value, _Q))

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        return self * other.inverse()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FieldElement):
            return self.value == other.value
        if isinstance(other, int):
            return self.value == other % FIELD_MODULUS
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.value)

    def __repr__(self) -> str:
        return f"FieldElement({int(self.value)})"

    def is_zero(self) -> bool:
        return self.value == 0

    def to_bytes(self) -> bytes:
        """Canonical 32-byte little-endian encoding."""
        return int(self.value).to_bytes(FIELD_BYTES, "little")

    @classmethod
    def from_bytes(cls, data: bytes) -> "FieldElement":
        if len(data) != FIELD_BYTES:
            raise SerializationError(f"field element must be {FIELD_BYTES} bytes, got {len(data)}")
        v = int.from_bytes(data, "little")
        if v >= FIELD_MODULUS:
            raise SerializationError("field element encoding not canonical")
        return cls._raw(mpz(v))


class GroupElement:
    """Element of the prime-order-q subgroup of Z_P^*, written additively."""

    __slots__ = ("_v",)

    def __init__(self, residue: int):
        self._v = mpz(residue) % _P
        if self._v == 0:
            raise ValueError("0 is not a group element")

    @classmethod
    def _raw(cls, residue: mpz) -> "GroupElement":
        ge = cls.__new__(cls)
        ge._v = residue
        return ge

    @classmethod
    def identity(cls) -> "GroupElement":
        return cls._raw(mpz(1))

    def is_identity(self) -> bool:
        return self._v == 1

    def __add__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement._raw(self._v * other._v % _P)

    def __neg__(self) -> "GroupElement":
        return GroupElement._raw(gmpy2.invert(self._v, _P))

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement._raw(self._v * gmpy2.invert(other._v, _P) % _P)

    def mul(self, scalar: "FieldElement | int") -> "GroupElement":
        """Scalar multiplication (modular exponentiation underneath)."""
        e = scalar.value if isinstance(scalar, FieldElement) else mpz(scalar) % _Q
        return GroupElement._raw(gmpy2.powmod(self._v, e, _P))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, GroupElement):
            return self._v == other._v
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._v)

    def __repr__(self) -> str:
        return f"GroupElement(0x{int(self._v):x})"

    def serialize(self) -> bytes:
        """Canonical 48-byte little-endian encoding."""
        return int(self._v).to_bytes(GROUP_BYTES, "little")

    @classmethod
    def deserialize(cls, data: bytes) -> "GroupElement":
        """Strict decoding: enforces range and prime-order subgroup
        membership, raising SerializationError otherwise."""
        if len(data) != GROUP_BYTES:
            raise SerializationError(f"group element must be {GROUP_BYTES} bytes, got {len(data)}")
        v = mpz(int.from_bytes(data, "little"))
        if not 0 < v < _P:
            raise SerializationError("group element encoding out of range")
        if gmpy2.powmod(v, _Q, _P) != 1:
            raise SerializationError("encoding is not in the prime-order subgroup")
        return cls._raw(v)


def hash_to_group(label: bytes, data: bytes) -> GroupElement:
    """Deterministic nothing-up-my-sleeve map into the subgroup: hash to a
    residue mod P, then raise to the cofactor.  Discrete logs of the result
    are unknown to everyone."""
    counter = 0
    while True:
        material = _hash_expand(label, data + counter.to_bytes(4, "little"))
        candidate = mpz(int.from_bytes(material, "little")) % _P
        if candidate != 0:
            element = gmpy2.powmod(candidate, _C, _P)
            if element != 1:
                return GroupElement._raw(element)
        counter += 1


def derive_generators(seed: bytes, label: bytes, count: int) -> list[GroupElement]:
    """`count` independent generators, reproducible bit-for-bit from the seed."""
    return [hash_to_group(label, seed + i.to_bytes(8, "little")) for i in range(count)]


def msm(scalars: Sequence[FieldElement], bases: Sequence[GroupElement]) -> GroupElement:
    """Multi-scalar multiplication: sum of scalar_i * base_i."""
    if len(scalars) != len(bases):
        raise ValueError(f"msm length mismatch: {len(scalars)} scalars, {len(bases)} bases")
    return GroupElement._raw(
        _msm_raw((s.value, b._v) for s, b in zip(scalars, bases))
    )


def _msm_raw(items: Iterable[tuple[mpz, mpz]]) -> mpz:
    acc = mpz(1)
    for scalar, base in items:
        if scalar:
            acc = acc * gmpy2.powmod(base, scalar, _P) % _P
    return acc


def batch_inverse(values: Sequence[mpz]) -> list[mpz]:
    """Montgomery batch inversion; rejects zero entries."""
    n = len(values)
    prefix = [mpz(1)] * (n + 1)
    for i, v in enumerate(values):
        prefix[i + 1] = prefix[i] * v % _Q
    if prefix[n] == 0:
        raise ZeroDivisionError("batch_inverse called with a zero entry")
    inv = gmpy2.invert(prefix[n], _Q)
    out = [mpz(0)] * n
    for i in range(n - 1, -1, -1):
        out[i] = prefix[i] * inv % _Q
        inv = inv * values[i] % _Q
    return out


class EvaluationDomain:
    """Fixed set of evaluation points with precomputed barycentric weights.

    The commitment domain is the 256 powers of a 256th root of unity; small
    domains are used by tests to cross-check the evaluation-form algebra
    against coefficient-form oracles.
    """

    def __init__(self, points: Sequence[int]):
        self.points: tuple[mpz, ...] = tuple(mpz(p) % _Q for p in points)
        self.size = len(self.points)
        if len(set(self.points)) != self.size:
            raise ValueError("domain points must be distinct")
        self.index_of = {int(p): i for i, p in enumerate(self.points)}
        # Barycentric weights w_i = 1 / prod_{j != i} (d_i - d_j).
        prods = []
        for i, di in enumerate(self.points):
            acc = mpz(1)
            for j, dj in enumerate(self.points):
                if i != j:
                    acc = acc * (di - dj) % _Q
            prods.append(acc)
        self.weights: list[mpz] = batch_inverse(prods)
        self._inv_diff: list[list[mpz]] | None = None

    @classmethod
    def roots_of_unity(cls, size: int) -> "EvaluationDomain":
        if size < 1 or size & (size - 1):
            raise ValueError("domain size must be a power of two")
        if (FIELD_MODULUS - 1) % size:
            raise ValueError("field has no multiplicative subgroup of that order")
        omega = gmpy2.powmod(_FIELD_GENERATOR, (FIELD_MODULUS - 1) // size, _Q)
        points = []
        acc = mpz(1)
        for _ in range(size):
            points.append(acc)
            acc = acc * omega % _Q
        return cls(points)

    def _inv_diff_table(self) -> list[list[mpz]]:
        """inv_diff[i][j] = 1/(d_i - d_j) for i != j (0 on the diagonal)."""
        if self._inv_diff is None:
            flat = []
            for i, di in enumerate(self.points):
                for j, dj in enumerate(self.points):
                    if i != j:
                        flat.append((di - dj) % _Q)
            inv_flat = batch_inverse(flat)
            table: list[list[mpz]] = []
            k = 0
            for i in range(self.size):
                row = [mpz(0)] * self.size
                for j in range(self.size):
                    if i != j:
                        row[j] = inv_flat[k]
                        k += 1
                table.append(row)
            self._inv_diff = table
        return self._inv_diff

    def vanishing_at(self, z: mpz) -> mpz:
        acc = mpz(1)
        for d in self.points:
            acc = acc * (z - d) % _Q
        return acc

    def evaluate(self, evals: Sequence[mpz], z: mpz) -> mpz:
        """Barycentric evaluation of the interpolant at an arbitrary point."""
        z = mpz(z) % _Q
        idx = self.index_of.get(int(z))
        if idx is not None:
            return evals[idx]
        inv_terms = batch_inverse([(z - d) % _Q for d in self.points])
        acc = mpz(0)
        for fi, wi, inv in zip(evals, self.weights, inv_terms):
            acc += fi * wi % _Q * inv
        return self.vanishing_at(z) * (acc % _Q) % _Q

    def barycentric_coeffs(self, z: mpz) -> list[mpz]:
        """Coefficients b with f(z) = <evals, b> for any interpolant f."""
        z = mpz(z) % _Q
        idx = self.index_of.get(int(z))
        if idx is not None:
            coeffs = [mpz(0)] * self.size
            coeffs[idx] = mpz(1)
            return coeffs
        a_z = self.vanishing_at(z)
        inv_terms = batch_inverse([(z - d) % _Q for d in self.points])
        return [a_z * w % _Q * inv % _Q for w, inv in zip(self.weights, inv_terms)]

    def quotient_at_index(self, evals: Sequence[mpz], index: int) -> list[mpz]:
        """(f(X) - f(d_m)) / (X - d_m) in evaluation form, for in-domain m.

        The value at the removed point is the derivative term
        q_m = sum_{j != m} (f_j - f_m) * (w_j / w_m) / (d_m - d_j).
        """
        inv_diff = self._inv_diff_table()
        y = evals[index]
        w_m_inv = gmpy2.invert(self.weights[index], _Q)
        out = [mpz(0)] * self.size
        acc = mpz(0)
        row_m = inv_diff[index]
        for j in range(self.size):
            if j == index:
                continue
            qj = (evals[j] - y) * inv_diff[j][index] % _Q
            out[j] = qj
            acc += (evals[j] - y) * self.weights[j] % _Q * row_m[j]
        out[index] = acc % _Q * w_m_inv % _Q
        return out

    def quotient_outside(self, evals: Sequence[mpz], z: mpz, y: mpz) -> list[mpz]:
        """(f(X) - y) / (X - z) in evaluation form for z outside the domain."""
        z = mpz(z) % _Q
        if int(z) in self.index_of:
            raise ValueError("point lies in the domain; use quotient_at_index")
        inv_terms = batch_inverse([(d - z) % _Q for d in self.points])
        return [(fi - y) * inv % _Q for fi, inv in zip(evals, inv_terms)]


class Polynomial:
    """Polynomial in evaluation form over a fixed domain."""

    __slots__ = ("domain", "_evals")

    def __init__(self, domain: EvaluationDomain, evaluations: Sequence["FieldElement | int"]):
        if len(evaluations) != domain.size:
            raise ValueError(
                f"expected {domain.size} evaluations, got {len(evaluations)}"
            )
        self.domain = domain
        self._evals: tuple[mpz, ...] = tuple(
            e.value if isinstance(e, FieldElement) else mpz(e) % _Q for e in evaluations
        )

    @property
    def evaluations(self) -> tuple[FieldElement, ...]:
        return tuple(FieldElement._raw(e) for e in self._evals)

    def raw(self) -> tuple[mpz, ...]:
        """Evaluations as raw canonical integers (hot-path accessor)."""
        return self._evals

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if self.domain is not other.domain and self.domain.points != other.domain.points:
            raise ValueError("polynomials over different domains")
        out = Polynomial.__new__(Polynomial)
        out.domain = self.domain
        out._evals = tuple((a + b) % _Q for a, b in zip(self._evals, other._evals))
        return out

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Polynomial):
            return self._evals == other._evals and self.domain.points == other.domain.points
        return NotImplemented

    def __repr__(self) -> str:
        return f"Polynomial(domain_size={self.domain.size})"


def lagrange_eval(poly: Polynomial, z: FieldElement) -> FieldElement:
    """Evaluate the interpolant of `poly` at an arbitrary point."""
    return FieldElement._raw(poly.domain.evaluate(poly.raw(), z.value))


class Transcript:
    """Deterministic challenge derivation with length-prefixed absorption.

    Two transcripts fed byte-identical sequences emit identical challenges;
    any single-byte difference diverges.  Single-owner: not thread safe.
    """

    __slots__ = ("state",)

    def __init__(self, label: bytes = b"witnessbench"):
        self.state = hashlib.sha256(b"transcript-init" + _lp(label)).digest()

    def clone(self) -> "Transcript":
        t = Transcript.__new__(Transcript)
        t.state = self.state
        return t

    def absorb(self, label: bytes, data: bytes) -> None:
        self.state = hashlib.sha256(self.state + _lp(label) + _lp(data)).digest()

    def absorb_scalar(self, label: bytes, value: FieldElement) -> None:
        self.absorb(label, value.to_bytes())

    def absorb_scalars(self, label: bytes, values: Iterable[FieldElement]) -> None:
        for v in values:
            self.absorb_scalar(label, v)

    def absorb_point(self, label: bytes, point: GroupElement) -> None:
        self.absorb(label, point.serialize())

    def absorb_points(self, label: bytes, points: Iterable[GroupElement]) -> None:
        for p in points:
            self.absorb_point(label, p)

    def challenge(self, label: bytes) -> FieldElement:
        material = _hash_expand(b"challenge", self.state + _lp(label))
        value = mpz(int.from_bytes(material, "little")) % _Q
        # Ratchet so repeated challenges differ even with the same label.
        self.state = hashlib.sha256(self.state + b"ratchet" + _lp(label)).digest()
        return FieldElement._raw(value)


def _lp(data: bytes) -> bytes:
    return len(data).to_bytes(8, "little") + data

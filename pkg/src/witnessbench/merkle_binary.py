"""Sparse binary Merkle tree over an arithmetization-friendly permutation
hash, with classical sibling-path branches (the naive witness baseline) and
the exact-count instantiation of the naive witness-size formula
T * B * (k-1) * ceil(log_k N).

The hash is a width-3 sponge permutation (rate 2, capacity 1) in the
substitution-permutation style common for in-circuit hashing: x^5 S-boxes,
8 full rounds, 56 partial rounds, with round constants and an invertible
Cauchy mixing matrix derived deterministically from a seed.  The parameters
are demonstration-grade; bit-compatibility with any external library is a
non-goal, and the same fixed permutation is what the branch-verification
circuit arithmetizes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import gmpy2
from gmpy2 import mpz

from .algebra import FIELD_MODULUS, FieldElement, _hash_to_field_int

__all__ = [
    "AlgebraicHash",
    "BinaryTree",
    "MerkleBranch",
    "default_hash",
    "hash2",
    "verify_branch",
    "naive_witness_size",
]

_Q = mpz(FIELD_MODULUS)

WIDTH = 3
FULL_ROUNDS = 8
PARTIAL_ROUNDS = 56
SBOX_POWER = 5  # gcd(5, q-1) = 1, so x^5 permutes the field

DEFAULT_HASH_SEED = b"witnessbench-permutation-v1"

MAX_DEPTH = 32


class AlgebraicHash:
    """Fixed-width permutation hash with seed-derived parameters.

    `round_constants[r]` holds WIDTH additive constants for round r; `mds`
    is a WIDTH x WIDTH Cauchy matrix (hence invertible).  Two field inputs
    are hashed by permuting the state (a, b, iv) and taking slot 0.
    """

    def __init__(self, seed: bytes = DEFAULT_HASH_SEED):
        self.seed = seed
        rounds = FULL_ROUNDS + PARTIAL_ROUNDS
        self.round_constants: list[tuple[mpz, ...]] = [
            tuple(
                _hash_to_field_int(b"perm-rc", seed + r.to_bytes(4, "little") + s.to_bytes(4, "little"))
                for s in range(WIDTH)
            )
            for r in range(rounds)
        ]
        # Cauchy matrix m[i][j] = 1/(x_i + y_j) with disjoint index sets.
        self.mds: list[tuple[mpz, ...]] = [
            tuple(gmpy2.invert(mpz(i + WIDTH + j + 1), _Q) for j in range(WIDTH))
            for i in range(WIDTH)
        ]
        self.capacity_iv: mpz = _hash_to_field_int(b"perm-iv", seed)

    def permute(self, state: Sequence[mpz]) -> list[mpz]:
        s0, s1, s2 = state
        mds = self.mds
        half_full = FULL_ROUNDS // 2
        for r, (c0, c1, c2) in enumerate(self.round_constants):
            s0 = (s0 + c0) % _Q
            s1 = (s1 + c1) % _Q
            s2 = (s2 + c2) % _Q
            full = r < half_full or r >= half_full + PARTIAL_ROUNDS
            t = s0 * s0 % _Q
            s0 = t * t % _Q * s0 % _Q
            if full:
                t = s1 * s1 % _Q
                s1 = t * t % _Q * s1 % _Q
                t = s2 * s2 % _Q
                s2 = t * t % _Q * s2 % _Q
            m0, m1, m2 = mds
            s0, s1, s2 = (
                (m0[0] * s0 + m0[1] * s1 + m0[2] * s2) % _Q,
                (m1[0] * s0 + m1[1] * s1 + m1[2] * s2) % _Q,
                (m2[0] * s0 + m2[1] * s1 + m2[2] * s2) % _Q,
            )
        return [s0, s1, s2]

    def hash2_raw(self, a: mpz, b: mpz) -> mpz:
        return self.permute([a, b, self.capacity_iv])[0]

    def hash2(self, a: FieldElement, b: FieldElement) -> FieldElement:
        return FieldElement._raw(self.hash2_raw(a.value, b.value))


_default_hash: AlgebraicHash | None = None


def default_hash() -> AlgebraicHash:
    global _default_hash
    if _default_hash is None:
        _default_hash = AlgebraicHash()
    return _default_hash


def hash2(a: FieldElement, b: FieldElement) -> FieldElement:
    """Two-to-one compression with the default parameters."""
    return default_hash().hash2(a, b)


@dataclass(frozen=True)
class MerkleBranch:
    """Leaf plus its sibling chain, bottom-up."""

    index: int
    leaf: FieldElement
    siblings: tuple[FieldElement, ...]

    @property
    def depth(self) -> int:
        return len(self.siblings)

    def serialize(self) -> bytes:
        out = bytearray(self.index.to_bytes(8, "little"))
        out += self.leaf.to_bytes()
        for s in self.siblings:
            out += s.to_bytes()
        return bytes(out)

    @classmethod
    def deserialize(cls, data: bytes) -> "MerkleBranch":
        if len(data) < 40 or (len(data) - 40) % 32:
            raise ValueError("malformed branch encoding")
        index = int.from_bytes(data[:8], "little")
        leaf = FieldElement.from_bytes(data[8:40])
        siblings = tuple(
            FieldElement.from_bytes(data[off : off + 32]) for off in range(40, len(data), 32)
        )
        return cls(index, leaf, siblings)


class BinaryTree:
    """Sparse Merkle tree of fixed depth with a default-hash chain for empty
    subtrees, so a nominal 2^32-leaf tree never materializes absent leaves.

    Level 0 holds leaves; level `depth` is the root.  Mutation requires
    exclusive access, reads are safe to share once built.
    """

    def __init__(self, depth: int, hasher: AlgebraicHash | None = None):
        if not 1 <= depth <= MAX_DEPTH:
            raise ValueError(f"depth must be in [1, {MAX_DEPTH}]")
        self.depth = depth
        self.hasher = hasher or default_hash()
        self.leaves: dict[int, mpz] = {}
        self._nodes: list[dict[int, mpz]] = [dict() for _ in range(depth + 1)]
        self.defaults: list[mpz] = [mpz(0)]
        for _ in range(depth):
            d = self.defaults[-1]
            self.defaults.append(self.hasher.hash2_raw(d, d))

    def set_leaf(self, index: int, value: FieldElement) -> None:
        if not 0 <= index < (1 << self.depth):
            raise IndexError(f"leaf index {index} out of range for depth {self.depth}")
        self.leaves[index] = value.value
        # invalidate cached ancestors
        node = index
        for level in range(1, self.depth + 1):
            node >>= 1
            self._nodes[level].pop(node, None)

    def leaf(self, index: int) -> FieldElement:
        if not 0 <= index < (1 << self.depth):
            raise IndexError(f"leaf index {index} out of range for depth {self.depth}")
        return FieldElement._raw(self.leaves.get(index, mpz(0)))

    def root(self) -> FieldElement:
        self._fill()
        return FieldElement._raw(self._nodes[self.depth].get(0, self.defaults[self.depth]))

    def _fill(self) -> None:
        # Bottom-up fill of all populated nodes; avoids deep recursion and
        # the O(leaves) emptiness scan per internal node.
        level_idx = set(self.leaves)
        for level in range(1, self.depth + 1):
            parents = {i >> 1 for i in level_idx}
            nodes = self._nodes[level]
            prev = self._nodes[level - 1] if level > 1 else None
            default_child = self.defaults[level - 1]
            for p in parents:
                if p in nodes:
                    continue
                if level == 1:
                    left = self.leaves.get(2 * p, default_child)
                    right = self.leaves.get(2 * p + 1, default_child)
                else:
                    left = prev.get(2 * p, default_child)
                    right = prev.get(2 * p + 1, default_child)
                nodes[p] = self.hasher.hash2_raw(left, right)
            level_idx = parents

    def branch(self, index: int) -> MerkleBranch:
        """Sibling path for the leaf at `index`, bottom-up."""
        if not 0 <= index < (1 << self.depth):
            raise IndexError(f"leaf index {index} out of range for depth {self.depth}")
        self._fill()
        siblings = []
        node = index
        for level in range(self.depth):
            sib = node ^ 1
            if level == 0:
                value = self.leaves.get(sib, self.defaults[0])
            else:
                value = self._nodes[level].get(sib, self.defaults[level])
            siblings.append(FieldElement._raw(value))
            node >>= 1
        return MerkleBranch(index, self.leaf(index), tuple(siblings))


def verify_branch(
    root: FieldElement,
    branch: MerkleBranch,
    hasher: AlgebraicHash | None = None,
    depth: int | None = None,
) -> bool:
    """Fold the leaf up the sibling chain and compare with the root.  A
    branch whose sibling count disagrees with the expected depth is a
    structural error, distinct from a cryptographic mismatch."""
    if depth is not None and branch.depth != depth:
        raise ValueError(f"branch has {branch.depth} siblings, expected {depth}")
    if not 0 <= branch.index < (1 << branch.depth):
        raise ValueError("branch index out of range for its depth")
    h = hasher or default_hash()
    current = branch.leaf.value
    index = branch.index
    for sibling in branch.siblings:
        if index & 1:
            current = h.hash2_raw(sibling.value, current)
        else:
            current = h.hash2_raw(current, sibling.value)
        index >>= 1
    return current == root.value


def naive_witness_size(
    tx_count: int, node_bytes: int, arity: int, leaf_count: int
) -> int:
    """Exact-count naive witness size: tx_count * node_bytes * (arity - 1)
    siblings per level * ceil(log_arity(leaf_count)) levels."""
    if tx_count < 0:
        raise ValueError("tx_count must be non-negative")
    if node_bytes < 1:
        raise ValueError("node_bytes must be positive")
    if arity < 2:
        raise ValueError("arity must be at least 2")
    if leaf_count < 1:
        raise ValueError("leaf_count must be at least 1")
    levels = 0
    capacity = 1
    while capacity < leaf_count:
        capacity *= arity
        levels += 1
    return tx_count * node_bytes * (arity - 1) * levels

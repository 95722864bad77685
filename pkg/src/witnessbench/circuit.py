"""Rank-1 constraint encoding of Merkle-branch verification.

A depth-d branch circuit checks d iterations of the permutation hash plus a
left/right selection per level.  Public inputs are (root, leaf, index bits);
the private witness holds the siblings and every intermediate permutation
state.  Variable 0 is the constant one.

Each S-box x^5 costs three multiplication constraints (x2 = x*x,
x4 = x2*x2, x5 = x4*x); round-constant addition and the mixing matrix are
folded into the linear combinations for free.  Selection uses one product
b*(sibling - current) plus a booleanity check b*(b-1) = 0, and one final
constraint pins the recomputed root to the public root.  Constraint-count
optimization is deliberately not attempted.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpz

from .algebra import FIELD_MODULUS, FieldElement
from .merkle_binary import (
    FULL_ROUNDS,
    PARTIAL_ROUNDS,
    AlgebraicHash,
    MerkleBranch,
    default_hash,
)

__all__ = [
    "LinearCombination",
    "ConstraintSystem",
    "Assignment",
    "build_branch_circuit",
    "assign_branch",
    "is_satisfied",
]

_Q = mpz(FIELD_MODULUS)

# Sorted (variable, coefficient) pairs; the canonical LC representation.
LinearCombination = tuple[tuple[int, mpz], ...]


def _lc(terms: dict[int, mpz]) -> LinearCombination:
    return tuple(sorted((v, c % _Q) for v, c in terms.items() if c % _Q))


def _lc_eval(lc: LinearCombination, values: Sequence[mpz]) -> mpz:
    acc = mpz(0)
    for var, coeff in lc:
        acc += coeff * values[var]
    return acc % _Q


@dataclass(frozen=True)
class ConstraintSystem:
    """Constraints (A.w)*(B.w) = (C.w) over sparse linear combinations.

    Variables 0..public_count-1 are the fixed public prefix (constant one,
    root, leaf, then index bits).  `input_vars` are the private inputs
    (siblings); `product_defs` lists (out_var, A, B) definitions in
    dependency order so a full assignment can be synthesized from inputs.
    Immutable after construction.
    """

    num_vars: int
    public_count: int
    depth: int
    constraints: tuple[tuple[LinearCombination, LinearCombination, LinearCombination], ...]
    input_vars: tuple[int, ...]
    product_defs: tuple[tuple[int, LinearCombination, LinearCombination], ...]

    def serialize(self) -> bytes:
        """Canonical binary layout (header, then each constraint's three
        linear combinations as length-prefixed (u32 var, 32-byte coeff)
        lists), used for cross-run determinism checks."""
        out = bytearray()
        out += struct.pack(
            "<5I", self.num_vars, self.public_count, self.depth,
            len(self.constraints), len(self.input_vars),
        )
        for v in self.input_vars:
            out += struct.pack("<I", v)
        out += struct.pack("<I", len(self.product_defs))
        for out_var, a, b in self.product_defs:
            out += struct.pack("<I", out_var)
            for lc in (a, b):
                out += _pack_lc(lc)
        for a, b, c in self.constraints:
            for lc in (a, b, c):
                out += _pack_lc(lc)
        return bytes(out)

    def digest(self) -> str:
        return hashlib.sha256(self.serialize()).hexdigest()


def _pack_lc(lc: LinearCombination) -> bytes:
    out = bytearray(struct.pack("<I", len(lc)))
    for var, coeff in lc:
        out += struct.pack("<I", var)
        out += int(coeff).to_bytes(32, "little")
    return bytes(out)


@dataclass(frozen=True)
class Assignment:
    """Full variable vector (public prefix then private), canonical values."""

    values: tuple[mpz, ...]

    @property
    def field_values(self) -> tuple[FieldElement, ...]:
        return tuple(FieldElement._raw(v) for v in self.values)


def is_satisfied(cs: ConstraintSystem, assignment: Assignment) -> bool:
    """Exact check of every constraint; length mismatch is an error."""
    values = assignment.values
    if len(values) != cs.num_vars:
        raise ValueError(
            f"assignment has {len(values)} values, circuit has {cs.num_vars} variables"
        )
    for a, b, c in cs.constraints:
        if _lc_eval(a, values) * _lc_eval(b, values) % _Q != _lc_eval(c, values):
            return False
    return True


class _Builder:
    """Accumulates constraints while tracking symbolic state as LCs."""

    def __init__(self, public_count: int):
        self.num_vars = public_count
        self.public_count = public_count
        self.constraints: list[tuple[LinearCombination, LinearCombination, LinearCombination]] = []
        self.input_vars: list[int] = []
        self.product_defs: list[tuple[int, LinearCombination, LinearCombination]] = []

    def new_input(self) -> LinearCombination:
        var = self.num_vars
        self.num_vars += 1
        self.input_vars.append(var)
        return _lc({var: mpz(1)})

    def mul(self, a: LinearCombination, b: LinearCombination) -> LinearCombination:
        var = self.num_vars
        self.num_vars += 1
        out = _lc({var: mpz(1)})
        self.constraints.append((a, b, out))
        self.product_defs.append((var, a, b))
        return out

    def require(self, a: LinearCombination, b: LinearCombination, c: LinearCombination) -> None:
        self.constraints.append((a, b, c))


def _lc_add(a: LinearCombination, b: LinearCombination) -> LinearCombination:
    terms: dict[int, mpz] = dict(a)
    for var, coeff in b:
        terms[var] = (terms.get(var, mpz(0)) + coeff) % _Q
    return _lc(terms)


def _lc_sub(a: LinearCombination, b: LinearCombination) -> LinearCombination:
    terms: dict[int, mpz] = dict(a)
    for var, coeff in b:
        terms[var] = (terms.get(var, mpz(0)) - coeff) % _Q
    return _lc(terms)


def _lc_scale(a: LinearCombination, k: mpz) -> LinearCombination:
    return _lc({var: coeff * k % _Q for var, coeff in a})


def _lc_const(value: mpz) -> LinearCombination:
    return _lc({0: value})


def _sbox(builder: _Builder, x: LinearCombination) -> LinearCombination:
    x2 = builder.mul(x, x)
    x4 = builder.mul(x2, x2)
    return builder.mul(x4, x)


def _permutation_gadget(
    builder: _Builder, hasher: AlgebraicHash, left: LinearCombination, right: LinearCombination
) -> LinearCombination:
    state = [left, right, _lc_const(hasher.capacity_iv)]
    half = FULL_ROUNDS // 2
    for r, constants in enumerate(hasher.round_constants):
        state = [_lc_add(s, _lc_const(c)) for s, c in zip(state, constants)]
        if half <= r < half + PARTIAL_ROUNDS:
            state[0] = _sbox(builder, state[0])
        else:
            state = [_sbox(builder, s) for s in state]
        mixed = []
        for row in hasher.mds:
            acc: LinearCombination = ()
            for coeff, s in zip(row, state):
                acc = _lc_add(acc, _lc_scale(s, coeff))
            mixed.append(acc)
        state = mixed
    return state[0]


def build_branch_circuit(depth: int, hasher: AlgebraicHash | None = None) -> ConstraintSystem:
    """Circuit satisfiable exactly by valid depth-`depth` branches.

    Public layout: var 0 = 1, var 1 = root, var 2 = leaf, vars 3..3+depth-1
    = index bits (bottom-up).  Private: one input per sibling, then the
    intermediate products.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    hasher = hasher or default_hash()
    public_count = 3 + depth
    builder = _Builder(public_count)
    one = _lc({0: mpz(1)})
    root = _lc({1: mpz(1)})
    current = _lc({2: mpz(1)})
    bits = [_lc({3 + i: mpz(1)}) for i in range(depth)]

    for level in range(depth):
        bit = bits[level]
        sibling = builder.new_input()
        # booleanity: b * (b - 1) = 0
        builder.require(bit, _lc_sub(bit, one), ())
        # left child = current + b*(sibling - current); right = cur + sib - left
        delta = builder.mul(bit, _lc_sub(sibling, current))
        left = _lc_add(current, delta)
        right = _lc_sub(_lc_add(current, sibling), left)
        current = _permutation_gadget(builder, hasher, left, right)

    # recomputed root must equal the public root
    builder.require(one, current, root)

    return ConstraintSystem(
        num_vars=builder.num_vars,
        public_count=public_count,
        depth=depth,
        constraints=tuple(builder.constraints),
        input_vars=tuple(builder.input_vars),
        product_defs=tuple(builder.product_defs),
    )


def public_vector(cs: ConstraintSystem, root: FieldElement, leaf: FieldElement, index: int) -> list[mpz]:
    """The fixed public prefix for a branch statement."""
    if not 0 <= index < (1 << cs.depth):
        raise ValueError("index out of range for circuit depth")
    values = [mpz(1), root.value, leaf.value]
    values += [mpz((index >> i) & 1) for i in range(cs.depth)]
    return values


def assign_branch(cs: ConstraintSystem, branch: MerkleBranch, root: FieldElement) -> Assignment:
    """Fill the full variable vector for a branch; the result satisfies the
    circuit exactly when the branch verifies against `root`."""
    if branch.depth != cs.depth:
        raise ValueError(f"branch depth {branch.depth} does not match circuit depth {cs.depth}")
    values: list[mpz] = public_vector(cs, root, branch.leaf, branch.index)
    values += [mpz(0)] * (cs.num_vars - len(values))
    for var, sibling in zip(cs.input_vars, branch.siblings):
        values[var] = sibling.value
    for out_var, a, b in cs.product_defs:
        values[out_var] = _lc_eval(a, values) * _lc_eval(b, values) % _Q
    return Assignment(tuple(values))

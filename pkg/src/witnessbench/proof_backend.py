"""Succinct-argument backends proving constraint-system satisfaction.

Two interchangeable backends sit behind one interface:

* `ipa` — a transparent (no trusted setup) Bulletproofs-style argument for
  arithmetic circuits.  Every constraint becomes a multiplication gate over
  wire vectors (a_L, a_R, a_O); linear consistency rows tie gate wires to
  each other and to the public inputs.  One random combination (challenges
  y, z) folds the Hadamard and linear constraints into a single inner
  product, whose value is proven with a logarithmic-round inner-product
  argument over seed-derived generators.  Witnesses here are public state,
  so no blinding is applied and the low-degree coefficients t1, t3 travel
  in the clear; proof size is O(log gates) group elements.

* `mock` — the proof is the full private witness and verification re-runs
  the constraint checker.  Zero cryptography; exists to validate circuits
  and the harness independently of the argument system.

Proof sizes depend only on the circuit, never on the witness.  Public
inputs are carried and counted separately from the proof bytes.
"""

from __future__ import annotations

import functools
import struct
from dataclasses import dataclass
from typing import Protocol, Sequence

import gmpy2
from gmpy2 import mpz

from .algebra import (
    FIELD_BYTES,
    FIELD_MODULUS,
    GROUP_BYTES,
    FieldElement,
    GroupElement,
    SerializationError,
    Transcript,
    _msm_raw,
    _P as _PM,
    batch_inverse,
    derive_generators,
)
from .circuit import (
    Assignment,
    ConstraintSystem,
    _lc_eval,
    assign_branch,
    build_branch_circuit,
    is_satisfied,
)
from .merkle_binary import MerkleBranch

__all__ = [
    "BranchProof",
    "ProvingError",
    "ProverBackend",
    "MockBackend",
    "IpaBackend",
    "get_backend",
    "batch_prove",
    "encode_public_inputs",
    "decode_public_inputs",
]

_Q = mpz(FIELD_MODULUS)

GENERATOR_SEED = b"witnessbench-branch-argument-v1"

_BACKEND_TAGS = {"mock": 0, "ipa": 1}
_TAG_NAMES = {v: k for k, v in _BACKEND_TAGS.items()}


class ProvingError(ValueError):
    """Raised when proving is attempted on an unsatisfied assignment."""


@dataclass(frozen=True)
class BranchProof:
    """Backend tag plus opaque proof bytes and the public-input bytes the
    proof binds to (counted separately from the proof itself)."""

    backend: str
    proof_bytes: bytes
    public_bytes: bytes

    def serialize(self) -> bytes:
        tag = _BACKEND_TAGS.get(self.backend)
        if tag is None:
            raise ValueError(f"unknown backend tag {self.backend!r}")
        return (
            bytes([tag])
            + struct.pack("<I", len(self.proof_bytes))
            + self.proof_bytes
            + struct.pack("<I", len(self.public_bytes))
            + self.public_bytes
        )

    @classmethod
    def deserialize(cls, data: bytes) -> "BranchProof":
        if len(data) < 9:
            raise SerializationError("branch proof too short")
        name = _TAG_NAMES.get(data[0])
        if name is None:
            raise SerializationError(f"unknown backend tag byte {data[0]}")
        off = 1
        (plen,) = struct.unpack_from("<I", data, off)
        off += 4
        proof = data[off : off + plen]
        off += plen
        if len(data) < off + 4:
            raise SerializationError("branch proof truncated")
        (blen,) = struct.unpack_from("<I", data, off)
        off += 4
        publics = data[off : off + blen]
        if len(proof) != plen or len(publics) != blen or off + blen != len(data):
            raise SerializationError("branch proof length fields inconsistent")
        return cls(name, bytes(proof), bytes(publics))


def encode_public_inputs(root: FieldElement, leaf: FieldElement, index: int) -> bytes:
    return root.to_bytes() + leaf.to_bytes() + index.to_bytes(8, "little")


def decode_public_inputs(data: bytes) -> tuple[FieldElement, FieldElement, int]:
    if len(data) != 72:
        raise SerializationError(f"public inputs must be 72 bytes, got {len(data)}")
    root = FieldElement.from_bytes(data[:32])
    leaf = FieldElement.from_bytes(data[32:64])
    index = int.from_bytes(data[64:], "little")
    return root, leaf, index


def _public_values(cs: ConstraintSystem, public_bytes: bytes) -> list[mpz]:
    root, leaf, index = decode_public_inputs(public_bytes)
    if not 0 <= index < (1 << cs.depth):
        raise SerializationError("public index out of range for circuit depth")
    values = [mpz(1), root.value, leaf.value]
    values += [mpz((index >> i) & 1) for i in range(cs.depth)]
    return values


def _publics_from_assignment(cs: ConstraintSystem, assignment: Assignment) -> bytes:
    vals = assignment.values
    index = 0
    for i in range(cs.depth):
        index |= int(vals[3 + i]) << i
    return encode_public_inputs(
        FieldElement._raw(vals[1]), FieldElement._raw(vals[2]), index
    )


class ProverBackend(Protocol):
    name: str

    def setup(self, cs: ConstraintSystem): ...

    def prove(self, material, assignment: Assignment) -> BranchProof: ...

    def verify(self, material, public_bytes: bytes, proof: BranchProof) -> bool: ...


# ---------------------------------------------------------------------------
# mock backend


@dataclass(frozen=True)
class _MockMaterial:
    cs: ConstraintSystem


class MockBackend:
    """Oracle backend: the proof is the private witness itself."""

    name = "mock"

    def setup(self, cs: ConstraintSystem) -> _MockMaterial:
        return _MockMaterial(cs)

    def prove(self, material: _MockMaterial, assignment: Assignment) -> BranchProof:
        cs = material.cs
        if len(assignment.values) != cs.num_vars:
            raise ValueError("assignment length does not match circuit")
        private = assignment.values[cs.public_count :]
        proof = b"".join(int(v).to_bytes(FIELD_BYTES, "little") for v in private)
        return BranchProof(self.name, proof, _publics_from_assignment(cs, assignment))

    def verify(self, material: _MockMaterial, public_bytes: bytes, proof: BranchProof) -> bool:
        cs = material.cs
        if proof.backend != self.name:
            return False
        expected = (cs.num_vars - cs.public_count) * FIELD_BYTES
        if len(proof.proof_bytes) != expected or proof.public_bytes != public_bytes:
            return False
        try:
            values = _public_values(cs, public_bytes)
            for off in range(0, expected, FIELD_BYTES):
                values.append(
                    FieldElement.from_bytes(proof.proof_bytes[off : off + FIELD_BYTES]).value
                )
        except SerializationError:
            return False
        return is_satisfied(cs, Assignment(tuple(values)))


# ---------------------------------------------------------------------------
# ipa backend: circuit translation


@dataclass(frozen=True)
class _Row:
    """One linear-consistency row: sum of wire terms equals the public sum."""

    terms: tuple[tuple[int, int, mpz], ...]  # (matrix 0=L/1=R/2=O, gate, coeff)
    pub_terms: tuple[tuple[int, mpz], ...]  # (public var, coeff)


@dataclass(frozen=True)
class _IpaMaterial:
    cs: ConstraintSystem
    n: int  # padded gate count (power of two)
    n_real: int
    rounds: int
    input_gates: tuple[int, ...]  # gate index per private input var, in order
    gate_constraints: tuple[int, ...]  # gate index per cs constraint
    rows: tuple[_Row, ...]
    g_bases: tuple[GroupElement, ...]
    h_bases: tuple[GroupElement, ...]
    u_base: GroupElement
    digest: bytes

    @property
    def proof_bytes_len(self) -> int:
        return 2 * GROUP_BYTES + 3 * FIELD_BYTES + self.rounds * 2 * GROUP_BYTES + 2 * FIELD_BYTES


def _translate(cs: ConstraintSystem) -> tuple[int, tuple[int, ...], tuple[int, ...], tuple[_Row, ...]]:
    """Map the constraint system onto multiplication gates plus linear rows."""
    n_inputs = len(cs.input_vars)
    input_gate = {var: g for g, var in enumerate(cs.input_vars)}
    gate_of_constraint = {ci: n_inputs + ci for ci in range(len(cs.constraints))}

    # A constraint of the form (A)(B) = (1*v) that defines product variable v
    # needs no output row: v's wire IS that gate's output.  Product defs are
    # recorded in constraint order, so a single forward scan pairs them up.
    product_def_constraint: dict[int, int] = {}
    prod_iter = iter(cs.product_defs)
    next_def = next(prod_iter, None)
    for ci, con in enumerate(cs.constraints):
        if (
            next_def is not None
            and con[0] == next_def[1]
            and con[1] == next_def[2]
            and _single_var(con[2]) == next_def[0]
        ):
            product_def_constraint[next_def[0]] = ci
            next_def = next(prod_iter, None)
    if next_def is not None:
        raise ValueError("product definitions do not line up with constraints")

    def wire_of(var: int) -> tuple[int, int]:
        if var in input_gate:
            return (0, input_gate[var])  # a_L of the input gate
        ci = product_def_constraint.get(var)
        if ci is None:
            raise ValueError(f"variable {var} has no defining gate")
        return (2, gate_of_constraint[ci])  # a_O of the defining gate

    def lc_row(target: tuple[int, int], lc) -> _Row:
        terms = {target: mpz(1)}
        pubs: dict[int, mpz] = {}
        for var, coeff in lc:
            if var < cs.public_count:
                pubs[var] = (pubs.get(var, mpz(0)) + coeff) % _Q
            else:
                w = wire_of(var)
                terms[w] = (terms.get(w, mpz(0)) - coeff) % _Q
        return _Row(
            tuple(sorted((m, g, c) for (m, g), c in terms.items() if c)),
            tuple(sorted(pubs.items())),
        )

    rows: list[_Row] = []
    for var in cs.input_vars:
        g = input_gate[var]
        rows.append(_Row(((1, g, mpz(1)),), ()))  # a_R = 0
        rows.append(_Row(((2, g, mpz(1)),), ()))  # a_O = 0
    product_cis = set(product_def_constraint.values())
    for ci, (a, b, c) in enumerate(cs.constraints):
        g = gate_of_constraint[ci]
        rows.append(lc_row((0, g), a))
        rows.append(lc_row((1, g), b))
        if ci not in product_cis:
            rows.append(lc_row((2, g), c))

    n_real = n_inputs + len(cs.constraints)
    return (
        n_real,
        tuple(input_gate[v] for v in cs.input_vars),
        tuple(gate_of_constraint[ci] for ci in range(len(cs.constraints))),
        tuple(rows),
    )


def _single_var(lc) -> int | None:
    if len(lc) == 1 and lc[0][1] == 1:
        return lc[0][0]
    return None


def _next_pow2(n: int) -> int:
    p = 2
    while p < n:
        p *= 2
    return p


class IpaBackend:
    """Transparent inner-product-argument backend over the translated gates."""

    name = "ipa"

    def setup(self, cs: ConstraintSystem) -> _IpaMaterial:
        n_real, input_gates, gate_constraints, rows = _translate(cs)
        n = _next_pow2(n_real)
        rounds = n.bit_length() - 1
        g_bases = tuple(derive_generators(GENERATOR_SEED, b"bp-g", n))
        h_bases = tuple(derive_generators(GENERATOR_SEED, b"bp-h", n))
        u_base = derive_generators(GENERATOR_SEED, b"bp-u", 1)[0]
        return _IpaMaterial(
            cs=cs,
            n=n,
            n_real=n_real,
            rounds=rounds,
            input_gates=input_gates,
            gate_constraints=gate_constraints,
            rows=rows,
            g_bases=g_bases,
            h_bases=h_bases,
            u_base=u_base,
            digest=bytes.fromhex(cs.digest()),
        )

    # -- helpers shared by prover and verifier

    @staticmethod
    def _challenges_yz(material: _IpaMaterial, tr: Transcript) -> tuple[mpz, mpz]:
        y = _nonzero_challenge(tr, b"bp-y")
        z = _nonzero_challenge(tr, b"bp-z")
        return y, z

    @staticmethod
    def _linear_data(
        material: _IpaMaterial, publics: Sequence[mpz], z: mpz
    ) -> tuple[list[mpz], list[mpz], list[mpz], mpz]:
        """w_L, w_R, w_O (length n) and <z-powers, c> for the given publics."""
        n = material.n
        w_l = [mpz(0)] * n
        w_r = [mpz(0)] * n
        w_o = [mpz(0)] * n
        zc = mpz(0)
        z_pow = z
        mats = (w_l, w_r, w_o)
        for row in material.rows:
            for m, gate, coeff in row.terms:
                mats[m][gate] = (mats[m][gate] + z_pow * coeff) % _Q
            for var, coeff in row.pub_terms:
                zc = (zc + z_pow * coeff % _Q * publics[var]) % _Q
            z_pow = z_pow * z % _Q
        return w_l, w_r, w_o, zc

    @staticmethod
    def _y_vectors(n: int, y: mpz) -> tuple[list[mpz], list[mpz]]:
        y_pow = [mpz(1)] * n
        for i in range(1, n):
            y_pow[i] = y_pow[i - 1] * y % _Q
        y_inv = gmpy2.invert(y, _Q)
        y_pow_inv = [mpz(1)] * n
        for i in range(1, n):
            y_pow_inv[i] = y_pow_inv[i - 1] * y_inv % _Q
        return y_pow, y_pow_inv

    # -- proving

    def prove(self, material: _IpaMaterial, assignment: Assignment) -> BranchProof:
        cs = material.cs
        if not is_satisfied(cs, assignment):
            raise ProvingError("assignment does not satisfy the circuit")
        public_bytes = _publics_from_assignment(cs, assignment)
        values = assignment.values
        n = material.n

        a_l = [mpz(0)] * n
        a_r = [mpz(0)] * n
        a_o = [mpz(0)] * n
        for var, gate in zip(cs.input_vars, material.input_gates):
            a_l[gate] = values[var]
        for ci, (a, b, _) in enumerate(cs.constraints):
            gate = material.gate_constraints[ci]
            va = _lc_eval(a, values)
            vb = _lc_eval(b, values)
            a_l[gate] = va
            a_r[gate] = vb
            a_o[gate] = va * vb % _Q

        tr = Transcript(b"branch-argument")
        tr.absorb(b"circuit", material.digest)
        tr.absorb(b"publics", public_bytes)

        a_i_pt = GroupElement._raw(
            _msm_raw(zip(a_l, (g._v for g in material.g_bases)))
            * _msm_raw(zip(a_r, (h._v for h in material.h_bases)))
            % _PM
        )
        a_o_pt = GroupElement._raw(_msm_raw(zip(a_o, (g._v for g in material.g_bases))))
        tr.absorb_point(b"bp-ai", a_i_pt)
        tr.absorb_point(b"bp-ao", a_o_pt)
        y, z = self._challenges_yz(material, tr)

        publics = _public_values(cs, public_bytes)
        w_l, w_r, w_o, zc = self._linear_data(material, publics, z)
        y_pow, y_pow_inv = self._y_vectors(n, y)

        # l(X) = L1*X + L2*X^2 ; r(X) = R1*X + R0
        l1 = [(a_l[i] + y_pow_inv[i] * w_r[i]) % _Q for i in range(n)]
        l2 = a_o
        r1 = [(y_pow[i] * a_r[i] + w_l[i]) % _Q for i in range(n)]
        r0 = [(w_o[i] - y_pow[i]) % _Q for i in range(n)]

        t1 = _inner(l1, r0)
        t3 = _inner(l2, r1)
        tr.absorb_scalar(b"bp-t1", FieldElement._raw(t1))
        tr.absorb_scalar(b"bp-t3", FieldElement._raw(t3))
        x = _nonzero_challenge(tr, b"bp-x")

        x2 = x * x % _Q
        l_vec = [(l1[i] * x + l2[i] * x2) % _Q for i in range(n)]
        r_vec = [(r1[i] * x + r0[i]) % _Q for i in range(n)]
        t_hat = _inner(l_vec, r_vec)
        tr.absorb_scalar(b"bp-that", FieldElement._raw(t_hat))
        u_scale = _nonzero_challenge(tr, b"bp-u-scale")
        u = gmpy2.powmod(material.u_base._v, u_scale, _PM)

        g_vec = [g._v for g in material.g_bases]
        h_vec = [
            gmpy2.powmod(h._v, y_pow_inv[i], _PM)
            for i, h in enumerate(material.h_bases)
        ]

        cross_points: list[tuple[GroupElement, GroupElement]] = []
        while len(l_vec) > 1:
            half = len(l_vec) // 2
            l_lo, l_hi = l_vec[:half], l_vec[half:]
            r_lo, r_hi = r_vec[:half], r_vec[half:]
            g_lo, g_hi = g_vec[:half], g_vec[half:]
            h_lo, h_hi = h_vec[:half], h_vec[half:]

            cl = _inner(l_lo, r_hi)
            cr = _inner(l_hi, r_lo)
            left = (
                _msm_raw(zip(l_lo, g_hi))
                * _msm_raw(zip(r_hi, h_lo))
                % _PM
                * gmpy2.powmod(u, cl, _PM)
                % _PM
            )
            right = (
                _msm_raw(zip(l_hi, g_lo))
                * _msm_raw(zip(r_lo, h_hi))
                % _PM
                * gmpy2.powmod(u, cr, _PM)
                % _PM
            )
            left_pt, right_pt = GroupElement._raw(left), GroupElement._raw(right)
            cross_points.append((left_pt, right_pt))
            tr.absorb_point(b"bp-il", left_pt)
            tr.absorb_point(b"bp-ir", right_pt)
            uj = _nonzero_challenge(tr, b"bp-iu")
            uj_inv = gmpy2.invert(uj, _Q)

            l_vec = [(uj * a + uj_inv * b) % _Q for a, b in zip(l_lo, l_hi)]
            r_vec = [(uj_inv * a + uj * b) % _Q for a, b in zip(r_lo, r_hi)]
            g_vec = [
                gmpy2.powmod(gl, uj_inv, _PM) * gmpy2.powmod(gh, uj, _PM) % _PM
                for gl, gh in zip(g_lo, g_hi)
            ]
            h_vec = [
                gmpy2.powmod(hl, uj, _PM) * gmpy2.powmod(hh, uj_inv, _PM) % _PM
                for hl, hh in zip(h_lo, h_hi)
            ]

        proof = bytearray()
        proof += a_i_pt.serialize()
        proof += a_o_pt.serialize()
        proof += FieldElement._raw(t1).to_bytes()
        proof += FieldElement._raw(t3).to_bytes()
        proof += FieldElement._raw(t_hat).to_bytes()
        for left_pt, right_pt in cross_points:
            proof += left_pt.serialize()
            proof += right_pt.serialize()
        proof += FieldElement._raw(l_vec[0]).to_bytes()
        proof += FieldElement._raw(r_vec[0]).to_bytes()
        return BranchProof(self.name, bytes(proof), public_bytes)

    # -- verification

    def verify(self, material: _IpaMaterial, public_bytes: bytes, proof: BranchProof) -> bool:
        if proof.backend != self.name or proof.public_bytes != public_bytes:
            return False
        if len(proof.proof_bytes) != material.proof_bytes_len:
            return False
        try:
            parsed = self._parse(material, proof.proof_bytes)
            publics = _public_values(material.cs, public_bytes)
        except SerializationError:
            return False
        a_i_pt, a_o_pt, t1, t3, t_hat, cross_points, l0, r0 = parsed
        n = material.n

        tr = Transcript(b"branch-argument")
        tr.absorb(b"circuit", material.digest)
        tr.absorb(b"publics", public_bytes)
        tr.absorb_point(b"bp-ai", a_i_pt)
        tr.absorb_point(b"bp-ao", a_o_pt)
        y, z = self._challenges_yz(material, tr)

        w_l, w_r, w_o, zc = self._linear_data(material, publics, z)
        y_pow, y_pow_inv = self._y_vectors(n, y)

        delta = mpz(0)
        for i in range(n):
            delta += y_pow_inv[i] * w_r[i] % _Q * w_l[i]
        delta %= _Q

        tr.absorb_scalar(b"bp-t1", FieldElement._raw(t1))
        tr.absorb_scalar(b"bp-t3", FieldElement._raw(t3))
        x = _nonzero_challenge(tr, b"bp-x")
        x2 = x * x % _Q
        x3 = x2 * x % _Q

        if t_hat != (t1 * x + (delta + zc) * x2 + t3 * x3) % _Q:
            return False

        tr.absorb_scalar(b"bp-that", FieldElement._raw(t_hat))
        u_scale = _nonzero_challenge(tr, b"bp-u-scale")
        u = gmpy2.powmod(material.u_base._v, u_scale, _PM)

        # P* = x*A_I + x^2*A_O + <x*(y^-n o w_R), G> + <y^-n o (x*w_L + w_O - y^n), H> + t_hat*U
        g_scalars = [x * y_pow_inv[i] % _Q * w_r[i] % _Q for i in range(n)]
        h_scalars = [
            y_pow_inv[i] * ((x * w_l[i] + w_o[i] - y_pow[i]) % _Q) % _Q for i in range(n)
        ]
        p_star = (
            gmpy2.powmod(a_i_pt._v, x, _PM)
            * gmpy2.powmod(a_o_pt._v, x2, _PM)
            % _PM
            * _msm_raw(zip(g_scalars, (g._v for g in material.g_bases)))
            % _PM
            * _msm_raw(zip(h_scalars, (h._v for h in material.h_bases)))
            % _PM
            * gmpy2.powmod(u, t_hat, _PM)
            % _PM
        )

        us: list[mpz] = []
        for left_pt, right_pt in cross_points:
            tr.absorb_point(b"bp-il", left_pt)
            tr.absorb_point(b"bp-ir", right_pt)
            us.append(_nonzero_challenge(tr, b"bp-iu"))
        us_inv = batch_inverse(us)
        for uj, uj_inv, (left_pt, right_pt) in zip(us, us_inv, cross_points):
            p_star = (
                p_star
                * gmpy2.powmod(left_pt._v, uj * uj % _Q, _PM)
                % _PM
                * gmpy2.powmod(right_pt._v, uj_inv * uj_inv % _Q, _PM)
                % _PM
            )

        # fold scalars: s[i] = prod u_j^(+1 if bit else -1), bit = round-j bit of i
        s = [mpz(1)] * n
        for j, (uj, uj_inv) in enumerate(zip(us, us_inv)):
            bit = 1 << (material.rounds - 1 - j)
            for i in range(n):
                s[i] = s[i] * (uj if i & bit else uj_inv) % _Q
        s_inv = batch_inverse(s)

        g0 = _msm_raw(zip(s, (g._v for g in material.g_bases)))
        h0 = _msm_raw(
            (s_inv[i] * y_pow_inv[i] % _Q, material.h_bases[i]._v) for i in range(n)
        )
        expected = (
            gmpy2.powmod(g0, l0, _PM)
            * gmpy2.powmod(h0, r0, _PM)
            % _PM
            * gmpy2.powmod(u, l0 * r0 % _Q, _PM)
            % _PM
        )
        return p_star == expected

    def _parse(self, material: _IpaMaterial, data: bytes):
        off = 0

        def point():
            nonlocal off
            p = GroupElement.deserialize(data[off : off + GROUP_BYTES])
            off += GROUP_BYTES
            return p

        def scalar():
            nonlocal off
            s = FieldElement.from_bytes(data[off : off + FIELD_BYTES]).value
            off += FIELD_BYTES
            return s

        a_i_pt = point()
        a_o_pt = point()
        t1, t3, t_hat = scalar(), scalar(), scalar()
        cross = []
        for _ in range(material.rounds):
            left = point()
            right = point()
            cross.append((left, right))
        l0, r0 = scalar(), scalar()
        return a_i_pt, a_o_pt, t1, t3, t_hat, tuple(cross), l0, r0


def _inner(a: Sequence[mpz], b: Sequence[mpz]) -> mpz:
    acc = mpz(0)
    for x, y in zip(a, b):
        acc += x * y % _Q
    return acc % _Q


def _nonzero_challenge(tr: Transcript, label: bytes) -> mpz:
    c = tr.challenge(label).value
    while c == 0:  # probability ~2^-255; retry keeps both sides in lockstep
        c = tr.challenge(label).value
    return c


_BACKENDS = {"mock": MockBackend, "ipa": IpaBackend}


def get_backend(name: str) -> ProverBackend:
    try:
        return _BACKENDS[name]()
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; choose from {sorted(_BACKENDS)}")


@functools.lru_cache(maxsize=8)
def _circuit_and_material(backend_name: str, depth: int):
    cs = build_branch_circuit(depth)
    backend = get_backend(backend_name)
    return cs, backend.setup(cs)


def batch_prove(
    branches: Sequence[MerkleBranch],
    root: FieldElement,
    backend: ProverBackend,
    material=None,
) -> list[BranchProof]:
    """One proof per branch (the per-branch model: no cross-branch
    aggregation).  All branches must share one depth."""
    if not branches:
        return []
    depth = branches[0].depth
    if any(br.depth != depth for br in branches):
        raise ValueError("batch_prove requires branches of a single depth")
    if material is None:
        cs, material = _circuit_and_material(backend.name, depth)
    else:
        cs = material.cs
    return [backend.prove(material, assign_branch(cs, br, root)) for br in branches]

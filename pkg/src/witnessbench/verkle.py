"""Arity-256 Verkle tree over 32-byte keys and values.

Key byte i selects the child index at depth i.  A lone leaf is stored at
the highest point of divergence (path compression), so internal chains only
exist where keys actually share prefixes.  Each internal node commits to a
256-slot vector holding, per slot: the field image of the child commitment
for internal children, the field image of hash(key || value) for leaf
children, and zero for absent children.

A witness for a set of keys carries exactly three things: the claimed
leaves (with absence information), the deduplicated internal-node
commitments along all access paths (root excluded; the verifier holds it),
and one aggregated multiproof covering every parent-child opening.  The
commitments travel sorted by tree path without the paths themselves: the
verifier reconstructs the path set from the keys and claimed depths and
re-associates commitments by position.

Absence is proven either by opening a zero slot at the divergence point or
by revealing the diverging leaf that occupies the queried slot.

The byte layout (see serialize_witness) is stable across runs for identical
inputs and commitment-key seed.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum

from gmpy2 import mpz

from .algebra import (
    FieldElement,
    GroupElement,
    Polynomial,
    SerializationError,
    Transcript,
    _hash_to_field_int,
    _msm_raw,
)
from .vector_commitment import (
    Commitment,
    CommitmentKey,
    MultiProof,
    default_key,
    multiprove,
    verify_multiproof,
)

__all__ = [
    "KEY_BYTES",
    "VALUE_BYTES",
    "EntryKind",
    "WitnessEntry",
    "VerkleWitness",
    "WitnessStructureError",
    "VerkleTree",
    "verify_witness",
    "serialize_witness",
    "parse_witness",
    "witness_size_bytes",
    "witness_size_breakdown",
    "WitnessSizeBreakdown",
    "map_to_field",
    "leaf_to_field",
]

KEY_BYTES = 32
VALUE_BYTES = 32
ARITY = 256
MAX_DEPTH = 32


class WitnessStructureError(ValueError):
    """Witness bytes or shape are malformed; distinct from a well-formed
    witness that fails cryptographic verification."""


def map_to_field(commitment: Commitment) -> mpz:
    """Field slot value of a child commitment."""
    return _hash_to_field_int(b"verkle-node", commitment.serialize())


def leaf_to_field(key: bytes, value: bytes) -> mpz:
    """Field slot value of a leaf; domain-separated from commitments."""
    return _hash_to_field_int(b"verkle-leaf", key + value)


class _Leaf:
    __slots__ = ("key", "value")

    def __init__(self, key: bytes, value: bytes):
        self.key = key
        self.value = value


class _Internal:
    __slots__ = ("children", "commitment", "field_value", "dirty")

    def __init__(self):
        self.children: dict[int, "_Internal | _Leaf"] = {}
        self.commitment: Commitment | None = None
        self.field_value: mpz | None = None
        self.dirty = True


class EntryKind(IntEnum):
    ABSENT_EMPTY = 0  # the walk hit an empty slot
    PRESENT = 1
    ABSENT_OTHER = 2  # the walk hit a leaf carrying a different key


@dataclass(frozen=True)
class WitnessEntry:
    """Per-key claim: value or absence, plus the number of parent-child
    openings on the access path and (for ABSENT_OTHER) a reference into the
    witness's diverging-leaf list."""

    key: bytes
    kind: EntryKind
    depth: int
    value: bytes | None = None
    other_index: int | None = None


@dataclass(frozen=True)
class VerkleWitness:
    entries: tuple[WitnessEntry, ...]
    other_leaves: tuple[tuple[bytes, bytes], ...]
    path_commitments: tuple[Commitment, ...]  # sorted by tree path, root excluded
    multiproof: MultiProof


class VerkleTree:
    """In-memory tree; witness generation and verification are read-only
    over a clean tree, mutation requires exclusive access."""

    def __init__(self, key: CommitmentKey | None = None):
        self.key = key or default_key()
        self.root = _Internal()
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def insert(self, key: bytes, value: bytes) -> None:
        """Set key to value, overwriting any previous value."""
        _check_kv(key, value)
        node = self.root
        depth = 0
        while True:
            node.dirty = True
            idx = key[depth]
            child = node.children.get(idx)
            if child is None:
                node.children[idx] = _Leaf(key, value)
                self._size += 1
                return
            if isinstance(child, _Leaf):
                if child.key == key:
                    child.value = value
                    return
                # split: push the old leaf down to the divergence byte
                d = depth + 1
                inner = _Internal()
                node.children[idx] = inner
                while child.key[d] == key[d]:
                    nxt = _Internal()
                    inner.children[key[d]] = nxt
                    inner = nxt
                    d += 1
                inner.children[key[d]] = _Leaf(key, value)
                inner.children[child.key[d]] = child
                self._size += 1
                return
            node = child
            depth += 1

    def get(self, key: bytes) -> bytes | None:
        _check_kv(key, None)
        node = self.root
        depth = 0
        while isinstance(node, _Internal):
            child = node.children.get(key[depth])
            if child is None:
                return None
            if isinstance(child, _Leaf):
                return child.value if child.key == key else None
            node = child
            depth += 1
        return None

    # -- commitments

    def _slot_value(self, child: "_Internal | _Leaf") -> mpz:
        if isinstance(child, _Leaf):
            return leaf_to_field(child.key, child.value)
        return child.field_value

    def _recompute(self, node: _Internal) -> None:
        for child in node.children.values():
            if isinstance(child, _Internal) and child.dirty:
                self._recompute(child)
        bases = self.key.bases
        point = _msm_raw(
            (self._slot_value(child), bases[idx]._v)
            for idx, child in node.children.items()
        )
        node.commitment = Commitment(GroupElement._raw(point))
        node.field_value = map_to_field(node.commitment)
        node.dirty = False

    def root_commitment(self) -> Commitment:
        """Recompute all dirty node commitments bottom-up and return the
        root.  The empty tree commits to the all-zero vector."""
        if self.root.dirty:
            self._recompute(self.root)
        return self.root.commitment

    # -- witnesses

    def _node_polynomial(self, node: _Internal) -> Polynomial:
        evals = [mpz(0)] * ARITY
        for idx, child in node.children.items():
            evals[idx] = self._slot_value(child)
        return Polynomial(self.key.domain, evals)

    def make_witness(self, keys: list[bytes]) -> VerkleWitness:
        """Witness proving, for each key, its value or its absence.  Covers
        every parent-child hop on every access path with one aggregated
        multiproof.  Cleans the tree first if needed."""
        self.root_commitment()

        entries: list[WitnessEntry] = []
        other_leaves: list[tuple[bytes, bytes]] = []
        other_index: dict[bytes, int] = {}
        # (prefix, slot) -> (node, slot value); nodes by prefix for commitments
        openings: dict[tuple[bytes, int], tuple[_Internal, mpz]] = {}
        nodes_by_prefix: dict[bytes, _Internal] = {}

        for key in keys:
            _check_kv(key, None)
            node = self.root
            depth = 0
            while True:
                prefix = key[:depth]
                nodes_by_prefix[prefix] = node
                idx = key[depth]
                child = node.children.get(idx)
                if child is None:
                    openings[(prefix, idx)] = (node, mpz(0))
                    entries.append(WitnessEntry(key, EntryKind.ABSENT_EMPTY, depth + 1))
                    break
                if isinstance(child, _Leaf):
                    openings[(prefix, idx)] = (node, leaf_to_field(child.key, child.value))
                    if child.key == key:
                        entries.append(
                            WitnessEntry(key, EntryKind.PRESENT, depth + 1, value=child.value)
                        )
                    else:
                        ref = other_index.get(child.key)
                        if ref is None:
                            ref = len(other_leaves)
                            other_index[child.key] = ref
                            other_leaves.append((child.key, child.value))
                        entries.append(
                            WitnessEntry(key, EntryKind.ABSENT_OTHER, depth + 1, other_index=ref)
                        )
                    break
                openings[(prefix, idx)] = (node, child.field_value)
                node = child
                depth += 1

        sorted_prefixes = sorted(p for p in nodes_by_prefix if p != b"")
        path_commitments = tuple(nodes_by_prefix[p].commitment for p in sorted_prefixes)

        transcript = Transcript(b"verkle-witness")
        transcript.absorb_point(b"root", self.root.commitment.point)
        for com in path_commitments:
            transcript.absorb_point(b"path-commitment", com.point)

        poly_cache: dict[int, Polynomial] = {}
        opening_list = []
        for (prefix, idx), (node, y) in sorted(openings.items()):
            poly = poly_cache.get(id(node))
            if poly is None:
                poly = self._node_polynomial(node)
                poly_cache[id(node)] = poly
            opening_list.append((poly, self.key.domain_point(idx), FieldElement._raw(y)))

        proof = multiprove(self.key, opening_list, transcript)
        return VerkleWitness(tuple(entries), tuple(other_leaves), path_commitments, proof)


def _check_kv(key: bytes, value: bytes | None) -> None:
    if len(key) != KEY_BYTES:
        raise ValueError(f"key must be {KEY_BYTES} bytes, got {len(key)}")
    if value is not None and len(value) != VALUE_BYTES:
        raise ValueError(f"value must be {VALUE_BYTES} bytes, got {len(value)}")


def verify_witness(
    root: Commitment,
    keys: list[bytes],
    witness: VerkleWitness,
    key: CommitmentKey | None = None,
) -> dict[bytes, bytes | None] | None:
    """Check a witness against the root commitment, holding nothing else.

    Returns the key -> value-or-None map on acceptance, None on
    cryptographic rejection; raises WitnessStructureError when the witness
    shape itself is malformed (wrong counts, bad depths, dangling
    references).  Internally inconsistent slot claims count as rejection.
    """
    ck = key or default_key()
    entries = witness.entries
    if len(entries) != len(keys):
        raise WitnessStructureError(
            f"witness has {len(entries)} entries for {len(keys)} keys"
        )

    required_prefixes: set[bytes] = set()
    terminal: dict[tuple[bytes, int], mpz] = {}
    internal_hops: set[tuple[bytes, int]] = set()
    results: dict[bytes, bytes | None] = {}

    for query_key, entry in zip(keys, entries):
        _check_kv(query_key, None)
        if entry.key != query_key:
            raise WitnessStructureError("witness entry order does not match queried keys")
        if not 1 <= entry.depth <= MAX_DEPTH:
            raise WitnessStructureError(f"entry depth {entry.depth} out of range")
        if entry.kind == EntryKind.PRESENT:
            if entry.value is None or len(entry.value) != VALUE_BYTES:
                raise WitnessStructureError("present entry must carry a 32-byte value")
            if entry.other_index is not None:
                raise WitnessStructureError("present entry cannot reference another leaf")
            slot_value = leaf_to_field(query_key, entry.value)
            results[query_key] = entry.value
        elif entry.kind == EntryKind.ABSENT_EMPTY:
            if entry.value is not None or entry.other_index is not None:
                raise WitnessStructureError("absent-empty entry carries stray fields")
            slot_value = mpz(0)
            results[query_key] = None
        elif entry.kind == EntryKind.ABSENT_OTHER:
            if entry.value is not None:
                raise WitnessStructureError("absent-other entry carries stray fields")
            if entry.other_index is None or not 0 <= entry.other_index < len(witness.other_leaves):
                raise WitnessStructureError("absent-other entry has a dangling leaf reference")
            other_key, other_value = witness.other_leaves[entry.other_index]
            if len(other_key) != KEY_BYTES or len(other_value) != VALUE_BYTES:
                raise WitnessStructureError("diverging leaf is malformed")
            if other_key == query_key or other_key[: entry.depth] != query_key[: entry.depth]:
                # the revealed leaf must occupy the exact slot the queried
                # key descends into, under a different full key
                return None
            slot_value = leaf_to_field(other_key, other_value)
            results[query_key] = None
        else:
            raise WitnessStructureError(f"unknown entry kind {entry.kind}")

        d = entry.depth
        hop_key = (query_key[: d - 1], query_key[d - 1])
        if hop_key in terminal and terminal[hop_key] != slot_value:
            return None
        terminal[hop_key] = slot_value
        for j in range(d - 1):
            internal_hops.add((query_key[:j], query_key[j]))
            required_prefixes.add(query_key[: j + 1])

    sorted_prefixes = sorted(required_prefixes)
    if len(sorted_prefixes) != len(witness.path_commitments):
        raise WitnessStructureError(
            f"witness carries {len(witness.path_commitments)} commitments, "
            f"paths require {len(sorted_prefixes)}"
        )
    commitment_at = dict(zip(sorted_prefixes, witness.path_commitments))
    commitment_at[b""] = root

    # a terminal claim and an internal hop can target the same slot only if
    # the tree literally had both, which is impossible
    openings: dict[tuple[bytes, int], mpz] = dict(terminal)
    for prefix, idx in internal_hops:
        child_com = commitment_at.get(prefix + bytes([idx]))
        if child_com is None:
            raise WitnessStructureError("internal hop targets a missing commitment")
        y = map_to_field(child_com)
        existing = openings.get((prefix, idx))
        if existing is not None and existing != y:
            return None
        openings[(prefix, idx)] = y

    transcript = Transcript(b"verkle-witness")
    transcript.absorb_point(b"root", root.point)
    for com in witness.path_commitments:
        transcript.absorb_point(b"path-commitment", com.point)

    coms = []
    points = []
    for (prefix, idx), y in sorted(openings.items()):
        com = commitment_at.get(prefix)
        if com is None:
            raise WitnessStructureError("opening references a missing commitment")
        coms.append(com)
        points.append((ck.domain_point(idx), FieldElement._raw(y)))

    if not verify_multiproof(ck, coms, points, witness.multiproof, transcript):
        return None
    return results


# ---------------------------------------------------------------------------
# serialization and sizing

_KIND_HAS_VALUE = {EntryKind.PRESENT}
_KIND_HAS_REF = {EntryKind.ABSENT_OTHER}


def serialize_witness(witness: VerkleWitness) -> bytes:
    """Layout: u32 entry count, then per entry key(32) kind(1) depth(1)
    [value(32)] [u32 other-ref]; u32 diverging-leaf count, each key(32)
    value(32); u32 commitment count, each 48 bytes in path order; u32
    multiproof length, multiproof bytes."""
    out = bytearray()
    out += struct.pack("<I", len(witness.entries))
    for e in witness.entries:
        out += e.key
        out += bytes([int(e.kind), e.depth])
        if e.kind in _KIND_HAS_VALUE:
            out += e.value
        if e.kind in _KIND_HAS_REF:
            out += struct.pack("<I", e.other_index)
    out += struct.pack("<I", len(witness.other_leaves))
    for other_key, other_value in witness.other_leaves:
        out += other_key
        out += other_value
    out += struct.pack("<I", len(witness.path_commitments))
    for com in witness.path_commitments:
        out += com.serialize()
    mp = witness.multiproof.serialize()
    out += struct.pack("<I", len(mp))
    out += mp
    return bytes(out)


def parse_witness(data: bytes) -> VerkleWitness:
    try:
        off = 0

        def take(n: int) -> bytes:
            nonlocal off
            if off + n > len(data):
                raise WitnessStructureError("witness bytes truncated")
            chunk = data[off : off + n]
            off += n
            return chunk

        def u32() -> int:
            return struct.unpack("<I", take(4))[0]

        entries = []
        for _ in range(u32()):
            ekey = take(KEY_BYTES)
            kind_b, depth = take(2)
            try:
                kind = EntryKind(kind_b)
            except ValueError:
                raise WitnessStructureError(f"unknown entry kind byte {kind_b}")
            value = take(VALUE_BYTES) if kind in _KIND_HAS_VALUE else None
            ref = u32() if kind in _KIND_HAS_REF else None
            entries.append(WitnessEntry(ekey, kind, depth, value=value, other_index=ref))
        others = tuple(
            (take(KEY_BYTES), take(VALUE_BYTES)) for _ in range(u32())
        )
        coms = tuple(Commitment.deserialize(take(48)) for _ in range(u32()))
        proof = MultiProof.deserialize(take(u32()))
        if off != len(data):
            raise WitnessStructureError("trailing bytes after witness")
        return VerkleWitness(tuple(entries), others, coms, proof)
    except SerializationError as exc:
        raise WitnessStructureError(str(exc)) from exc


@dataclass(frozen=True)
class WitnessSizeBreakdown:
    """Mirrors the three witness components (leaf data, commitments,
    multiproof); framing covers counts and per-entry metadata so the four
    parts sum to the exact serialized length."""

    total: int
    leaf_bytes: int
    commitment_bytes: int
    multiproof_bytes: int
    framing_bytes: int


def witness_size_breakdown(witness: VerkleWitness) -> WitnessSizeBreakdown:
    total = len(serialize_witness(witness))
    leaf = 0
    for e in witness.entries:
        leaf += KEY_BYTES + (VALUE_BYTES if e.kind in _KIND_HAS_VALUE else 0)
    leaf += (KEY_BYTES + VALUE_BYTES) * len(witness.other_leaves)
    commitments = 48 * len(witness.path_commitments)
    multiproof = len(witness.multiproof.serialize())
    framing = total - leaf - commitments - multiproof
    return WitnessSizeBreakdown(total, leaf, commitments, multiproof, framing)


def witness_size_bytes(witness: VerkleWitness) -> int:
    """Exact serialized witness length."""
    return len(serialize_witness(witness))

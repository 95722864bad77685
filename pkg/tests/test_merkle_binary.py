import hashlib
import random

import pytest

from witnessbench.algebra import FIELD_MODULUS, FieldElement
from witnessbench.merkle_binary import (
    DEFAULT_HASH_SEED,
    FULL_ROUNDS,
    PARTIAL_ROUNDS,
    WIDTH,
    AlgebraicHash,
    BinaryTree,
    MerkleBranch,
    default_hash,
    hash2,
    naive_witness_size,
    verify_branch,
)


# ---------------------------------------------------------------------------
# independent reference evaluation of the permutation


def _ref_expand(label, data):
    h0 = hashlib.sha256(b"\x00" + len(label).to_bytes(1, "little") + label + data).digest()
    h1 = hashlib.sha256(b"\x01" + len(label).to_bytes(1, "little") + label + data).digest()
    return int.from_bytes(h0 + h1, "little") % FIELD_MODULUS


def reference_hash2(a, b, seed=DEFAULT_HASH_SEED):
    """Straight-line re-implementation: re-derives every constant from the
    seed with hashlib and applies the rounds with pow(), sharing no code
    with the library implementation."""
    q = FIELD_MODULUS
    rc = [
        [
            _ref_expand(b"perm-rc", seed + r.to_bytes(4, "little") + s.to_bytes(4, "little"))
            for s in range(WIDTH)
        ]
        for r in range(FULL_ROUNDS + PARTIAL_ROUNDS)
    ]
    mds = [
        [pow(i + WIDTH + j + 1, q - 2, q) for j in range(WIDTH)]
        for i in range(WIDTH)
    ]
    iv = _ref_expand(b"perm-iv", seed)
    state = [a % q, b % q, iv]
    half = FULL_ROUNDS // 2
    for r in range(FULL_ROUNDS + PARTIAL_ROUNDS):
        state = [(s + c) % q for s, c in zip(state, rc[r])]
        if half <= r < half + PARTIAL_ROUNDS:
            state[0] = pow(state[0], 5, q)
        else:
            state = [pow(s, 5, q) for s in state]
        state = [
            sum(mds[i][j] * state[j] for j in range(WIDTH)) % q
            for i in range(WIDTH)
        ]
    return state[0]


def test_hash2_fixed_vector_matches_reference():
    expected = reference_hash2(0, 0)
    got = hash2(FieldElement(0), FieldElement(0))
    assert got.value == expected


def test_hash2_matches_reference_on_random_inputs():
    rng = random.Random(1)
    h = default_hash()
    for _ in range(10):
        a, b = rng.randrange(FIELD_MODULUS), rng.randrange(FIELD_MODULUS)
        assert h.hash2(FieldElement(a), FieldElement(b)).value == reference_hash2(a, b)


def test_hash2_deterministic():
    a, b = FieldElement(123), FieldElement(456)
    assert hash2(a, b) == hash2(a, b)


def test_hash2_asymmetric():
    rng = random.Random(2)
    for _ in range(20):
        a = FieldElement(rng.randrange(FIELD_MODULUS))
        b = FieldElement(rng.randrange(FIELD_MODULUS))
        if a != b:
            assert hash2(a, b) != hash2(b, a)


def test_hash_parameters_seed_derived():
    h1 = AlgebraicHash(b"seed-x")
    h2 = AlgebraicHash(b"seed-x")
    h3 = AlgebraicHash(b"seed-y")
    assert h1.round_constants == h2.round_constants
    assert h1.capacity_iv == h2.capacity_iv
    assert h1.round_constants != h3.round_constants
    a, b = FieldElement(1), FieldElement(2)
    assert h1.hash2(a, b) == h2.hash2(a, b)
    assert h1.hash2(a, b) != h3.hash2(a, b)


# ---------------------------------------------------------------------------
# tree


def dense_root(leaves, depth, h):
    """Dense bottom-up recomputation over all 2^depth positions."""
    level = [leaves.get(i, FieldElement(0)) for i in range(1 << depth)]
    while len(level) > 1:
        level = [h.hash2(level[i], level[i + 1]) for i in range(0, len(level), 2)]
    return level[0]


def test_depth1_root_is_hash_of_leaves():
    t = BinaryTree(1)
    l0, l1 = FieldElement(7), FieldElement(9)
    t.set_leaf(0, l0)
    t.set_leaf(1, l1)
    assert t.root() == hash2(l0, l1)


def test_sparse_matches_dense_oracle():
    rng = random.Random(3)
    h = default_hash()
    for depth in (1, 2, 4, 8):
        for _ in range(8):
            t = BinaryTree(depth)
            count = rng.randrange(1 << depth)
            leaves = {}
            for _ in range(count):
                i = rng.randrange(1 << depth)
                v = FieldElement(rng.randrange(FIELD_MODULUS))
                leaves[i] = v
                t.set_leaf(i, v)
            assert t.root() == dense_root(leaves, depth, h)


def test_single_leaf_sparse_matches_dense():
    h = default_hash()
    t = BinaryTree(8)
    v = FieldElement(42)
    t.set_leaf(200, v)
    assert t.root() == dense_root({200: v}, 8, h)


def test_empty_tree_root_is_default_chain():
    h = default_hash()
    t = BinaryTree(6)
    assert t.root() == dense_root({}, 6, h)


def test_root_changes_when_any_leaf_changes():
    rng = random.Random(4)
    t = BinaryTree(5)
    for i in range(1 << 5):
        t.set_leaf(i, FieldElement(rng.randrange(FIELD_MODULUS)))
    base = t.root()
    for i in (0, 13, 31):
        old = t.leaf(i)
        t.set_leaf(i, old + FieldElement(1))
        assert t.root() != base
        t.set_leaf(i, old)
        assert t.root() == base


def test_set_leaf_out_of_range_rejected():
    t = BinaryTree(4)
    with pytest.raises(IndexError):
        t.set_leaf(16, FieldElement(1))
    with pytest.raises(IndexError):
        t.set_leaf(-1, FieldElement(1))
    with pytest.raises(IndexError):
        t.branch(16)


def test_tree_depth_bounds():
    with pytest.raises(ValueError):
        BinaryTree(0)
    with pytest.raises(ValueError):
        BinaryTree(33)


# ---------------------------------------------------------------------------
# branches


def populated_tree(rng, depth, fill=None):
    t = BinaryTree(depth)
    n = fill if fill is not None else (1 << depth)
    for i in rng.sample(range(1 << depth), min(n, 1 << depth)):
        t.set_leaf(i, FieldElement(rng.randrange(FIELD_MODULUS)))
    return t


def test_branch_roundtrip():
    rng = random.Random(5)
    for depth in (1, 3, 8):
        t = populated_tree(rng, depth)
        root = t.root()
        for index in rng.sample(range(1 << depth), min(8, 1 << depth)):
            br = t.branch(index)
            assert br.depth == depth
            assert verify_branch(root, br)


def test_branch_for_absent_leaf_verifies():
    rng = random.Random(6)
    t = populated_tree(rng, 6, fill=10)
    root = t.root()
    absent = next(i for i in range(64) if i not in t.leaves)
    br = t.branch(absent)
    assert br.leaf == FieldElement(0)
    assert verify_branch(root, br)


def test_branch_mutation_soundness_bulk():
    # fully populated trees: with distinct random leaves, sibling/leaf
    # coincidences that would make a mutated branch legitimately valid
    # (e.g. swapping two equal children) have negligible probability
    rng = random.Random(7)
    rejected = 0
    for _ in range(25):
        depth = rng.choice((2, 4, 8))
        t = populated_tree(rng, depth)
        root = t.root()
        index = rng.randrange(1 << depth)
        br = t.branch(index)
        assert verify_branch(root, br)
        for _ in range(20):
            choice = rng.randrange(3)
            if choice == 0:  # perturb one sibling
                k = rng.randrange(depth)
                sibs = list(br.siblings)
                sibs[k] = sibs[k] + FieldElement(1 + rng.randrange(100))
                bad = MerkleBranch(br.index, br.leaf, tuple(sibs))
            elif choice == 1:  # flip an index bit
                bad = MerkleBranch(br.index ^ (1 << rng.randrange(depth)), br.leaf, br.siblings)
            else:  # perturb the leaf
                bad = MerkleBranch(br.index, br.leaf + FieldElement(1), br.siblings)
            if bad.index == br.index and bad.leaf == br.leaf and bad.siblings == br.siblings:
                continue
            assert not verify_branch(root, bad)
            rejected += 1
    assert rejected >= 500


def test_branch_wrong_sibling_count_structural():
    rng = random.Random(8)
    t = populated_tree(rng, 4)
    root = t.root()
    br = t.branch(3)
    with pytest.raises(ValueError):
        verify_branch(root, br, depth=5)
    short = MerkleBranch(br.index, br.leaf, br.siblings[:-1])
    with pytest.raises(ValueError):
        verify_branch(root, short, depth=4)


def test_branch_serialization_layout():
    rng = random.Random(9)
    t = populated_tree(rng, 3)
    t.root()
    br = t.branch(5)
    data = br.serialize()
    assert len(data) == 8 + 32 + 3 * 32
    assert data[:8] == (5).to_bytes(8, "little")
    restored = MerkleBranch.deserialize(data)
    assert restored == br
    with pytest.raises(ValueError):
        MerkleBranch.deserialize(data[:-1])


# ---------------------------------------------------------------------------
# naive witness size


def count_siblings_directly(arity, leaf_count):
    """Walk a conceptual arity-k tree from a leaf to the root, counting the
    siblings revealed at each level."""
    levels = 0
    size = 1
    while size < leaf_count:
        size *= arity
        levels += 1
    return levels * (arity - 1)


def test_naive_size_matches_direct_count_small_trees():
    for arity in (2, 4, 16):
        for leaf_count in range(1, 257):
            expected = count_siblings_directly(arity, leaf_count) * 32 * 3
            assert naive_witness_size(3, 32, arity, leaf_count) == expected


def test_naive_size_binary_depth20():
    # one key, 32-byte nodes, binary tree of 2^20 leaves: 20 siblings
    assert naive_witness_size(1, 32, 2, 2**20) == 640


def test_naive_size_single_leaf_is_zero():
    assert naive_witness_size(1, 32, 2, 1) == 0
    assert naive_witness_size(5000, 32, 16, 1) == 0


def test_naive_size_hexary_tens_of_megabytes():
    size = naive_witness_size(5000, 32, 16, 2**28)
    assert 10_000_000 <= size < 100_000_000


def test_naive_size_monotone_and_linear_shape():
    base = naive_witness_size(10, 32, 2, 2**10)
    assert naive_witness_size(20, 32, 2, 2**10) == 2 * base
    assert naive_witness_size(10, 64, 2, 2**10) == 2 * base
    assert naive_witness_size(10, 32, 2, 2**20) == 2 * base
    # linear in (k-1) * ceil(log_k N) across arities
    for arity in (2, 4, 16, 256):
        levels = count_siblings_directly(arity, 2**16) // (arity - 1)
        assert naive_witness_size(7, 32, arity, 2**16) == 7 * 32 * (arity - 1) * levels


def test_naive_size_invalid_parameters():
    with pytest.raises(ValueError):
        naive_witness_size(1, 32, 1, 16)
    with pytest.raises(ValueError):
        naive_witness_size(1, 32, 2, 0)
    with pytest.raises(ValueError):
        naive_witness_size(-1, 32, 2, 16)
    with pytest.raises(ValueError):
        naive_witness_size(1, 0, 2, 16)

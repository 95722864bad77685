import random

import pytest

from gmpy2 import mpz

from witnessbench.algebra import FIELD_MODULUS, FieldElement
from witnessbench.circuit import (
    Assignment,
    ConstraintSystem,
    assign_branch,
    build_branch_circuit,
    is_satisfied,
)
from witnessbench.merkle_binary import BinaryTree, MerkleBranch, hash2, verify_branch


def random_tree(rng, depth):
    t = BinaryTree(depth)
    for i in range(1 << depth):
        t.set_leaf(i, FieldElement(rng.randrange(FIELD_MODULUS)))
    return t


def circuit_accepts(cs, branch, root):
    return is_satisfied(cs, assign_branch(cs, branch, root))


# ---------------------------------------------------------------------------
# is_satisfied basics


def test_empty_circuit_accepts():
    cs = ConstraintSystem(
        num_vars=1, public_count=1, depth=0,
        constraints=(), input_vars=(), product_defs=(),
    )
    assert is_satisfied(cs, Assignment((mpz(1),)))


def test_single_idempotent_constraint():
    # x*x = x accepts x=1, rejects x=2
    lc_x = ((1, mpz(1)),)
    cs = ConstraintSystem(
        num_vars=2, public_count=2, depth=0,
        constraints=((lc_x, lc_x, lc_x),), input_vars=(), product_defs=(),
    )
    assert is_satisfied(cs, Assignment((mpz(1), mpz(1))))
    assert not is_satisfied(cs, Assignment((mpz(1), mpz(2))))


def test_is_satisfied_length_mismatch():
    cs = build_branch_circuit(1)
    with pytest.raises(ValueError):
        is_satisfied(cs, Assignment((mpz(1),)))


# ---------------------------------------------------------------------------
# branch circuits


def test_depth1_circuit_exhaustive_against_hash_oracle():
    rng = random.Random(1)
    cs = build_branch_circuit(1)
    leaf = FieldElement(rng.randrange(FIELD_MODULUS))
    sib = FieldElement(rng.randrange(FIELD_MODULUS))
    for index in (0, 1):
        root = hash2(leaf, sib) if index == 0 else hash2(sib, leaf)
        br = MerkleBranch(index, leaf, (sib,))
        assert circuit_accepts(cs, br, root)
        assert not circuit_accepts(cs, br, root + FieldElement(1))
        # index bit also flips the hash order
        wrong = MerkleBranch(index ^ 1, leaf, (sib,))
        assert not circuit_accepts(cs, wrong, root)


def test_depth1_exhaustive_over_small_value_sample():
    """Every (leaf, sibling, index, candidate-root) combination drawn from a
    four-value sample: satisfiable exactly when the root is the true hash."""
    cs = build_branch_circuit(1)
    sample = [FieldElement(0), FieldElement(1), FieldElement(2), FieldElement(FIELD_MODULUS - 1)]
    for leaf in sample:
        for sib in sample:
            for index in (0, 1):
                true_root = hash2(leaf, sib) if index == 0 else hash2(sib, leaf)
                br = MerkleBranch(index, leaf, (sib,))
                for candidate in sample + [true_root]:
                    assert circuit_accepts(cs, br, candidate) == (candidate == true_root)


def test_booleanity_rejects_non_bit():
    cs = build_branch_circuit(1)
    rng = random.Random(2)
    t = random_tree(rng, 1)
    root = t.root()
    br = t.branch(0)
    asg = assign_branch(cs, br, root)
    assert is_satisfied(cs, asg)
    values = list(asg.values)
    values[3] = mpz(2)  # the single index-bit variable
    assert not is_satisfied(cs, Assignment(tuple(values)))


def test_constraint_count_linear_in_depth():
    counts = {d: len(build_branch_circuit(d).constraints) for d in (1, 2, 4, 8)}
    per_level = counts[2] - counts[1]
    for d in (1, 2, 4, 8):
        assert counts[d] == counts[1] + (d - 1) * per_level


def test_assign_branch_depth_mismatch():
    cs = build_branch_circuit(2)
    rng = random.Random(3)
    t = random_tree(rng, 3)
    t.root()
    with pytest.raises(ValueError):
        assign_branch(cs, t.branch(0), t.root())


def test_semantic_equivalence_random_instances():
    """Satisfaction of the assigned circuit must coincide with the plain
    branch verifier on honest and corrupted instances (full 500-case run
    lives in the acceptance suite)."""
    rng = random.Random(4)
    circuits = {d: build_branch_circuit(d) for d in (1, 2, 4)}
    trees = {d: random_tree(rng, d) for d in circuits}
    checked = 0
    for _ in range(40):
        d = rng.choice(list(circuits))
        cs, t = circuits[d], trees[d]
        root = t.root()
        index = rng.randrange(1 << d)
        br = t.branch(index)
        case = rng.randrange(4)
        if case == 1:  # corrupt a sibling
            sibs = list(br.siblings)
            k = rng.randrange(d)
            sibs[k] = sibs[k] + FieldElement(rng.randrange(1, 1000))
            br = MerkleBranch(br.index, br.leaf, tuple(sibs))
        elif case == 2:  # corrupt the root
            root = root + FieldElement(rng.randrange(1, 1000))
        elif case == 3:  # corrupt the leaf
            br = MerkleBranch(br.index, br.leaf + FieldElement(1), br.siblings)
        assert circuit_accepts(cs, br, root) == verify_branch(root, br)
        checked += 1
    assert checked == 40


def test_public_prefix_layout():
    cs = build_branch_circuit(3)
    assert cs.public_count == 6  # one, root, leaf, 3 bits
    rng = random.Random(5)
    t = random_tree(rng, 3)
    root = t.root()
    br = t.branch(5)
    asg = assign_branch(cs, br, root)
    assert asg.values[0] == 1
    assert asg.values[1] == root.value
    assert asg.values[2] == br.leaf.value
    assert [int(v) for v in asg.values[3:6]] == [1, 0, 1]  # 5 = 0b101, bottom-up


def test_circuit_determinism_and_serialization():
    a = build_branch_circuit(4)
    b = build_branch_circuit(4)
    assert a.constraints == b.constraints
    assert a.serialize() == b.serialize()
    assert a.digest() == b.digest()
    assert a.digest() != build_branch_circuit(5).digest()


def test_circuit_digest_stable_across_runs():
    # frozen pins: any change to the gadget layout or hash parameters is a
    # deliberate, visible event
    assert build_branch_circuit(1).digest() == (
        "e83fd1149d8bc1dae4bbd64a0ab508330a32aaa80f0c79685317b13177f9772a"
    )
    assert build_branch_circuit(4).digest() == (
        "09147f01ae070e28200462afa3183e8bed8cedde4bfaa38d8f496d41b3d0be01"
    )


def test_sibling_inputs_are_private():
    cs = build_branch_circuit(2)
    assert all(v >= cs.public_count for v in cs.input_vars)
    assert len(cs.input_vars) == 2

"""Analytic witness-size estimators for the three designs, used to
cross-check measured sizes.

Defaults follow the published accounting: 32-byte keys/values, 48-byte
commitments, a 200-byte constant multiproof, 192-byte constant branch
proofs, and a leading factor of two for proving state both before and
after execution (a boolean here, so single-snapshot sizes are also
reportable).  The 200- and 192-byte figures are size *targets* carried for
comparison: the transparent argument this artifact ships is constant-size
but larger (881-byte multiproof, circuit-dependent branch proofs), and the
harness reports both modeled and measured numbers side by side.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .merkle_binary import naive_witness_size

__all__ = ["SCHEMES", "SizeModel", "SizeEstimate", "estimate"]

VERKLE = "verkle"
NAIVE_MERKLE = "naive-merkle"
SNARK_MERKLE = "snark-merkle"
SCHEMES = (VERKLE, NAIVE_MERKLE, SNARK_MERKLE)


@dataclass(frozen=True)
class SizeModel:
    """Scheme tag plus the parameters its formula consumes.

    keys:             proven keys per snapshot (K)
    leaf_bytes:       bytes per counted leaf item (also the naive node size B)
    commitment_bytes: bytes per intermediate commitment
    multiproof_bytes: modeled constant multiproof size
    proof_bytes:      modeled constant per-branch proof size
    arity:            tree arity (naive formula)
    leaf_count:       tree leaf count N (naive formula)
    commitment_count: intermediate commitments C in the witness (verkle)
    pre_post:         count state both before and after execution
    """

    scheme: str
    keys: int
    leaf_bytes: int = 32
    commitment_bytes: int = 48
    multiproof_bytes: int = 200
    proof_bytes: int = 192
    arity: int = 16
    leaf_count: int = 2**32
    commitment_count: int = 10_000
    pre_post: bool = True


@dataclass(frozen=True)
class SizeEstimate:
    total: int
    breakdown: dict[str, int] = field(compare=False)


def estimate(model: SizeModel) -> SizeEstimate:
    """Total witness bytes and the per-component decomposition (components
    always sum exactly to the total)."""
    if model.scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {model.scheme!r}; choose from {SCHEMES}")
    if model.keys < 0:
        raise ValueError("keys must be non-negative")
    for name in ("leaf_bytes", "commitment_bytes", "multiproof_bytes", "proof_bytes"):
        if getattr(model, name) <= 0:
            raise ValueError(f"{name} must be strictly positive")
    if model.commitment_count < 0:
        raise ValueError("commitment_count must be non-negative")
    snapshots = 2 if model.pre_post else 1

    if model.scheme == VERKLE:
        leaves = snapshots * model.keys * model.leaf_bytes
        commitments = model.commitment_count * model.commitment_bytes
        breakdown = {
            "leaves": leaves,
            "commitments": commitments,
            "multiproof": model.multiproof_bytes,
        }
    elif model.scheme == SNARK_MERKLE:
        proofs = snapshots * model.keys * model.proof_bytes
        leaves = snapshots * model.keys * 2 * model.leaf_bytes  # key and value
        breakdown = {"proofs": proofs, "leaves": leaves}
    else:  # naive-merkle
        siblings = snapshots * naive_witness_size(
            model.keys, model.leaf_bytes, model.arity, model.leaf_count
        )
        breakdown = {"siblings": siblings}

    return SizeEstimate(sum(breakdown.values()), breakdown)


def single_snapshot(model: SizeModel) -> SizeModel:
    """Same model with the pre/post doubling turned off."""
    return replace(model, pre_post=False)

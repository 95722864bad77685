"""Witness schemes for stateless block verification: an arity-256 Verkle
tree with aggregated vector-commitment multiproofs, a binary Merkle tree
whose branches can be proven by a transparent succinct argument, analytic
witness-size models, and a benchmark harness comparing the designs."""

__version__ = "0.1.0"

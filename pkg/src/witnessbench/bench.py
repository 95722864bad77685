"""Benchmark harness: tree-size sweep with a fixed key budget, repeated
runs, and CSV/JSON emission.

Methodology: leaf counts start at 2^5 and cover every power of two through
2^13, then every second power from 2^14 up to the configured cap.  The key
budget defaults to 5,000 keys per tree; trees with fewer leaves prove all
of them.  Metrics are averaged over (default) ten runs; each repetition
redraws its proven-key subset from the seed stream, while the tree itself
is built once per size and excluded from the timings.  Witness generation
and verification are timed with a monotonic clock around the pure
prove/verify calls only.

Every generated witness is verified inside the harness; a verification
failure aborts with a diagnostic rather than producing a meaningless row.
When a single repetition exceeds the time budget, or the process exceeds
the memory budget, the harness emits a partial record marked "timeout" or
"memory" and abandons the rest of that sweep, mirroring how measurement
campaigns abort once per-run costs become impractical.

Determinism: with a fixed seed, everything except wall-clock timings,
peak-RSS, and the timestamp is byte-identical across runs (see
TIMING_COLUMNS).  Repetitions may run concurrently (--parallel); the
default is off so single-threaded numbers are primary, and note that under
CPython concurrency overlapping repetitions contend for the interpreter
lock, so parallel timings measure throughput, not latency.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import random
import resource
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .algebra import FIELD_MODULUS, FieldElement
from .merkle_binary import BinaryTree, verify_branch
from .proof_backend import batch_prove, encode_public_inputs, get_backend
from .circuit import build_branch_circuit
from .sizing import NAIVE_MERKLE, SNARK_MERKLE, VERKLE, SizeModel, estimate
from .verkle import VerkleTree, verify_witness, witness_size_bytes

__all__ = [
    "CLI_SCHEMES",
    "BenchConfig",
    "BenchRecord",
    "BenchError",
    "run",
    "emit",
    "load",
    "CSV_COLUMNS",
    "TIMING_COLUMNS",
]

CLI_SCHEMES = ("verkle", "merkle-naive", "merkle-snark")

_STATUS_OK = "ok"
_STATUS_TIMEOUT = "timeout"
_STATUS_MEMORY = "memory"


class BenchError(RuntimeError):
    """A generated witness failed verification inside the harness."""


@dataclass(frozen=True)
class BenchConfig:
    scheme: str
    min_log_leaves: int = 5
    max_log_leaves: int = 16
    keys: int = 5000
    reps: int = 10
    seed: int = 2024
    time_budget_s: float | None = 300.0  # per single repetition (prove+verify)
    mem_budget_mb: int | None = 4096
    parallel: int = 1
    snark_backend: str = "ipa"

    def __post_init__(self):
        if self.scheme not in CLI_SCHEMES:
            raise ValueError(f"scheme must be one of {CLI_SCHEMES}")
        if not 1 <= self.min_log_leaves <= self.max_log_leaves <= 32:
            raise ValueError("need 1 <= min_log_leaves <= max_log_leaves <= 32")
        if self.keys < 1 or self.reps < 1 or self.parallel < 1:
            raise ValueError("keys, reps, and parallel must be at least 1")
        if not self.schedule():
            raise ValueError(
                "empty schedule: above 2^13 only every second power of two "
                "(2^14, 2^16, ...) is visited"
            )

    def schedule(self) -> list[int]:
        """Strictly increasing leaf counts: every power of two through 2^13,
        every second power from 2^14 on."""
        return [
            1 << j
            for j in range(self.min_log_leaves, self.max_log_leaves + 1)
            if j <= 13 or (j - 14) % 2 == 0
        ]


@dataclass(frozen=True)
class BenchRecord:
    scheme: str
    leaf_count: int
    keys_requested: int
    keys_proven: int
    reps_completed: int
    seed: int
    parallel: int
    status: str
    witness_bytes: tuple[int, ...]
    witness_bytes_modeled: tuple[int, ...]
    prove_ns: tuple[int, ...]
    verify_ns: tuple[int, ...]
    peak_rss_bytes: int
    timestamp_unix: int

    @staticmethod
    def _mean(values: tuple[int, ...]) -> float:
        return sum(values) / len(values) if values else 0.0


def _derive_rng(seed: int, *parts) -> random.Random:
    material = ":".join(str(p) for p in (seed, *parts)).encode()
    return random.Random(int.from_bytes(hashlib.sha256(material).digest(), "little"))


def _peak_rss_bytes() -> int:
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024


def run(config: BenchConfig) -> list[BenchRecord]:
    """Execute the sweep; one record per leaf count.  A record whose status
    is not "ok" is partial and terminates the sweep."""
    runner = {
        "verkle": _run_verkle_size,
        "merkle-naive": _run_naive_size,
        "merkle-snark": _run_snark_size,
    }[config.scheme]
    records = []
    for leaf_count in config.schedule():
        record = _run_one_size(config, leaf_count, runner)
        records.append(record)
        if record.status != _STATUS_OK:
            break
    return records


def _run_one_size(config: BenchConfig, leaf_count: int, runner) -> BenchRecord:
    keys_proven = min(config.keys, leaf_count)
    witness_bytes: list[int] = []
    modeled: list[int] = []
    prove_ns: list[int] = []
    verify_ns: list[int] = []
    status = _STATUS_OK

    try:
        rep_fn = runner(config, leaf_count, keys_proven)
        if config.parallel > 1:
            with ThreadPoolExecutor(max_workers=config.parallel) as pool:
                results = list(pool.map(rep_fn, range(config.reps)))
            for p_ns, v_ns, wb, wm in results:
                prove_ns.append(p_ns)
                verify_ns.append(v_ns)
                witness_bytes.append(wb)
                modeled.append(wm)
            if config.time_budget_s is not None and any(
                (p + v) / 1e9 > config.time_budget_s for p, v in zip(prove_ns, verify_ns)
            ):
                status = _STATUS_TIMEOUT
        else:
            for rep in range(config.reps):
                p_ns, v_ns, wb, wm = rep_fn(rep)
                prove_ns.append(p_ns)
                verify_ns.append(v_ns)
                witness_bytes.append(wb)
                modeled.append(wm)
                if (
                    config.time_budget_s is not None
                    and (p_ns + v_ns) / 1e9 > config.time_budget_s
                ):
                    status = _STATUS_TIMEOUT
                    break
                if (
                    config.mem_budget_mb is not None
                    and _peak_rss_bytes() > config.mem_budget_mb * 1024 * 1024
                ):
                    status = _STATUS_MEMORY
                    break
    except MemoryError:
        status = _STATUS_MEMORY

    return BenchRecord(
        scheme=config.scheme,
        leaf_count=leaf_count,
        keys_requested=config.keys,
        keys_proven=keys_proven,
        reps_completed=len(prove_ns),
        seed=config.seed,
        parallel=config.parallel,
        status=status,
        witness_bytes=tuple(witness_bytes),
        witness_bytes_modeled=tuple(modeled),
        prove_ns=tuple(prove_ns),
        verify_ns=tuple(verify_ns),
        peak_rss_bytes=_peak_rss_bytes(),
        timestamp_unix=int(time.time()),
    )


# ---------------------------------------------------------------------------
# per-scheme repetition factories (tree construction excluded from timing)


def _run_verkle_size(config: BenchConfig, leaf_count: int, keys_proven: int):
    rng = _derive_rng(config.seed, "verkle-build", leaf_count)
    tree = VerkleTree()
    keys = []
    for _ in range(leaf_count):
        k, v = rng.randbytes(32), rng.randbytes(32)
        tree.insert(k, v)
        keys.append(k)
    root = tree.root_commitment()

    def rep(rep_index: int):
        rep_rng = _derive_rng(config.seed, "verkle-keys", leaf_count, rep_index)
        subset = rep_rng.sample(keys, keys_proven)
        t0 = time.perf_counter_ns()
        witness = tree.make_witness(subset)
        t1 = time.perf_counter_ns()
        measured = witness_size_bytes(witness)
        model = SizeModel(
            VERKLE, keys=keys_proven, commitment_count=len(witness.path_commitments)
        )
        t2 = time.perf_counter_ns()
        result = verify_witness(root, subset, witness)
        t3 = time.perf_counter_ns()
        if result is None:
            raise BenchError(
                f"verkle witness failed verification (leaves={leaf_count}, rep={rep_index})"
            )
        return t1 - t0, t3 - t2, measured, estimate(model).total

    return rep


def _merkle_tree(config: BenchConfig, leaf_count: int) -> tuple[BinaryTree, int]:
    depth = leaf_count.bit_length() - 1
    rng = _derive_rng(config.seed, "merkle-build", leaf_count)
    tree = BinaryTree(depth)
    for i in range(leaf_count):
        tree.set_leaf(i, FieldElement(rng.randrange(FIELD_MODULUS)))
    tree.root()
    return tree, depth


def _run_naive_size(config: BenchConfig, leaf_count: int, keys_proven: int):
    tree, depth = _merkle_tree(config, leaf_count)
    root = tree.root()

    def rep(rep_index: int):
        rep_rng = _derive_rng(config.seed, "merkle-keys", leaf_count, rep_index)
        indices = rep_rng.sample(range(leaf_count), keys_proven)
        t0 = time.perf_counter_ns()
        branches = [tree.branch(i) for i in indices]
        t1 = time.perf_counter_ns()
        measured = sum(len(br.serialize()) for br in branches)
        model = SizeModel(NAIVE_MERKLE, keys=keys_proven, arity=2, leaf_count=leaf_count)
        t2 = time.perf_counter_ns()
        ok = all(verify_branch(root, br, depth=depth) for br in branches)
        t3 = time.perf_counter_ns()
        if not ok:
            raise BenchError(
                f"merkle branch failed verification (leaves={leaf_count}, rep={rep_index})"
            )
        return t1 - t0, t3 - t2, measured, estimate(model).total

    return rep


def _run_snark_size(config: BenchConfig, leaf_count: int, keys_proven: int):
    tree, depth = _merkle_tree(config, leaf_count)
    root = tree.root()
    backend = get_backend(config.snark_backend)
    circuit = build_branch_circuit(depth)
    material = backend.setup(circuit)

    def rep(rep_index: int):
        rep_rng = _derive_rng(config.seed, "merkle-keys", leaf_count, rep_index)
        indices = rep_rng.sample(range(leaf_count), keys_proven)
        branches = [tree.branch(i) for i in indices]
        t0 = time.perf_counter_ns()
        proofs = batch_prove(branches, root, backend, material)
        t1 = time.perf_counter_ns()
        measured = sum(len(p.serialize()) for p in proofs)
        model = SizeModel(SNARK_MERKLE, keys=keys_proven)
        t2 = time.perf_counter_ns()
        ok = all(
            backend.verify(material, encode_public_inputs(root, br.leaf, br.index), proof)
            for br, proof in zip(branches, proofs)
        )
        t3 = time.perf_counter_ns()
        if not ok:
            raise BenchError(
                f"branch proof failed verification (leaves={leaf_count}, rep={rep_index})"
            )
        return t1 - t0, t3 - t2, measured, estimate(model).total

    return rep


# ---------------------------------------------------------------------------
# emission

# Column order is the documented schema.  *_runs columns join per-repetition
# integers with ";"; *_mean columns are derived (ignored on load).
CSV_COLUMNS = (
    "scheme",
    "leaf_count",
    "keys_requested",
    "keys_proven",
    "reps_completed",
    "seed",
    "parallel",
    "status",
    "witness_bytes_mean",
    "witness_bytes_runs",
    "witness_bytes_modeled_mean",
    "witness_bytes_modeled_runs",
    "prove_ns_mean",
    "prove_ns_runs",
    "verify_ns_mean",
    "verify_ns_runs",
    "peak_rss_bytes",
    "timestamp_unix",
)

# Columns that legitimately differ between two runs of the same seed.
TIMING_COLUMNS = frozenset(
    {"prove_ns_mean", "prove_ns_runs", "verify_ns_mean", "verify_ns_runs",
     "peak_rss_bytes", "timestamp_unix"}
)


def _join(values: tuple[int, ...]) -> str:
    return ";".join(str(v) for v in values)


def _split(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(";")) if text else ()


def _record_row(record: BenchRecord) -> dict[str, str]:
    mean = BenchRecord._mean
    return {
        "scheme": record.scheme,
        "leaf_count": str(record.leaf_count),
        "keys_requested": str(record.keys_requested),
        "keys_proven": str(record.keys_proven),
        "reps_completed": str(record.reps_completed),
        "seed": str(record.seed),
        "parallel": str(record.parallel),
        "status": record.status,
        "witness_bytes_mean": f"{mean(record.witness_bytes):.1f}",
        "witness_bytes_runs": _join(record.witness_bytes),
        "witness_bytes_modeled_mean": f"{mean(record.witness_bytes_modeled):.1f}",
        "witness_bytes_modeled_runs": _join(record.witness_bytes_modeled),
        "prove_ns_mean": f"{mean(record.prove_ns):.1f}",
        "prove_ns_runs": _join(record.prove_ns),
        "verify_ns_mean": f"{mean(record.verify_ns):.1f}",
        "verify_ns_runs": _join(record.verify_ns),
        "peak_rss_bytes": str(record.peak_rss_bytes),
        "timestamp_unix": str(record.timestamp_unix),
    }


def _record_from_row(row: dict[str, str]) -> BenchRecord:
    return BenchRecord(
        scheme=row["scheme"],
        leaf_count=int(row["leaf_count"]),
        keys_requested=int(row["keys_requested"]),
        keys_proven=int(row["keys_proven"]),
        reps_completed=int(row["reps_completed"]),
        seed=int(row["seed"]),
        parallel=int(row["parallel"]),
        status=row["status"],
        witness_bytes=_split(row["witness_bytes_runs"]),
        witness_bytes_modeled=_split(row["witness_bytes_modeled_runs"]),
        prove_ns=_split(row["prove_ns_runs"]),
        verify_ns=_split(row["verify_ns_runs"]),
        peak_rss_bytes=int(row["peak_rss_bytes"]),
        timestamp_unix=int(row["timestamp_unix"]),
    )


def emit(records: list[BenchRecord], fmt: str = "csv", path: str | Path = "bench.csv") -> Path:
    """Write records to `path` in the documented schema; returns the path."""
    path = Path(path)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for record in records:
            writer.writerow(_record_row(record))
        path.write_text(buf.getvalue())
    elif fmt == "json":
        path.write_text(json.dumps([_record_row(r) for r in records], indent=2) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}; choose csv or json")
    return path


def load(path: str | Path, fmt: str | None = None) -> list[BenchRecord]:
    """Parse an emitted file back into records (derived mean columns are
    recomputed from the runs, so emit -> load round-trips exactly)."""
    path = Path(path)
    if fmt is None:
        fmt = "json" if path.suffix == ".json" else "csv"
    if fmt == "csv":
        with path.open(newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != list(CSV_COLUMNS):
                raise ValueError(f"unexpected CSV header: {reader.fieldnames}")
            return [_record_from_row(row) for row in reader]
    if fmt == "json":
        return [_record_from_row(row) for row in json.loads(path.read_text())]
    raise ValueError(f"unknown format {fmt!r}; choose csv or json")

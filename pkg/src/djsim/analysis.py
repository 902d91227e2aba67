"""Closed-form error models, resource accounting, and the exhaustive verification harness."""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .algorithms import dj_zero_probability, run_named, validate_run_config
from .boolfn import BooleanFunction, Decomposition, enumerate_promise_functions, make_function


def per_node_success_prob(k_w: int, n: int, t: int) -> float:
    """Probability that one node's run measures all zeros, given its subfunction has k_w ones.

    Equals (2^(t+1) k_w / N - 1)^2 with N = 2^n; exact in double precision
    since the ratio is dyadic.
    """
    size = 1 << n
    cap = size >> t
    if not 0 <= k_w <= cap:
        raise ValueError(f"subfunction weight must be in [0, {cap}], got {k_w}")
    return ((1 << (t + 1)) * k_w / size - 1.0) ** 2


@dataclass(frozen=True)
class ErrorModel:
    """Hypergeometric weights of subfunction weight configurations over the balanced ensemble.

    A uniformly random balanced function induces weights (k_0, ..., k_{2^t-1})
    with sum N/2 and each k_w at most N/2^t; the weight of a configuration is
    the product of per-block binomials over the central binomial.  The weights
    sum to 1 (Vandermonde).
    """

    n: int
    t: int

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def block(self) -> int:
        return self.size >> self.t

    def configurations(self) -> Iterator[tuple[tuple[int, ...], float]]:
        """Yield (configuration, weight) pairs in lexicographic configuration order."""
        nodes = 1 << self.t
        block = self.block
        denom = math.comb(self.size, self.size // 2)

        def rec(prefix: list[int], remaining: int, slots: int) -> Iterator[tuple[tuple[int, ...], float]]:
            if slots == 0:
                if remaining == 0:
                    numer = math.prod(math.comb(block, k) for k in prefix)
                    yield tuple(prefix), numer / denom
                return
            low = max(0, remaining - block * (slots - 1))
            high = min(block, remaining)
            for k in range(low, high + 1):
                prefix.append(k)
                yield from rec(prefix, remaining - k, slots - 1)
                prefix.pop()

        yield from rec([], self.size // 2, nodes)


def multinode_misid_probability(n: int, t: int) -> float:
    """Exact probability that the independent-nodes baseline labels a balanced function constant.

    Enumerates every weight configuration of the balanced ensemble and sums
    weight times the product of per-node all-zero probabilities.
    """
    if not 1 <= t < n:
        raise ValueError(f"split size must satisfy 1 <= t < n, got t={t}, n={n}")
    model = ErrorModel(n, t)
    total = 0.0
    for config, weight in model.configurations():
        product = 1.0
        for k_w in config:
            product *= per_node_success_prob(k_w, n, t)
        total += weight * product
    return total


def two_node_misid_probability(n: int) -> float:
    """Exact two-node misidentification probability, evaluated from its own sum.

    Kept as an independent enumeration (not a call into the multi-node form)
    so the two routes can be cross-checked against each other.
    """
    if n < 2:
        raise ValueError(f"the two-node model requires n >= 2, got {n}")
    size = 1 << n
    half = size // 2
    denom = math.comb(size, half)
    scale = (4.0 / size) ** 2
    total = 0.0
    for k0 in range(half + 1):
        k1 = half - k0
        weight = math.comb(half, k0) * math.comb(half, k1) / denom
        total += weight * scale * (k0 - size / 4.0) ** 2 * scale * (k1 - size / 4.0) ** 2
    return total


def mean_simulated_misid(n: int, t: int) -> float:
    """Mean simulated constant-label probability of the independent-nodes baseline over all balanced functions.

    Each distinct subfunction is simulated once (cached single-node runs) and
    the exact per-function product is averaged over the whole ensemble.
    """
    total = 0.0
    count = 0
    for f in enumerate_promise_functions(n):
        if f.promise.value != "balanced":
            continue
        d = Decomposition(f, t)
        product = 1.0
        for w in range(1 << t):
            product *= dj_zero_probability(d.u_bits, d.sub_table(w))
        total += product
        count += 1
    return total / count


@dataclass(frozen=True)
class ResourceTable:
    """Closed-form qubit and gate counts per algorithm at a given (t, n)."""

    t: int
    n: int
    algorithms: dict[str, dict]
    oracle_qubits: dict[str, int]

    def to_record(self) -> dict:
        return {
            "t": self.t,
            "n": self.n,
            "algorithms": self.algorithms,
            "oracle_qubits": self.oracle_qubits,
        }


def resource_table(t: int, n: int) -> ResourceTable:
    """Evaluate every closed-form resource count for split size t at arity n."""
    if t < 1:
        raise ValueError(f"split size must be at least 1, got {t}")
    if n <= t:
        raise ValueError(f"arity must exceed the split size, got n={n}, t={t}")
    pairs = 1 << (t - 1)
    algorithms = {
        "alg1": {
            "total_qubits": n,
            "gate_count": 5,
            "operator_widths": {"Z": 1},
        },
        "alg2": {
            "total_qubits": n + (1 << t) + 3,
            "gate_count": (1 << (t + 1)) + 6,
            "operator_widths": {"U": (1 << t) + t + 2, "R": t + 3},
        },
        "alg3": {
            "total_qubits": n + 3 * pairs + 2 * t + 2,
            "gate_count": (1 << (t + 2)) + 10,
            "operator_widths": {"A": 3 * pairs + t - 1, "V": 3 * t + 1, "R'": t + 2, "A'": pairs + t},
        },
    }
    oracle_qubits = {"dj": n + 1, "distributed": n - t + 1}
    return ResourceTable(t=t, n=n, algorithms=algorithms, oracle_qubits=oracle_qubits)


@dataclass
class VerificationSummary:
    """Result of sweeping one algorithm over the full promise family."""

    n: int
    t: Optional[int]
    algorithm: str
    functions_checked: int
    failures: list[dict] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> int:
        return self.functions_checked - len(self.failures)

    def to_record(self, include_wall_time: bool = True) -> dict:
        record = {
            "n": self.n,
            "t": self.t,
            "algorithm": self.algorithm,
            "functions_checked": self.functions_checked,
            "passed": self.passed,
            "failure_count": len(self.failures),
            "failures": self.failures,
        }
        if include_wall_time:
            record["wall_time_s"] = self.wall_time
        return record


def default_jobs() -> int:
    env = os.environ.get("DJSIM_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _check_one(algorithm: str, f: BooleanFunction, t: Optional[int]) -> Optional[dict]:
    try:
        report = run_named(algorithm, f, t)
    except Exception as exc:  # per-function run errors become findings, not aborts
        return {"function": f.digest(), "promise": f.promise.value, "error": str(exc)}
    if report.verdict == f.promise.value and report.verdict_exact:
        return None
    return {
        "function": f.digest(),
        "promise": f.promise.value,
        "verdict": report.verdict,
        "p_constant": report.p_constant,
        "verdict_exact": report.verdict_exact,
    }


def _sweep_chunk(args: tuple[str, int, Optional[int], list[bytes]]) -> tuple[int, list[dict]]:
    algorithm, n, t, tables = args
    failures = []
    for table in tables:
        failure = _check_one(algorithm, make_function(n, table), t)
        if failure is not None:
            failures.append(failure)
    return len(tables), failures


def verify_sweep(n: int, t: Optional[int], algorithm: str, jobs: Optional[int] = None) -> VerificationSummary:
    """Run the algorithm on every promise function of arity n and record mismatches.

    A failure is any function whose verdict differs from its promise label or
    whose winning-label probability is not 1 within tolerance.  Workers are
    stateless, so the family can be partitioned across processes.
    """
    if jobs is None:
        jobs = default_jobs()
    validate_run_config(algorithm, n, t)
    start = time.perf_counter()
    summary = VerificationSummary(n=n, t=t, algorithm=algorithm, functions_checked=0)
    if jobs <= 1:
        for f in enumerate_promise_functions(n):
            summary.functions_checked += 1
            failure = _check_one(algorithm, f, t)
            if failure is not None:
                summary.failures.append(failure)
    else:
        import multiprocessing

        chunk_size = 256
        chunks = []
        current: list[bytes] = []
        for f in enumerate_promise_functions(n):
            current.append(f.table)
            if len(current) >= chunk_size:
                chunks.append((algorithm, n, t, current))
                current = []
        if current:
            chunks.append((algorithm, n, t, current))
        with multiprocessing.Pool(jobs) as pool:
            for count, failures in pool.imap_unordered(_sweep_chunk, chunks):
                summary.functions_checked += count
                summary.failures.extend(failures)
    summary.wall_time = time.perf_counter() - start
    return summary

"""Micro-benchmarks for elementwise activation kernels.

Times whole-buffer forward and derivative passes, reporting the median
per-element nanoseconds over many repetitions.  Suites interleave the
candidates round-robin so slow thermal/load drift hits every activation
equally.  An output checksum ties each timing to real computed values.

Timings are wall-clock and machine dependent; the analytic bytes_touched
(input + output + derivative buffers) is the only hardware-independent
number here.
"""

import time
from dataclasses import dataclass

import numpy as np

from .activations import ActivationSpec, _dx_kernel, _fwd_kernel

WARMUP_REPS = 3


@dataclass(frozen=True)
class BenchResult:
    spec: ActivationSpec
    buffer_len: int
    forward_ns_per_elem: float
    backward_ns_per_elem: float
    reps: int
    bytes_touched: int
    checksum: float
    raw_forward_ns: tuple  # per-rep wall times, for offline inspection
    raw_backward_ns: tuple


def _validate(buffer_len: int, reps: int):
    if buffer_len < 1_000_000:
        raise ValueError(
            f"buffer_len must be >= 1e6 (timing noise dominates below), "
            f"got {buffer_len}"
        )
    if reps < 10:
        raise ValueError(f"reps must be >= 10, got {reps}")


def _bench_many(specs, buffer_len, reps, seed, dtype, timer):
    rng = np.random.default_rng(seed)
    buf = rng.uniform(-3.0, 3.0, buffer_len)
    if dtype == "float32":
        buf = buf.astype(np.float32)
    elif dtype != "float64":
        raise ValueError(f"dtype must be float64 or float32, got {dtype}")

    fwd_ns = [[] for _ in specs]
    bwd_ns = [[] for _ in specs]
    checksums = [0.0] * len(specs)
    for i, spec in enumerate(specs):
        for _ in range(WARMUP_REPS):
            _fwd_kernel(spec, buf)
            _dx_kernel(spec, buf)
    for _ in range(reps):
        for i, spec in enumerate(specs):
            t0 = timer()
            out = _fwd_kernel(spec, buf)
            fwd_ns[i].append(timer() - t0)
            checksums[i] = float(np.sum(out))
    for _ in range(reps):
        for i, spec in enumerate(specs):
            t0 = timer()
            out = _dx_kernel(spec, buf)
            bwd_ns[i].append(timer() - t0)
            checksums[i] += float(np.sum(out))

    results = []
    for i, spec in enumerate(specs):
        if not np.isfinite(checksums[i]):
            raise FloatingPointError(
                f"non-finite checksum for {spec.label()}: {checksums[i]}"
            )
        results.append(
            BenchResult(
                spec=spec,
                buffer_len=buffer_len,
                forward_ns_per_elem=float(np.median(fwd_ns[i])) / buffer_len,
                backward_ns_per_elem=float(np.median(bwd_ns[i])) / buffer_len,
                reps=reps,
                bytes_touched=3 * buffer_len * buf.itemsize,
                checksum=checksums[i],
                raw_forward_ns=tuple(fwd_ns[i]),
                raw_backward_ns=tuple(bwd_ns[i]),
            )
        )
    return results


def bench_activation(
    spec: ActivationSpec,
    buffer_len: int = 10_000_000,
    reps: int = 20,
    seed: int = 0,
    dtype: str = "float64",
    timer=time.perf_counter_ns,
) -> BenchResult:
    """Time forward and derivative passes over a uniform [-3, 3] buffer."""
    _validate(buffer_len, reps)
    return _bench_many([spec], buffer_len, reps, seed, dtype, timer)[0]


def bench_suite(
    specs,
    buffer_len: int = 10_000_000,
    reps: int = 20,
    seed: int = 0,
    dtype: str = "float64",
    timer=time.perf_counter_ns,
):
    """Benchmark several activations with round-robin interleaved reps."""
    _validate(buffer_len, reps)
    return _bench_many(list(specs), buffer_len, reps, seed, dtype, timer)


def results_to_csv(results) -> str:
    lines = [
        "activation,buffer_len,forward_ns_per_elem,backward_ns_per_elem,"
        "bytes_touched,checksum"
    ]
    for r in results:
        lines.append(
            f"{r.spec.label()},{r.buffer_len},{r.forward_ns_per_elem!r},"
            f"{r.backward_ns_per_elem!r},{r.bytes_touched},{r.checksum!r}"
        )
    return "\n".join(lines) + "\n"

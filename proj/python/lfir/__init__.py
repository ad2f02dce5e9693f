"""Kernel toolchain: parse, transform, partition, schedule, and execute
the textual IR dialect. All operations work on IR text."""

from ._core import (
    bench,
    bench_report,
    benchmarks,
    check,
    cycle_count,
    mif_decode,
    mif_encode,
    partition,
    run,
    schedule,
    transform,
)

__all__ = [
    "bench",
    "bench_report",
    "benchmarks",
    "check",
    "cycle_count",
    "mif_decode",
    "mif_encode",
    "partition",
    "run",
    "schedule",
    "transform",
]

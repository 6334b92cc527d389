"""Benchmark harness: parallel vs sequential block encryption over a size sweep.

Each (size, config) cell encrypts a deterministic payload, averages
``trials`` timed launches after one untimed warm-up, and reports
``speedup = sequential_time / parallel_time``.  Results render as CSV or a
Markdown table; raw per-trial times go to an optional run log.
"""

from __future__ import annotations

import hashlib
import math
import platform
import random
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import TextIO

from . import codec, spmd
from .errors import DomainError
from .modmath import AlgorithmSelector
from .rsa import PublicKey, transform_kernel

TABLE_SIZES = (256, 512, 1024, 2048, 4096, 8192, 16392, 32784)
TABLE1_BLOCKS = (4, 8, 16, 32, 64, 128, 256, 512)
TABLE2_BLOCKS = (8, 16, 32, 64, 128, 256, 512, 1024)
# 131 * 137 and 1009 * 509; 131 is an 8-bit exponent coprime to both totients.
TABLE1_KEY = PublicKey(17947, 131)
TABLE2_KEY = PublicKey(513581, 131)
SAMPLE_SIZE = 32

CSV_COLUMNS = (
    "data_size", "blocks", "threads_per_block", "workers", "algo", "key_n",
    "parallel_time_s", "sequential_time_s", "speedup", "trials",
)


@dataclass
class BenchRecord:
    data_size: int
    blocks: int
    threads_per_block: int
    workers: int
    algo: str
    key_n: int
    parallel_time: float | None
    sequential_time: float | None
    speedup: float | None
    trials: int
    checksum: str = ""
    error: str | None = None


@dataclass
class BenchPlan:
    """A sweep description.

    ``configs`` pairs with ``sizes`` one-to-one, or a single config is
    applied to every size.
    """

    sizes: list[int]
    configs: list[spmd.LaunchConfig]
    key: PublicKey
    algo: AlgorithmSelector = field(default_factory=lambda: AlgorithmSelector("halving"))
    trials: int = 20
    seed: int = 0
    compare_sequential: bool = True

    def __post_init__(self):
        if not self.sizes or not self.configs:
            raise DomainError("plan needs at least one size and one config")
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        if self.key.n <= codec.RAW_MAX:
            raise DomainError(f"key modulus {self.key.n} cannot hold payload blocks up to {codec.RAW_MAX}")
        if len(self.configs) not in (1, len(self.sizes)):
            raise DomainError(
                f"{len(self.configs)} configs cannot be paired with {len(self.sizes)} sizes"
            )

    def cells(self):
        configs = self.configs * len(self.sizes) if len(self.configs) == 1 else self.configs
        return list(zip(self.sizes, configs))


def table1_plan(workers: int | None = None, trials: int = 20, seed: int = 0) -> BenchPlan:
    w = workers or spmd.default_workers()
    configs = [spmd.LaunchConfig(b, 64, w, grid_stride=True) for b in TABLE1_BLOCKS]
    return BenchPlan(list(TABLE_SIZES), configs, TABLE1_KEY, trials=trials, seed=seed)


def table2_plan(workers: int | None = None, trials: int = 20, seed: int = 0) -> BenchPlan:
    w = workers or spmd.default_workers()
    configs = [spmd.LaunchConfig(b, 32, w, grid_stride=True) for b in TABLE2_BLOCKS]
    return BenchPlan(list(TABLE_SIZES), configs, TABLE2_KEY, trials=trials, seed=seed,
                     compare_sequential=False)


def _checksum(values) -> str:
    return hashlib.sha256(" ".join(map(str, values)).encode()).hexdigest()[:16]


def _log(log: TextIO | None, line: str) -> None:
    if log is not None:
        log.write(line + "\n")


def run_bench(plan: BenchPlan, log: TextIO | None = None) -> list[BenchRecord]:
    _log(log, f"plan: sizes={plan.sizes} trials={plan.trials} seed={plan.seed} "
              f"algo={plan.algo.label} key=(n={plan.key.n}, e={plan.key.e}) "
              f"compare_sequential={plan.compare_sequential}")
    _log(log, f"machine: {platform.platform()} python={platform.python_version()} "
              f"cpus={spmd.default_workers()}")
    context = (plan.key.n, plan.key.e, plan.algo)
    records = []
    for size, config in plan.cells():
        record = BenchRecord(size, config.blocks, config.threads_per_block, config.workers,
                             plan.algo.label, plan.key.n, None, None, None, plan.trials)
        records.append(record)
        _log(log, f"cell size={size} grid={config.blocks}x{config.threads_per_block} "
                  f"workers={config.workers}")
        if config.lanes < size and config.grid_stride:
            _log(log, f"  grid-stride: {config.lanes} lanes < {size} elements")
        try:
            _run_cell(plan, size, config, context, record, log)
        except DomainError as exc:
            record.error = str(exc)
            _log(log, f"  error: {exc}")
    return records


def _run_cell(plan, size, config, context, record, log):
    payload = list(codec.generate_payload(size, plan.seed).blocks)
    output, _ = spmd.launch_map(config, payload, transform_kernel, context)  # warm-up
    par_times = []
    for _ in range(plan.trials):
        output, timing = spmd.launch_map(config, payload, transform_kernel, context)
        par_times.append(timing.total)
    record.parallel_time = statistics.fmean(par_times)
    record.checksum = _checksum(output)
    _log(log, "  parallel: " + " ".join(f"{t:.6f}" for t in par_times))
    _log(log, f"  checksum: {record.checksum}")

    rng = random.Random(plan.seed ^ size)
    sample = rng.sample(range(size), min(SAMPLE_SIZE, size))
    for i in sample:
        if output[i] != transform_kernel(payload[i], context):
            raise DomainError(f"parallel output differs from sequential at element {i}")

    if plan.compare_sequential:
        spmd.sequential_map(payload, transform_kernel, context)
        seq_times = []
        for _ in range(plan.trials):
            seq_out, timing = spmd.sequential_map(payload, transform_kernel, context)
            seq_times.append(timing.total)
        if seq_out != output:
            raise DomainError("parallel output differs from sequential output")
        record.sequential_time = statistics.fmean(seq_times)
        record.speedup = record.sequential_time / record.parallel_time
        _log(log, "  sequential: " + " ".join(f"{t:.6f}" for t in seq_times))


def _row(r: BenchRecord) -> list[str]:
    def t(x):
        return "" if x is None else f"{x:.6f}"

    return [
        str(r.data_size), str(r.blocks), str(r.threads_per_block), str(r.workers), r.algo,
        str(r.key_n), t(r.parallel_time), t(r.sequential_time),
        "" if r.speedup is None else f"{r.speedup:.2f}", str(r.trials),
    ]


def emit_csv(records) -> str:
    lines = [",".join(CSV_COLUMNS)]
    lines += [",".join(_row(r)) for r in records]
    return "\n".join(lines) + "\n"


def emit_markdown(records) -> str:
    lines = ["| " + " | ".join(CSV_COLUMNS) + " |",
             "|" + "|".join("---" for _ in CSV_COLUMNS) + "|"]
    lines += ["| " + " | ".join(_row(r)) + " |" for r in records]
    return "\n".join(lines) + "\n"


PLAN_KEYS = {"sizes", "blocks", "tpb", "trials", "seed", "algo", "key_n", "key_e",
             "compare", "workers", "window"}


def _ints(value: str, lineno: int) -> list[int]:
    try:
        values = [int(tok) for tok in value.replace(",", " ").split()]
    except ValueError:
        values = []
    if not values:
        raise DomainError(f"line {lineno}: expected integers, got {value!r}")
    return values


def parse_plan(text: str) -> BenchPlan:
    """Read a ``key = value`` plan.

    ``blocks`` may be ``auto`` (enough blocks to cover each size), a single
    count, or one count per size.
    """
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in PLAN_KEYS:
            raise DomainError(f"line {lineno}: unknown key {key!r}")
        raw[key] = (value, lineno)

    def get(key, default=None):
        return raw[key] if key in raw else (default, 0)

    for required in ("sizes", "key_n", "key_e"):
        if required not in raw:
            raise DomainError(f"plan is missing required key {required!r}")

    sizes = _ints(*raw["sizes"])
    tpb_text, tpb_line = get("tpb", "64")
    tpb = _ints(tpb_text, tpb_line)
    if len(tpb) != 1:
        raise DomainError(f"line {tpb_line}: tpb takes a single value")
    tpb = tpb[0]
    workers_text, workers_line = get("workers", str(spmd.default_workers()))
    workers = _ints(workers_text, workers_line)[0]
    blocks_text, blocks_line = get("blocks", "auto")
    try:
        if blocks_text.strip() == "auto":
            blocks = [math.ceil(s / tpb) for s in sizes]
        else:
            blocks = _ints(blocks_text, blocks_line)
        configs = [spmd.LaunchConfig(b, tpb, workers) for b in blocks]
    except DomainError as exc:
        raise DomainError(f"line {blocks_line or tpb_line}: {exc}") from None

    algo_text, algo_line = get("algo", "halving")
    window_text, window_line = get("window", "4")
    compare_text, compare_line = get("compare", "true")
    if compare_text.lower() not in ("true", "false", "1", "0", "yes", "no"):
        raise DomainError(f"line {compare_line}: compare must be true or false")
    try:
        algo = AlgorithmSelector.parse(algo_text, _ints(window_text, window_line)[0])
    except DomainError as exc:
        raise DomainError(f"line {algo_line or window_line}: {exc}") from None
    key_n, key_e = _ints(*raw["key_n"])[0], _ints(*raw["key_e"])[0]
    try:
        key = PublicKey(key_n, key_e)
    except DomainError as exc:
        raise DomainError(f"line {raw['key_n'][1]}: {exc}") from None
    trials_text, trials_line = get("trials", "20")
    seed_text, seed_line = get("seed", "0")
    try:
        return BenchPlan(
            sizes, configs, key, algo,
            trials=_ints(trials_text, trials_line)[0],
            seed=_ints(seed_text, seed_line)[0],
            compare_sequential=compare_text.lower() in ("true", "1", "yes"),
        )
    except DomainError as exc:
        raise DomainError(f"line {blocks_line or raw['sizes'][1]}: {exc}") from None


def load_plan(path: str | Path) -> BenchPlan:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DomainError(f"cannot read plan {path}: {exc.strerror}") from None
    return parse_plan(text)


"""
Density experiments.

Samples points of a moduli space from a seed, classifies each one and tallies
the verdicts. Rows come back in sample-index order whatever the pool size, so
a run is reproducible from (family, seed, count, height, radicands).
"""

import hashlib
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from tqdm import tqdm

from . import hopf, k3, torus
from .config import settings

logger = logging.getLogger(__name__)

Row = Dict[str, Any]

TORUS_COLUMNS = ["seed", "index", "in_M", "s_n", "in_S0", "kernel_rank", "admissible", "verdict"]
HOPF_COLUMNS = ["seed", "index", "alpha", "delta", "class", "dependence_m", "dependence_n", "complete", "verdict"]
K3_COLUMNS = ["seed", "index", "on_quadric", "kernel_rank", "verdict"]

COLUMNS = {"torus": TORUS_COLUMNS, "hopf": HOPF_COLUMNS, "k3": K3_COLUMNS}

DEFAULT_RADICANDS = {"torus": (-1, 2, 3, 5, 7), "hopf": (), "k3": (2, 3)}
DEFAULT_FORM = "U+U"


def derive_seed(seed: int, index: int) -> int:
    """Per-sample seed, independent of how samples are scheduled."""
    digest = hashlib.sha256(f"{seed}:{index}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass
class ExperimentSpec:
    family: str
    count: int
    seed: int = 0
    height: int = 7
    radicands: Tuple[int, ...] = ()
    bound: Optional[int] = None
    form: str = DEFAULT_FORM
    workers: Optional[int] = None

    def __post_init__(self):
        if self.family not in COLUMNS:
            raise ValueError(f"Unknown family: {self.family}")
        if self.count < 1:
            raise ValueError("count must be >= 1")
        self.radicands = tuple(self.radicands)


def torus_row(spec: ExperimentSpec, index: int) -> Row:
    Z = torus.sample_M(spec.radicands, spec.height, derive_seed(spec.seed, index))
    report = torus.classify(Z)
    return {
        "seed": spec.seed,
        "index": index,
        "in_M": report.in_M,
        "s_n": report.s_membership,
        "in_S0": report.in_S0,
        "kernel_rank": report.r_kernel.rank,
        "admissible": report.admissible_witness is not None,
        "verdict": report.verdict.value,
    }


def hopf_row(spec: ExperimentSpec, index: int) -> Row:
    t = hopf.sample_diagonal(spec.height, derive_seed(spec.seed, index))
    report = hopf.classify(t, spec.bound)
    m, n = report.dependence if report.dependence else (None, None)
    return {
        "seed": spec.seed,
        "index": index,
        "alpha": str(t.alpha.rational_value()),
        "delta": str(t.delta.rational_value()),
        "class": report.hopf_class.value,
        "dependence_m": m,
        "dependence_n": n,
        "complete": report.dependence_complete,
        "verdict": report.verdict.value,
    }


def k3_row(spec: ExperimentSpec, index: int, form: Optional[k3.IntersectionForm] = None) -> Row:
    A = form or k3.IntersectionForm.preset(spec.form)
    lam = k3.sample_quadric(A, spec.radicands, spec.height, derive_seed(spec.seed, index))
    report = k3.classify(lam, A)
    return {
        "seed": spec.seed,
        "index": index,
        "on_quadric": report.on_quadric,
        "kernel_rank": report.kernel.rank,
        "verdict": report.verdict.value,
    }


def _row_function(spec: ExperimentSpec) -> Callable[[int], Row]:
    if spec.family == "torus":
        return partial(torus_row, spec)
    if spec.family == "hopf":
        return partial(hopf_row, spec)
    return partial(k3_row, spec, form=k3.IntersectionForm.preset(spec.form))


def tally_key(row: Row) -> str:
    """The summary bucket a row counts toward."""
    verdict = row["verdict"]
    if verdict == torus.TorusVerdict.DEGREE2.value:
        return "degree2"
    if verdict in (torus.TorusVerdict.DEGREE0_CERTIFIED.value, k3.K3Verdict.DEGREE0_CERTIFIED.value):
        return "degree0_certified"
    if verdict == hopf.HopfVerdict.DEGREE1.value:
        return "degree1"
    if verdict == hopf.HopfVerdict.DEGREE0.value:
        return "degree0_certified" if row.get("complete") else "inconclusive"
    if verdict == k3.K3Verdict.HAS_LINE_BUNDLES.value:
        return "has_line_bundles"
    return "inconclusive"


COUNT_FIELDS = ["degree0_certified", "degree2", "degree1", "inconclusive", "has_line_bundles"]


@dataclass
class ExperimentSummary:
    """Verdict counts of one experiment run."""
    family: str
    total: int = 0
    degree0_certified: int = 0
    degree2: int = 0
    degree1: int = 0
    inconclusive: int = 0
    has_line_bundles: int = 0
    runtime_seconds: Optional[float] = field(default=None, compare=False)

    def __post_init__(self):
        if sum(getattr(self, name) for name in COUNT_FIELDS) != self.total:
            raise ValueError(f"Counts do not sum to total {self.total}")

    @property
    def fractions(self) -> Dict[str, float]:
        if self.total == 0:
            return {name: 0.0 for name in COUNT_FIELDS}
        return {name: getattr(self, name) / self.total for name in COUNT_FIELDS}

    @classmethod
    def from_rows(cls, family: str, rows: Sequence[Row], runtime_seconds: Optional[float] = None) -> "ExperimentSummary":
        counts = {name: 0 for name in COUNT_FIELDS}
        for row in rows:
            counts[tally_key(row)] += 1
        return cls(family=family, total=len(rows), runtime_seconds=runtime_seconds, **counts)

    def to_dict(self, include_runtime: bool = False) -> Dict[str, Any]:
        data = {
            "family": self.family,
            "total": self.total,
            **{name: getattr(self, name) for name in COUNT_FIELDS},
            "fractions": {name: round(value, 6) for name, value in self.fractions.items()},
        }
        if include_runtime:
            data["runtime_seconds"] = self.runtime_seconds
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentSummary":
        return cls(
            family=data["family"],
            total=data["total"],
            runtime_seconds=data.get("runtime_seconds"),
            **{name: data.get(name, 0) for name in COUNT_FIELDS},
        )


def run_experiment(spec: ExperimentSpec, progress: bool = False) -> Tuple[List[Row], ExperimentSummary]:
    """
    Sample and classify `spec.count` points.

    Returns:
        Tuple of (rows in index order, summary)
    """
    workers = spec.workers or settings().workers
    row_fn = _row_function(spec)
    logger.info(f"{spec.family} experiment: count={spec.count}, seed={spec.seed}, "
                f"height={spec.height}, radicands={list(spec.radicands)}, workers={workers}")
    start = time.perf_counter()

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = pool.map(row_fn, range(spec.count))
        rows = list(tqdm(results, total=spec.count, desc=f"{spec.family} samples",
                         disable=not progress))

    summary = ExperimentSummary.from_rows(spec.family, rows, time.perf_counter() - start)
    logger.info(f"{spec.family} experiment done: {summary.to_dict()}")
    return rows, summary

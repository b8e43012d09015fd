"""Experiment orchestration: generate, broadcast, measure, fit.

An :class:`ExperimentSpec` names a generator, the physical and protocol
parameters and a list of seeds.  :func:`run_experiment` runs one broadcast
per seed and fits the constant ``c`` of ``rounds ~ c * predictor`` by least
squares through the origin, where the predictor is ``D * log2(n)^2`` for the
general variant and ``D * (1/eps^3 + log2 g) * d_alpha(n)`` for the
granularity variant.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..geometry import granularity
from ..protocols import GEN, GRAN, ProtocolConfig, det_broadcast, flat_d_alpha
from ..runtime import default_tau, write_trace
from ..sinr import CLASSICAL, DISTURBANCE, Network, SinrParams, comm_graph, disturbance_radius, eccentricity
from .generate import GENERATORS, generate

__all__ = [
    "ExperimentSpec",
    "RunRow",
    "ExperimentResult",
    "ExperimentFailure",
    "CSV_COLUMNS",
    "build_network",
    "predictor",
    "run_one",
    "reference_run",
    "run_experiment",
    "fit_constant",
    "to_csv",
    "write_csv",
    "summary",
]

CSV_COLUMNS = ("seed", "n", "D", "g", "stages", "rounds", "all_informed", "timed_out", "tau", "rejections", "wallclock")


class ExperimentFailure(RuntimeError):
    """A classical run left stations uninformed; ``trace_path`` holds its trace if one was written."""

    def __init__(self, msg: str, trace_path: str | None = None):
        super().__init__(msg if trace_path is None else f"{msg} (trace: {trace_path})")
        self.trace_path = trace_path


@dataclass
class ExperimentSpec:
    generator: str = "uniform-disc"
    n: int = 50
    area_scale: float = 1.0
    eps: float = 0.2
    alpha: float = 3.0
    beta: float = 1.0
    noise: float = 1.0
    eta: float = 0.2
    zeta: float = 0.1
    model: str = CLASSICAL
    variant: str = GEN
    seeds: list[int] = field(default_factory=lambda: [0])
    round_budget: int = 10**9
    selector_k_override: int | None = None
    tau_override: int | None = None
    clusters: int = 4
    g_target: float = 100.0
    spacing: float | None = None
    network_seed: int | None = None

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise ValueError(f"unknown generator {self.generator!r}")
        if self.model not in (CLASSICAL, DISTURBANCE):
            raise ValueError(f"unknown model {self.model!r}")
        if self.variant not in (GEN, GRAN):
            raise ValueError(f"unknown variant {self.variant!r}")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        self.seeds = [int(s) for s in self.seeds]

    @property
    def params(self) -> SinrParams:
        return SinrParams(alpha=self.alpha, beta=self.beta, noise=self.noise, eps=self.eps, eta=self.eta, zeta=self.zeta)

    @property
    def tau(self) -> int:
        if self.model != DISTURBANCE:
            return 1
        if self.tau_override is not None:
            return self.tau_override
        return default_tau(self.n, self.zeta)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown experiment fields: {', '.join(sorted(unknown))}")
        return cls(**d)

    @classmethod
    def load(cls, path) -> "ExperimentSpec":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class RunRow:
    seed: int
    n: int
    D: int
    g: float
    stages: int
    rounds: int
    all_informed: bool
    timed_out: bool
    tau: int
    rejections: int
    wallclock: float

    def as_csv(self) -> list[str]:
        return [
            str(self.seed),
            str(self.n),
            str(self.D),
            format(self.g, ".17g"),
            str(self.stages),
            str(self.rounds),
            str(int(self.all_informed)),
            str(int(self.timed_out)),
            str(self.tau),
            str(self.rejections),
            f"{self.wallclock:.3f}",
        ]


@dataclass
class ExperimentResult:
    """Per-seed rows plus aggregates.

    ``reference_rounds`` is set for disturbance experiments on a fixed
    network: the rounds of the same protocol, unphased, under the classical
    model.
    """

    spec: ExperimentSpec
    rows: list[RunRow] = field(default_factory=list)
    reference_rounds: int | None = None

    def __post_init__(self):
        self.rows = sorted(self.rows, key=lambda r: r.seed)

    @property
    def predictors(self) -> list[float]:
        return [predictor(self.spec, r) for r in self.rows]

    @property
    def ratios(self) -> list[float]:
        return [r.rounds / p for r, p in zip(self.rows, self.predictors) if not r.timed_out and p > 0]

    @property
    def constant(self) -> float | None:
        done = [(p, r.rounds) for r, p in zip(self.rows, self.predictors) if not r.timed_out]
        if not done:
            return None
        return fit_constant(*zip(*done))[0]

    @property
    def completion_rate(self) -> float:
        if not self.rows:
            return 0.0
        return sum(r.all_informed and not r.timed_out for r in self.rows) / len(self.rows)

    @property
    def median_rounds(self) -> float | None:
        done = [r.rounds for r in self.rows if not r.timed_out]
        return statistics.median(done) if done else None


def build_network(spec: ExperimentSpec, seed: int) -> tuple[Network, int]:
    """Network for ``seed``, or the fixed network when ``spec.network_seed`` is set."""
    return generate(
        spec.generator,
        spec.n,
        seed if spec.network_seed is None else spec.network_seed,
        spec.params,
        area_scale=spec.area_scale,
        spacing=spec.spacing,
        clusters=spec.clusters,
        g_target=spec.g_target,
    )


def predictor(spec: ExperimentSpec, row: RunRow) -> float:
    """Theory-shaped round count the fitted constant multiplies."""
    D = max(row.D, 1)
    if spec.variant == GEN:
        return D * math.log2(max(row.n, 2)) ** 2
    return D * (1 / spec.eps**3 + math.log2(max(row.g, 2))) * flat_d_alpha(row.n, spec.params)


def fit_constant(predicted, measured) -> tuple[float, np.ndarray]:
    """Least squares ``measured ~ c * predicted`` with no intercept; returns ``c`` and the residuals."""
    x = np.asarray(predicted, dtype=float)
    y = np.asarray(measured, dtype=float)
    if len(x) == 0 or not np.any(x):
        raise ValueError("nothing to fit")
    c = float(x @ y / (x @ x))
    return c, y - c * x


def run_one(spec: ExperimentSpec, seed: int, trace_dir: str | None = None, network: Network | None = None) -> RunRow:
    """One broadcast; raises :class:`ExperimentFailure` if a classical run leaves someone uninformed."""
    if network is None:
        net, rejected = build_network(spec, seed)
    else:
        net, rejected = network, 0
    D = eccentricity(comm_graph(net), net.source)
    g = granularity(net)
    t0 = time.perf_counter()
    res = det_broadcast(
        spec.variant,
        net,
        spec.model,
        seed=seed,
        tau=spec.tau,
        round_budget=spec.round_budget,
        record=trace_dir is not None,
        selector_k=spec.selector_k_override,
    )
    wall = time.perf_counter() - t0
    row = RunRow(seed, len(net), D, g, res.stages_used, res.rounds_used, res.all_informed, res.timed_out, spec.tau, rejected, wall)
    if spec.model == CLASSICAL and not (res.all_informed and not res.timed_out):
        path = None
        if trace_dir is not None:
            path = str(Path(trace_dir) / f"failed-{spec.variant}-{spec.generator}-n{spec.n}-seed{seed}.jsonl")
            write_trace(res.trace, path)
        raise ExperimentFailure(f"classical {spec.variant} broadcast left stations uninformed (seed {seed})", path)
    return row


def _run_seed(args):
    return run_one(*args)


def reference_run(spec: ExperimentSpec, net: Network):
    """The disturbance-ready protocol (same dilution margin and far-sender filter) at ``tau = 1``, classical model."""
    cfg = ProtocolConfig.for_network(net, DISTURBANCE, selector_k=spec.selector_k_override)
    return det_broadcast(
        spec.variant,
        net,
        CLASSICAL,
        cfg=cfg,
        round_budget=spec.round_budget,
        record=False,
        ignore_beyond=disturbance_radius(net.params),
    )


def run_experiment(spec: ExperimentSpec, workers: int = 1, trace_dir: str | None = None) -> ExperimentResult:
    """Run every seed, in ``workers`` processes when more than one."""
    jobs = [(spec, s, trace_dir) for s in spec.seeds]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(_run_seed, jobs))
    else:
        rows = [_run_seed(j) for j in jobs]
    result = ExperimentResult(spec, rows)
    if spec.model == DISTURBANCE and spec.network_seed is not None:
        result.reference_rounds = reference_run(spec, build_network(spec, spec.network_seed)[0]).rounds_used
    return result


def to_csv(result: ExperimentResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in result.rows:
        w.writerow(r.as_csv())
    return buf.getvalue()


def write_csv(result: ExperimentResult, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(to_csv(result))


def summary(result: ExperimentResult) -> str:
    s = result.spec
    lines = [
        f"experiment: {s.variant} broadcast on {s.generator} networks, n={s.n}, model={s.model}, tau={s.tau}",
        f"runs: {len(result.rows)}  completion rate: {result.completion_rate:.3f}",
    ]
    if result.rows:
        rounds = [r.rounds for r in result.rows]
        lines.append(f"rounds: min {min(rounds)}  median {statistics.median(rounds):g}  max {max(rounds)}")
    ratios = result.ratios
    if ratios:
        c = result.constant
        label = "rounds / (D log^2 n)" if s.variant == GEN else "rounds / (D (1/eps^3 + log g) d_alpha(n))"
        lines.append(f"fitted constant c for {label}: {c:.6g}")
        lines.append(f"per-run ratio: min {min(ratios):.6g}  median {statistics.median(ratios):.6g}  max {max(ratios):.6g}")
    if result.reference_rounds is not None:
        lines.append(f"classical reference: {result.reference_rounds} rounds; tau x reference = {s.tau * result.reference_rounds}")
    return "\n".join(lines) + "\n"

"""Multi-algorithm, multi-seed experiment runs and their summary."""
from __future__ import annotations

import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .engine import ScenarioConfig, run
from .report import SimReport, plot_tables


@dataclass
class AlgoSummary:
    completed: float
    response_time: float | None
    load_mean: float | None
    load_std: float | None
    runs: dict[int, int] = field(default_factory=dict)


@dataclass
class ComparisonSummary:
    scenario: str
    seeds: list[int]
    algos: dict[str, AlgoSummary]
    reports: dict[tuple[str, int], SimReport] = field(default_factory=dict, repr=False)

    def ratio(self, a: str, b: str) -> float:
        """Completion margin of ``a`` over ``b`` in percent, from seed medians."""
        return 100.0 * (self.algos[a].completed / self.algos[b].completed - 1.0)

    def ratios(self) -> dict[str, float]:
        names = list(self.algos)
        return {f"{a}/{b}": self.ratio(a, b) for a in names for b in names
                if a != b and self.algos[b].completed}

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "seeds": self.seeds,
            "algos": {
                name: {"completed": s.completed, "response_time": s.response_time,
                       "load_mean": s.load_mean, "load_std": s.load_std,
                       "runs": {str(k): v for k, v in s.runs.items()}}
                for name, s in self.algos.items()
            },
            "ratios": self.ratios(),
        }

    def table(self) -> str:
        lines = [f"{'algo':<6} {'completed':>10} {'resp_s':>8} {'load_mean':>10} {'load_std':>9}"]
        for name, s in self.algos.items():
            lines.append(f"{name:<6} {s.completed:>10.1f} {_f(s.response_time):>8} "
                         f"{_f(s.load_mean):>10} {_f(s.load_std):>9}")
        return "\n".join(lines)

    def plot_tables(self) -> dict[str, str]:
        """Plot CSVs built from each algorithm's first-seed run."""
        first = self.seeds[0]
        return plot_tables(self.reports[(a, first)] for a in self.algos)


def _f(v):
    return "-" if v is None else f"{v:.3f}"


def _median(values):
    values = [v for v in values if v is not None]
    return statistics.median(values) if values else None


def _one(args):
    config, algo, seed = args
    return run(config, algo, seed)


def compare(config: ScenarioConfig, algos, seeds, workers=1) -> ComparisonSummary:
    seeds = list(seeds)
    if not algos or not seeds:
        raise ValueError("need at least one algorithm and one seed")
    # a repeated algorithm gets its own column ("ffd#2") and is rerun independently
    labels, seen = [], {}
    for a in algos:
        seen[a] = seen.get(a, 0) + 1
        labels.append(a if seen[a] == 1 else f"{a}#{seen[a]}")
    jobs = [(config, a.split("#")[0], s) for a in labels for s in seeds]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            reports = list(ex.map(_one, jobs))
    else:
        reports = [_one(j) for j in jobs]
    keys = [(a, s) for a in labels for s in seeds]
    by_key = dict(zip(keys, reports))

    out = {}
    for a in labels:
        reps = [by_key[(a, s)] for s in seeds]
        loads = [r.steady_load() for r in reps]
        out[a] = AlgoSummary(
            completed=statistics.median(r.total_completed for r in reps),
            response_time=_median(r.mean_response_time() for r in reps),
            load_mean=_median(m for m, _ in loads),
            load_std=_median(s for _, s in loads),
            runs={s: r.total_completed for s, r in zip(seeds, reps)},
        )
    return ComparisonSummary(config.name, seeds, out, by_key)

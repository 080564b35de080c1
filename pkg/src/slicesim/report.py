"""Simulation report types and their fixed-schema JSON/CSV renderings."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

LOAD_COLUMNS = ["t", "algo", "upf_id", "theta", "mean", "std", "completed"]
RESPONSE_COLUMNS = ["algo", "task_id", "task_name", "requests", "response_time",
                    "queuing_delay", "service_time", "transmission_time"]
COMPLETION_COLUMNS = ["t", "algo", "completed"]

PLOT_FILES = ("load_timeseries.csv", "response_time_by_subtask.csv", "completions_timeseries.csv")


@dataclass
class TaskStats:
    """Running sums of per-request latency components for one task."""

    count: int = 0
    response: float = 0.0
    queuing: float = 0.0
    service: float = 0.0
    transmission: float = 0.0

    def add(self, response, queuing, service, transmission):
        self.count += 1
        self.response += response
        self.queuing += queuing
        self.service += service
        self.transmission += transmission

    def means(self) -> dict:
        if not self.count:
            return {"requests": 0, "response_time": None, "queuing_delay": None,
                    "service_time": None, "transmission_time": None}
        c = self.count
        return {"requests": c, "response_time": self.response / c, "queuing_delay": self.queuing / c,
                "service_time": self.service / c, "transmission_time": self.transmission / c}


@dataclass
class MetricsSample:
    t: float
    loads: dict[int, float]
    mean: float | None
    std: float | None
    completed: int
    generated: int = 0
    serviced: int = 0
    queued: int = 0
    in_flight: int = 0
    violations: list[str] = field(default_factory=list)
    pool: dict[int, dict[str, int]] = field(default_factory=dict)


@dataclass
class SimReport:
    algo: str
    seed: int
    scenario: str
    warmup: float
    samples: list[MetricsSample] = field(default_factory=list)
    tasks: dict[int, str] = field(default_factory=dict)
    task_stats: dict = field(default_factory=dict)
    completions: list = field(default_factory=list)
    saturation: dict[int, int] = field(default_factory=dict)
    per_ue_completed: dict[int, int] = field(default_factory=dict)
    evaluations: int = 0

    @property
    def total_completed(self) -> int:
        return self.samples[-1].completed if self.samples else len(self.completions)

    def steady_samples(self) -> list[MetricsSample]:
        return [s for s in self.samples if s.t > self.warmup]

    def steady_load(self) -> tuple[float | None, float | None]:
        """Time-averaged in-use load mean and std over samples after warm-up."""
        rows = [s for s in self.steady_samples() if s.mean is not None]
        if not rows:
            return None, None
        return (sum(s.mean for s in rows) / len(rows), sum(s.std for s in rows) / len(rows))

    def response_by_task(self) -> dict[int, dict]:
        out = {}
        for t, stats in self.task_stats.items():
            out[t] = stats.means() if isinstance(stats, TaskStats) else stats
        return out

    def mean_response_time(self) -> float | None:
        tot = cnt = 0
        for row in self.response_by_task().values():
            if row["requests"]:
                tot += row["response_time"] * row["requests"]
                cnt += row["requests"]
        return tot / cnt if cnt else None

    def to_dict(self) -> dict:
        return {
            "algo": self.algo,
            "seed": self.seed,
            "scenario": self.scenario,
            "warmup": self.warmup,
            "total_completed": self.total_completed,
            "tasks": {str(k): v for k, v in self.tasks.items()},
            "response_by_task": {str(k): v for k, v in self.response_by_task().items()},
            "saturation": {str(k): v for k, v in sorted(self.saturation.items())},
            "per_ue_completed": {str(k): v for k, v in self.per_ue_completed.items()},
            "evaluations": self.evaluations,
            "completions": [list(c) for c in self.completions],
            "samples": [
                {
                    "t": s.t, "loads": {str(k): v for k, v in s.loads.items()},
                    "mean": s.mean, "std": s.std, "completed": s.completed,
                    "generated": s.generated, "serviced": s.serviced, "queued": s.queued,
                    "in_flight": s.in_flight, "violations": s.violations,
                    "pool": {str(k): v for k, v in s.pool.items()},
                }
                for s in self.samples
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "SimReport":
        samples = [
            MetricsSample(
                t=s["t"], loads={int(k): v for k, v in s["loads"].items()}, mean=s["mean"],
                std=s["std"], completed=s["completed"], generated=s.get("generated", 0),
                serviced=s.get("serviced", 0), queued=s.get("queued", 0),
                in_flight=s.get("in_flight", 0), violations=s.get("violations", []),
                pool={int(k): v for k, v in s.get("pool", {}).items()},
            )
            for s in d.get("samples", [])
        ]
        return cls(
            algo=d["algo"], seed=d["seed"], scenario=d.get("scenario", ""), warmup=d.get("warmup", 0.0),
            samples=samples,
            tasks={int(k): v for k, v in d.get("tasks", {}).items()},
            task_stats={int(k): v for k, v in d.get("response_by_task", {}).items()},
            completions=[tuple(c) for c in d.get("completions", [])],
            saturation={int(k): v for k, v in d.get("saturation", {}).items()},
            per_ue_completed={int(k): v for k, v in d.get("per_ue_completed", {}).items()},
            evaluations=d.get("evaluations", 0),
        )

    @classmethod
    def from_json(cls, text: str) -> "SimReport":
        return cls.from_dict(json.loads(text))


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(round(v, 9)) if math.isfinite(v) else ""
    return str(v)


def _table(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def load_rows(report: SimReport):
    for s in report.samples:
        if not s.loads:
            yield [s.t, report.algo, None, None, None, None, s.completed]
        for j, theta in sorted(s.loads.items()):
            yield [s.t, report.algo, j, theta, s.mean, s.std, s.completed]


def response_rows(report: SimReport):
    for t, row in sorted(report.response_by_task().items()):
        if not row["requests"]:
            continue
        yield [report.algo, t, report.tasks.get(t, ""), row["requests"], row["response_time"],
               row["queuing_delay"], row["service_time"], row["transmission_time"]]


def completion_rows(report: SimReport):
    for s in report.samples:
        yield [s.t, report.algo, s.completed]


def plot_tables(reports) -> dict[str, str]:
    """CSV text for each plot file, concatenating rows of every report given."""
    reports = list(reports)
    return {
        PLOT_FILES[0]: _table(LOAD_COLUMNS, (r for rep in reports for r in load_rows(rep))),
        PLOT_FILES[1]: _table(RESPONSE_COLUMNS, (r for rep in reports for r in response_rows(rep))),
        PLOT_FILES[2]: _table(COMPLETION_COLUMNS, (r for rep in reports for r in completion_rows(rep))),
    }


def write_tables(tables: dict[str, str], out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, text in tables.items():
        p = out / name
        p.write_text(text)
        paths.append(p)
    return paths

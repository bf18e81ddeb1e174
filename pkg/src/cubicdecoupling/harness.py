"""Scaling experiments: exact counts over an N schedule and a log-log growth fit."""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .counting import DEFAULT_MEM_CAP, count_J
from .errors import BudgetError, DomainError
from .exponents import diophantine_exponents
from .forms import CubicForm, normalize_variant

SCHEMA = "v1"
DEFAULT_TOLERANCE = 0.5
SUPERCRITICAL_FLAG = "supercritical regime not desk-verifiable"


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    max_abs_residual: float
    points: tuple[tuple[int, int], ...]

    def as_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "max_abs_residual": self.max_abs_residual,
            "points": [[n, j] for n, j in self.points],
        }


def fit_growth(points: Sequence[tuple[int, int]]) -> FitResult:
    """Ordinary least squares of ln J against ln N."""
    pts = tuple((int(n), int(j)) for n, j in points)
    if len(pts) < 3:
        raise DomainError("need at least 3 points to fit a growth exponent")
    ns = [n for n, _ in pts]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise DomainError("N values must be strictly increasing")
    if ns[0] <= 0 or any(j <= 0 for _, j in pts):
        raise DomainError("N and J must be positive for a log-log fit")
    x = np.array([math.log(n) for n in ns])
    # math.log handles J beyond float range exactly enough
    y = np.array([math.log(j) for _, j in pts])
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    residuals = y - (slope * x + intercept)
    return FitResult(float(slope), float(intercept), float(np.max(np.abs(residuals))), pts)


def geometric_schedule(n_min: int, n_max: int, factor: float) -> tuple[int, ...]:
    if n_min < 1 or n_max < n_min or factor <= 1:
        raise DomainError("geometric schedule needs 1 <= N_min <= N_max and factor > 1")
    out = []
    n = float(n_min)
    while round(n) <= n_max:
        v = int(round(n))
        if not out or v > out[-1]:
            out.append(v)
        n *= factor
    return tuple(out)


@dataclass
class ExperimentConfig:
    form: CubicForm
    r: int
    schedule: tuple[int, ...]
    variant: str = "S"
    threads: int = 1
    mem_cap: int = DEFAULT_MEM_CAP
    seed: int = 0
    tolerance: float = DEFAULT_TOLERANCE
    out: Path | None = None
    plot_out: Path | None = None

    def __post_init__(self):
        self.variant = normalize_variant(self.variant)
        self.schedule = tuple(int(n) for n in self.schedule)
        if self.r < 1:
            raise DomainError("r must be at least 1")
        if len(self.schedule) < 3:
            raise DomainError("the N schedule needs at least 3 points")
        if any(b <= a for a, b in zip(self.schedule, self.schedule[1:])):
            raise DomainError("the N schedule must be strictly increasing")
        if self.schedule[0] < 1:
            raise DomainError("schedule values must be positive")


def verdict(slope: float, e_max: int, tolerance: float) -> str:
    word = "consistent" if abs(slope - e_max) <= tolerance else "inconsistent"
    return f"{word} with e_max={e_max}"


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    points: list[dict] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)
    fit: FitResult | None = None
    flags: list[str] = field(default_factory=list)

    @property
    def exponents(self) -> tuple[int, int, int]:
        return diophantine_exponents(self.config.r)

    @property
    def verdict(self) -> str | None:
        if self.fit is None:
            return None
        return verdict(self.fit.slope, self.exponents[2], self.config.tolerance)

    def as_dict(self) -> dict:
        low, high, e_max = self.exponents
        cfg = self.config
        return {
            "schema": SCHEMA,
            "form": str(cfg.form),
            "r": cfg.r,
            "variant": cfg.variant,
            "schedule": list(cfg.schedule),
            "points": self.points,
            "failures": self.failures,
            "fit": self.fit.as_dict() if self.fit else None,
            "e_low": low,
            "e_high": high,
            "e_max": e_max,
            "tolerance": cfg.tolerance,
            "verdict": self.verdict,
            "flags": self.flags,
        }


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Count J_r(N) for each scheduled N independently, then fit the growth exponent."""
    report = ExperimentReport(config)
    if config.r >= 5:
        report.flags.append(SUPERCRITICAL_FLAG)
    if not config.form.is_nondegenerate:
        report.flags.append("degenerate form")
    for n in config.schedule:
        start = time.perf_counter()
        try:
            j = count_J(config.form, config.r, n, config.variant, config.threads, config.mem_cap)
        except (DomainError, BudgetError, MemoryError) as exc:
            report.failures.append({"N": n, "error": f"{type(exc).__name__}: {exc}"})
            continue
        elapsed = (time.perf_counter() - start) * 1000
        report.points.append({"N": n, "J": j, "elapsed_ms": round(elapsed, 3)})
    if len(report.points) >= 3:
        report.fit = fit_growth([(p["N"], p["J"]) for p in report.points])
    else:
        report.flags.append("fit skipped: fewer than 3 successful counts")
    if config.out is not None:
        Path(config.out).write_text(json.dumps(report.as_dict(), indent=2) + "\n")
    if config.plot_out is not None:
        write_plot_data(config.plot_out, [(p["N"], p["J"]) for p in report.points])
    return report


def write_plot_data(path, points: Sequence[tuple[int, int]]) -> None:
    lines = ["# N J"] + [f"{n} {j}" for n, j in points]
    Path(path).write_text("\n".join(lines) + "\n")

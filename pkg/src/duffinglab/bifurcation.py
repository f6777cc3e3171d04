"""Frequency-sweep engine for terminal-state bifurcation data, plus the named
parameter presets used throughout the package and the CLI."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analysis import LyapunovConfig
from .dynamics import ModelKind, ModelSpec, State, rhs_fn
from .integrators import IntegrationConfig, Method

__all__ = [
    "SweepConfig",
    "SweepRecord",
    "DynamicsPreset",
    "FdPreset",
    "sweep_omega",
    "preset",
    "PRESET_IDS",
]

# Samples per work unit.  Fixed (not derived from the worker count) so that
# results are bit-identical no matter how many threads evaluate the sweep.
_CHUNK = 256


@dataclass(frozen=True)
class SweepConfig:
    """One omega sweep: a model template integrated once per grid frequency.

    The grid is the closed uniform grid of ``n_samples`` points including
    both endpoints; every sample starts from the shared ``s0``.
    """

    model_template: ModelSpec
    omega_min: float
    omega_max: float
    n_samples: int
    s0: State
    t_max: float
    h: float

    def __post_init__(self):
        if not self.omega_min < self.omega_max:
            raise ValueError("omega_min must be below omega_max")
        if int(self.n_samples) != self.n_samples or self.n_samples < 2:
            raise ValueError("n_samples must be an integer >= 2")
        if not self.t_max > self.s0.t:
            raise ValueError("t_max must exceed the initial time")
        if not self.h > 0:
            raise ValueError("h must be positive")


@dataclass(frozen=True)
class SweepRecord:
    """Terminal state of one sweep sample.

    ``diverged`` marks samples whose integration overflowed; for those the
    terminal values are the last finite state reached.  The conservation
    residual is |(y-beta*x)_final - (y-beta*x)_initial| for ECOLOGY templates
    and 0 for all others.
    """

    omega: float
    x_final: float
    y_final: float
    conservation_residual: float
    diverged: bool


def _integrate_terminal_batch(
    model: ModelSpec, omegas: np.ndarray, s0: State, t_max: float, h: float
):
    """RK4-integrate one model per omega value, all lanes in lockstep.

    Returns terminal (q, p, diverged) arrays.  Lanes that go non-finite are
    frozen at their last finite state and flagged; the rest keep going.
    """
    f = rhs_fn(model, cos=np.cos, omega=omegas)
    n_steps = int(math.floor((t_max - s0.t) / h + 0.5))
    t0 = s0.t
    q = np.full(omegas.shape, float(s0.q))
    p = np.full(omegas.shape, float(s0.p))
    alive = np.ones(omegas.shape, dtype=bool)
    any_dead = False
    half_h = 0.5 * h
    sixth_h = h / 6.0

    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(n_steps):
            t = t0 + i * h
            k1q, k1p = f(q, p, t)
            k2q, k2p = f(q + half_h * k1q, p + half_h * k1p, t + half_h)
            k3q, k3p = f(q + half_h * k2q, p + half_h * k2p, t + half_h)
            k4q, k4p = f(q + h * k3q, p + h * k3p, t + h)
            qn = q + sixth_h * (k1q + 2.0 * (k2q + k3q) + k4q)
            pn = p + sixth_h * (k1p + 2.0 * (k2p + k3p) + k4p)

            ok = np.isfinite(qn) & np.isfinite(pn)
            if not any_dead and bool(ok.all()):
                q, p = qn, pn
                continue
            newly_dead = alive & ~ok
            if newly_dead.any():
                alive = alive & ok
                any_dead = True
                if not alive.any():
                    break
            np.copyto(q, qn, where=alive)
            np.copyto(p, pn, where=alive)
    return q, p, ~alive


def _worker_count() -> int:
    env = os.environ.get("DUFFING_LAB_THREADS", "").strip()
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(
                f"DUFFING_LAB_THREADS must be an integer, got {env!r}"
            ) from None
        if n > 0:
            return n
    return min(4, os.cpu_count() or 1)


def sweep_omega(cfg: SweepConfig, max_workers: int | None = None) -> list[SweepRecord]:
    """One record per grid frequency, in ascending omega order.

    Work is split into fixed-size chunks evaluated by a small thread pool
    (capped by ``max_workers`` or the DUFFING_LAB_THREADS environment
    variable); chunking is independent of the worker count, so the output is
    deterministic regardless of scheduling.
    """
    omegas = np.linspace(cfg.omega_min, cfg.omega_max, int(cfg.n_samples))
    model = cfg.model_template
    is_ecology = model.kind is ModelKind.ECOLOGY
    offset0 = cfg.s0.p - model.beta * cfg.s0.q if is_ecology else 0.0

    def run_chunk(sl: slice):
        return _integrate_terminal_batch(
            model, omegas[sl], cfg.s0, cfg.t_max, cfg.h
        )

    chunks = [slice(i, min(i + _CHUNK, omegas.size)) for i in range(0, omegas.size, _CHUNK)]
    workers = max_workers if max_workers else _worker_count()
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_chunk, chunks))
    else:
        parts = [run_chunk(sl) for sl in chunks]

    q = np.concatenate([part[0] for part in parts])
    p = np.concatenate([part[1] for part in parts])
    dead = np.concatenate([part[2] for part in parts])

    records = []
    for i in range(omegas.size):
        residual = abs((p[i] - model.beta * q[i]) - offset0) if is_ecology else 0.0
        records.append(
            SweepRecord(
                omega=float(omegas[i]),
                x_final=float(q[i]),
                y_final=float(p[i]),
                conservation_residual=float(residual),
                diverged=bool(dead[i]),
            )
        )
    return records


@dataclass(frozen=True)
class DynamicsPreset:
    """A single-trajectory case: model, initial state and run settings.

    ``paper_reported`` carries externally reported Lyapunov exponent values
    shipped for side-by-side comparison in CLI output; they are not targets
    this package reproduces or endorses.
    """

    case_id: str
    model: ModelSpec
    s0: State
    integration: IntegrationConfig
    lyapunov: LyapunovConfig
    paper_reported: tuple[float, float] | None = None


@dataclass(frozen=True)
class FdPreset:
    """A finite-difference recurrence case (see iterate_fd_duffing)."""

    case_id: str
    model: ModelSpec
    x0: float
    x1: float
    h: float
    n: int


_ORIGIN = State(0.0, 0.0, 0.0)
_LONG_RUN = IntegrationConfig(h=0.01, t0=0.0, t_max=10000.0, method=Method.RK4,
                              record_stride=100)
_CHAOS_RUN = IntegrationConfig(h=0.01, t0=0.0, t_max=800.0, method=Method.RK4)
_CHAOS_LYAP = LyapunovConfig(t_transient=100.0, t_total=800.0, h=0.01,
                             renorm_every=10)


def _bif_sweep(coupling_a, beta, alpha, omega_min, omega_max) -> SweepConfig:
    template = ModelSpec(
        kind=ModelKind.ECOLOGY,
        alpha=alpha,
        beta=beta,
        coupling_a=coupling_a,
        omega=omega_min,
    )
    return SweepConfig(
        model_template=template,
        omega_min=omega_min,
        omega_max=omega_max,
        n_samples=500,
        s0=_ORIGIN,
        t_max=10000.0,
        h=0.01,
    )


def _eco_dynamics(case_id, coupling_a, beta, omega, alpha, q0, p0) -> DynamicsPreset:
    return DynamicsPreset(
        case_id=case_id,
        model=ModelSpec(
            kind=ModelKind.ECOLOGY,
            alpha=alpha,
            beta=beta,
            omega=omega,
            coupling_a=coupling_a,
        ),
        s0=State(q0, p0, 0.0),
        integration=_LONG_RUN,
        lyapunov=_CHAOS_LYAP,
    )


def _quintic(case_id, gamma, paper_reported=None) -> DynamicsPreset:
    return DynamicsPreset(
        case_id=case_id,
        model=ModelSpec(
            kind=ModelKind.DUFFING_QUINTIC,
            delta=0.05,
            beta=0.3,
            gamma=gamma,
            omega=0.004,
        ),
        s0=_ORIGIN,
        integration=_CHAOS_RUN,
        lyapunov=_CHAOS_LYAP,
        paper_reported=paper_reported,
    )


_PRESETS = {
    "BIF_CASE_1": _bif_sweep(
        coupling_a=-0.095, beta=2.00056, alpha=-0.0000056,
        omega_min=0.000025, omega_max=0.003,
    ),
    "BIF_CASE_2": _bif_sweep(
        coupling_a=-0.000095, beta=-3.00056, alpha=-0.6,
        omega_min=0.0000237, omega_max=0.00281,
    ),
    "BIF_CASE_3": _bif_sweep(
        coupling_a=-0.000095, beta=-3.00056, alpha=-0.0006,
        omega_min=0.000000000000237, omega_max=0.0000000008,
    ),
    "ECO_DYN_1": _eco_dynamics(
        "ECO_DYN_1", coupling_a=0.2, beta=0.001, omega=0.06, alpha=-0.0005,
        q0=0.08, p0=0.07,
    ),
    "ECO_DYN_2": _eco_dynamics(
        "ECO_DYN_2", coupling_a=0.0004, beta=0.1, omega=0.01, alpha=0.005,
        q0=0.8, p0=0.9,
    ),
    "FD_PAPER": FdPreset(
        case_id="FD_PAPER",
        model=ModelSpec(
            kind=ModelKind.DUFFING_HOMOTOPY,
            delta=1.0,
            alpha=0.005,
            beta=0.02,
            gamma=-0.04,
            omega=0.001,
            lambda_h=0.1,
        ),
        x0=0.0,
        x1=0.0,
        h=0.01,
        n=10000,
    ),
    "CHAOS_A02": DynamicsPreset(
        case_id="CHAOS_A02",
        model=ModelSpec(
            kind=ModelKind.DUFFING_CHAOS, delta=0.05, gamma=0.2, omega=1.1
        ),
        s0=_ORIGIN,
        integration=_CHAOS_RUN,
        lyapunov=_CHAOS_LYAP,
        paper_reported=(0.503437, 0.551156),
    ),
    "QUINTIC_A00025": _quintic("QUINTIC_A00025", gamma=0.0025,
                               paper_reported=(11.1, 0.0)),
    "QUINTIC_A0002": _quintic("QUINTIC_A0002", gamma=0.2),
    "QUINTIC_A000025": _quintic("QUINTIC_A000025", gamma=0.00025),
}

PRESET_IDS = tuple(_PRESETS)


def preset(case_id: str):
    """Look up a named parameter set.

    Returns a fully populated SweepConfig for the BIF_CASE ids, a
    DynamicsPreset for the trajectory cases, and an FdPreset for FD_PAPER.

    Note on BIF_CASE_3: its frequencies are so small that omega*t stays
    below 1e-5 over the whole horizon, so cos(omega*t) is within 1e-10 of 1
    throughout; the sweep probes a near-constant-forcing regime.
    """
    try:
        return _PRESETS[case_id]
    except KeyError:
        raise ValueError(
            f"unknown preset {case_id!r}; known ids: {', '.join(PRESET_IDS)}"
        ) from None

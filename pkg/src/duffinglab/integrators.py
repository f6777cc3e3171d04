"""Fixed-step time integration (Euler, RK4) and the explicit second-order
finite-difference recurrence for the homotopy-embedded Duffing equation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dynamics import (
    FlaggedOverflow,
    ModelKind,
    ModelSpec,
    State,
    Trajectory,
    rhs_fn,
)

__all__ = [
    "Method",
    "IntegrationConfig",
    "step_euler",
    "step_rk4",
    "integrate",
    "iterate_fd_duffing",
]


class Method(str, Enum):
    EULER = "EULER"
    RK4 = "RK4"


@dataclass(frozen=True)
class IntegrationConfig:
    """Fixed-step run description.

    The step count is fixed at construction (nearest integer to
    (t_max - t0)/h, final partial step never taken) so a run is never
    re-derived from floating accumulation.  ``record_stride`` keeps every
    k-th step, for memory control on long runs.
    """

    h: float
    t0: float
    t_max: float
    method: Method = Method.RK4
    record_stride: int = 1

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("h must be positive")
        if not self.t_max > self.t0:
            raise ValueError("t_max must exceed t0")
        if (self.t_max - self.t0) / self.h < 1.0:
            raise ValueError("span must cover at least one step")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ValueError("record_stride must be a positive integer")

    @property
    def n_steps(self) -> int:
        return int(math.floor((self.t_max - self.t0) / self.h + 0.5))


def _euler_update(f, q, p, t, h):
    dq, dp = f(q, p, t)
    return q + h * dq, p + h * dp


def _rk4_update(f, q, p, t, h):
    k1q, k1p = f(q, p, t)
    k2q, k2p = f(q + 0.5 * h * k1q, p + 0.5 * h * k1p, t + 0.5 * h)
    k3q, k3p = f(q + 0.5 * h * k2q, p + 0.5 * h * k2p, t + 0.5 * h)
    k4q, k4p = f(q + h * k3q, p + h * k3p, t + h)
    return (
        q + (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q),
        p + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
    )


def _checked(q: float, p: float, t: float) -> State:
    s = State(q, p, t)
    if not (math.isfinite(q) and math.isfinite(p)):
        raise FlaggedOverflow(f"non-finite state at t={t}", state=s)
    return s


def step_euler(model: ModelSpec, s: State, h: float) -> State:
    """One explicit Euler update: s + h*rhs(model, s), time advanced by h."""
    if not h > 0:
        raise ValueError("h must be positive")
    try:
        q, p = _euler_update(rhs_fn(model), s.q, s.p, s.t, h)
    except (OverflowError, ValueError):
        raise FlaggedOverflow(f"update overflowed at t={s.t}", state=s) from None
    return _checked(q, p, s.t + h)


def step_rk4(model: ModelSpec, s: State, h: float) -> State:
    """One classical 4-stage Runge-Kutta update (4 rhs evaluations)."""
    if not h > 0:
        raise ValueError("h must be positive")
    try:
        q, p = _rk4_update(rhs_fn(model), s.q, s.p, s.t, h)
    except (OverflowError, ValueError):
        raise FlaggedOverflow(f"update overflowed at t={s.t}", state=s) from None
    return _checked(q, p, s.t + h)


def integrate(model: ModelSpec, s0: State, cfg: IntegrationConfig) -> Trajectory:
    """Iterate the configured stepper from s0 over the configured span.

    Records s0, every ``record_stride``-th step, and the final state.  Step
    times are computed as t0 + i*h rather than accumulated.  On overflow the
    finite prefix is returned with ``diverged`` set instead of raising.
    """
    if s0.t != cfg.t0:
        raise ValueError("s0.t must equal cfg.t0")
    f = rhs_fn(model)
    update = _rk4_update if cfg.method is Method.RK4 else _euler_update
    h, t0, n, stride = cfg.h, cfg.t0, cfg.n_steps, cfg.record_stride

    samples = [s0]
    q, p = s0.q, s0.p
    last_recorded = 0
    diverged = False
    for i in range(1, n + 1):
        try:
            q_new, p_new = update(f, q, p, t0 + (i - 1) * h, h)
        except (OverflowError, ValueError):
            q_new = p_new = math.inf
        if not (math.isfinite(q_new) and math.isfinite(p_new)):
            diverged = True
            if last_recorded < i - 1:
                samples.append(State(q, p, t0 + (i - 1) * h))
            break
        q, p = q_new, p_new
        if i % stride == 0:
            samples.append(State(q, p, t0 + i * h))
            last_recorded = i
    if not diverged and last_recorded < n:
        samples.append(State(q, p, t0 + n * h))
    return Trajectory(samples=samples, model=model, diverged=diverged)


def iterate_fd_duffing(
    params: ModelSpec, x0: float, x1: float, h: float, n: int
) -> np.ndarray:
    """Explicit second-difference recurrence for the embedded Duffing equation.

    Starting from displacements x0, x1, each next value solves

        x[k+1] = ((2 + h*l)*x[k] - x[k-1]
                  - h^2*l*(alpha*x[k] + beta*x[k]^3)
                  + h^2*l*gamma*cos(omega*k*h)) / (1 + h*l)

    with l = lambda_h.  Returns x[0..n]; if an element overflows the sequence
    is truncated at the last finite value (a shorter-than-requested result is
    the overflow flag).
    """
    if params.kind is not ModelKind.DUFFING_HOMOTOPY:
        raise ValueError("the recurrence is defined for DUFFING_HOMOTOPY models")
    if n < 2:
        raise ValueError("n must be at least 2")
    if not h > 0:
        raise ValueError("h must be positive")

    lam, al, b, g, w = (
        params.lambda_h,
        params.alpha,
        params.beta,
        params.gamma,
        params.omega,
    )
    hl = h * lam
    h2l = h * h * lam
    denom = 1.0 + hl

    xs = np.empty(n + 1)
    xs[0], xs[1] = x0, x1
    x_prev, xk = float(x0), float(x1)
    for k in range(1, n):
        try:
            x_next = (
                (2.0 + hl) * xk
                - x_prev
                - h2l * (al * xk + b * xk * xk * xk)
                + h2l * g * math.cos(w * k * h)
            ) / denom
        except (OverflowError, ValueError):
            return xs[: k + 1].copy()
        if not math.isfinite(x_next):
            return xs[: k + 1].copy()
        xs[k + 1] = x_next
        x_prev, xk = xk, x_next
    return xs

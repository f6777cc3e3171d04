"""Model definitions: right-hand sides, Jacobians, and the ecology invariant.

Every dynamical system handled by this package is a two-dimensional
non-autonomous flow described by a :class:`ModelSpec`.  The spec is the single
source of truth: integrators, Lyapunov estimation and parameter sweeps all
evaluate the same formulas defined here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

__all__ = [
    "ModelKind",
    "ModelSpec",
    "State",
    "Trajectory",
    "FlaggedOverflow",
    "rhs",
    "jacobian",
    "conserved_offset",
]


class ModelKind(str, Enum):
    """The supported model family."""

    DUFFING_CLASSIC = "DUFFING_CLASSIC"
    DUFFING_HOMOTOPY = "DUFFING_HOMOTOPY"
    DUFFING_CHAOS = "DUFFING_CHAOS"
    DUFFING_QUINTIC = "DUFFING_QUINTIC"
    ECOLOGY = "ECOLOGY"
    LINEAR_TEST = "LINEAR_TEST"


class FlaggedOverflow(RuntimeError):
    """Non-fatal signal that an evaluation produced a non-finite state.

    Integrators catch this and return partial results flagged as diverged;
    sweeps record the sample as diverged and keep going.
    """

    def __init__(self, message: str, state: "State | None" = None):
        super().__init__(message)
        self.state = state


@dataclass(frozen=True)
class ModelSpec:
    """One dynamical system plus its coefficient set.

    Which fields are read depends on ``kind``; unread fields are ignored,
    never rejected.

    kind                  dq/dt   dp/dt
    -------------------   -----   ------------------------------------------
    DUFFING_CLASSIC       p       g*cos(w*t) - d*p - a*q - b*q^3
    DUFFING_HOMOTOPY      p       l*(g*cos(w*t) - d*p - a*q - b*q^3)
    DUFFING_CHAOS         p       q - q^3 - d*p + g*cos(w*t)
    DUFFING_QUINTIC       p       q + b*q^3 - d*p + g*cos(w*t) - g*q^5
    ECOLOGY               dq = -A*p - cos(w*t) - q^3 + a*q^5,  dp = b*dq
    LINEAR_TEST           p       -d*p - a*q

    with d=delta, a=alpha, b=beta, g=gamma, w=omega, l=lambda_h,
    A=coupling_a.  For ECOLOGY the second rate is defined as ``beta`` times
    the freshly computed first rate, which makes ``p - beta*q`` an exact
    constant of the motion (see :func:`conserved_offset`).
    """

    kind: ModelKind
    delta: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    omega: float = 0.0
    lambda_h: float = 1.0
    coupling_a: float = 0.0

    def __post_init__(self):
        if self.kind is ModelKind.DUFFING_HOMOTOPY:
            if not 0.0 <= self.lambda_h <= 1.0:
                raise ValueError(
                    f"lambda_h must lie in [0, 1], got {self.lambda_h}"
                )


@dataclass(frozen=True)
class State:
    """Instantaneous phase-space point (q, p) at time t.

    q is displacement x for the Duffing kinds and the radioactivity rate for
    ECOLOGY; p is velocity v, respectively the cancer-incidence rate.
    """

    q: float
    p: float
    t: float = 0.0


@dataclass
class Trajectory:
    """Ordered (time, state) samples produced by a solver.

    ``diverged`` is set when the producing integration aborted on overflow,
    in which case ``samples`` holds the finite prefix.
    """

    samples: list[State]
    model: ModelSpec
    diverged: bool = False

    def __post_init__(self):
        if not self.samples:
            raise ValueError("trajectory must contain at least one sample")
        t_prev = self.samples[0].t
        for s in self.samples[1:]:
            if not s.t > t_prev:
                raise ValueError("trajectory times must be strictly increasing")
            t_prev = s.t

    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    def qs(self) -> np.ndarray:
        return np.array([s.q for s in self.samples])

    def ps(self) -> np.ndarray:
        return np.array([s.p for s in self.samples])


def rhs_fn(model: ModelSpec, cos: Callable = math.cos, omega=None) -> Callable:
    """Bind a model to a fast ``f(q, p, t) -> (dq, dp)`` callable.

    ``cos`` selects the scalar (math.cos) or vectorized (np.cos) flavor; all
    arithmetic broadcasts, so q, p, t and the optional ``omega`` override may
    be floats or arrays.  The omega override exists for frequency sweeps.
    """
    w = model.omega if omega is None else omega
    k = model.kind
    if k is ModelKind.DUFFING_CLASSIC:
        d, a, b, g = model.delta, model.alpha, model.beta, model.gamma

        def f(q, p, t):
            return p, g * cos(w * t) - d * p - a * q - b * q * q * q

    elif k is ModelKind.DUFFING_HOMOTOPY:
        lam = model.lambda_h
        d, a, b, g = model.delta, model.alpha, model.beta, model.gamma

        def f(q, p, t):
            return p, lam * (g * cos(w * t) - d * p - a * q - b * q * q * q)

    elif k is ModelKind.DUFFING_CHAOS:
        d, g = model.delta, model.gamma

        def f(q, p, t):
            return p, q - q * q * q - d * p + g * cos(w * t)

    elif k is ModelKind.DUFFING_QUINTIC:
        d, b, g = model.delta, model.beta, model.gamma

        def f(q, p, t):
            q3 = q * q * q
            return p, q + b * q3 - d * p + g * cos(w * t) - g * q3 * q * q

    elif k is ModelKind.ECOLOGY:
        a_c, al, b = model.coupling_a, model.alpha, model.beta

        def f(q, p, t):
            q3 = q * q * q
            dq = -a_c * p - cos(w * t) - q3 + al * q3 * q * q
            return dq, b * dq

    elif k is ModelKind.LINEAR_TEST:
        d, a = model.delta, model.alpha

        def f(q, p, t):
            return p, -d * p - a * q

    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unknown model kind {k}")
    return f


def jac_fn(model: ModelSpec) -> Callable:
    """Bind a model to ``j(q, p) -> (j11, j12, j21, j22)``.

    Entries are the exact partials of (dq, dp) with respect to (q, p); time
    enters the flows only through the forcing term, which is state-free, so
    no time column exists.
    """
    k = model.kind
    if k is ModelKind.DUFFING_CLASSIC:
        d, a, b = model.delta, model.alpha, model.beta

        def j(q, p):
            return 0.0, 1.0, -a - 3.0 * b * q * q, -d

    elif k is ModelKind.DUFFING_HOMOTOPY:
        lam = model.lambda_h
        d, a, b = model.delta, model.alpha, model.beta

        def j(q, p):
            return 0.0, 1.0, -lam * (a + 3.0 * b * q * q), -lam * d

    elif k is ModelKind.DUFFING_CHAOS:
        d = model.delta

        def j(q, p):
            return 0.0, 1.0, 1.0 - 3.0 * q * q, -d

    elif k is ModelKind.DUFFING_QUINTIC:
        d, b, g = model.delta, model.beta, model.gamma

        def j(q, p):
            q2 = q * q
            return 0.0, 1.0, 1.0 + 3.0 * b * q2 - 5.0 * g * q2 * q2, -d

    elif k is ModelKind.ECOLOGY:
        a_c, al, b = model.coupling_a, model.alpha, model.beta

        def j(q, p):
            q2 = q * q
            e = -3.0 * q2 + 5.0 * al * q2 * q2
            return e, -a_c, b * e, -b * a_c

    elif k is ModelKind.LINEAR_TEST:
        d, a = model.delta, model.alpha

        def j(q, p):
            return 0.0, 1.0, -a, -d

    else:  # pragma: no cover
        raise ValueError(f"unknown model kind {k}")
    return j


def rhs(model: ModelSpec, s: State) -> tuple[float, float]:
    """Time derivative (dq/dt, dp/dt) of the model at state ``s``.

    Raises :class:`FlaggedOverflow` carrying ``s`` if the result is not
    finite.
    """
    dq, dp = rhs_fn(model)(s.q, s.p, s.t)
    if not (math.isfinite(dq) and math.isfinite(dp)):
        raise FlaggedOverflow(f"non-finite rhs at t={s.t}", state=s)
    return dq, dp


def jacobian(model: ModelSpec, s: State) -> np.ndarray:
    """2x2 matrix of exact partials of (dq, dp) with respect to (q, p)."""
    j11, j12, j21, j22 = jac_fn(model)(s.q, s.p)
    out = np.array([[j11, j12], [j21, j22]], dtype=float)
    if not np.all(np.isfinite(out)):
        raise FlaggedOverflow(f"non-finite jacobian at t={s.t}", state=s)
    return out


def conserved_offset(model: ModelSpec, s: State) -> float:
    """The ECOLOGY constant of motion p - beta*q.

    Because dp/dt is defined as beta times dq/dt, this offset is invariant
    along any exact solution; its numerical drift measures integrator error.
    """
    if model.kind is not ModelKind.ECOLOGY:
        raise ValueError("conserved_offset is defined for ECOLOGY models only")
    return s.p - model.beta * s.q

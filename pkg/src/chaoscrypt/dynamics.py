"""The 4-D hyper-chaotic flow and a bit-reproducible fixed-step integrator.

    x' = a (y - x)
    y' = -e1 x z + c y + k_fb w
    z' = -b + e2 y^2
    w' = -m y

All arithmetic is plain IEEE-754 double precision with a fixed evaluation
order. The compiled kernel and the pure-Python step below evaluate the same
expressions in the same order, so they agree bit for bit (the test-suite
checks this). Decryption depends on that: it regenerates the keystream.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, fields
from typing import IO, NamedTuple

import numba
import numpy as np

from .errors import IntegrationDiverged, InvalidParams

DIVERGENCE_LIMIT = 1e12
DEFAULT_DT = 0.002
DEFAULT_TRANSIENT = 1000


@dataclass(frozen=True)
class SystemParams:
    a: float = 10.0
    b: float = 3.0
    c: float = 2.5
    e1: float = 12.0
    e2: float = 0.1
    k_fb: float = 2.0
    m: float = 2.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise InvalidParams(f"parameter {f.name} must be a positive finite number, got {v!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.e1, self.e2, self.k_fb, self.m], dtype=np.float64)

    @property
    def divergence(self) -> float:
        """Trace of the Jacobian, constant over the whole phase space."""
        return -self.a + self.c


class State4(NamedTuple):
    x: float
    y: float
    z: float
    w: float


REFERENCE_PARAMS = SystemParams()
REFERENCE_INITIAL = State4(1.0, 1.0, 1.0, 1.0)


@dataclass(frozen=True)
class Trajectory:
    dt: float
    states: np.ndarray = field(repr=False)  # shape (n, 4)
    transient_discarded: int = 0

    def __len__(self):
        return len(self.states)

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.states)) * self.dt

    def write_csv(self, fh: IO[str]) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "x", "y", "z", "w"])
        for i, s in enumerate(self.states):
            writer.writerow([repr(i * self.dt)] + [repr(float(v)) for v in s])


def derivative(s: State4, p: SystemParams) -> State4:
    x, y, z, w = s
    return State4(
        p.a * (y - x),
        -p.e1 * x * z + p.c * y + p.k_fb * w,
        -p.b + p.e2 * y * y,
        -p.m * y,
    )


def _check(s, where: str) -> None:
    for v in s:
        if not math.isfinite(v) or abs(v) > DIVERGENCE_LIMIT:
            raise IntegrationDiverged(f"state left the finite region {where}: {tuple(s)}")


def rk4_step(s: State4, p: SystemParams, dt: float) -> State4:
    """One classical Runge-Kutta step. Reference path for the compiled kernel."""
    if not dt > 0:
        raise InvalidParams(f"dt must be > 0, got {dt}")
    h = 0.5 * dt
    k1 = derivative(s, p)
    k2 = derivative(State4(*(s[i] + h * k1[i] for i in range(4))), p)
    k3 = derivative(State4(*(s[i] + h * k2[i] for i in range(4))), p)
    k4 = derivative(State4(*(s[i] + dt * k3[i] for i in range(4))), p)
    sixth = dt / 6.0
    out = State4(*(s[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) for i in range(4)))
    _check(out, "after one step")
    return out


@numba.njit(cache=True)
def _deriv(x, y, z, w, a, b, c, e1, e2, k, m, out):
    out[0] = a * (y - x)
    out[1] = -e1 * x * z + c * y + k * w
    out[2] = -b + e2 * y * y
    out[3] = -m * y


@numba.njit(cache=True)
def _integrate(s0, prm, dt, n_steps, n_transient, limit):
    """Integrate n_transient + n_steps RK4 steps, keeping the post-transient states.

    Returns (states, failed_step); failed_step is -1 on success.
    """
    a, b, c, e1, e2, k, m = prm[0], prm[1], prm[2], prm[3], prm[4], prm[5], prm[6]
    out = np.empty((n_steps + 1, 4))
    s = s0.copy()
    t = np.empty(4)
    k1 = np.empty(4)
    k2 = np.empty(4)
    k3 = np.empty(4)
    k4 = np.empty(4)
    h = 0.5 * dt
    sixth = dt / 6.0
    if n_transient == 0:
        out[0, :] = s
    total = n_transient + n_steps
    for n in range(total):
        _deriv(s[0], s[1], s[2], s[3], a, b, c, e1, e2, k, m, k1)
        for i in range(4):
            t[i] = s[i] + h * k1[i]
        _deriv(t[0], t[1], t[2], t[3], a, b, c, e1, e2, k, m, k2)
        for i in range(4):
            t[i] = s[i] + h * k2[i]
        _deriv(t[0], t[1], t[2], t[3], a, b, c, e1, e2, k, m, k3)
        for i in range(4):
            t[i] = s[i] + dt * k3[i]
        _deriv(t[0], t[1], t[2], t[3], a, b, c, e1, e2, k, m, k4)
        for i in range(4):
            s[i] = s[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            if not (abs(s[i]) <= limit):
                return out, n + 1
        j = n + 1 - n_transient
        if j >= 0:
            out[j, :] = s
    return out, -1


def simulate(
    initial: State4,
    p: SystemParams,
    dt: float = DEFAULT_DT,
    n_steps: int = 0,
    n_transient: int = DEFAULT_TRANSIENT,
) -> Trajectory:
    """Integrate and drop the transient.

    The returned trajectory holds ``n_steps + 1`` states: the state reached
    after the transient followed by every subsequent step.
    """
    if not dt > 0:
        raise InvalidParams(f"dt must be > 0, got {dt}")
    if n_steps < 0 or n_transient < 0:
        raise InvalidParams("n_steps and n_transient must be >= 0")
    s0 = np.array(initial, dtype=np.float64)
    _check(s0, "at the initial condition")
    states, failed = _integrate(s0, p.as_array(), float(dt), int(n_steps), int(n_transient), DIVERGENCE_LIMIT)
    if failed >= 0:
        raise IntegrationDiverged(f"integration diverged at step {failed} (dt={dt})")
    return Trajectory(dt=float(dt), states=states, transient_discarded=int(n_transient))


def find_equilibria(p: SystemParams) -> list[State4]:
    """Solve derivative(s, p) = 0.

    w' = 0 forces y = 0 (m > 0). Then z' = -b + e2*0 = -b, which vanishes only
    for b = 0; positive b leaves no solution, so the list is always empty for
    valid parameters.
    """
    if not isinstance(p, SystemParams):
        raise InvalidParams("expected SystemParams")
    # w' = 0 gives y = 0, leaving z' = -b, which is nonzero for every valid b
    return []

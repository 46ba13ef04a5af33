"""Full Lyapunov spectrum by tangent-space re-orthonormalization.

State and four tangent vectors are advanced together with RK4; every
``renorm_every`` steps the tangent vectors are Gram-Schmidt orthonormalized
and the logs of their stretch factors are accumulated.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import IO, NamedTuple

import numba
import numpy as np

from .dynamics import DIVERGENCE_LIMIT, State4, SystemParams
from .errors import IntegrationDiverged, InvalidParams


class LyapunovSpectrum(NamedTuple):
    le1: float
    le2: float
    le3: float
    le4: float

    @property
    def total(self) -> float:
        return self.le1 + self.le2 + self.le3 + self.le4


@dataclass
class TangentFrame:
    base_state: State4
    basis: np.ndarray  # 4x4, columns are the perturbation vectors

    def orthonormalize(self) -> np.ndarray:
        """Gram-Schmidt the columns in place; returns the stretch factors."""
        q, norms = _gram_schmidt(np.ascontiguousarray(self.basis.T))
        self.basis = q.T.copy()
        return norms


@dataclass(frozen=True)
class SpectrumRun:
    spectrum: LyapunovSpectrum
    history: np.ndarray = field(repr=False)  # rows: t, running le1..le4 (unsorted, GS order)


def jacobian(s: State4, p: SystemParams) -> np.ndarray:
    x, y, z, w = s
    return np.array(
        [
            [-p.a, p.a, 0.0, 0.0],
            [-p.e1 * z, p.c, -p.e1 * x, p.k_fb],
            [0.0, 2.0 * p.e2 * y, 0.0, 0.0],
            [0.0, -p.m, 0.0, 0.0],
        ]
    )


@numba.njit(cache=True)
def _gram_schmidt(v):
    # rows of v are the vectors; modified Gram-Schmidt in row order
    n = v.shape[0]
    norms = np.empty(n)
    for j in range(n):
        for i in range(j):
            d = 0.0
            for q in range(v.shape[1]):
                d += v[j, q] * v[i, q]
            for q in range(v.shape[1]):
                v[j, q] -= d * v[i, q]
        nr = 0.0
        for q in range(v.shape[1]):
            nr += v[j, q] * v[j, q]
        nr = math.sqrt(nr)
        norms[j] = nr
        for q in range(v.shape[1]):
            v[j, q] /= nr
    return v, norms


@numba.njit(cache=True)
def _rhs(Y, prm, out):
    a, b, c, e1, e2, k, m = prm[0], prm[1], prm[2], prm[3], prm[4], prm[5], prm[6]
    x, y, z, w = Y[0, 0], Y[0, 1], Y[0, 2], Y[0, 3]
    out[0, 0] = a * (y - x)
    out[0, 1] = -e1 * x * z + c * y + k * w
    out[0, 2] = -b + e2 * y * y
    out[0, 3] = -m * y
    for i in range(1, 5):
        u0, u1, u2, u3 = Y[i, 0], Y[i, 1], Y[i, 2], Y[i, 3]
        out[i, 0] = -a * u0 + a * u1
        out[i, 1] = -e1 * z * u0 + c * u1 - e1 * x * u2 + k * u3
        out[i, 2] = 2.0 * e2 * y * u1
        out[i, 3] = -m * u1


@numba.njit(cache=True)
def _spectrum_kernel(s0, basis_rows, prm, dt, n_transient, n_steps, renorm_every, record_every, limit):
    Y = np.empty((5, 4))
    Y[0, :] = s0
    Y[1:, :] = basis_rows
    k1 = np.empty((5, 4))
    k2 = np.empty((5, 4))
    k3 = np.empty((5, 4))
    k4 = np.empty((5, 4))
    T = np.empty((5, 4))
    acc = np.zeros(4)
    n_rec = 0
    if record_every > 0:
        n_rec = n_steps // record_every
    hist = np.empty((n_rec, 5))
    r = 0
    h = 0.5 * dt
    sixth = dt / 6.0
    for n in range(n_transient + n_steps):
        _rhs(Y, prm, k1)
        for i in range(5):
            for q in range(4):
                T[i, q] = Y[i, q] + h * k1[i, q]
        _rhs(T, prm, k2)
        for i in range(5):
            for q in range(4):
                T[i, q] = Y[i, q] + h * k2[i, q]
        _rhs(T, prm, k3)
        for i in range(5):
            for q in range(4):
                T[i, q] = Y[i, q] + dt * k3[i, q]
        _rhs(T, prm, k4)
        for i in range(5):
            for q in range(4):
                Y[i, q] = Y[i, q] + sixth * (k1[i, q] + 2.0 * k2[i, q] + 2.0 * k3[i, q] + k4[i, q])
        for q in range(4):
            if not (abs(Y[0, q]) <= limit):
                return acc, hist, n + 1
        done = n + 1
        if done % renorm_every == 0 or done == n_transient or done == n_transient + n_steps:
            _, norms = _gram_schmidt(Y[1:, :])
            if done > n_transient:
                for j in range(4):
                    acc[j] += math.log(norms[j])
        if record_every > 0 and done > n_transient and (done - n_transient) % record_every == 0 and r < n_rec:
            el = (done - n_transient) * dt
            hist[r, 0] = el
            for j in range(4):
                hist[r, j + 1] = acc[j] / el
            r += 1
    return acc / (n_steps * dt), hist, -1


def run_spectrum(
    p: SystemParams,
    initial: State4,
    dt: float = 0.002,
    t_total: float = 5000.0,
    renorm_every: int = 10,
    transient: float = 10.0,
    basis: np.ndarray | None = None,
    record_every: int = 0,
) -> SpectrumRun:
    """Like :func:`lyapunov_spectrum` but also returns running estimates.

    ``record_every`` (in steps) controls the history; 0 disables it. A
    renormalization is forced at the end of the transient so accumulation
    starts from an orthonormal frame.
    """
    if not dt > 0 or not t_total > 0:
        raise InvalidParams("dt and t_total must be > 0")
    if renorm_every < 1:
        raise InvalidParams("renorm_every must be >= 1")
    if basis is None:
        basis = np.eye(4)
    basis = np.asarray(basis, dtype=np.float64)
    if basis.shape != (4, 4):
        raise InvalidParams("tangent basis must be 4x4")
    n_steps = int(round(t_total / dt))
    n_transient = int(round(transient / dt))
    acc, hist, failed = _spectrum_kernel(
        np.array(initial, dtype=np.float64),
        np.ascontiguousarray(basis.T),
        p.as_array(),
        float(dt),
        n_transient,
        n_steps,
        int(renorm_every),
        int(record_every),
        DIVERGENCE_LIMIT,
    )
    if failed >= 0:
        raise IntegrationDiverged(f"flow diverged at step {failed}")
    spec = LyapunovSpectrum(*sorted((float(v) for v in acc), reverse=True))
    return SpectrumRun(spectrum=spec, history=hist)


def lyapunov_spectrum(
    p: SystemParams,
    initial: State4,
    dt: float = 0.002,
    t_total: float = 5000.0,
    renorm_every: int = 10,
    transient: float = 10.0,
    basis: np.ndarray | None = None,
) -> LyapunovSpectrum:
    return run_spectrum(p, initial, dt, t_total, renorm_every, transient, basis).spectrum


def is_hyperchaotic(spec: LyapunovSpectrum, threshold: float = 0.01) -> bool:
    if not threshold > 0:
        raise InvalidParams("threshold must be > 0")
    return spec.le1 > threshold and spec.le2 > threshold


def write_history_csv(history: np.ndarray, fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["t", "le1", "le2", "le3", "le4"])
    for row in history:
        writer.writerow([repr(float(v)) for v in row])

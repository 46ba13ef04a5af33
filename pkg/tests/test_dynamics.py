import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chaoscrypt.analysis import divergence_time
from chaoscrypt.dynamics import (
    REFERENCE_INITIAL,
    REFERENCE_PARAMS,
    State4,
    SystemParams,
    derivative,
    find_equilibria,
    rk4_step,
    simulate,
)
from chaoscrypt.errors import IntegrationDiverged, InvalidParams

P = REFERENCE_PARAMS


def _euler(s, dt):
    d = derivative(s, P)
    return np.array(s) + dt * np.array(d)


def test_derivative_examples():
    assert derivative(State4(1, 1, 1, 1), P) == pytest.approx((0, -7.5, -2.9, -2), abs=1e-15)
    assert derivative(State4(0, 0, 0, 0), P) == (0, 0, -3, 0)
    assert derivative(State4(1, 0, 0, 0), P) == (-10, 0, -3, 0)


def test_params_must_be_positive():
    with pytest.raises(InvalidParams):
        SystemParams(b=-1)
    with pytest.raises(InvalidParams):
        SystemParams(k_fb=0)
    with pytest.raises(InvalidParams):
        SystemParams(a=float("nan"))


def test_rk4_consistency_dt_to_zero():
    s = State4(0.3, -1.2, 2.0, 0.7)
    gaps = [np.linalg.norm(np.subtract(rk4_step(s, P, dt), s)) for dt in (1e-2, 1e-4, 1e-6)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-4


def test_rk4_departs_from_euler_at_second_order():
    s = State4(0.3, -1.2, 2.0, 0.7)
    defect = {dt: np.linalg.norm(np.subtract(rk4_step(s, P, dt), _euler(s, dt))) for dt in (1e-3, 1e-4)}
    ratio = defect[1e-3] / defect[1e-4]
    assert 90 < ratio < 110


def test_richardson_half_steps():
    # local error of RK4 is O(dt^5): halving dt scales the one-vs-two-step gap by ~32
    s = State4(0.3, -1.2, 2.0, 0.7)

    def gap(dt):
        full = rk4_step(s, P, dt)
        half = rk4_step(rk4_step(s, P, dt / 2), P, dt / 2)
        return np.linalg.norm(np.subtract(full, half))

    g1, g2 = gap(2e-3), gap(1e-3)
    assert g2 < 1e-10
    assert 28 < g1 / g2 < 36


def test_compiled_kernel_bit_identical_to_reference_step():
    traj = simulate(REFERENCE_INITIAL, P, 0.002, 3000, 0)
    s = REFERENCE_INITIAL
    ref = [s]
    for _ in range(3000):
        s = rk4_step(s, P, 0.002)
        ref.append(s)
    assert np.array_equal(traj.states, np.array(ref))


def test_simulate_zero_steps():
    traj = simulate(REFERENCE_INITIAL, P, 0.002, 0, 0)
    assert traj.states.shape == (1, 4)
    assert tuple(traj.states[0]) == REFERENCE_INITIAL
    assert traj.transient_discarded == 0


def test_simulate_discards_transient():
    full = simulate(REFERENCE_INITIAL, P, 0.002, 150, 0)
    cut = simulate(REFERENCE_INITIAL, P, 0.002, 100, 50)
    assert len(cut) == 101
    assert cut.transient_discarded == 50
    assert np.array_equal(cut.states, full.states[50:])


def test_simulate_deterministic():
    a = simulate(REFERENCE_INITIAL, P, 0.002, 5000, 100)
    b = simulate(REFERENCE_INITIAL, P, 0.002, 5000, 100)
    assert a.states.tobytes() == b.states.tobytes()


def test_attractor_bounded():
    traj = simulate(REFERENCE_INITIAL, P, 0.002, 100_000, 0)
    assert np.isfinite(traj.states).all()
    assert np.abs(traj.states).max() < 1e3


def test_divergence_guard():
    with pytest.raises(IntegrationDiverged):
        simulate(State4(0, 1e5, 0, 0), P, 0.01, 1000, 0)
    with pytest.raises(IntegrationDiverged):
        rk4_step(State4(0, 1e11, 0, 0), P, 0.01)
    with pytest.raises(IntegrationDiverged):
        simulate(State4(math.nan, 0, 0, 0), P, 0.01, 10, 0)


def test_simulate_rejects_bad_arguments():
    with pytest.raises(InvalidParams):
        simulate(REFERENCE_INITIAL, P, 0.0, 10, 0)
    with pytest.raises(InvalidParams):
        simulate(REFERENCE_INITIAL, P, 0.002, -1, 0)
    with pytest.raises(InvalidParams):
        rk4_step(REFERENCE_INITIAL, P, -0.1)


def test_trajectory_csv():
    traj = simulate(REFERENCE_INITIAL, P, 0.5, 2, 0)
    buf = io.StringIO()
    traj.write_csv(buf)
    rows = buf.getvalue().splitlines()
    assert rows[0] == "t,x,y,z,w"
    assert len(rows) == 4
    assert rows[1] == "0.0,1.0,1.0,1.0,1.0"
    assert rows[3].startswith("1.0,")


def test_no_equilibria_reference():
    assert find_equilibria(P) == []
    assert P.divergence == -7.5


def test_sensitive_dependence_on_initial_conditions():
    t = divergence_time(P, REFERENCE_INITIAL, delta=1e-15, component="y", t_max=50.0, threshold=1.0)
    assert t is not None and t < 50.0


positive = st.floats(min_value=1e-3, max_value=50, allow_nan=False)


@settings(max_examples=100, deadline=None)
@given(positive, positive, positive, positive, positive, positive, positive)
def test_no_equilibria_random_params(a, b, c, e1, e2, k, m):
    assert find_equilibria(SystemParams(a, b, c, e1, e2, k, m)) == []


@settings(max_examples=100, deadline=None)
@given(positive, positive, positive, positive, positive, positive, positive)
def test_vector_field_never_vanishes(a, b, c, e1, e2, k, m):
    p = SystemParams(a, b, c, e1, e2, k, m)
    grid = np.linspace(-20, 20, 5)
    for x in grid:
        for y in grid:
            for z in grid:
                for w in grid:
                    assert max(abs(v) for v in derivative(State4(x, y, z, w), p)) > 0
    # the only way to zero y' and w' and x' is y = x = 0, which leaves z' = -b
    assert derivative(State4(0.0, 0.0, 1.0, 1.0), p)[2] == -b

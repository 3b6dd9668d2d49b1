"""Conservative RK4 transport: invariants, stationarity, reversal, the
sup-norm watchdog and diagnostics plumbing."""

import csv

import numpy as np
import pytest

from casimirlab import (
    ScalarField,
    SimConfig,
    SolverError,
    SupnormError,
    hamiltonian,
    inner,
    norm,
    rhs,
    simulate,
    step_rk4,
    supnorm,
    write_diagnostics_csv,
)
from casimirlab.demo import affine_profile, eigenfunction_field, eigenmix
from testutil import mode_eigenvalue


# ---------------------------------------------------------------------------
# configuration validation


@pytest.mark.parametrize(
    "kw",
    [
        dict(dt=0.0, t_end=1.0),
        dict(dt=-0.1, t_end=1.0),
        dict(dt=0.1, t_end=0.05),
        dict(dt=0.1, t_end=1.0, supnorm_cap=0.0),
        dict(dt=0.1, t_end=1.0, diag_every=0),
        dict(dt=0.1, t_end=1.0, solver_tol=0.0),
    ],
)
def test_config_rejects_bad_values(kw):
    with pytest.raises(ValueError):
        SimConfig(**kw)


# ---------------------------------------------------------------------------
# the tendency and the energy


def test_hamiltonian_of_eigenfunction(g32):
    w = eigenfunction_field(g32, 1, 1)
    lam = mode_eigenvalue(g32, 1, 1)
    # H = ||w||^2 / (2 lambda) and the mode is normalized
    assert abs(hamiltonian(w) - 0.5 * norm(w) ** 2 / lam) < 1e-14
    assert abs(norm(w) - 1.0) < 1e-13


def test_rhs_vanishes_on_eigenfunction(g32):
    w = eigenfunction_field(g32, 2, 3)
    assert supnorm(rhs(w)) < 1e-12


def test_single_step_keeps_eigenfunction(g32):
    w = eigenfunction_field(g32, 1, 2)
    w1 = step_rk4(w, 1e-2)
    assert norm(ScalarField(g32, w1.values - w.values)) / norm(w) < 1e-8


# ---------------------------------------------------------------------------
# invariants over a short run


def test_quadratic_invariants_short_run(g32):
    cfg = SimConfig(dt=1e-3, t_end=0.05, diag_every=10)
    _, rows = simulate(eigenmix(g32), cfg)
    e0, s0 = rows[0].energy, rows[0].enstrophy
    for r in rows[1:]:
        assert abs(r.energy - e0) <= 1e-13 * abs(e0)
        assert abs(r.enstrophy - s0) <= 1e-13 * abs(s0)


def test_time_reversal_returns_to_start(g32):
    w0 = eigenmix(g32)
    w = w0
    for _ in range(20):
        w = step_rk4(w, 1e-3)
    for _ in range(20):
        w = step_rk4(w, -1e-3)
    assert norm(ScalarField(g32, w.values - w0.values)) / norm(w0) < 1e-12


# ---------------------------------------------------------------------------
# diagnostics cadence and monitors


def test_diag_rows_cadence(g32):
    w = eigenmix(g32)
    _, rows = simulate(w, SimConfig(dt=1e-2, t_end=0.1, diag_every=3))
    assert [round(r.t / 1e-2) for r in rows] == [0, 3, 6, 9, 10]
    _, rows = simulate(w, SimConfig(dt=1e-2, t_end=0.1, diag_every=1))
    assert len(rows) == 11
    _, rows = simulate(w, SimConfig(dt=1e-2, t_end=0.1, diag_every=100))
    assert [round(r.t / 1e-2) for r in rows] == [0, 10]


def test_casimir_monitor_columns(g32):
    w = eigenmix(g32)
    half_square = affine_profile(1.0, 0.0).primitive
    cfg = SimConfig(
        dt=1e-2, t_end=0.03, diag_every=1,
        casimir_list=[half_square, lambda xi: xi**4],
    )
    _, rows = simulate(w, cfg)
    for r in rows:
        assert len(r.casimirs) == 2
        # G(xi) = xi^2/2 integrates to the enstrophy column
        assert abs(r.casimirs[0] - r.enstrophy) < 1e-13 * abs(r.enstrophy)
        assert r.casimirs[1] > 0.0


def test_checkpoint_callback_cadence(g32):
    w = eigenmix(g32)
    seen = []
    cfg = SimConfig(dt=1e-2, t_end=0.1, checkpoint_every=4)
    simulate(w, cfg, on_checkpoint=lambda step, t, om: seen.append((step, t)))
    assert [s for s, _ in seen] == [4, 8, 10]
    assert all(abs(t - s * 1e-2) < 1e-15 for s, t in seen)
    seen.clear()
    simulate(w, SimConfig(dt=1e-2, t_end=0.05, checkpoint_every=0),
             on_checkpoint=lambda step, t, om: seen.append(step))
    assert seen == []


# ---------------------------------------------------------------------------
# watchdog and failure modes


def test_watchdog_trips_on_initial_condition(g32, random_field):
    w = random_field(g32, seed=5, scale=10.0)
    cfg = SimConfig(dt=1e-2, t_end=0.1, supnorm_cap=0.5 * supnorm(w))
    with pytest.raises(SupnormError) as exc:
        simulate(w, cfg)
    err = exc.value
    assert err.step == 0
    assert err.time == 0.0
    assert err.rows == []
    assert err.supnorm == supnorm(w)


def test_watchdog_trips_mid_run(g32):
    # under-resolved rough data at CFL >> 1: RK4 amplifies until the cap
    r = np.random.default_rng(11)
    w = ScalarField(g32, 90.0 * r.standard_normal(g32.shape), zero_trace=True)
    cap = 1.5 * supnorm(w)
    cfg = SimConfig(dt=0.05, t_end=5.0, diag_every=1, supnorm_cap=cap)
    with pytest.raises(SupnormError) as exc:
        simulate(w, cfg)
    err = exc.value
    assert err.step >= 1
    assert err.supnorm > cap
    assert abs(err.time - err.step * 0.05) < 1e-12
    # diag_every=1: one row per completed step before the trip, plus t=0
    assert len(err.rows) == err.step
    assert err.rows[0].t == 0.0


def test_non_finite_state_raises(g32):
    vals = np.zeros(g32.shape)
    vals[3, 3] = np.nan
    w = ScalarField(g32, vals, zero_trace=True)
    with pytest.raises(SolverError):
        simulate(w, SimConfig(dt=1e-2, t_end=0.1))


# ---------------------------------------------------------------------------
# CSV output


def test_diagnostics_csv_round_trip(tmp_path, g32):
    w = eigenmix(g32)
    cfg = SimConfig(dt=1e-2, t_end=0.05, diag_every=2,
                    casimir_list=[lambda xi: xi**4])
    _, rows = simulate(w, cfg)
    path = tmp_path / "diag.csv"
    write_diagnostics_csv(path, rows)
    with open(path, newline="") as fh:
        got = list(csv.reader(fh))
    assert got[0] == ["t", "energy", "enstrophy", "supnorm", "casimir_1"]
    assert len(got) == len(rows) + 1
    for line, r in zip(got[1:], rows):
        assert float(line[0]) == r.t
        assert float(line[1]) == r.energy
        assert float(line[2]) == r.enstrophy
        assert float(line[3]) == r.supnorm
        assert float(line[4]) == r.casimirs[0]

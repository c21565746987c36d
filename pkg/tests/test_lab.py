"""Tests for the convergence laboratory: sweeps, rate fits, and reports."""

import numpy as np
import pytest

from latticedirac import (
    ContinuumFunction,
    Mesh,
    Sweep,
    exp_ft,
    exp_ift,
    exp_projection,
    exp_resolvent_free,
    exp_resolvent_potential,
    fit_rate,
    norm_l2,
    project,
)
from latticedirac.errors import DegenerateFit, NotInResolventRegion
from latticedirac.grid import bandlimited_spinor
from latticedirac.lab import _assemble, weighted_operator_gap_probe


# ---------------------------------------------------------------------------
# rate fitting


def test_fit_rate_linear_series():
    hs = [0.4, 0.2, 0.1, 0.05]
    slope, intercept = fit_rate(hs, [3.7 * h for h in hs])
    assert abs(slope - 1.0) < 1e-12
    assert abs(np.exp(intercept) - 3.7) < 1e-12


def test_fit_rate_quadratic_series():
    hs = [0.4, 0.2, 0.1, 0.05]
    slope, _ = fit_rate(hs, [0.9 * h**2 for h in hs])
    assert abs(slope - 2.0) < 1e-12


def test_fit_rate_with_jitter(rng):
    hs = np.array([0.4, 0.2, 0.1, 0.05, 0.025])
    errs = 2.0 * hs * (1 + rng.uniform(-0.01, 0.01, size=hs.size))
    slope, _ = fit_rate(hs, errs)
    assert abs(slope - 1.0) < 0.05


def test_fit_rate_degenerate_inputs():
    with pytest.raises(DegenerateFit):
        fit_rate([0.4, 0.2], [1.0, 0.5])
    with pytest.raises(DegenerateFit):
        fit_rate([0.4, 0.2, 0.1], [1.0, 0.5, 1e-15])


# ---------------------------------------------------------------------------
# sweep validation


def test_sweep_requires_commensurate_box():
    with pytest.raises(ValueError):
        Sweep(hs=(0.3,), box=1.0, function="gaussian1d")  # 1.0/0.3 not integral
    with pytest.raises(ValueError):
        Sweep(hs=(0.4, 0.4), box=9.6, function="gaussian1d")  # not decreasing
    Sweep(hs=(0.4, 0.2), box=9.6, function="gaussian1d")  # fine


def test_sweep_floor_check_validates_extra_level():
    # the extra halved level must itself give an even site count
    Sweep(hs=(0.4, 0.2), box=9.6, function="gaussian1d", check_floor=True)


# ---------------------------------------------------------------------------
# experiments


def test_projection_experiment_gaussian_1d():
    rep = exp_projection(Sweep(hs=(0.4, 0.2, 0.1, 0.05), box=9.6, function="gaussian1d"))
    by_name = {s.name: s for s in rep.series}
    assert by_name["sampling"].monotone and by_name["projection"].monotone
    assert 0.8 <= by_name["sampling"].slope <= 1.2
    assert rep.Ns == (24, 48, 96, 192)


def test_projection_experiment_constant_sits_on_floor():
    const = ContinuumFunction(
        name="const", d=1, channels=1,
        evaluate=lambda pts: np.ones(pts.shape[:-1] + (1,), dtype=complex),
    )
    rep = exp_projection(Sweep(hs=(0.4, 0.2, 0.1), box=9.6, function=const))
    for series in rep.series:
        assert all(e < 1e-13 for e in series.errors)
        assert series.slope is None  # floor entries are excluded from fits


def test_ft_experiment_decreases():
    rep = exp_ft(Sweep(hs=(0.4, 0.2, 0.1), box=25.6, function="gaussian1d", s=1.0))
    assert rep.primary.monotone
    rep2 = exp_ft(Sweep(hs=(0.4, 0.2, 0.1), box=25.6, function="gaussian1d", s=2.0))
    assert all(b <= a for a, b in zip(rep.primary.errors, rep2.primary.errors))


def test_ft_experiment_needs_positive_weight():
    with pytest.raises(ValueError):
        exp_ft(Sweep(hs=(0.4, 0.2, 0.1), box=25.6, function="gaussian1d", s=0.0))


def test_ift_experiment_slope_and_reproducibility():
    sweep = Sweep(hs=(0.4, 0.2, 0.1, 0.05), box=9.6, function="freqbump1d")
    rep1 = exp_ift(sweep)
    rep2 = exp_ift(sweep)
    assert rep1.primary.errors == rep2.primary.errors  # bit-for-bit
    assert rep1.primary.monotone
    assert 0.8 <= rep1.primary.slope <= 1.2


def test_resolvent_free_experiment_short_sweep():
    rep = exp_resolvent_free(
        Sweep(hs=(0.4, 0.2, 0.1), box=9.6, function="gaussian-spinor", m=1.0, z=2j, refine=4)
    )
    assert rep.primary.monotone


def test_resolvent_free_bandlimited_obeys_symbol_bound():
    # with the transform supported in the coarsest box, the measured error
    # stays below the symbol-difference chain bound (h/2) sup|xi|^2 ||phi|| / Im(z)^2
    phi = bandlimited_spinor()
    sweep = Sweep(hs=(0.4, 0.2), box=9.6, function=phi, m=1.0, z=2j, refine=4)
    rep = exp_resolvent_free(sweep)
    sup_sq = 2 * phi.support_inf**2
    for h, err in zip(sweep.hs, rep.primary.errors):
        mesh = Mesh(2, h, round(9.6 / h))
        bound = (h / 2) * sup_sq * norm_l2(project(phi, mesh)) / abs(2j.imag) ** 2
        assert err <= bound


def test_resolvent_free_massless_also_converges():
    rep = exp_resolvent_free(
        Sweep(hs=(0.4, 0.2, 0.1), box=9.6, function="gaussian-spinor", m=0.0, z=2j, refine=4)
    )
    assert rep.primary.monotone


def test_resolvent_potential_experiment_hermitian():
    rep = exp_resolvent_potential(
        Sweep(hs=(0.4, 0.2, 0.1), box=9.6, function="gaussian-spinor", m=1.0, z=2j,
              potential="hermitian-gaussian")
    )
    assert rep.primary.monotone


def test_resolvent_potential_experiment_nonhermitian():
    rep = exp_resolvent_potential(
        Sweep(hs=(0.4, 0.2, 0.1), box=9.6, function="gaussian-spinor", m=1.0, z=3j,
              potential="nonhermitian-gaussian")
    )
    assert rep.primary.monotone


def test_resolvent_potential_region_violation():
    with pytest.raises(NotInResolventRegion):
        exp_resolvent_potential(
            Sweep(hs=(0.4, 0.2), box=9.6, function="gaussian-spinor", z=0.5j,
                  potential="nonhermitian-gaussian")
        )


# ---------------------------------------------------------------------------
# report assembly


def test_projection_floor_guard_not_triggered():
    rep = exp_projection(
        Sweep(hs=(0.4, 0.2, 0.1), box=9.6, function="gaussian1d", check_floor=True)
    )
    assert rep.floor_reached is False


def test_floor_guard_flags_stalled_series():
    sweep = Sweep(hs=(0.4, 0.2), box=9.6, function="gaussian1d")
    report = _assemble(
        "synthetic", sweep, {"err": [1.0, 0.5]}, [0.0, 0.0], [24, 48],
        extra={"err": 0.52},  # halving again made the error grow > 1%
    )
    assert report.floor_reached is True


def test_report_rows_structure():
    rep = exp_projection(Sweep(hs=(0.4, 0.2, 0.1), box=9.6, function="gaussian1d"))
    rows = rep.rows()
    assert len(rows) == 6  # two series, three levels
    assert {r["experiment"] for r in rows} == {"project:sampling", "project:projection"}
    assert rows[0]["slope-so-far"] is None
    assert rows[2]["slope-so-far"] is not None
    assert all(set(r) == {"experiment", "h", "N", "error", "slope-so-far", "wall-ms"}
               for r in rows)


def test_weighted_operator_gap_probe_is_finite_and_small():
    vals = [weighted_operator_gap_probe(1.0, 2j, 1.0, h, 9.6) for h in (0.4, 0.2)]
    assert all(np.isfinite(v) and 0 < v < 1 for v in vals)


def test_thread_cap_does_not_change_results(monkeypatch):
    sweep = Sweep(hs=(0.4, 0.2, 0.1), box=9.6, function="gaussian1d")
    monkeypatch.setenv("LATTICE_DIRAC_THREADS", "1")
    serial = exp_projection(sweep)
    monkeypatch.setenv("LATTICE_DIRAC_THREADS", "4")
    parallel = exp_projection(sweep)
    for a, b in zip(serial.series, parallel.series):
        assert a.errors == b.errors

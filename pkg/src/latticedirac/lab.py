"""Continuum-limit laboratory: dyadic-h sweeps with fitted empirical rates.

Every experiment keeps the box side fixed across its sweep (otherwise
truncation error pollutes the rate), measures one error per mesh size, and
reports the least-squares slope on ``(log h, log err)``.  Strong-convergence
statements are tested per test vector: the gates are error decrease on fixed
catalog members, never operator-norm decrease.  Entries below 1e-12 are
excluded from slope fits (roundoff floor), and an optional guard runs one
extra halving of the finest mesh to flag a reached error floor.

Experiments parallelize across mesh sizes; each per-h run is deterministic,
so reports are bit-for-bit reproducible for a given configuration.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DegenerateFit, NotInResolventRegion
from .fourier import inverse_ft_error, weighted_ft_error
from .grid import (
    ContinuumFunction,
    LatticeField,
    Mesh,
    function_catalog,
    l2_error_vs_continuum,
    norm_l2,
    project,
    sample,
)
from .operators import (
    PotentialSpec,
    ResolventQuery,
    block_average,
    potential_catalog,
    resolvent_continuum,
    resolvent_free,
    resolvent_with_potential,
    sample_potential,
    _apply_resolvent_zeta,
    _solve_with_potential,
)
from .symbols import DiracParams

__all__ = [
    "Sweep",
    "Series",
    "ConvergenceReport",
    "fit_rate",
    "exp_projection",
    "exp_ft",
    "exp_ift",
    "exp_resolvent_free",
    "exp_resolvent_potential",
    "weighted_operator_gap_probe",
    "DYADIC_HS",
    "thread_cap",
]

DYADIC_HS = (0.4, 0.2, 0.1, 0.05)

FLOOR_CUTOFF = 1e-12  # series entries below this are excluded from slope fits


def thread_cap(n_tasks: int) -> int:
    """Worker count for across-h parallelism, capped by LATTICE_DIRAC_THREADS."""
    cap = os.environ.get("LATTICE_DIRAC_THREADS")
    limit = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(n_tasks, limit))


@dataclass(frozen=True)
class Sweep:
    """Mesh sizes, fixed box, and experiment parameters for one sweep.

    ``function`` and ``potential`` may be catalog ids or constructed objects;
    the CLI only uses ids so runs stay reproducible from the config alone.
    """

    hs: tuple[float, ...] = DYADIC_HS
    box: float = 9.6
    function: Union[str, ContinuumFunction] = "gaussian2d"
    m: float = 1.0
    z: complex = 2j
    potential: Union[str, PotentialSpec, None] = None
    s: float = 1.0
    refine: int = 8
    tol: float = 1e-10
    check_floor: bool = False

    def __post_init__(self):
        if len(self.hs) < 1:
            raise ValueError("sweep needs at least one mesh size")
        if any(a <= b for a, b in zip(self.hs, self.hs[1:])):
            raise ValueError("mesh sizes must be strictly decreasing")
        hs = list(self.hs) + ([self.hs[-1] / 2] if self.check_floor else [])
        for h in hs:
            self.mesh_for(h)  # validates divisibility and parity

    def mesh_for(self, h: float, d: Optional[int] = None) -> Mesh:
        ratio = self.box / h
        N = round(ratio)
        if abs(ratio - N) > 1e-9 or N % 2 or N < 4:
            raise ValueError(f"box {self.box} with h={h} gives invalid site count {ratio}")
        dim = d if d is not None else self.resolved_function().d
        return Mesh(dim, h, N)

    def resolved_function(self) -> ContinuumFunction:
        if isinstance(self.function, ContinuumFunction):
            return self.function
        return function_catalog(self.function)

    def resolved_potential(self) -> Optional[PotentialSpec]:
        if self.potential is None or isinstance(self.potential, PotentialSpec):
            return self.potential
        return potential_catalog(self.potential)

    def label(self) -> dict:
        fn = self.function if isinstance(self.function, str) else self.function.name
        pot = self.potential if isinstance(self.potential, (str, type(None))) else self.potential.name
        return {
            "hs": list(self.hs), "box": self.box, "function": fn, "m": self.m,
            "z": complex(self.z), "potential": pot, "s": self.s, "refine": self.refine,
        }


@dataclass(frozen=True)
class Series:
    """One named error-vs-h series with its fitted log-log rate."""

    name: str
    errors: tuple[float, ...]
    slope: Optional[float]
    intercept: Optional[float]
    monotone: bool


@dataclass(frozen=True)
class ConvergenceReport:
    experiment: str
    params: dict
    hs: tuple[float, ...]
    Ns: tuple[int, ...]
    series: tuple[Series, ...]
    wall_ms: tuple[float, ...]
    floor_reached: Optional[bool] = None

    @property
    def primary(self) -> Series:
        return self.series[0]

    def rows(self) -> list[dict]:
        """Flat per-(series, h) rows for CSV/JSON emission."""
        out = []
        for ser in self.series:
            tag = self.experiment if len(self.series) == 1 else f"{self.experiment}:{ser.name}"
            for i, h in enumerate(self.hs):
                partial = None
                if i >= 2:
                    try:
                        partial, _ = fit_rate(self.hs[: i + 1], ser.errors[: i + 1])
                    except DegenerateFit:
                        partial = None
                out.append(
                    {
                        "experiment": tag,
                        "h": h,
                        "N": self.Ns[i],
                        "error": ser.errors[i],
                        "slope-so-far": partial,
                        "wall-ms": self.wall_ms[i],
                    }
                )
        return out


def fit_rate(hs: Sequence[float], errs: Sequence[float]) -> tuple[float, float]:
    """Ordinary least squares of ``log err`` against ``log h``.

    Raises `DegenerateFit` on fewer than 3 points or entries at the
    roundoff floor (<= 1e-14).
    """
    hs = np.asarray(hs, dtype=float)
    errs = np.asarray(errs, dtype=float)
    if hs.size < 3 or hs.size != errs.size:
        raise DegenerateFit(f"need >= 3 matched points, got {hs.size}")
    if np.any(errs <= 1e-14):
        raise DegenerateFit("some errors are at the roundoff floor")
    slope, intercept = np.polyfit(np.log(hs), np.log(errs), 1)
    return float(slope), float(intercept)


def _make_series(name: str, hs: Sequence[float], errors: Sequence[float]) -> Series:
    errors = [float(e) for e in errors]
    keep = [(h, e) for h, e in zip(hs, errors) if e > FLOOR_CUTOFF]
    slope = intercept = None
    if len(keep) >= 3:
        slope, intercept = fit_rate([h for h, _ in keep], [e for _, e in keep])
    monotone = all(b < a for a, b in zip(errors[:-1], errors[1:]))
    return Series(name, tuple(errors), slope, intercept, monotone)


def _run_levels(hs, worker):
    """Evaluate ``worker(h)`` for each level, in parallel, preserving order."""
    results = [None] * len(hs)
    timings = [0.0] * len(hs)

    def timed(i):
        start = time.perf_counter()
        results[i] = worker(hs[i])
        timings[i] = (time.perf_counter() - start) * 1e3

    workers = thread_cap(len(hs))
    if workers == 1:
        for i in range(len(hs)):
            timed(i)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(timed, range(len(hs))))
    return results, timings


def _assemble(
    experiment: str,
    sweep: Sweep,
    named_errors: dict[str, list[float]],
    timings,
    Ns,
    extra: Optional[dict[str, float]] = None,
) -> ConvergenceReport:
    series = tuple(_make_series(name, sweep.hs, errs) for name, errs in named_errors.items())
    floor = None
    if extra is not None:
        floor = any(
            extra[name] > 1.01 * named_errors[name][-1] for name in named_errors
        )
    return ConvergenceReport(
        experiment=experiment,
        params=sweep.label(),
        hs=tuple(sweep.hs),
        Ns=tuple(Ns),
        series=series,
        wall_ms=tuple(timings),
        floor_reached=floor,
    )


# ---------------------------------------------------------------------------
# experiments


def exp_projection(sweep: Sweep) -> ConvergenceReport:
    """Sampling and cell-average projection errors against the continuum function."""
    phi = sweep.resolved_function()

    def worker(h):
        mesh = sweep.mesh_for(h)
        samp = l2_error_vs_continuum(sample(phi, mesh), phi)
        proj = l2_error_vs_continuum(project(phi, mesh), phi)
        return samp, proj

    results, timings = _run_levels(sweep.hs, worker)
    errors = {
        "sampling": [r[0] for r in results],
        "projection": [r[1] for r in results],
    }
    extra = None
    if sweep.check_floor:
        s_extra, p_extra = worker(sweep.hs[-1] / 2)
        extra = {"sampling": s_extra, "projection": p_extra}
    Ns = [sweep.mesh_for(h).N for h in sweep.hs]
    return _assemble("project", sweep, errors, timings, Ns, extra)


def exp_ft(sweep: Sweep) -> ConvergenceReport:
    """Weighted distance between discrete and continuum transforms, per h."""
    if sweep.s <= 0:
        raise ValueError("the weighted transform sweep needs s > 0")
    phi = sweep.resolved_function()

    def worker(h):
        return weighted_ft_error(phi, sweep.mesh_for(h), sweep.s)

    results, timings = _run_levels(sweep.hs, worker)
    extra = {"weighted-ft": worker(sweep.hs[-1] / 2)} if sweep.check_floor else None
    Ns = [sweep.mesh_for(h).N for h in sweep.hs]
    return _assemble("ft", sweep, {"weighted-ft": results}, timings, Ns, extra)


def exp_ift(sweep: Sweep) -> ConvergenceReport:
    """Inverse-transform error for a frequency-window catalog entry, per h."""
    u = sweep.resolved_function()

    def worker(h):
        return inverse_ft_error(u, sweep.mesh_for(h))

    results, timings = _run_levels(sweep.hs, worker)
    extra = {"inverse-ft": worker(sweep.hs[-1] / 2)} if sweep.check_floor else None
    Ns = [sweep.mesh_for(h).N for h in sweep.hs]
    return _assemble("ift", sweep, {"inverse-ft": results}, timings, Ns, extra)


def _free_reference(sweep: Sweep, phi: ContinuumFunction) -> LatticeField:
    """Continuum-resolvent surrogate on the finest sweep mesh (shared by all levels)."""
    finest = sweep.mesh_for(min(sweep.hs), d=2)
    return resolvent_continuum(phi, sweep.z, sweep.m, finest, refine=sweep.refine)


def exp_resolvent_free(sweep: Sweep) -> ConvergenceReport:
    """Per-vector error of the free discrete resolvent against the continuum surrogate.

    One reference is computed on the ``refine``-fold refinement of the finest
    mesh and block-averaged to every level, so all levels share the same
    comparison target.
    """
    phi = sweep.resolved_function()
    reference = _free_reference(sweep, phi)

    def worker(h):
        mesh = sweep.mesh_for(h, d=2)
        query = ResolventQuery(z=sweep.z, p=DiracParams(sweep.m, h))
        u = resolvent_free(project(phi, mesh), query)
        ref_h = block_average(reference, mesh)
        return norm_l2(LatticeField(mesh, u.values - ref_h.values))

    results, timings = _run_levels(sweep.hs, worker)
    extra = None
    if sweep.check_floor:
        extra = {"resolvent-free": worker(sweep.hs[-1] / 2)}
    Ns = [sweep.mesh_for(h).N for h in sweep.hs]
    return _assemble("resolve-free", sweep, {"resolvent-free": results}, timings, Ns, extra)


def exp_resolvent_potential(sweep: Sweep) -> ConvergenceReport:
    """Per-vector error of the perturbed resolvent against a refined-grid reference.

    The reference runs the same Neumann/Krylov factorization on the refined
    mesh with the continuum symbol and the potential sampled at the fine
    sites.
    """
    phi = sweep.resolved_function()
    V = sweep.resolved_potential()
    if V is None:
        raise ValueError("the potential sweep needs a potential id")
    finest = sweep.mesh_for(min(sweep.hs), d=2)
    fine = Mesh(2, finest.h / sweep.refine, finest.N * sweep.refine)
    psi_fine = sample(phi, fine)
    Vh_fine = sample_potential(V, fine)
    if not abs(complex(sweep.z).imag) > V.skew_bound + 1e-12:
        raise NotInResolventRegion(
            f"|Im z| = {abs(complex(sweep.z).imag):.6g} not above skew bound {V.skew_bound:.6g}"
        )
    u_ref = _solve_with_potential(
        psi_fine, complex(sweep.z), sweep.m, Vh_fine, V.sup_norm,
        policy=None, tol=sweep.tol, max_iter=2000, restart=50, symbol="continuum",
    )
    reference = block_average(u_ref, finest)

    def worker(h):
        mesh = sweep.mesh_for(h, d=2)
        query = ResolventQuery(z=sweep.z, p=DiracParams(sweep.m, h), tol=sweep.tol)
        u = resolvent_with_potential(project(phi, mesh), query, V)
        ref_h = block_average(reference, mesh)
        return norm_l2(LatticeField(mesh, u.values - ref_h.values))

    results, timings = _run_levels(sweep.hs, worker)
    extra = None
    if sweep.check_floor:
        extra = {"resolvent-potential": worker(sweep.hs[-1] / 2)}
    Ns = [sweep.mesh_for(h).N for h in sweep.hs]
    return _assemble(
        "resolve-potential", sweep, {"resolvent-potential": results}, timings, Ns, extra
    )


# ---------------------------------------------------------------------------
# weighted-operator-norm diagnostic


def weighted_operator_gap_probe(
    m: float, z: complex, s: float, h: float, box: float, n_probe: int = 16, seed: int = 0
) -> float:
    """Probe-set surrogate for the weighted-space operator-norm resolvent gap.

    Applies the pointwise difference of the discrete and continuum symbol
    resolvents to ``n_probe`` deterministic Gaussian frequency bumps and
    returns the max ratio of output norm to weighted input norm.  Diagnostic
    only; not an acceptance gate.
    """
    from .fourier import FrequencyGrid
    from .symbols import zeta_discrete

    mesh = Mesh(2, h, round(box / h))
    grid = FrequencyGrid(mesh)
    coords = grid.coords()
    p = DiracParams(m, h)
    zeta_h = zeta_discrete(coords, p)
    zeta_c = coords[..., 0] + 1j * coords[..., 1]
    rng = np.random.default_rng(seed)
    weight_sq = (1.0 + np.sum(coords**2, axis=-1)) ** s
    worst = 0.0
    for _ in range(n_probe):
        center = rng.uniform(-0.5, 0.5, size=2) * np.pi / h
        width = rng.uniform(0.5, 2.0)
        spinor = rng.normal(size=2) + 1j * rng.normal(size=2)
        bump = np.exp(-np.sum((coords - center) ** 2, axis=-1) / (2 * width**2))
        u = bump[..., None] * spinor
        gap = _apply_resolvent_zeta(u, zeta_h, m, complex(z)) - _apply_resolvent_zeta(
            u, zeta_c, m, complex(z)
        )
        out = np.sqrt(grid.cell_volume * np.sum(np.abs(gap) ** 2))
        win = np.sqrt(grid.cell_volume * np.sum(weight_sq[..., None] * np.abs(u) ** 2))
        worst = max(worst, out / win)
    return float(worst)

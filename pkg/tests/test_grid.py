"""Tests for lattice geometry, grid transfers, and step-function norms."""

import numpy as np
import pytest
from scipy.integrate import quad

from latticedirac import (
    ContinuumFunction,
    LatticeField,
    Mesh,
    evaluate_step,
    inner,
    l2_error_vs_continuum,
    norm_l2,
    norm_little_l2,
    project,
    sample,
)
from latticedirac.errors import MeshMismatch, OutOfDomain, QuadratureFailure
from latticedirac.grid import (
    bandlimited,
    function_catalog,
    gaussian,
    hat,
    modulated_gaussian,
    weighted_sampling_gap,
)

from conftest import random_field


def constant_function(d, value=1.0):
    return ContinuumFunction(
        name="const", d=d, channels=1,
        evaluate=lambda pts: np.full(pts.shape[:-1] + (1,), value, dtype=complex),
        sup_norm=abs(value),
    )


# ---------------------------------------------------------------------------
# mesh geometry


def test_mesh_basic_properties():
    mesh = Mesh(2, 0.5, 8)
    assert mesh.L == 4.0
    np.testing.assert_array_equal(mesh.indices, np.arange(-4, 4))
    assert mesh.site_coords().shape == (8, 8, 2)
    assert mesh.site_coords()[0, 0, 0] == -2.0


@pytest.mark.parametrize("bad", [dict(d=3, h=0.5, N=8), dict(d=2, h=-1.0, N=8),
                                 dict(d=2, h=0.5, N=7), dict(d=2, h=0.5, N=2)])
def test_mesh_rejects_invalid(bad):
    with pytest.raises(ValueError):
        Mesh(**bad)


def test_field_rejects_nonfinite_values():
    mesh = Mesh(1, 0.5, 8)
    vals = np.zeros((8, 1), dtype=complex)
    vals[3, 0] = np.nan
    with pytest.raises(ValueError):
        LatticeField(mesh, vals)


def test_cells_tile_box():
    # every point of the box lands in exactly one cell, recovered by floor
    mesh = Mesh(1, 0.25, 8)
    f = LatticeField(mesh, np.arange(8, dtype=complex)[:, None])
    xs = np.linspace(-1.0, 1.0 - 1e-9, 173)
    cells = [int(evaluate_step(f, [x])[0].real) for x in xs]
    assert cells == [int(np.floor(x / 0.25)) + 4 for x in xs]


# ---------------------------------------------------------------------------
# sampling


def test_sample_constant_is_constant():
    mesh = Mesh(2, 0.3, 6)
    f = sample(constant_function(2), mesh)
    np.testing.assert_allclose(f.values, 1.0)


def test_sample_gaussian_values():
    mesh = Mesh(2, 0.5, 24)
    f = sample(gaussian(2), mesh)
    center = (12, 12)
    assert f.values[center][0] == 1.0
    np.testing.assert_allclose(f.values[13, 13, 0], np.exp(-0.5), rtol=0, atol=1e-15)


def test_sample_dimension_mismatch():
    with pytest.raises(MeshMismatch):
        sample(gaussian(1), Mesh(2, 0.5, 8))


def test_sampling_error_rate_constant_is_stable():
    # ||phi_h - phi|| <= C h with a stable constant across dyadic refinement
    phi = gaussian(2)
    ratios = []
    for h in (0.4, 0.2, 0.1, 0.05):
        mesh = Mesh(2, h, round(9.6 / h))
        ratios.append(l2_error_vs_continuum(sample(phi, mesh), phi) / h)
    assert max(ratios) / min(ratios) < 1.5


def test_weighted_pointwise_gap_uniform_in_h():
    # max <x>**k |phi_h - phi| stays O(h) with a stable constant
    phi = gaussian(1)
    ratios = [weighted_sampling_gap(phi, Mesh(1, h, round(9.6 / h)), k=2) / h
              for h in (0.4, 0.2, 0.1)]
    assert max(ratios) / min(ratios) < 2.0


# ---------------------------------------------------------------------------
# projection


def test_project_constant():
    mesh = Mesh(2, 0.3, 6)
    f = project(constant_function(2), mesh)
    np.testing.assert_allclose(f.values, 1.0, atol=1e-14)


def test_project_hat_matches_known_cell_averages():
    # plateau w: averages are w on the two central cells, w/2 on the ramps
    h = 0.5
    mesh = Mesh(1, h, 16)
    f = project(hat(h), mesh)
    expected = np.zeros(16)
    mid = 8
    expected[mid - 1] = expected[mid] = h
    expected[mid - 2] = expected[mid + 1] = h / 2
    np.testing.assert_allclose(f.values[:, 0].real, expected, atol=1e-14)
    np.testing.assert_allclose(f.values[:, 0].imag, 0, atol=1e-15)


def test_project_gaussian_error_decreases_monotonically():
    phi = gaussian(2)
    errs = [l2_error_vs_continuum(project(phi, Mesh(2, h, round(9.6 / h))), phi)
            for h in (0.4, 0.2, 0.1)]
    assert errs[2] < errs[1] < errs[0]


def test_project_undeclared_kink_fails_quadrature():
    # same trapezoid but without declared breakpoints: the self-estimate
    # catches the kink sitting inside a cell
    bad = ContinuumFunction(
        name="kinked", d=1, channels=1,
        evaluate=lambda pts: np.maximum(0.0, 1.0 - np.abs(pts[..., 0]))[..., None].astype(complex),
        sup_norm=1.0,
    )
    with pytest.raises(QuadratureFailure):
        project(bad, Mesh(1, 0.4, 16))


def test_projection_idempotent_on_step_functions(rng):
    # cell averages of an embedded step function recover the field exactly
    mesh = Mesh(2, 0.5, 8)
    f = random_field(mesh, 1, rng)

    def step_eval(points):
        n = np.floor(points / mesh.h).astype(int) + mesh.N // 2
        n = np.clip(n, 0, mesh.N - 1)
        return f.values[n[..., 0], n[..., 1], :]

    stepfn = ContinuumFunction("step", 2, 1, step_eval,
                               sup_norm=float(np.max(np.abs(f.values))))
    np.testing.assert_allclose(project(stepfn, mesh).values, f.values, atol=1e-13)


def test_hat_residual_matches_closed_form():
    # || phi - P_h phi || = sqrt(h**3/6): two linear ramps of mean zero per side
    h = 0.5
    f = project(hat(h), Mesh(1, h, 16))
    err = l2_error_vs_continuum(f, hat(h))
    np.testing.assert_allclose(err, np.sqrt(h**3 / 6), atol=1e-10)


def test_hat_residual_orthogonal_to_step_space():
    # independent quadrature of <J_h P_h phi, phi - J_h P_h phi>
    h = 0.5
    mesh = Mesh(1, h, 16)
    hat_fn = hat(h)
    f = project(hat_fn, mesh)

    def step_val(x):
        n = int(np.floor(x / h)) + 8
        return f.values[n, 0].real

    total = 0.0
    for n in range(-8, 8):
        a, b = n * h, (n + 1) * h
        val, _ = quad(
            lambda x: step_val(x) * (hat_fn(np.array([[x]]))[0, 0].real - step_val(x)),
            a, b, limit=200,
        )
        total += val
    assert abs(total) < 1e-12


# ---------------------------------------------------------------------------
# norms and point evaluation


def test_single_site_delta_norm():
    mesh = Mesh(2, 0.3, 8)
    vals = np.zeros(mesh.shape + (1,), dtype=complex)
    vals[4, 4, 0] = 1.0
    assert abs(norm_l2(LatticeField(mesh, vals)) - 0.3) < 1e-15


def test_embedding_isometry(rng):
    for d, N in ((1, 16), (2, 8)):
        mesh = Mesh(d, 0.37, N)
        f = random_field(mesh, 2, rng)
        assert abs(norm_l2(f) - mesh.h ** (d / 2) * norm_little_l2(f)) < 1e-13


def test_inner_product_consistency(rng):
    mesh = Mesh(2, 0.5, 8)
    f = random_field(mesh, 2, rng)
    val = inner(f, f)
    assert abs(val.imag) < 1e-13
    assert abs(val.real - norm_l2(f) ** 2) < 1e-12


def test_inner_mesh_mismatch(rng):
    f = random_field(Mesh(2, 0.5, 8), 1, rng)
    g = random_field(Mesh(2, 0.25, 8), 1, rng)
    with pytest.raises(MeshMismatch):
        inner(f, g)


def test_evaluate_step_cell_lookup():
    mesh = Mesh(2, 0.5, 8)
    vals = np.zeros(mesh.shape + (1,), dtype=complex)
    vals[4, 4, 0] = 5.0
    vals[5, 4, 0] = 7.0
    f = LatticeField(mesh, vals)
    assert evaluate_step(f, (0.25, 0.25))[0] == 5.0
    # boundary convention: x = (h, 0) belongs to the cell starting at h
    assert evaluate_step(f, (0.5, 0.0))[0] == 7.0
    with pytest.raises(OutOfDomain):
        evaluate_step(f, (2.0, 0.0))  # right edge is excluded
    with pytest.raises(OutOfDomain):
        evaluate_step(f, (0.0, -2.5))


# ---------------------------------------------------------------------------
# catalog closed forms


@pytest.mark.parametrize("entry,probe", [
    (gaussian(1, a=1.0), [0.0, 0.7, -2.3]),
    (gaussian(1, a=0.5, amplitude=2.0, center=(0.4,)), [0.3, -1.1]),
    (hat(0.5), [0.0, 1.3, -2.7]),
    (bandlimited(1, 2.0, p=4), [0.0, 0.9, 1.9]),
])
def test_declared_transform_matches_quadrature_1d(entry, probe):
    for q in probe:
        def re_part(x):
            return (entry(np.array([[x]]))[0, 0] * np.exp(-1j * x * q)).real

        def im_part(x):
            return (entry(np.array([[x]]))[0, 0] * np.exp(-1j * x * q)).imag

        lim = 40.0 if entry.support_inf is None else 4 * entry.support_inf + 40.0
        re, _ = quad(re_part, -lim, lim, limit=600)
        im, _ = quad(im_part, -lim, lim, limit=600)
        oracle = (re + 1j * im) / np.sqrt(2 * np.pi)
        declared = entry.fourier(np.array([[q]]))[0, 0]
        assert abs(oracle - declared) < 1e-8


def test_declared_transform_matches_quadrature_2d():
    from scipy.integrate import dblquad

    entry = modulated_gaussian(2, a=1.0, k0=(1.0, -0.5))
    for q in (np.array([0.0, 0.0]), np.array([0.8, 1.2])):
        def integrand_re(y, x):
            pt = np.array([[x, y]])
            return (entry(pt)[0, 0] * np.exp(-1j * (x * q[0] + y * q[1]))).real

        def integrand_im(y, x):
            pt = np.array([[x, y]])
            return (entry(pt)[0, 0] * np.exp(-1j * (x * q[0] + y * q[1]))).imag

        re, _ = dblquad(integrand_re, -8, 8, -8, 8, epsabs=1e-10)
        im, _ = dblquad(integrand_im, -8, 8, -8, 8, epsabs=1e-10)
        oracle = (re + 1j * im) / (2 * np.pi)
        declared = entry.fourier(q[None, :])[0, 0]
        assert abs(oracle - declared) < 1e-8


def test_function_catalog_ids_resolve():
    for name in ("gaussian1d", "gaussian2d", "modwave2d", "hat",
                 "gaussian-spinor", "bandlimited-spinor", "freqbump1d", "freqbump2d"):
        entry = function_catalog(name)
        assert entry.d in (1, 2)
    with pytest.raises(KeyError):
        function_catalog("nope")

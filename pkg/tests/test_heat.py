"""Heat kernels by series, by lattice sum, and on the complexified groups."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from wrapkit import (
    DomainError,
    KernelSpec,
    ResourceLimitError,
    alcove_points,
    auto_kernel,
    bend_complex,
    cell_grid,
    complexify,
    enumerate_weights,
    evaluate_kernel,
    flat_heat_kernel,
    haar_quadrature,
    heat_coefficients,
    j_complex,
    make_group,
    preferred_route,
    semigroup_gap,
    spectral_heat_kernel,
    wrapped_heat_kernel,
)

TWO_PI = 2.0 * math.pi

GROUPS = ("torus1", "torus2", "su2", "so3", "su2xsu2", "su3")


# ---------------------------------------------------------------------------
# flat kernel
# ---------------------------------------------------------------------------

def test_flat_heat_kernel_formula():
    t, n = 0.7, 3
    r2 = 1.3
    assert_allclose(flat_heat_kernel(r2, t, n),
                    (TWO_PI * t) ** (-n / 2) * math.exp(-r2 / (2 * t)),
                    rtol=1e-15)
    arr = flat_heat_kernel(np.array([0.0, 1.0]), t, n)
    assert arr.shape == (2,)
    assert_allclose(arr[0], (TWO_PI * t) ** (-n / 2), rtol=1e-15)
    with pytest.raises(DomainError):
        flat_heat_kernel(1.0, 0.0, 3)
    with pytest.raises(DomainError):
        flat_heat_kernel(-1.0, 0.5, 3)


# ---------------------------------------------------------------------------
# group kernels
# ---------------------------------------------------------------------------

def test_su2_coefficients_closed_form():
    su2 = make_group("su2")
    f = heat_coefficients(su2, 0.6, shifted=True, tol=1e-10)
    for w, c in f.coeffs.items():
        k = w.coords[0]
        assert_allclose(c, (k + 1) * math.exp(-((k + 1) / 2.0) ** 2 * 0.3),
                        rtol=1e-14)
    plain = heat_coefficients(su2, 0.6, shifted=False, tol=1e-10)
    for w, c in plain.coeffs.items():
        assert_allclose(c, f.coeffs[w] * math.exp(0.25 * 0.3), rtol=1e-14)


@pytest.mark.parametrize("name", GROUPS)
def test_routes_agree(name):
    g = make_group(name)
    pts = alcove_points(g, 10)
    for t in (0.1, 1.0):
        a = spectral_heat_kernel(g, pts, t, True, 1e-10)
        b = wrapped_heat_kernel(g, pts, t, 1e-10)
        assert np.max(np.abs(a - b)) < 1e-10


def test_plain_kernel_positive_and_normalized():
    # positivity wherever the truncated series resolves the value above the
    # double-precision noise floor, and unit Haar mass by grid quadrature
    for name in ("torus1", "su2", "so3"):
        g = make_group(name)
        vals = spectral_heat_kernel(g, alcove_points(g, 30), 1.0,
                                    shifted=False, tol=1e-10)
        assert np.all(vals > 0)
        near = alcove_points(g, 30) * 0.6
        vals = spectral_heat_kernel(g, near, 0.3, shifted=False, tol=1e-10)
        assert np.all(vals > 0)
        grid = cell_grid(g, 81)
        mass = haar_quadrature(
            g, spectral_heat_kernel(g, grid, 0.3, shifted=False, tol=1e-8))
        assert abs(mass - 1.0) < 1e-6


def test_trace_identity_at_origin():
    # kernel at H = 0 equals the dimension-squared series
    for name in GROUPS:
        g = make_group(name)
        t = 0.7
        tr = float(np.asarray(
            spectral_heat_kernel(g, np.zeros(g.rank), t, True, 1e-12)))
        series = sum(w.dimension**2 * math.exp(-w.lambda_plus_rho_norm_sq * t / 2)
                     for w in enumerate_weights(g, 160.0))
        assert_allclose(tr, series, rtol=1e-10)


def test_spectral_small_time_advises_lattice_route():
    with pytest.raises(ResourceLimitError, match="wrapped"):
        spectral_heat_kernel(make_group("su3"), [0.7, 0.3], 1e-4, True, 1e-10)


def test_semigroup_property():
    su2 = make_group("su2")
    coeff_gap, quad_gap = semigroup_gap(su2, 0.5, 0.5)
    assert coeff_gap < 1e-12
    assert quad_gap < 1e-6
    t1 = make_group("torus1")
    coeff_gap, quad_gap = semigroup_gap(t1, 0.3, 0.7)
    assert coeff_gap < 1e-12
    assert quad_gap < 1e-10
    with pytest.raises(DomainError):
        semigroup_gap(su2, 0.0, 0.5)


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def test_kernel_spec_dispatch():
    su2 = make_group("su2")
    H = np.array([1.2])
    pairs = [
        ("spectral_shifted", spectral_heat_kernel(su2, H, 0.5, shifted=True)),
        ("spectral_plain", spectral_heat_kernel(su2, H, 0.5, shifted=False)),
        ("wrapped", wrapped_heat_kernel(su2, H, 0.5)),
        ("flat", flat_heat_kernel(float(H @ H), 0.5, su2.dim)),
    ]
    for variant, direct in pairs:
        ks = KernelSpec(group=su2, time=0.5, variant=variant)
        assert_allclose(evaluate_kernel(ks, H), direct, rtol=1e-13)
    with pytest.raises(DomainError, match="variant"):
        KernelSpec(group=su2, time=0.5, variant="magic")
    with pytest.raises(DomainError):
        KernelSpec(group=su2, time=-1.0, variant="spectral_shifted")
    with pytest.raises(DomainError):
        KernelSpec(group=su2, time=0.5, variant="wrapped", tol=2.0)


def test_preferred_route():
    su2 = make_group("su2")
    assert preferred_route(su2, np.array([1.0]), 0.1) == "wrapped"
    assert preferred_route(su2, np.array([1.0]), 0.5) == "spectral"
    # singular point forces the series even at small time
    assert preferred_route(su2, np.array([0.0]), 0.1) == "spectral"


def test_auto_kernel_matches_both_routes():
    su2 = make_group("su2")
    H = np.array([2.0])
    for t, route in ((0.05, "wrapped"), (1.0, "spectral")):
        vals, used = auto_kernel(su2, H, t)
        assert used == route
        assert_allclose(vals, wrapped_heat_kernel(su2, H, t), rtol=1e-9)


# ---------------------------------------------------------------------------
# complexified side
# ---------------------------------------------------------------------------

def test_complexify_shape():
    su2 = make_group("su2")
    gc = complexify(su2)
    assert gc.name == "su2_c"
    assert gc.real_dim == 6
    assert complexify(make_group("torus2")).real_dim == 4


def test_j_complex_closed_form():
    gc = complexify(make_group("su2"))
    for theta in (0.4, 1.7, 3.0):
        expect = math.sinh(theta / 2.0) / (theta / 2.0)
        assert_allclose(float(j_complex(gc, [theta])), expect, rtol=1e-12)
    assert_allclose(float(j_complex(gc, [0.0])), 1.0, rtol=1e-12)
    # tori have no roots, so the factor is identically one
    tc = complexify(make_group("torus2"))
    assert_allclose(float(j_complex(tc, [1.0, -2.0])), 1.0, rtol=1e-15)


def test_j_complex_grows_off_origin():
    gc = complexify(make_group("su3"))
    pts = alcove_points(make_group("su3"), 8) * 0.3
    vals = np.asarray(j_complex(gc, pts))
    assert np.all(vals > 1.0)


def test_bend_complex_at_origin_and_small_time():
    gc = complexify(make_group("su2"))
    n = gc.real_dim
    for t in (1e-4, 0.3):
        assert_allclose(bend_complex(gc, np.zeros(1), t),
                        (TWO_PI * t) ** (-n / 2), rtol=1e-12)
    # small-time ratio to the flat kernel approaches 1/j_c
    t = 1e-4
    H = np.array([0.25])
    ratio = bend_complex(gc, H, t) / flat_heat_kernel(float(H @ H), t, n)
    assert_allclose(ratio, 1.0 / float(j_complex(gc, H)), rtol=1e-4)
    with pytest.raises(DomainError):
        bend_complex(gc, np.zeros(1), 0.0)

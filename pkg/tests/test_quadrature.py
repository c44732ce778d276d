"""Tests for the adaptive Gauss-Kronrod integrator."""

import math

import numpy as np
import pytest

from srbc.quadrature import PanelIntegral, QuadratureError, integrate_adaptive


def integrate(f, lo, hi, rel_tol=1e-10, abs_tol=1e-12, max_evals=2_000_000):
    edges = np.array([lo, hi], dtype=np.float64)
    return integrate_adaptive(f, edges, rel_tol, abs_tol, max_evals)


def test_polynomial_is_nearly_exact():
    out = integrate(lambda x: x ** 2, 0.0, 1.0)
    assert abs(out.value - 1 / 3) < 1e-14
    assert isinstance(out, PanelIntegral)
    assert out.n_evals >= 15


def test_oscillatory_closed_forms():
    out = integrate(np.sin, 0.0, 20 * np.pi)
    assert abs(out.value) < 1e-10
    out = integrate(lambda x: np.sin(3 * x), 0.0, 5.0)
    expect = (1 - math.cos(15.0)) / 3
    assert abs(out.value - expect) < 1e-12


def test_decaying_oscillation():
    # integral of exp(-x) sin(40 x) over the half line, truncated where
    # the envelope is negligible
    out = integrate(lambda x: np.exp(-x) * np.sin(40 * x), 0.0, 60.0)
    expect = 40 / (1 + 1600)
    assert abs(out.value - expect) <= out.error_bound + 1e-13
    assert abs(out.value - expect) < 5e-12


def test_error_bound_is_honest():
    cases = [
        (lambda x: x ** 3, 0.0, 2.0, 4.0),
        (lambda x: np.exp(-x * x), -8.0, 8.0, math.sqrt(math.pi)),
        (lambda x: 1 / (1 + x * x), 0.0, 1.0, math.pi / 4),
    ]
    for f, lo, hi, truth in cases:
        out = integrate(f, lo, hi)
        assert abs(out.value - truth) <= max(out.error_bound, 1e-13)


def test_interior_edges_partition_the_integral():
    edges = np.array([0.0, 0.5, 2.0, 7.0])
    out = integrate_adaptive(np.cos, edges, 1e-12, 1e-14, 1_000_000)
    assert abs(out.value - math.sin(7.0)) < 1e-12


def test_tolerance_is_respected_on_a_hard_case():
    # slowly decaying oscillation needs many splits but must still meet
    # the requested absolute tolerance
    f = lambda x: np.sin(50 * x) / (1 + x)
    out = integrate(f, 0.0, 200.0, rel_tol=1e-9, abs_tol=1e-10,
                    max_evals=4_000_000)
    # reference from integrating the same thing on a fixed fine grid
    xs = np.linspace(0, 200, 4_000_001)
    ref = getattr(np, "trapezoid", np.trapz)(f(xs), xs)
    assert abs(out.value - ref) < 1e-6


def test_budget_exhaustion_raises_with_state():
    with pytest.raises(QuadratureError) as info:
        integrate(lambda x: np.sin(300 * x), 0.0, 1000.0,
                  rel_tol=1e-13, abs_tol=1e-15, max_evals=3000)
    err = info.value
    assert isinstance(err, RuntimeError)
    assert math.isfinite(err.estimate)
    assert err.error_bound > 0


def test_bad_edges_rejected():
    with pytest.raises(ValueError):
        integrate_adaptive(np.sin, np.array([1.0, 0.0]), 1e-9, 1e-12, 10000)
    with pytest.raises(ValueError):
        integrate_adaptive(np.sin, np.array([0.0]), 1e-9, 1e-12, 10000)

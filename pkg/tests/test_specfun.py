import math

import mpmath
import numpy as np
import pytest

from riemcenter import specfun as sf
from riemcenter.errors import DomainError

mpmath.mp.dps = 40


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def test_cs_at_zero():
    assert sf.stretched_cos(0.0) == 1.0
    assert sf.stretched_sin(0.0) == 1.0


def test_c_quarter_turn():
    assert abs(sf.stretched_cos(-(math.pi / 2) ** 2)) < 1e-15


def test_s_of_one():
    assert rel(sf.stretched_sin(1.0), float(mpmath.sinh(1))) < 1e-14


@pytest.mark.parametrize("x", [0.01, 0.3, 0.9, 1.7, 3.1])
def test_cs_closed_forms(x):
    assert rel(sf.stretched_cos(-x * x), math.cos(x)) < 1e-13 or abs(math.cos(x)) < 1e-12
    assert rel(sf.stretched_cos(x * x), math.cosh(x)) < 1e-14
    assert rel(sf.stretched_sin(-x * x), math.sin(x) / x) < 1e-13
    assert rel(sf.stretched_sin(x * x), math.sinh(x) / x) < 1e-14


def test_phi_minus_examples():
    assert sf.phi_minus(0.0) == 0.0
    assert rel(sf.phi_minus(1.0), math.exp(-1)) < 1e-14
    assert rel(sf.phi_minus(1e-3), 1e-6 / 3) < 1e-5


def test_phi_minus_rejects_negative():
    with pytest.raises(DomainError):
        sf.phi_minus(-0.1)


def test_phi_plus_examples():
    assert sf.phi_plus(0.0) == 0.0
    assert rel(sf.phi_plus(math.pi / 2), 2 / math.pi) < 1e-14


def test_phi_plus_domain_error_names_x0():
    with pytest.raises(DomainError, match="x0"):
        sf.phi_plus(2.8)
    with pytest.raises(DomainError):
        sf.phi_plus(-1e-3)


def test_x0_against_mpmath():
    ref = mpmath.findroot(lambda x: (x * x - 1) * mpmath.sin(x) + x * mpmath.cos(x), 2.74)
    assert abs(sf.x0_root() - float(ref)) < 1e-11


def test_phi_plus_unit_root_against_mpmath():
    ref = mpmath.findroot(lambda x: mpmath.sin(x) / x - mpmath.cos(x) - 1, 2.33)
    assert abs(sf.phi_plus_unit_root() - float(ref)) < 1e-11
    assert 0.73 * math.pi < sf.phi_plus_unit_root() < 0.75 * math.pi


def test_c1_examples():
    assert sf.c1(2.5, 7.0) == 1.0
    assert rel(sf.c1(-1.0, 1.0), float(mpmath.sinh(1))) < 1e-14
    assert sf.c1(-1.0, 0.0) == 1.0


def test_c1_monotone():
    rs = np.linspace(0, 4, 50)
    vals = [sf.c1(-1.0, r) for r in rs]
    assert np.all(np.diff(vals) >= 0)
    lams = np.linspace(0, -5, 50)
    vals = [sf.c1(lam, 1.3) for lam in lams]
    assert np.all(np.diff(vals) >= 0) and min(vals) >= 1.0


def test_h_psi_examples():
    assert sf.h(0.0, 2.0) == 1.0
    assert sf.h(3.0, 0.0) == 1.0
    assert sf.psi(1.0, 0.0) == 0.0
    assert sf.psi_max(-1.0, 2.0, 0.0) == 0.0
    assert abs(sf.psi(1.0, math.pi / 2) - 1.0) < 1e-15
    v = sf.psi(1.0, 0.1)
    assert rel(v, 0.01 / 3) < 1e-2
    assert rel(v, 1 - 0.1 / math.tan(0.1)) < 1e-12


def test_h_domain():
    with pytest.raises(DomainError):
        sf.h(1.0, math.pi)
    with pytest.raises(DomainError):
        sf.psi(4.0, 2.0)
    with pytest.raises(DomainError):
        sf.psi(1.0, -0.5)


def _mp_reference(name, z):
    z = mpmath.mpf(z)
    c = mpmath.cosh(mpmath.sqrt(z)) if z >= 0 else mpmath.cos(mpmath.sqrt(-z))
    x = mpmath.sqrt(abs(z))
    if z == 0:
        s = mpmath.mpf(1)
    else:
        s = mpmath.sinh(x) / x if z >= 0 else mpmath.sin(x) / x
    return {"c": c, "s": s, "diff": c - s}[name]


_GRID = np.concatenate([-np.logspace(-3, 1, 41), np.logspace(-3, 1, 41)])


@pytest.mark.parametrize("z", _GRID)
def test_series_vs_closed_vs_mp(z):
    # both branches agree with each other and with 40-digit arithmetic
    for name, fn in [("c", sf.stretched_cos), ("s", sf.stretched_sin), ("diff", sf.cs_difference)]:
        ref = float(_mp_reference(name, z))
        series = fn(z, method="series")
        assert rel(series, ref) < 1e-12
        if abs(z) >= 0.1 or name != "diff":
            closed = fn(z, method="closed")
            assert rel(closed, series) < 1e-12


@pytest.mark.parametrize("r", np.logspace(-0.5, 0.25, 16))
@pytest.mark.parametrize("lam", [1.0, -1.0])
def test_h_psi_branches_agree_near_crossover(lam, r):
    assert rel(sf.h(lam, r, method="series"), sf.h(lam, r, method="closed")) < 1e-12
    assert rel(sf.psi(lam, r, method="series"), sf.psi(lam, r, method="closed")) < 1e-12


def test_psi_small_argument_accuracy():
    for r in [1e-6, 1e-4, 1e-2]:
        x = mpmath.mpf(r)
        assert rel(sf.psi(1.0, r), float(1 - x / mpmath.tan(x))) < 1e-13
        assert rel(sf.psi(-1.0, r), float(x / mpmath.tanh(x) - 1)) < 1e-13


def test_monotonicity_grids():
    xs = np.linspace(0, 5, 400)
    assert np.all(np.diff([sf.phi_minus(x) for x in xs]) > 0)
    xs = np.linspace(0, 0.75 * math.pi, 400)
    assert np.all(np.diff([sf.phi_plus(x) for x in xs]) > 0)
    xs = np.linspace(0, 0.99 * math.pi, 400)
    assert np.all(np.diff([sf.h(1.0, x) for x in xs]) < 0)
    xs = np.linspace(0, 5, 400)
    assert np.all(np.diff([sf.h(-1.0, x) for x in xs]) > 0)
    for lam in [-3.0, -0.5, 0.5, 2.0]:
        rs = np.linspace(0, 0.99 * math.pi / math.sqrt(abs(lam)) if lam > 0 else 4, 300)
        assert np.all(np.diff([sf.psi(lam, r) for r in rs]) > 0)
    rs = np.linspace(0, 1.5, 300)
    assert np.all(np.diff([sf.psi_max(-1.0, 1.0, r) for r in rs]) >= 0)
    deltas = np.linspace(-4, 1, 100)
    assert np.all(np.diff([sf.psi_max(d, 1.0, 1.2) for d in deltas]) <= 0)
    Deltas = np.linspace(-1, 2, 100)
    assert np.all(np.diff([sf.psi_max(-1.0, D, 1.0) for D in Deltas]) >= 0)


def test_psi_increasing_in_abs_lambda():
    for sign in [1.0, -1.0]:
        lams = sign * np.linspace(0.01, 2.0, 100)
        assert np.all(np.diff([sf.psi(l, 1.0) for l in lams]) > 0)


@pytest.mark.parametrize("lam", [-2.0, -0.5, 0.5, 1.0, 2.0])
def test_psi_convex_in_r(lam):
    top = 0.95 * math.pi / math.sqrt(lam) if lam > 0 else 3.0
    rs = np.linspace(0, top, 300)
    vals = np.array([sf.psi(lam, r) for r in rs])
    assert np.all(vals[2:] - 2 * vals[1:-1] + vals[:-2] >= -1e-10)


def test_psi_convex_in_positive_lambda():
    lams = np.linspace(0, 2.0, 200)
    vals = np.array([sf.psi(l, 1.0) for l in lams])
    assert np.all(vals[2:] - 2 * vals[1:-1] + vals[:-2] >= -1e-10)


def test_psi_concave_in_negative_lambda():
    # x coth x - 1 = |lam|/3 - lam^2/45 + ...: convexity in lambda fails below 0
    lams = np.linspace(-3.0, 0, 200)
    vals = np.array([sf.psi(l, 1.0) for l in lams])
    assert np.all(vals[2:] - 2 * vals[1:-1] + vals[:-2] <= 1e-10)


@pytest.mark.parametrize("x", [0.0, 1e-5, 0.2, 1.0, 2.0])
def test_identities(x):
    assert sf.phi_plus(x) == pytest.approx(sf.stretched_sin(-x * x) - sf.stretched_cos(-x * x), abs=1e-15)
    assert sf.phi_minus(x) == pytest.approx(sf.stretched_cos(x * x) - sf.stretched_sin(x * x), abs=1e-15)
    for lam in [-1.0, 0.0, 1.0]:
        assert sf.psi_max(lam, lam, x) == sf.psi(lam, x)


def test_nonfinite_rejected():
    with pytest.raises(DomainError):
        sf.stretched_cos(float("nan"))
    with pytest.raises(DomainError):
        sf.psi_max(1.0, 0.0, 0.5)

"""Acceptance suite: one test per criterion, each recording a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v``; the per-criterion summary is
printed at the end of the session.
"""
import math

import numpy as np
import pytest

from riemcenter import oracles, radii, specfun
from riemcenter.averaging import MassDistribution, aposteriori_bound, iterate_mean, y_field
from riemcenter.manifolds import Euclidean, ShapeSpace2D, Sphere
from riemcenter.newton import classify_order, iterate, poly1d_field, VectorField

from acceptance_log import record
from oracles_indep import cap_points, sphere_dist, sphere_grid_minimizer

PI = math.pi
S2 = Sphere(2)
SEED = 20240611


def _close(value, target, tol):
    return abs(value - target) <= tol


# 1

SECTION6 = radii.CurveBounds.constant(1.0, 0.0, 1.5)


def test_criterion_01_constants():
    rep = radii.solve_radii("seq", SECTION6, 0.0)
    rc = radii.rate_constants("seq", SECTION6, 0.0)
    checks = [
        ("rho_crit", _close(rep.rho_crit, 0.6816, 5e-4), f"{rep.rho_crit:.7f} vs 0.6816 +- 5e-4"),
        ("D_crit", _close(rep.D_crit, 0.3952, 5e-4), f"{rep.D_crit:.7f} vs 0.3952 +- 5e-4"),
        ("kappa_hat", _close(rc.kappa_hat, 0.4202, 1e-3), f"{rc.kappa_hat:.7f} vs 0.4202 +- 1e-3"),
        ("c1", rc.c1 <= 1.725 + 1e-3, f"{rc.c1:.7f} <= 1.726"),
        ("coefficient", rc.coefficient <= 2.690 + 1e-2, f"{rc.coefficient:.7f} <= 2.700"),
    ]
    for name, ok, detail in checks:
        record(1, name, ok, detail)
    assert all(ok for _, ok, _ in checks)


def test_criterion_01_rho4_at_dcrit():
    rep = radii.solve_radii("seq", SECTION6, 0.0)
    ok = _close(rep.rho4_at_dcrit, 1.1566, 1e-3)
    record(1, "rho4(D_crit)", ok, f"{rep.rho4_at_dcrit:.7f} vs 1.1566 +- 1e-3")
    assert ok


# 2

@pytest.mark.parametrize("variant, dc, r4", [("full_minus", 0.0904, 0.2777), ("full_plus", 0.0932, 0.2991)])
def test_criterion_02_full_variants(variant, dc, r4):
    rep = radii.solve_radii(variant, SECTION6, 0.0)
    ok_d = _close(rep.D_crit, dc * PI, 2e-3)
    ok_r = _close(rep.rho4_at_dcrit, r4 * PI, 2e-3)
    record(2, f"{variant} D_crit", ok_d, f"{rep.D_crit / PI:.6f}pi vs {dc}pi +- 2e-3")
    record(2, f"{variant} rho4", ok_r, f"{rep.rho4_at_dcrit / PI:.6f}pi vs {r4}pi +- 2e-3")
    assert ok_d and ok_r


# 3

def test_criterion_03_sphere_and_cpn_scaling():
    unit = radii.sphere_report(1.0)
    ok_r = unit.rho_crit >= 0.2169 * PI - 1e-3
    ok_d = unit.D_crit >= 0.1258 * PI - 1e-3
    record(3, "S2 rho_crit", ok_r, f"{unit.rho_crit / PI:.6f}pi >= 0.2169pi - 1e-3")
    record(3, "S2 D_crit", ok_d, f"{unit.D_crit / PI:.6f}pi >= 0.1258pi - 1e-3")
    cp = radii.cpn_report(3)
    names = ("rho1", "rho2", "rho3", "rho4", "D_crit", "D_max", "rho_crit", "rho4_at_dcrit")
    err = max(abs(getattr(cp, n) - getattr(unit, n) / 2) for n in names)
    ok_half = err <= 1e-9
    record(3, "CPn = half", ok_half, f"max |CP^3 - S2/2| = {err:.2e}")
    # the same from a direct solve with curvature in [1, 4]
    direct = radii.solve_radii("seq", radii.CurveBounds.constant(4.0, 1.0, (1 - 1e-9) * PI / 4))
    err2 = max(abs(direct.D_crit - unit.D_crit / 2), abs(direct.rho_crit - unit.rho_crit / 2))
    ok_direct = err2 <= 1e-9
    record(3, "CPn direct", ok_direct, f"direct [1,4] solve vs S2/2: {err2:.2e}")
    assert ok_r and ok_d and ok_half and ok_direct


# 4

def test_criterion_04_jacobi():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for lam in (1.0, -1.0, 4.0, -4.0):
        for r in (0.25, 0.5, 1.0):
            v = rng.normal(size=3)
            f1 = oracles.integrate_jacobi(oracles.JacobiProblem(v=v, r=r, lam=lam))
            x = math.sqrt(abs(lam)) * r
            target = specfun.phi_plus(x) if lam > 0 else specfun.phi_minus(x)
            worst = max(worst, abs(np.linalg.norm(f1) / np.linalg.norm(v) - target))
    ok_eq = worst <= 1e-8
    record(4, "equality", ok_eq, f"max error {worst:.2e} <= 1e-8")
    rep = oracles.check_jacobi_bounds(samples=200, seed=SEED)
    ok_bd = not rep.violations and rep.samples == 200
    record(4, "random bound", ok_bd, f"{len(rep.violations)} violations in {rep.samples}, worst ratio {rep.worst_ratio:.6f}")
    assert ok_eq and ok_bd


# 5

def test_criterion_05_appendix_roots():
    x0 = specfun.x0_root()
    root = specfun.phi_plus_unit_root()
    ok_x0 = 0.869 * PI < x0 < 0.871 * PI
    ok_root = 0.739 * PI < root < 0.741 * PI
    record(5, "x0", ok_x0, f"x0 = {x0 / PI:.6f}pi, want (0.869pi, 0.871pi)")
    record(5, "phi_+ = 1", ok_root, f"root = {root / PI:.6f}pi, want (0.739pi, 0.741pi)")
    assert ok_x0 and ok_root


# 6

def test_criterion_06_hessian_probe():
    rng = np.random.default_rng(SEED)
    p = rng.normal(size=3)
    p /= np.linalg.norm(p)
    u = S2.frame(p) @ rng.normal(size=2)
    q = S2.exp(p, 0.7 * u / np.linalg.norm(u))
    ev = np.sort(np.linalg.eigvalsh(oracles.hessian_probe(S2, p, q)))
    want = np.sort([1.0, 0.7 / math.tan(0.7)])
    rel = float(np.max(np.abs(ev - want) / want))
    ok_s = rel <= 1e-5
    record(6, "S2", ok_s, f"eigenvalues {ev.round(9).tolist()}, relative error {rel:.2e}")
    E = Euclidean(3)
    H = oracles.hessian_probe(E, rng.normal(size=3), rng.normal(size=3))
    err = float(np.max(np.abs(H - np.eye(3))))
    ok_e = err <= 1e-8
    record(6, "Euclidean", ok_e, f"max |H - I| = {err:.2e}")
    assert ok_s and ok_e


# 7

def test_criterion_07_weighted_mean_vs_grid():
    pts = np.array([[1.0, 0.0, 0.0], [0.6, 0.8, 0.0], [0.6, 0.0, 0.8]])
    w = np.array([0.5, 0.3, 0.2])
    Q = MassDistribution(S2, pts, w)
    mean, tr = iterate_mean(Q, tol=1e-12)
    ref = sphere_grid_minimizer(pts, w)
    d = sphere_dist(mean, ref)
    res = float(np.linalg.norm(y_field(Q, mean)))
    ok_d, ok_r = d <= 1e-6, res <= 1e-12
    record(7, "vs grid", ok_d, f"distance to grid minimizer {d:.2e}")
    record(7, "residual", ok_r, f"|Y_Q(mean)| = {res:.2e}")
    assert tr.converged and ok_d and ok_r


# 8 and 9 share the instances

def _cap_instance(rng, D):
    """A center, an opposite pair at D/2 (so diam = D) and three more points within D/2."""
    c = rng.normal(size=3)
    c /= np.linalg.norm(c)
    pair = cap_points(rng, c, D / 2, 1)[0]
    opposite = S2.exp(c, -S2.log(c, pair))
    more = cap_points(rng, c, rng.uniform(0, D / 2, 3), 3)
    pts = [c, pair, opposite, *more]
    w = rng.uniform(0.5, 1.5, len(pts))
    return MassDistribution.normalized(S2, pts, w)


DIAMETERS = (0.4, 0.2, 0.1, 0.05)


def _instances():
    rng = np.random.default_rng(SEED)
    return [(D, _cap_instance(rng, D)) for D in DIAMETERS for _ in range(5)]


def test_criterion_08_rate_law():
    bad_bound, bad_quad, worst_quad = 0, 0, 0.0
    lines = []
    for D, Q in _instances():
        assert abs(Q.diam - D) < 1e-12
        _, tr = iterate_mean(Q, p0=0)
        assert tr.converged
        Db = Q.radius_about(Q.points[0])
        rho1 = radii.sphere_report(1.0, "seq", Db).rho1
        bound = specfun.psi(1.0, rho1 + Db)
        ratios = [r for r in tr.ratios if r is not None]
        bad_bound += sum(r > bound + 1e-8 for r in ratios)
        if D <= 0.1:
            q = max(ratios) / D ** 2
            worst_quad = max(worst_quad, q)
            bad_quad += q > 1.6
        lines.append(f"D={D}: max ratio {max(ratios):.3e} vs bound {bound:.3e}")
    ok_b, ok_q = bad_bound == 0, bad_quad == 0
    record(8, "ratio <= psi", ok_b, f"{bad_bound} violations over {len(lines)} runs")
    record(8, "ratio / D^2", ok_q, f"max {worst_quad:.4f} <= 1.6 for D <= 0.1")
    assert ok_b and ok_q


def test_criterion_09_order_classification():
    X = poly1d_field(Euclidean(1), [1.0, 0.0, -2.0])
    _, tr = iterate("phi", X, np.array([1.5]))
    fit = classify_order(tr)
    ok_q = fit.kind == "quadratic" and 1.9 <= fit.exponent <= 2.1
    record(9, "Newton x^2 - 2", ok_q, f"{fit.kind}, exponent {fit.exponent:.4f}")
    kinds = []
    for D, Q in _instances():
        Y = VectorField(S2, lambda p, Q=Q: y_field(Q, p))
        _, trq = iterate("psi", Y, Q.points[0])
        kinds.append(classify_order(trq).kind)
    ok_g = all(k == "geometric" for k in kinds)
    record(9, "averaging geometric", ok_g, f"{kinds.count('geometric')}/{len(kinds)} geometric")
    E = Euclidean(4)
    rng = np.random.default_rng(SEED)
    Q = MassDistribution.normalized(E, rng.normal(size=(6, 4)), rng.uniform(0.1, 1, 6))
    _, tre = iterate_mean(Q)
    ok_e = tre.converged and tre.n_iter == 1
    record(9, "Euclidean one step", ok_e, f"n_iter = {tre.n_iter}")
    assert ok_q and ok_g and ok_e


# 10

def test_criterion_10_aposteriori_certificate():
    rng = np.random.default_rng(SEED)
    violations, checked, runs = 0, 0, 0
    while runs < 50:
        c = rng.normal(size=3)
        c /= np.linalg.norm(c)
        m = int(rng.integers(2, 7))
        pts = cap_points(rng, c, rng.uniform(0.0, 0.3, m), m)
        Q = MassDistribution.normalized(S2, pts, rng.uniform(0.1, 1.0, m))
        p0 = Q.points[int(rng.integers(m))]
        _, tr = iterate_mean(Q, p0=p0)
        if not tr.converged:
            continue
        runs += 1
        D = Q.radius_about(p0)
        final = tr.final

        def bound_at(p):
            rho = max(D, S2.dist(p0, p)) * (1 + 1e-9)
            return aposteriori_bound(Q, p, rho, center=p0)

        # the true mean is within bound_at(final) of final
        slack = bound_at(final)
        for p in tr.iterates:
            checked += 1
            if bound_at(p) < S2.dist(p, final) - slack:
                violations += 1
    ok = violations == 0
    record(10, "certificate", ok, f"{violations} violations over {checked} iterates in {runs} runs")
    assert ok


# 11

def _chain_draw(rng):
    variant = str(rng.choice(["seq", "full_minus", "full_plus"]))
    Delta = rng.uniform(0.1, 4.0)
    delta = rng.uniform(0.0, Delta) if variant == "full_plus" else rng.uniform(-2.0, Delta)
    r1 = rng.uniform(0.3, 0.999) * PI / (2 * math.sqrt(Delta))
    b = radii.CurveBounds.constant(Delta, delta, r1)
    Dc, _ = radii.d_crit(variant, b)
    return variant, b, rng.uniform(0.0, 0.999) * Dc


def test_criterion_11_ordering_chain():
    rng = np.random.default_rng(SEED)
    tol = 1e-9
    links = {
        "D <= rho0": lambda D, r: D <= r.rho0 + tol,
        "rho0 <= rho1": lambda D, r: r.rho0 <= r.rho1 + tol,
        "rho1 < rho_crit": lambda D, r: r.rho1 < r.rho_crit,
        "rho_crit <= rho3": lambda D, r: r.rho_crit <= r.rho3 + tol,
        "rho3 < rho4": lambda D, r: r.rho3 < r.rho4,
        "rho4 <= D_max": lambda D, r: r.rho4 <= r.D_max + tol,
    }
    counts = dict.fromkeys(links, 0)
    for _ in range(100):
        variant, b, D = _chain_draw(rng)
        rep = radii.solve_radii(variant, b, D)
        for name, holds in links.items():
            counts[name] += not holds(D, rep)
    total = sum(counts.values())
    detail = ", ".join(f"{k}: {v}" for k, v in counts.items())
    record(11, "chain", total == 0, f"violations per link over 100 draws: {detail}")
    assert total == 0


# 12

def _centered_basis(k):
    """Orthonormal rows spanning the centered subspace, from an SVD (not the Helmert basis)."""
    u, _, _ = np.linalg.svd(np.eye(k) - np.full((k, k), 1.0 / k))
    return u[:, :k - 1].T


def _preshape(config, B):
    w = B @ config
    return w / np.linalg.norm(w)


def _config_distance(a, b):
    """Shape distance of two centered unit configurations, via the aligned chord."""
    h = np.vdot(b, a)
    chord = float(np.linalg.norm(b * (h / abs(h)) - a))
    return 2 * math.asin(min(1.0, chord / 2))


def _preshape_sphere_mean(preshapes, weights, iters=500):
    """Mean on the preshape sphere with each sample phase-aligned to the current estimate."""
    z = preshapes[int(np.argmax(weights))].copy()
    for _ in range(iters):
        step = np.zeros_like(z)
        for w_i, x in zip(weights, preshapes):
            h = np.vdot(x, z)
            xa = x * (h / abs(h))  # <z, xa> real and positive
            c = min(1.0, float(np.real(np.vdot(z, xa))))
            t = math.acos(c)
            d = xa - c * z
            n = np.linalg.norm(d)
            if n > 0:
                step += w_i * t * d / n
        ns = np.linalg.norm(step)
        if ns < 1e-15:
            break
        z = math.cos(ns) * z + math.sin(ns) * step / ns
        z /= np.linalg.norm(z)
    return z


def _hopf(z):
    """CP^1 -> S^2(1/2)."""
    a, b = z
    return 0.5 * np.array([2 * (a * b.conjugate()).real, 2 * (a * b.conjugate()).imag,
                           abs(a) ** 2 - abs(b) ** 2])


def test_criterion_12_shape_space():
    rng = np.random.default_rng(SEED)
    M5 = ShapeSpace2D(5)
    worst_inv = 0.0
    for _ in range(20):
        z = rng.normal(size=5) + 1j * rng.normal(size=5)
        p = M5.embed(z)
        moved = rng.uniform(0.1, 10) * np.exp(1j * rng.uniform(0, 2 * PI)) * z + complex(*rng.normal(size=2) * 5)
        worst_inv = max(worst_inv, M5.dist(p, M5.embed(moved)))
    ok_inv = worst_inv <= 1e-10
    record(12, "invariance", ok_inv, f"max distance {worst_inv:.2e}")

    square = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j, 0.0])
    configs = [square + 0.08 * (rng.normal(size=5) + 1j * rng.normal(size=5)) for _ in range(8)]
    w = rng.uniform(0.5, 1.5, 8)
    w /= w.sum()
    Q = MassDistribution(M5, [M5.embed(c) for c in configs], w)
    mean, tr = iterate_mean(Q)
    B = _centered_basis(5)
    z_ref = _preshape_sphere_mean([_preshape(c, B) for c in configs], w)
    d5 = _config_distance(M5.configuration(mean), B.T @ z_ref)
    ok5 = tr.converged and d5 <= 1e-8
    record(12, "k=5 via CP^3", ok5, f"distance to preshape-sphere oracle {d5:.2e}")

    M3 = ShapeSpace2D(3)
    tri = np.array([0.0, 1.0, 0.4 + 0.9j])
    tris = [tri + 0.1 * (rng.normal(size=3) + 1j * rng.normal(size=3)) for _ in range(6)]
    w3 = rng.uniform(0.5, 1.5, 6)
    w3 /= w3.sum()
    Q3 = MassDistribution(M3, [M3.embed(t) for t in tris], w3)
    mean3, tr3 = iterate_mean(Q3)
    S_half = Sphere(2, 0.5)
    hopf_pts = [_hopf(M3.to_complex(p)) for p in Q3.points]
    Qs = MassDistribution(S_half, hopf_pts, w3)
    mean_s, trs = iterate_mean(Qs)
    d3 = S_half.dist(_hopf(M3.to_complex(mean3)), mean_s)
    grid = sphere_grid_minimizer(np.array(hopf_pts) * 2, w3)
    d3_grid = sphere_dist(2 * mean_s, grid) / 2
    ok3 = tr3.converged and trs.converged and d3 <= 1e-8 and d3_grid <= 1e-6
    record(12, "k=3 vs S2(1/2)", ok3, f"Hopf image vs sphere mean {d3:.2e}, vs grid {d3_grid:.2e}")
    assert ok_inv and ok5 and ok3

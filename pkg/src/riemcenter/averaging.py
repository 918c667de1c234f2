"""Weighted Riemannian averaging: Y_Q, f_Q and the iteration p <- exp_p(Y_Q(p))."""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import radii, specfun
from .errors import DomainError, SupercriticalError, SupportPointError
from .trace import run_fixed_point

WEIGHT_TOL = 1e-12
GUARD_MARGIN = 1e-8


class MassDistribution:
    """Finitely many points of one manifold with positive weights summing to 1."""

    def __init__(self, manifold, points, weights=None):
        pts = [manifold.validate_point(p) for p in points]
        if not pts:
            raise DomainError("a mass distribution needs at least one point")
        if weights is None:
            w = np.full(len(pts), 1.0 / len(pts))
        else:
            w = np.asarray(weights, dtype=float)
            if w.shape != (len(pts),):
                raise DomainError(f"{len(pts)} points but {w.size} weights")
            if not np.all(w > 0):
                raise DomainError("weights must be positive")
            if abs(math.fsum(w) - 1.0) > WEIGHT_TOL:
                raise DomainError(f"weights sum to {math.fsum(w):.17g}, not 1")
        self.manifold = manifold
        self.points = pts
        self.weights = w
        self._diam = None

    @classmethod
    def normalized(cls, manifold, points, weights=None):
        """Like the constructor but rescales positive weights to sum to 1."""
        if weights is not None:
            w = np.asarray(weights, dtype=float)
            if np.any(w <= 0):
                raise DomainError("weights must be positive")
            weights = w / math.fsum(w)
        return cls(manifold, points, weights)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(zip(self.points, self.weights))

    def permuted(self, order):
        return MassDistribution(self.manifold, [self.points[i] for i in order],
                                self.weights[list(order)])

    @property
    def diam(self):
        if self._diam is None:
            M = self.manifold
            d = 0.0
            for i in range(len(self.points)):
                for j in range(i + 1, len(self.points)):
                    d = max(d, M.dist(self.points[i], self.points[j]))
            self._diam = d
        return self._diam

    def radius_about(self, p):
        """max_i d(p, q_i)."""
        return max(self.manifold.dist(p, q) for q in self.points)


def _logs(Q, p):
    M = Q.manifold
    out = []
    for i, q in enumerate(Q.points):
        try:
            out.append(M.log(p, q))
        except DomainError as exc:
            raise SupportPointError(f"support point {i}: {exc}", i) from exc
    return out


def y_field(Q, p):
    """Y_Q(p) = sum_i w_i log_p(q_i), summed per coordinate with math.fsum in entry order."""
    p = np.asarray(p, dtype=float)
    logs = _logs(Q, p)
    terms = np.array([w * v for w, v in zip(Q.weights, logs)])
    return np.array([math.fsum(col) for col in terms.T])


def f_energy(Q, p):
    """f_Q(p) = 1/2 sum_i w_i d(p, q_i)^2."""
    M = Q.manifold
    ds = []
    for i, q in enumerate(Q.points):
        try:
            ds.append(M.dist(p, q))
        except DomainError as exc:
            raise SupportPointError(f"support point {i}: {exc}", i) from exc
    return 0.5 * math.fsum(w * d * d for w, d in zip(Q.weights, ds))


def psi_step(Q, p):
    """Psi_Q(p) = exp_p(Y_Q(p))."""
    return Q.manifold.exp(p, y_field(Q, p))


def best_support_point(Q):
    """Index of the support point with the smallest f_Q."""
    best, best_f = None, math.inf
    for i, q in enumerate(Q.points):
        try:
            f = f_energy(Q, q)
        except DomainError:
            continue
        if f < best_f:
            best, best_f = i, f
    if best is None:
        raise DomainError("f_Q is undefined at every support point")
    return best


def _curvature(M, p):
    b = M.curvature_bounds(p)
    return b.delta, b.Delta


def aposteriori_bound(Q, p, rho, center=None):
    """Upper bound on d(p, mean): |Y_Q(p)| / h(Delta, 2 rho), or |Y_Q(p)| when Delta <= 0.

    ``rho`` is the radius of a strongly convex ball containing Q and p; when
    ``center`` is given, containment is checked.
    """
    M = Q.manifold
    _, Delta = _curvature(M, p)
    _check_certificate_ball(Q, p, rho, center, Delta)
    ny = float(np.linalg.norm(y_field(Q, p)))
    return _karcher(ny, Delta, rho)


def _karcher(ny, Delta, rho):
    if Delta <= 0 or ny == 0:
        return ny
    return ny / specfun.h(Delta, 2.0 * rho)


def _check_certificate_ball(Q, p, rho, center, Delta):
    M = Q.manifold
    if rho < 0:
        raise DomainError(f"rho must be >= 0, got {rho}")
    if Delta > 0 and 2.0 * rho * math.sqrt(Delta) >= math.pi / 2:
        raise DomainError(f"2 rho sqrt(Delta) = {2 * rho * math.sqrt(Delta):.12g} must be < pi/2")
    if center is not None:
        if rho >= M.regularity(center).r_cvx:
            raise DomainError("the certificate ball is not strongly convex")
        far = max(Q.radius_about(center), M.dist(center, p))
        if far >= rho:
            raise DomainError(f"Q and p are not inside B_rho(center): max distance {far:.12g} >= {rho}")


def _bounds_for(M, p0):
    """Constant curvature bounds with the largest admissible r1 for the manifold."""
    delta, Delta = _curvature(M, p0)
    r = M.regularity(p0).r_regcvx
    if Delta > 0:
        r = min(r, math.pi / (2 * math.sqrt(Delta)))
    r1 = (1.0 - 1e-9) * r if math.isfinite(r) else math.inf
    return radii.CurveBounds.constant(Delta, delta, r1)


def iterate_mean(Q, p0=None, tol=None, max_iter=200, *, assume_tethered=False):
    """Run p_{n+1} = exp(Y_Q(p_n)) from p0 (default: the best support point).

    Iterates must stay within the guard radius r = min(r_regcvx(p0) - 1e-8, rho4(D))
    about p0, with D = max_i d(p0, q_i); leaving it ends the run with reason
    ``domain_exit``. ``trace.info['certified']`` records whether D is small enough
    for convergence to be guaranteed: D < D_crit, or D < D_max when the map is
    assumed tethered.
    """
    M = Q.manifold
    if tol is None:
        tol = 1e-12 * (1.0 + Q.diam)
    if p0 is None:
        p0 = Q.points[best_support_point(Q)]
    elif isinstance(p0, (int, np.integer)):
        p0 = Q.points[int(p0)]
    p0 = M.validate_point(p0)
    D = Q.radius_about(p0)
    delta, Delta = _curvature(M, p0)
    bounds = _bounds_for(M, p0)
    seq = radii.KappaVariant.SEQ
    D_crit, _ = radii.d_crit(seq, bounds)
    D_max = radii.d_max(seq, bounds)
    guard = M.regularity(p0).r_regcvx - GUARD_MARGIN
    if D < D_max:
        guard = min(guard, radii.rho4(seq, bounds, D) if math.isfinite(bounds.r1) else math.inf)
    certified = D < (D_max if assume_tethered else D_crit)

    def inside(q):
        return M.dist(p0, q) < guard

    def certificate(p, ny):
        rho = max(D, M.dist(p0, p)) * (1.0 + 1e-9)
        if Delta > 0 and 2.0 * rho * math.sqrt(Delta) >= math.pi / 2:
            return None
        if rho >= M.regularity(p0).r_cvx:
            return None
        return _karcher(ny, Delta, rho)

    trace = run_fixed_point(M, lambda p: y_field(Q, p), p0, tol, max_iter,
                            inside=inside if math.isfinite(guard) else None,
                            certificate=certificate)
    trace.info.update(D=D, guard_radius=guard, D_crit=D_crit, D_max=D_max,
                      certified=certified, assume_tethered=assume_tethered, tol=tol)
    return trace.final, trace


def require_subcritical(Q, p0=None):
    """Raise SupercriticalError unless max_i d(p0, q_i) < D_crit for the manifold's bounds."""
    M = Q.manifold
    p0 = Q.points[best_support_point(Q)] if p0 is None else p0
    D = Q.radius_about(p0)
    Dc, _ = radii.d_crit(radii.KappaVariant.SEQ, _bounds_for(M, p0))
    if D >= Dc:
        raise SupercriticalError(f"support radius {D:.12g} >= D_crit {Dc:.12g}", Dc)
    return D


@dataclass(frozen=True)
class ContractionEstimate:
    analytic: float
    observed: Optional[float]


def contraction_estimate(Q, center, rho, trace=None):
    """psi_max(delta, Delta, rho + D) bound on |grad Y_Q + I| over B_rho(center), and the
    largest step ratio seen in ``trace`` if one is given."""
    M = Q.manifold
    D = Q.radius_about(center)
    if rho < D:
        raise DomainError(f"rho = {rho} is smaller than D = {D}")
    delta, Delta = _curvature(M, center)
    if Delta > 0 and (rho + D) * math.sqrt(Delta) >= math.pi:
        raise DomainError("(rho + D) sqrt(Delta) must be < pi")
    analytic = specfun.psi_max(delta, Delta, rho + D)
    observed = None
    if trace is not None:
        observed = trace.max_ratio()
        if observed is None:
            observed = 0.0
    return ContractionEstimate(analytic, observed)

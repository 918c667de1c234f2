"""Zero-finding maps for vector fields: Psi_Y = exp o Y and the Newton map Phi_X."""
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from . import specfun
from .errors import DegeneracyError, DomainError
from .trace import run_fixed_point

COND_LIMIT = 1e8
EPS = np.finfo(float).eps


@dataclass(frozen=True)
class VectorField:
    """A tangent vector field on ``manifold``.

    ``eval(p)`` returns the vector at p (ambient coordinates). ``cov_deriv(p, frame)``,
    if given, returns the matrix of the covariant derivative in the orthonormal
    ``frame`` (columns), i.e. entry (i, j) = <e_i, nabla_{e_j} X>.
    """

    manifold: object
    eval: Callable
    cov_deriv: Optional[Callable] = None

    def __call__(self, p):
        return self.eval(p)


def psi_map(Y, p):
    """exp_p(Y(p))."""
    return Y.manifold.exp(p, Y(p))


def cov_deriv_fd(Y, p, frame=None, h=None):
    """Central-difference covariant derivative, transporting Y(exp_p(+-h e_i)) back to p."""
    M = Y.manifold
    p = np.asarray(p, dtype=float)
    F = M.frame(p) if frame is None else np.asarray(frame, dtype=float)
    if h is None:
        h = EPS ** (1.0 / 3.0) * (1.0 + float(np.linalg.norm(Y(p))))
    if h >= M.regularity(p).r_inj:
        raise DomainError(f"finite-difference step {h} is too large")
    cols = []
    for i in range(F.shape[1]):
        e = F[:, i]
        plus, minus = M.exp(p, h * e), M.exp(p, -h * e)
        yp = M.transport(plus, p, Y(plus))
        ym = M.transport(minus, p, Y(minus))
        cols.append(F.T @ ((yp - ym) / (2.0 * h)))
    return np.column_stack(cols)


def _derivative(X, p, F):
    if X.cov_deriv is not None:
        return np.asarray(X.cov_deriv(p, F), dtype=float)
    return cov_deriv_fd(X, p, F)


def newton_step(X, p, frame=None):
    """The tangent vector -(nabla X)_p^{-1} X_p."""
    M = X.manifold
    p = np.asarray(p, dtype=float)
    F = M.frame(p) if frame is None else frame
    A = _derivative(X, p, F)
    cond = np.linalg.cond(A)
    if not cond < COND_LIMIT:
        raise DegeneracyError(f"covariant derivative has condition number {cond:.3g} >= {COND_LIMIT:g}")
    b = F.T @ np.asarray(X(p), dtype=float)
    return -F @ scipy.linalg.solve(A, b)


def phi_map(X, p, frame=None):
    """exp_p(-(nabla X)_p^{-1} X_p)."""
    return X.manifold.exp(p, newton_step(X, p, frame))


def iterate(kind, field, p0, tol=1e-12, max_iter=200):
    """Iterate Psi_Y (kind 'psi') or Phi_X (kind 'phi') from p0."""
    if kind == "psi":
        step = field
    elif kind == "phi":
        step = lambda p: newton_step(field, p)
    else:
        raise DomainError(f"map kind must be 'psi' or 'phi', got {kind!r}")
    p0 = field.manifold.validate_point(p0)
    trace = run_fixed_point(field.manifold, step, p0, tol, max_iter)
    return trace.final, trace


@dataclass(frozen=True)
class OrderFit:
    kind: str  # geometric, quadratic or inconclusive
    exponent: Optional[float] = None
    rate: Optional[float] = None
    k4: Optional[float] = None


def classify_order(trace):
    """Fit log s_{n+1} = a log s_n + b over the tail of the step lengths.

    Only steps above 100 machine epsilon count, and only the last max(4, n/2) of
    them. A slope near 1 means geometric decay with rate exp(b) (the median
    ratio is reported); a slope of 1.6 or more means quadratic decay with k4 = exp(b).
    """
    s = [x for x in trace.step_lengths if x > 100 * EPS]
    s = s[-max(4, len(s) // 2):]
    if len(s) < 3:
        return OrderFit("inconclusive")
    x, y = np.log(s[:-1]), np.log(s[1:])
    a, b = np.polyfit(x, y, 1)
    if a >= 1.6:
        return OrderFit("quadratic", exponent=float(a), k4=float(math.exp(b)))
    if abs(a - 1.0) <= 0.25:
        rate = float(np.median(np.exp(y - x)))
        return OrderFit("geometric", exponent=float(a), rate=rate)
    return OrderFit("inconclusive", exponent=float(a))


def kappa_psi(eps0, eps1, absK, delta, *, locally_symmetric=False, Delta=None):
    """Contraction constant for Psi_Y with |Y| <= eps0 and |nabla Y + I| <= eps1.

    General: phi_-(sqrt|K| eps0) + C1(delta, eps0) eps1. Locally symmetric with
    nonnegative curvature <= Delta: phi_+(sqrt(Delta) eps0) + eps1, needs sqrt(Delta) eps0 < 3pi/4.
    """
    if eps0 < 0 or eps1 < 0 or absK < 0:
        raise DomainError("eps0, eps1 and |K| must be nonnegative")
    if locally_symmetric:
        D = absK if Delta is None else Delta
        if delta < 0:
            raise DomainError("the locally symmetric bound needs nonnegative curvature")
        x = math.sqrt(D) * eps0
        if x >= 0.75 * math.pi:
            raise DomainError(f"sqrt(Delta) eps0 = {x:.12g} must be < 3pi/4")
        return specfun.phi_plus(x) + eps1
    return specfun.phi_minus(math.sqrt(absK) * eps0) + specfun.c1(delta, eps0) * eps1


def kappa_phi(eps, k1, k2, absK, delta, *, locally_symmetric=False, Delta=None):
    """Contraction constant for Phi_X with |X| <= eps, |(nabla X)^{-1}| <= 1/k1, |nabla nabla X| <= k2."""
    if k1 <= 0 or k2 < 0 or eps < 0:
        raise DomainError("need k1 > 0, k2 >= 0, eps >= 0")
    e0 = eps / k1
    e1 = k2 * eps / (k1 * k1)
    if locally_symmetric:
        D = absK if Delta is None else Delta
        if math.sqrt(D) * e0 > 0.75 * math.pi:
            raise DomainError("sqrt(Delta) eps / k1 must be <= 3pi/4")
        if delta < 0:
            raise DomainError("the locally symmetric bound needs nonnegative curvature")
        return specfun.phi_plus(math.sqrt(D) * e0) + e1
    return specfun.phi_minus(math.sqrt(absK) * e0) + specfun.c1(delta, e0) * e1


# demo fields for the command line

def radial_field(manifold):
    """Y(x) = -x on Euclidean space."""
    return VectorField(manifold, lambda p: -np.asarray(p, float),
                       lambda p, F: -np.eye(F.shape[1]))


def poly1d_field(manifold, coeffs):
    """X(x) = polynomial with the given coefficients (highest degree first) on the real line."""
    if manifold.dim != 1:
        raise DomainError("poly1d fields live on euclidean:dim=1")
    poly = np.poly1d(coeffs)
    dpoly = poly.deriv()
    return VectorField(manifold, lambda p: np.array([poly(p[0])]),
                       lambda p, F: np.array([[dpoly(p[0])]]))


def mean_field(Q):
    """Y_Q as a vector field."""
    from .averaging import y_field

    return VectorField(Q.manifold, lambda p: y_field(Q, p))

"""Independent checks: antidiagonal Jacobi fields, distance Hessians and nabla Y_Q.

Jacobi fields are written in a parallel orthonormal frame perpendicular to a
geodesic of length r parametrized on [0, 1]. The perpendicular part f solves
f'' = A(t) f with f(0) = v, f'(0) = -v, and A(t) = -r^2 R(., gamma_hat) gamma_hat,
so in constant curvature K, A = -K r^2 I. For constant A = r^2 A_hat the solution
at t = 1 is (c(r^2 A_hat) - s(r^2 A_hat)) v.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import specfun
from .averaging import y_field
from .errors import DomainError
from .newton import VectorField, cov_deriv_fd


@dataclass(frozen=True)
class JacobiProblem:
    """Antidiagonal Jacobi data along a geodesic of length r.

    Give exactly one of ``lam`` (constant curvature), ``A_hat`` (constant symmetric
    matrix, A = r^2 A_hat) or ``A_of_t`` (callable t -> A(t), already including r^2).
    """

    v: np.ndarray
    r: float
    lam: Optional[float] = None
    A_hat: Optional[np.ndarray] = None
    A_of_t: Optional[Callable] = None

    def __post_init__(self):
        if sum(x is not None for x in (self.lam, self.A_hat, self.A_of_t)) != 1:
            raise DomainError("give exactly one of lam, A_hat, A_of_t")
        if self.r < 0:
            raise DomainError("r must be >= 0")
        if self.A_hat is not None:
            A = np.asarray(self.A_hat, dtype=float)
            if not np.allclose(A, A.T, atol=1e-12):
                raise DomainError("A_hat must be symmetric")

    def constant_A_hat(self):
        n = np.size(self.v)
        if self.lam is not None:
            return -self.lam * np.eye(n)
        if self.A_hat is not None:
            return np.asarray(self.A_hat, dtype=float)
        return None

    def A(self, t):
        A_hat = self.constant_A_hat()
        if A_hat is not None:
            return self.r * self.r * A_hat
        return np.asarray(self.A_of_t(t), dtype=float)


def integrate_jacobi(prob, steps=10_000):
    """f(1) by classical fourth-order Runge-Kutta on (f, f')."""
    if steps < 100:
        raise DomainError("use at least 100 steps")
    v = np.asarray(prob.v, dtype=float)
    n = v.size
    h = 1.0 / steps
    A_hat = prob.constant_A_hat()
    if A_hat is not None:
        # for y' = M y with constant M one RK4 step is y <- (sum_{k<=4} (hM)^k / k!) y
        M = np.block([[np.zeros((n, n)), np.eye(n)], [prob.r * prob.r * A_hat, np.zeros((n, n))]])
        hM = h * M
        P = np.eye(2 * n)
        term = np.eye(2 * n)
        for k in range(1, 5):
            term = term @ hM / k
            P = P + term
        y = np.concatenate([v, -v])
        for _ in range(steps):
            y = P @ y
        return y[:n]
    f, g = v.copy(), -v.copy()
    for k in range(steps):
        t = k * h
        A0, Am, A1 = prob.A(t), prob.A(t + h / 2), prob.A(t + h)
        k1f, k1g = g, A0 @ f
        k2f, k2g = g + h / 2 * k1g, Am @ (f + h / 2 * k1f)
        k3f, k3g = g + h / 2 * k2g, Am @ (f + h / 2 * k2f)
        k4f, k4g = g + h * k3g, A1 @ (f + h * k3f)
        f = f + h / 6 * (k1f + 2 * k2f + 2 * k3f + k4f)
        g = g + h / 6 * (k1g + 2 * k2g + 2 * k3g + k4g)
    return f


def jacobi_series(A_hat, r, v):
    """(c(r^2 A_hat) - s(r^2 A_hat)) v by eigendecomposition of A_hat.

    An eigenvalue a scales its component by c(r^2 a) - s(r^2 a): phi_-(sqrt(a) r)
    for a > 0 and -phi_+(sqrt(-a) r) for a < 0 (a = -K for curvature K).
    """
    A_hat = np.atleast_2d(np.asarray(A_hat, dtype=float))
    w, U = np.linalg.eigh(A_hat)
    scale = np.array([specfun.cs_difference(r * r * a) for a in w])
    return U @ (scale * (U.T @ np.asarray(v, dtype=float)))


def series_operator_norm(A_hat, r):
    w = np.linalg.eigvalsh(np.atleast_2d(np.asarray(A_hat, dtype=float)))
    return max(abs(specfun.cs_difference(r * r * a)) for a in w)


def jacobi_bound(delta, Delta, r):
    """Three-case bound on |c(r^2 A_hat) - s(r^2 A_hat)| for curvatures in [delta, Delta]."""
    if delta > Delta:
        raise DomainError("need delta <= Delta")
    if Delta < 0:
        return specfun.phi_minus(math.sqrt(-delta) * r)
    x = math.sqrt(Delta) * r
    if x > specfun.x0_root():
        raise DomainError(f"sqrt(Delta) r = {x:.12g} exceeds x0")
    if delta >= 0:
        return specfun.phi_plus(x)
    return max(specfun.phi_minus(math.sqrt(-delta) * r), specfun.phi_plus(x))


def constant_curvature_value(lam, r):
    """|f(1)| / |v| for constant curvature lam: phi_+ for lam > 0, phi_- for lam < 0, 0 when flat."""
    if lam > 0:
        return specfun.phi_plus(math.sqrt(lam) * r)
    return specfun.phi_minus(math.sqrt(-lam) * r)


@dataclass
class JacobiReport:
    samples: int = 0
    violations: list = field(default_factory=list)
    equality_max_error: float = 0.0
    tangential_max: float = 0.0
    worst_ratio: float = 0.0

    @property
    def passed(self):
        return not self.violations and self.equality_max_error <= 1e-8 and self.tangential_max <= 1e-12


def random_jacobi_sample(rng, dim=3):
    """Random curvature interval, spectrum inside it, basis, length and vector."""
    kind = rng.integers(3)
    if kind == 0:
        delta, Delta = np.sort(rng.uniform(0.0, 4.0, 2))
    elif kind == 1:
        delta, Delta = -rng.uniform(0.0, 4.0), rng.uniform(0.01, 4.0)
    else:
        delta, Delta = np.sort(-rng.uniform(0.01, 4.0, 2))
    curv = rng.uniform(delta, Delta, dim)
    curv[0], curv[-1] = delta, Delta
    Qm, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    A_hat = Qm @ np.diag(-curv) @ Qm.T
    A_hat = (A_hat + A_hat.T) / 2
    rmax = specfun.x0_root() / math.sqrt(Delta) if Delta > 0 else 2.0
    r = rng.uniform(0.0, min(rmax, 2.0))
    v = rng.normal(size=dim)
    return float(delta), float(Delta), A_hat, float(r), v


def check_jacobi_bounds(samples=200, seed=0, dim=3, steps=2000):
    """Check the three-case bound on random constant-A problems, equality for constant curvature,
    and that the tangential part of an antidiagonal field vanishes at time 1."""
    rng = np.random.default_rng(seed)
    rep = JacobiReport()
    for i in range(samples):
        delta, Delta, A_hat, r, v = random_jacobi_sample(rng, dim)
        bound = jacobi_bound(delta, Delta, r)
        f1 = integrate_jacobi(JacobiProblem(v=v, r=r, A_hat=A_hat), steps)
        op = series_operator_norm(A_hat, r)
        ratio = float(np.linalg.norm(f1) / np.linalg.norm(v))
        rep.worst_ratio = max(rep.worst_ratio, ratio / bound if bound > 0 else 0.0)
        if ratio > bound + 1e-10 or op > bound + 1e-12:
            rep.violations.append({"index": i, "delta": delta, "Delta": Delta, "r": r,
                                   "measured": ratio, "operator_norm": op, "bound": bound})
        rep.samples += 1
    for lam in (1.0, -1.0, 4.0, -4.0):
        for r in (0.25, 0.5, 1.0):
            v = rng.normal(size=dim)
            f1 = integrate_jacobi(JacobiProblem(v=v, r=r, lam=lam))
            err = abs(np.linalg.norm(f1) / np.linalg.norm(v) - constant_curvature_value(lam, r))
            rep.equality_max_error = max(rep.equality_max_error, err)
    # tangential part: f'' = 0, f(0) = a, f'(0) = -a
    a = rng.normal()
    tang = integrate_jacobi(JacobiProblem(v=np.array([a]), r=1.0, A_hat=np.zeros((1, 1))), 100)
    rep.tangential_max = float(abs(tang[0]))
    return rep


def _half_sq(M, q):
    return lambda x: 0.5 * M.dist(x, q) ** 2


def hessian_probe(M, p, q, frame=None, h=None):
    """Hessian of x -> d(x, q)^2 / 2 at p in ``frame``, by second differences along geodesics.

    Each second difference is Richardson-extrapolated from steps h and 2h, so the
    truncation error is O(h^4) and h can stay large enough to keep rounding small.
    Off-diagonal entries use polarization: H(e_i, e_j) = (H(e_i+e_j) - H(e_i-e_j)) / 4.
    """
    p = np.asarray(p, dtype=float)
    F = M.frame(p) if frame is None else np.asarray(frame, dtype=float)
    d = M.dist(p, q)
    if h is None:
        h = 1e-3 * (1.0 + d)
    if d + 4 * h >= M.regularity(p).r_inj:
        raise DomainError("probe points would reach the cut locus")
    f = _half_sq(M, q)
    f0 = f(p)

    def plain(u, t):
        return (f(M.exp(p, t * u)) - 2.0 * f0 + f(M.exp(p, -t * u))) / (t * t)

    def second(u):
        return (4.0 * plain(u, h) - plain(u, 2.0 * h)) / 3.0

    n = F.shape[1]
    H = np.empty((n, n))
    for i in range(n):
        H[i, i] = second(F[:, i])
    for i in range(n):
        for j in range(i + 1, n):
            H[i, j] = H[j, i] = (second(F[:, i] + F[:, j]) - second(F[:, i] - F[:, j])) / 4.0
    return H


@dataclass(frozen=True)
class NablaYReport:
    nabla_y: np.ndarray
    hessian_sum: np.ndarray
    agreement: float
    norm_plus_identity: float
    bound: float

    @property
    def passed(self):
        return self.agreement <= 1e-4 and self.norm_plus_identity <= self.bound + 1e-4


def nabla_y_probe(Q, p, frame=None, h=None):
    """Finite-difference nabla Y_Q at p, compared with minus the weighted distance Hessians
    and with the psi_max bound on |nabla Y_Q + I|."""
    M = Q.manifold
    p = np.asarray(p, dtype=float)
    F = M.frame(p) if frame is None else np.asarray(frame, dtype=float)
    Y = VectorField(M, lambda x: y_field(Q, x))
    N = cov_deriv_fd(Y, p, F, h)
    Hs = -sum(w * hessian_probe(M, p, q, F) for q, w in Q)
    dmax = Q.radius_about(p)
    b = M.curvature_bounds(p)
    bound = specfun.psi_max(b.delta, b.Delta, dmax)
    return NablaYReport(nabla_y=N, hessian_sum=Hs,
                        agreement=float(np.max(np.abs(N - Hs))),
                        norm_plus_identity=float(np.linalg.norm(N + np.eye(len(N)), 2)),
                        bound=bound)

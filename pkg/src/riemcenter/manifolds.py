"""Concrete Riemannian manifolds in an ambient-coordinate representation.

Points and tangent vectors are plain float arrays. A tangent vector is
always used together with its base point; tangency is checked where it
matters (exp, transport) rather than carried in a wrapper type.

Complex projective space stores z in C^{n+1} as the interleaved real view
[Re z0, Im z0, Re z1, Im z1, ...], so real dot products are the real part
of the Hermitian product and tangent spaces are real subspaces of R^{2n+2}.
"""
import math
import re
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import CutLocusError, DomainError, TangentError

POINT_TOL = 1e-10
TANGENT_TOL = 1e-10
# log/dist refuse points within this distance of the cut locus
CUT_GUARD = 1e-8


@dataclass(frozen=True)
class CurvatureBounds:
    """Lower (delta) and upper (Delta) sectional curvature bounds on a region."""

    delta: float
    Delta: float

    def __post_init__(self):
        if self.delta > self.Delta:
            raise DomainError(f"delta={self.delta} exceeds Delta={self.Delta}")

    @property
    def absK(self):
        return max(abs(self.delta), abs(self.Delta))


@dataclass(frozen=True)
class RegularityRadii:
    r_inj: float
    r_cvx: float
    r_reg: float

    @property
    def r_regcvx(self):
        return min(self.r_reg, self.r_cvx)


def _orthonormal_frame(proj, dim):
    """First ``dim`` columns of a column-pivoted QR of a projection matrix."""
    q, _, _ = scipy.linalg.qr(proj, pivoting=True)
    frame = q[:, :dim]
    # fix column signs so frames are reproducible
    signs = np.sign(frame[np.argmax(np.abs(frame), axis=0), np.arange(dim)])
    return frame * signs


class Manifold:
    """Interface shared by the built-in geometries."""

    dim: int
    ambient_dim: int
    spec: str

    def validate_point(self, p):
        return np.asarray(p, dtype=float)

    def validate_tangent(self, p, v):
        return np.asarray(v, dtype=float)

    def exp(self, p, v):
        raise NotImplementedError

    def log(self, p, q):
        raise NotImplementedError

    def dist(self, p, q):
        raise NotImplementedError

    def transport(self, p, q, v):
        raise NotImplementedError

    def inner(self, p, u, v):
        return float(np.dot(u, v))

    def norm(self, p, v):
        return float(np.linalg.norm(v))

    def curvature_bounds(self, center=None, rho=None):
        raise NotImplementedError

    def regularity(self, p=None):
        raise NotImplementedError

    def frame(self, p):
        """Orthonormal basis of the tangent space at p, as ambient columns."""
        raise NotImplementedError

    def _check_injectivity(self, p, v):
        r_inj = self.regularity(p).r_inj
        if self.norm(p, v) >= r_inj:
            raise DomainError(
                f"tangent norm {self.norm(p, v):.17g} reaches the injectivity radius {r_inj:.17g}")

    def __repr__(self):
        return f"{type(self).__name__}({self.spec!r})"


class Euclidean(Manifold):
    def __init__(self, dim):
        if dim < 1:
            raise DomainError("Euclidean dimension must be >= 1")
        self.dim = self.ambient_dim = int(dim)
        self.spec = f"euclidean:dim={self.dim}"

    def validate_point(self, p):
        p = np.asarray(p, dtype=float)
        if p.shape != (self.dim,):
            raise DomainError(f"expected a point of shape ({self.dim},), got {p.shape}")
        return p

    def validate_tangent(self, p, v):
        return self.validate_point(v)

    def exp(self, p, v):
        return np.asarray(p, float) + np.asarray(v, float)

    def log(self, p, q):
        return np.asarray(q, float) - np.asarray(p, float)

    def dist(self, p, q):
        return float(np.linalg.norm(np.asarray(q, float) - np.asarray(p, float)))

    def transport(self, p, q, v):
        return np.array(v, dtype=float)

    def curvature_bounds(self, center=None, rho=None):
        return CurvatureBounds(0.0, 0.0)

    def regularity(self, p=None):
        return RegularityRadii(math.inf, math.inf, math.inf)

    def frame(self, p):
        return np.eye(self.dim)


class Sphere(Manifold):
    """Round sphere S^n(R) embedded in R^{n+1} with |p| = R."""

    def __init__(self, dim, radius=1.0):
        if dim < 1 or radius <= 0:
            raise DomainError("sphere needs dim >= 1 and radius > 0")
        self.dim = int(dim)
        self.ambient_dim = self.dim + 1
        self.radius = float(radius)
        self.spec = f"sphere:dim={self.dim},radius={self.radius:g}"

    def validate_point(self, p):
        p = np.asarray(p, dtype=float)
        if p.shape != (self.ambient_dim,):
            raise DomainError(f"expected a point of shape ({self.ambient_dim},), got {p.shape}")
        if abs(np.linalg.norm(p) - self.radius) > POINT_TOL * self.radius:
            raise DomainError(f"|p| = {np.linalg.norm(p):.17g} is not the radius {self.radius}")
        return p

    def project(self, x):
        x = np.asarray(x, dtype=float)
        return self.radius * x / np.linalg.norm(x)

    def validate_tangent(self, p, v):
        v = np.asarray(v, dtype=float)
        if abs(np.dot(v, p)) > TANGENT_TOL * self.radius * max(1.0, np.linalg.norm(v)):
            raise TangentError(f"<v, p> = {np.dot(v, p):.3g}; v is not tangent at p")
        return v

    def exp(self, p, v):
        v = self.validate_tangent(p, v)
        self._check_injectivity(p, v)
        nv = np.linalg.norm(v)
        if nv == 0:
            return np.array(p, dtype=float)
        t = nv / self.radius
        q = math.cos(t) * p + (self.radius * math.sin(t) / nv) * v
        # stay on the sphere to working precision
        return self.radius * q / np.linalg.norm(q)

    def _angle(self, p, q):
        """Central angle and the unit direction from p towards q."""
        R = self.radius
        if np.array_equal(p, q):
            return 0.0, np.zeros_like(p)
        ph, qh = p / R, q / R
        c = float(np.dot(ph, qh))
        w = qh - c * ph
        s = float(np.linalg.norm(w))
        theta = math.atan2(s, c)
        if R * (math.pi - theta) <= CUT_GUARD:
            raise CutLocusError("points are (nearly) antipodal: no unique minimal geodesic")
        return theta, (w / s if s > 0 else np.zeros_like(w))

    def log(self, p, q):
        theta, u = self._angle(np.asarray(p, float), np.asarray(q, float))
        return self.radius * theta * u

    def dist(self, p, q):
        theta, _ = self._angle(np.asarray(p, float), np.asarray(q, float))
        return self.radius * theta

    def transport(self, p, q, v):
        p, q = np.asarray(p, float), np.asarray(q, float)
        v = self.validate_tangent(p, v)
        theta, u = self._angle(p, q)
        if theta == 0:
            return np.array(v, dtype=float)
        ph = p / self.radius
        a = float(np.dot(v, u))
        return v + a * ((math.cos(theta) - 1.0) * u - math.sin(theta) * ph)

    def curvature_bounds(self, center=None, rho=None):
        k = self.radius ** -2
        return CurvatureBounds(k, k)

    def regularity(self, p=None):
        R = self.radius
        return RegularityRadii(math.pi * R, math.pi * R / 2, math.pi * R / 2)

    def frame(self, p):
        ph = np.asarray(p, float) / self.radius
        proj = np.eye(self.ambient_dim) - np.outer(ph, ph)
        return _orthonormal_frame(proj, self.dim)


def _as_complex(x):
    return np.ascontiguousarray(x, dtype=float).view(np.complex128)


def _as_real(z):
    return np.ascontiguousarray(z, dtype=np.complex128).view(np.float64)


class ComplexProjective(Manifold):
    """CP^n with the Fubini-Study metric making S^{2n+1} -> CP^n a Riemannian submersion.

    Points are unit vectors of C^{n+1} (any phase); tangent vectors are
    horizontal lifts, i.e. Hermitian-orthogonal to the base point.
    """

    def __init__(self, n):
        if n < 1:
            raise DomainError("CP^n needs n >= 1")
        self.n = int(n)
        self.dim = 2 * self.n
        self.ambient_dim = 2 * (self.n + 1)
        self.spec = f"cpn:n={self.n}"

    def validate_point(self, p):
        p = np.asarray(p, dtype=float)
        if p.shape != (self.ambient_dim,):
            raise DomainError(f"expected a point of shape ({self.ambient_dim},), got {p.shape}")
        if abs(np.linalg.norm(p) - 1.0) > POINT_TOL:
            raise DomainError(f"|z| = {np.linalg.norm(p):.17g} is not 1")
        return p

    def from_complex(self, z):
        z = np.asarray(z, dtype=np.complex128)
        return _as_real(z / np.linalg.norm(z)).copy()

    def to_complex(self, p):
        return _as_complex(p).copy()

    def project(self, x):
        x = np.asarray(x, dtype=float)
        return x / np.linalg.norm(x)

    def horizontal(self, p, v):
        """Horizontal part of an ambient vector v at p."""
        z, w = _as_complex(p), _as_complex(v)
        return _as_real(w - np.vdot(z, w) * z).copy()

    def validate_tangent(self, p, v):
        v = np.asarray(v, dtype=float)
        herm = np.vdot(_as_complex(p), _as_complex(v))
        if abs(herm) > TANGENT_TOL * max(1.0, np.linalg.norm(v)):
            raise TangentError(f"<z, v>_C = {herm:.3g}; v is not horizontal at z")
        return v

    def exp(self, p, v):
        v = self.validate_tangent(p, v)
        self._check_injectivity(p, v)
        nv = np.linalg.norm(v)
        if nv == 0:
            return np.array(p, dtype=float)
        q = math.cos(nv) * np.asarray(p, float) + (math.sin(nv) / nv) * v
        return q / np.linalg.norm(q)

    def _aligned(self, p, q):
        """Angle to q and the unit horizontal direction of the minimal geodesic."""
        if np.array_equal(p, q):
            return 0.0, np.zeros(self.ambient_dim)
        z, w = _as_complex(p), _as_complex(q)
        herm = np.vdot(z, w)
        c = abs(herm)
        if c == 0:
            raise CutLocusError("points are at the cut distance pi/2")
        w = w * (herm.conjugate() / c)  # phase so that <z, w>_C = c > 0
        d = w - c * z
        s = float(np.linalg.norm(d))
        theta = math.atan2(s, c)
        if math.pi / 2 - theta <= CUT_GUARD:
            raise CutLocusError("points are within the cut-locus guard band of pi/2")
        u = _as_real(d / s).copy() if s > 0 else np.zeros(self.ambient_dim)
        return theta, u

    def log(self, p, q):
        theta, u = self._aligned(np.asarray(p, float), np.asarray(q, float))
        return theta * u

    def dist(self, p, q):
        theta, _ = self._aligned(np.asarray(p, float), np.asarray(q, float))
        return theta

    def transport(self, p, q, v):
        # Along gamma(t) = cos t z + sin t u the fields gamma', J gamma' and
        # everything C-orthogonal to span_C(z, u) are parallel.
        p, q = np.asarray(p, float), np.asarray(q, float)
        v = self.validate_tangent(p, v)
        theta, u = self._aligned(p, q)
        if theta == 0:
            return np.array(v, dtype=float)
        ju = _as_real(1j * _as_complex(u)).copy()
        jp = _as_real(1j * _as_complex(p)).copy()
        a, b = float(np.dot(v, u)), float(np.dot(v, ju))
        rest = v - a * u - b * ju
        vel = -math.sin(theta) * p + math.cos(theta) * u
        jvel = -math.sin(theta) * jp + math.cos(theta) * ju
        out = a * vel + b * jvel + rest
        # express at the representative q of the caller (differs by a phase)
        zq, wend = _as_complex(q), _as_complex(math.cos(theta) * p + math.sin(theta) * u)
        phase = np.vdot(wend, zq)
        return _as_real(_as_complex(out) * (phase / abs(phase))).copy()

    def curvature_bounds(self, center=None, rho=None):
        if self.n == 1:
            return CurvatureBounds(4.0, 4.0)
        return CurvatureBounds(1.0, 4.0)

    def regularity(self, p=None):
        return RegularityRadii(math.pi / 2, math.pi / 4, math.pi / 4)

    def frame(self, p):
        p = np.asarray(p, float)
        jp = _as_real(1j * _as_complex(p)).copy()
        proj = np.eye(self.ambient_dim) - np.outer(p, p) - np.outer(jp, jp)
        return _orthonormal_frame(proj, self.dim)


def helmert_submatrix(k):
    """(k-1) x k Helmert submatrix: orthonormal rows spanning the centered subspace."""
    H = np.zeros((k - 1, k))
    for j in range(1, k):
        H[j - 1, :j] = -1.0 / math.sqrt(j * (j + 1))
        H[j - 1, j] = j / math.sqrt(j * (j + 1))
    return H


class ShapeSpace2D(ComplexProjective):
    """Kendall shape space of k planar landmarks, identified with CP^{k-2}."""

    def __init__(self, k):
        if k < 3:
            raise DomainError("shape space needs k >= 3 landmarks")
        super().__init__(k - 2)
        self.k = int(k)
        self.spec = f"shape2d:k={self.k}"
        self._helmert = helmert_submatrix(self.k)

    def embed(self, landmarks):
        """Map k planar landmarks (complex numbers or [re, im] pairs) to a point of CP^{k-2}."""
        z = np.asarray(landmarks)
        if z.ndim == 2 and z.shape[1] == 2 and not np.iscomplexobj(z):
            z = z[:, 0] + 1j * z[:, 1]
        z = np.asarray(z, dtype=np.complex128)
        if z.shape != (self.k,):
            raise DomainError(f"expected {self.k} landmarks, got shape {z.shape}")
        w = self._helmert @ z
        nw = np.linalg.norm(w)
        if nw <= 1e-14 * max(1.0, float(np.max(np.abs(z)))):
            raise DomainError("degenerate landmark set: all landmarks coincide")
        return _as_real(w / nw).copy()

    def configuration(self, p):
        """Representative landmarks: centroid 0, unit size, first Helmert coordinate real-positive."""
        w = _as_complex(np.asarray(p, float)).copy()
        idx = int(np.argmax(np.abs(w) > 1e-12))
        w = w * (abs(w[idx]) / w[idx])
        return self._helmert.T @ w


_SPEC_RE = re.compile(r"^\s*(\w+)\s*(?::(.*))?$")


def parse_manifold(spec):
    """Build a manifold from strings like 'sphere:dim=2,radius=1' or 'cpn:n=3'."""
    m = _SPEC_RE.match(spec)
    if not m:
        raise DomainError(f"cannot parse manifold spec {spec!r}")
    kind, rest = m.group(1).lower(), m.group(2) or ""
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, _, val = item.partition("=")
        params[key.strip()] = val.strip()
    try:
        if kind == "euclidean":
            return Euclidean(int(params["dim"]))
        if kind == "sphere":
            return Sphere(int(params.get("dim", 2)), float(params.get("radius", 1.0)))
        if kind == "cpn":
            return ComplexProjective(int(params["n"]))
        if kind == "shape2d":
            return ShapeSpace2D(int(params["k"]))
    except KeyError as exc:
        raise DomainError(f"manifold spec {spec!r} is missing {exc.args[0]!r}") from None
    raise DomainError(f"unknown manifold kind {kind!r}")

"""Contraction constants kappa, the function s = (1 - kappa) rho, and the radii built from them.

Curvature enters only through two monotone functions of the radius:
``Delta(rho)`` (nondecreasing upper bound) and ``delta(rho)`` (nonincreasing
lower bound) on balls of radius rho about the base point, plus a cap r1 with
r1 * sqrt(max(0, Delta(r1))) < pi/2.

For fixed D every search below is over a function that is monotone or
concave in its argument, so bisection and golden section are enough.
"""
import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable

from . import specfun
from ._search import XTOL, bracket_root, first_true, golden_max, last_true
from .errors import DomainError, SupercriticalError

# tolerance for the D <= rho <= r1 preconditions
_SLACK = 1e-12


class KappaVariant(str, enum.Enum):
    SEQ = "seq"
    FULL_MINUS = "full_minus"
    FULL_PLUS = "full_plus"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).replace("-", "_"))
        except ValueError:
            raise DomainError(f"unknown kappa variant {name!r}") from None


def _constant(value):
    return lambda rho: value


@dataclass(frozen=True)
class CurveBounds:
    """Monotone curvature bounds as functions of the ball radius, and the radius cap r1."""

    Delta: Callable[[float], float]
    delta: Callable[[float], float]
    r1: float
    locally_symmetric: bool = False
    # constant values when built by ``constant``; used for reporting
    constants: tuple = field(default=None, compare=False)

    def __post_init__(self):
        if not self.r1 > 0:
            raise DomainError(f"r1 must be positive, got {self.r1}")
        top = self.Delta(self.r1) if math.isfinite(self.r1) else self.Delta(0.0)
        if math.isinf(self.r1) and top > 0:
            raise DomainError("r1 = inf requires Delta <= 0")
        if math.isfinite(self.r1) and self.r1 * math.sqrt(max(0.0, top)) >= math.pi / 2:
            raise DomainError(
                f"r1 * sqrt(Delta(r1)) = {self.r1 * math.sqrt(max(0.0, top)):.12g} must be < pi/2")

    @classmethod
    def constant(cls, Delta, delta, r1, locally_symmetric=False):
        if delta > Delta:
            raise DomainError(f"delta={delta} exceeds Delta={Delta}")
        return cls(_constant(float(Delta)), _constant(float(delta)), float(r1),
                   locally_symmetric, (float(Delta), float(delta)))

    @classmethod
    def regular(cls, Delta, delta, shrink=1e-9, locally_symmetric=False):
        """Constant bounds with r1 just below the largest admissible value pi/(2 sqrt(Delta))."""
        r1 = math.inf if Delta <= 0 else (1.0 - shrink) * math.pi / (2.0 * math.sqrt(Delta))
        return cls.constant(Delta, delta, r1, locally_symmetric)

    def with_r1(self, r1):
        return replace(self, r1=float(r1))


def _check_args(bounds, rho, D):
    if D < 0 or rho < D - _SLACK or rho > bounds.r1 + _SLACK:
        raise DomainError(f"need 0 <= D <= rho <= r1, got D={D}, rho={rho}, r1={bounds.r1}")


def kappa(variant, bounds, rho, D):
    """Contraction bound kappa(rho, D) for the chosen variant."""
    variant = KappaVariant.parse(variant)
    _check_args(bounds, rho, D)
    Delta, delta = bounds.Delta(rho), bounds.delta(rho)
    if delta == -math.inf:
        return math.inf
    if delta > Delta:
        raise DomainError(f"delta({rho})={delta} exceeds Delta({rho})={Delta}")
    x = rho + D
    pm = specfun.psi_max(delta, Delta, x)
    if variant is KappaVariant.SEQ:
        return pm
    if variant is KappaVariant.FULL_MINUS:
        absK = max(abs(delta), abs(Delta))
        return specfun.phi_minus(x * math.sqrt(absK)) + specfun.c1(delta, x) * pm
    if delta < 0:
        raise DomainError("full_plus needs nonnegative curvature (delta >= 0)")
    y = x * math.sqrt(Delta)
    # phi_+ only below 3pi/4; beyond that the general phi_- term applies
    lead = specfun.phi_plus(y) if y <= 0.75 * math.pi else specfun.phi_minus(y)
    return lead + pm


def s(variant, bounds, rho, D):
    return (1.0 - kappa(variant, bounds, rho, D)) * rho


def rho0(D, Delta):
    """D / h_+(2 D sqrt(Delta(D))), or D when Delta(D) <= 0. ``Delta`` is a number or a callable."""
    if D < 0:
        raise DomainError(f"D must be >= 0, got {D}")
    Dt = Delta(D) if callable(Delta) else float(Delta)
    if Dt <= 0 or D == 0:
        return float(D)
    y = 2.0 * D * math.sqrt(Dt)
    if y >= math.pi / 2:
        raise DomainError(f"2 D sqrt(Delta) = {y:.12g} must be < pi/2")
    return D / specfun.h(1.0, y)


def d_max(variant, bounds):
    """sup{D in [0, r1] : kappa(D, D) < 1}."""
    if _unbounded_flat(bounds):
        return math.inf
    b = _finite(variant, bounds)
    return last_true(lambda D: kappa(variant, b, D, D) < 1.0, 0.0, b.r1)


def _finite(variant, bounds):
    """Bounds with a finite r1; flat or negatively curved inputs with r1 = inf are capped
    where kappa(rho, 0) reaches 1 (beyond it nothing can be certified)."""
    if math.isfinite(bounds.r1):
        return bounds
    hi = 1.0
    while kappa(variant, bounds.with_r1(hi), hi, 0.0) < 1.0:
        hi *= 2.0
        if hi > 1e12:
            return bounds.with_r1(hi)
    return bounds.with_r1(hi)


def smax(variant, bounds, D):
    """(argmax, max) of the concave s(., D) on [D, r1]."""
    return golden_max(lambda r: s(variant, bounds, r, D), D, bounds.r1)


def _unbounded_flat(bounds):
    return math.isinf(bounds.r1) and bounds.constants == (0.0, 0.0)


def d_crit(variant, bounds):
    """Fixed point D_crit of D -> max_rho s(rho, D), and rho_crit, the argmax there."""
    if _unbounded_flat(bounds):
        return math.inf, math.inf
    b = _finite(variant, bounds)
    g = lambda D: smax(variant, b, D)[1] - D
    if g(b.r1) > 0:
        return b.r1, b.r1
    D = bracket_root(g, 0.0, b.r1, xtol=XTOL)
    return D, smax(variant, b, D)[0]


@dataclass(frozen=True)
class RadiiReport:
    variant: str
    D: float
    r1: float
    rho0: float
    rho1: float
    rho2: float
    rho3: float
    rho4: float
    D_crit: float
    D_max: float
    rho_crit: float
    rho4_at_dcrit: float
    clamped: tuple = ()

    def scaled(self, factor, cap=math.inf):
        """Report for the metric multiplied by factor**2 (lengths times factor), capped at ``cap``."""
        vals = {}
        clamped = set(self.clamped)
        for name in ("D", "r1", "rho0", "rho1", "rho2", "rho3", "rho4", "D_crit", "D_max",
                     "rho_crit", "rho4_at_dcrit"):
            v = getattr(self, name) * factor
            if name not in ("D", "rho0", "rho1") and v > cap:
                v = cap
                clamped.add(name)
            vals[name] = v
        return RadiiReport(variant=self.variant, clamped=tuple(sorted(clamped)), **vals)

    def as_dict(self):
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}


def rho4(variant, bounds, D):
    """sup{rho in [D, r1] : kappa(rho, D) < 1}; equals r1 when the set reaches it."""
    return last_true(lambda r: kappa(variant, bounds, r, D) < 1.0, D, bounds.r1)


def solve_radii(variant, bounds, D=0.0):
    variant = KappaVariant.parse(variant)
    if _unbounded_flat(bounds):
        inf = math.inf
        return RadiiReport(variant.value, float(D), inf, float(D), float(D), inf, inf, inf,
                           inf, inf, inf, inf, ("rho2", "rho3", "rho4", "D_max"))
    b = _finite(variant, bounds)
    Dc, rc = d_crit(variant, b)
    if not 0 <= D < Dc:
        raise SupercriticalError(
            f"D = {D:.12g} is not below the critical radius D_crit = {Dc:.12g}", Dc)
    Dm = d_max(variant, b)
    r2, _ = smax(variant, b, D)
    above = lambda r: s(variant, b, r, D) > D
    r1_ = first_true(above, D, r2)
    r3 = last_true(above, r2, b.r1)
    r4 = rho4(variant, b, D)
    r4c = rho4(variant, b, min(Dc, Dm))
    clamped = tuple(name for name, v in (("rho2", r2), ("rho3", r3), ("rho4", r4), ("D_max", Dm))
                    if v >= b.r1)
    return RadiiReport(variant=variant.value, D=float(D), r1=b.r1, rho0=rho0(D, b.Delta),
                       rho1=r1_, rho2=r2, rho3=r3, rho4=r4, D_crit=Dc, D_max=Dm,
                       rho_crit=rc, rho4_at_dcrit=r4c, clamped=clamped)


def sphere_report(R=1.0, variant="seq", D=0.0):
    """Radii for a round sphere of radius R: unit-curvature solution scaled by R.

    ``D`` is given in the sphere's own length units.
    """
    if R <= 0:
        raise DomainError("sphere radius must be positive")
    unit = solve_radii(variant, CurveBounds.regular(1.0, 1.0, locally_symmetric=True), D / R)
    return unit.scaled(R, cap=math.pi * R / 2)


def cpn_report(n, variant="seq", D=0.0):
    """Radii for CP^n: curvature in [1, 4], the same as a sphere of radius 1/2 for every variant here."""
    if n < 1:
        raise DomainError("CP^n needs n >= 1")
    return sphere_report(0.5, variant, D)


@dataclass(frozen=True)
class RateConstants:
    kappa_hat: float
    c1: float
    c2: float
    coefficient: float
    epsilon1_bound: float
    asymptotic_coefficient: float


def rate_constants(variant, bounds, D):
    """Constants of the quadratic step-ratio bound eps1 <= c2 (1 + c1)^2 Delta D^2.

    kappa_hat is kappa at (rho_crit, D_crit); c1 = 1/(1 - kappa_hat) bounds rho1/D and
    c2 = kappa_hat / x_crit^2 with x_crit = sqrt(Delta) (rho_crit + D_crit).
    Only meaningful for nonnegative curvature with constant bounds.
    """
    variant = KappaVariant.parse(variant)
    top = bounds.r1 if math.isfinite(bounds.r1) else 0.0
    Delta, delta = bounds.Delta(top), bounds.delta(top)
    if delta < 0:
        raise DomainError("rate constants need delta >= 0")
    if D < 0:
        raise DomainError(f"D must be >= 0, got {D}")
    if Delta == 0:
        return RateConstants(0.0, 1.0, 0.0, 0.0, 0.0, 0.0)
    b = _finite(variant, bounds)
    Dc, rc = d_crit(variant, b)
    if not D < Dc:
        raise SupercriticalError(
            f"D = {D:.12g} is not below the critical radius D_crit = {Dc:.12g}", Dc)
    kh = kappa(variant, b, rc, Dc)
    c1 = 1.0 / (1.0 - kh)
    x = math.sqrt(Delta) * (rc + Dc)
    c2 = kh / (x * x)
    coef = c2 * (1.0 + c1) ** 2
    # small-D limit of eps1 / (Delta D^2): kappa ~ x^2/3 (seq) or 2x^2/3 (full) at x = 2D
    asym = 4.0 / 3.0 if variant is KappaVariant.SEQ else 8.0 / 3.0
    return RateConstants(kh, c1, c2, coef, coef * Delta * D * D, asym)

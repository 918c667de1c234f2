"""Special functions built from the entire series c(z) and s(z).

    c(z) = sum z^n / (2n)!        s(z) = sum z^n / (2n+1)!

so that c(-x^2) = cos x, c(x^2) = cosh x, s(-x^2) = sin(x)/x, s(x^2) = sinh(x)/x.
Every function here is a ratio or difference of c and s. Differences such as
cosh x - sinh(x)/x lose all their digits near 0 when evaluated in closed form,
so below ``CROSSOVER`` (in |z|) the difference is summed as one series.
"""
import math
from functools import cache

from ._search import bracket_root
from .errors import DomainError

# |z| at or below which series are used; chosen so both branches agree to
# ~1e-13 relative on either side of it.
CROSSOVER = 1.0
_SERIES_RTOL = 1e-18
_SERIES_MAXTERMS = 60


def _series(z, coeff):
    """Sum coeff(n) z^n until the next term is negligible."""
    total = 0.0
    zn = 1.0
    for n in range(_SERIES_MAXTERMS):
        term = coeff(n) * zn
        total += term
        if n > 0 and abs(term) <= _SERIES_RTOL * abs(total):
            break
        zn *= z
    return total


def _check_finite(name, value):
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")


def stretched_cos(z, *, method="auto"):
    """c(z) = sum z^n/(2n)!; equals cos(sqrt(-z)) for z < 0 and cosh(sqrt(z)) for z > 0."""
    _check_finite("z", z)
    if method == "series" or (method == "auto" and abs(z) <= CROSSOVER):
        return _series(z, lambda n: 1.0 / math.factorial(2 * n))
    if z >= 0:
        return math.cosh(math.sqrt(z))
    return math.cos(math.sqrt(-z))


def stretched_sin(z, *, method="auto"):
    """s(z) = sum z^n/(2n+1)!; equals sin(x)/x for z = -x^2 and sinh(x)/x for z = x^2."""
    _check_finite("z", z)
    if method == "series" or (method == "auto" and abs(z) <= CROSSOVER):
        return _series(z, lambda n: 1.0 / math.factorial(2 * n + 1))
    x = math.sqrt(abs(z))
    if z >= 0:
        return math.sinh(x) / x
    return math.sin(x) / x


def cs_difference(z, *, method="auto"):
    """c(z) - s(z), summed termwise near 0 to avoid cancellation.

    The n-th coefficient of the difference is 1/(2n)! - 1/(2n+1)! = 2n/(2n+1)!.
    This is the scalar factor relating an antidiagonal Jacobi field at time 1
    to its initial value when the curvature operator has eigenvalue z/r^2.
    """
    _check_finite("z", z)
    if method == "series" or (method == "auto" and abs(z) <= CROSSOVER):
        return _series(z, lambda n: 2.0 * n / math.factorial(2 * n + 1))
    x = math.sqrt(abs(z))
    if z >= 0:
        return math.cosh(x) - math.sinh(x) / x
    return math.cos(x) - math.sin(x) / x


def phi_minus(x, *, method="auto"):
    """cosh x - sinh(x)/x for x >= 0."""
    if x < 0:
        raise DomainError(f"phi_minus requires x >= 0, got {x}")
    return cs_difference(x * x, method=method)


@cache
def x0_root():
    """First positive root of (x^2 - 1) sin x + x cos x (about 0.87 pi).

    phi_plus is increasing on [0, x0]; found by bisection on [2, 3].
    """
    return bracket_root(lambda x: (x * x - 1.0) * math.sin(x) + x * math.cos(x),
                        2.0, 3.0, xtol=1e-12)


def phi_plus(x, *, method="auto"):
    """sin(x)/x - cos x on its monotone range 0 <= x < x0."""
    x0 = x0_root()
    if not 0 <= x < x0:
        raise DomainError(f"phi_plus requires 0 <= x < x0 = {x0:.12g}, got {x}")
    return -cs_difference(-x * x, method=method)


@cache
def phi_plus_unit_root():
    """First x > 0 with phi_plus(x) = 1 (about 0.74 pi)."""
    return bracket_root(lambda x: phi_plus(x) - 1.0, 2.0, x0_root() - 1e-9, xtol=1e-12)


def c1(lam, r):
    """Bound on the differential of exp: 1 for lam >= 0, else sinh(x)/x with x = sqrt(|lam|) r."""
    if r < 0:
        raise DomainError(f"c1 requires r >= 0, got {r}")
    if lam >= 0:
        return 1.0
    return stretched_sin(-lam * r * r)


def _check_h_domain(lam, r):
    if r < 0:
        raise DomainError(f"r must be >= 0, got {r}")
    if lam > 0 and math.sqrt(lam) * r >= math.pi:
        raise DomainError(
            f"sqrt(lambda)*r must be < pi for lambda > 0, got {math.sqrt(lam) * r}")


def h(lam, r, *, method="auto"):
    """c(-lam r^2)/s(-lam r^2): x cot x for lam > 0, 1 for lam = 0, x coth x for lam < 0."""
    _check_h_domain(lam, r)
    if lam == 0 or r == 0:
        return 1.0
    z = -lam * r * r
    if method == "series" or (method == "auto" and abs(z) <= CROSSOVER):
        return stretched_cos(z, method="series") / stretched_sin(z, method="series")
    x = math.sqrt(abs(lam)) * r
    if lam > 0:
        return x / math.tan(x)
    return x / math.tanh(x)


def psi(lam, r, *, method="auto"):
    """sign(lam) (1 - h(lam, r)); nonnegative, about |lam| r^2 / 3 for small r."""
    _check_h_domain(lam, r)
    if lam == 0 or r == 0:
        return 0.0
    z = -lam * r * r
    if method == "series" or (method == "auto" and abs(z) <= CROSSOVER):
        # 1 - c/s = -(c - s)/s
        val = -cs_difference(z, method="series") / stretched_sin(z, method="series")
        return math.copysign(1.0, lam) * val
    x = math.sqrt(abs(lam)) * r
    if lam > 0:
        return 1.0 - x / math.tan(x)
    return x / math.tanh(x) - 1.0


def psi_max(delta, Delta, r):
    """max(psi(Delta, r), psi(delta, r)) for delta <= Delta."""
    if delta > Delta:
        raise DomainError(f"need delta <= Delta, got {delta} > {Delta}")
    return max(psi(Delta, r), psi(delta, r))


FUNCTIONS = {
    "c": stretched_cos,
    "s": stretched_sin,
    "phi-minus": phi_minus,
    "phi-plus": phi_plus,
    "c1": c1,
    "h": h,
    "psi": psi,
    "psi-max": psi_max,
}

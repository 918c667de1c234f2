"""Bracketed scalar searches used by specfun and radii."""
import math

from scipy.optimize import bisect

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0

XTOL = 1e-10
MAXITER = 200


def bracket_root(f, a, b, xtol=XTOL, maxiter=MAXITER):
    """Root of ``f`` in ``[a, b]``; ``f(a)`` and ``f(b)`` must differ in sign."""
    return bisect(f, a, b, xtol=xtol, maxiter=maxiter)


def last_true(pred, a, b, xtol=XTOL, maxiter=MAXITER):
    """Largest x in [a, b] with ``pred(x)`` true, for ``pred`` true on [a, t) and false after.

    Returns the lower end of the final bracket, so ``pred`` holds at the result.
    """
    if pred(b):
        return b
    lo, hi = a, b
    for _ in range(maxiter):
        if hi - lo <= xtol:
            break
        mid = 0.5 * (lo + hi)
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo


def first_true(pred, a, b, xtol=XTOL, maxiter=MAXITER):
    """Smallest x in [a, b] with ``pred(x)`` true, for ``pred`` false on [a, t] and true after.

    Returns the upper end of the final bracket, so ``pred`` holds at the result.
    """
    if pred(a):
        return a
    lo, hi = a, b
    for _ in range(maxiter):
        if hi - lo <= xtol:
            break
        mid = 0.5 * (lo + hi)
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def golden_max(f, a, b, xtol=XTOL, maxiter=MAXITER):
    """Maximize a unimodal ``f`` on ``[a, b]``; returns ``(argmax, max)``.

    The endpoints are included so a maximum sitting on the boundary is found.
    """
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(maxiter):
        if b - a <= xtol:
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = f(x1)
    candidates = [(f1, x1), (f2, x2), (f(a), a), (f(b), b)]
    best_f, best_x = max(candidates)
    return best_x, best_f

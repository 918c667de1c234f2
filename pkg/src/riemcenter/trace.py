"""Iteration traces and the fixed-point loop shared by averaging and newton."""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError

TOLERANCE = "tolerance"
MAX_ITER = "max_iter"
DOMAIN_EXIT = "domain_exit"


@dataclass
class IterationTrace:
    """Record of p_0, p_1, ... with step lengths d(p_n, p_{n+1}) = |v_n|.

    ``step_lengths[n]`` is the norm of the step computed at ``iterates[n]``;
    the last entry of a converged trace is the final residual step, not taken.
    ``ratios[n-1] = step_lengths[n] / step_lengths[n-1]`` (None after a zero step).
    """

    iterates: list = field(default_factory=list)
    step_lengths: list = field(default_factory=list)
    ratios: list = field(default_factory=list)
    certificates: list = field(default_factory=list)
    converged: bool = False
    reason: Optional[str] = None
    message: str = ""
    info: dict = field(default_factory=dict)

    @property
    def n_iter(self):
        """Number of steps actually taken."""
        return len(self.iterates) - 1

    @property
    def final(self):
        return self.iterates[-1]

    def max_ratio(self):
        vals = [r for r in self.ratios if r is not None]
        return max(vals) if vals else None

    def records(self):
        """One dict per iterate, in the layout of the JSONL trace files."""
        out = []
        for n, p in enumerate(self.iterates):
            out.append({
                "n": n,
                "point": np.asarray(p, dtype=float).tolist(),
                "step_length": self.step_lengths[n] if n < len(self.step_lengths) else None,
                "ratio": self.ratios[n - 1] if 0 < n <= len(self.ratios) else None,
                "certificate": self.certificates[n] if n < len(self.certificates) else None,
            })
        return out


def run_fixed_point(manifold, step: Callable, p0, tol, max_iter, *,
                    inside: Optional[Callable] = None,
                    certificate: Optional[Callable] = None):
    """Iterate p <- exp_p(step(p)) until |step(p)| <= tol.

    ``inside(p)`` returns False when p has left the admissible region; the loop
    then stops with reason ``domain_exit`` and keeps the last admissible iterate.
    Library domain errors raised by ``step`` or ``exp`` end the run the same way.
    """
    if tol <= 0 or max_iter < 0:
        raise DomainError("need tol > 0 and max_iter >= 0")
    trace = IterationTrace()
    p = np.array(p0, dtype=float)
    trace.iterates.append(p)
    for n in range(max_iter + 1):
        try:
            v = step(p)
        except DomainError as exc:
            if n == 0:
                raise
            # p is kept as the last iterate even though no step could be formed there
            trace.reason, trace.message = DOMAIN_EXIT, str(exc)
            return trace
        nv = float(np.linalg.norm(v))
        trace.step_lengths.append(nv)
        if n > 0:
            prev = trace.step_lengths[-2]
            trace.ratios.append(nv / prev if prev > 0 else None)
        trace.certificates.append(certificate(p, nv) if certificate else None)
        if nv <= tol:
            trace.converged, trace.reason = True, TOLERANCE
            return trace
        if n == max_iter:
            break
        try:
            q = manifold.exp(p, v)
        except DomainError as exc:
            trace.reason, trace.message = DOMAIN_EXIT, str(exc)
            return trace
        if inside is not None and not inside(q):
            trace.reason = DOMAIN_EXIT
            trace.message = f"iterate {n + 1} left the admissible ball"
            return trace
        p = q
        trace.iterates.append(p)
    trace.reason = MAX_ITER
    trace.message = f"no convergence after {max_iter} iterations"
    return trace

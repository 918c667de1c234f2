"""JSON input/output: mass distribution files and JSON-lines iteration traces.

Floats are written with 17 significant digits so every double survives a
write/read round trip unchanged.
"""
import json
import math
import re

import numpy as np

from .averaging import MassDistribution
from .errors import DomainError
from .manifolds import ComplexProjective, ShapeSpace2D, parse_manifold
from .trace import IterationTrace

_FLOAT_TAG = "\x00f:"
_TAG_RE = re.compile(r'"\\u0000f:([^"]*)"')


def _fmt(x):
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def _tag(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, (float, np.floating)):
        return _FLOAT_TAG + _fmt(float(obj))
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _tag(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): _tag(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_tag(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=None):
    """json.dumps with every float printed as %.17g."""
    text = json.dumps(_tag(obj), indent=indent, sort_keys=False)
    return _TAG_RE.sub(lambda m: m.group(1), text)


def loads(text):
    return json.loads(text)


def _point_in(manifold, raw):
    """Turn one JSON point into ambient coordinates."""
    if isinstance(manifold, ShapeSpace2D):
        return manifold.embed(np.asarray(raw, dtype=float))
    a = np.asarray(raw, dtype=float)
    if isinstance(manifold, ComplexProjective) and a.ndim == 2 and a.shape[1] == 2:
        # [re, im] pairs are accepted as well as the interleaved layout
        a = a.reshape(-1)
    return manifold.validate_point(a)


def distribution_from_dict(data):
    if not isinstance(data, dict) or "manifold" not in data or "points" not in data:
        raise DomainError("a distribution needs 'manifold' and 'points' fields")
    M = parse_manifold(str(data["manifold"]))
    pts = [_point_in(M, p) for p in data["points"]]
    return MassDistribution(M, pts, data.get("weights"))


def load_distribution(path):
    with open(path, encoding="utf-8") as fh:
        return distribution_from_dict(json.load(fh))


def distribution_to_dict(Q):
    M = Q.manifold
    if isinstance(M, ShapeSpace2D):
        pts = [point_out(M, p)["configuration"] for p in Q.points]
    else:
        pts = [np.asarray(p, float) for p in Q.points]
    return {"manifold": M.spec, "points": pts, "weights": Q.weights}


def save_distribution(Q, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(distribution_to_dict(Q), indent=2) + "\n")


def point_out(manifold, p):
    """JSON-ready view of a point; shape-space points also carry a landmark configuration."""
    p = np.asarray(p, dtype=float)
    if isinstance(manifold, ShapeSpace2D):
        z = manifold.configuration(p)
        return {"coordinates": p, "configuration": np.column_stack([z.real, z.imag])}
    return {"coordinates": p}


def write_trace(trace, path):
    """One JSON object per iterate: {n, point, step_length, ratio, certificate}."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in trace.records():
            fh.write(dumps(rec) + "\n")


def read_trace(path):
    """Rebuild an IterationTrace (iterates, steps, ratios, certificates) from a JSONL file."""
    t = IterationTrace()
    with open(path, encoding="utf-8") as fh:
        recs = [json.loads(line) for line in fh if line.strip()]
    for i, rec in enumerate(recs):
        if rec["n"] != i:
            raise DomainError(f"trace line {i + 1} has n = {rec['n']}")
        t.iterates.append(np.asarray(rec["point"], dtype=float))
        t.certificates.append(rec["certificate"])
    # step lengths form a prefix; the last iterate has none after a domain exit
    t.step_lengths = [float(r["step_length"]) for r in recs if r["step_length"] is not None]
    t.ratios = [r["ratio"] for r in recs[1:len(t.step_lengths)]]
    return t


def trace_summary(trace):
    """Statistics reported alongside a trace; recomputable from the JSONL file alone."""
    steps = trace.step_lengths
    certs = [c for c in trace.certificates if c is not None]
    return {
        "n_iter": trace.n_iter,
        "n_steps_recorded": len(steps),
        "final_step_length": steps[-1] if steps else None,
        "max_ratio": trace.max_ratio(),
        "final_certificate": trace.certificates[-1] if trace.certificates else None,
        "min_certificate": min(certs) if certs else None,
        "final_point": np.asarray(trace.final, dtype=float),
    }

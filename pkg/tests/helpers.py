"""Random sampling helpers shared by the test modules."""
import numpy as np


def random_point(M, rng):
    from riemcenter.manifolds import ComplexProjective, Euclidean, Sphere

    if isinstance(M, Euclidean):
        return rng.normal(size=M.dim)
    if isinstance(M, Sphere):
        x = rng.normal(size=M.ambient_dim)
        return M.radius * x / np.linalg.norm(x)
    if isinstance(M, ComplexProjective):
        x = rng.normal(size=M.ambient_dim)
        return x / np.linalg.norm(x)
    raise TypeError(M)


def random_tangent(M, p, rng, norm=1.0):
    F = M.frame(p)
    c = rng.normal(size=F.shape[1])
    return norm * (F @ c) / np.linalg.norm(c)


def point_near(M, p, rng, radius):
    return M.exp(p, random_tangent(M, p, rng, radius))

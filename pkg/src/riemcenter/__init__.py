"""Riemannian centers of mass, Newton-type fixed-point maps and their contraction bounds."""
from . import averaging, manifolds, newton, oracles, radii, specfun
from .averaging import (MassDistribution, aposteriori_bound, contraction_estimate, f_energy,
                        iterate_mean, psi_step, y_field)
from .errors import (CutLocusError, DegeneracyError, DomainError, RiemCenterError,
                     SupercriticalError, SupportPointError, TangentError)
from .manifolds import (ComplexProjective, Euclidean, ShapeSpace2D, Sphere, helmert_submatrix,
                        parse_manifold)
from .newton import VectorField, classify_order, cov_deriv_fd, iterate, phi_map, psi_map
from .radii import (CurveBounds, KappaVariant, RadiiReport, cpn_report, d_crit, d_max, kappa,
                    rate_constants, rho0, s, solve_radii, sphere_report)
from .trace import IterationTrace

__version__ = "0.1.0"

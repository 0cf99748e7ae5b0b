"""Exact computations with VI^m-modules over finite fields.

The category VI has the spaces F_q^n as objects and injective linear maps as
morphisms.  This package evaluates finitely presented VI^m-modules degree by
degree, applies the natural and modified shift functors and the functors K
and D built from them, computes homology invariants inside a degree window,
and evaluates the recursive regularity bound rho_m(d, r).
"""

from .errors import (ArityError, DomainError, SizeCapError, TruncationError, ValidationError,
                     VIError)
from .ffield import GF, field, injective_count
from .homology import InvariantReport, degree_and_reg, resolve_t
from .linalg import PrimeField, Rationals, coefficient_field
from .rho import RhoValue, rho, rho_inequality_scan, rho_prime, rho_dprime, rho_unmemoized, rho_value
from .vicat import VICategory, VImMorphism, VIMorphism, category
from .vmod import (Context, FreeSpec, Presentation, Relation, Term, eval_free, eval_presentation,
                   free_presentation, load_presentation, point_module, random_presentation,
                   restrict_presentation, save_presentation, zero_presentation)

__version__ = "0.1.0"

"""Conformal Yamabe constants of product manifolds.

Closed-form invariants live in :mod:`yamabe.invariants`, discretizations in
:mod:`yamabe.discrete`, the quotient and inequality checks in
:mod:`yamabe.functional`, and numerical minimization in
:mod:`yamabe.minimize`.
"""

__version__ = "0.1.0"

from .errors import AssumptionViolated, BudgetExceeded, DimensionError, SpecError, YamabeError
from .invariants import *  # noqa: F401,F403
from .discrete import *  # noqa: F401,F403
from .functional import *  # noqa: F401,F403
from .minimize import *  # noqa: F401,F403

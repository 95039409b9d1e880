"""Exact Q-factoriality checks for nodal double solids and nodal hypersurfaces in P^4."""

from .core.errors import QFactorialError  # noqa: F401
from .exactalg import RATIONALS, Field  # noqa: F401
from .forms import Form, parse_form  # noqa: F401
from .projgeom import ProjPoint  # noqa: F401

"""wirekit: compose open systems with wiring diagrams.

Open Petri nets glue along undirected wiring diagrams (cospans of finite
sets); Moore machines and ODE systems compose along directed wiring diagrams
(lenses).  See the README for the file formats and the CLI.
"""

__version__ = "0.1.0"

from . import expr, finset, lens, machine, ode, petri, wiring  # noqa: F401
from .errors import WirekitError  # noqa: F401

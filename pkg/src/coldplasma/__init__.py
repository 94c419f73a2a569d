"""Breaking of plane cold-plasma oscillations with electron-ion collisions.

Exact closed forms along characteristics, the smooth/blow-up classification of
initial gradients, and two numerical solvers (Eulerian McCormack and
Lagrangian characteristics) that are checked against them.
"""

from .analytic import (
    CharState,
    FGPair,
    GradState,
    Nu,
    Regime,
    eval_FG,
    eval_qs,
    eval_VE,
    regime,
)
from .errors import BlowupCrossed, CflViolation, ColdPlasmaError, CrossingBeforeT, NoRoot

__version__ = "0.1.0"

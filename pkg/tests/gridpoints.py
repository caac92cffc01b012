"""Shared parameter grid covering the family's qualitative shapes.

Importable module (not a fixture) because parametrize lists need
import-time constants.
"""

from gkw.core import Params

UNIFORM = Params(1, 1, 1, 0, 1)
KW22 = Params(2, 2, 1, 0, 1)
WORKHORSE = Params(2, 3, 1.5, 0.5, 2)
BATHTUB = Params(0.7, 0.8, 0.6, 0, 0.9)
DECREASING = Params(0.5, 1, 0.8, 0, 1)
INCREASING_J = Params(1, 0.5, 3, 0, 1)
BETA52 = Params(1, 1, 5, 1, 1)
BETA25 = Params(1, 1, 2, 4, 1)
KWKW = Params(2, 2, 1, 1.5, 2)
EKW = Params(2, 3, 1, 0, 2)
SPIKE = Params(0.5, 0.5, 3, 0, 2)
MOUND = Params(1.5, 1.8, 1.4, 0.8, 1.1)

GRID12 = [
    ("uniform", UNIFORM),
    ("kw22", KW22),
    ("workhorse", WORKHORSE),
    ("bathtub", BATHTUB),
    ("decreasing", DECREASING),
    ("increasing_j", INCREASING_J),
    ("beta52", BETA52),
    ("beta25", BETA25),
    ("kwkw", KWKW),
    ("ekw", EKW),
    ("spike", SPIKE),
    ("mound", MOUND),
]

# points whose density power series exists (gamma*lambda a positive
# integer and delta = 0 or integer lambda)
V_VALID = {
    "uniform", "kw22", "workhorse", "increasing_j", "beta52",
    "beta25", "kwkw", "ekw", "spike",
}

GRID_BY_NAME = dict(GRID12)

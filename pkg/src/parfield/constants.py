"""Physical constants (CODATA 2018), SI units.

All numbers the package reports in physical units trace back to the three
constants below, so tolerance checks against published values are
reproducible.  The elementary charge and Planck constant are exact by
definition since the 2019 SI redefinition.
"""

import math

ELECTRON_MASS = 9.1093837015e-31  # kg
ELEMENTARY_CHARGE = 1.602176634e-19  # C (exact)
PLANCK_H = 6.62607015e-34  # J s (exact)
HBAR = PLANCK_H / (2.0 * math.pi)  # J s

EV = ELEMENTARY_CHARGE  # J per eV

"""Mach-Zehnder phase estimation with parity detection.

Modules:
    su2        angular-momentum matrices, beam splitters, phase shifters
    fock       independent Fock-basis simulation (oracle)
    states     benchmark states and JSON interchange
    symmetry   path-symmetry tests
    metrology  QCRB, parity signal and sensitivity, sweet spots
    cli        command-line front end
"""

from .states import Stage, TwoModeState, to_internal
from .su2 import MziKind, SectorState

__all__ = ["MziKind", "SectorState", "Stage", "TwoModeState", "to_internal"]
__version__ = "0.1.0"

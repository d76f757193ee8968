"""Eisenstein homology and cohomology invariants of Bianchi congruence subgroups.

Library layout:

- fields:     exact arithmetic in the ring of integers of Q(sqrt(-d))
- residues:   the finite ring O/NO, SL2 enumeration, orbit engine
- cusps:      congruence subgroups, cusp double cosets, dimensions
- lattices:   continued Eisenstein lattice sums, Weierstrass functions
- cocycles:   the harmonic potential, its cocycle, Sczech homomorphisms,
              and the exact conjugation matrix with its trace
- traces:     Lefschetz numbers, index oracles, degree-2 traces, bounds
- geometry:   hyperbolic 3-space, the octahedron face, cycle coefficients
- cli:        `bianchi-eis` command-line front end
"""

from .fields import CLASS_NUMBER_ONE_D, Field, OElt, OmegaCase, Splitting, make_field
from .hyperbolic import Point3, mobius
from .lattices import Lattice, Precision, lattice_of_field

__version__ = "0.1.0"

__all__ = [
    "CLASS_NUMBER_ONE_D",
    "Field",
    "Lattice",
    "OElt",
    "OmegaCase",
    "Point3",
    "Precision",
    "Splitting",
    "lattice_of_field",
    "make_field",
    "mobius",
    "__version__",
]

"""Exception types shared across the package."""


class BianchiError(Exception):
    """Base class for all package errors."""


class NonSquarefree(BianchiError):
    """d is not squarefree."""


class NotPrime(BianchiError):
    """Argument expected to be a rational prime."""


class LevelTooLarge(BianchiError):
    """Level N exceeds the configured enumeration cap."""


class DetNotOne(BianchiError):
    """Matrix is not in SL2."""


class InvolutionNotClosed(BianchiError):
    """An involution maps some element outside the indexed set."""


class ToleranceNotMet(BianchiError):
    """A series evaluator ran out of terms before reaching the target error."""


class PoleAtLatticePoint(BianchiError):
    """Evaluation of an elliptic function at a lattice point."""


class NotParabolic(BianchiError):
    """Matrix is not an admissible upper-triangular element."""


class UnsupportedLevel(BianchiError):
    """Level outside the scope of the conjugation-matrix construction."""


class UnsupportedRow(BianchiError):
    """Fixed-point table has no row for this (d mod 4, j2) combination."""


class QuadratureNotConverged(BianchiError):
    """Face quadrature did not reach the requested spread."""

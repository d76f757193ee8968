"""Exact arithmetic in the ring of integers of an imaginary quadratic field.

Elements of O are written a + b*omega in the integral basis {1, omega},
where omega = sqrt(-d) when d = 1, 2 mod 4 and omega = (1 + sqrt(-d))/2
when d = 3 mod 4.  All arithmetic is integer arithmetic (Python ints, so
no overflow); floats only appear in `Field.embed`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

from .errors import NonSquarefree, NotPrime

# Imaginary quadratic fields of class number one.  Class numbers are not
# computed; operations that require h(K) = 1 consult this list.
CLASS_NUMBER_ONE_D = frozenset({1, 2, 3, 7, 11, 19, 43, 67, 163})


class OmegaCase(Enum):
    SQRT = "sqrt"    # omega = sqrt(-d)
    HALF = "half"    # omega = (1 + sqrt(-d))/2


class OElt(NamedTuple):
    """a + b*omega with integer coordinates."""

    a: int
    b: int

    def __str__(self) -> str:
        return f"{self.a}{self.b:+}w"


class Splitting(Enum):
    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"


def _prime_factors(n: int) -> list[int]:
    n = abs(n)
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out.append(n)
    return out


def _is_squarefree(n: int) -> bool:
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1 if p == 2 else 2
    return True


@dataclass(frozen=True)
class Field:
    """Q(sqrt(-d)) together with the invariants used elsewhere."""

    d: int
    disc: int
    omega_case: OmegaCase
    t_ram: int
    class_number_assumed_one: bool
    _ram_primes: tuple[int, ...] = field(default=(), repr=False)

    # -- ring structure -------------------------------------------------

    def omega_sq(self) -> OElt:
        """omega^2 expressed in the basis {1, omega}."""
        if self.omega_case is OmegaCase.SQRT:
            return OElt(-self.d, 0)
        return OElt(-(1 + self.d) // 4, 1)

    def add(self, x: OElt, y: OElt) -> OElt:
        return OElt(x.a + y.a, x.b + y.b)

    def sub(self, x: OElt, y: OElt) -> OElt:
        return OElt(x.a - y.a, x.b - y.b)

    def neg(self, x: OElt) -> OElt:
        return OElt(-x.a, -x.b)

    def mul(self, x: OElt, y: OElt) -> OElt:
        w2 = self.omega_sq()
        c = x.b * y.b
        return OElt(x.a * y.a + c * w2.a, x.a * y.b + x.b * y.a + c * w2.b)

    def conj(self, x: OElt) -> OElt:
        """Complex conjugation sigma on O."""
        if self.omega_case is OmegaCase.SQRT:
            return OElt(x.a, -x.b)
        # sigma(omega) = (1 - sqrt(-d))/2 = 1 - omega
        return OElt(x.a + x.b, -x.b)

    def norm(self, x: OElt) -> int:
        """x * conj(x), always a non-negative rational integer."""
        if self.omega_case is OmegaCase.SQRT:
            return x.a * x.a + self.d * x.b * x.b
        return x.a * x.a + x.a * x.b + ((1 + self.d) // 4) * x.b * x.b

    def trace(self, x: OElt) -> int:
        if self.omega_case is OmegaCase.SQRT:
            return 2 * x.a
        return 2 * x.a + x.b

    def omega_complex(self) -> complex:
        rt = math.sqrt(self.d)
        if self.omega_case is OmegaCase.SQRT:
            return complex(0.0, rt)
        return complex(0.5, 0.5 * rt)

    def embed(self, x: OElt) -> complex:
        return x.a + x.b * self.omega_complex()

    # -- prime behaviour -------------------------------------------------

    def splitting_type(self, p: int) -> Splitting:
        if p < 2 or not _is_prime(p):
            raise NotPrime(f"{p} is not a rational prime")
        if self.disc % p == 0:
            return Splitting.RAMIFIED
        if p == 2:
            # disc is odd here; 2 splits iff disc = 1 mod 8
            return Splitting.SPLIT if self.disc % 8 == 1 else Splitting.INERT
        if pow(-self.d % p, (p - 1) // 2, p) == 1:
            return Splitting.SPLIT
        return Splitting.INERT

    def omega_minpoly_roots_mod(self, p: int) -> list[int]:
        """Roots of the minimal polynomial of omega modulo p.

        Two roots for split p, one for ramified p, none for inert p.
        """
        if self.omega_case is OmegaCase.SQRT:
            poly = lambda x: (x * x + self.d) % p
        else:
            c = (1 + self.d) // 4
            poly = lambda x: (x * x - x + c) % p
        return [r for r in range(p) if poly(r) == 0]

    def reduction_maps_mod(self, p: int):
        """One linear "reduce mod a prime above p" map per prime ideal.

        Each map sends (a, b) to a vector of residues mod p that vanishes
        exactly when a + b*omega lies in that prime ideal.
        """
        kind = self.splitting_type(p)
        if kind is Splitting.INERT:
            return [lambda a, b: (a % p, b % p)]
        roots = self.omega_minpoly_roots_mod(p)
        return [lambda a, b, r=r: ((a + b * r) % p,) for r in roots]


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    p = 2
    while p * p <= n:
        if n % p == 0:
            return False
        p += 1 if p == 2 else 2
    return True


def make_field(d: int) -> Field:
    """Construct Q(sqrt(-d)) for squarefree d >= 1."""
    if d < 1 or not _is_squarefree(d):
        raise NonSquarefree(f"d = {d} must be a squarefree positive integer")
    if d % 4 == 3:
        disc = -d
        case = OmegaCase.HALF
    else:
        disc = -4 * d
        case = OmegaCase.SQRT
    ram = tuple(_prime_factors(disc))
    return Field(
        d=d,
        disc=disc,
        omega_case=case,
        t_ram=len(ram),
        class_number_assumed_one=(d in CLASS_NUMBER_ONE_D),
        _ram_primes=ram,
    )


def conj(x: OElt, fld: Field) -> OElt:
    return fld.conj(x)


def embed(x: OElt, fld: Field) -> complex:
    return fld.embed(x)


def splitting_type(p: int, fld: Field) -> Splitting:
    return fld.splitting_type(p)


ZERO = OElt(0, 0)
ONE = OElt(1, 0)
OMEGA = OElt(0, 1)

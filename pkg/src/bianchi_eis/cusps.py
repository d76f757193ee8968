"""Congruence subgroups of SL2(O), their cusps, and Eisenstein dimensions.

Cusps of Gamma1(N) are enumerated as double cosets

    Pbar_plus \\ SL2(O/NO) / Pbar

where Pbar_plus is the reduction of the unipotent upper-triangular
subgroup and Pbar = {+-1} * Pbar_plus.  The double-coset partition is
computed with the generic orbit engine; translations by 1 and omega
generate (O/NO, +), and -1 is added on the right.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import numpy as np

from .errors import DetNotOne, LevelTooLarge
from .fields import Field, OElt, OmegaCase
from .residues import (
    DEFAULT_CAP,
    Mat2R,
    OrbitTable,
    ResRing,
    _closure_from_perms,
    mat_from_row,
    residue_ring,
)

Kind = Literal["full", "gamma1", "gamma0"]


@dataclass(frozen=True)
class CongruenceKind:
    kind: Kind
    N: int

    def __post_init__(self):
        if self.N < 2:
            raise LevelTooLarge("congruence level must satisfy N >= 2")


def Full(N: int) -> CongruenceKind:
    return CongruenceKind("full", N)


def Gamma1(N: int) -> CongruenceKind:
    return CongruenceKind("gamma1", N)


def Gamma0(N: int) -> CongruenceKind:
    return CongruenceKind("gamma0", N)


IntMat = tuple[OElt, OElt, OElt, OElt]  # (a, b, c, d) over O


def det(fld: Field, M: IntMat) -> OElt:
    a, b, c, d = M
    return fld.sub(fld.mul(a, d), fld.mul(b, c))


def is_member(kind: CongruenceKind, M: IntMat, fld: Field) -> bool:
    """Membership of an SL2(O) matrix, decided by entry reduction mod N."""
    if det(fld, M) != OElt(1, 0):
        raise DetNotOne(f"matrix has determinant {det(fld, M)}, not 1")
    N = kind.N
    a, b, c, d = M

    def zero(x: OElt) -> bool:
        return x.a % N == 0 and x.b % N == 0

    if kind.kind == "full":
        return zero(fld.sub(a, OElt(1, 0))) and zero(fld.sub(d, OElt(1, 0))) and zero(b) and zero(c)
    if kind.kind == "gamma1":
        return zero(fld.sub(a, OElt(1, 0))) and zero(fld.sub(d, OElt(1, 0))) and zero(c)
    return zero(c)


@dataclass(frozen=True)
class CuspClass:
    orbit_id: int
    representative: Mat2R
    sigma_fixed: bool
    tau_fixed: bool


@dataclass
class CuspData:
    """Cusp double cosets of Gamma1(N) plus the involution actions."""

    field: Field
    N: int
    ring: ResRing
    table: OrbitTable
    classes: list[CuspClass]
    sigma_perm: np.ndarray
    tau_perm: np.ndarray

    @property
    def count(self) -> int:
        return self.table.n_orbits


_CACHE: dict[tuple[int, int], CuspData] = {}


def _conj_rows(ring: ResRing, rows: np.ndarray) -> np.ndarray:
    """Entrywise complex conjugation on matrix rows."""
    out = rows.copy()
    N = ring.N
    if ring.field.omega_case is OmegaCase.SQRT:
        for j in range(4):
            out[:, 2 * j + 1] = (-rows[:, 2 * j + 1]) % N
    else:
        for j in range(4):
            out[:, 2 * j] = (rows[:, 2 * j] + rows[:, 2 * j + 1]) % N
            out[:, 2 * j + 1] = (-rows[:, 2 * j + 1]) % N
    return out


def _negate_offdiag(ring: ResRing, rows: np.ndarray) -> np.ndarray:
    out = rows.copy()
    N = ring.N
    for j in (1, 2):  # entries b and c
        out[:, 2 * j] = (-rows[:, 2 * j]) % N
        out[:, 2 * j + 1] = (-rows[:, 2 * j + 1]) % N
    return out


def parabolic_generators(ring: ResRing) -> tuple[list[Mat2R], list[Mat2R]]:
    """Generators of Pbar_plus (left) and Pbar (right)."""
    one = (1, 0)
    zero = (0, 0)
    t1 = Mat2R(one, (1, 0), zero, one)
    tw = Mat2R(one, (0, 1), zero, one)
    neg = Mat2R(ring.neg(one), zero, zero, ring.neg(one))
    return [t1, tw], [t1, tw, neg]


def cusp_data(fld: Field, N: int, cap: int = DEFAULT_CAP) -> CuspData:
    key = (fld.d, N)
    if key in _CACHE:
        return _CACHE[key]
    ring = residue_ring(fld, N, cap=cap)
    rows = ring.sl2_array()
    left, right = parabolic_generators(ring)
    perms = [ring.sl2_perm(g, "left") for g in left] + [ring.sl2_perm(g, "right") for g in right]
    table = _closure_from_perms(len(rows), perms)

    sigma_perm = ring.lookup_rows(_conj_rows(ring, rows))
    tau_perm = ring.lookup_rows(_negate_offdiag(ring, _conj_rows(ring, rows)))

    classes = []
    for oid, rep in enumerate(table.representatives):
        s_fixed = table.orbit_of[sigma_perm[rep]] == table.orbit_of[rep]
        t_fixed = table.orbit_of[tau_perm[rep]] == table.orbit_of[rep]
        classes.append(
            CuspClass(
                orbit_id=oid,
                representative=mat_from_row(tuple(int(v) for v in rows[rep])),
                sigma_fixed=bool(s_fixed),
                tau_fixed=bool(t_fixed),
            )
        )
    data = CuspData(fld, N, ring, table, classes, sigma_perm, tau_perm)
    _CACHE[key] = data
    return data


def cusp_classes(fld: Field, N: int, cap: int = DEFAULT_CAP) -> list[CuspClass]:
    return cusp_data(fld, N, cap=cap).classes


def cusp_count(fld: Field, N: int, cap: int = DEFAULT_CAP) -> int:
    return cusp_data(fld, N, cap=cap).count


def fixed_cusps(classes: list[CuspClass], rho: str) -> int:
    """Number of cusp classes fixed by sigma, tau, or the identity."""
    if rho == "identity":
        return len(classes)
    if rho == "sigma":
        return sum(1 for c in classes if c.sigma_fixed)
    if rho == "tau":
        return sum(1 for c in classes if c.tau_fixed)
    raise ValueError(f"unknown involution {rho!r}")


def full_group_fixed_cusps(fld: Field) -> int:
    """rho-fixed cusps of SL2(O) itself: 2^(t-1) for class number one."""
    return 2 ** (fld.t_ram - 1)


def eis_dims(fld: Field, N: int, k: int, cap: int = DEFAULT_CAP) -> tuple[int, int, int]:
    """(dim H^0_Eis, dim H^1_Eis, dim H^2_Eis) for Gamma1(N) at weight k.

    For trivial coefficients (k = 0) the restriction to the boundary in
    degree 2 has a one-dimensional cokernel, so dim H^2_Eis drops by one.
    """
    if k < 0:
        raise ValueError("weight k must be >= 0")
    n_cusps = cusp_count(fld, N, cap=cap)
    if k == 0:
        return (0, n_cusps, n_cusps - 1)
    return (0, n_cusps, n_cusps)


# -- Gamma0(P) torsion-grid witness ------------------------------------------


@dataclass(frozen=True)
class StabilizerWitness:
    matrix: IntMat
    prime: int
    pairs_checked: int


def _witness_ok(fld: Field, P: int, M: IntMat) -> bool:
    """True when (u,v)M = (u,v) has no nonzero solution on ((1/P)O/O)^2."""
    ring = residue_ring(fld, P)
    a, b, c, d = (ring.reduce(x) for x in M)
    one = (1, 0)
    am1, dm1 = ring.sub(a, one), ring.sub(d, one)
    elts = np.array(list(ring.elements()), dtype=np.int64)
    n = len(elts)
    u1 = np.repeat(elts[:, 0], n)
    u2 = np.repeat(elts[:, 1], n)
    v1 = np.tile(elts[:, 0], n)
    v2 = np.tile(elts[:, 1], n)

    def vmul(x1, x2, y):
        return ring._vec_mul(x1, x2, np.int64(y[0]), np.int64(y[1]))

    r1a, r1b = vmul(u1, u2, am1)
    s1a, s1b = vmul(v1, v2, c)
    r2a, r2b = vmul(u1, u2, b)
    s2a, s2b = vmul(v1, v2, dm1)
    fixed = (
        ((r1a + s1a) % P == 0)
        & ((r1b + s1b) % P == 0)
        & ((r2a + s2a) % P == 0)
        & ((r2b + s2b) % P == 0)
    )
    nonzero = (u1 != 0) | (u2 != 0) | (v1 != 0) | (v2 != 0)
    return not bool(np.any(fixed & nonzero))


def check_witness(fld: Field, P: int, M: IntMat) -> bool:
    if det(fld, M) != OElt(1, 0):
        raise DetNotOne("witness candidates must lie in SL2(O)")
    if not is_member(Gamma0(P), M, fld):
        return False
    return _witness_ok(fld, P, M)


def gamma0_stabilizer_witness(fld: Field, P: int) -> StabilizerWitness:
    """A matrix of Gamma0(P) fixing no nonzero (1/P)-torsion row vector.

    Existence shows Gamma0(P) is not contained in any single row
    stabilizer.  The search prefers matrices where det(A - 1) is a unit
    mod P, which forces the fixed set to be trivial.
    """
    ring = residue_ring(fld, P)
    box = range(-2, 3)
    for a1 in box:
        for b1 in box:
            for c1 in box:
                a = OElt(a1, 0)
                b = OElt(b1, 0)
                c = OElt(c1 * P, 0)
                # solve a*d - b*c = 1 over Z coordinates when possible
                bc = fld.mul(b, c)
                target = fld.add(OElt(1, 0), bc)
                if a1 == 0:
                    continue
                if target.a % a1 == 0 and target.b % a1 == 0:
                    d = OElt(target.a // a1, target.b // a1)
                    M = (a, b, c, d)
                    if det(fld, M) != OElt(1, 0):
                        continue
                    am1 = fld.sub(a, OElt(1, 0))
                    dm1 = fld.sub(d, OElt(1, 0))
                    dd = fld.sub(fld.mul(am1, dm1), bc)
                    if not ring.is_unit(ring.reduce(dd)):
                        continue
                    if _witness_ok(fld, P, M):
                        return StabilizerWitness(M, P, ring.size * ring.size - 1)
    raise RuntimeError(f"no stabilizer witness found for P = {P}")


# -- integral coset representatives ------------------------------------------


def _odivmod(fld: Field, x: OElt, y: OElt) -> tuple[OElt, OElt]:
    """Rounded division in O: x = q*y + r with small r (Euclidean d)."""
    n = fld.norm(y)
    xc = fld.mul(x, fld.conj(y))
    qa = Fraction(xc.a, n)
    qb = Fraction(xc.b, n)
    q = OElt(round(qa), round(qb))
    r = fld.sub(x, fld.mul(q, y))
    return q, r


def _ogcd_ext(fld: Field, x: OElt, y: OElt) -> tuple[OElt, OElt, OElt]:
    """Extended gcd in O: returns (g, s, t) with s*x + t*y = g."""
    r0, r1 = x, y
    s0, s1 = OElt(1, 0), OElt(0, 0)
    t0, t1 = OElt(0, 0), OElt(1, 0)
    for _ in range(200):
        if r1 == OElt(0, 0):
            return r0, s0, t0
        q, r = _odivmod(fld, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, fld.sub(s0, fld.mul(q, s1))
        t0, t1 = t1, fld.sub(t0, fld.mul(q, t1))
    raise RuntimeError("gcd iteration did not terminate (non-Euclidean field?)")


def sl2_lift(fld: Field, N: int, mbar: Mat2R) -> IntMat:
    """Lift a matrix of SL2(O/NO) to SL2(O).

    Works for Euclidean fields; the bottom row is adjusted by multiples
    of N until coprime, then the top row is completed and corrected by a
    multiple of the bottom row.
    """
    ring = residue_ring(fld, N)
    abar, bbar, cbar, dbar = (OElt(*e) for e in (mbar.a, mbar.b, mbar.c, mbar.d))
    shifts = [OElt(i, j) for i in range(-2, 3) for j in range(-2, 3)]
    shifts.sort(key=lambda s: fld.norm(s))
    for sc in shifts:
        for sd in shifts:
            c = fld.add(cbar, OElt(N * sc.a, N * sc.b))
            d = fld.add(dbar, OElt(N * sd.a, N * sd.b))
            if c == OElt(0, 0) and d == OElt(0, 0):
                continue
            g, s, t = _ogcd_ext(fld, c, d)
            if fld.norm(g) != 1:
                continue
            # (s*c + t*d) = g, a unit; normalize to a0*d - b0*c = 1
            ginv = fld.conj(g) if fld.norm(g) == 1 else None
            # g * conj(g) = 1 when norm(g) = 1
            a0 = fld.mul(t, ginv)
            b0 = fld.mul(fld.neg(s), ginv)
            # search m with a0 + m c = abar, b0 + m d = bbar (mod N)
            ra0, rb0 = ring.reduce(a0), ring.reduce(b0)
            rc, rd = ring.reduce(c), ring.reduce(d)
            ta, tb = ring.reduce(abar), ring.reduce(bbar)
            for m in ring.elements():
                if ring.add(ra0, ring.mul(m, rc)) == ta and ring.add(rb0, ring.mul(m, rd)) == tb:
                    mm = OElt(m[0], m[1])
                    a = fld.add(a0, fld.mul(mm, c))
                    b = fld.add(b0, fld.mul(mm, d))
                    M = (a, b, c, d)
                    assert det(fld, M) == OElt(1, 0)
                    return M
    raise RuntimeError("no SL2(O) lift found")


def gamma1_coset_reps(fld: Field, N: int, cap: int = DEFAULT_CAP) -> list[IntMat]:
    """Integral representatives of Gamma1(N) \\ SL2(O).

    Cosets biject with U(R) \\ SL2(R) where U is unipotent upper
    triangular; each orbit representative is lifted to SL2(O).
    """
    ring = residue_ring(fld, N, cap=cap)
    rows = ring.sl2_array()
    left, _ = parabolic_generators(ring)
    perms = [ring.sl2_perm(g, "left") for g in left]
    table = _closure_from_perms(len(rows), perms)
    reps = []
    for rep in table.representatives:
        mbar = mat_from_row(tuple(int(v) for v in rows[rep]))
        reps.append(sl2_lift(fld, N, mbar))
    return reps

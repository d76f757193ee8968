"""Harmonic potential H, its cocycle, Sczech homomorphisms, and the exact
conjugation matrix on the cocycle basis.

The potential is the Fourier-Bessel series

    H(u) = G2(0)(z - zbar) - (4 pi / D(L)) t sum' (mbar n/|mn|) K1(4 pi |mn| t) e(mnz)

over m in L, n in L' = D(L)^{-1} Lbar, with e(w) = exp(2 pi i (w + wbar)).
The identity H(Au) = H(u) + Phi(A) is convention-sensitive; the coboundary
residual tests are the arbiter that froze this normalization.

The conjugation matrix is assembled in exact cyclotomic arithmetic.  The
additive character pairing used for the twist is

    chi_y(x) = exp(2 pi i (x2 y1 - x1 y2) / N)

on numerator coordinates mod N.  This is the purely imaginary lattice
pairing normalized to level N: it is the unique scale on which the twist
is both well defined on (1/N O / O)^2 and non-degenerate, and it is
validated numerically by the finite Fourier identities relating E(u) to
the E2-values (see tests).  For prime-power levels p^n with n > 1 the
symbols of lower level satisfy the conjugation relation at their own
level too; the difference of the two expansions expresses every
imprimitive symbol through the primitive (cusp) basis, and the quotient
matrix is an exact involution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import k0 as _sp_k0, k1 as _sp_k1

from . import cusps as cusps_mod
from .cyclotomic import CycRing
from .errors import NotParabolic, ToleranceNotMet, UnsupportedLevel
from .fields import Field, OElt, Splitting
from .hyperbolic import Point3, mobius
from .lattices import (
    DEFAULT_PREC,
    Lattice,
    Precision,
    d_sum,
    e_aux,
    ek,
    lattice_of_field,
    legendre_symbol,
)
from .residues import residue_ring

_EULER_GAMMA = 0.5772156649015328606065120900824024

# Fourier convention for e(.) in the H series, frozen by the coboundary
# arbiter; "tr-scaled" exists only for the convention test harness.
E_CONVENTION = "doubled"


# -- modified Bessel functions -------------------------------------------------


def bessel_k(order: int, y: float) -> float:
    """K0 or K1 at y > 0: ascending series for y <= 2, Steed's continued
    fraction for y > 2.  Relative accuracy ~1e-13."""
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    if y <= 0:
        raise ValueError("argument must be positive")
    if y <= 2.0:
        return _bessel_k_series(order, y)
    k0v, k1v = _bessel_k_cf2(y)
    return k0v if order == 0 else k1v


def _bessel_k_series(order: int, y: float) -> float:
    x2 = 0.25 * y * y
    lg = math.log(0.5 * y)
    if order == 0:
        term = 1.0
        i0 = 1.0
        s = 0.0
        hk = 0.0
        for k in range(1, 60):
            term *= x2 / (k * k)
            i0 += term
            hk += 1.0 / k
            s += term * hk
            if term < 1e-18 * i0:
                break
        return -(lg + _EULER_GAMMA) * i0 + s
    # order 1
    term = 1.0  # x2^k / (k! (k+1)!)
    i1 = 1.0
    s = 0.0
    hk = 0.0
    hk1 = 1.0
    for k in range(0, 60):
        if k > 0:
            term *= x2 / (k * (k + 1))
            hk += 1.0 / k
            hk1 += 1.0 / (k + 1)
            i1 += term
        psi_sum = (hk - _EULER_GAMMA) + (hk1 - _EULER_GAMMA)
        s += psi_sum * term
        if k > 3 and term < 1e-18 * (abs(i1) + 1):
            break
    i1 *= 0.5 * y
    return 1.0 / y + lg * i1 - 0.25 * y * s


def _bessel_k_cf2(x: float) -> tuple[float, float]:
    """Steed's CF2 for K_mu, K_mu+1 with mu = 0, valid for x > 2."""
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, 30001):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < 1e-16:
            break
    else:
        raise ToleranceNotMet("CF2 did not converge")
    h = a1 * h
    k0v = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) / s
    k1v = k0v * (0.5 + x - h) / x
    return k0v, k1v


# -- the H series ---------------------------------------------------------------


def ito_dual(lat: Lattice) -> Lattice:
    """L' = D(L)^(-1) conj(L)."""
    return Lattice(lat.w1.conjugate() / lat.DL, lat.w2.conjugate() / lat.DL)


_PAIR_CACHE: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}


def _h_pairs(lat: Lattice, bound: float) -> tuple[np.ndarray, np.ndarray]:
    """Arrays (m, n) with m in L, n in L', mn != 0 and |mn| <= bound."""
    key = (round(lat.w1.real, 12), round(lat.w1.imag, 12), round(lat.w2.real, 12),
           round(lat.w2.imag, 12), round(bound, 6))
    hit = _PAIR_CACHE.get(key)
    if hit is not None:
        return hit
    dual = ito_dual(lat)
    nmin = min(
        abs(p)
        for p in dual.points_in_disc(0.0, 4.0 * max(abs(dual.w1), abs(dual.w2)))
        if abs(p) > 1e-12
    )
    ms = lat.points_in_disc(0.0, bound / nmin)
    ms = ms[np.abs(ms) > 1e-12]
    out_m = []
    out_n = []
    for m in ms:
        ns = dual.points_in_disc(0.0, bound / abs(m))
        ns = ns[np.abs(ns) > 1e-12]
        if len(ns):
            out_m.append(np.full(len(ns), m))
            out_n.append(ns)
    m_arr = np.concatenate(out_m) if out_m else np.zeros(0, dtype=complex)
    n_arr = np.concatenate(out_n) if out_n else np.zeros(0, dtype=complex)
    _PAIR_CACHE[key] = (m_arr, n_arr)
    return m_arr, n_arr


def h_series(
    zs: np.ndarray,
    ts: np.ndarray,
    lat: Lattice,
    prec: Precision = DEFAULT_PREC,
    convention: str | None = None,
    gradient: bool = False,
):
    """H (and optionally its z, t, zbar partials) at the given points."""
    conv = convention or E_CONVENTION
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if np.any(ts <= 0):
        raise ValueError("t must be positive")
    tmin = float(np.min(ts))
    cutoff = (-math.log(prec.eps) + 25.0) / (4.0 * math.pi * tmin)
    est_pairs = 16.0 * cutoff * cutoff * (1.0 + math.log1p(cutoff))
    if est_pairs > prec.max_terms:
        raise ToleranceNotMet("H series needs too many terms at this height")
    m_arr, n_arr = _h_pairs(lat, cutoff)
    if len(m_arr) > prec.max_terms:
        raise ToleranceNotMet("H series needs too many terms at this height")
    mn = m_arr * n_arr
    amn = np.abs(mn)
    pphase = np.conj(m_arr) * n_arr / amn
    g2 = lat.g2_0(prec)
    pref = -4.0 * math.pi / lat.DL
    if conv == "doubled":
        scale = 1.0
    elif conv == "tr-scaled":
        scale = 1.0 / math.sqrt(abs(lat.DL))
    else:
        raise ValueError(f"unknown e-convention {conv!r}")

    H = np.empty(len(zs), dtype=complex)
    Hz = np.empty(len(zs), dtype=complex) if gradient else None
    Ht = np.empty(len(zs), dtype=complex) if gradient else None
    Hzb = np.empty(len(zs), dtype=complex) if gradient else None
    chunk = max(1, int(2e6 / max(len(mn), 1)))
    for lo in range(0, len(zs), chunk):
        hi = min(lo + chunk, len(zs))
        z = zs[lo:hi, None]
        t = ts[lo:hi, None]
        kt = 4.0 * math.pi * amn[None, :] * t
        k1v = _sp_k1(kt)
        ph = np.exp(2j * math.pi * scale * 2.0 * (mn[None, :] * z).real)
        base = pphase[None, :] * ph
        H[lo:hi] = g2 * (z - np.conj(z))[:, 0] + pref * (t[:, 0]) * np.sum(
            base * k1v, axis=1
        )
        if gradient:
            k0v = _sp_k0(kt)
            Hz[lo:hi] = g2 + pref * t[:, 0] * np.sum(
                base * k1v * (2j * math.pi * scale * mn[None, :]), axis=1
            )
            Hzb[lo:hi] = -g2 + pref * t[:, 0] * np.sum(
                base * k1v * (2j * math.pi * scale * np.conj(mn)[None, :]), axis=1
            )
            Ht[lo:hi] = pref * np.sum(base * (-kt * k0v), axis=1)
    if gradient:
        return H, Hz, Ht, Hzb
    return H


def h_eval(u: Point3, lat: Lattice, prec: Precision = DEFAULT_PREC,
           convention: str | None = None) -> complex:
    return complex(h_series([u.z], [u.t], lat, prec, convention)[0])


# -- Ito's cocycle --------------------------------------------------------------


def phi(A, fld: Field, prec: Precision = DEFAULT_PREC) -> complex:
    """Phi(a b; c d) = G2(0) I((a+d)/c) - D(a,c) for c != 0, else G2(0) I(b/d)."""
    a, b, c, d = A
    det = fld.sub(fld.mul(a, d), fld.mul(b, c))
    if det != OElt(1, 0):
        raise ValueError("Phi is defined on SL2(O)")
    lat = lattice_of_field(fld)
    g2 = lat.g2_0(prec)

    def ii(z: complex) -> complex:
        return z - z.conjugate()

    if c != OElt(0, 0):
        trc = fld.embed(fld.add(a, d)) / fld.embed(c)
        return g2 * ii(trc) - d_sum(a, c, fld, lat, prec)
    return g2 * ii(fld.embed(b) / fld.embed(d))


def coboundary_residual(
    A,
    u: Point3,
    fld: Field,
    prec: Precision = DEFAULT_PREC,
    convention: str | None = None,
) -> float:
    """|H(Au) - H(u) - Phi(A)|, the convention arbiter."""
    lat = lattice_of_field(fld)
    Au = mobius(tuple(fld.embed(x) for x in A), u)
    hs = h_series([u.z, Au.z], [u.t, Au.t], lat, prec, convention)
    return abs(complex(hs[1] - hs[0]) - phi(A, fld, prec))


# -- Sczech homomorphisms on parabolic elements ---------------------------------


def psi_parabolic(
    u: OElt,
    v: OElt,
    A,
    fld: Field,
    N: int,
    prec: Precision = DEFAULT_PREC,
    first_coeff: str = "legendre",
) -> complex:
    """Psi(u,v)(A) for upper-triangular A in Gamma1(N).

    u, v are numerators: the classes are u/N, v/N in (1/N)O/O.  The first
    coefficient (bbar/d) is read as a Legendre symbol by default; the
    field-quotient reading is exposed for comparison.
    """
    a, b, c, d = A
    det = fld.sub(fld.mul(a, d), fld.mul(b, c))
    if det != OElt(1, 0):
        raise NotParabolic("matrix not in SL2(O)")
    if c != OElt(0, 0):
        raise NotParabolic("matrix is not upper triangular")
    one = OElt(1, 0)
    if (fld.sub(a, one).a % N, fld.sub(a, one).b % N) != (0, 0) or (
        fld.sub(d, one).a % N,
        fld.sub(d, one).b % N,
    ) != (0, 0):
        raise NotParabolic("diagonal not = 1 mod N")
    lat = lattice_of_field(fld)
    om = fld.omega_complex()
    up = (u.a + u.b * om) / N
    vp = (v.a + v.b * om) / N
    if first_coeff == "legendre":
        coef1: complex = float(legendre_symbol(fld.conj(b), d, fld))
    elif first_coeff == "quotient":
        coef1 = fld.embed(fld.conj(b)) / fld.embed(d)
    else:
        raise ValueError("first_coeff must be 'legendre' or 'quotient'")
    e0 = -1.0 if (u.a % N == 0 and u.b % N == 0) else 0.0
    term2 = 0.0 + 0.0j
    if e0 != 0.0:
        term2 = (fld.embed(b) / fld.embed(d)) * e0 * ek(vp, 2, lat, prec)
    return -coef1 * e_aux(up, lat, prec) - term2


# -- cocycle basis and the exact conjugation matrix ------------------------------


@dataclass
class CocycleBasis:
    """Classes of pairs (u, v) in (1/N O/O)^2 mod +-1 and the translation
    identification of the second component modulo u*O.

    `classes` lists canonical representatives (numerator coordinate pairs),
    primitive classes first; the basis of the Eisenstein cocycle space is
    the primitive block, whose size equals the number of cusps.
    """

    field: Field
    N: int
    classes: list[tuple[tuple[int, int], tuple[int, int]]]
    n_primitive: int
    index: dict = field(repr=False, default_factory=dict)

    @property
    def dim(self) -> int:
        return self.n_primitive

    def pairs(self):
        return self.classes[: self.n_primitive]


_BASIS_CACHE: dict[tuple[int, int], CocycleBasis] = {}


def _pair_is_primitive(fld: Field, u, v, N: int) -> bool:
    """Primitivity as an O-module pair: nonzero modulo every prime above N."""
    p = 2
    n = N
    while n > 1:
        if n % p == 0:
            while n % p == 0:
                n //= p
            for red in fld.reduction_maps_mod(p):
                if all(r == 0 for r in red(*u)) and all(r == 0 for r in red(*v)):
                    return False
        p += 1 if p == 2 else 2
    return True


def cocycle_basis(fld: Field, N: int) -> CocycleBasis:
    key = (fld.d, N)
    hit = _BASIS_CACHE.get(key)
    if hit is not None:
        return hit
    ring = residue_ring(fld, N)
    elts = list(ring.elements())
    sub_cache: dict = {}

    def subgroup(u):
        if u not in sub_cache:
            sub_cache[u] = sorted({ring.mul(u, b) for b in elts})
        return sub_cache[u]

    def canon(u, v):
        best = None
        for (uu, vv) in ((u, v), (ring.neg(u), ring.neg(v))):
            for w in subgroup(uu):
                key2 = (uu, ring.add(vv, w))
                if best is None or key2 < best:
                    best = key2
        return best

    classes = []
    index = {}
    for want_prim in (True, False):
        for u in elts:
            for v in elts:
                if (u, v) == ((0, 0), (0, 0)):
                    continue
                if _pair_is_primitive(fld, u, v, N) != want_prim:
                    continue
                c = canon(u, v)
                if c not in index:
                    index[c] = len(classes)
                    classes.append(c)
        if want_prim:
            n_prim = len(classes)
    basis = CocycleBasis(fld, N, classes, n_prim, index)
    basis._canon = canon  # reused by the matrix assembly
    _BASIS_CACHE[key] = basis
    return basis


@dataclass
class SigmaMatrix:
    """Exact matrix of complex conjugation on the primitive cocycle basis.

    Entries are integer vectors over the power basis of Q(zeta_N) divided
    by the common denominator `den`.
    """

    field: Field
    N: int
    basis: CocycleBasis
    num: np.ndarray  # (dim, dim, deg) integers
    den: int
    ring: CycRing

    @property
    def dim(self) -> int:
        return self.num.shape[0]

    def squares_to_identity(self) -> bool:
        sq = self.ring.matmul_reduced(self.num, self.num)
        den2 = self.den * self.den
        eye = np.zeros_like(sq)
        idx = np.arange(self.dim)
        eye[idx, idx, 0] = den2
        return bool(np.all(sq == eye))

    def entry(self, i: int, j: int) -> tuple[Fraction, ...]:
        return tuple(Fraction(int(c), self.den) for c in self.num[i, j])

    def diagonal_fractions(self) -> list[Fraction]:
        """Diagonal entries that are rational (non-rational entries raise)."""
        out = []
        for i in range(self.dim):
            vec = self.num[i, i]
            if any(int(c) != 0 for c in vec[1:]):
                raise ValueError(f"diagonal entry {i} is not rational")
            out.append(Fraction(int(vec[0]), self.den))
        return out

    def trace(self) -> Fraction:
        tr = self.num[np.arange(self.dim), np.arange(self.dim)].sum(axis=0)
        if any(int(c) != 0 for c in tr[1:]):
            raise ValueError("trace is not rational")
        return Fraction(int(tr[0]), self.den)


_SIGMA_CACHE: dict[tuple[int, int], SigmaMatrix] = {}


def _prime_power(N: int) -> tuple[int, int] | None:
    p = 2
    n = N
    while p * p <= n:
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            return (p, k) if n == 1 else None
        p += 1 if p == 2 else 2
    return (N, 1)


def _pair_level(u, v, p: int, n: int) -> int:
    """Largest m <= n with all coordinates divisible by p^m."""
    m = 0
    while m < n and all(x % p ** (m + 1) == 0 for x in (*u, *v)):
        m += 1
    return m


def sigma_matrix(fld: Field, N: int) -> SigmaMatrix:
    """Exact matrix of sigma on the primitive cocycle basis of level N = p^n."""
    key = (fld.d, N)
    hit = _SIGMA_CACHE.get(key)
    if hit is not None:
        return hit
    pp = _prime_power(N)
    if pp is None:
        raise UnsupportedLevel(f"N = {N} is not a prime power")
    p, n = pp
    if fld.splitting_type(p) is not Splitting.INERT:
        # for split p the imprimitive classes live at prime-ideal levels for
        # which no rational lower-level relation exists; out of scope
        raise UnsupportedLevel(f"p = {p} must be inert for the conjugation matrix")
    if not fld.class_number_assumed_one:
        raise UnsupportedLevel("construction assumes class number one")
    basis = cocycle_basis(fld, N)
    canon = basis._canon
    n_all = len(basis.classes)
    n_prim = basis.n_primitive
    cring = CycRing(N)

    raw_cache: dict[int, tuple] = {}

    def raw_data(level: int):
        """Raw pair coordinate arrays at the given level and their N-level
        class indices (pairs lifted by N/level)."""
        if level in raw_cache:
            return raw_cache[level]
        zstep = N // level
        grid = np.indices((level, level, level, level)).reshape(4, -1)
        mask = np.any(grid != 0, axis=0)
        S1, S2, T1, T2 = (g[mask] for g in grid)
        cls = np.empty(len(S1), dtype=np.int64)
        for i in range(len(S1)):
            cls[i] = basis.index[
                canon(
                    (int(S1[i]) * zstep % N, int(S2[i]) * zstep % N),
                    (int(T1[i]) * zstep % N, int(T2[i]) * zstep % N),
                )
            ]
        data = (S1, S2, T1, T2, cls, zstep)
        raw_cache[level] = data
        return data

    def column_exp(u, v, level: int) -> np.ndarray:
        """Integer exponent-basis column of the relation at the given level,
        scaled by level^2 (level^2 - 1); rows indexed by level-N classes."""
        S1, S2, T1, T2, cls, zstep = raw_data(level)
        lvl2 = level * level
        uu = (u[0] // zstep, u[1] // zstep)
        vv = (v[0] // zstep, v[1] // zstep)
        e = ((S2 * vv[0] - S1 * vv[1]) - (T2 * uu[0] - T1 * uu[1])) % level
        col = np.zeros((n_all, N), dtype=np.int64)
        np.add.at(col, (cls, e * zstep), -(lvl2 - 1))
        col[:, 0] -= np.bincount(cls, minlength=n_all)
        return col  # denominator: lvl2 * (lvl2 - 1)

    # full folded matrix at level N (columns for every class)
    den_N = N * N * (N * N - 1)
    cols = [column_exp(u, v, N) for (u, v) in basis.classes]

    if n_prim == n_all:
        M_exp = np.stack(cols, axis=1)  # (rows, cols, N)
        num = cring.reduce_exp_matrix(M_exp)
        mat = SigmaMatrix(fld, N, basis, num.astype(np.int64), den_N, cring)
        _SIGMA_CACHE[key] = mat
        return mat

    # prime power with n > 1: eliminate imprimitive classes via the
    # two-level relations (each symbol of lower level satisfies the
    # conjugation relation at its own level as well)
    def col_fractions(col: np.ndarray, den: int):
        return [
            tuple(Fraction(w, den) for w in cring.reduce_exp_matrix(col[i]))
            for i in range(n_all)
        ]

    relations = []
    for j in range(n_prim, n_all):
        u, v = basis.classes[j]
        m = _pair_level(u, v, p, n)
        level = N // p**m
        den_l = level * level * (level * level - 1)
        hi = col_fractions(cols[j], den_N)
        lo = col_fractions(column_exp(u, v, level), den_l)
        relations.append([cring.add(a, cring.neg(b)) for a, b in zip(hi, lo)])
    # the Psi(0,0) eliminations at different levels agree
    counts_N = np.bincount(raw_data(N)[4], minlength=n_all)
    for k in range(1, n):
        level = p**k
        counts_L = np.bincount(raw_data(level)[4], minlength=n_all)
        pad = (Fraction(0),) * (cring.deg - 1)
        r = [
            (
                Fraction(int(counts_N[i]), N * N - 1)
                - Fraction(int(counts_L[i]), level * level - 1),
            )
            + pad
            for i in range(n_all)
        ]
        relations.append(r)

    # solve the imprimitive block
    rows = [list(r) for r in relations]
    pivots = []
    ri = 0
    for c in range(n_prim, n_all):
        piv = next(
            (r for r in range(ri, len(rows)) if rows[r][c] != cring.zero()), None
        )
        if piv is None:
            continue
        rows[ri], rows[piv] = rows[piv], rows[ri]
        inv = cring.inv(rows[ri][c])
        rows[ri] = [cring.mul(inv, x) for x in rows[ri]]
        for r in range(len(rows)):
            if r != ri and rows[r][c] != cring.zero():
                f = rows[r][c]
                rows[r] = [
                    cring.add(x, cring.neg(cring.mul(f, y)))
                    for x, y in zip(rows[r], rows[ri])
                ]
        pivots.append(c)
        ri += 1
    if len(pivots) != n_all - n_prim:
        raise UnsupportedLevel("imprimitive relation system is rank deficient")
    for r in rows[ri:]:
        if any(x != cring.zero() for x in r):
            raise UnsupportedLevel("imprimitive relation system is inconsistent")

    expansion = {c: [cring.neg(rows[k][j]) for j in range(n_prim)]
                 for k, c in enumerate(pivots)}

    # quotient matrix on the primitive classes
    quot = [[None] * n_prim for _ in range(n_prim)]
    red_cols = [col_fractions(cols[j], den_N) for j in range(n_prim)]
    for j in range(n_prim):
        colf = red_cols[j]
        out = [colf[i] for i in range(n_prim)]
        for c in pivots:
            coef = colf[c]
            if coef == cring.zero():
                continue
            exp = expansion[c]
            for i in range(n_prim):
                if exp[i] != cring.zero():
                    out[i] = cring.add(out[i], cring.mul(coef, exp[i]))
        for i in range(n_prim):
            quot[i][j] = out[i]

    # common denominator -> integer matrix
    den = 1
    for i in range(n_prim):
        for j in range(n_prim):
            for x in quot[i][j]:
                den = den * x.denominator // math.gcd(den, x.denominator)
    num = np.zeros((n_prim, n_prim, cring.deg), dtype=object)
    for i in range(n_prim):
        for j in range(n_prim):
            for k2, x in enumerate(quot[i][j]):
                num[i, j, k2] = int(x * den)
    if int(np.max(np.abs(num.astype(object)))) < 2**62:
        num = num.astype(np.int64)
    mat = SigmaMatrix(fld, N, basis, num, den, cring)
    _SIGMA_CACHE[key] = mat
    return mat


@dataclass(frozen=True)
class TraceReport:
    value: Fraction
    closed_form: Fraction
    agrees: bool
    dim: int
    cusp_count: int


def trace_sigma_h1(fld: Field, N: int) -> TraceReport:
    """Exact trace of sigma on H^1_Eis for Gamma1(N), N = p^n with p inert.

    The stated closed form (-2 for n = 1, #C * (-2/(p^2-1)) in general) is
    evaluated alongside; disagreement is reported, never reconciled.
    """
    pp = _prime_power(N)
    if pp is None:
        raise UnsupportedLevel(f"N = {N} is not a prime power")
    p, n = pp
    if fld.splitting_type(p) is not Splitting.INERT:
        raise UnsupportedLevel("trace formula applies to inert primes")
    mat = sigma_matrix(fld, N)
    n_cusps = cusps_mod.cusp_count(fld, N)
    value = mat.trace()
    closed = Fraction(-2) if n == 1 else Fraction(-2 * n_cusps, p * p - 1)
    return TraceReport(
        value=value,
        closed_form=closed,
        agrees=(value == closed),
        dim=mat.dim,
        cusp_count=n_cusps,
    )

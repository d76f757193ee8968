"""The finite ring R = O/NO, SL2(R), P1(R) and a double-coset orbit engine.

Ring elements are coefficient pairs (a, b) with 0 <= a, b < N, meaning
a + b*omega.  SL2(R) matrices are 8-tuples

    (a1, a2, b1, b2, c1, c2, d1, d2)

for the matrix [[a, b], [c, d]].  Enumeration follows the unimodular
column strategy: every determinant-1 matrix is produced exactly once, and
never by filtering all |R|^4 tuples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .errors import InvolutionNotClosed, LevelTooLarge
from .fields import Field, OElt, Splitting

DEFAULT_CAP = 50
SL2_SIZE_CAP = 10**8  # refuse enumerations estimated above this


class Mat2R(NamedTuple):
    """2x2 matrix over R; each entry is a coefficient pair mod N."""

    a: tuple[int, int]
    b: tuple[int, int]
    c: tuple[int, int]
    d: tuple[int, int]

    def row(self) -> tuple[int, ...]:
        return (*self.a, *self.b, *self.c, *self.d)


def mat_from_row(row: Sequence[int]) -> Mat2R:
    return Mat2R((row[0], row[1]), (row[2], row[3]), (row[4], row[5]), (row[6], row[7]))


class ResRing:
    """O/NO with componentwise representatives in [0, N)."""

    def __init__(self, fld: Field, N: int, cap: int = DEFAULT_CAP):
        if N < 2:
            raise LevelTooLarge(f"level N = {N} is degenerate; need N >= 2")
        if N > cap:
            raise LevelTooLarge(f"level N = {N} exceeds the cap {cap}")
        self.field = fld
        self.N = N
        self.size = N * N
        w2 = fld.omega_sq()
        self._w2 = (w2.a % N, w2.b % N)
        self._sl2_rows: list[tuple[int, ...]] | None = None
        self._sl2_array: np.ndarray | None = None
        self._sl2_codes: np.ndarray | None = None
        self._sl2_sorted: np.ndarray | None = None
        self._sl2_order: np.ndarray | None = None
        self._mul_solver: dict[tuple[int, int], dict[tuple[int, int], tuple[int, int]]] = {}

    # -- element arithmetic ------------------------------------------------

    def elements(self) -> Iterator[tuple[int, int]]:
        N = self.N
        for a in range(N):
            for b in range(N):
                yield (a, b)

    def reduce(self, x: OElt | tuple[int, int]) -> tuple[int, int]:
        return (x[0] % self.N, x[1] % self.N)

    def add(self, x, y) -> tuple[int, int]:
        return ((x[0] + y[0]) % self.N, (x[1] + y[1]) % self.N)

    def sub(self, x, y) -> tuple[int, int]:
        return ((x[0] - y[0]) % self.N, (x[1] - y[1]) % self.N)

    def neg(self, x) -> tuple[int, int]:
        return (-x[0] % self.N, -x[1] % self.N)

    def mul(self, x, y) -> tuple[int, int]:
        wa, wb = self._w2
        c = x[1] * y[1]
        return ((x[0] * y[0] + c * wa) % self.N, (x[0] * y[1] + x[1] * y[0] + c * wb) % self.N)

    def conj(self, x) -> tuple[int, int]:
        return self.reduce(self.field.conj(OElt(x[0], x[1])))

    def norm_int(self, x) -> int:
        return self.field.norm(OElt(x[0], x[1])) % self.N

    def is_unit(self, x) -> bool:
        import math

        return math.gcd(self.norm_int(x), self.N) == 1

    def inv(self, x) -> tuple[int, int]:
        n = self.norm_int(x)
        ninv = pow(n, -1, self.N)
        xc = self.conj(x)
        return ((xc[0] * ninv) % self.N, (xc[1] * ninv) % self.N)

    def units(self) -> list[tuple[int, int]]:
        return [x for x in self.elements() if self.is_unit(x)]

    # -- pairs and P1 --------------------------------------------------------

    def _local_tests(self):
        """Per-prime-ideal zero tests for unimodularity."""
        tests = []
        N = self.N
        p = 2
        n = N
        while n > 1:
            if n % p == 0:
                while n % p == 0:
                    n //= p
                kind = self.field.splitting_type(p)
                if kind is Splitting.INERT:
                    tests.append(("inert", p, None))
                else:
                    for r in self.field.omega_minpoly_roots_mod(p):
                        tests.append(("root", p, r))
            p += 1 if p == 2 else 2
        return tests

    def is_unimodular_pair(self, x, y) -> bool:
        for kind, p, r in self._unimod_tests():
            if kind == "inert":
                if x[0] % p == 0 and x[1] % p == 0 and y[0] % p == 0 and y[1] % p == 0:
                    return False
            else:
                if (x[0] + x[1] * r) % p == 0 and (y[0] + y[1] * r) % p == 0:
                    return False
        return True

    def _unimod_tests(self):
        if not hasattr(self, "_unimod_cache"):
            self._unimod_cache = self._local_tests()
        return self._unimod_cache

    def encode_elt(self, x) -> int:
        return x[0] * self.N + x[1]

    def p1_canonical(self, x, y) -> tuple[tuple[int, int], tuple[int, int]]:
        """Lexicographically least representative of (x : y) under unit scaling."""
        best = None
        for u in self.units():
            cand = (self.mul(u, x), self.mul(u, y))
            key = (self.encode_elt(cand[0]), self.encode_elt(cand[1]))
            if best is None or key < best[0]:
                best = (key, cand)
        return best[1]

    def p1(self) -> list[tuple[tuple[int, int], tuple[int, int]]]:
        """Canonical representatives of the projective line over R."""
        seen = set()
        out = []
        for x in self.elements():
            for y in self.elements():
                if not self.is_unimodular_pair(x, y):
                    continue
                rep = self.p1_canonical(x, y)
                key = (rep[0], rep[1])
                if key not in seen:
                    seen.add(key)
                    out.append(rep)
        out.sort(key=lambda r: (self.encode_elt(r[0]), self.encode_elt(r[1])))
        return out

    # -- SL2 enumeration ------------------------------------------------------

    def sl2_estimate(self) -> int:
        return self.N**6

    def _particular_completion(self, a, c):
        """Some (b0, d0) with a*d0 - b0*c = 1, or None if (a, c) not unimodular."""
        if self.is_unit(a):
            return (0, 0), self.inv(a)
        if self.is_unit(c):
            return self.neg(self.inv(c)), (0, 0)
        if not self.is_unimodular_pair(a, c):
            return None
        # composite level with mixed local units: solve a*d - c*b = 1 by
        # scanning d and inverting the multiplication-by-c map
        key = c
        solver = self._mul_solver.get(key)
        if solver is None:
            solver = {}
            for b in self.elements():
                solver.setdefault(self.mul(c, b), b)
            self._mul_solver[key] = solver
        one = (1, 0)
        for d in self.elements():
            need = self.sub(self.mul(a, d), one)  # = c*b
            b = solver.get(need)
            if b is not None:
                return b, d
        return None

    def _sl2_row_iter(self) -> Iterator[tuple[int, ...]]:
        if self.sl2_estimate() > SL2_SIZE_CAP:
            raise LevelTooLarge(
                f"estimated |SL2(O/{self.N})| ~ {self.sl2_estimate():.2e} exceeds the cap"
            )
        for a in self.elements():
            for c in self.elements():
                part = self._particular_completion(a, c)
                if part is None:
                    continue
                b0, d0 = part
                for t in self.elements():
                    b = self.add(b0, self.mul(t, a))
                    d = self.add(d0, self.mul(t, c))
                    yield (*a, *b, *c, *d)

    def enumerate_sl2(self) -> Iterator[Mat2R]:
        """Stream every matrix of SL2(R) exactly once."""
        for row in self._sl2_row_iter():
            yield mat_from_row(row)

    def sl2_rows(self) -> list[tuple[int, ...]]:
        if self._sl2_rows is None:
            self._sl2_rows = list(self._sl2_row_iter())
        return self._sl2_rows

    def sl2_array(self) -> np.ndarray:
        if self._sl2_array is None:
            arr = np.array(self.sl2_rows(), dtype=np.int64)
            self._sl2_array = arr
            self._sl2_codes = self.encode_rows(arr)
            self._sl2_order = np.argsort(self._sl2_codes, kind="stable")
            self._sl2_sorted = self._sl2_codes[self._sl2_order]
        return self._sl2_array

    def encode_rows(self, rows: np.ndarray) -> np.ndarray:
        code = np.zeros(len(rows), dtype=np.int64)
        for j in range(8):
            code = code * self.N + rows[:, j]
        return code

    def lookup_rows(self, rows: np.ndarray) -> np.ndarray:
        """Indices of the given SL2 rows in enumeration order."""
        self.sl2_array()
        codes = self.encode_rows(rows)
        pos = np.searchsorted(self._sl2_sorted, codes)
        if np.any(pos >= len(self._sl2_sorted)) or np.any(self._sl2_sorted[np.minimum(pos, len(self._sl2_sorted) - 1)] != codes):
            raise KeyError("some rows are not SL2 matrices of this ring")
        return self._sl2_order[pos]

    # -- vectorized matrix action ---------------------------------------------

    def _vec_mul(self, x1, x2, y1, y2):
        wa, wb = self._w2
        c = x2 * y2
        return (x1 * y1 + c * wa) % self.N, (x1 * y2 + x2 * y1 + c * wb) % self.N

    def act_rows(self, rows: np.ndarray, g: Mat2R, side: str) -> np.ndarray:
        """Rows of g*A (side='left') or A*g (side='right') for all rows A."""
        a1, a2, b1, b2, c1, c2, d1, d2 = (rows[:, j] for j in range(8))
        (ga1, ga2), (gb1, gb2), (gc1, gc2), (gd1, gd2) = g.a, g.b, g.c, g.d
        ga = (np.int64(ga1), np.int64(ga2))
        gb = (np.int64(gb1), np.int64(gb2))
        gc = (np.int64(gc1), np.int64(gc2))
        gd = (np.int64(gd1), np.int64(gd2))
        A = (a1, a2)
        B = (b1, b2)
        C = (c1, c2)
        D = (d1, d2)

        def mul(x, y):
            return self._vec_mul(x[0], x[1], y[0], y[1])

        def add(x, y):
            return ((x[0] + y[0]) % self.N, (x[1] + y[1]) % self.N)

        if side == "left":
            na = add(mul(ga, A), mul(gb, C))
            nb = add(mul(ga, B), mul(gb, D))
            nc = add(mul(gc, A), mul(gd, C))
            nd = add(mul(gc, B), mul(gd, D))
        elif side == "right":
            na = add(mul(A, ga), mul(B, gc))
            nb = add(mul(A, gb), mul(B, gd))
            nc = add(mul(C, ga), mul(D, gc))
            nd = add(mul(C, gb), mul(D, gd))
        else:
            raise ValueError(side)
        return np.stack([na[0], na[1], nb[0], nb[1], nc[0], nc[1], nd[0], nd[1]], axis=1)

    def sl2_perm(self, g: Mat2R, side: str) -> np.ndarray:
        """Permutation index array of the translation action on SL2(R)."""
        rows = self.sl2_array()
        return self.lookup_rows(self.act_rows(rows, g, side))

    def sl2_entry_perm(self, entry_map: Callable[[tuple[int, int]], tuple[int, int]]) -> np.ndarray:
        """Permutation induced by an entrywise ring map (e.g. conjugation)."""
        rows = self.sl2_array()
        out = np.empty_like(rows)
        table1 = np.empty(self.size, dtype=np.int64)
        table2 = np.empty(self.size, dtype=np.int64)
        for x in self.elements():
            y = entry_map(x)
            table1[self.encode_elt(x)] = y[0]
            table2[self.encode_elt(x)] = y[1]
        for j in range(4):
            idx = rows[:, 2 * j] * self.N + rows[:, 2 * j + 1]
            out[:, 2 * j] = table1[idx]
            out[:, 2 * j + 1] = table2[idx]
        return self.lookup_rows(out)


def residue_ring(fld: Field, N: int, cap: int = DEFAULT_CAP) -> ResRing:
    return ResRing(fld, N, cap=cap)


def units(ring: ResRing) -> list[tuple[int, int]]:
    return ring.units()


def enumerate_sl2(ring: ResRing) -> Iterator[Mat2R]:
    return ring.enumerate_sl2()


def p1(ring: ResRing):
    return ring.p1()


# -- orbit engine ---------------------------------------------------------


@dataclass
class OrbitTable:
    """Partition of an indexed set into orbits.

    orbit_of[i] is the orbit id of element i; representative ids are the
    minimal element index of each orbit, so they are independent of the
    generator order.
    """

    orbit_of: np.ndarray
    n_orbits: int
    representatives: np.ndarray

    def orbit_sizes(self) -> np.ndarray:
        return np.bincount(self.orbit_of, minlength=self.n_orbits)


def _closure_from_perms(n: int, perms: list[np.ndarray]) -> OrbitTable:
    """Breadth-first closure over integer ids under the given permutations."""
    orbit_of = np.full(n, -1, dtype=np.int64)
    reps = []
    next_id = 0
    for seed in range(n):
        if orbit_of[seed] >= 0:
            continue
        orbit_of[seed] = next_id
        frontier = np.array([seed], dtype=np.int64)
        while frontier.size:
            images = np.unique(np.concatenate([p[frontier] for p in perms]))
            fresh = images[orbit_of[images] < 0]
            orbit_of[fresh] = next_id
            frontier = fresh
        reps.append(seed)
        next_id += 1
    return OrbitTable(orbit_of=orbit_of, n_orbits=next_id, representatives=np.array(reps))


def perm_from_action(points: Sequence, action: Callable) -> np.ndarray:
    """Index permutation of a bijective action on an explicit point list."""
    index = {pt: i for i, pt in enumerate(points)}
    perm = np.empty(len(points), dtype=np.int64)
    for i, pt in enumerate(points):
        img = action(pt)
        j = index.get(img)
        if j is None:
            raise InvolutionNotClosed(f"action image {img!r} left the indexed set")
        perm[i] = j
    return perm


def double_coset_orbits(
    points: Sequence,
    left_gens: Iterable,
    right_gens: Iterable,
) -> OrbitTable:
    """Orbits of the two-sided action generated by the given bijections.

    Generators may be callables on points or precomputed index arrays.
    All generators have finite order, so forward closure suffices.
    """
    perms = []
    for gen in list(left_gens) + list(right_gens):
        if isinstance(gen, np.ndarray):
            perms.append(gen.astype(np.int64))
        else:
            perms.append(perm_from_action(points, gen))
    return _closure_from_perms(len(points), perms)


def fixed_points(points_or_table, involution) -> int:
    """Count fixed elements of a set, or fixed orbits of an OrbitTable.

    For an OrbitTable, `involution` must be an index permutation array and
    an orbit counts as fixed when its image orbit is itself.
    """
    if isinstance(points_or_table, OrbitTable):
        table = points_or_table
        perm = np.asarray(involution, dtype=np.int64)
        count = 0
        for rep in table.representatives:
            if table.orbit_of[perm[rep]] == table.orbit_of[rep]:
                count += 1
        return count
    points = list(points_or_table)
    perm = involution if isinstance(involution, np.ndarray) else perm_from_action(points, involution)
    return int(np.sum(perm == np.arange(len(points))))

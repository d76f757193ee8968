"""Exact arithmetic in Q(zeta_M).

Numbers are stored either as integer vectors over the exponent basis
(zeta^0, ..., zeta^(M-1)) or reduced to the power basis modulo the M-th
cyclotomic polynomial.  Everything stays in integers/Fractions; floats
never enter, so involution and trace identities can be asserted exactly.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np


def _poly_div_exact(num: list[int], den: list[int]) -> list[int]:
    """Exact division of integer polynomials (ascending coefficients)."""
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + len(den) - 1]
        assert c % den[-1] == 0
        q = c // den[-1]
        out[k] = q
        for i, d in enumerate(den):
            num[k + i] -= q * d
    assert all(v == 0 for v in num)
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(M: int) -> tuple[int, ...]:
    """Ascending integer coefficients of Phi_M."""
    poly = [-1] + [0] * (M - 1) + [1]  # x^M - 1
    for d in range(1, M):
        if M % d == 0:
            poly = _poly_div_exact(poly, list(cyclotomic_poly(d)))
    return tuple(poly)


class CycRing:
    """Reduction tables for Q(zeta_M) in the power basis of degree phi(M)."""

    def __init__(self, M: int):
        self.M = M
        phi = cyclotomic_poly(M)
        self.deg = len(phi) - 1
        # x^e mod Phi_M for e = 0..2*deg (enough for products of reduced numbers)
        rows = []
        cur = [0] * self.deg
        cur[0] = 1
        rows.append(list(cur))
        for _ in range(2 * self.deg):
            nxt = [0] + cur[:-1]
            lead = cur[-1]
            if lead:
                for i in range(self.deg):
                    nxt[i] -= lead * phi[i]
            rows.append(list(nxt))
            cur = nxt
        self.pow_rows = rows
        # exponent basis -> power basis, an (M x deg) integer matrix
        self.exp_to_pow = np.array([rows[e] for e in range(M)], dtype=np.int64)
        # structure tensor for products in the power basis
        T = np.zeros((self.deg, self.deg, self.deg), dtype=np.int64)
        for a in range(self.deg):
            for b in range(self.deg):
                T[a, b, :] = rows[a + b]
        self.mul_tensor = T

    # -- scalar Fraction arithmetic (used in the relation solver) ------------

    def zero(self):
        return tuple([Fraction(0)] * self.deg)

    def one(self):
        return tuple([Fraction(1)] + [Fraction(0)] * (self.deg - 1))

    def from_exponent(self, e: int, w=Fraction(1)):
        row = self.pow_rows[e % self.M]
        return tuple(w * c for c in row)

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x for x in a)

    def mul(self, a, b):
        conv = [Fraction(0)] * (2 * self.deg - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        conv[i + j] += x * y
        out = [Fraction(0)] * self.deg
        for e, w in enumerate(conv):
            if w:
                row = self.pow_rows[e]
                for i in range(self.deg):
                    if row[i]:
                        out[i] += w * row[i]
        return tuple(out)

    def inv(self, a):
        """Inverse by solving the deg x deg multiplication system."""
        cols = []
        for k in range(self.deg):
            basis = tuple(
                Fraction(1) if i == k else Fraction(0) for i in range(self.deg)
            )
            cols.append(self.mul(a, basis))
        n = self.deg
        aug = [[cols[j][i] for j in range(n)] + [self.one()[i]] for i in range(n)]
        for c in range(n):
            piv = next((r for r in range(c, n) if aug[r][c] != 0), None)
            if piv is None:
                raise ZeroDivisionError("not invertible in Q(zeta_M)")
            aug[c], aug[piv] = aug[piv], aug[c]
            pv = aug[c][c]
            aug[c] = [x / pv for x in aug[c]]
            for r in range(n):
                if r != c and aug[r][c] != 0:
                    f = aug[r][c]
                    aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
        return tuple(aug[i][n] for i in range(n))

    # -- vectorized matrix helpers --------------------------------------------

    def reduce_exp_matrix(self, num: np.ndarray) -> np.ndarray:
        """(..., M) integer exponent vectors -> (..., deg) power-basis vectors."""
        return np.tensordot(num, self.exp_to_pow, axes=([-1], [0]))

    def matmul_reduced(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        """Product of matrices with power-basis integer entries.

        Falls back to exact big-int arithmetic when int64 could overflow.
        """
        bound = (
            float(np.max(np.abs(A)))
            * float(np.max(np.abs(B)))
            * A.shape[1]
            * self.deg
            * int(np.max(np.abs(self.mul_tensor)) + 1)
        )
        if bound < 2**62:
            prod = np.einsum("ila,ljb->ijab", A, B)
            return np.tensordot(prod, self.mul_tensor, axes=([2, 3], [0, 1]))
        Ao = A.astype(object)
        Bo = B.astype(object)
        out = np.zeros((A.shape[0], B.shape[1], self.deg), dtype=object)
        for a in range(self.deg):
            for b in range(self.deg):
                block = Ao[:, :, a] @ Bo[:, :, b]
                for k in range(self.deg):
                    t = int(self.mul_tensor[a, b, k])
                    if t:
                        out[:, :, k] += t * block
        return out

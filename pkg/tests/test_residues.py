import math
import random

import numpy as np
import pytest

from bianchi_eis.errors import LevelTooLarge
from bianchi_eis.fields import OmegaCase, make_field
from bianchi_eis.residues import (
    Mat2R,
    double_coset_orbits,
    fixed_points,
    mat_from_row,
    perm_from_action,
    residue_ring,
)

QI = make_field(1)


def brute_units(ring):
    out = []
    for x in ring.elements():
        if any(ring.mul(x, y) == (1, 0) for y in ring.elements()):
            out.append(x)
    return out


def test_residue_ring_sizes_and_errors():
    r3 = residue_ring(QI, 3)
    assert r3.size == 9
    r5 = residue_ring(QI, 5)
    assert r5.size == 25
    with pytest.raises(LevelTooLarge):
        residue_ring(QI, 1)
    with pytest.raises(LevelTooLarge):
        residue_ring(QI, 51)


def test_inert_prime_gives_field_split_gives_zero_divisors():
    r3 = residue_ring(QI, 3)
    assert len(r3.units()) == 8  # F_9 minus zero
    r5 = residue_ring(QI, 5)
    nonzero = [x for x in r5.elements() if x != (0, 0)]
    assert any(not r5.is_unit(x) for x in nonzero)
    # (2, 1) embeds 2+i which kills 2-i mod 5
    assert r5.mul((2, 1), (2, 4)) == (0, 0)


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_units_against_exhaustive_inverse_search(N):
    ring = residue_ring(QI, N)
    assert sorted(ring.units()) == sorted(brute_units(ring))
    for x in ring.units():
        assert ring.mul(x, ring.inv(x)) == (1, 0)


def test_sigma_fixed_units_count():
    # sigma-fixed units of O/3O over Q(i): 3 - 1 = 2 of them
    ring = residue_ring(QI, 3)
    fixed = [x for x in ring.units() if ring.conj(x) == x]
    assert len(fixed) == 2
    assert fixed_points(ring.units(), ring.conj) == 2
    # the twisted involution x -> -conj(x) fixes the same number
    tfixed = fixed_points(ring.units(), lambda x: ring.neg(ring.conj(x)))
    assert tfixed == 2


def brute_sl2_count(ring):
    count = 0
    one = (1, 0)
    for a in ring.elements():
        for b in ring.elements():
            for c in ring.elements():
                for d in ring.elements():
                    if ring.sub(ring.mul(a, d), ring.mul(b, c)) == one:
                        count += 1
    return count


def test_sl2_enumeration_count_f9():
    ring = residue_ring(QI, 3)
    mats = list(ring.enumerate_sl2())
    assert len(mats) == 720  # q(q^2-1) with q = 9
    identity = Mat2R((1, 0), (0, 0), (0, 0), (1, 0))
    assert identity in mats


def test_sl2_enumeration_matches_bruteforce_n2():
    ring = residue_ring(QI, 2)
    mats = list(ring.enumerate_sl2())
    assert len(mats) == brute_sl2_count(ring)
    assert len(set(mats)) == len(mats)


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_sl2_no_duplicates_and_det_one(N):
    ring = residue_ring(QI, N)
    one = (1, 0)
    seen = set()
    for m in ring.enumerate_sl2():
        assert m not in seen
        seen.add(m)
        det = ring.sub(ring.mul(m.a, m.d), ring.mul(m.b, m.c))
        assert det == one


def test_sl2_crt_multiplicativity():
    n6 = len(residue_ring(QI, 6).sl2_rows())
    n2 = len(residue_ring(QI, 2).sl2_rows())
    n3 = len(residue_ring(QI, 3).sl2_rows())
    assert n6 == n2 * n3


def test_p1_counts():
    assert len(residue_ring(QI, 3).p1()) == 10  # |P1(F_9)| = 9 + 1
    # split case: brute-force orbit count over unit scaling
    r5 = residue_ring(QI, 5)
    pairs = {
        min(
            (r5.mul(u, x), r5.mul(u, y))
            for u in r5.units()
        )
        for x in r5.elements()
        for y in r5.elements()
        if r5.is_unimodular_pair(x, y)
    }
    assert len(r5.p1()) == len(pairs)


def test_p1_sigma_fixed_classes():
    ring = residue_ring(QI, 3)
    reps = ring.p1()

    def canon(pair):
        return ring.p1_canonical(pair[0], pair[1])

    fixed = [r for r in reps if canon((ring.conj(r[0]), ring.conj(r[1]))) == r]
    assert len(fixed) == 4  # p + 1 with p = 3
    tau_fixed = [
        r
        for r in reps
        if canon((ring.conj(r[0]), ring.neg(ring.conj(r[1])))) == r
    ]
    assert len(tau_fixed) == 4


def test_p1_sigma_fixed_prime_power():
    ring = residue_ring(QI, 9)
    reps = ring.p1()
    assert len(reps) == 90  # |P1(O/9)| = 81 + 9
    fixed = [
        r
        for r in reps
        if ring.p1_canonical(ring.conj(r[0]), ring.conj(r[1])) == r
    ]
    assert len(fixed) == 9 + 3  # p^n + p^(n-1) with p = 3, n = 2


def test_double_coset_orbits_trivial_cases():
    pts = list(range(5))
    ident = lambda i: i
    table = double_coset_orbits(pts, [ident], [ident])
    assert table.n_orbits == 5
    swap = lambda i: {0: 1, 1: 0}.get(i, i)
    table = double_coset_orbits([0, 1], [swap], [lambda i: i])
    assert table.n_orbits == 1


def test_double_coset_orbits_generator_order_independent():
    rng = random.Random(7)
    ring = residue_ring(QI, 3)
    rows = ring.sl2_array()
    from bianchi_eis.cusps import parabolic_generators

    left, right = parabolic_generators(ring)
    perms_l = [ring.sl2_perm(g, "left") for g in left]
    perms_r = [ring.sl2_perm(g, "right") for g in right]
    t1 = double_coset_orbits(range(len(rows)), perms_l, perms_r)
    shuffled_l = perms_l[::-1]
    shuffled_r = [perms_r[i] for i in (2, 0, 1)]
    t2 = double_coset_orbits(range(len(rows)), shuffled_l, shuffled_r)
    assert np.array_equal(t1.orbit_of, t2.orbit_of)


def test_fixed_points_identity_full_count():
    pts = list(range(10))
    assert fixed_points(pts, lambda i: i) == 10

import numpy as np
import pytest

from bianchi_eis.cusps import (
    CongruenceKind,
    Full,
    Gamma0,
    Gamma1,
    check_witness,
    cusp_classes,
    cusp_count,
    cusp_data,
    eis_dims,
    fixed_cusps,
    full_group_fixed_cusps,
    gamma0_stabilizer_witness,
    gamma1_coset_reps,
    is_member,
    parabolic_generators,
    sl2_lift,
)
from bianchi_eis.errors import DetNotOne
from bianchi_eis.fields import OElt, make_field
from bianchi_eis.residues import mat_from_row, residue_ring

QI = make_field(1)
I2 = (OElt(1, 0), OElt(0, 0), OElt(0, 0), OElt(1, 0))


def M(a, b, c, d):
    return (OElt(*a), OElt(*b), OElt(*c), OElt(*d))


def test_membership_examples():
    for N in (2, 3, 5, 7):
        assert is_member(Gamma1(N), I2, QI)
    T = M((1, 0), (1, 0), (0, 0), (1, 0))
    assert is_member(Gamma1(5), T, QI)
    low = M((1, 0), (0, 0), (1, 0), (1, 0))  # c = 1 not = 0 mod 5
    assert not is_member(Gamma1(5), low, QI)
    A = M((2, 0), (1, 0), (5, 0), (3, 0))
    assert is_member(Gamma0(5), A, QI)
    assert not is_member(Gamma1(5), A, QI)  # a - 1 = 1 not in (5)
    assert not is_member(Full(5), T, QI)
    bad = M((1, 0), (1, 0), (1, 0), (1, 0))  # det = 0
    with pytest.raises(DetNotOne):
        is_member(Gamma1(5), bad, QI)


def test_cusp_counts_inert_closed_form():
    assert cusp_count(QI, 3) == 3 * 3 - 1
    assert cusp_count(QI, 7) == 7 * 7 - 1


def test_cusp_count_split_vs_basis_count():
    # 5 splits in Q(i); compare the double-coset enumeration against the
    # independent primitive-pair class count
    from bianchi_eis.cocycles import cocycle_basis

    assert cusp_count(QI, 5) == cocycle_basis(QI, 5).dim == 32


def test_involutions_square_to_identity_on_classes():
    data = cusp_data(QI, 3)
    n = len(data.ring.sl2_rows())
    assert np.array_equal(data.sigma_perm[data.sigma_perm], np.arange(n))
    assert np.array_equal(data.tau_perm[data.tau_perm], np.arange(n))


def test_class_representatives_stable_under_parabolic_action():
    data = cusp_data(QI, 3)
    ring = data.ring
    left, right = parabolic_generators(ring)
    rows = ring.sl2_array()
    for cls in data.classes[:4]:
        rep = np.array([cls.representative.row()])
        i0 = ring.lookup_rows(rep)[0]
        for g in left:
            j = ring.lookup_rows(ring.act_rows(rows[[i0]], g, "left"))[0]
            assert data.table.orbit_of[j] == data.table.orbit_of[i0]
        for g in right:
            j = ring.lookup_rows(ring.act_rows(rows[[i0]], g, "right"))[0]
            assert data.table.orbit_of[j] == data.table.orbit_of[i0]


def test_fixed_cusps_counts():
    classes = cusp_classes(QI, 3)
    assert fixed_cusps(classes, "identity") == 8
    assert fixed_cusps(classes, "sigma") == 4
    assert fixed_cusps(classes, "tau") == 4
    assert fixed_cusps(classes, "sigma") <= len(classes)
    assert full_group_fixed_cusps(QI) == 1  # 2^(t-1) with t = 1


def test_eis_dims():
    assert eis_dims(QI, 3, 2) == (0, 8, 8)
    assert eis_dims(QI, 7, 1) == (0, 48, 48)
    assert eis_dims(QI, 3, 0) == (0, 8, 7)


def test_gamma0_witness():
    w = gamma0_stabilizer_witness(QI, 3)
    assert check_witness(QI, 3, w.matrix)
    assert w.pairs_checked == 80
    # the identity fixes everything, so it is no witness
    assert not check_witness(QI, 3, I2)
    # the translation (1 1; 0 1) fixes the (0, v) torsion rows, so it is
    # rejected too (row vectors transform by (u, v) -> (u, u + v))
    T = M((1, 0), (1, 0), (0, 0), (1, 0))
    assert not check_witness(QI, 3, T)
    w7 = gamma0_stabilizer_witness(QI, 7)
    assert check_witness(QI, 7, w7.matrix)


def test_sl2_lift_and_coset_reps():
    ring = residue_ring(QI, 3)
    rows = ring.sl2_array()
    for i in (0, 5, 137, 719):
        target = mat_from_row(tuple(int(v) for v in rows[i]))
        lifted = sl2_lift(QI, 3, target)
        a, b, c, d = lifted
        det = QI.sub(QI.mul(a, d), QI.mul(b, c))
        assert det == OElt(1, 0)
        back = tuple(x % 3 for e in lifted for x in e)
        assert back == tuple(int(v) for v in rows[i])


def test_gamma1_coset_reps_count():
    reps = gamma1_coset_reps(QI, 2)
    assert len(reps) == 48 // 4  # |SL2(O/2)| / N^2
    for a, b, c, d in reps:
        assert QI.sub(QI.mul(a, d), QI.mul(b, c)) == OElt(1, 0)

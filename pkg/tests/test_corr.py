"""Field collineations, tau-triangles, and correlation witnesses."""

import random
from itertools import permutations

import pytest

from helpers import field, plane

from conictopes.corr import (
    CorrelationWitness,
    FixedConicPoint,
    InvalidPower,
    correlation_witness,
    frobenius_collineation,
    tau_triangle,
    triality_projectivity_check,
)
from conictopes.grp import closure
from conictopes.perspectivity import (
    IDENTITY,
    involution_from_center,
    mat_adjugate,
    mat_mul,
)
from conictopes.triangles import PROPER_SNSP, classify_triangle, construct_tangent_triangle


def test_frobenius_collineation_order3_q27():
    pl = plane(3, 3)
    tau = frobenius_collineation(pl.field, 1)
    assert tau.order == 3
    for P in pl.points:
        Q = tau.apply_point(pl, tau.apply_point(pl, tau.apply_point(pl, P)))
        assert Q == P


def test_frobenius_fixes_conic_setwise():
    pl = plane(3, 3)
    tau = frobenius_collineation(pl.field, 1)
    conic = set(pl.conic_points)
    assert {tau.apply_point(pl, A) for A in conic} == conic


def test_frobenius_preserves_collinearity():
    pl = plane(3, 2)
    tau = frobenius_collineation(pl.field, 1)
    rng = random.Random(12)
    for _ in range(20):
        P, Q = rng.sample(pl.points, 2)
        l = pl.line_through(P, Q)
        img = {tau.apply_point(pl, X) for X in pl.line_points(l)}
        l2 = pl.line_through(tau.apply_point(pl, P), tau.apply_point(pl, Q))
        assert img == set(pl.line_points(l2))


def test_frobenius_q9_has_order_two():
    F = field(3, 2)
    tau = frobenius_collineation(F, 1)
    assert tau.order == 2  # a plane of square order: not a triality


def test_invalid_powers_rejected():
    F = field(3, 3)
    with pytest.raises(InvalidPower):
        frobenius_collineation(F, 0)
    with pytest.raises(InvalidPower):
        frobenius_collineation(F, 3)


def test_tau_triangle_q27():
    pl = plane(3, 3)
    tau = frobenius_collineation(pl.field, 1)
    A = next(x for x in pl.conic_points if tau.apply_point(pl, x) != x)
    rec = tau_triangle(pl, A, tau)
    P, Q, R = rec.centers
    assert tau.apply_point(pl, P) == Q
    assert tau.apply_point(pl, Q) == R
    assert tau.apply_point(pl, R) == P
    assert rec.group_id.label == "PGL(2,3)"
    assert rec.group_id.order == 24
    # tau permutes the involutions cyclically, as matrices
    mats = [a.matrix for a in rec.involutions]
    assert tau.conjugate_matrix(mats[0]) == mats[1]
    assert tau.conjugate_matrix(mats[1]) == mats[2]
    assert tau.conjugate_matrix(mats[2]) == mats[0]


def test_tau_equivariance_of_centers():
    pl = plane(3, 3)
    tau = frobenius_collineation(pl.field, 1)
    rng = random.Random(6)
    for P in rng.sample(pl.off_conic_points, 10):
        a = involution_from_center(pl, P)
        moved = tau.conjugate_matrix(a.matrix)
        b = involution_from_center(pl, tau.apply_point(pl, P))
        assert moved == b.matrix


def test_tau_triangle_fixed_point_rejected():
    pl = plane(3, 3)
    tau = frobenius_collineation(pl.field, 1)
    fixed = next(x for x in pl.conic_points if tau.apply_point(pl, x) == x)
    with pytest.raises(FixedConicPoint):
        tau_triangle(pl, fixed, tau)


def test_identity_sigma_witness_is_identity():
    pl = plane(5)
    F = pl.field
    rec = construct_tangent_triangle(pl, *pl.conic_points[:3])
    H = closure(F, rec.involutions)
    w = correlation_witness(pl, H, rec.involutions, (0, 1, 2))
    assert w is not None and w.g == IDENTITY and w.source == "Inner"


def test_tangent_triangle_full_s3_q7():
    pl = plane(7)
    F = pl.field
    rec = construct_tangent_triangle(pl, *pl.conic_points[:3])
    H = closure(F, rec.involutions)
    for sigma in permutations(range(3)):
        w = correlation_witness(pl, H, rec.involutions, sigma)
        assert w is not None, sigma
        # the witness really conjugates the generators accordingly
        adj = mat_adjugate(F, w.g)
        for i in range(3):
            conj = mat_mul(F, mat_mul(F, w.g, rec.involutions[i].matrix), adj)
            assert conj == rec.involutions[sigma[i]].matrix


def test_distinct_labels_admit_only_identity():
    pl = plane(5)
    F = pl.field
    from itertools import combinations

    rec = None
    for tri in combinations(pl.off_conic_points, 3):
        if pl.incident(tri[2], pl.line_through(tri[0], tri[1])):
            continue
        cand = classify_triangle(pl, *tri)
        if cand.triangle_class == PROPER_SNSP and len(set(cand.labels.values())) == 3:
            rec = cand
            break
    assert rec is not None
    H = closure(F, rec.involutions)
    for sigma in permutations(range(3)):
        w = correlation_witness(pl, H, rec.involutions, sigma)
        if sigma == (0, 1, 2):
            assert w is not None
        else:
            assert w is None


def test_witness_sigmas_form_a_subgroup():
    pl = plane(5)
    F = pl.field
    rec = construct_tangent_triangle(pl, *pl.conic_points[:3])
    H = closure(F, rec.involutions)
    have = {sigma for sigma in permutations(range(3))
            if correlation_witness(pl, H, rec.involutions, sigma) is not None}
    assert (0, 1, 2) in have
    for s in have:
        for t in have:
            comp = tuple(s[t[i]] for i in range(3))
            assert comp in have


def test_witness_induces_incidence_preserving_map():
    from conictopes.geom import build_coset_geometry

    pl = plane(7)
    F = pl.field
    rec = construct_tangent_triangle(pl, *pl.conic_points[:3])
    invs = rec.involutions
    H = closure(F, invs)
    Hs = []
    for i in range(3):
        j, k = [x for x in range(3) if x != i]
        Hs.append(closure(F, (invs[j], invs[k])))
    geo = build_coset_geometry(F, H, *Hs)
    sigma = (1, 2, 0)
    w = correlation_witness(pl, H, invs, sigma)
    assert w is not None
    # map H_i x -> H_sigma(i) (g x); check incidence of images
    index = {m: i for i, m in enumerate(H.elements)}
    coset_lookup = []
    for t in range(3):
        lk = {}
        for ci, coset in enumerate(geo.cosets[t]):
            for eid in coset:
                lk[eid] = ci
        coset_lookup.append(lk)

    def image(ti, ci):
        eid = geo.cosets[ti][ci][0]
        x = H.elements[eid]
        gx = mat_mul(F, w.g, x)
        return sigma[ti], coset_lookup[sigma[ti]][index[gx]]

    inc = {(ti, ci, tj, cj) for (ti, ci, tj, cj) in geo.incidence}
    inc |= {(tj, cj, ti, ci) for (ti, ci, tj, cj) in geo.incidence}
    for (ti, ci, tj, cj) in list(inc)[:200]:
        ti2, ci2 = image(ti, ci)
        tj2, cj2 = image(tj, cj)
        assert (ti2, ci2, tj2, cj2) in inc


def test_triality_projectivity_check_q27():
    rep = triality_projectivity_check(field(3, 3))
    assert rep.group_order == 24
    assert rep.candidates == 1
    assert rep.verified


def test_triality_check_needs_cube():
    with pytest.raises(ValueError):
        triality_projectivity_check(field(5, 2))

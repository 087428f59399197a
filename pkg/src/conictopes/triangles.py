"""Classification of involution triples and the exhaustive sweep machinery.

A triple of off-conic points (P, Q, R) determines three involutions of the
conic stabilizer.  Its class records the geometry that matters for the
rank-3 coset geometry built on them:

    Collinear             centers on one line (never a hypertope),
    SelfPolar             the three involutions commute pairwise (Klein four),
    NonProperPolarizedOK  some vertex's polar is the opposite side line, yet
                          the central involution falls outside the dihedral
                          group of the other two (a hypertope),
    NonProperViolating    the same configuration with the involution inside,
    ProperSNSP            proper and strongly non self-polar,
    ProperNotSNSP         proper with a self-polar triangle across its sides.

"Strongly non self-polar" means no self-polar triangle {X, Y, Z} sits on
three different sides of the triangle in an essential way.  Sides are the
centers of the involutions inside each <alpha_i, alpha_j>, poles included
whenever the dihedral group has a central involution.  For an assignment
X on side a, Y on side b and Z = pole(XY) on side c, the configurations
with Z equal to vertex a, vertex b, or the pole of the side line c are not
violations: the corresponding products are exactly the four elements
{e, alpha, alpha', alpha*alpha'} that the flag-transitivity identity keeps
inside H_c, and every coset geometry admits them (a triangle with a
commuting generator pair always carries such vertex/pole triples, hypertope
or not).  A self-polar triple of points is a violation precisely when some
assignment puts a point other than these three in the product role; the
generated triangle itself (all three involutions commuting) is never
strongly non self-polar.  The witness search runs over side pairs in a
fixed order (side 2 x side 0 against side 1, then the two rotations) with
points scanned in canonical encoding order, so reported witnesses are
reproducible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations, islice

from conictopes.engine import Engine, engine_for
from conictopes.geom import CriteriaReport, coset_criteria
from conictopes.gf import Field
from conictopes.grp import BudgetExceeded, GroupId, closure, identify_group
from conictopes.perspectivity import (
    IDENTITY,
    Involution,
    center_axis,
    in_psl,
    involution_from_center,
    mat_mul,
    product_order,
)
from conictopes.plane import Plane

COLLINEAR = "Collinear"
SELF_POLAR = "SelfPolar"
PROPER_SNSP = "ProperSNSP"
PROPER_NOT_SNSP = "ProperNotSNSP"
NON_PROPER_OK = "NonProperPolarizedOK"
NON_PROPER_VIOLATING = "NonProperViolating"

_SEARCH_ORDER = ((2, 0, 1), (0, 1, 2), (1, 2, 0))


class DegenerateInput(ValueError):
    """classify_triangle needs three distinct points off the conic."""


class CollinearCenters(ValueError):
    """not_psl_sufficient needs a genuine triangle."""


class PointsNotOnConic(ValueError):
    """Tangent triangles are built from three conic points."""


class CoincidentConicPoints(ValueError):
    """Tangent triangles need three distinct conic points."""


class SearchExhausted(RuntimeError):
    """The deterministic construction scan found no valid configuration."""


@dataclass
class TriangleRecord:
    centers: tuple
    involutions: tuple
    sides: tuple                 # three frozensets of point triples
    triangle_class: str
    witness: tuple | None        # self-polar triple on three different sides
    group_id: GroupId
    hypertope: bool
    labels: dict                 # {(i, j): order of alpha_i * alpha_j}
    criteria: CriteriaReport

    def describe(self) -> dict:
        return {
            "centers": [list(c) for c in self.centers],
            "class": self.triangle_class,
            "witness": None if self.witness is None else [list(w) for w in self.witness],
            "group": self.group_id.describe(),
            "hypertope": self.hypertope,
            "labels": {f"{i}{j}": v for (i, j), v in sorted(self.labels.items())},
            "sides": [sorted(list(s) for s in side) for side in self.sides],
        }


def snsp_witness(sides, commutes, pole_of_join, vertices, side_poles):
    """First essential self-polar triangle across three different sides.

    sides are three point collections, vertices the triangle's own centers,
    side_poles the poles of the three side lines.  A hit with X on side a,
    Y on side b and product center Z on side c only counts when Z is none
    of vertex a, vertex b, pole(side line c): those products are the four
    elements the flag-transitivity identity always admits.  The scan order
    is fixed (assignment (2,0,1) first, then its rotations; points in
    canonical order) so the witness is deterministic.  Returns None when
    the triangle is strongly non self-polar.
    """
    sides_sorted = [sorted(s) for s in sides]
    sides_set = [set(s) for s in sides]
    for a, b, c in _SEARCH_ORDER:
        allowed = (vertices[a], vertices[b], side_poles[c])
        for X in sides_sorted[a]:
            for Y in sides_sorted[b]:
                if Y == X or not commutes(X, Y):
                    continue
                Z = pole_of_join(X, Y)
                if Z in allowed:
                    continue
                if Z != X and Z != Y and Z in sides_set[c]:
                    return (X, Y, Z)
    return None


def _side_of(plane: Plane, subgroup_eset) -> frozenset:
    """Centers of the involutions inside a closed subgroup of the stabilizer."""
    F = plane.field
    centers = []
    for m in subgroup_eset:
        if m == IDENTITY:
            continue
        if mat_mul(F, m, m) == IDENTITY:
            centers.append(center_axis(plane, m)[0])
    return frozenset(centers)


def classify_triangle(plane: Plane, P, Q, R, closure_cap=200_000) -> TriangleRecord:
    """Full geometric classification of one triple of off-conic points."""
    pts = tuple(plane.normalize(x) for x in (P, Q, R))
    if len(set(pts)) != 3:
        raise DegenerateInput("points must be pairwise distinct")
    if any(plane.on_conic(x) for x in pts):
        raise DegenerateInput("points must be off the conic")
    F = plane.field
    invs = tuple(involution_from_center(plane, x) for x in pts)
    labels = {}
    for i in range(3):
        for j in range(i + 1, 3):
            labels[(i, j)] = product_order(F, invs[i], invs[j])
    Hs = []
    for i in range(3):
        j, k = [x for x in range(3) if x != i]
        Hs.append(closure(F, (invs[j], invs[k]), cap=8 * (plane.q + 2)).eset)
    sides = tuple(_side_of(plane, Hs[i]) for i in range(3))
    gens = tuple(a.matrix for a in invs)
    criteria = coset_criteria(IDENTITY, lambda x, y: mat_mul(F, x, y), gens, Hs)

    collinear = plane.incident(pts[2], plane.line_through(pts[0], pts[1]))
    self_polar = all(v == 2 for v in labels.values())
    witness = None
    if collinear:
        cls = COLLINEAR
    elif self_polar:
        cls = SELF_POLAR
        witness = pts
    else:
        side_lines = [plane.line_through(pts[1], pts[2]),
                      plane.line_through(pts[0], pts[2]),
                      plane.line_through(pts[0], pts[1])]
        witness = snsp_witness(
            sides,
            commutes=lambda X, Y: plane.incident(Y, plane.polar(X)),
            pole_of_join=lambda X, Y: plane.pole(plane.line_through(X, Y)),
            vertices=pts,
            side_poles=tuple(plane.pole(l) for l in side_lines))
        proper = all(plane.pole(side_lines[i]) != pts[i] for i in range(3))
        if proper:
            cls = PROPER_SNSP if witness is None else PROPER_NOT_SNSP
        else:
            cls = NON_PROPER_OK if witness is None else NON_PROPER_VIOLATING

    H = closure(F, invs, cap=closure_cap)
    group_id = identify_group(H, F)
    return TriangleRecord(centers=pts, involutions=invs, sides=sides,
                          triangle_class=cls, witness=witness,
                          group_id=group_id, hypertope=criteria.hypertope,
                          labels=labels, criteria=criteria)


def not_psl_sufficient(plane: Plane, a0: Involution, a1: Involution,
                       a2: Involution) -> bool:
    """Sufficient test for strong non self-polarity: no generator in PSL."""
    if plane.incident(a2.center, plane.line_through(a0.center, a1.center)):
        raise CollinearCenters("centers must form a triangle")
    return not any(in_psl(plane, a) for a in (a0, a1, a2))


def construct_tangent_triangle(plane: Plane, A, B, C,
                               closure_cap=200_000) -> TriangleRecord:
    """Triangle of the three tangent lines at distinct conic points A, B, C."""
    pts = tuple(plane.normalize(x) for x in (A, B, C))
    if any(not plane.on_conic(x) for x in pts):
        raise PointsNotOnConic("tangent triangles are built on conic points")
    if len(set(pts)) != 3:
        raise CoincidentConicPoints("conic points must be pairwise distinct")
    tA, tB, tC = (plane.polar(x) for x in pts)
    P = plane.meet(tA, tB)
    Q = plane.meet(tB, tC)
    R = plane.meet(tA, tC)
    return classify_triangle(plane, P, Q, R, closure_cap=closure_cap)


def construct_nonlinear_pgl(field: Field, closure_cap=2_000_000) -> TriangleRecord:
    """Deterministic construction of a full-group hypertope with no label 2.

    Scans canonically for a non-PSL involution alpha_P, a non-tangent line l
    through P whose stabilizer order is 2m with m > 2, a second involution
    alpha_Q centered on l with product order exactly m (such a product
    generates the full rotation subgroup of the line stabilizer, which pins
    the generated group to the whole of PGL(2,q)), and a third non-PSL
    involution alpha_R off l whose axis avoids P and Q so no pair commutes.
    Note the product of two involutions on the same side of the PSL coset
    boundary always lands inside PSL, whose element orders stay below m, so
    alpha_Q necessarily sits in PSL when alpha_P does not.  Every candidate
    is verified (full group generated, no label 2, hypertope) before being
    returned; a fruitless scan raises SearchExhausted.
    """
    plane = Plane(field)
    q = field.q
    full_order = q**3 - q
    for P in plane.points:
        if plane.on_conic(P):
            continue
        aP = involution_from_center(plane, P)
        if in_psl(plane, aP):
            continue
        lines = sorted(plane.lines_through(P))
        for wanted in ("secant", "exterior"):
            m = q - 1 if wanted == "secant" else q + 1
            if m <= 2:
                continue
            for line in lines:
                if plane.classify_line(line) != wanted:
                    continue
                for Qpt in sorted(plane.line_points(line)):
                    if Qpt == P or plane.on_conic(Qpt):
                        continue
                    aQ = involution_from_center(plane, Qpt)
                    if product_order(field, aP, aQ) != m:
                        continue
                    rec = _nonlinear_third_point(plane, aP, aQ, line, m,
                                                 full_order, closure_cap)
                    if rec is not None:
                        return rec
    raise SearchExhausted(f"no non-linear full-group triangle found for q={q}")


def _nonlinear_third_point(plane, aP, aQ, line, m, full_order, closure_cap):
    F = plane.field
    for Rpt in plane.points:
        if plane.on_conic(Rpt) or plane.incident(Rpt, line):
            continue
        axis = plane.polar(Rpt)
        if plane.incident(aP.center, axis) or plane.incident(aQ.center, axis):
            continue
        aR = involution_from_center(plane, Rpt)
        if in_psl(plane, aR):
            continue
        rec = classify_triangle(plane, aP.center, aQ.center, Rpt,
                                closure_cap=closure_cap)
        if (rec.group_id.order == full_order and rec.hypertope
                and all(v > 2 for v in rec.labels.values())):
            return rec
    return None


# -- exhaustive sweeps ---------------------------------------------------------


@dataclass
class ClassificationTable:
    p: int
    n: int
    q: int
    mode: str
    seed: int | None
    total: int
    counts: dict            # (class, group label, psl signature, hypertope) -> count
    main_violations: int
    violation_samples: list

    @property
    def hypertope_count(self) -> int:
        return sum(v for k, v in self.counts.items() if k[3])

    def class_counts(self) -> dict:
        out = {}
        for (cls, _, _, _), v in self.counts.items():
            out[cls] = out.get(cls, 0) + v
        return out

    def rows(self):
        return [
            {"class": cls, "group": grp, "psl": psl,
             "hypertope": hyp, "count": self.counts[(cls, grp, psl, hyp)]}
            for (cls, grp, psl, hyp) in sorted(self.counts)
        ]

    def to_json_obj(self) -> dict:
        return {"p": self.p, "n": self.n, "q": self.q, "mode": self.mode,
                "seed": self.seed, "total": self.total,
                "main_violations": self.main_violations,
                "violation_samples": self.violation_samples,
                "class_counts": self.class_counts(),
                "rows": self.rows()}

    TSV_HEADER = "class\tgroup\tpsl\thypertope\tcount"

    def to_tsv(self) -> str:
        lines = [self.TSV_HEADER]
        for row in self.rows():
            lines.append(f"{row['class']}\t{row['group']}\t{row['psl']}\t"
                         f"{'true' if row['hypertope'] else 'false'}\t{row['count']}")
        return "\n".join(lines) + "\n"


def _sweep_triple(eng: Engine, tri):
    """Classify one id triple: returns (key, hypertope, snsp, collinear)."""
    c0, c1, c2 = tri
    p01 = eng.pair(c0, c1)
    p02 = eng.pair(c0, c2)
    p12 = eng.pair(c1, c2)
    line01 = eng.lt_l[c0][c1]
    collinear = eng.onl_l[c2][line01]

    gens = (eng.inv_elt_l[c0], eng.inv_elt_l[c1], eng.inv_elt_l[c2])
    subgroups = (p12.eset, p02.eset, p01.eset)
    mul = eng.mul_l
    criteria = coset_criteria(0, lambda x, y: mul[x][y], gens, subgroups,
                              sp_intersect=eng.sp_intersect)
    hypertope = criteria.hypertope

    self_polar = p01.order2 == 2 and p02.order2 == 2 and p12.order2 == 2
    witness_found = False
    if not collinear and not self_polar:
        sides = (p12.side_sorted, p02.side_sorted, p01.side_sorted)
        side_sets = (p12.side, p02.side, p01.side)
        onl = eng.onl_l
        polar = eng.polar_l
        pole = eng.pole_l
        lt = eng.lt_l
        verts = (c0, c1, c2)
        side_poles = (pole[lt[c1][c2]], pole[lt[c0][c2]], pole[line01])
        for a, b, c in _SEARCH_ORDER:
            allowed = (verts[a], verts[b], side_poles[c])
            for X in sides[a]:
                pX = polar[X]
                for Y in sides[b]:
                    if Y == X or not onl[Y][pX]:
                        continue
                    Z = pole[lt[X][Y]]
                    if Z in allowed:
                        continue
                    if Z != X and Z != Y and Z in side_sets[c]:
                        witness_found = True
                        break
                if witness_found:
                    break
            if witness_found:
                break

    if collinear:
        cls = COLLINEAR
    elif self_polar:
        cls = SELF_POLAR
    else:
        proper = (eng.pole_l[eng.lt_l[c1][c2]] != c0
                  and eng.pole_l[eng.lt_l[c0][c2]] != c1
                  and eng.pole_l[line01] != c2)
        if proper:
            cls = PROPER_NOT_SNSP if witness_found else PROPER_SNSP
        else:
            cls = NON_PROPER_VIOLATING if witness_found else NON_PROPER_OK

    ids, _ = eng.closure_ids(p01.elems, gens)
    glabel = eng.group_label(ids)
    psl = "".join(sorted("P" if eng.psl_l[c] else "N" for c in tri))
    snsp = (not collinear) and (not self_polar) and not witness_found
    return (cls, glabel, psl, hypertope), hypertope, snsp, collinear


def _sweep_chunk(field: Field, lo: int, hi: int):
    eng = engine_for(field)
    off = [int(x) for x in eng.off_conic_ids]
    counts: dict = {}
    violations = 0
    samples = []
    for tri in islice(combinations(off, 3), lo, hi):
        key, hyp, snsp, collinear = _sweep_triple(eng, tri)
        counts[key] = counts.get(key, 0) + 1
        if hyp != ((not collinear) and snsp):
            violations += 1
            if len(samples) < 10:
                samples.append([list(eng.plane.points[c]) for c in tri])
    return counts, violations, samples, (hi - lo if hi is not None else None)


def enumerate_triples(field: Field, mode: str = "full", sample: int | None = None,
                      seed: int = 0, jobs: int = 1,
                      budget: int = 20_000_000) -> ClassificationTable:
    """Sweep involution triples and tabulate classes, groups and verdicts.

    full mode iterates all C(q^2, 3) triples; orbit-reps partitions the
    triple space into conic-stabilizer orbits and classifies one canonical
    representative per orbit (counts weighted by orbit size, so totals
    match full mode exactly); sample(N) draws N distinct triples with the
    seeded Mersenne Twister PRNG of random.Random.  jobs > 1 fans the full
    mode out over forked workers.
    """
    from conictopes.engine import MAX_ENGINE_Q

    if field.q > MAX_ENGINE_Q:
        raise BudgetExceeded(
            f"the sweep tables are limited to q <= {MAX_ENGINE_Q}, got q = {field.q}",
            partial_size=0)
    n_off = field.q**2
    total = n_off * (n_off - 1) * (n_off - 2) // 6
    if total > budget:
        raise BudgetExceeded(f"sweep of {total} triples exceeds budget {budget}",
                             partial_size=0)
    eng = engine_for(field)
    off = [int(x) for x in eng.off_conic_ids]

    counts: dict = {}
    violations = 0
    samples: list = []

    def account(key, hyp, snsp, collinear, tri, weight=1):
        nonlocal violations
        counts[key] = counts.get(key, 0) + weight
        if hyp != ((not collinear) and snsp):
            violations += weight
            if len(samples) < 10:
                samples.append([list(eng.plane.points[c]) for c in tri])

    seed_out: int | None = None
    if mode == "full":
        if jobs > 1:
            chunks = _parallel_sweep(field, total, jobs)
            for ccounts, cviol, csamp in chunks:
                for k, v in ccounts.items():
                    counts[k] = counts.get(k, 0) + v
                violations += cviol
                samples.extend(csamp[: max(0, 10 - len(samples))])
            swept = total
        else:
            for tri in combinations(off, 3):
                key, hyp, snsp, collinear = _sweep_triple(eng, tri)
                account(key, hyp, snsp, collinear, tri)
            swept = total
    elif mode == "orbit-reps":
        perms = eng.gen_point_perms
        visited = set()
        swept = 0
        for tri in combinations(off, 3):
            if tri in visited:
                continue
            orbit = {tri}
            stack = [tri]
            while stack:
                t = stack.pop()
                for perm in perms:
                    img = tuple(sorted((perm[t[0]], perm[t[1]], perm[t[2]])))
                    if img not in orbit:
                        orbit.add(img)
                        stack.append(img)
            visited |= orbit
            rep = min(orbit)
            key, hyp, snsp, collinear = _sweep_triple(eng, rep)
            account(key, hyp, snsp, collinear, rep, weight=len(orbit))
            swept += len(orbit)
    elif mode == "sample":
        if sample is None:
            raise ValueError("sample mode needs a sample size")
        seed_out = seed
        rng = random.Random(seed)
        wanted = sorted(rng.sample(range(total), min(sample, total)))
        swept = 0
        it = enumerate(combinations(off, 3))
        for want in wanted:
            for idx, tri in it:
                if idx == want:
                    key, hyp, snsp, collinear = _sweep_triple(eng, tri)
                    account(key, hyp, snsp, collinear, tri)
                    swept += 1
                    break
    else:
        raise ValueError(f"unknown mode {mode!r}")

    return ClassificationTable(p=field.p, n=field.n, q=field.q, mode=mode,
                               seed=seed_out, total=swept, counts=counts,
                               main_violations=violations,
                               violation_samples=samples)


def _parallel_sweep(field: Field, total: int, jobs: int):
    import multiprocessing as mp

    ctx = mp.get_context("fork")
    bounds = [round(i * total / jobs) for i in range(jobs + 1)]
    args = [(field, bounds[i], bounds[i + 1]) for i in range(jobs)]
    with ctx.Pool(jobs) as pool:
        out = pool.starmap(_sweep_chunk, args)
    return [(c, v, s) for (c, v, s, _) in out]


def verify_main(field: Field, mode: str = "full", sample: int | None = None,
                seed: int = 0, jobs: int = 1) -> ClassificationTable:
    """Sweep and report violations of: hypertope iff SNSP triangle."""
    return enumerate_triples(field, mode=mode, sample=sample, seed=seed, jobs=jobs)

"""Canonical matrix-group machinery for subgroups of the conic stabilizer.

Element sets are hash-sets of canonical 3x3 projectivity tuples, so set
semantics (closure, products, intersections) ride directly on projective
equality.  Generated groups are identified against the short list of
isomorphism types that can occur for subgroups of PGL(2,q) generated by
involutions: Klein four-groups, dihedral groups, the affine-line shapes,
subfield PGL/PSL copies, and the sporadic A4, S4, A5.  Identification is
decided by order first, then involution count, then maximal element order;
anything that fits no entry is reported as Unknown with its statistics
rather than guessed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from conictopes.gf import Field
from conictopes.perspectivity import (
    IDENTITY,
    Involution,
    line_image,
    mat_mul,
    mat_vec,
)
from conictopes.plane import Plane

DEFAULT_CLOSURE_CAP = 2_000_000


class BudgetExceeded(RuntimeError):
    """Closure or sweep hit its element budget; .partial_size holds progress."""

    def __init__(self, message, partial_size=None):
        super().__init__(message)
        self.partial_size = partial_size


class NotClosed(ValueError):
    """identify_group was handed a set that is not closed under products."""


@dataclass(frozen=True)
class ElementSet:
    """A set of canonical projectivity matrices, in deterministic BFS order."""

    elements: tuple
    generators: tuple = ()
    closed: bool = False

    @property
    def eset(self):
        return self._eset()

    def _eset(self):
        if not hasattr(self, "_eset_cache"):
            object.__setattr__(self, "_eset_cache", frozenset(self.elements))
        return self._eset_cache

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, m):
        return m in self.eset


def _as_matrix(g):
    return g.matrix if isinstance(g, Involution) else tuple(g)


def closure(field: Field, generators, cap: int = DEFAULT_CLOSURE_CAP) -> ElementSet:
    """Breadth-first closure of a generator list under right multiplication.

    Deterministic: elements appear in discovery order starting from the
    identity, with generators applied in the given order.  Fails cleanly
    with BudgetExceeded when the element count passes cap.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    gens = tuple(_as_matrix(g) for g in generators)
    elements = [IDENTITY]
    seen = {IDENTITY}
    frontier = [IDENTITY]
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = mat_mul(field, x, g)
                if y not in seen:
                    seen.add(y)
                    elements.append(y)
                    new.append(y)
                    if len(elements) > cap:
                        raise BudgetExceeded(
                            f"closure exceeded cap {cap}", partial_size=len(elements))
        frontier = new
    return ElementSet(elements=tuple(elements), generators=gens, closed=True)


def _element_iter(A):
    return A.elements if isinstance(A, ElementSet) else A


def _element_set(A):
    return A.eset if isinstance(A, ElementSet) else frozenset(A)


def set_product(field: Field, A, B) -> frozenset:
    """{a*b : a in A, b in B} as canonical matrices."""
    out = set()
    for a in _element_iter(A):
        for b in _element_iter(B):
            out.add(mat_mul(field, a, b))
    return frozenset(out)


def intersect(A, B) -> frozenset:
    return _element_set(A) & _element_set(B)


def line_stabilizer(plane: Plane, H: ElementSet, line) -> ElementSet:
    """The subgroup of H fixing a line (as a set of points)."""
    line = plane.normalize(line)
    elems = tuple(g for g in H.elements if line_image(plane, g, line) == line)
    return ElementSet(elements=elems, closed=True)


# -- identification ----------------------------------------------------------


@dataclass(frozen=True)
class GroupId:
    """Isomorphism-type verdict with the statistics that decided it.

    Tags: Klein4, Dihedral (order 2*m), C2xDihedral (order 4*m), SubAGL,
    PSL / PGL (subfield parameter q0), A4, A5, S4, Unknown.
    """

    tag: str
    order: int
    q0: int | None = None
    m: int | None = None
    max_elt_order: int = 0
    n_involutions: int = 0

    @property
    def label(self) -> str:
        if self.tag in ("PGL", "PSL"):
            return f"{self.tag}(2,{self.q0})"
        if self.tag in ("Dihedral", "C2xDihedral"):
            return f"{self.tag}({self.m})"
        return self.tag

    def describe(self) -> dict:
        out = {"tag": self.label, "order": self.order,
               "max_elt_order": self.max_elt_order,
               "n_involutions": self.n_involutions}
        if self.q0 is not None:
            out["q0"] = self.q0
        return out


@lru_cache(maxsize=8)
def _plane_for(field: Field) -> Plane:
    return Plane(field)


def _conic_perm_orders(H, plane):
    """Element orders via cycle types of the action on the conic points."""
    field = plane.field
    conic = plane.conic_points
    idx = {pt: i for i, pt in enumerate(conic)}
    orders = []
    for m in _element_iter(H):
        perm = [idx[plane.normalize(mat_vec(field, m, pt))] for pt in conic]
        seen = [False] * len(perm)
        order = 1
        for start in range(len(perm)):
            if seen[start]:
                continue
            length = 0
            j = start
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            order = order * length // math.gcd(order, length)
        orders.append(order)
    return orders


def _verify_closed(field, H):
    if isinstance(H, ElementSet) and H.closed:
        return
    elems = list(_element_iter(H))
    eset = _element_set(H)
    if IDENTITY not in eset:
        raise NotClosed("identity missing")
    if len(elems) ** 2 > 4_000_000:
        raise NotClosed("set too large to verify closure exhaustively")
    for a in elems:
        for b in elems:
            if mat_mul(field, a, b) not in eset:
                raise NotClosed("set is not closed under products")


def _is_dihedral(order, orders_by_elem, elems, field):
    """Dihedral of order 2m: a cyclic half plus involutions inverting it."""
    if order % 2 != 0:
        return False
    m = order // 2
    h = next((e for e, o in zip(elems, orders_by_elem) if o == m), None)
    if h is None:
        return False
    cyc = {IDENTITY}
    acc = h
    while acc != IDENTITY:
        cyc.add(acc)
        acc = mat_mul(field, acc, h)
    if len(cyc) != m:
        return False
    h_inv = IDENTITY  # h^(m-1)
    for _ in range(m - 1):
        h_inv = mat_mul(field, h_inv, h)
    for e, o in zip(elems, orders_by_elem):
        if e in cyc:
            continue
        if o != 2:
            return False
        if mat_mul(field, mat_mul(field, e, h), e) != h_inv:
            return False
    return True


def _central_involutions(elems, orders_by_elem, field):
    out = []
    for z, o in zip(elems, orders_by_elem):
        if o != 2:
            continue
        if all(mat_mul(field, z, g) == mat_mul(field, g, z) for g in elems):
            out.append(z)
    return out


def _quotient_is_dihedral(elems, z, field):
    """Test whether H / <z> is dihedral, for a central involution z."""
    rep = {}
    for g in elems:
        gz = mat_mul(field, g, z)
        key = min(g, gz)
        rep[g] = key
    classes = sorted(set(rep.values()))
    cindex = {c: i for i, c in enumerate(classes)}
    k = len(classes)
    mul_q = [[0] * k for _ in range(k)]
    for i, a in enumerate(classes):
        for j, b in enumerate(classes):
            mul_q[i][j] = cindex[rep[mat_mul(field, a, b)]]
    e_q = cindex[rep[IDENTITY]]

    def q_order(i):
        o, j = 1, i
        while j != e_q:
            j = mul_q[j][i]
            o += 1
        return o

    orders = [q_order(i) for i in range(k)]
    if k % 2 != 0:
        return False
    m = k // 2
    try:
        hi = orders.index(m)
    except ValueError:
        return False
    cyc = {e_q}
    j = hi
    while j != e_q:
        cyc.add(j)
        j = mul_q[j][hi]
    if len(cyc) != m:
        return False
    hinv = e_q
    for _ in range(m - 1):
        hinv = mul_q[hinv][hi]
    for i in range(k):
        if i in cyc:
            continue
        if orders[i] != 2 or mul_q[mul_q[i][hi]][i] != hinv:
            return False
    return True


def _identify_from_stats(order, n_inv, max_ord, p, n,
                         is_dihedral_fn, c2xd_fn) -> GroupId:
    """Shared identification decision: order, then involution count, then
    maximal element order; structural probes only where stats are ambiguous."""
    stats = dict(order=order, max_elt_order=max_ord, n_involutions=n_inv)
    if order == 1:
        return GroupId(tag="Unknown", **stats)
    if order == 4 and n_inv == 3:
        return GroupId(tag="Klein4", **stats)
    if order % 2 == 0 and max_ord == max(order // 2, 2) and is_dihedral_fn():
        return GroupId(tag="Dihedral", m=order // 2, **stats)
    if order % 4 == 0 and order >= 8 and c2xd_fn():
        return GroupId(tag="C2xDihedral", m=order // 4, **stats)
    pk = p
    while pk < order:
        if order == 2 * pk and n_inv == pk and max_ord == p:
            return GroupId(tag="SubAGL", **stats)
        pk *= p
    for m in range(1, n + 1):
        if n % m:
            continue
        q0 = p**m
        if order == q0**3 - q0 and n_inv == q0 * q0 and max_ord == q0 + 1:
            return GroupId(tag="PGL", q0=q0, **stats)
        psl_inv = q0 * (q0 + 1) // 2 if q0 % 4 == 1 else q0 * (q0 - 1) // 2
        psl_max = max((q0 + 1) // 2, p) if q0 > p else p
        if order == (q0**3 - q0) // 2 and n_inv == psl_inv and max_ord == psl_max:
            return GroupId(tag="PSL", q0=q0, **stats)
    if order == 60 and n_inv == 15 and max_ord == 5:
        return GroupId(tag="A5", **stats)
    if order == 24 and n_inv == 9 and max_ord == 4:
        return GroupId(tag="S4", **stats)
    if order == 12 and n_inv == 3 and max_ord == 3:
        return GroupId(tag="A4", **stats)
    return GroupId(tag="Unknown", **stats)


def identify_group(H, field: Field) -> GroupId:
    """Match a closed element set against the possible generated-group types."""
    _verify_closed(field, H)
    plane = _plane_for(field)
    elems = list(_element_iter(H))
    orders = _conic_perm_orders(H, plane)
    order = len(elems)
    n_inv = sum(1 for o in orders if o == 2)
    max_ord = max(orders)

    def is_dihedral():
        return _is_dihedral(order, orders, elems, field)

    def c2xd():
        return any(_quotient_is_dihedral(elems, z, field)
                   for z in _central_involutions(elems, orders, field))

    return _identify_from_stats(order, n_inv, max_ord, field.p, field.n,
                                is_dihedral, c2xd)

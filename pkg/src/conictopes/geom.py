"""Rank-3 coset geometries and the hypertope criteria.

For involutions a0, a1, a2 generating H, the coset geometry has one type per
index i with elements the right cosets of H_i = <a_j, a_k> ({i,j,k} all of
{0,1,2}), two cosets incident when they intersect.  Two independent routes
decide whether the geometry is a regular hypertope:

* check_hypertope_criteria evaluates the group-theoretic criteria on the
  H_i alone (no closure of H is ever needed):
    - intersection property  <=>  H_i & H_j == {e, a_k} for all three pairs,
    - flag-trans. <=>  (H_i&H_j)(H_i&H_k) == H_i & (H_j*H_k) for every one
                       of the six ordered index choices,
    - residual connectedness <=> H_J = <H_{J+{i}} : i outside J> for every
                       J with at least two indices missing,
    - thin        <=>  intersection property and flag-transitive.
  The last conjunction is what geometric thinness amounts to here: with the
  small intersections, flag-transitivity makes every rank-1 residue have
  exactly two elements, while a thin residually connected geometry has a
  connected chamber system, so all chambers lie in the orbit of the base
  chamber and the action is chamber-transitive.  The intersection condition
  alone (the rank-2 intersection property of a C-group) does not count
  residues when flag-transitivity fails, and the geometry is then never
  thin; both bits are reported.
* graph_oracle answers the same three questions directly on the incidence
  graph of a built coset geometry: residue sizes for thinness, connectivity
  of the graph and of every rank-2 residue, and chamber-transitivity of the
  right-translation action for flag-transitivity.

The two routes are kept strictly separate so one can audit the other.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from conictopes.grp import ElementSet, closure
from conictopes.perspectivity import IDENTITY, Involution, mat_mul, product_order
from conictopes.plane import Plane


class SubgroupNotContained(ValueError):
    """build_coset_geometry needs H_i subsets of H."""


@dataclass
class CriteriaReport:
    thin: bool
    residually_connected: bool
    flag_transitive: bool
    intersection_property: bool | None = None  # group route only
    witnesses: dict = dc_field(default_factory=dict)

    @property
    def hypertope(self) -> bool:
        return self.thin and self.residually_connected and self.flag_transitive

    def bits(self) -> tuple[bool, bool, bool]:
        return (self.thin, self.residually_connected, self.flag_transitive)


def coset_criteria(e, mul, gens, subgroups, sp_intersect=None) -> CriteriaReport:
    """Group-criteria evaluation, generic over the element representation.

    e is the identity, mul a binary product, gens = (a0, a1, a2), and
    subgroups = (H0, H1, H2) the closures <a_j, a_k> as sets.  The optional
    sp_intersect(Hj, Hk, Hi) must return H_i & (H_j * H_k) and exists so a
    table-driven caller can vectorize the one expensive step.
    """
    Hs = [frozenset(S) for S in subgroups]
    pairs = {(i, j): Hs[i] & Hs[j] for i in range(3) for j in range(3) if i != j}
    witnesses = {}

    ip = True
    for i, j in ((0, 1), (0, 2), (1, 2)):
        k = 3 - i - j
        inter = pairs[(i, j)]
        if inter != frozenset((e, gens[k])):
            ip = False
            witnesses.setdefault("thin", []).append(
                {"pair": (i, j), "order": len(inter),
                 "residue_size": len(inter) // 2})

    rc = True
    for i in range(3):
        j, k = [x for x in range(3) if x != i]
        gen_set = pairs[(i, j)] | pairs[(i, k)]
        if gens[j] in gen_set and gens[k] in gen_set:
            continue  # <a_j, a_k> = H_i by construction
        generated = _generic_closure(e, mul, gen_set)
        if generated != Hs[i]:
            rc = False
            witnesses.setdefault("rc", []).append(
                {"index": i, "generated": len(generated), "subgroup": len(Hs[i])})

    ft = True
    for i in range(3):
        j, k = [x for x in range(3) if x != i]
        for (jj, kk) in ((j, k), (k, j)):
            if sp_intersect is not None:
                lhs = frozenset(sp_intersect(Hs[jj], Hs[kk], Hs[i]))
            else:
                prod = {mul(x, y) for x in Hs[jj] for y in Hs[kk]}
                lhs = Hs[i] & prod
            rhs = {mul(x, y) for x in pairs[(i, jj)] for y in pairs[(i, kk)]}
            if lhs != rhs:
                ft = False
                sample = next(iter(lhs.symmetric_difference(rhs)))
                witnesses.setdefault("ft", []).append(
                    {"triple": (i, jj, kk), "lhs": len(lhs), "rhs": len(rhs),
                     "element": sample})
    return CriteriaReport(thin=ip and ft, residually_connected=rc,
                          flag_transitive=ft, intersection_property=ip,
                          witnesses=witnesses)


def _generic_closure(e, mul, seed):
    elems = {e} | set(seed)
    frontier = list(elems)
    gens = list(seed)
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = mul(x, g)
                if y not in elems:
                    elems.add(y)
                    new.append(y)
        frontier = new
    return frozenset(elems)


def check_hypertope_criteria(plane: Plane, a0: Involution, a1: Involution,
                             a2: Involution) -> CriteriaReport:
    """Decide thin / residually connected / flag-transitive from the H_i alone."""
    F = plane.field
    gens = (a0.matrix, a1.matrix, a2.matrix)
    Hs = []
    for i in range(3):
        j, k = [x for x in range(3) if x != i]
        Hs.append(closure(F, (gens[j], gens[k]), cap=8 * (plane.q + 2)).eset)
    return coset_criteria(IDENTITY, lambda x, y: mat_mul(F, x, y), gens, Hs)


# -- the geometry itself ------------------------------------------------------


@dataclass
class CosetGeometry:
    """Typed coset elements with incidence, over element ids of H.

    cosets[i] lists the type-i cosets as sorted tuples of indices into
    H.elements; incidence holds (type_i, idx_i, type_j, idx_j) with i < j.
    """

    types: tuple = (0, 1, 2)
    cosets: list = dc_field(default_factory=list)
    incidence: list = dc_field(default_factory=list)

    @property
    def counts(self):
        return [len(c) for c in self.cosets]

    def to_json_obj(self) -> dict:
        return {"types": list(self.types), "counts": self.counts,
                "incidence": [list(t) for t in self.incidence]}

    def to_dot(self) -> str:
        shapes = ("circle", "box", "diamond")
        out = ["graph coset_geometry {"]
        for t in self.types:
            for idx in range(len(self.cosets[t])):
                out.append(f'  "t{t}_{idx}" [shape={shapes[t]}];')
        for (ti, ci, tj, cj) in self.incidence:
            out.append(f'  "t{ti}_{ci}" -- "t{tj}_{cj}";')
        out.append("}")
        return "\n".join(out) + "\n"


def build_coset_geometry(field, H: ElementSet, H0, H1, H2) -> CosetGeometry:
    """Full typed coset lists and incidence pairs for Gamma(H, (H0, H1, H2))."""
    subgroup_sets = []
    for Hi in (H0, H1, H2):
        s = Hi.eset if isinstance(Hi, ElementSet) else frozenset(Hi)
        if not s <= H.eset:
            raise SubgroupNotContained("H_i must be a subset of H")
        subgroup_sets.append(s)
    index = {m: i for i, m in enumerate(H.elements)}
    cosets = []
    coset_of = []  # per type: element index -> coset index
    for s in subgroup_sets:
        assignment = {}
        classes = {}
        for g in H.elements:
            key = min(index[mat_mul(field, h, g)] for h in s)
            assignment[index[g]] = key
            classes.setdefault(key, set()).add(index[g])
        ordered = sorted(classes)
        remap = {key: i for i, key in enumerate(ordered)}
        cosets.append([tuple(sorted(classes[key])) for key in ordered])
        coset_of.append([remap[assignment[i]] for i in range(len(H.elements))])
    incidence = set()
    for gi in range(len(H.elements)):
        for ti in range(3):
            for tj in range(ti + 1, 3):
                incidence.add((ti, coset_of[ti][gi], tj, coset_of[tj][gi]))
    return CosetGeometry(cosets=cosets, incidence=sorted(incidence))


def graph_oracle(geometry: CosetGeometry, H: ElementSet) -> CriteriaReport:
    """Independent incidence-graph verdicts on the same three criteria."""
    counts = geometry.counts
    # neighbour bitmasks per type pair
    nbr = {(ti, tj): [0] * counts[ti] for ti in range(3) for tj in range(3) if ti != tj}
    for (ti, ci, tj, cj) in geometry.incidence:
        nbr[(ti, tj)][ci] |= 1 << cj
        nbr[(tj, ti)][cj] |= 1 << ci
    witnesses = {}

    thin = True
    for (ti, ci, tj, cj) in geometry.incidence:
        tk = 3 - ti - tj
        common = nbr[(ti, tk)][ci] & nbr[(tj, tk)][cj]
        size = common.bit_count()
        if size != 2:
            thin = False
            if len(witnesses.setdefault("thin", [])) < 3:
                witnesses["thin"].append(
                    {"flag": (ti, ci, tj, cj), "residue_size": size})

    # connectivity of the whole incidence graph
    total = sum(counts)
    offsets = [0, counts[0], counts[0] + counts[1]]
    adj = [set() for _ in range(total)]
    for (ti, ci, tj, cj) in geometry.incidence:
        u, v = offsets[ti] + ci, offsets[tj] + cj
        adj[u].add(v)
        adj[v].add(u)
    rc = _connected(adj, range(total))
    if not rc:
        witnesses.setdefault("rc", []).append({"scope": "incidence graph"})
    # rank-2 residues: the residue of each single element must be connected
    if rc:
        inc_pairs = {(ti, tj): set() for ti in range(3) for tj in range(3) if ti != tj}
        for (ti, ci, tj, cj) in geometry.incidence:
            inc_pairs[(ti, tj)].add((ci, cj))
            inc_pairs[(tj, ti)].add((cj, ci))
        for ti in range(3):
            tj, tk = [x for x in range(3) if x != ti]
            for ci in range(counts[ti]):
                side_j = [cj for cj in range(counts[tj])
                          if nbr[(ti, tj)][ci] >> cj & 1]
                side_k = [ck for ck in range(counts[tk])
                          if nbr[(ti, tk)][ci] >> ck & 1]
                ladj = {("j", c): set() for c in side_j}
                ladj.update({("k", c): set() for c in side_k})
                for cj in side_j:
                    for ck in side_k:
                        if (cj, ck) in inc_pairs[(tj, tk)]:
                            ladj[("j", cj)].add(("k", ck))
                            ladj[("k", ck)].add(("j", cj))
                if ladj and not _connected(ladj, ladj.keys()):
                    rc = False
                    witnesses.setdefault("rc", []).append(
                        {"scope": "residue", "element": (ti, ci)})

    # flag-transitivity: chambers versus the orbit of the base chamber
    chambers = 0
    for (ti, ci, tj, cj) in geometry.incidence:
        if (ti, tj) != (0, 1):
            continue
        chambers += (nbr[(0, 2)][ci] & nbr[(1, 2)][cj]).bit_count()
    coset_of = []
    for t in range(3):
        lookup = {}
        for cidx, coset in enumerate(geometry.cosets[t]):
            for eid in coset:
                lookup[eid] = cidx
        coset_of.append(lookup)
    orbit = {tuple(coset_of[t][eid] for t in range(3))
             for eid in range(len(H.elements))}
    ft = chambers == len(orbit)
    if not ft:
        witnesses.setdefault("ft", []).append(
            {"chambers": chambers, "base_orbit": len(orbit)})
    return CriteriaReport(thin=thin, residually_connected=rc,
                          flag_transitive=ft, witnesses=witnesses)


def _connected(adj, vertices) -> bool:
    verts = list(vertices)
    if not verts:
        return True
    seen = {verts[0]}
    stack = [verts[0]]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == len(verts)


# -- Buekenhout diagram data ---------------------------------------------------


@dataclass
class DiagramReport:
    edge_labels: dict          # {(i, j): order of a_i * a_j}
    linear: bool               # some label equals 2
    element_counts: list | None = None
    residue_params: dict | None = None  # {(i, j): (d_P, g, d_L)}

    def describe(self) -> dict:
        out = {"edge_labels": {f"{i}{j}": v for (i, j), v in self.edge_labels.items()},
               "linear": self.linear}
        if self.element_counts is not None:
            out["element_counts"] = self.element_counts
        if self.residue_params is not None:
            out["residue_params"] = {f"{i}{j}": list(v)
                                     for (i, j), v in self.residue_params.items()}
        return out


def diagram(plane: Plane, a0: Involution, a1: Involution, a2: Involution,
            geometry: CosetGeometry | None = None) -> DiagramReport:
    """Edge labels from product orders; residue parameters from the geometry.

    When a geometry is supplied, the (d_P, gonality, d_L) of each rank-2
    residue type {i, j} is measured on the residue of the base type-k coset
    by bipartite BFS; d_P is taken from the lower-type side.
    """
    F = plane.field
    gens = (a0, a1, a2)
    labels = {}
    for i in range(3):
        for j in range(i + 1, 3):
            labels[(i, j)] = product_order(F, gens[i], gens[j])
    report = DiagramReport(edge_labels=labels,
                           linear=any(v == 2 for v in labels.values()))
    if geometry is None:
        return report
    report.element_counts = geometry.counts
    nbr = {(ti, tj): [set() for _ in range(geometry.counts[ti])]
           for ti in range(3) for tj in range(3) if ti != tj}
    for (ti, ci, tj, cj) in geometry.incidence:
        nbr[(ti, tj)][ci].add(cj)
        nbr[(tj, ti)][cj].add(ci)
    params = {}
    for tk in range(3):
        ti, tj = [x for x in range(3) if x != tk]
        base = 0  # the coset H_k itself (contains the identity)
        side_i = sorted(nbr[(tk, ti)][base])
        side_j = sorted(nbr[(tk, tj)][base])
        verts = [(ti, c) for c in side_i] + [(tj, c) for c in side_j]
        vset = set(verts)
        adj = {v: set() for v in verts}
        for ci in side_i:
            for cj in nbr[(ti, tj)][ci]:
                if (tj, cj) in vset:
                    adj[(ti, ci)].add((tj, cj))
                    adj[(tj, cj)].add((ti, ci))
        d_p = max((_ecc(adj, (ti, c)) for c in side_i), default=0)
        d_l = max((_ecc(adj, (tj, c)) for c in side_j), default=0)
        params[(ti, tj)] = (d_p, _girth(adj) // 2, d_l)
    report.residue_params = params
    return report


def _ecc(adj, start) -> int:
    dist = {start: 0}
    frontier = [start]
    d = 0
    while frontier:
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return max(dist.values())


def _girth(adj) -> int:
    best = 0
    for start in adj:
        dist = {start: 0}
        parent = {start: None}
        frontier = [start]
        local = None
        while frontier and local is None:
            nxt = []
            for u in frontier:
                for v in adj[u]:
                    if v not in dist:
                        dist[v] = dist[u] + 1
                        parent[v] = u
                        nxt.append(v)
                    elif parent[u] != v:
                        cycle = dist[u] + dist[v] + 1
                        local = cycle if local is None else min(local, cycle)
            frontier = nxt
        if local is not None and (best == 0 or local < best):
            best = local
    return best

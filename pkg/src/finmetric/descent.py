"""Local submetries, lsm coverings and gluing along them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .core import (
    FinSpace,
    Morphism,
    _UnionFind,
    check_morphism,
    compose,
    fiber_product,
    pair_label,
    tagged_label,
    triple_label,
    validate_space,
)
from .errors import MetricError
from .submetry import is_submetry
from .values import INF, ZERO, ExtValue, format_value


def _require_metric(X: FinSpace, what: str) -> None:
    if not X.space_class.is_metric_space:
        raise MetricError("E_NOT_METRIC", f"{what} is not a metric space")


def _ball(X: FinSpace, x: str, r: ExtValue) -> set[str]:
    return {y for y in X.points if X.dist(x, y) < r}


def _first_failure(f: Morphism, x: str) -> ExtValue:
    """Infimum of the radii ``s > 0`` at which ``f(ball(x, s)) ≠ ball(f x, s)``."""
    X, Y = f.dom, f.cod
    fx = f.map[x]
    cuts = sorted(
        {v for v in (X.dist(x, y) for y in X.points) if v is not INF}
        | {v for v in (Y.dist(fx, z) for z in Y.points) if v is not INF}
    )
    # balls are constant on (cuts[k], cuts[k+1]]; probe each interval at its right end
    for k, lo in enumerate(cuts):
        probe = cuts[k + 1] if k + 1 < len(cuts) else lo + 1
        if {f.map[y] for y in _ball(X, x, probe)} != _ball(Y, fx, probe):
            return lo
    return INF


def local_submetry_radius(f: Morphism, x: str) -> ExtValue:
    """Largest ``r`` such that ``f`` maps ``s``-balls onto ``s``-balls near ``x``.

    The condition is: for every ``x'`` with ``d(x, x') < r`` and every
    ``0 < s < r - d(x, x')``, ``f(ball(x', s)) = ball(f x', s)``.
    """
    _require_metric(f.dom, "domain")
    _require_metric(f.cod, "codomain")
    X = f.dom
    reach = {y: X.dist(x, y) + _first_failure(f, y) for y in X.points}

    def feasible(r: ExtValue) -> bool:
        return all(r <= reach[y] for y in X.points if X.dist(x, y) < r)

    candidates = set(reach.values()) | {X.dist(x, y) for y in X.points} | {INF}
    return max(r for r in candidates if r > ZERO and feasible(r))


@dataclass(frozen=True)
class Covering:
    base: FinSpace
    legs: tuple[Morphism, ...]


def _nearest_table(leg: Morphism) -> dict[str, dict[str, ExtValue]]:
    U = leg.dom
    fibers = leg.fibers()
    return {
        u: {x: min((U.dist(u, w) for w in fib), default=INF) for x, fib in fibers.items()}
        for u in U.points
    }


def lsm_covering_check(base: FinSpace, legs: Sequence[Morphism]) -> Covering:
    """Verify the exact three-point lifting condition over every ordered triple.

    Failure reports the lexicographically least unliftable triple together with
    the smallest achievable excess over the base distances.
    """
    legs = tuple(legs)
    if not legs:
        raise MetricError("E_TRIPLE_UNLIFTABLE", "a covering needs at least one leg", triple=None, deficit="inf")
    for i, leg in enumerate(legs):
        if leg.cod != base:
            raise MetricError("E_CODOMAIN_MISMATCH", "leg does not map to the base", leg=i)
    _require_metric(base, "base")
    for i, leg in enumerate(legs):
        _require_metric(leg.dom, f"leg {i}")
        check_morphism(leg.dom, leg.cod, leg.map)
    near = [_nearest_table(leg) for leg in legs]
    fibers = [leg.fibers() for leg in legs]
    for x1, x2, x3 in itertools.product(base.points, repeat=3):
        d12, d23 = base.dist(x1, x2), base.dist(x2, x3)
        best: ExtValue = INF
        for i in range(len(legs)):
            for u2 in fibers[i][x2]:
                e1, e3 = near[i][u2][x1], near[i][u2][x3]
                slack = INF if INF in (e1, e3) else max(e1 - d12, e3 - d23)
                if slack < best:
                    best = slack
            if best == ZERO:
                break
        if best != ZERO:
            raise MetricError(
                "E_TRIPLE_UNLIFTABLE",
                "no leg lifts this triple isometrically",
                triple=[x1, x2, x3],
                deficit=format_value(best),
            )
    return Covering(base, legs)


def is_covering(base: FinSpace, legs: Sequence[Morphism]) -> bool:
    try:
        lsm_covering_check(base, legs)
    except MetricError as exc:
        if exc.code == "E_TRIPLE_UNLIFTABLE":
            return False
        raise
    return True


def covering_from_submetry(f: Morphism, r: ExtValue) -> Covering:
    """Restrictions of ``f`` to unions of three open ``r``-balls."""
    if not (r > ZERO):
        raise MetricError("E_DEGENERATE_RADIUS", "radius must be positive")
    if not is_submetry(f):
        raise MetricError("E_NOT_SUBMETRY", "covering_from_submetry needs a submetry")
    X = f.dom
    balls = {x: _ball(X, x, r) for x in X.points}
    seen: list[frozenset[str]] = []
    for x1, x2, x3 in itertools.product(X.points, repeat=3):
        U = frozenset(balls[x1] | balls[x2] | balls[x3])
        if U not in seen:
            seen.append(U)
    return lsm_covering_check(f.cod, [f.restrict(U) for U in seen])


def covering_pullback(cov: Covering, g: Morphism) -> Covering:
    """Legs ``U_i ×_X Y → Y``; legs with empty pullback are dropped."""
    if g.cod != cov.base:
        raise MetricError("E_CODOMAIN_MISMATCH", "pullback map does not land in the covered space")
    legs = []
    for leg in cov.legs:
        try:
            _, _, to_y = fiber_product(leg, g)
        except MetricError as exc:
            if exc.code == "E_EMPTY":
                continue
            raise
        legs.append(to_y)
    return lsm_covering_check(g.dom, legs)


def covering_compose(cov: Covering, refinements: Sequence[Covering]) -> Covering:
    if len(refinements) != len(cov.legs):
        raise MetricError("E_ARITY", "need one refinement per leg")
    legs = []
    for i, (leg, ref) in enumerate(zip(cov.legs, refinements)):
        if ref.base != leg.dom:
            raise MetricError("E_CODOMAIN_MISMATCH", "refinement does not cover the leg's domain", leg=i)
        legs.extend(compose(leg, g) for g in ref.legs)
    return lsm_covering_check(cov.base, legs)


def glue_morphisms(cov: Covering, pieces: Sequence[Morphism]) -> Morphism:
    """The unique ``g: T → X`` with ``g ∘ f_i = g_i`` for compatible pieces."""
    if len(pieces) != len(cov.legs):
        raise MetricError("E_ARITY", "need one piece per leg")
    try:
        lsm_covering_check(cov.base, cov.legs)
    except MetricError as exc:
        raise MetricError("E_NOT_COVERING", f"not an lsm covering ({exc.code})", **exc.details) from exc
    targets = {p.cod for p in pieces}
    if len(targets) != 1:
        raise MetricError("E_CODOMAIN_MISMATCH", "pieces have different codomains")
    X = pieces[0].cod
    for i, (leg, piece) in enumerate(zip(cov.legs, pieces)):
        if piece.dom != leg.dom:
            raise MetricError("E_CODOMAIN_MISMATCH", "piece domain differs from leg domain", leg=i)
        check_morphism(piece.dom, piece.cod, piece.map)
    n = len(pieces)
    for i in range(n):
        for j in range(i, n):
            fi, fj = cov.legs[i], cov.legs[j]
            for u in fi.dom.points:
                for v in fj.dom.points:
                    if fi.map[u] == fj.map[v] and pieces[i].map[u] != pieces[j].map[v]:
                        raise MetricError(
                            "E_INCOMPATIBLE",
                            "pieces disagree on an overlap",
                            pair=[i, j],
                            points=[u, v],
                            base_point=fi.map[u],
                        )
    mapping: dict[str, str] = {}
    for leg, piece in zip(cov.legs, pieces):
        for u in leg.dom.points:
            mapping.setdefault(leg.map[u], piece.map[u])
    g = check_morphism(cov.base, X, mapping)
    for leg, piece in zip(cov.legs, pieces):
        assert compose(g, leg) == piece
    return g


@dataclass(frozen=True)
class DescentDatum:
    """Charts ``p_i: P_i → U_i`` over the legs and transitions over overlaps.

    ``transitions[(i, j)]`` maps labels ``"(a|u|v)"`` of
    ``P_i ×_{U_i} (U_i ×_X U_j)`` to labels ``"(b|u|v)"`` of
    ``P_j ×_{U_j} (U_i ×_X U_j)``.
    """

    covering: Covering
    charts: tuple[Morphism, ...]
    transitions: Mapping[tuple[int, int], Mapping[str, str]]

    @property
    def base(self) -> FinSpace:
        return self.covering.base


def overlap_points(datum: DescentDatum, i: int, j: int, side: int) -> list[tuple[str, str, str]]:
    """Triples ``(a, u, v)`` with ``a`` in chart ``i`` (side 0) or ``j`` (side 1)."""
    fi, fj = datum.covering.legs[i], datum.covering.legs[j]
    chart = datum.charts[i if side == 0 else j]
    out = []
    for u in fi.dom.points:
        for v in fj.dom.points:
            if fi.map[u] != fj.map[v]:
                continue
            over = u if side == 0 else v
            for a in chart.fiber(over):
                out.append((a, u, v))
    return out


def _overlap_dist(datum: DescentDatum, i: int, j: int, side: int, s, t) -> ExtValue:
    Ui, Uj = datum.covering.legs[i].dom, datum.covering.legs[j].dom
    P = datum.charts[i if side == 0 else j].dom
    return max(P.dist(s[0], t[0]), Ui.dist(s[1], t[1]), Uj.dist(s[2], t[2]))


def _check_shapes(datum: DescentDatum) -> None:
    legs = datum.covering.legs
    if len(datum.charts) != len(legs):
        raise MetricError("E_ARITY", "need one chart per leg")
    for i, (leg, chart) in enumerate(zip(legs, datum.charts)):
        if chart.cod != leg.dom:
            raise MetricError("E_CODOMAIN_MISMATCH", "chart does not map to its leg's domain", chart=i)
        check_morphism(chart.dom, chart.cod, chart.map)
    for i, j in datum.transitions:
        if not (0 <= i < len(legs) and 0 <= j < len(legs)):
            raise MetricError("E_NOT_OVER_OVERLAP", "transition index out of range", pair=[i, j])


def normalized_transitions(datum: DescentDatum) -> dict[tuple[int, int], dict[tuple, tuple]]:
    """Transitions as maps between ``(a, u, v)`` triples; missing pairs filled in.

    A missing ``(i, i)`` is the identity when ``U_i → X`` is injective, a
    missing pair with empty overlap is empty, and anything else is an error.
    """
    _check_shapes(datum)
    n = len(datum.charts)
    out: dict[tuple[int, int], dict[tuple, tuple]] = {}
    for i, j in itertools.product(range(n), repeat=2):
        dom = overlap_points(datum, i, j, 0)
        cod = overlap_points(datum, i, j, 1)
        raw = datum.transitions.get((i, j))
        if raw is None:
            if i == j and all(t[1] == t[2] for t in dom):
                out[(i, j)] = {t: t for t in dom}
                continue
            if not dom and not cod:
                out[(i, j)] = {}
                continue
            raise MetricError("E_MISSING_TRANSITION", "no transition given for a nonempty overlap", pair=[i, j])
        dom_by = {triple_label(*t): t for t in dom}
        cod_by = {triple_label(*t): t for t in cod}
        if set(raw) != set(dom_by):
            raise MetricError(
                "E_NOT_OVER_OVERLAP",
                "transition domain is not the overlap fiber product",
                pair=[i, j],
                missing=sorted(set(dom_by) - set(raw)),
                extra=sorted(set(raw) - set(dom_by)),
            )
        phi = {}
        for key, val in raw.items():
            s = dom_by[key]
            t = cod_by.get(val)
            if t is None or t[1:] != s[1:]:
                raise MetricError("E_NOT_OVER_OVERLAP", "transition does not preserve the overlap point", pair=[i, j], point=key)
            phi[s] = t
        out[(i, j)] = phi
    return out


def check_cocycle(datum: DescentDatum) -> dict[tuple[int, int], dict[tuple, tuple]]:
    """Isometry over each overlap, identity over the diagonal of ``U_i ×_X U_i``, and the triple-overlap identity."""
    phis = normalized_transitions(datum)
    n = len(datum.charts)
    for (i, j), phi in phis.items():
        cod = overlap_points(datum, i, j, 1)
        if sorted(phi.values()) != sorted(cod):
            raise MetricError("E_NOT_ISOMETRY", "transition is not a bijection", pair=[i, j])
        for s, t in itertools.combinations(phi, 2):
            if _overlap_dist(datum, i, j, 0, s, t) != _overlap_dist(datum, i, j, 1, phi[s], phi[t]):
                raise MetricError(
                    "E_NOT_ISOMETRY",
                    "transition changes a distance",
                    pair=[i, j],
                    points=[triple_label(*s), triple_label(*t)],
                )
    for i in range(n):
        for s, t in phis[(i, i)].items():
            if s[1] == s[2] and s != t:
                raise MetricError("E_COCYCLE", "diagonal transition is not the identity", triple=[i, i, i], point=triple_label(*s))
    legs = datum.covering.legs
    for i, j, k in itertools.product(range(n), repeat=3):
        fi, fj, fk = legs[i], legs[j], legs[k]
        for u in fi.dom.points:
            x = fi.map[u]
            for v in fj.fiber(x):
                for w in fk.fiber(x):
                    for a in datum.charts[i].fiber(u):
                        b = phis[(i, j)][(a, u, v)][0]
                        c = phis[(j, k)][(b, v, w)][0]
                        c2 = phis[(i, k)][(a, u, w)][0]
                        if c != c2:
                            raise MetricError(
                                "E_COCYCLE",
                                "phi_jk ∘ phi_ij ≠ phi_ik on a triple overlap",
                                triple=[i, j, k],
                                point=[a, u, v, w],
                                composite=c,
                                direct=c2,
                            )
    return phis


@dataclass(frozen=True)
class GluedSpace:
    total: FinSpace
    projection: Morphism
    chart_maps: tuple[Morphism, ...]
    chart_isos: tuple[Morphism, ...]
    chart_pullbacks: tuple[FinSpace, ...] = field(default=())


def descent_identifications(datum: DescentDatum, phis=None) -> list[tuple[tuple[int, str], tuple[int, str]]]:
    phis = phis if phis is not None else normalized_transitions(datum)
    return [((i, s[0]), (j, t[0])) for (i, j), phi in sorted(phis.items()) for s, t in sorted(phi.items())]


def glue_descent(datum: DescentDatum) -> GluedSpace:
    """Effective descent: glue the charts into ``p: P → X``.

    ``d_P`` is the minimum of chart distances over representatives sharing a
    single chart.  Points are named ``"i:label"`` after their least
    ``(chart, label)`` representative.
    """
    lsm_covering_check(datum.base, datum.covering.legs)
    phis = check_cocycle(datum)
    legs, charts = datum.covering.legs, datum.charts
    nodes = [(i, a) for i, c in enumerate(charts) for a in c.dom.points]
    pos = {node: k for k, node in enumerate(nodes)}
    uf = _UnionFind(len(nodes))
    for left, right in descent_identifications(datum, phis):
        uf.union(pos[left], pos[right])
    classes: dict[int, list[tuple[int, str]]] = {}
    for k, node in enumerate(nodes):
        classes.setdefault(uf.find(k), []).append(node)

    def base_of(node):
        i, a = node
        return legs[i].map[charts[i].map[a]]

    for members in classes.values():
        for (i, a), (j, b) in itertools.combinations(members, 2):
            ok = base_of((i, a)) == base_of((j, b))
            if ok:
                u, v = charts[i].map[a], charts[j].map[b]
                ok = phis[(i, j)].get((a, u, v), (None,))[0] == b
            if not ok:
                raise MetricError("E_COCYCLE", "gluing relation is not transitive", points=[[i, a], [j, b]])

    roots = sorted(classes)
    name = {r: tagged_label(*nodes[r]) for r in roots}
    cls_of = {node: name[uf.find(pos[node])] for node in nodes}
    per_chart: list[dict[str, list[str]]] = [{} for _ in charts]
    for (i, a), c in cls_of.items():
        per_chart[i].setdefault(c, []).append(a)
    labels = [name[r] for r in roots]

    def dist(c0: str, c1: str) -> ExtValue:
        best: ExtValue = INF
        for i, chart in enumerate(charts):
            A0, A1 = per_chart[i].get(c0), per_chart[i].get(c1)
            if A0 and A1:
                for a0 in A0:
                    for a1 in A1:
                        v = chart.dom.dist(a0, a1)
                        if v < best:
                            best = v
        return best

    matrix = [[ZERO if a == b else dist(a, b) for b in labels] for a in labels]
    try:
        P = validate_space(labels, matrix)
    except MetricError as exc:
        raise MetricError(
            "E_TRIANGLE_VIOLATION",
            "glued distance violates the triangle inequality; the covering is not an lsm covering",
            violations=exc.violations,
        ) from exc
    p = check_morphism(P, datum.base, {name[r]: base_of(nodes[r]) for r in roots})
    gmaps = tuple(Morphism(c.dom, P, {a: cls_of[(i, a)] for a in c.dom.points}) for i, c in enumerate(charts))
    isos, pulls = [], []
    for i, (leg, chart) in enumerate(zip(legs, charts)):
        PU, _, _ = fiber_product(p, leg)
        iso = {a: pair_label(cls_of[(i, a)], chart.map[a]) for a in chart.dom.points}
        if sorted(iso.values()) != list(PU.points):
            raise MetricError("E_TRIANGLE_VIOLATION", "chart is not in bijection with its pullback", chart=i)
        for a, b in itertools.combinations(chart.dom.points, 2):
            if chart.dom.dist(a, b) != PU.dist(iso[a], iso[b]):
                raise MetricError("E_TRIANGLE_VIOLATION", "chart is not isometric to its pullback", chart=i, points=[a, b])
        isos.append(Morphism(chart.dom, PU, iso))
        pulls.append(PU)
    if all(c.dom.space_class.is_metric for c in charts):
        assert P.space_class.is_metric
    if all(c.dom.space_class.is_pseudo for c in charts):
        assert P.space_class.is_pseudo
    return GluedSpace(P, p, gmaps, tuple(isos), tuple(pulls))


def descent_datum_from_family(q: Morphism, cov: Covering) -> DescentDatum:
    """Pull ``q: Q → X`` back to every leg, with the canonical transitions."""
    charts = []
    for leg in cov.legs:
        _, _, to_u = fiber_product(q, leg)
        charts.append(to_u)
    transitions: dict[tuple[int, int], dict[str, str]] = {}
    n = len(charts)
    for i, j in itertools.product(range(n), repeat=2):
        fi, fj = cov.legs[i], cov.legs[j]
        phi = {}
        for u in fi.dom.points:
            for v in fj.fiber(fi.map[u]):
                for x in q.fiber(fi.map[u]):
                    phi[triple_label(pair_label(x, u), u, v)] = triple_label(pair_label(x, v), u, v)
        if phi:
            transitions[(i, j)] = phi
    return DescentDatum(cov, tuple(charts), transitions)

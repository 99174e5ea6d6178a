"""Finite extended pseudometric spaces, 1-Lipschitz maps, limits and colimits."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import MetricError
from .values import INF, ZERO, BadValue, ExtValue, format_value, to_value


def pair_label(a: str, b: str) -> str:
    return f"({a},{b})"


def triple_label(p: str, u: str, v: str) -> str:
    return f"({p}|{u}|{v})"


def tagged_label(k: int, a: str) -> str:
    return f"{k}:{a}"


@dataclass(frozen=True)
class SpaceClass:
    is_metric: bool  # no zero off-diagonal entry
    is_pseudo: bool  # no infinite entry

    @property
    def is_metric_space(self) -> bool:
        return self.is_metric and self.is_pseudo


class FinSpace:
    """A finite point set with an extended-value distance matrix.

    Points are kept sorted lexicographically; the constructor reorders the
    matrix to match.  No metric axioms are checked here, use
    :func:`validate_space` for that.
    """

    __slots__ = ("points", "d", "_index")

    def __init__(self, points: Sequence[str], d: Sequence[Sequence[ExtValue]]):
        pts = list(points)
        if len(pts) == 0:
            raise MetricError("E_EMPTY", "a space needs at least one point")
        if len(set(pts)) != len(pts):
            raise MetricError("E_DUPLICATE_POINT", "point labels must be distinct")
        if len(d) != len(pts) or any(len(row) != len(pts) for row in d):
            raise MetricError("E_SHAPE", "distance matrix must be square and match the point count")
        order = sorted(range(len(pts)), key=lambda i: pts[i])
        self.points: tuple[str, ...] = tuple(pts[i] for i in order)
        self.d: tuple[tuple[ExtValue, ...], ...] = tuple(tuple(d[i][j] for j in order) for i in order)
        self._index = {p: i for i, p in enumerate(self.points)}

    @classmethod
    def from_function(cls, points: Iterable[str], dist) -> "FinSpace":
        pts = list(points)
        return cls(pts, [[dist(a, b) for b in pts] for a in pts])

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, label: object) -> bool:
        return label in self._index

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FinSpace) and self.points == other.points and self.d == other.d

    def __hash__(self) -> int:
        return hash((self.points, self.d))

    def __repr__(self) -> str:
        rows = "; ".join(" ".join(format_value(v) for v in row) for row in self.d)
        return f"FinSpace({list(self.points)}, [{rows}])"

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise MetricError("E_UNKNOWN_POINT", f"unknown point {label!r}", point=label) from None

    def dist(self, a: str, b: str) -> ExtValue:
        return self.d[self._index[a]][self._index[b]]

    @property
    def space_class(self) -> SpaceClass:
        n = len(self.points)
        off = [self.d[i][j] for i in range(n) for j in range(n) if i != j]
        return SpaceClass(is_metric=all(v != ZERO for v in off), is_pseudo=all(v is not INF for v in off))

    def diameter(self) -> ExtValue:
        return max(max(row) for row in self.d)

    def values(self) -> set[ExtValue]:
        return {v for row in self.d for v in row}

    def subspace(self, labels: Iterable[str]) -> "FinSpace":
        keep = sorted(set(labels))
        idx = [self.index(p) for p in keep]
        return FinSpace(keep, [[self.d[i][j] for j in idx] for i in idx])

    def relabel(self, mapping: Mapping[str, str]) -> "FinSpace":
        new = [mapping[p] for p in self.points]
        return FinSpace(new, self.d)

    def scaled(self, factor: Fraction) -> "FinSpace":
        return FinSpace(self.points, [[v * factor if v is not INF else INF for v in row] for row in self.d])


class Morphism:
    """A total map between finite spaces.  Use :func:`check_morphism` to certify it."""

    __slots__ = ("dom", "cod", "map")

    def __init__(self, dom: FinSpace, cod: FinSpace, mapping: Mapping[str, str]):
        self.dom = dom
        self.cod = cod
        self.map: dict[str, str] = {p: mapping[p] for p in dom.points}

    def __call__(self, label: str) -> str:
        return self.map[label]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Morphism)
            and self.dom == other.dom
            and self.cod == other.cod
            and self.map == other.map
        )

    def __hash__(self) -> int:
        return hash((self.dom, self.cod, tuple(self.map.items())))

    def __repr__(self) -> str:
        return f"Morphism({self.map})"

    def image(self) -> set[str]:
        return set(self.map.values())

    def is_surjective(self) -> bool:
        return self.image() == set(self.cod.points)

    def fibers(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {b: [] for b in self.cod.points}
        for x in self.dom.points:
            out[self.map[x]].append(x)
        return out

    def fiber(self, b: str) -> list[str]:
        return [x for x in self.dom.points if self.map[x] == b]

    def restrict(self, labels: Iterable[str]) -> "Morphism":
        sub = self.dom.subspace(labels)
        return Morphism(sub, self.cod, {p: self.map[p] for p in sub.points})


@dataclass(frozen=True)
class GroupAction:
    space: FinSpace
    generators: tuple[Mapping[str, str], ...]


def point_space(label: str = "*") -> FinSpace:
    return FinSpace([label], [[ZERO]])


def two_point(r: ExtValue) -> FinSpace:
    """The two-point space ``{0, r}`` with labels ``"0"`` and ``format_value(r)``."""
    return FinSpace(["0", format_value(r)], [[ZERO, r], [r, ZERO]])


def identity(X: FinSpace) -> Morphism:
    return Morphism(X, X, {p: p for p in X.points})


def constant(X: FinSpace, Y: FinSpace, target: str) -> Morphism:
    return Morphism(X, Y, {p: target for p in X.points})


def compose(g: Morphism, f: Morphism) -> Morphism:
    """``g ∘ f``."""
    if f.cod != g.dom:
        raise MetricError("E_CODOMAIN_MISMATCH", "cannot compose: codomain of f is not the domain of g")
    return Morphism(f.dom, g.cod, {x: g.map[f.map[x]] for x in f.dom.points})


def inclusion(sub: FinSpace, X: FinSpace) -> Morphism:
    return Morphism(sub, X, {p: p for p in sub.points})


def validate_space(points: Sequence[str], matrix: Sequence[Sequence[object]]) -> FinSpace:
    """Check every extended-pseudometric axiom and build the space.

    All violations are collected; indices refer to the input order.  Triangle
    witnesses are ``(i, k, j)`` with ``d(i,k) > d(i,j) + d(j,k)``.
    """
    pts = list(points)
    n = len(pts)
    if n == 0:
        raise MetricError("E_EMPTY", "a space needs at least one point")
    if len(set(pts)) != n:
        raise MetricError("E_DUPLICATE_POINT", "point labels must be distinct")
    if len(matrix) != n or any(len(row) != n for row in matrix):
        raise MetricError("E_SHAPE", "distance matrix must be square and match the point count")
    violations: list[dict] = []
    d: list[list[ExtValue]] = []
    for i, row in enumerate(matrix):
        out = []
        for j, raw in enumerate(row):
            try:
                out.append(to_value(raw))
            except BadValue:
                violations.append({"code": "E_NEGATIVE", "i": i, "j": j, "value": str(raw)})
                out.append(ZERO)
        d.append(out)
    for i in range(n):
        if d[i][i] != ZERO:
            violations.append({"code": "E_NONZERO_DIAGONAL", "i": i, "value": format_value(d[i][i])})
    for i in range(n):
        for j in range(i + 1, n):
            if d[i][j] != d[j][i]:
                violations.append({"code": "E_ASYMMETRIC", "i": i, "j": j})
    for i in range(n):
        for k in range(n):
            if i == k:
                continue
            for j in range(n):
                if d[i][j] + d[j][k] < d[i][k]:
                    violations.append({
                        "code": "E_TRIANGLE",
                        "triple": [i, k, j],
                        "labels": [pts[i], pts[k], pts[j]],
                        "direct": format_value(d[i][k]),
                        "via": format_value(d[i][j] + d[j][k]),
                    })
    if violations:
        raise MetricError(violations[0]["code"], "not an extended pseudometric", violations=violations)
    return FinSpace(pts, d)


def check_space(X: FinSpace) -> FinSpace:
    return validate_space(X.points, X.d)


def check_morphism(dom: FinSpace, cod: FinSpace, mapping: Mapping[str, str]) -> Morphism:
    extra = sorted(set(mapping) - set(dom.points))
    missing = [p for p in dom.points if p not in mapping]
    if extra or missing:
        raise MetricError("E_UNKNOWN_POINT", "map must be total over the domain", missing=missing, extra=extra)
    bad = sorted(p for p in dom.points if mapping[p] not in cod)
    if bad:
        raise MetricError("E_UNKNOWN_POINT", "map sends points outside the codomain", points=bad)
    for a, b in itertools.combinations(dom.points, 2):
        dd = dom.dist(a, b)
        dc = cod.dist(mapping[a], mapping[b])
        if dc > dd:
            raise MetricError(
                "E_NOT_LIPSCHITZ",
                f"d({a},{b}) = {format_value(dd)} < {format_value(dc)}",
                pair=[a, b],
                dom_distance=format_value(dd),
                cod_distance=format_value(dc),
            )
    return Morphism(dom, cod, mapping)


def is_lipschitz(f: Morphism) -> bool:
    d, c = f.dom, f.cod
    return all(
        c.dist(f.map[a], f.map[b]) <= d.dist(a, b) for a, b in itertools.combinations(d.points, 2)
    )


def metric_identification(X: FinSpace) -> tuple[FinSpace, Morphism]:
    """Collapse zero-distance points; each class is named by its least label."""
    rep: dict[str, str] = {}
    for p in X.points:
        for q in X.points:
            if q in rep.values() and X.dist(p, q) == ZERO:
                rep[p] = q
                break
        else:
            rep[p] = p
    reps = sorted(set(rep.values()))
    Q = FinSpace(reps, [[X.dist(a, b) for b in reps] for a in reps])
    return Q, Morphism(X, Q, rep)


def l_infty_product(X: FinSpace, Y: FinSpace) -> tuple[FinSpace, Morphism, Morphism]:
    pts = [(x, y) for x in X.points for y in Y.points]
    labels = [pair_label(x, y) for x, y in pts]
    P = FinSpace(labels, [[max(X.dist(x, x2), Y.dist(y, y2)) for x2, y2 in pts] for x, y in pts])
    px = Morphism(P, X, {pair_label(x, y): x for x, y in pts})
    py = Morphism(P, Y, {pair_label(x, y): y for x, y in pts})
    return P, px, py


def fiber_product(f: Morphism, g: Morphism) -> tuple[FinSpace, Morphism, Morphism]:
    """``dom f ×_B dom g`` as the subspace of the sup-product over equal images."""
    if f.cod != g.cod:
        raise MetricError("E_CODOMAIN_MISMATCH", "fiber product needs a common codomain")
    X, Y = f.dom, g.dom
    pts = [(x, y) for x in X.points for y in Y.points if f.map[x] == g.map[y]]
    if not pts:
        raise MetricError("E_EMPTY", "fiber product has no points")
    labels = [pair_label(x, y) for x, y in pts]
    P = FinSpace(labels, [[max(X.dist(x, x2), Y.dist(y, y2)) for x2, y2 in pts] for x, y in pts])
    px = Morphism(P, X, {pair_label(x, y): x for x, y in pts})
    py = Morphism(P, Y, {pair_label(x, y): y for x, y in pts})
    return P, px, py


def shortest_paths(n: int, edges: Iterable[tuple[int, int, ExtValue]]) -> list[list[ExtValue]]:
    """Floyd-Warshall over nonnegative extended weights (undirected edges).

    Weights are rescaled to integers by their common denominator, so the
    numpy relaxation is exact; anything at or above the sentinel is ``∞``.
    """
    finite = [(i, j, w) for i, j, w in edges if w is not INF]
    scale = math.lcm(*(w.denominator for _, _, w in finite)) if finite else 1
    sentinel = sum(int(w * scale) for _, _, w in finite) + 1
    if 2 * sentinel >= 2**62:
        raise MetricError("E_TOO_LARGE", "distances too large for exact shortest paths")
    D = np.full((n, n), sentinel, dtype=np.int64)
    np.fill_diagonal(D, 0)
    for i, j, w in finite:
        v = int(w * scale)
        if v < D[i, j]:
            D[i, j] = D[j, i] = v
    for k in range(n):
        np.minimum(D, D[:, k, None] + D[None, k, :], out=D)
    return [[INF if v >= sentinel else Fraction(int(v), scale) for v in row] for row in D.tolist()]


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> None:
        a, b = self.find(i), self.find(j)
        if a != b:
            self.parent[max(a, b)] = min(a, b)


def colimit_glue(
    spaces: Sequence[FinSpace],
    identifications: Iterable[tuple[tuple[int, str], tuple[int, str]]],
) -> tuple[FinSpace, list[Morphism]]:
    """Disjoint union modulo identifications, with the chain-infimum distance.

    Nodes ``(k, label)`` are ordered by ``(k, label)``; each class is named
    ``"k:label"`` after its least node.
    """
    nodes = [(k, p) for k, X in enumerate(spaces) for p in X.points]
    pos = {node: i for i, node in enumerate(nodes)}
    edges = []
    for k, X in enumerate(spaces):
        for a, b in itertools.combinations(X.points, 2):
            edges.append((pos[(k, a)], pos[(k, b)], X.dist(a, b)))
    uf = _UnionFind(len(nodes))
    for left, right in identifications:
        left, right = (left[0], left[1]), (right[0], right[1])
        if left not in pos or right not in pos:
            raise MetricError("E_UNKNOWN_POINT", "identification references an unknown point", pair=[list(left), list(right)])
        edges.append((pos[left], pos[right], ZERO))
        uf.union(pos[left], pos[right])
    D = shortest_paths(len(nodes), edges)
    roots = sorted({uf.find(i) for i in range(len(nodes))})
    name = {r: tagged_label(*nodes[r]) for r in roots}
    labels = [name[r] for r in roots]
    G = FinSpace(labels, [[D[r][s] for s in roots] for r in roots])
    maps = [
        Morphism(X, G, {p: name[uf.find(pos[(k, p)])] for p in X.points})
        for k, X in enumerate(spaces)
    ]
    return G, maps


def _closure(n: int, gens: list[tuple[int, ...]], cap: int) -> list[tuple[int, ...]]:
    ident = tuple(range(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                gh = tuple(h[g[i]] for i in range(n))
                if gh not in seen:
                    seen.add(gh)
                    if len(seen) > cap:
                        raise MetricError("E_GROUP_TOO_LARGE", f"generated group exceeds {cap} elements", cap=cap)
                    nxt.append(gh)
        frontier = nxt
    return sorted(seen)


def quotient_by_group(action: GroupAction, cap: int = 10_000) -> tuple[FinSpace, Morphism]:
    """Orbit space ``X/G`` with ``d(Gx, Gy) = min_g d(x, g y)``; orbits named by least label."""
    X = action.space
    n = len(X)
    gens = []
    for gi, gen in enumerate(action.generators):
        if sorted(gen.get(p, "") for p in X.points) != list(X.points) or set(gen) != set(X.points):
            raise MetricError("E_NOT_ISOMETRY", "generator is not a bijection of the point set", generator=gi)
        for a, b in itertools.combinations_with_replacement(X.points, 2):
            if X.dist(gen[a], gen[b]) != X.dist(a, b):
                raise MetricError("E_NOT_ISOMETRY", "generator does not preserve distances", generator=gi, pair=[a, b])
        gens.append(tuple(X.index(gen[p]) for p in X.points))
    group = _closure(n, gens, cap)
    orbit_of: dict[int, int] = {}
    for i in range(n):
        orbit_of[i] = min(g[i] for g in group)
    reps = sorted(set(orbit_of.values()))
    labels = [X.points[r] for r in reps]
    Q = FinSpace(labels, [[min(X.d[a][g[b]] for g in group) for b in reps] for a in reps])
    proj = Morphism(X, Q, {X.points[i]: X.points[orbit_of[i]] for i in range(n)})
    return Q, proj


def isometries(X: FinSpace, Y: FinSpace) -> Iterable[dict[str, str]]:
    """Every distance-preserving bijection ``X → Y`` (brute force; small spaces only)."""
    if len(X) != len(Y) or sorted(map(sorted, X.d)) != sorted(map(sorted, Y.d)):
        return
    n = len(X)
    for perm in itertools.permutations(range(n)):
        if all(X.d[i][j] == Y.d[perm[i]][perm[j]] for i in range(n) for j in range(i + 1, n)):
            yield {X.points[i]: Y.points[perm[i]] for i in range(n)}


def find_isometry(X: FinSpace, Y: FinSpace) -> dict[str, str] | None:
    return next(iter(isometries(X, Y)), None)

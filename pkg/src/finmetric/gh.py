"""Correspondences, distortion and the exact Gromov-Hausdorff distance."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import FinSpace, Morphism, tagged_label, two_point, validate_space
from .errors import MetricError
from .submetry import Family, hausdorff, proper_family_check
from .values import INF, ZERO, ExtValue, abs_diff, format_value


@dataclass(frozen=True)
class Correspondence:
    left: FinSpace
    right: FinSpace
    pairs: frozenset[tuple[str, str]]

    def sorted_pairs(self) -> list[tuple[str, str]]:
        return sorted(self.pairs)


def correspondence(X: FinSpace, Y: FinSpace, pairs: Iterable[tuple[str, str]]) -> Correspondence:
    pairs = frozenset((x, y) for x, y in pairs)
    bad = sorted(p for p in pairs if p[0] not in X or p[1] not in Y)
    if bad:
        raise MetricError("E_UNKNOWN_POINT", "pair references an unknown point", pairs=[list(p) for p in bad])
    lonely_x = sorted(set(X.points) - {x for x, _ in pairs})
    lonely_y = sorted(set(Y.points) - {y for _, y in pairs})
    if lonely_x or lonely_y:
        raise MetricError("E_NOT_TOTAL", "relation is not left- and right-total", left=lonely_x, right=lonely_y)
    return Correspondence(X, Y, pairs)


def distortion(R: Correspondence) -> ExtValue:
    X, Y = R.left, R.right
    pairs = R.sorted_pairs()
    return max(
        (abs_diff(X.dist(x, x2), Y.dist(y, y2)) for (x, y), (x2, y2) in itertools.combinations(pairs, 2)),
        default=ZERO,
    )


@dataclass(frozen=True)
class GHResult:
    value: ExtValue
    witness: Correspondence
    phi: Mapping[str, str]
    psi: Mapping[str, str]


def _integer_matrix(X: FinSpace, scale: int) -> np.ndarray:
    return np.array([[int(v * scale) for v in row] for row in X.d], dtype=np.int64)


def _common_scale(*spaces: FinSpace) -> int:
    return math.lcm(*(v.denominator for S in spaces for v in S.values()))


def _require_finite(*spaces: FinSpace) -> None:
    for S in spaces:
        if any(v is INF for v in S.values()):
            raise MetricError("E_INFINITE_DISTANCE", "Gromov-Hausdorff distance needs finite distances")


def _map_distortions(DA: np.ndarray, DB: np.ndarray, maps: np.ndarray) -> np.ndarray:
    # maps: (m, |A|) indices into B; returns dis of each map
    img = DB[maps[:, :, None], maps[:, None, :]]
    return np.abs(img - DA[None]).reshape(len(maps), -1).max(axis=1)


def gh_exact(X: FinSpace, Y: FinSpace, budget: int = 10**7) -> GHResult:
    """Half the least distortion, searched over map pairs ``(φ: X→Y, ψ: Y→X)``.

    The cost of a pair is the distortion of ``graph(φ) ∪ graph(ψ)ᵀ``.  Pairs
    are ranked lexicographically (φ first) so ties resolve to the least one.
    """
    _require_finite(X, Y)
    if not (X.space_class.is_metric and Y.space_class.is_metric):
        raise MetricError("E_NOT_METRIC", "Gromov-Hausdorff distance needs metric spaces")
    m, n = len(X), len(Y)
    if n**m * m**n > budget:
        raise MetricError("E_BUDGET", f"search space {n**m * m**n} exceeds the budget {budget}", budget=budget)
    scale = _common_scale(X, Y)
    DX, DY = _integer_matrix(X, scale), _integer_matrix(Y, scale)
    phis = np.array(list(itertools.product(range(n), repeat=m)), dtype=np.int64).reshape(-1, m)
    psis = np.array(list(itertools.product(range(m), repeat=n)), dtype=np.int64).reshape(-1, n)
    dis_phi = _map_distortions(DX, DY, phis)
    dis_psi = _map_distortions(DY, DX, psis)
    # cross[φ, ψ] = max_{x,y} |d_X(x, ψ y) - d_Y(φ x, y)|
    A = DX[np.arange(m)[None, :, None], psis[:, None, :]]  # (ψ, x, y)
    Bm = DY[phis[:, :, None], np.arange(n)[None, None, :]]  # (φ, x, y)
    chunk = max(1, (1 << 22) // (len(psis) * m * n))
    best_cost, best_at = None, None
    for start in range(0, len(phis), chunk):
        block = Bm[start:start + chunk]
        cross = np.abs(A[None] - block[:, None]).reshape(len(block), len(psis), -1).max(axis=2)
        cost = np.maximum(np.maximum(cross, dis_phi[start:start + chunk, None]), dis_psi[None, :])
        k = int(np.argmin(cost))
        c = int(cost.flat[k])
        if best_cost is None or c < best_cost:
            best_cost, best_at = c, (start + k // len(psis), k % len(psis))
    i, j = best_at
    phi = {X.points[a]: Y.points[int(phis[i][a])] for a in range(m)}
    psi = {Y.points[b]: X.points[int(psis[j][b])] for b in range(n)}
    R = correspondence(X, Y, list(phi.items()) + [(x, y) for y, x in psi.items()])
    value = Fraction(best_cost, 2 * scale)
    assert distortion(R) == 2 * value
    return GHResult(value, R, phi, psi)


def gh_enum_oracle(X: FinSpace, Y: FinSpace) -> ExtValue:
    """Half the least distortion over every total relation, by subset enumeration."""
    _require_finite(X, Y)
    m, n = len(X), len(Y)
    cells = m * n
    if cells > 16:
        raise MetricError("E_TOO_LARGE", "oracle limited to |X|·|Y| ≤ 16")
    scale = _common_scale(X, Y)
    DX, DY = _integer_matrix(X, scale), _integer_matrix(Y, scale)
    xs = np.repeat(np.arange(m), n)
    ys = np.tile(np.arange(n), m)
    C = np.abs(DX[xs][:, xs] - DY[ys][:, ys])  # discrepancy between cells
    # dis[mask] = max over cell pairs inside mask, grown one top bit at a time
    dis = np.zeros(1, dtype=np.int64)
    for b in range(cells):
        row = np.zeros(1, dtype=np.int64)  # row[mask'] = max_{j in mask'} C[b, j], masks below bit b
        for j in range(b):
            row = np.concatenate([row, np.maximum(row, C[b, j])])
        dis = np.concatenate([dis, np.maximum(dis, row)])
    masks = np.arange(1 << cells, dtype=np.int64)
    total = np.ones(len(masks), dtype=bool)
    for x in range(m):
        total &= (masks & sum(1 << (x * n + y) for y in range(n))) != 0
    for y in range(n):
        total &= (masks & sum(1 << (x * n + y) for x in range(m))) != 0
    return Fraction(int(dis[total].min()), 2 * scale)


def _z_label(side: int, a: str) -> str:
    return tagged_label(side, a)


@dataclass(frozen=True)
class TwoPointFamily:
    family: Family
    r: ExtValue

    @property
    def fiber0(self) -> list[str]:
        return self.family.total.fiber("0")

    @property
    def fiber1(self) -> list[str]:
        return self.family.total.fiber(format_value(self.r))


def two_point_family(q: Morphism) -> TwoPointFamily:
    """Certify ``q`` as a proper family over a two-point space ``{0, r}``."""
    B = q.cod
    if len(B) != 2 or "0" not in B:
        raise MetricError("E_NOT_TWO_POINT", "base must be the two-point space {0, r}")
    r = B.dist(*B.points)
    if B != two_point(r) or r is INF or not r > ZERO:
        raise MetricError("E_NOT_TWO_POINT", "base must be the two-point space {0, r} with 0 < r < ∞")
    return TwoPointFamily(proper_family_check(q), r)


def glue_over_two_points(X: FinSpace, Y: FinSpace, R: Correspondence, r: ExtValue | None = None) -> TwoPointFamily:
    """``Z = X ⊔ Y`` with ``d(x, y) = r + min_R (d(x, x') + d(y', y))`` over ``{0, r}``.

    Points of ``Z`` are ``"0:x"`` and ``"1:y"``.  ``r`` defaults to ``dis(R)/2``.
    """
    dis = distortion(R)
    if r is None:
        r = dis / 2 if dis is not INF else INF
    if r is INF or not r > ZERO:
        raise MetricError("E_DEGENERATE_RADIUS", "r must be positive and finite", r=format_value(r))
    if 2 * r < dis:
        raise MetricError("E_RADIUS_TOO_SMALL", "2r is below the distortion", r=format_value(r), distortion=format_value(dis))
    pairs = R.sorted_pairs()

    def cross(x: str, y: str) -> ExtValue:
        return r + min(X.dist(x, x2) + Y.dist(y2, y) for x2, y2 in pairs)

    labels = [_z_label(0, x) for x in X.points] + [_z_label(1, y) for y in Y.points]
    src = [(0, x) for x in X.points] + [(1, y) for y in Y.points]

    def d(s, t):
        if s[0] == t[0]:
            return (X if s[0] == 0 else Y).dist(s[1], t[1])
        x, y = (s[1], t[1]) if s[0] == 0 else (t[1], s[1])
        return cross(x, y)

    try:
        Z = validate_space(labels, [[d(s, t) for t in src] for s in src])
    except MetricError as exc:
        raise MetricError("E_TRIANGLE_VIOLATION", "glued distance is not a metric", violations=exc.violations) from exc
    base = two_point(r)
    top = format_value(r)
    q = Morphism(Z, base, {lab: ("0" if s[0] == 0 else top) for lab, s in zip(labels, src)})
    fam = two_point_family(q)
    assert hausdorff(Z, fam.fiber0, fam.fiber1) == r
    return fam


def correspondence_from_family(fam: TwoPointFamily) -> Correspondence:
    """Pairs ``(x, y)`` across the two fibers with ``d(x, y) ≤ r``."""
    Q = fam.family.space
    F0, F1 = fam.fiber0, fam.fiber1
    pairs = [(x, y) for x in F0 for y in F1 if Q.dist(x, y) <= fam.r]
    R = correspondence(Q.subspace(F0), Q.subspace(F1), pairs)
    assert distortion(R) <= 2 * fam.r
    return R


def chain_upper_bound(families: Sequence[TwoPointFamily], links: Sequence[Mapping[str, str]]) -> ExtValue:
    """Sum of radii along a chain of two-point families linked by isometries.

    ``links[k]`` maps the ``r``-fiber of step ``k`` onto the ``0``-fiber of step ``k+1``.
    """
    if not families:
        raise MetricError("E_ARITY", "a chain needs at least one family")
    if len(links) != len(families) - 1:
        raise MetricError("E_ARITY", "need one link between consecutive families")
    for k, link in enumerate(links):
        A = families[k].family.space.subspace(families[k].fiber1)
        B = families[k + 1].family.space.subspace(families[k + 1].fiber0)
        if set(link) != set(A.points) or sorted(link.values()) != list(B.points):
            raise MetricError("E_LINK_NOT_ISOMETRY", "link is not a bijection between the fibers", link=k)
        for a, b in itertools.combinations(A.points, 2):
            if A.dist(a, b) != B.dist(link[a], link[b]):
                raise MetricError("E_LINK_NOT_ISOMETRY", "link changes a distance", link=k, pair=[a, b])
    return sum((f.r for f in families), ZERO)

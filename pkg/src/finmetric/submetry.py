"""Hausdorff distance, submetries, proper families and hyperspaces."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .core import (
    FinSpace,
    Morphism,
    check_morphism,
    compose,
    fiber_product,
    identity,
    pair_label,
    point_space,
)
from .errors import MetricError
from .values import INF, ZERO, ExtValue, format_value


@dataclass(frozen=True)
class SubsetRef:
    space: FinSpace
    members: frozenset[str]

    def __post_init__(self):
        unknown = [m for m in self.members if m not in self.space]
        if unknown:
            raise MetricError("E_UNKNOWN_POINT", "subset member not in space", points=sorted(unknown))


def subset(space: FinSpace, members: Iterable[str]) -> SubsetRef:
    return SubsetRef(space, frozenset(members))


def _directed(X: FinSpace, A: Iterable[str], B: Iterable[str]) -> ExtValue:
    B = list(B)
    return max((min(X.dist(a, b) for b in B) for a in A), default=ZERO)


def hausdorff(X: FinSpace, A: Iterable[str], B: Iterable[str]) -> ExtValue:
    """Hausdorff distance of two subsets of ``X``.

    ``dH(∅, F) = ∞`` for nonempty ``F`` and ``dH(∅, ∅) = 0``.
    """
    A, B = list(A), list(B)
    if not A and not B:
        return ZERO
    if not A or not B:
        return INF
    return max(_directed(X, A, B), _directed(X, B, A))


def hausdorff_distance(F0: SubsetRef, F1: SubsetRef) -> ExtValue:
    if F0.space != F1.space:
        raise MetricError("E_SPACE_MISMATCH", "subsets live in different spaces")
    return hausdorff(F0.space, F0.members, F1.members)


@dataclass
class SubmetryReport:
    verdict: bool
    definition: bool
    fiber_min: bool
    ball: bool
    surjective: bool
    witness: dict | None = None
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "criteria": {"definition": self.definition, "fiber_min": self.fiber_min, "ball": self.ball},
            "surjective": self.surjective,
            "witness": self.witness,
            "notes": list(self.notes),
        }


def breakpoint_radii(*spaces: FinSpace) -> list[ExtValue]:
    """One radius per constancy interval of open balls: each positive finite distance, plus max + 1."""
    vals = sorted({v for S in spaces for v in S.values() if v is not INF and v > 0})
    top = vals[-1] if vals else ZERO
    return vals + [top + 1]


def _ball(X: FinSpace, x: str, r: ExtValue) -> set[str]:
    return {y for y in X.points if X.dist(x, y) < r}


def submetry_check(f: Morphism) -> SubmetryReport:
    """Evaluate the three equivalent submetry criteria and insist they agree."""
    X, B = f.dom, f.cod
    fibers = f.fibers()
    image = [b for b in B.points if fibers[b]]
    surjective = len(image) == len(B.points)
    for b0, b1 in itertools.combinations(image, 2):
        if B.dist(b0, b1) is INF:
            raise MetricError(
                "E_INFINITE_BASE_DISTANCE",
                "base distance between inhabited fibers is infinite",
                pair=[b0, b1],
            )
    notes = [] if surjective else ["E_NOT_SURJECTIVE"]

    definition = surjective and all(
        hausdorff(X, fibers[b0], fibers[b1]) <= B.dist(b0, b1) < INF
        for b0 in B.points
        for b1 in B.points
    )

    witness = None
    fiber_min = surjective
    for x in X.points:
        for b in B.points:
            nearest = min((X.dist(x, y) for y in fibers[b]), default=INF)
            target = B.dist(f.map[x], b)
            if nearest != target:
                fiber_min = False
                if witness is None:
                    deficit = INF if nearest is INF else nearest - target
                    witness = {"point": x, "target_fiber": b, "deficit": format_value(deficit)}
    if not surjective and witness is None:
        missing = [b for b in B.points if not fibers[b]]
        witness = {"point": None, "target_fiber": missing[0], "deficit": "inf"}

    ball = surjective
    if surjective:
        radii = breakpoint_radii(X, B)
        for x in X.points:
            fx = f.map[x]
            for r in radii:
                if {f.map[y] for y in _ball(X, x, r)} != _ball(B, fx, r):
                    ball = False
                    break
            if not ball:
                break

    if not (definition == fiber_min == ball):
        raise MetricError(
            "E_CRITERIA_DISAGREE",
            "submetry criteria disagree",
            definition=definition,
            fiber_min=fiber_min,
            ball=ball,
            map=dict(f.map),
        )
    return SubmetryReport(definition, definition, fiber_min, ball, surjective, None if definition else witness, notes)


def is_submetry(f: Morphism) -> bool:
    return submetry_check(f).verdict


@dataclass(frozen=True)
class Family:
    """A morphism ``p: P → B`` regarded as a family of fibers.

    ``to_x`` optionally presents ``P`` inside ``X ×_B T`` by recording the
    first coordinate of each point.
    """

    total: Morphism
    to_x: Morphism | None = None

    @property
    def space(self) -> FinSpace:
        return self.total.dom

    @property
    def base(self) -> FinSpace:
        return self.total.cod

    @property
    def fibers(self) -> dict[str, list[str]]:
        return self.total.fibers()

    def fiber_space(self, b: str) -> FinSpace:
        return self.space.subspace(self.total.fiber(b))


def proper_family_check(p: Morphism) -> Family:
    uncovered = sorted(set(p.cod.points) - p.image())
    if uncovered:
        raise MetricError("E_NOT_SURJECTIVE", "family has empty fibers", uncovered=uncovered)
    report = submetry_check(p)
    if not report.verdict:
        raise MetricError("E_NOT_SUBMETRY", "projection is not a submetry", **(report.witness or {}))
    return Family(p)


def is_proper(p: Morphism) -> bool:
    try:
        proper_family_check(p)
    except MetricError as exc:
        if exc.code in ("E_NOT_SURJECTIVE", "E_NOT_SUBMETRY", "E_INFINITE_BASE_DISTANCE"):
            return False
        raise
    return True


@dataclass(frozen=True)
class Hyperspace:
    """``Cpt(X/B)``: nonempty subsets of ``X`` inside one fiber of ``source``."""

    source: Morphism
    space: FinSpace
    fiber_map: Morphism
    members: Mapping[str, frozenset[str]]

    def label_of(self, A: Iterable[str]) -> str:
        return subset_label(A)


def subset_label(A: Iterable[str]) -> str:
    return "|".join(sorted(A))


def hyperspace(f: Morphism, cap: int = 4095) -> Hyperspace:
    X, B = f.dom, f.cod
    if 2 ** len(X) - 1 > cap:
        raise MetricError("E_TOO_LARGE", f"2^{len(X)} - 1 subsets exceed the cap {cap}", cap=cap)
    members: dict[str, frozenset[str]] = {}
    over: dict[str, str] = {}
    for b, fib in f.fibers().items():
        for k in range(1, len(fib) + 1):
            for A in itertools.combinations(fib, k):
                lab = subset_label(A)
                members[lab] = frozenset(A)
                over[lab] = b
    labels = sorted(members)
    H = FinSpace(labels, [[hausdorff(X, members[a], members[c]) for c in labels] for a in labels])
    return Hyperspace(f, H, Morphism(H, B, over), members)


def absolute_hyperspace(X: FinSpace, cap: int = 4095) -> Hyperspace:
    P = point_space()
    return hyperspace(Morphism(X, P, {x: "*" for x in X.points}), cap=cap)


def map_to_family(g: Morphism, hyp: Hyperspace) -> Family:
    """The subfamily ``{(x, t) | x ∈ g(t)} ⊆ X ×_B T`` over ``T``."""
    if g.cod != hyp.space:
        raise MetricError("E_CODOMAIN_MISMATCH", "map does not land in the given hyperspace")
    check_morphism(g.dom, g.cod, g.map)
    T = g.dom
    over = compose(hyp.fiber_map, g)
    XT, px, pt = fiber_product(hyp.source, over)
    keep = [pair_label(x, t) for t in T.points for x in sorted(hyp.members[g.map[t]])]
    A = XT.subspace(keep)
    fam = Family(pt.restrict(A.points), px.restrict(A.points))
    proper_family_check(fam.total)
    return fam


def family_to_map(fam: Family, hyp: Hyperspace) -> Morphism:
    """``t ↦`` the fiber over ``t``, read in ``X`` through ``fam.to_x``."""
    if fam.to_x is None or fam.to_x.cod != hyp.source.dom:
        raise MetricError("E_NOT_PROPER", "family is not presented inside X ×_B T for this X")
    try:
        proper_family_check(fam.total)
    except MetricError as exc:
        raise MetricError("E_NOT_PROPER", f"family is not proper ({exc.code})", **exc.details) from exc
    seen: set[tuple[str, str]] = set()
    for p in fam.space.points:
        key = (fam.to_x.map[p], fam.total.map[p])
        if key in seen:
            raise MetricError("E_NOT_PROPER", "total space is not a subset of X × T", point=p)
        seen.add(key)
    T = fam.base
    mapping = {}
    for t in T.points:
        lab = subset_label({fam.to_x.map[p] for p in fam.total.fiber(t)})
        if lab not in hyp.space:
            raise MetricError("E_NOT_PROPER", "fiber does not lie over a single base point", point=t)
        mapping[t] = lab
    return check_morphism(T, hyp.space, mapping)


@dataclass(frozen=True)
class PointedFamily:
    family: Family
    sections: tuple[Morphism, ...]


def check_pointed_family(p: Morphism, sections: Iterable[Morphism]) -> PointedFamily:
    secs = tuple(sections)
    for i, s in enumerate(secs):
        if s.dom != p.cod or s.cod != p.dom:
            raise MetricError("E_NOT_SECTION", "section has the wrong domain or codomain", section=i)
        check_morphism(s.dom, s.cod, s.map)
        if compose(p, s) != identity(p.cod):
            bad = next(x for x in p.cod.points if p.map[s.map[x]] != x)
            raise MetricError("E_NOT_SECTION", "p ∘ s is not the identity", section=i, point=bad)
    return PointedFamily(Family(p), secs)


def pointed_pullback(fam: PointedFamily, f: Morphism) -> PointedFamily:
    """Base change of a pointed family along ``f: T → X``; points are ``(p,t)``."""
    p = fam.family.total
    P2, _, to_t = fiber_product(p, f)
    sections = tuple(
        Morphism(f.dom, P2, {t: pair_label(s.map[f.map[t]], t) for t in f.dom.points})
        for s in fam.sections
    )
    proper_family_check(to_t)
    return check_pointed_family(to_t, sections)


def diagonal_family(fam: PointedFamily) -> PointedFamily:
    """Pull ``fam`` back along its own projection and add the diagonal section."""
    p = fam.family.total
    pulled = pointed_pullback(fam, p)
    total = pulled.family.total
    diag = Morphism(p.dom, total.dom, {a: pair_label(a, a) for a in p.dom.points})
    return check_pointed_family(total, pulled.sections + (diag,))

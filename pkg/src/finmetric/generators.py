"""Random instance generators for property tests and the acceptance harness.

Every generator takes a :class:`random.Random` so runs are reproducible from a
seed.  Distances are small rationals so exact arithmetic stays cheap.
"""

from __future__ import annotations

import itertools
import random
import string
from fractions import Fraction

from .core import (
    FinSpace,
    GroupAction,
    Morphism,
    constant,
    identity,
    is_lipschitz,
    l_infty_product,
    pair_label,
    quotient_by_group,
    shortest_paths,
    triple_label,
)
from .descent import Covering, DescentDatum, covering_from_submetry, descent_datum_from_family, lsm_covering_check
from .submetry import absolute_hyperspace, map_to_family
from .values import INF

DENOMINATORS = (1, 1, 2, 3, 4)


def random_value(rng: random.Random, top: int = 4) -> Fraction:
    d = rng.choice(DENOMINATORS)
    return Fraction(rng.randint(1, top * d), d)


def labels(n: int, prefix: str = "") -> list[str]:
    return [prefix + string.ascii_lowercase[i] for i in range(n)]


def random_metric(rng: random.Random, n: int, prefix: str = "", top: int = 4) -> FinSpace:
    """Shortest-path closure of random positive rational edge weights."""
    edges = [(i, j, random_value(rng, top)) for i, j in itertools.combinations(range(n), 2)]
    if rng.random() < 0.3:
        # integer points on a line, to get plenty of ties
        xs = rng.sample(range(0, 3 * n + 1), n)
        edges = [(i, j, Fraction(abs(xs[i] - xs[j]))) for i, j in itertools.combinations(range(n), 2)]
    D = shortest_paths(n, edges)
    return FinSpace(labels(n, prefix), D)


def random_map(rng: random.Random, X: FinSpace, Y: FinSpace, tries: int = 60, surjective: bool = False) -> Morphism:
    """A random 1-Lipschitz map, falling back to a constant one."""
    for _ in range(tries):
        if surjective:
            if len(Y) > len(X):
                break
            imgs = list(Y.points) + [rng.choice(Y.points) for _ in range(len(X) - len(Y))]
            rng.shuffle(imgs)
            mapping = dict(zip(X.points, imgs))
        else:
            mapping = {x: rng.choice(Y.points) for x in X.points}
        f = Morphism(X, Y, mapping)
        if is_lipschitz(f):
            return f
    if surjective:
        raise ValueError("no surjective 1-Lipschitz map found")
    return constant(X, Y, rng.choice(Y.points))


def random_quotient_map(rng: random.Random, X: FinSpace, k: int) -> Morphism:
    """A surjective 1-Lipschitz map of ``X`` onto a random ``k``-point metric space."""
    parts = list(range(k)) + [rng.randrange(k) for _ in range(len(X) - k)]
    rng.shuffle(parts)
    names = labels(k, "b")
    fib = {x: names[c] for x, c in zip(X.points, parts)}
    members = {b: [x for x in X.points if fib[x] == b] for b in names}
    gap = {
        (a, b): min(X.dist(x, y) for x in members[a] for y in members[b])
        for a, b in itertools.combinations(names, 2)
    }
    mode = rng.random()
    edges = []
    for (a, b), m in gap.items():
        if mode < 0.5:
            w = m
        else:
            w = m * Fraction(rng.randint(1, 4), 4)
        edges.append((names.index(a), names.index(b), w))
    D = shortest_paths(k, edges)
    B = FinSpace(names, D)
    return Morphism(X, B, fib)


def random_hyperspace_map(rng: random.Random, T: FinSpace, F: FinSpace) -> tuple[Morphism, object]:
    hyp = absolute_hyperspace(F)
    return random_map(rng, T, hyp.space), hyp


def random_proper_family(rng: random.Random, X: FinSpace, max_fiber: int = 3) -> Morphism:
    """A proper family over ``X`` from a random 1-Lipschitz map ``X → Cpt(F)``."""
    roll = rng.random()
    F = random_metric(rng, rng.randint(1, max_fiber), prefix="f")
    if roll < 0.2:
        P, px, _ = l_infty_product(X, F)
        return px
    g, hyp = random_hyperspace_map(rng, X, F)
    fam = map_to_family(g, hyp)
    return fam.total


def random_submetry(rng: random.Random, max_points: int = 6) -> Morphism:
    """A random submetry ``P → B`` of total size at most ``max_points``."""
    roll = rng.random()
    if roll < 0.2:
        # orbit map of a reflection acting on a symmetric space
        n = rng.randint(1, max(1, max_points // 2))
        base = random_metric(rng, n)
        P, _, _ = l_infty_product(base, random_metric(rng, 2, prefix="s"))
        swap = {pair_label(x, s): pair_label(x, t) for x in base.points for s, t in (("sa", "sb"), ("sb", "sa"))}
        _, proj = quotient_by_group(GroupAction(P, (swap,)))
        return proj
    nb = rng.randint(1, max(1, max_points // 2))
    B = random_metric(rng, nb)
    for _ in range(10):
        q = random_proper_family(rng, B, max_fiber=max(1, max_points // nb))
        if len(q.dom) <= max_points:
            return q
    return identity(B)


def random_surjection(rng: random.Random, max_points: int = 6) -> Morphism:
    """A random surjective 1-Lipschitz map; roughly half are submetries."""
    if rng.random() < 0.45:
        return random_submetry(rng, max_points)
    n = rng.randint(1, max_points)
    X = random_metric(rng, n)
    return random_quotient_map(rng, X, rng.randint(1, n))


def random_covering(rng: random.Random, X: FinSpace) -> Covering:
    roll = rng.random()
    if roll < 0.15:
        return lsm_covering_check(X, [identity(X)])
    if roll < 0.55:
        f = identity(X)
    else:
        f = random_proper_family(rng, X, max_fiber=2)
    positive = sorted(v for v in f.dom.values() if v is not INF and v > 0)
    r = rng.choice(positive) if positive else Fraction(1)
    if rng.random() < 0.5:
        r = r / 2
    return covering_from_submetry(f, r)


def relabel_datum(rng: random.Random, datum: DescentDatum) -> DescentDatum:
    """Rename every chart point to an opaque label, rewriting transitions."""
    charts, renames = [], []
    for i, chart in enumerate(datum.charts):
        names = [f"c{i}p{k}" for k in range(len(chart.dom))]
        rng.shuffle(names)
        ren = dict(zip(chart.dom.points, names))
        renames.append(ren)
        charts.append(Morphism(chart.dom.relabel(ren), chart.cod, {ren[a]: u for a, u in chart.map.items()}))
    legs = datum.covering.legs
    transitions = {}
    for (i, j), phi in datum.transitions.items():
        new = {}
        fi, fj = legs[i], legs[j]
        for u in fi.dom.points:
            for v in fj.fiber(fi.map[u]):
                for a in datum.charts[i].fiber(u):
                    b_label = phi[triple_label(a, u, v)]
                    b = next(b for b in datum.charts[j].fiber(v) if triple_label(b, u, v) == b_label)
                    new[triple_label(renames[i][a], u, v)] = triple_label(renames[j][b], u, v)
        transitions[(i, j)] = new
    return DescentDatum(datum.covering, tuple(charts), transitions)


def random_descent(rng: random.Random, max_base: int = 4) -> tuple[DescentDatum, Morphism]:
    """A descent datum and the family it was cut from."""
    X = random_metric(rng, rng.randint(1, max_base))
    q = random_proper_family(rng, X, max_fiber=2)
    cov = random_covering(rng, X)
    datum = descent_datum_from_family(q, cov)
    return relabel_datum(rng, datum), q


def random_two_point_family(rng: random.Random, max_points: int = 4):
    """A proper family over ``{0, r}`` from a random correspondence, glued at ``r ≥ dis/2``."""
    from .gh import correspondence, distortion, glue_over_two_points

    X = random_metric(rng, rng.randint(1, max_points), prefix="x")
    Y = random_metric(rng, rng.randint(1, max_points), prefix="y")
    pairs = {(x, rng.choice(Y.points)) for x in X.points} | {(rng.choice(X.points), y) for y in Y.points}
    R = correspondence(X, Y, pairs)
    dis = distortion(R)
    r = dis / 2 + Fraction(rng.randint(0, 2), rng.choice((1, 2)))
    if r == 0:
        r = Fraction(1, 2)
    return glue_over_two_points(X, Y, R, r), X, Y, R


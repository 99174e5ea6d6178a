"""Acceptance criteria, run at their stated sizes and time limits.

Each test prints one PASS/FAIL line; run with ``pytest tests/test_acceptance.py -v``.
"""

from __future__ import annotations

import itertools
import json
import random
import time
from fractions import Fraction

import pytest

from conftest import isometric
from finmetric import generators as gen
from finmetric.cli import COMMANDS, execute, run_command, sample_inputs
from finmetric.core import FinSpace, Morphism, compose, fiber_product, is_lipschitz, pair_label, point_space
from finmetric.descent import covering_compose, covering_pullback, glue_descent, glue_morphisms, is_covering
from finmetric.documents import parse_document, serialize
from finmetric.errors import MetricError
from finmetric.gh import (
    chain_upper_bound,
    correspondence,
    correspondence_from_family,
    distortion,
    gh_enum_oracle,
    gh_exact,
    glue_over_two_points,
)
from finmetric.submetry import (
    absolute_hyperspace,
    family_to_map,
    hausdorff,
    is_proper,
    is_submetry,
    map_to_family,
    submetry_check,
)
from test_descent import colimit_oracle, covering_oracle
from test_submetry import submetry_oracle


@pytest.fixture
def report(capsys):
    def emit(name: str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        assert ok, detail

    return emit


def _gh_pairs(n_pairs: int, seed: int = 4):
    rng = random.Random(seed)
    return [
        (gen.random_metric(rng, rng.randint(1, 4), prefix="x"), gen.random_metric(rng, rng.randint(1, 4), prefix="y"))
        for _ in range(n_pairs)
    ]


# --- 1 -------------------------------------------------------------------------

def test_criterion_1_submetry_characterizations(report):
    rng = random.Random(1)
    start = time.perf_counter()
    n, disagreements, positives = 0, 0, 0
    while n < 1000:
        f = gen.random_surjection(rng, 6)
        assert len(f.dom) <= 6 and f.image() == set(f.cod.points) and is_lipschitz(f)
        rep = submetry_check(f)
        truth = submetry_oracle(f)
        if not (rep.definition == rep.fiber_min == rep.ball == rep.verdict == truth):
            disagreements += 1
        positives += truth
        n += 1
    elapsed = time.perf_counter() - start
    ok = disagreements == 0 and elapsed < 10 and 0 < positives < n
    report(
        "1 submetry criteria agree",
        ok,
        f"{n} maps, {positives} submetries, {disagreements} disagreements, {elapsed:.2f}s (limit 10s)",
    )


# --- 2 -------------------------------------------------------------------------

def test_criterion_2_closure_suite(report):
    rng = random.Random(2)
    counts = dict.fromkeys(["composition", "right-cancellation", "base change", "covering pullback", "covering composition"], 0)
    failures = []
    while min(counts.values()) < 500:
        g = gen.random_submetry(rng, 6)
        h = gen.random_quotient_map(rng, g.cod, rng.randint(1, len(g.cod)))
        h_sub, hg_sub = submetry_oracle(h), submetry_oracle(compose(h, g))
        if h_sub:
            counts["composition"] += 1
            if not (hg_sub and is_submetry(compose(h, g))):
                failures.append(("composition", g, h))
        if hg_sub:
            counts["right-cancellation"] += 1
            if not (h_sub and is_submetry(h)):
                failures.append(("right-cancellation", g, h))
        T = gen.random_metric(rng, rng.randint(1, 3), prefix="t")
        k = gen.random_map(rng, T, g.cod)
        _, _, to_t = fiber_product(g, k)
        counts["base change"] += 1
        if not (submetry_oracle(to_t) and is_submetry(to_t)):
            failures.append(("base change", g, k))

        X = gen.random_metric(rng, rng.randint(1, 4))
        cov = gen.random_covering(rng, X)
        Y = gen.random_metric(rng, rng.randint(1, 3), prefix="y")
        pb = covering_pullback(cov, gen.random_map(rng, Y, X))
        counts["covering pullback"] += 1
        if not (covering_oracle(Y, pb.legs) and is_covering(Y, pb.legs)):
            failures.append(("covering pullback", cov, Y))
        refinements = [gen.random_covering(rng, leg.dom) for leg in cov.legs]
        comp = covering_compose(cov, refinements)
        counts["covering composition"] += 1
        if not covering_oracle(X, comp.legs):
            failures.append(("covering composition", cov))
    detail = ", ".join(f"{k} {v}" for k, v in counts.items()) + f"; {len(failures)} failures"
    report("2 closure suite", not failures, detail)


# --- 3 -------------------------------------------------------------------------

def _descent_ok(datum, q) -> bool:
    G = glue_descent(datum)
    P, p = G.total, G.projection
    n = len(P)
    for i, j, k in itertools.product(range(n), repeat=3):
        if P.d[i][k] > P.d[i][j] + P.d[j][k]:
            return False
    for leg, chart, g_i in zip(datum.covering.legs, datum.charts, G.chart_maps):
        U = leg.dom
        for a, b in itertools.product(chart.dom.points, repeat=2):
            if chart.dom.dist(a, b) != max(P.dist(g_i.map[a], g_i.map[b]), U.dist(chart.map[a], chart.map[b])):
                return False
        for u in U.points:
            src = chart.fiber(u)
            if sorted(g_i.map[a] for a in src) != sorted(p.fiber(leg.map[u])):
                return False
            if any(chart.dom.dist(a, b) != P.dist(g_i.map[a], g_i.map[b]) for a, b in itertools.combinations(src, 2)):
                return False
    return P.space_class.is_metric_space and colimit_oracle(datum) == P and isometric(P, q.dom)


def test_criterion_3_descent_gluing(report):
    rng = random.Random(3)
    start = time.perf_counter()
    results = []
    for _ in range(200):
        datum, q = gen.random_descent(rng, 4)
        assert len(datum.covering.base) <= 4
        results.append(_descent_ok(datum, q))
    elapsed = time.perf_counter() - start
    bad = results.count(False)
    report("3 descent gluing", bad == 0 and elapsed < 30, f"{len(results)} data, {bad} failures, {elapsed:.2f}s (limit 30s)")


# --- 4 -------------------------------------------------------------------------

def test_criterion_4_gh_exactness(report):
    start = time.perf_counter()
    pairs = _gh_pairs(300)
    mismatch = sum(gh_exact(X, Y).value != gh_enum_oracle(X, Y) for X, Y in pairs)

    rng = random.Random(44)
    half_diam = 0
    for _ in range(100):
        X = gen.random_metric(rng, rng.randint(1, 6))
        half_diam += gh_exact(point_space(), X).value != X.diameter() / 2

    triangle = symmetry = 0
    for _ in range(100):
        X, Y, Z = (gen.random_metric(rng, rng.randint(1, 4), prefix=p) for p in "xyz")
        xy, yz, xz = gh_exact(X, Y).value, gh_exact(Y, Z).value, gh_exact(X, Z).value
        symmetry += xy != gh_exact(Y, X).value
        triangle += xz > xy + yz
    elapsed = time.perf_counter() - start
    bad = mismatch + half_diam + triangle + symmetry
    report(
        "4 GH exactness",
        bad == 0 and elapsed < 60,
        f"300 pairs ({mismatch} oracle mismatches), 100 point cases ({half_diam} off), "
        f"100 triples ({symmetry} asymmetric, {triangle} triangle failures), {elapsed:.2f}s (limit 60s)",
    )


# --- 5 -------------------------------------------------------------------------

def _random_chain(rng: random.Random):
    spaces = [gen.random_metric(rng, rng.randint(1, 3), prefix=f"s{k}_") for k in range(rng.randint(2, 4))]
    families, links = [], []
    for A, B in zip(spaces, spaces[1:]):
        pairs = {(a, rng.choice(B.points)) for a in A.points} | {(rng.choice(A.points), b) for b in B.points}
        R = correspondence(A, B, pairs)
        r = distortion(R) / 2 + Fraction(rng.randint(0, 2), 2)
        families.append(glue_over_two_points(A, B, R, r if r > 0 else Fraction(1)))
    for B in spaces[1:-1]:
        links.append({f"1:{b}": f"0:{b}" for b in B.points})
    return families, links, spaces[0], spaces[-1]


def test_criterion_5_theorem_reproduction(report):
    failures = {"gluing": 0, "extraction": 0, "chain": 0}
    degenerate = 0
    for X, Y in _gh_pairs(300):
        res = gh_exact(X, Y)
        if res.value == 0:
            # r = 0 collapses 2_r; every positive radius already gives dH = r > 0
            degenerate += 1
            continue
        fam = glue_over_two_points(X, Y, res.witness, res.value)
        Q = fam.family.space
        if not (is_proper(fam.family.total) and hausdorff(Q, fam.fiber0, fam.fiber1) == res.value):
            failures["gluing"] += 1

    rng = random.Random(5)
    for _ in range(300):
        fam, *_ = gen.random_two_point_family(rng, 4)
        if distortion(correspondence_from_family(fam)) / 2 > fam.r:
            failures["extraction"] += 1
    for _ in range(100):
        families, links, first, last = _random_chain(rng)
        if chain_upper_bound(families, links) < gh_exact(first, last).value:
            failures["chain"] += 1
    report(
        "5 theorem reproduction",
        not any(failures.values()),
        f"{300 - degenerate} optimal gluings ({degenerate} isometric pairs skipped), 300 extractions, "
        f"100 chains; failures {failures}",
    )


# --- 6 -------------------------------------------------------------------------

def _lipschitz_maps(T: FinSpace, H: FinSpace) -> list[dict[str, str]]:
    out = []
    for image in itertools.product(H.points, repeat=len(T)):
        m = dict(zip(T.points, image))
        if all(H.dist(m[a], m[b]) <= T.dist(a, b) for a, b in itertools.combinations(T.points, 2)):
            out.append(m)
    return out


def _subfamilies(X: FinSpace, T: FinSpace) -> set[frozenset[tuple[str, str]]]:
    """Subsets of ``X × T`` whose projection to ``T`` is a submetry, found by brute force."""
    P, _, pt = fiber_product(
        Morphism(X, point_space(), dict.fromkeys(X.points, "*")),
        Morphism(T, point_space(), dict.fromkeys(T.points, "*")),
    )
    cells = [(x, t) for x in X.points for t in T.points]
    found = set()
    for mask in range(1, 2 ** len(cells)):
        S = [c for k, c in enumerate(cells) if mask >> k & 1]
        sub = P.subspace([pair_label(x, t) for x, t in S])
        if submetry_oracle(pt.restrict(sub.points)):
            found.add(frozenset(S))
    return found


def test_criterion_6_representability(report):
    rng = random.Random(6)
    n, failures = 0, []
    while n < 50:
        X = gen.random_metric(rng, rng.randint(1, 3))
        T = gen.random_metric(rng, rng.randint(1, 3), prefix="t")
        hyp = absolute_hyperspace(X)
        maps = _lipschitz_maps(T, hyp.space)
        families = _subfamilies(X, T)
        images = set()
        for m in maps:
            g = Morphism(T, hyp.space, m)
            fam = map_to_family(g, hyp)
            images.add(frozenset((fam.to_x.map[p], fam.total.map[p]) for p in fam.space.points))
            if family_to_map(fam, hyp) != g or map_to_family(family_to_map(fam, hyp), hyp) != fam:
                failures.append((X, T, m))
        if len(maps) != len(families) or images != families:
            failures.append((X, T, len(maps), len(families)))
        n += 1
    report("6 representability", not failures, f"{n} (X, T) pairs with ≤3 points, {len(failures)} failures")


# --- 7 -------------------------------------------------------------------------

def test_criterion_7_sheaf_gluing(report):
    rng = random.Random(7)
    glued = rejected = 0
    failures = []
    while glued < 200 or rejected < 200:
        T = gen.random_metric(rng, rng.randint(1, 4))
        cov = gen.random_covering(rng, T)
        eps = min(
            [v for leg in cov.legs for v in leg.dom.values() if v > 0] + [v for v in T.values() if v > 0],
            default=Fraction(1),
        ) / 2
        X = FinSpace(["a", "b"], [[0, eps], [eps, 0]])
        g = gen.random_map(rng, T, X)
        pieces = [compose(g, leg) for leg in cov.legs]
        out = glue_morphisms(cov, pieces)
        # independent uniqueness check over every map T → X
        solutions = [
            m
            for m in itertools.product(X.points, repeat=len(T))
            if all(
                piece.map[u] == dict(zip(T.points, m))[leg.map[u]]
                for leg, piece in zip(cov.legs, pieces)
                for u in leg.dom.points
            )
        ]
        if not (out == g and is_lipschitz(out) and len(solutions) == 1):
            failures.append(("glue", T, cov))
        glued += 1

        spots = [
            (i, u)
            for i, leg in enumerate(cov.legs)
            for u in leg.dom.points
            if any(
                (j, v) != (i, u) and cov.legs[j].map[v] == leg.map[u]
                for j, other in enumerate(cov.legs)
                for v in other.dom.points
            )
        ]
        if not spots:
            continue
        i, u = rng.choice(spots)
        bad = list(pieces)
        flipped = dict(bad[i].map)
        flipped[u] = "b" if flipped[u] == "a" else "a"
        bad[i] = Morphism(bad[i].dom, X, flipped)
        try:
            glue_morphisms(cov, bad)
            failures.append(("accepted incompatible", T, cov))
        except MetricError as exc:
            w = exc.details
            a, b = w.get("pair", [None, None])
            pu, pv = w.get("points", [None, None])
            valid = (
                exc.code == "E_INCOMPATIBLE"
                and cov.legs[a].map[pu] == cov.legs[b].map[pv] == w["base_point"]
                and bad[a].map[pu] != bad[b].map[pv]
                and (i, u) in ((a, pu), (b, pv))
            )
            if not valid:
                failures.append(("witness", exc.code, w))
        rejected += 1
    report("7 sheaf gluing", not failures, f"{glued} glued, {rejected} incompatible rejected, {len(failures)} failures")


# --- 8 -------------------------------------------------------------------------

def test_criterion_8_serialization_and_exit_codes(report, tmp_path):
    docs = mismatched = 0
    contract = []
    for name in COMMANDS:
        for seed in range(20):
            inputs, opts = sample_inputs(name, seed)
            out, code = execute(name, inputs, opts)
            for doc in [*inputs, out]:
                text = serialize(doc)
                docs += 1
                mismatched += serialize(parse_document(text)) != text
            text, code = run_command([name, "--seed", str(seed)])
            body = json.loads(text)
            if code not in (0, 1) or (code == 1) != ("error" in body):
                contract.append((name, seed, code))
        # usage and parse failures
        junk = tmp_path / "junk.json"
        junk.write_text('{"kind": "space", "points": [')
        for argv in ([name], [name, "--in", str(junk)], [name, "--cap", "many"]):
            if run_command(argv)[1] != 2:
                contract.append((name, argv))
    if run_command(["no-such-command", "--seed", "0"])[1] != 2:
        contract.append(("unknown command",))
    report(
        "8 canonical serialization",
        mismatched == 0 and not contract,
        f"{docs} documents, {mismatched} round-trip mismatches; {len(COMMANDS)} commands, {len(contract)} exit-code violations",
    )

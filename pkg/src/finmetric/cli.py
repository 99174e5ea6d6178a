"""Batch command interface: ``finmetric COMMAND --in FILE ... [--out FILE]``.

Exit codes: 0 success, 1 semantic violation (report on the output), 2 parse
or usage error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

from . import core, descent, gh, submetry
from . import generators as gen
from .core import FinSpace, GroupAction, Morphism, check_morphism, check_space, compose
from .documents import (
    KINDS,
    SCHEMAS,
    Document,
    morphism_json,
    parse_document,
    serialize,
    space_json,
)
from .errors import MetricError, ParseError
from .submetry import PointedFamily, check_pointed_family
from .values import BadValue, format_value, to_value

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


@dataclass
class Options:
    cap: int | None = None
    radius: Any = None
    subsets: list[str] = field(default_factory=list)
    identify: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class Command:
    name: str
    operation: Callable
    kinds: tuple[str, ...]  # required leading input kinds
    rest: str | None  # kind of optional variadic tail
    run: Callable[[list[Document], Options], tuple[Document, int]]
    sample: Callable[[random.Random], tuple[list[Document], Options]]


def _result(command: str, **fields: Any) -> Document:
    return Document("result", {"command": command, **fields})


def _value(v) -> str:
    return format_value(v)


# --- input checks ----------------------------------------------------------

def _check_morphism(f: Morphism) -> Morphism:
    check_space(f.dom)
    check_space(f.cod)
    return check_morphism(f.dom, f.cod, f.map)


def _check_doc(doc: Document) -> None:
    p = doc.payload
    if doc.kind == "space":
        check_space(p)
    elif doc.kind == "morphism":
        _check_morphism(p)
    elif doc.kind == "covering":
        check_space(p.base)
        for leg in p.legs:
            _check_morphism(leg)
    elif doc.kind == "descent":
        check_space(p.base)
        for m in (*p.covering.legs, *p.charts):
            _check_morphism(m)
    elif doc.kind == "correspondence":
        check_space(p.left)
        check_space(p.right)
        gh.correspondence(p.left, p.right, p.pairs)
    elif doc.kind == "family":
        _check_morphism(p.total)
        if p.to_x is not None:
            _check_morphism(p.to_x)
    elif doc.kind == "pointed-family":
        _check_morphism(p.family.total)
        check_pointed_family(p.family.total, p.sections)


def _radius(opts: Options, required: bool):
    if opts.radius is None:
        if required:
            raise ParseError("E_ARITY", "this command needs --radius")
        return None
    try:
        return to_value(opts.radius)
    except BadValue as exc:
        raise ParseError("E_BAD_RATIONAL", str(exc)) from None


# --- commands --------------------------------------------------------------

def _validate(docs, opts):
    X = core.validate_space(docs[0].payload.points, docs[0].payload.d)
    c = X.space_class
    cls = {"is_metric": c.is_metric, "is_pseudo": c.is_pseudo, "is_metric_space": c.is_metric_space}
    return _result("validate", space=space_json(X), space_class=cls), EXIT_OK


def _product(docs, opts):
    P, px, py = core.l_infty_product(docs[0].payload, docs[1].payload)
    return _result("product", space=space_json(P), projections=[dict(px.map), dict(py.map)]), EXIT_OK


def _fiber_product(docs, opts):
    P, pf, pg = core.fiber_product(docs[0].payload, docs[1].payload)
    return _result("fiber-product", space=space_json(P), projections=[dict(pf.map), dict(pg.map)]), EXIT_OK


def _parse_node(text: str) -> tuple[int, str]:
    k, sep, label = text.partition(":")
    if not sep or not k.isdigit():
        raise ParseError("E_PARSE", f"identification endpoint {text!r} must look like 'K:LABEL'")
    return int(k), label


def _colimit(docs, opts):
    idents = []
    for item in opts.identify:
        left, sep, right = item.partition("=")
        if not sep:
            raise ParseError("E_PARSE", f"--identify {item!r} must look like 'K:A=L:B'")
        idents.append((_parse_node(left), _parse_node(right)))
    G, maps = core.colimit_glue([d.payload for d in docs], idents)
    return _result("colimit", space=space_json(G), maps=[dict(m.map) for m in maps]), EXIT_OK


def _quotient_group(docs, opts):
    X = docs[0].payload
    gens_ = []
    for d in docs[1:]:
        g = d.payload
        if g.dom != X or g.cod != X:
            raise MetricError("E_NOT_ISOMETRY", "generator must be a self-map of the space")
        gens_.append(dict(g.map))
    Q, proj = core.quotient_by_group(GroupAction(X, tuple(gens_)), cap=opts.cap or 10_000)
    return _result("quotient-group", space=space_json(Q), projection=dict(proj.map)), EXIT_OK


def _identify(docs, opts):
    Q, proj = core.metric_identification(docs[0].payload)
    return _result("identify", space=space_json(Q), projection=dict(proj.map)), EXIT_OK


def _hausdorff(docs, opts):
    if len(opts.subsets) != 2:
        raise ParseError("E_ARITY", "hausdorff needs exactly two --subset flags")
    X = docs[0].payload
    F0, F1 = (submetry.subset(X, [m for m in s.split(",") if m]) for s in opts.subsets)
    return _result("hausdorff", value=_value(submetry.hausdorff_distance(F0, F1))), EXIT_OK


def _submetry(docs, opts):
    f = docs[0].payload
    report = submetry.submetry_check(f)
    fields = report.as_dict()
    if f.dom.space_class.is_metric_space and f.cod.space_class.is_metric_space:
        fields["local_radius"] = {x: _value(descent.local_submetry_radius(f, x)) for x in f.dom.points}
    if not report.verdict:
        fields["error"] = "E_NOT_SUBMETRY"
    return _result("submetry", **fields), EXIT_OK if report.verdict else EXIT_VIOLATION


def _proper(docs, opts):
    return Document("family", submetry.proper_family_check(docs[0].payload)), EXIT_OK


def _hyperspace_of(doc: Document, opts: Options):
    cap = opts.cap or 4095
    if doc.kind == "space":
        return submetry.absolute_hyperspace(doc.payload, cap=cap)
    return submetry.hyperspace(doc.payload, cap=cap)


def _hyperspace(docs, opts):
    hyp = _hyperspace_of(docs[0], opts)
    return _result("hyperspace", space=space_json(hyp.space), fiber_map=morphism_json(hyp.fiber_map)), EXIT_OK


def _map_to_family(docs, opts):
    hyp = _hyperspace_of(docs[0], opts)
    return Document("family", submetry.map_to_family(docs[1].payload, hyp)), EXIT_OK


def _family_to_map(docs, opts):
    hyp = _hyperspace_of(docs[1], opts)
    return Document("morphism", submetry.family_to_map(docs[0].payload, hyp)), EXIT_OK


def _pointed_pullback(docs, opts):
    return Document("pointed-family", submetry.pointed_pullback(docs[0].payload, docs[1].payload)), EXIT_OK


def _diagonal_family(docs, opts):
    return Document("pointed-family", submetry.diagonal_family(docs[0].payload)), EXIT_OK


def _lsm_check(docs, opts):
    cov = docs[0].payload
    return Document("covering", descent.lsm_covering_check(cov.base, cov.legs)), EXIT_OK


def _covering_from_submetry(docs, opts):
    return Document("covering", descent.covering_from_submetry(docs[0].payload, _radius(opts, True))), EXIT_OK


def _covering_pullback(docs, opts):
    return Document("covering", descent.covering_pullback(docs[0].payload, docs[1].payload)), EXIT_OK


def _covering_compose(docs, opts):
    return Document("covering", descent.covering_compose(docs[0].payload, [d.payload for d in docs[1:]])), EXIT_OK


def _glue_morphisms(docs, opts):
    return Document("morphism", descent.glue_morphisms(docs[0].payload, [d.payload for d in docs[1:]])), EXIT_OK


def _cocycle(docs, opts):
    phis = descent.check_cocycle(docs[0].payload)
    return _result("cocycle", verdict=True, transitions=len(phis)), EXIT_OK


def _glue_descent(docs, opts):
    G = descent.glue_descent(docs[0].payload)
    return _result(
        "glue-descent",
        total=space_json(G.total),
        projection=morphism_json(G.projection),
        chart_maps=[dict(m.map) for m in G.chart_maps],
        chart_isos=[dict(m.map) for m in G.chart_isos],
    ), EXIT_OK


def _gh(docs, opts):
    res = gh.gh_exact(docs[0].payload, docs[1].payload, budget=opts.cap or 10**7)
    return _result(
        "gh",
        value=_value(res.value),
        pairs=[list(p) for p in res.witness.sorted_pairs()],
        phi=dict(res.phi),
        psi=dict(res.psi),
    ), EXIT_OK


def _gh_oracle(docs, opts):
    return _result("gh-oracle", value=_value(gh.gh_enum_oracle(docs[0].payload, docs[1].payload))), EXIT_OK


def _distortion(docs, opts):
    return _result("distortion", value=_value(gh.distortion(docs[0].payload))), EXIT_OK


def _glue_2r(docs, opts):
    R = docs[0].payload
    fam = gh.glue_over_two_points(R.left, R.right, R, _radius(opts, False))
    return Document("family", fam.family), EXIT_OK


def _corr_from_family(docs, opts):
    fam = gh.two_point_family(docs[0].payload.total)
    return Document("correspondence", gh.correspondence_from_family(fam)), EXIT_OK


def _chain_bound(docs, opts):
    fams, links = [], []
    for k, d in enumerate(docs):
        want = "family" if k % 2 == 0 else "morphism"
        if d.kind != want:
            raise ParseError("E_ARITY", "chain-bound takes family, morphism, family, ... alternately")
        if want == "family":
            fams.append(gh.two_point_family(d.payload.total))
        else:
            links.append(dict(d.payload.map))
    if len(docs) % 2 == 0:
        raise ParseError("E_ARITY", "chain-bound must end with a family")
    return _result("chain-bound", bound=_value(gh.chain_upper_bound(fams, links))), EXIT_OK


# --- sample inputs for --seed ------------------------------------------------

def _space(X: FinSpace) -> Document:
    return Document("space", X)


def _morph(f: Morphism) -> Document:
    return Document("morphism", f)


def _metric(rng, n_max=4, prefix=""):
    return gen.random_metric(rng, rng.randint(1, n_max), prefix=prefix)


def _s_validate(rng):
    X = _metric(rng)
    if len(X) >= 3 and rng.random() < 0.4:
        d = [list(r) for r in X.d]
        d[0][2] = d[2][0] = d[0][1] + d[1][2] + 1
        X = FinSpace(X.points, d)
    return [_space(X)], Options()


def _s_identify(rng):
    X = _metric(rng)
    a = X.points[0]
    pts = list(X.points) + ["z"]
    d = [list(r) + [X.dist(p, a)] for p, r in zip(X.points, X.d)]
    d.append([X.dist(a, q) for q in X.points] + [0])
    return [_space(FinSpace(pts, d))], Options()


def _s_product(rng):
    return [_space(_metric(rng, 3)), _space(_metric(rng, 3, "y"))], Options()


def _s_fiber_product(rng):
    f = gen.random_surjection(rng, 4)
    Y = _metric(rng, 3, "y")
    return [_morph(f), _morph(gen.random_map(rng, Y, f.cod))], Options()


def _s_colimit(rng):
    X, Y = _metric(rng, 3), _metric(rng, 3, "y")
    idents = [f"0:{rng.choice(X.points)}=1:{rng.choice(Y.points)}" for _ in range(rng.randint(0, 2))]
    return [_space(X), _space(Y)], Options(identify=idents)


def _s_quotient_group(rng):
    base = _metric(rng, 2)
    P, _, _ = core.l_infty_product(base, gen.random_metric(rng, 2, prefix="s"))
    swap = {
        core.pair_label(x, s): core.pair_label(x, t) for x in base.points for s, t in (("sa", "sb"), ("sb", "sa"))
    }
    return [_space(P), _morph(Morphism(P, P, swap))], Options()


def _s_hausdorff(rng):
    X = _metric(rng)
    subs = [",".join(p for p in X.points if rng.random() < 0.5) for _ in range(2)]
    return [_space(X)], Options(subsets=subs)


def _s_submetry(rng):
    return [_morph(gen.random_surjection(rng, 5))], Options()


def _s_hyperspace(rng):
    X = _metric(rng, 3)
    return [_morph(gen.random_map(rng, X, _metric(rng, 2, "b")))], Options()


def _hyp_pair(rng):
    X = _metric(rng, 3)
    f = gen.random_map(rng, X, _metric(rng, 2, "b"))
    hyp = submetry.hyperspace(f)
    g = gen.random_map(rng, _metric(rng, 3, "t"), hyp.space)
    return f, g, hyp


def _s_map_to_family(rng):
    f, g, _ = _hyp_pair(rng)
    return [_morph(f), _morph(g)], Options()


def _s_family_to_map(rng):
    f, g, hyp = _hyp_pair(rng)
    return [Document("family", submetry.map_to_family(g, hyp)), _morph(f)], Options()


def _pointed(rng) -> PointedFamily:
    X = _metric(rng, 3)
    F = _metric(rng, 2, "f")
    _, px, _ = core.l_infty_product(X, F)
    secs = [
        Morphism(X, px.dom, {x: core.pair_label(x, rng.choice(F.points)) for x in X.points})
        for _ in range(rng.randint(0, 2))
    ]
    secs = [s for s in secs if core.is_lipschitz(s)]
    return check_pointed_family(px, secs)


def _s_pointed_pullback(rng):
    pf = _pointed(rng)
    T = _metric(rng, 3, "t")
    return [Document("pointed-family", pf), _morph(gen.random_map(rng, T, pf.family.base))], Options()


def _s_diagonal_family(rng):
    return [Document("pointed-family", _pointed(rng))], Options()


def _s_lsm_check(rng):
    X = _metric(rng)
    cov = gen.random_covering(rng, X)
    if len(X) >= 2 and rng.random() < 0.3:
        cov = descent.Covering(X, tuple(core.inclusion(X.subspace([p]), X) for p in X.points))
    return [Document("covering", cov)], Options()


def _s_covering_from_submetry(rng):
    f = gen.random_submetry(rng, 4)
    return [_morph(f)], Options(radius=format_value(gen.random_value(rng, 2)))


def _s_covering_pullback(rng):
    X = _metric(rng, 3)
    cov = gen.random_covering(rng, X)
    return [Document("covering", cov), _morph(gen.random_map(rng, _metric(rng, 3, "y"), X))], Options()


def _s_covering_compose(rng):
    X = _metric(rng, 3)
    cov = gen.random_covering(rng, X)
    refs = [Document("covering", gen.random_covering(rng, leg.dom)) for leg in cov.legs]
    return [Document("covering", cov), *refs], Options()


def _s_glue_morphisms(rng):
    T = _metric(rng, 3)
    cov = gen.random_covering(rng, T)
    X = _metric(rng, 3, "x")
    g = gen.random_map(rng, T, X)
    pieces = [compose(g, leg) for leg in cov.legs]
    if len(X) > 1 and rng.random() < 0.3:
        k = rng.randrange(len(pieces))
        u = rng.choice(pieces[k].dom.points)
        other = next(x for x in X.points if x != pieces[k].map[u])
        pieces[k] = Morphism(pieces[k].dom, X, {**pieces[k].map, u: other})
    return [Document("covering", cov), *map(_morph, pieces)], Options()


def _s_descent(rng):
    datum, _ = gen.random_descent(rng, 3)
    return [Document("descent", datum)], Options()


def _s_gh(rng):
    return [_space(_metric(rng, 4)), _space(_metric(rng, 4, "y"))], Options()


def _random_corr(rng):
    X, Y = _metric(rng, 3, "x"), _metric(rng, 3, "y")
    pairs = {(x, rng.choice(Y.points)) for x in X.points} | {(rng.choice(X.points), y) for y in Y.points}
    return gh.correspondence(X, Y, pairs)


def _s_distortion(rng):
    return [Document("correspondence", _random_corr(rng))], Options()


def _s_glue_2r(rng):
    R = _random_corr(rng)
    dis = gh.distortion(R)
    r = dis / 2 if dis > 0 else Fraction(1, 2)
    return [Document("correspondence", R)], Options(radius=format_value(r + rng.randint(0, 1)))


def _s_corr_from_family(rng):
    fam, *_ = gen.random_two_point_family(rng, 3)
    return [Document("family", fam.family)], Options()


def _s_chain_bound(rng):
    docs = []
    fam, _, Y, _ = gen.random_two_point_family(rng, 3)
    docs.append(Document("family", fam.family))
    for _ in range(rng.randint(0, 2)):
        W = _metric(rng, 3, "w")
        pairs = {(y, rng.choice(W.points)) for y in Y.points} | {(rng.choice(Y.points), w) for w in W.points}
        R = gh.correspondence(Y, W, pairs)
        dis = gh.distortion(R)
        nxt = gh.glue_over_two_points(Y, W, R, dis / 2 if dis > 0 else Fraction(1))
        A = fam.family.space.subspace(fam.fiber1)
        B = nxt.family.space.subspace(nxt.fiber0)
        link = {a: "0:" + a.split(":", 1)[1] for a in A.points}
        docs += [_morph(Morphism(A, B, link)), Document("family", nxt.family)]
        fam, Y = nxt, W
    return docs, Options()


def _cmd(name, op, kinds, rest, run, sample) -> Command:
    return Command(name, op, tuple(kinds), rest, run, sample)


COMMANDS: dict[str, Command] = {
    c.name: c
    for c in [
        _cmd("validate", core.validate_space, ["space"], None, _validate, _s_validate),
        _cmd("product", core.l_infty_product, ["space", "space"], None, _product, _s_product),
        _cmd("fiber-product", core.fiber_product, ["morphism", "morphism"], None, _fiber_product, _s_fiber_product),
        _cmd("colimit", core.colimit_glue, ["space"], "space", _colimit, _s_colimit),
        _cmd("quotient-group", core.quotient_by_group, ["space"], "morphism", _quotient_group, _s_quotient_group),
        _cmd("identify", core.metric_identification, ["space"], None, _identify, _s_identify),
        _cmd("hausdorff", submetry.hausdorff_distance, ["space"], None, _hausdorff, _s_hausdorff),
        _cmd("submetry", submetry.submetry_check, ["morphism"], None, _submetry, _s_submetry),
        _cmd("proper", submetry.proper_family_check, ["morphism"], None, _proper, _s_submetry),
        _cmd("hyperspace", submetry.hyperspace, ["space|morphism"], None, _hyperspace, _s_hyperspace),
        _cmd("map-to-family", submetry.map_to_family, ["space|morphism", "morphism"], None, _map_to_family, _s_map_to_family),
        _cmd("family-to-map", submetry.family_to_map, ["family", "space|morphism"], None, _family_to_map, _s_family_to_map),
        _cmd("pointed-pullback", submetry.pointed_pullback, ["pointed-family", "morphism"], None, _pointed_pullback, _s_pointed_pullback),
        _cmd("diagonal-family", submetry.diagonal_family, ["pointed-family"], None, _diagonal_family, _s_diagonal_family),
        _cmd("lsm-check", descent.lsm_covering_check, ["covering"], None, _lsm_check, _s_lsm_check),
        _cmd("covering-from-submetry", descent.covering_from_submetry, ["morphism"], None, _covering_from_submetry, _s_covering_from_submetry),
        _cmd("covering-pullback", descent.covering_pullback, ["covering", "morphism"], None, _covering_pullback, _s_covering_pullback),
        _cmd("covering-compose", descent.covering_compose, ["covering"], "covering", _covering_compose, _s_covering_compose),
        _cmd("glue-morphisms", descent.glue_morphisms, ["covering"], "morphism", _glue_morphisms, _s_glue_morphisms),
        _cmd("cocycle", descent.check_cocycle, ["descent"], None, _cocycle, _s_descent),
        _cmd("glue-descent", descent.glue_descent, ["descent"], None, _glue_descent, _s_descent),
        _cmd("gh", gh.gh_exact, ["space", "space"], None, _gh, _s_gh),
        _cmd("gh-oracle", gh.gh_enum_oracle, ["space", "space"], None, _gh_oracle, _s_gh),
        _cmd("distortion", gh.distortion, ["correspondence"], None, _distortion, _s_distortion),
        _cmd("glue-2r", gh.glue_over_two_points, ["correspondence"], None, _glue_2r, _s_glue_2r),
        _cmd("corr-from-family", gh.correspondence_from_family, ["family"], None, _corr_from_family, _s_corr_from_family),
        _cmd("chain-bound", gh.chain_upper_bound, ["family"], "family|morphism", _chain_bound, _s_chain_bound),
    ]
}


def _check_arity(cmd: Command, docs: Sequence[Document]) -> None:
    n = len(cmd.kinds)
    if len(docs) < n or (cmd.rest is None and len(docs) > n):
        want = f"{n}{'+' if cmd.rest else ''}"
        raise ParseError("E_ARITY", f"{cmd.name} takes {want} inputs, got {len(docs)}")
    for k, doc in enumerate(docs):
        want = cmd.kinds[k] if k < n else cmd.rest
        if doc.kind not in want.split("|"):
            raise ParseError("E_ARITY", f"input {k} of {cmd.name} must be a {want} document, got {doc.kind}")


def execute(command: str, docs: Sequence[Document], opts: Options | None = None) -> tuple[Document, int]:
    """Run one command on parsed documents; failures become report documents."""
    opts = opts or Options()
    try:
        cmd = COMMANDS.get(command)
        if cmd is None:
            raise ParseError("E_UNKNOWN_COMMAND", f"unknown command {command!r}")
        _check_arity(cmd, docs)
        for k, doc in enumerate(docs):
            generator_input = command == "quotient-group" and k > 0
            if command != "validate" and not generator_input:
                _check_doc(doc)
        return cmd.run(list(docs), opts)
    except ParseError as exc:
        return _result(command, **exc.report()), EXIT_USAGE
    except MetricError as exc:
        return _result(command, **exc.report()), EXIT_VIOLATION
    except (AssertionError, ArithmeticError, ValueError, KeyError) as exc:
        return _result(command, error="E_INTERNAL", message=f"{type(exc).__name__}: {exc}", violations=[]), EXIT_VIOLATION


def sample_inputs(command: str, seed: int) -> tuple[list[Document], Options]:
    cmd = COMMANDS.get(command)
    if cmd is None:
        raise ParseError("E_UNKNOWN_COMMAND", f"unknown command {command!r}")
    return cmd.sample(random.Random(seed))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError("E_USAGE", message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="finmetric", description="Exact finite metric geometry toolkit.")
    p.add_argument("command", nargs="?", help="one of: " + ", ".join(COMMANDS))
    p.add_argument("--in", dest="inputs", action="append", default=[], metavar="FILE", help="input document (repeatable, ordered)")
    p.add_argument("--out", metavar="FILE", help="write the output document here instead of stdout")
    p.add_argument("--cap", type=int, metavar="N", help="size cap (hyperspace subsets, group order, GH search budget)")
    p.add_argument("--seed", type=int, metavar="N", help="generate random inputs for the command instead of reading --in")
    p.add_argument("--schema", metavar="KIND", help="print the JSON schema of a document kind and exit")
    p.add_argument("--radius", metavar="R", help="radius for covering-from-submetry and glue-2r")
    p.add_argument("--subset", dest="subsets", action="append", default=[], metavar="A,B,...", help="subset for hausdorff (given twice)")
    p.add_argument("--identify", action="append", default=[], metavar="K:A=L:B", help="identification for colimit (repeatable)")
    return p


def _read(path: str) -> Document:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise ParseError("E_IO", f"cannot read {path}: {exc.strerror}") from None
    return parse_document(data)


def _run(argv: Sequence[str]) -> tuple[str, int, str | None]:
    command, out = None, None
    try:
        args = _parser().parse_args(list(argv))
        command, out = args.command, args.out
        if args.schema is not None:
            if args.schema not in KINDS:
                raise ParseError("E_UNKNOWN_KIND", f"unknown document kind {args.schema!r}")
            return json.dumps(SCHEMAS[args.schema], indent=2, sort_keys=True) + "\n", EXIT_OK, out
        if command is None:
            raise ParseError("E_USAGE", "missing command")
        opts = Options(cap=args.cap, radius=args.radius, subsets=args.subsets, identify=args.identify)
        if args.seed is not None and not args.inputs:
            docs, sampled = sample_inputs(command, args.seed)
            opts = Options(
                cap=args.cap,
                radius=args.radius if args.radius is not None else sampled.radius,
                subsets=args.subsets or sampled.subsets,
                identify=args.identify or sampled.identify,
            )
        else:
            docs = [_read(path) for path in args.inputs]
    except ParseError as exc:
        return serialize(_result(command or "", **exc.report())), EXIT_USAGE, out
    doc, code = execute(command, docs, opts)
    return serialize(doc), code, out


def run_command(argv: Sequence[str]) -> tuple[str, int]:
    """Parse ``argv``, run the command and return ``(output text, exit code)``."""
    text, code, _ = _run(argv)
    return text, code


def main(argv: Sequence[str] | None = None) -> int:
    text, code, out = _run(sys.argv[1:] if argv is None else argv)
    if out:
        try:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text)
            return code
        except OSError as exc:
            text = serialize(_result("", error="E_IO", message=f"cannot write {out}: {exc.strerror}"))
            code = EXIT_USAGE
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

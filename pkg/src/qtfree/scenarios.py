"""Report builders behind the CLI: graph analysis, free norms, action checks, demo corpus.

Every builder is a pure function of its arguments (the seed included) and
returns a :class:`~qtfree.report.Report`.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import actions as act
from .errors import InvalidInput, QTFError
from .free_space import (free_norm_dual, free_norm_flow, lip_norm, parse_free_vector, random_free_vector,
                         solve_dual, solve_flow)
from .graph_metric import PointedGraph, cycle_graph, grid_graph, path_graph, star_graph
from .groups import (FreeGroup, FreeProduct, bass_serre_ball, cayley_ball, check_alpha_chain_rule,
                     check_coset_decomposition, check_left_action, cyclic_group, dihedral_infinite,
                     interior_vertices, make_coset_section, parse_group)
from .kerr_tree import (branch_points_in_image, build_quotient, delta_eff, four_point_defect, pulled_back,
                        realize_tree, right_inverse_h)
from .report import Report
from .rng import XorShift64Star, random_tree

MAX_WITNESSES = 10

SCENARIOS = ("lemma61", "lemma24", "lemma72", "theorem12", "cor13")
ALIASES = {
    "free-space": "lemma61",
    "induction": "lemma24",
    "free-product": "lemma72",
    "direct-sum": "theorem12",
    "orbit-growth": "cor13",
}


# ---------------------------------------------------------------------------
# graph analysis


def run_analyze(pg: PointedGraph, source: str | None = None) -> Report:
    rep = Report("analyze", {"input": source, "n": pg.n, "edges": len(pg.edges), "basepoint": pg.basepoint})
    try:
        qm = build_quotient(pg)
    except AssertionError as exc:
        rep.check("pseudo-metric", False, "d' satisfies the pseudo-metric axioms", error=str(exc))
        return rep
    rep.check("pseudo-metric", True, "d' satisfies the pseudo-metric axioms")
    DY = pulled_back(pg, qm)
    DX = pg.dist.astype(np.int64)
    over = np.argwhere(DY > DX)
    rep.check("quotient-contracts", over.size == 0, "d_Y(g x1, g x2) <= d_X(x1, x2)",
              pairs=[[int(i), int(j)] for i, j in over[:MAX_WITNESSES]])
    dstar = int((DX - DY).max())
    defect = four_point_defect(qm)
    rep.check("four-point", defect <= 0, "quotient satisfies the four-point condition", defect=defect)
    h = right_inverse_h(qm)
    rep.data.update(
        classes=[list(c) for c in qm.classes],
        dist_Y=qm.dist_Y.tolist(),
        base_class=qm.base_class,
        delta_star=dstar,
        four_point_defect=defect,
        h=list(h),
        delta_eff=delta_eff(pg, qm, h),
    )
    if defect > 0:
        rep.skip("branch-points", "degree >= 3 realization nodes are class images",
                 "no tree realization: four-point condition fails")
        return rep
    tr = realize_tree(qm)
    ok, bad = branch_points_in_image(qm, tr)
    rep.check("branch-points", ok, "degree >= 3 realization nodes are class images", synthesized=bad)
    rep.data["realization"] = tr.to_json()
    return rep


# ---------------------------------------------------------------------------
# free norms


def run_free_norm(pg: PointedGraph, vector_data, source: str | None = None) -> Report:
    mu, warnings = parse_free_vector(vector_data, pg)
    rep = Report("free-norm", {"input": source, "vector": vector_data})
    rep.warnings.extend(warnings)
    dual, f = solve_dual(mu, pg)
    flow, plan = solve_flow(mu, pg)
    rep.check("dual-equals-flow", dual == flow, "Lipschitz dual optimum equals transport cost",
              dual=dual, flow=flow)
    lip = lip_norm(f, pg)
    rep.check("certificate", lip <= 1 and f.pair(mu) == dual and f(pg.basepoint) == 0,
              "optimal 1-Lipschitz potential vanishing at the basepoint", lip=lip, pairing=f.pair(mu))
    rep.data.update(norm=dual, vector=mu.to_json(), certificate=list(f.values),
                    flow=[[u, v, q] for (u, v), q in sorted(plan.items())])
    return rep


# ---------------------------------------------------------------------------
# helpers


def _record_failures(rep, name, anchor, failures, **extra):
    return rep.check(name, not failures, anchor, failures=failures[:MAX_WITNESSES], failure_count=len(failures),
                     **extra)


def _fmt(G, g):
    return G.format(g) if g != G.identity else "e"


def _guard(rep, name, anchor, fn):
    """Run fn(); bug-signal exceptions become a failed check instead of a crash."""
    try:
        return fn()
    except (AssertionError, QTFError) as exc:
        if isinstance(exc, InvalidInput):
            raise
        rep.check(name, False, anchor, error=f"{type(exc).__name__}: {exc}")
        return None


def _free_space_setup(G, radius, cap):
    """Cayley graph of G with its left-multiplication action.

    Finite groups use the whole Cayley graph and go through per-generator
    permutations (validated as automorphisms); infinite groups use the ball
    of ``radius`` with a partial action.  Returns (ball, vertex action,
    tested elements, vertices allowed in random supports).
    """
    if G.order is not None:
        ball = cayley_ball(G, G.order, cap)
        perms = {s: [ball.index[G.mul(s, g)] for g in ball.elements] for s in G.generators}
        vertex_action = act.permutation_action(ball.pg, G, perms)
        return ball, vertex_action, list(ball.elements), list(range(ball.pg.n)), G.order
    ball = cayley_ball(G, radius, cap)
    L = radius // 2
    tested = [g for g in ball.elements if G.word_length(g) <= L]
    pool = [i for i, g in enumerate(ball.elements) if G.word_length(g) <= radius - L]
    return ball, act.cayley_vertex_action(ball), tested, pool, L


def _pairs_within(G, elements, budget):
    return [(s, t) for s in elements for t in elements if G.word_length(s) + G.word_length(t) <= budget]


# ---------------------------------------------------------------------------
# scenarios


def scenario_lemma61(group="free:2", radius=5, seed=0, samples=100, cap=None, p=1) -> Report:
    if p != 1:
        raise InvalidInput("the free-space action is measured in the free norm (p = 1)")
    G = parse_group(group)
    rng = XorShift64Star(seed)
    rep = Report("verify-action lemma61", {"group": group, "radius": radius, "seed": seed, "samples": samples})
    ball, vertex_action, tested, pool, L = _free_space_setup(G, radius, cap)
    rep.check("automorphisms", True, "generators act by graph automorphisms",
              generators=[_fmt(G, s) for s in G.generators])
    pg = ball.pg
    sigma = act.free_space_action(pg, G, vertex_action)
    o = pg.basepoint

    rep.check("identity", not sigma.cocycle(G.identity) and not sigma.apply(G.identity, sigma.zero()),
              "σ(e)0 = 0")
    rows, bad = [], []
    for s in tested:
        b = sigma.cocycle(s)
        d = pg.d(vertex_action(s, o), o)
        flow, dual = free_norm_flow(b, pg), free_norm_dual(b, pg)
        rows.append({"s": _fmt(G, s), "length": G.word_length(s), "norm": flow, "distance": d})
        if not flow == dual == d:
            bad.append({"s": _fmt(G, s), "flow": flow, "dual": dual, "distance": d})
    _record_failures(rep, "orbit-norm", "||σ(s)0|| = d(s·o, o), both free-norm oracles", bad,
                     tested=len(tested))
    rep.data["orbit_norms"] = rows

    bad = []
    for k in range(samples):
        s = rng.choice(tested)
        mu = random_free_vector(rng, pg, vertices=pool)
        before, after = free_norm_flow(mu, pg), free_norm_flow(sigma.apply_linear(s, mu), pg)
        if before != after:
            bad.append({"sample": k, "s": _fmt(G, s), "before": before, "after": after})
    _record_failures(rep, "isometry", "||π(s)μ|| = ||μ|| on random vectors", bad, samples=samples)

    pairs = _pairs_within(G, tested, 2 * L)
    res = act.verify_cocycle(sigma, pairs)
    _record_failures(rep, "cocycle", "b(st) = π(s)b(t) + b(s)", res["failures"], pairs=res["checked"])

    small = [g for g in tested if G.word_length(g) <= max(L // 2, 1)] if G.order is None else tested
    triples = []
    for _ in range(min(samples, 50)):
        triples.append((rng.choice(small), rng.choice(small), random_free_vector(rng, pg, vertices=pool)))
    res = act.verify_representation(sigma, triples)
    _record_failures(rep, "representation", "π(st) = π(s)π(t), π(e) = id", res["failures"],
                     samples=res["checked"])
    rep.data["vertices"] = pg.n
    return rep


def _inner_z(group):
    """(G, membership test for H, iso H -> Z, scale) for the supported induction examples."""
    G = parse_group(group)
    if isinstance(G, FreeProduct) and all(F.order == 2 for F in G.factors):
        G, in_h, to_int = dihedral_infinite()
        return G, in_h, to_int, 2
    if isinstance(G, FreeGroup) and G.rank == 1:
        def in_h(g):
            return sum(g) % 2 == 0

        def to_int(g):
            return sum(g) // 2

        return G, in_h, to_int, 2
    raise InvalidInput(f"induction scenario supports product(cyclic:2,cyclic:2) and z, not {group!r}")


def scenario_lemma24(group="product(cyclic:2,cyclic:2)", maxlen=8, seed=0, samples=50, p=1) -> Report:
    if p != 1:
        raise InvalidInput("the induction scenario works in ℓ¹ (p = 1)")
    G, in_h, to_int, scale = _inner_z(group)
    rng = XorShift64Star(seed)
    rep = Report("verify-action lemma24", {"group": group, "maxlen": maxlen, "seed": seed, "samples": samples})
    section = make_coset_section(G, in_h, 2)
    inner = act.translation_action(G, to_int, scale)
    tilde = act.induce_action(section, inner)
    elems = G.ball(maxlen)
    B = Fraction(0)
    D = act.coset_distortion(section)
    rep.data.update(representatives=[_fmt(G, w) for w in section.reps], B=B, D=D, B_tilde=B + D)

    bad = check_coset_decomposition(section, elems)
    _record_failures(rep, "coset-decomposition", "g = ω(gH) t with t in H, uniquely", [_fmt(G, g) for g in bad])
    half = G.ball(maxlen // 2)
    bad = _guard(rep, "alpha-chain-rule", "α(st, x) = α(s, t·x) α(t, x)",
                 lambda: check_alpha_chain_rule(section, half))
    if bad is not None:
        _record_failures(rep, "alpha-chain-rule", "α(st, x) = α(s, t·x) α(t, x)",
                         [[_fmt(G, s), _fmt(G, t), _fmt(G, x)] for s, t, x in bad])

    bad = [_fmt(G, t) for t in elems if in_h(t) and inner.orbit_norm_power(t) < G.word_length(t) - B]
    _record_failures(rep, "inner-lower-bound", "||b(t)|| >= |t| - B on H", bad, B=B)

    res = act.verify_cocycle(tilde, [(s, t) for s in elems for t in elems])
    _record_failures(rep, "cocycle", "b̃(st) = π̃(s)b̃(t) + b̃(s)", res["failures"], pairs=res["checked"])

    def rand_vec():
        coeffs = {}
        for _ in range(rng.randint(1, 4)):
            coeffs[(rng.choice(section.reps), rng.randint(-5, 5))] = rng.fraction()
        return act.SparseVector(coeffs, 1)

    triples = [(rng.choice(elems), rng.choice(elems), rand_vec()) for _ in range(samples)]
    res = act.verify_representation(tilde, triples)
    _record_failures(rep, "representation", "π̃(st) = π̃(s)π̃(t), π̃(e) = id", res["failures"],
                     samples=res["checked"])
    res = act.verify_lipschitz(tilde, [(s, v) for s, _, v in triples])
    _record_failures(rep, "lipschitz", "induced operators bounded by the inner C", res["failures"],
                     inner_C=inner.lipschitz_bound, induced_C=tilde.lipschitz_bound, max_ratio=res["max_ratio_p"])
    if tilde.lipschitz_bound != inner.lipschitz_bound:
        rep.check("lipschitz-constant", False, "induced C equals inner C",
                  inner_C=inner.lipschitz_bound, induced_C=tilde.lipschitz_bound)

    rows, bad = [], []
    slack_min = None
    for s in elems:
        n = tilde.orbit_norm_power(s)
        slack = n - (G.word_length(s) - (B + D))
        slack_min = slack if slack_min is None else min(slack_min, slack)
        rows.append({"s": _fmt(G, s), "length": G.word_length(s), "norm": n})
        if slack < 0:
            bad.append({"s": _fmt(G, s), "norm": n, "length": G.word_length(s)})
    _record_failures(rep, "lower-bound", "||σ̃(s)0|| >= |s| - (B + D)", bad, tested=len(elems), min_slack=slack_min)
    rep.data["orbit_norms"] = rows
    return rep


def _lemma72_action(G, p, radius, cap):
    if not isinstance(G, FreeProduct):
        raise InvalidInput("free-product scenario needs a group of the form product(A,B)")
    gamma, lam = G.factors
    tree = bass_serre_ball(gamma, lam, max(radius, 1), cap)
    sg, sl = act.regular_action(gamma, p), act.regular_action(lam, p)
    return tree, sg, sl, act.free_product_action(sg, sl, p, tree)


def scenario_lemma72(group="product(cyclic:2,cyclic:3)", maxlen=8, seed=0, samples=50, p=1, cap=None) -> Report:
    G = parse_group(group)
    rng = XorShift64Star(seed)
    rep = Report("verify-action lemma72", {"group": group, "maxlen": maxlen, "seed": seed, "samples": samples,
                                           "p": p})
    tree, sg, sl, tilde = _lemma72_action(G, p, maxlen, cap)
    G = tilde.group

    pg = tree.pg
    rep.check("tree-acyclic", len(pg.edges) == pg.n - 1, "Bass-Serre ball has E = V - 1",
              vertices=pg.n, edges=len(pg.edges))
    inner = interior_vertices(tree)
    bad = [{"vertex": str(tree.labels[v]), "degree": pg.graph.degree(v), "expected": tree.full_degree(v)}
           for v in inner if pg.graph.degree(v) != tree.full_degree(v)]
    _record_failures(rep, "tree-degrees", "interior coset vertices wF have degree |F|", bad, interior=len(inner))
    sampled = G.ball(2)
    bad = check_left_action(tree, sampled)
    _record_failures(rep, "tree-action", "left multiplication preserves edges",
                     [[_fmt(G, g), e] for g, e in bad], sampled=len(sampled))

    words = G.ball(maxlen)
    bad = []
    by_length: dict[int, list] = {}
    for w in words:
        n = tilde.orbit_norm_power(w)
        expected = act.letter_norm_sum(sg, sl, w) + 2 * len(w)
        by_length.setdefault(len(w), []).append(n)
        if n != expected:
            bad.append({"word": _fmt(G, w), "norm_p": n, "expected": expected})
    _record_failures(rep, "norm-identity", "||b̃(w)||^p = Σ||b(s_i)||^p + 2n", bad, words=len(words))
    mins = [min(by_length[k]) for k in sorted(by_length)]
    rep.check("strictly-increasing", all(a < b for a, b in zip(mins, mins[1:])),
              "minimal ||b̃(w)||^p grows strictly with the number of letters", minima=mins)
    rep.data["norms_by_letters"] = [{"letters": k, "min_p": min(v), "max_p": max(v), "count": len(v)}
                                    for k, v in sorted(by_length.items())]

    half = G.ball(maxlen // 2)
    res = act.verify_cocycle(tilde, [(s, t) for s in half for t in half])
    _record_failures(rep, "cocycle", "b̃(st) = π̃(s)b̃(t) + b̃(s)", res["failures"], pairs=res["checked"])

    quarter = G.ball(max(maxlen // 3, 1))
    triples = [(rng.choice(quarter), rng.choice(quarter), tilde.cocycle(rng.choice(quarter)))
               for _ in range(samples)]
    res = act.verify_representation(tilde, triples)
    _record_failures(rep, "representation", "π̃(st) = π̃(s)π̃(t), π̃(e) = id", res["failures"],
                     samples=res["checked"])
    res = act.verify_lipschitz(tilde, [(s, v) for s, _, v in triples])
    bad = [{"sample": i} for i, (s, _, v) in enumerate(triples)
           if tilde.norm_power(tilde.apply_linear(s, v)) != tilde.norm_power(v)]
    _record_failures(rep, "isometry", "||π̃(s)v|| = ||v||", bad, samples=len(triples))
    return rep


def scenario_theorem12(group="product(cyclic:2,cyclic:3)", radius=4, seed=0, samples=30, cap=None,
                       p=1) -> Report:
    if p != 1:
        raise InvalidInput("direct sums are formed in ℓ¹ (p = 1)")
    G = parse_group(group)
    rep = Report("verify-action theorem12", {"group": group, "radius": radius, "seed": seed})
    ball, vertex_action, tested, pool, L = _free_space_setup(G, radius, cap)
    parts = [act.free_space_action(ball.pg, G, vertex_action), act.regular_action(G, 1)]
    if isinstance(G, FreeProduct):
        parts.append(_lemma72_action(G, 1, radius, cap)[3])
    total = act.direct_sum_action(parts)
    rep.data["components"] = [a.name for a in parts]

    bad = []
    for s in tested:
        whole = total.orbit_norm_power(s)
        pieces = [a.orbit_norm_power(s) for a in parts]
        if whole != sum(pieces):
            bad.append({"s": _fmt(G, s), "sum": whole, "parts": pieces})
    _record_failures(rep, "additivity", "||σ(s)0|| = Σ_i ||σ_i(s)0|| in the ℓ¹ sum", bad, tested=len(tested))

    res = act.verify_cocycle(total, _pairs_within(G, tested, 2 * L))
    _record_failures(rep, "cocycle", "componentwise cocycle identity", res["failures"], pairs=res["checked"])

    growth = act.orbit_growth_report(total, G, elements=tested)
    rep.check("orbit-growth", growth["A"] is not None, "orbits grow at least linearly on the tested ball",
              A=growth["A"], label=growth["label"])
    rep.data["growth"] = growth
    return rep


def scenario_cor13(group="product(cyclic:2,cyclic:3)", radius=6, seed=0, samples=30, cap=None, p=1) -> Report:
    G = parse_group(group)
    rng = XorShift64Star(seed)
    rep = Report("verify-action cor13", {"group": group, "radius": radius, "seed": seed, "p": p})
    if isinstance(G, FreeProduct):
        tilde = _lemma72_action(G, p, radius, cap)[3]
        G = tilde.group
        elems = G.ball(radius)

        def rand_vec():
            return tilde.cocycle(rng.choice(elems[: max(1, len(elems) // 4)])) * rng.fraction()
    else:
        if p != 1:
            raise InvalidInput("the free-space action is measured with p = 1")
        ball, vertex_action, elems, pool, _ = _free_space_setup(G, radius, cap)
        tilde = act.free_space_action(ball.pg, G, vertex_action)
        if G.order is None:
            elems = list(ball.elements)

        def rand_vec():
            return random_free_vector(rng, ball.pg, vertices=pool)

    growth = act.orbit_growth_report(tilde, G, elements=elems)
    rep.check("orbit-growth", growth["A"] is not None and growth["proper_evidence"],
              "||σ(s)0|| >= |s|/A - A on the tested ball", A=growth["A"], label=growth["label"])
    rep.data["growth"] = growth
    rep.data["action"] = tilde.name

    control = act.orbit_growth_report(act.trivial_action(G, p), G, elements=elems)
    rep.check("trivial-control", control["A"] is None and not control["proper_evidence"],
              "the trivial action is flagged as not proper", A=control["A"])

    if p == 1:
        bad = []
        for _ in range(samples):
            s = rng.choice(tested_for_shift(G, elems, radius))
            v = rand_vec()
            try:
                lhs = tilde.norm_power(tilde.apply(s, v))
            except QTFError:
                continue
            rhs = tilde.orbit_norm_power(s) - tilde.lipschitz_bound * tilde.norm_power(v)
            if lhs < rhs:
                bad.append({"s": _fmt(G, s), "lhs": lhs, "rhs": rhs})
        _record_failures(rep, "perturbation", "||σ(s)v|| >= ||σ(s)0|| - C||v||", bad, samples=samples)
    else:
        rep.skip("perturbation", "||σ(s)v|| >= ||σ(s)0|| - C||v||",
                 "triangle inequality on p-th powers is not exact for p > 1")
    return rep


def tested_for_shift(G, elems, radius):
    """Elements short enough that moving a sampled vector stays inside the materialized ball."""
    if G.order is not None:
        return elems
    return [g for g in elems if G.word_length(g) <= radius // 2]


RUNNERS = {
    "lemma61": scenario_lemma61,
    "lemma24": scenario_lemma24,
    "lemma72": scenario_lemma72,
    "theorem12": scenario_theorem12,
    "cor13": scenario_cor13,
}


def run_scenario(name: str, group=None, radius=None, maxlen=None, p=1, seed=0, cap=None) -> Report:
    key = ALIASES.get(name, name)
    if key not in RUNNERS:
        raise InvalidInput(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")
    kwargs: dict = {"seed": seed, "p": p}
    if group is not None:
        kwargs["group"] = group
    if key in ("lemma61", "theorem12", "cor13"):
        if radius is not None:
            kwargs["radius"] = radius
        kwargs["cap"] = cap
    elif maxlen is not None or radius is not None:
        kwargs["maxlen"] = maxlen if maxlen is not None else radius
    if key == "lemma72":
        kwargs["cap"] = cap
    for k in ("radius", "maxlen"):
        if k in kwargs and kwargs[k] < 1:
            raise InvalidInput(f"{k} must be positive")
    return RUNNERS[key](**kwargs)


# ---------------------------------------------------------------------------
# demo corpus


def _graph_json(pg: PointedGraph, **extra) -> dict:
    out = pg.to_json()
    out.update(extra)
    return out


def demo_corpus(seed: int = 0) -> dict[str, dict]:
    """File name -> JSON object for the bundled example corpus."""
    rng = XorShift64Star(seed)
    files: dict[str, dict] = {
        "graphs/path3.json": _graph_json(path_graph(3)),
        "graphs/cycle4.json": _graph_json(cycle_graph(4)),
        "graphs/cycle5.json": _graph_json(cycle_graph(5)),
        "graphs/cycle6.json": _graph_json(cycle_graph(6)),
        "graphs/star3.json": _graph_json(star_graph(3)),
        "graphs/grid2x4.json": _graph_json(grid_graph(2, 4)),
        "vectors/star3.json": {"coeffs": {"1": "1", "2": "1", "3": "-2"}},
    }
    for i in range(3):
        n = rng.randint(5, 15)
        files[f"graphs/random_tree_{i}.json"] = _graph_json(random_tree(rng, n))
    for spec, radius in (("free:2", 3), ("cyclic:6", 3), ("product(cyclic:2,cyclic:3)", 4)):
        G = parse_group(spec)
        ball = cayley_ball(G, radius)
        name = spec.replace(":", "").replace("(", "_").replace(")", "").replace(",", "_")
        files[f"cayley/{name}_r{radius}.json"] = _graph_json(
            ball.pg, group=spec, radius=radius, labels=[_fmt(G, g) for g in ball.elements])
    for a, b, radius in ((2, 2, 6), (2, 3, 5)):
        tree = bass_serre_ball(cyclic_group(a), cyclic_group(b), radius)
        files[f"bass_serre/z{a}_z{b}_r{radius}.json"] = _graph_json(
            tree.pg, group=f"product(cyclic:{a},cyclic:{b})", radius=radius,
            labels=[[f, _fmt(tree.group, w)] for f, w in tree.labels])
    return files


def run_demo(output: str | None, seed: int = 0) -> Report:
    rep = Report("demo", {"output": output, "seed": seed})
    files = demo_corpus(seed)
    if output is not None:
        root = Path(output)
        for name, obj in files.items():
            path = root / name
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    analyses = {}
    from .graph_metric import parse_graph

    for name, obj in files.items():
        if name.startswith("vectors/"):
            continue
        sub = run_analyze(parse_graph(obj), name)
        analyses[name] = {"delta_star": sub.data.get("delta_star"), "classes": len(sub.data.get("classes", [])),
                          "summary": sub.summary()}
        rep.check(f"analyze {name}", not sub.failed, "graph analysis checks on the corpus",
                  failed=[c["name"] for c in sub.failed])
    rep.data["files"] = sorted(files)
    rep.data["analyses"] = analyses
    return rep

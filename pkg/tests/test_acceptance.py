"""The ten acceptance criteria, each at its stated size and tolerance.

Every test records one PASS/FAIL line (shown in the pytest terminal summary
and printed when run with -s) before asserting.
"""

import itertools
import json
import random
import time
from pathlib import Path

import pytest

from generators import corpus, exponent_expression, guarded_formula, normalized_expression, qf_formula
from wreathsack.abelian import AbelianGroupSpec
from wreathsack.expr import brute_force_solve, is_solution, naive_evaluate
from wreathsack.periodic import PeriodicProduct, membership, word_problem
from wreathsack.presburger import eliminate_quantifiers, evaluate, formula_to_semilinear, is_quantifier_free
from wreathsack.reductions import all_instances, brute_force_matching, reduce_3dm
from wreathsack.solver_np import (
    TOP,
    Certificate,
    CycleCompression,
    MalformedCertificate,
    bounded_decomposition,
    build_block_nfa,
    cayley_representation,
    certificate_from_solution,
    check_bounded,
    expression_factors,
    in_bounded_product,
    pad,
    parse_cell,
    run_trace,
    sample_accepted,
    verify_certificate,
)
from wreathsack.solver_np.cayley import Marked
from wreathsack.solver_semilinear import Analysis, is_solvable, solution_set
from wreathsack.wreath import WreathProduct
from wreathsack.expr import parse_expression

DATA = Path(__file__).parent / "data"
BOX = 6


@pytest.fixture(scope="module")
def oracle_corpus():
    """(expression, group, oracle solutions in [0,6]^V) for the 500-instance corpus."""
    out = []
    for e, spec in corpus(size=500):
        W = WreathProduct(spec)
        out.append((e, W, brute_force_solve(e, BOX, W)))
    return out


def test_c01_oracle_equivalence(oracle_corpus, report):
    t0 = time.perf_counter()
    bad = []
    for e, W, sols in oracle_corpus:
        S = solution_set(e, W)
        names = e.variables
        mine = {v for v in itertools.product(range(BOX + 1), repeat=len(names)) if S.member(v)}
        want = {tuple(nu[x] for x in names) for nu in sols}
        if mine != want:
            bad.append((str(e), W, sorted(mine ^ want)[:3]))
    dt = time.perf_counter() - t0
    ok = not bad and len(oracle_corpus) >= 500 and dt <= 300
    report(1, ok, f"{len(oracle_corpus)} instances, {len(bad)} mismatches, {dt:.1f}s (limit 300s)")
    assert ok, bad[:5]


def _random_pairs(n, seed):
    rng = random.Random(seed)
    pairs = []
    for e, spec in corpus(seed=seed, size=n // 4):
        W = WreathProduct(spec)
        sols = brute_force_solve(e, 4, W)
        for nu in sols[:2]:
            pairs.append((e, W, nu))
    while len(pairs) < n:
        e = normalized_expression(rng) if rng.random() < 0.7 else exponent_expression(rng)
        W = WreathProduct(rng.choice(["Z/2", "Z", "Z/3", "Z^2"]))
        pairs.append((e, W, {x: rng.randint(0, 6) for x in e.variables}))
    return pairs


def test_c02_characterization(report):
    pairs = _random_pairs(2000, 21)
    disagree = sols = 0
    for e, W, nu in pairs:
        an = Analysis(e, W)
        lhs = W.is_identity(naive_evaluate(e, nu, W))
        rhs = an.sigma_ok(nu) and all(
            evaluate(an.cancelling_formula(C), nu) for C in an.cluster_map(nu).values()
        )
        sols += lhs
        disagree += lhs != rhs
    ok = len(pairs) >= 2000 and disagree == 0
    report(2, ok, f"{len(pairs)} pairs ({sols} solutions), {disagree} disagreements")
    assert ok


def _kappa(an, C, nu):
    free, tors = an.cancelling_terms(C)
    return [t.evaluate(nu) for t in free] + [t.evaluate(nu) % d for d, t in tors]


def test_c03_separation(report):
    rng = random.Random(31)
    triples = disagree = 0
    for e, W, nu in _random_pairs(700, 32):
        an = Analysis(e, W)
        g = naive_evaluate(e, nu, W)
        clusters = an.cluster_map(nu)
        lamps = g.as_dict()
        hs = set(lamps) | set(clusters)
        lo, hi = (min(hs), max(hs)) if hs else (0, 0)
        hs |= {rng.randint(lo - 3, hi + 3) for _ in range(2)}
        for h in sorted(hs):
            want = lamps.get(h, W.base.identity()).to_list()
            got = _kappa(an, clusters.get(h, frozenset()), nu)
            triples += 1
            disagree += want != got
    ok = triples >= 2000 and disagree == 0
    report(3, ok, f"{triples} (E, nu, h) triples, {disagree} disagreements")
    assert ok


def test_c04_cayley_golden(report):
    fx = json.loads((DATA / "cayley_golden.json").read_text())
    W = WreathProduct(fx["group"])
    r = cayley_representation(parse_expression(fx["expression"]), W, fx["valuation"])
    got = []
    for p, cell in zip(range(r.start, r.start + len(r)), r.cells):
        got.append(
            {
                "position": p,
                "const": cell.expr.const.to_list(),
                "coeffs": {v: g.to_list() for v, g in cell.expr.coeffs},
                "top": cell.top,
                "bottom": cell.bottom,
            }
        )
    want = [dict(c, top=c.get("top", False), bottom=c.get("bottom", False)) for c in fx["cells"]]
    ok = (
        got == want
        and list(r.interval) == fx["interval"]
        and r.top_position == fx["top"]
        and r.bottom_position == fx["bottom"]
    )
    report(4, ok, f"{len(got)} cells, interval {list(r.interval)}, top {r.top_position}, bottom {r.bottom_position}")
    assert ok


def test_c05_run_golden(report):
    fx = json.loads((DATA / "run_golden.json").read_text())
    W = WreathProduct(fx["group"])
    nfa = build_block_nfa(fx["block"].split(), "x", W)
    word = [parse_cell(s, W.base) for s in fx["word"]]
    trace = run_trace(nfa, word)
    want = [TOP if s == "top" else tuple(s) for s in fx["states"]]
    ok = nfa.accepts(word) and trace == want
    report(5, ok, f"accepted={nfa.accepts(word)}, trace of {len(want)} states {'matches' if trace == want else 'differs'}")
    assert ok, trace


def _mutate(c, rng):
    fs = [list(cc.factors) for cc in c.factors]
    exps = dict(c.x1_exponents)
    kind = rng.choice(["length", "marker", "exponent"])
    if kind == "exponent" and not exps:
        kind = "length"
    if kind == "length":
        a = rng.randrange(len(fs))
        nonempty = [i for i, (beta, _) in enumerate(fs[a]) if beta]
        if not nonempty:
            return _mutate(c, rng)
        b = rng.choice(nonempty)
        beta, n = fs[a][b]
        fs[a][b] = (beta, n + 1 if n == 0 or rng.random() < 0.5 else n - 1)
    elif kind == "marker":
        a = rng.randrange(len(fs))
        nonempty = [i for i, (beta, n) in enumerate(fs[a]) if beta and n]
        if not nonempty:
            return _mutate(c, rng)
        b = rng.choice(nonempty)
        beta, n = fs[a][b]
        j = rng.randrange(min(len(beta), n))
        m = beta[j]
        m = Marked(m.expr, not m.top, m.bottom) if rng.random() < 0.5 else Marked(m.expr, m.top, not m.bottom)
        fs[a][b] = (beta[:j] + (m,) + beta[j + 1 :], n)
    else:
        v = rng.choice(sorted(exps))
        exps[v] = exps[v] + 1 if exps[v] == 0 or rng.random() < 0.5 else exps[v] - 1
    return kind, fs, exps


def test_c06_certificates(oracle_corpus, report):
    rng = random.Random(61)
    pool, rejected = [], 0
    for e, W, sols in oracle_corpus:
        for nu in sols:
            cert = Certificate.from_json(certificate_from_solution(e, nu, W).to_json(W), W)
            v = verify_certificate(e, cert, W)
            if v and is_solution(e, v.valuation, W):
                pool.append((e, W, cert))
            else:
                rejected += 1
    n_sol = sum(len(s) for _, _, s in oracle_corpus)
    accepted_mutants = 0
    for _ in range(1000):
        e, W, cert = rng.choice(pool)
        kind, fs, exps = _mutate(cert, rng)
        try:
            mutant = Certificate([CycleCompression(tuple(f)) for f in fs], exps)
            accepted_mutants += bool(verify_certificate(e, mutant, W))
        except (MalformedCertificate, ValueError):
            pass
    ok = rejected == 0 and accepted_mutants == 0 and n_sol > 0
    report(6, ok, f"{n_sol} solutions certified ({rejected} rejected); 1000 mutants, {accepted_mutants} accepted")
    assert ok


def test_c07_bounded_languages(oracle_corpus, report):
    rng = random.Random(71)
    seen = set()
    n_nfa = unbounded = violations = short = 0
    for e, W, _ in oracle_corpus:
        for f in expression_factors(e):
            key = (f.word, f.var, str(W.base))
            if key in seen:
                continue
            seen.add(key)
            raw = build_block_nfa(f.word, f.var, W)
            for nfa in (raw, pad(raw, W.base)):
                n_nfa += 1
                if not check_bounded(nfa):
                    unbounded += 1
                    continue
                betas = bounded_decomposition(nfa)
                for _ in range(200):
                    w = sample_accepted(nfa, rng, max_len=40)
                    if w is None:
                        short += 1
                    elif not in_bounded_product(w, betas):
                        violations += 1
    ok = unbounded == 0 and violations == 0 and short == 0
    report(7, ok, f"{n_nfa} automata, {unbounded} unbounded, {violations} violations, {short} failed samples")
    assert ok


def _random_product(rng):
    spec = rng.choice(["Z", "Z/2", "Z/3"])
    G = AbelianGroupSpec.parse(spec)
    rows = []
    for _ in range(rng.randint(1, 4)):
        q = rng.randint(1, 5)
        if spec == "Z":
            rows.append([rng.randint(-3, 3) if rng.random() < 0.4 else 0 for _ in range(q)])
        else:
            rows.append([rng.randrange(G.torsion_orders[0]) if rng.random() < 0.4 else 0 for _ in range(q)])
    if rng.random() < 0.4:
        # cancel one word with a repeated negated copy so that f vanishes more often
        u = rows[0]
        rows.append([-v for v in u] * rng.randint(1, 2))
    return spec, rows


def _direct_values(spec, rows, n):
    """f(0..n-1) straight from the definition."""
    G = AbelianGroupSpec.parse(spec)
    out = []
    for pos in range(n):
        s = sum(row[pos % len(row)] for row in rows)
        out.append(s % G.torsion_orders[0] if G.torsion_orders else s)
    return out


def test_c08_periodic(report):
    rng = random.Random(81)
    disagree = windows = window_fail = wp_fail = 0
    for _ in range(1000):
        spec, rows = _random_product(rng)
        p = PeriodicProduct.from_ints(spec, rows)
        L, S = p.lcm(), p.total_period()
        vals = _direct_values(spec, rows, 2 * L + S + 1)
        zero_prefix = [True]
        for v in vals:
            zero_prefix.append(zero_prefix[-1] and v == 0)
        for m in range(2 * L + 1):
            disagree += membership(p, m) != zero_prefix[m]
        wp_fail += word_problem(p) != all(v == 0 for v in vals[:L])
        for m in range(S, len(vals)):
            if all(v == 0 for v in vals[m - S : m]):
                windows += 1
                window_fail += vals[m] != 0
    big = PeriodicProduct.from_ints("Z", [[1, -1], [-1, 1]])
    t0 = time.perf_counter()
    big_ok = membership(big, 2**100)
    dt = time.perf_counter() - t0
    ok = disagree == 0 and window_fail == 0 and wp_fail == 0 and big_ok and dt < 1.0 and windows > 0
    report(
        8,
        ok,
        f"1000 products, {disagree} membership disagreements, {windows} windows ({window_fail} failures), "
        f"2^100 query {dt * 1e3:.2f} ms",
    )
    assert ok


def test_c09_three_dm(report):
    t0 = time.perf_counter()
    checked = 0
    mismatches = []
    for q in (1, 2):
        for inst in all_instances(q, 4):
            truth = brute_force_matching(inst)
            for lamp in ("Z/2", "Z"):
                W = WreathProduct(lamp)
                for subset_sum in (False, True):
                    e = reduce_3dm(inst, lamp, binary_moves=subset_sum)
                    nu = is_solvable(e, W, subset_sum=subset_sum)
                    if nu is not None:
                        assert is_solution(e, nu, W)
                        assert not subset_sum or max(nu.values(), default=0) <= 1
                    checked += 1
                    if (nu is not None) != truth:
                        mismatches.append((inst.to_text(), lamp, subset_sum))
    dt = time.perf_counter() - t0
    ok = not mismatches and dt <= 600
    report(9, ok, f"{checked} reductions (q<=2, t<=4, Z/2 and Z, plain and subset-sum), {len(mismatches)} mismatches, {dt:.1f}s")
    assert ok, mismatches[:5]


def test_c10_presburger(report):
    rng = random.Random(101)
    qe_bad = qf_bad = 0
    for i in range(5000):
        f = guarded_formula(rng, ["a", "b"], 1 + i % 3, 4)
        g = eliminate_quantifiers(f)
        qf_bad += not is_quantifier_free(g) or not g.free_vars() <= {"a", "b"}
        for _ in range(4):
            env = {"a": rng.randint(-3, 3), "b": rng.randint(-3, 3)}
            qe_bad += evaluate(f, env, witness_bound=4) != evaluate(g, env)
    sl_bad = points = 0
    for i in range(240):
        k = 1 + i % 3
        names = ["a", "b", "c"][:k]
        f = guarded_formula(rng, names, 1, 9) if k < 3 and i % 2 else qf_formula(rng, names)
        S = formula_to_semilinear(f, names)
        back = formula_to_semilinear(S.to_formula(names), names)
        for v in itertools.product(range(9), repeat=k):
            env = dict(zip(names, v))
            truth = evaluate(f, env, witness_bound=9)
            points += 1
            sl_bad += S.member(v) != truth or back.member(v) != truth
    ok = qe_bad == 0 and qf_bad == 0 and sl_bad == 0
    report(10, ok, f"5000 QE formulas ({qe_bad} mismatches), 240 round trips over {points} points ({sl_bad} mismatches)")
    assert ok

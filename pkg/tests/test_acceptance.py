"""One PASS/FAIL line per acceptance criterion.

Criteria whose reference values cannot be reproduced are xfail(strict=True):
they print FAIL and must keep failing until the analysis changes.
"""

import random
import time
from fractions import Fraction as F

import pytest

from conftest import ACCEPTANCE_LINES
from corpus import CORPUS, corpus_types, pointed
from fission_lab.config_spaces import factorize
from fission_lab.cyclotomic import Cyc, zeta
from fission_lab.fission_trees import (
    FissionError,
    build_tree,
    enhance,
    fission_distinct,
    fission_distinct_oracle,
    random_realization,
    realize,
    tree_iso,
)
from fission_lab.level_data import admissible_exponents, level_datum_BC
from fission_lab.puiseux_core import ExpFactor, parse_factor
from fission_lab.tree_weyl import act, tree_weyl_group
from fission_lab.weyl_oracle import (
    filtration,
    flat_dims,
    marking_independence,
    monodromy_group,
    order_of_minus_root,
    parabolic,
    dominant_levi_subsets,
    roots,
    stratum_components,
    untwist,
    validate_classification,
)

P = parse_factor


def report(capsys, criterion, failures, started):
    status = "FAIL" if failures else "PASS"
    line = f"{status} criterion {criterion} ({time.perf_counter() - started:.1f}s)"
    if failures:
        line += ": " + "; ".join(failures[:6]) + (f" (+{len(failures) - 6} more)" if len(failures) > 6 else "")
    ACCEPTANCE_LINES.append(line)
    with capsys.disabled():
        print("\n" + line)
    assert not failures, line


def fs(*xs):
    return frozenset(F(x) for x in xs)


def desc(*xs):
    return tuple(sorted((F(x) for x in xs), reverse=True))


# reference values as printed: (factor, L_BC, S, L_A, L+, Adm, Inc); None = not stated
PAPER_CIRCLES = [
    ("z^-2", desc(2), fs(2), fs(), fs(), fs(1, 2), fs(1)),
    ("z^(-5/3)", desc("5/3"), fs(), fs("5/3"), fs(), fs("1/3", "2/3", 1, "4/3", "5/3"), fs("1/3", "2/3", 1, "4/3")),
    ("z^(-3/2)", desc("3/2"), fs(), fs("3/2"), fs(), fs("1/2", 1, "3/2"), fs("1/2", 1)),
    ("z^(-3/2)+z^-1", desc("3/2", 1), fs(), fs("3/2"), fs(1), fs("3/2", 1, "1/2"), fs("1/2")),
    ("z^(-3/2)+z^(-1/2)", desc("3/2"), fs(), fs("3/2"), fs(), fs("3/2", "1/2"), fs()),
    ("z^(-3/2)+z^(-5/6)+z^(-1/3)", desc("3/2", "5/6", "1/3"), None, None, None,
     fs("3/2", "5/6", "1/2", "1/3", "1/6"), fs("1/2", "1/6")),
    ("z^(-3/2)+z^(-5/6)+z^(-2/3)+z^(-1/3)", desc("3/2", "5/6", "2/3"), None, None, None,
     fs("3/2", "5/6", "2/3", "1/2", "1/3", "1/6"), fs("1/2", "1/6")),
]


def fmt(s):
    return "{" + ", ".join(str(x) for x in sorted(s, reverse=True)) + "}"


@pytest.mark.xfail(strict=True, reason="two printed Inc sets and the even-denominator Adm claim disagree with Adm minus L")
def test_criterion_1_1_bc_levels_and_exponents(capsys):
    t = time.perf_counter()
    failures = []
    for text, levels, s, a, plus, adm, inc in PAPER_CIRCLES:
        d = level_datum_BC(P(text), verify=True)
        got_adm, got_inc = admissible_exponents(d)
        checks = [("L_BC", d.levels, levels), ("Adm", got_adm, adm), ("Inc", got_inc, inc)]
        if s is not None:
            checks += [("S", set(d.s_part), s), ("L_A", set(d.a_part), a), ("L+", set(d.plus_part), plus)]
        for what, got, want in checks:
            if set(got) != set(want):
                failures.append(f"{text} {what} {fmt(got)} != {fmt(want)}")
    report(capsys, "1.1", failures, t)


BC_EXAMPLE = [(1, "z^-1+z^(-1/2)+z^(-1/3)"), (1, "z^(-1/2)+z^(-1/6)"), (1, "z^(-1/2)+z^(-1/4)"), (1, "z^(-1/2)+2*z^(-1/4)")]
D_EXAMPLE = [(2, "0"), (1, "z^-2"), (1, "2*z^-2"), (1, "z^-3"), (1, "z^-3+z^(-3/2)")]


def test_criterion_1_2_bc_example_tree(capsys):
    t = time.perf_counter()
    T = build_tree(pointed("BC", BC_EXAMPLE))
    Fz = factorize(T)
    failures = []
    if str(Fz) != "C x (C*)^5 x M#(4,2)":
        failures.append(f"factorization {Fz}")
    if Fz.dimension != 8:
        failures.append(f"dimension {Fz.dimension}")
    if (len(T.mandatory()), len(T.inconsequential())) != (7, 1):
        failures.append(f"{len(T.mandatory())} mandatory, {len(T.inconsequential())} inconsequential")
    report(capsys, "1.2", failures, t)


@pytest.mark.xfail(strict=True, reason="tree gives C^6 x (C*)^2 x M#(2,2) with hybridation at height 3")
def test_criterion_1_3_d_example_tree(capsys):
    t = time.perf_counter()
    T = build_tree(pointed("D", D_EXAMPLE))
    Fz = factorize(T)
    failures = []
    expected = "C^4 x (C*)^2 x M(1,2) x M#(2,2)"
    if str(Fz) != expected:
        failures.append(f"factorization {Fz} != {expected}")
    if Fz.dimension != 10:
        failures.append(f"dimension {Fz.dimension}")
    heights = sorted({T.leaf_info[b].hybrid_height for b in (2, 3)})
    if heights != [F(2)]:
        failures.append(f"hybridation heights {[str(h) for h in heights]} != [2]")
    report(capsys, "1.3", failures, t)


def test_criterion_1_4_need_for_enhancement(capsys):
    t = time.perf_counter()
    failures = []
    bad = enhance([(1, P("z^(-1/2)"))])
    if bad.ok or bad.global_sign != -1:
        failures.append("(1, z^-1/2) accepted")
    try:
        pointed("D", [(1, "z^(-1/2)")])
        failures.append("(1, z^-1/2) built as a D type")
    except FissionError:
        pass
    for text in ("z^-1", "3*z^-1", "0"):
        if not enhance([(1, P(text))]).ok:
            failures.append(f"(1, {text}) rejected")
    report(capsys, "1.4", failures, t)


@pytest.mark.xfail(strict=True, reason="twisted D clauses 3 and 4 disagree with the brute force at m = 4")
def test_criterion_2_classification(capsys):
    t = time.perf_counter()
    failures = []
    runs = [("A", m, r, False) for m in range(1, 7) for r in range(1, m + 1)]
    runs += [("BC", m, r, False) for m in range(1, 5) for r in range(1, 2 * m + 2)]
    runs += [("D", 4, r, tw) for r in range(1, 11) for tw in (False, True)]
    for case, m, r, tw in runs:
        rep = validate_classification(case, m, r, tw)
        for clause, ok in rep.verdicts.items():
            if not ok:
                failures.append(f"{case}{m}{' twisted' if tw else ''} r={r} {clause} (dims {list(rep.dims)}, hyperplanes {list(rep.hyperplanes)})")
    for r in range(1, 49):
        x, n = -zeta(r), 1
        while x != 1:
            x, n = x * -zeta(r), n + 1
        if order_of_minus_root(r) != n or n != (2 * r if r % 2 else (r // 2 if r % 4 == 2 else r)):
            failures.append(f"order of -zeta_{r}")
    report(capsys, "2", failures, t)


def test_criterion_3_order_identity(capsys):
    t = time.perf_counter()
    failures = []
    items = corpus_types()
    assert len(items) >= 20 and all(pt.rank <= 5 for _, pt in items)
    for name, pt in items:
        tree = tree_weyl_group(build_tree(pt)).order
        oracle = monodromy_group(untwist(pt)).order
        if tree != oracle:
            failures.append(f"{name}: tree {tree}, oracle {oracle}")
    report(capsys, "3", failures, t)


GRID = [Cyc.rational(0)] + [zeta(24, j) for j in range(24)] + [2 * zeta(24, j) for j in (0, 3, 8)]
BRANCHES = [
    ("tame common part", "BC", "0", [1, F(1, 3), F(1, 2), F(1, 4)]),
    ("nonspecial common part", "BC", "z^-2", [1, F(1, 2)]),
    ("nonspecial ramified common part", "BC", "z^(-1/3)", [F(1, 6)]),
    ("special common part", "BC", "z^(-3/2)", [1, F(1, 2), F(1, 3), F(1, 4), F(1, 6)]),
    ("special common part, no breaking", "BC", "z^(-3/2)+z^(-5/6)", [F(1, 2), F(1, 3)]),
    ("special common part, N = 2", "BC", "z^(-1/2)", [F(1, 4)]),
    ("type A", "A", "z^-1", [F(1, 2)]),
    ("D override", "D", "0", [1, F(3, 2), F(1, 3)]),
]


def test_criterion_4_fission_table(capsys):
    t = time.perf_counter()
    failures = []
    for label, case, qc, ks in BRANCHES:
        q = P(qc)
        for k in ks:
            bad = sum(
                1 for a in GRID for b in GRID if fission_distinct(q, a, b, k, case) != fission_distinct_oracle(q, a, b, k, case)
            )
            if bad:
                failures.append(f"{label} qc={qc} k={k}: {bad} disagreements")
    units = GRID[1:]
    worked = [
        ("0", F(1, 3), lambda a, b: a**6 != b**6),
        ("z^(-3/2)", 1, lambda a, b: a != b and a != -b),
        ("z^(-1/2)", F(1, 4), lambda a, b: a**4 != b**4),
    ]
    for qc, k, rule in worked:
        if any(fission_distinct(P(qc), a, b, k) != rule(a, b) for a in units for b in units):
            failures.append(f"worked example qc={qc} k={k}")
    report(capsys, "4", failures, t)


# nonzero values: a vanishing inconsequential coefficient drops a level from the rebuilt tree
POOL = [zeta(24, j) * c for j in range(24) for c in (1, 2, 3)]


def phi_chain(U):
    every = frozenset(range(len(roots(U.case, U.m))))
    out = []
    for _, phi in sorted(filtration(U).items(), reverse=True):
        if phi != every and (not out or out[-1] != phi):
            out.append(phi)
    return tuple(out)


def test_criterion_5_properties(capsys):
    t = time.perf_counter()
    rng = random.Random(20261014)
    items = corpus_types()
    failures = []
    for n in range(200):
        name, pt = items[rng.randrange(len(items))]
        T = build_tree(pt)
        p1 = realize(T, random_realization(T, rng, POOL))
        p2 = realize(T, random_realization(T, rng, POOL))
        U1, U2 = untwist(p1), untwist(p2)
        same_tree = tree_iso(build_tree(p1), build_tree(p2), labelled=True)
        if not (same_tree and phi_chain(U1) == phi_chain(U2) and U1.g == U2.g):
            failures.append(f"deformation triple {n} ({name})")
    for n in range(100):
        name, pt = items[rng.randrange(len(items))]
        T = build_tree(pt)
        G = tree_weyl_group(T)
        elems = list(G.elements())
        g = elems[rng.randrange(len(elems))]
        Q = realize(T, random_realization(T, rng, POOL))
        R = act(G, g, Q)
        moved = tuple(e.factor for e in R.entries) != tuple(e.factor for e in Q.entries)
        if not tree_iso(build_tree(R), T, labelled=True) or moved == g.is_identity():
            failures.append(f"action pair {n} ({name})")
    subregular = [c for c in items if c[1].rank <= 4]
    done = 0
    while done < 50:
        name, pt = subregular[rng.randrange(len(subregular))]
        T = build_tree(pt)
        U = untwist(realize(T, random_realization(T, rng, POOL)))
        if not filtration(U)[U.s]:
            continue  # a regular leading coefficient is not subregular
        done += 1
        if not marking_independence(U):
            failures.append(f"marking independence ({name})")
    for name, pt in items:
        T = build_tree(pt)
        dims = sum(f.eigen_dim for f in flat_dims(untwist(pt)))
        if not dims == len(T.admissible()) == factorize(T).dimension:
            failures.append(f"dimension identity ({name})")
    report(capsys, "5", failures, t)


def test_criterion_6_strata(capsys):
    t = time.perf_counter()
    failures = []
    checked = 0
    for case, ms in [("A", range(1, 5)), ("BC", range(1, 4))]:
        for m in ms:
            for r in range(1, 2 * m + 1):
                for sub in dominant_levi_subsets(case, m):
                    res = stratum_components(case, m, r, parabolic(case, m, sub))
                    if res.component_count and res.transitive and not res.obstruction:
                        checked += 1
                        if res.component_count != res.index:
                            failures.append(f"{case}{m} r={r} {sub}: {res.component_count} != {res.index}")
    if not checked:
        failures.append("no nonempty strata")
    rs = roots("D", 5)
    phi = frozenset(n for n, a in enumerate(rs) if all(x == 0 for x in a[3:]) and sum(a[:3]) == 0)
    if not stratum_components("D", 5, 2, phi, budget=10**5).obstruction:
        failures.append("counterexample obstruction flag not raised")
    report(capsys, "6", failures, t)

from math import factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from corpus import CORPUS, corpus_types
from fission_lab.budget import BudgetExceeded
from fission_lab.cyclotomic import Cyc, zeta
from fission_lab.weyl_oracle import (
    SignedPerm,
    covering_degree,
    dominant_levi_subsets,
    eigenspace,
    eigenspace_fast,
    flat_dims,
    group_order,
    is_regular_space,
    marking_independence,
    max_eigenspace_dim,
    monodromy_group,
    order_of_minus_root,
    orbit_generators,
    parabolic,
    roots,
    span_key,
    springer_degrees,
    stratum_components,
    untwist,
    validate_classification,
    weyl_group,
)

IDS = [c[0] for c in CORPUS]
SMALL = [c for c in corpus_types() if c[1].rank <= 4]


def signed_perms(m):
    return st.permutations(range(1, m + 1)).flatmap(
        lambda p: st.lists(st.sampled_from([1, -1]), min_size=m, max_size=m).map(
            lambda s: SignedPerm(tuple(a * b for a, b in zip(p, s)))
        )
    )


class TestSignedPerm:
    def test_rejects_non_permutations(self):
        with pytest.raises(ValueError):
            SignedPerm((1, 1))

    def test_cycles(self):
        g = SignedPerm.from_cycles(4, [(1, 2, 3)], [True])
        assert g.cycle_type() == ((1, 1), (3, -1))
        assert g.order() == 6
        assert not g.in_D()

    @given(signed_perms(4), signed_perms(4), signed_perms(4))
    def test_group_laws(self, a, b, c):
        assert (a * b) * c == a * (b * c)
        assert (a * a.inverse()).is_identity()
        v = tuple(Cyc.rational(n) for n in (1, 2, 3, 5))
        assert (a * b).act(v) == a.act(b.act(v))

    @given(signed_perms(5))
    def test_order_is_minimal(self, g):
        n = g.order()
        x = SignedPerm.identity(5)
        for i in range(1, n + 1):
            x = g * x
            assert x.is_identity() == (i == n)


@pytest.mark.parametrize("m", range(1, 5))
def test_group_orders(m):
    assert len(weyl_group("A", m)) == group_order("A", m) == factorial(m)
    assert len(weyl_group("BC", m)) == group_order("BC", m) == 2**m * factorial(m)
    if m >= 2:
        assert len(weyl_group("D", m)) == group_order("D", m) == 2 ** (m - 1) * factorial(m)
        assert len(weyl_group("Dtw", m)) == 2 ** (m - 1) * factorial(m)


@pytest.mark.parametrize("m", range(2, 6))
def test_root_counts(m):
    assert len(roots("A", m)) == m * (m - 1)
    assert len(roots("BC", m)) == 2 * m * m
    assert len(roots("D", m)) == 2 * m * (m - 1)


def test_budget_is_enforced():
    with pytest.raises(BudgetExceeded):
        weyl_group("BC", 4, budget=100)


@pytest.mark.parametrize("m", range(1, 5))
def test_fast_eigenspaces_match_exact_kernels(m):
    for g in weyl_group("BC", m):
        for r in sorted({1, 2} | {len(p) * (1 if s == 1 else 2) for p, s in g.cycles()}):
            for j in range(r):
                z = zeta(r, j)
                fast = eigenspace_fast(g, z)
                exact, dim = eigenspace(g, z)
                assert len(fast) == dim == len(exact)


@pytest.mark.parametrize(
    "case,ms", [("A", range(1, 6)), ("BC", range(1, 6)), ("D", range(2, 6))]
)
def test_springer_degree_count(case, ms):
    for m in ms:
        degrees = springer_degrees(case, m)
        for r in range(1, 2 * m + 1):
            assert max_eigenspace_dim(case, m, r) == sum(1 for d in degrees if d % r == 0), (m, r)


@pytest.mark.parametrize("r", range(1, 49))
def test_order_of_minus_root(r):
    # -zeta_r has order 2r (r odd), r/2 (r = 2 mod 4), r (4 | r)
    expected = 2 * r if r % 2 else (r // 2 if r % 4 == 2 else r)
    assert order_of_minus_root(r) == expected
    x, n = -zeta(r), 1
    while x != 1:
        x, n = x * -zeta(r), n + 1
    assert n == expected


class TestClassification:
    @pytest.mark.parametrize("m", range(1, 7))
    def test_type_a(self, m):
        for r in range(1, m + 1):
            rep = validate_classification("A", m, r)
            assert rep.exists == (m % r == 0 or (m - 1) % r == 0)
            assert rep.ok, rep.to_json()
            if rep.exists:
                k = m // r
                assert rep.dims == (k,)
                assert rep.centralizers == (factorial(k) * r**k,)

    @pytest.mark.parametrize("m", range(1, 5))
    def test_type_bc(self, m):
        for r in range(1, 2 * m + 2):
            rep = validate_classification("BC", m, r)
            assert rep.ok, rep.to_json()

    def test_type_d_split(self):
        for r in range(1, 11):
            assert validate_classification("D", 4, r).ok

    def test_whole_regular_part(self):
        rep = validate_classification("D", 4, 2)
        assert rep.exists and rep.dims == (4,) and rep.hyperplanes == (12,)

    @pytest.mark.parametrize("r", [1, 3, 4, 5, 8, 10])
    def test_type_d_twisted_agreeing(self, r):
        assert validate_classification("D", 4, r, twisted=True).ok

    def test_type_d_twisted_r2(self):
        # brute force: dimension 3 with 9 hyperplanes, i.e. M#(2,3) rather than M(2,4)
        rep = validate_classification("D", 4, 2, twisted=True)
        assert rep.exists and rep.dims == (3,) and rep.hyperplanes == (9,)
        assert rep.verdicts == {"existence": True, "clause 4": False}

    def test_type_d_twisted_r6(self):
        # brute force: 2m - 2 = 6 gives a line, M#(6,1), not M#(6,2)
        rep = validate_classification("D", 4, 6, twisted=True)
        assert rep.dims == (1,)
        assert rep.verdicts == {"existence": True, "clause 3": False}


@pytest.mark.parametrize("name,pt", corpus_types(), ids=IDS)
def test_untwisting_is_galois_closed(name, pt):
    U = untwist(pt)
    U.check()
    assert U.m == pt.rank
    assert U.g.order() % U.R == 0 or U.R % U.g.order() == 0


@pytest.mark.parametrize("item", CORPUS, ids=IDS)
def test_monodromy_orders_frozen(item):
    name, case, entries, order, _ = item
    pt = dict(corpus_types())[name]
    U = untwist(pt)
    M = monodromy_group(U)
    assert M.order == order
    assert covering_degree(U) == order


@pytest.mark.parametrize("name,pt", corpus_types(), ids=IDS)
def test_eigen_flats_meet_their_strata(name, pt):
    assert all(f.regular for f in flat_dims(untwist(pt)))


@pytest.mark.parametrize("name,pt", SMALL, ids=[n for n, _ in SMALL])
def test_marking_independence(name, pt):
    assert marking_independence(untwist(pt))


def test_unique_generator_for_regular_top_coefficient():
    pt = dict(corpus_types())["bc_two_poles"]
    U = untwist(pt)
    assert orbit_generators(U) == [U.g]


def test_unramified_generators_fix_the_flats():
    pt = dict(corpus_types())["d_three_unramified"]
    U = untwist(pt)
    assert U.R == 1
    gens = orbit_generators(U)
    assert SignedPerm.identity(U.m) in gens
    assert all(all(h.act(a) == a for a in U.A.values()) for h in gens)


class TestStrata:
    def test_trivial_r(self):
        for case, m in [("A", 3), ("BC", 3)]:
            for sub in dominant_levi_subsets(case, m):
                res = stratum_components(case, m, 1, parabolic(case, m, sub))
                assert res.component_count == 1

    @pytest.mark.parametrize("m,r", [(2, 2), (3, 3), (4, 2), (4, 4), (3, 2), (4, 3)])
    def test_empty_levi_counts_regular_eigenspaces(self, m, r):
        # components = distinct regular zeta_r eigenspaces over all of W
        z = zeta(r)
        spaces = set()
        for g in weyl_group("A", m):
            basis = eigenspace_fast(g, z)
            if basis and is_regular_space("A", m, basis):
                spaces.add(span_key(basis))
        res = stratum_components("A", m, r, frozenset())
        expected = {(2, 2): 1, (3, 3): 2, (4, 2): 3, (4, 4): 6, (3, 2): 3, (4, 3): 8}[(m, r)]
        assert res.component_count == len(spaces) == expected
        assert res.index == expected

    def test_one_a1_component(self):
        phi = parabolic("A", 4, (0,))
        res = stratum_components("A", 4, 2, phi)
        assert (res.component_count, res.index, res.transitive, res.obstruction) == (1, 1, True, False)

    def test_counterexample_raises_obstruction(self):
        rs = roots("D", 5)
        phi = frozenset(n for n, a in enumerate(rs) if all(x == 0 for x in a[3:]) and sum(a[:3]) == 0)
        assert len(phi) == 6
        res = stratum_components("D", 5, 2, phi, budget=10**5)
        assert res.obstruction
        assert (res.component_count, res.index, res.transitive) == (2, 2, True)

import itertools

import numpy as np
import pytest

from conftest import S1, family_corpus
from glsg.graph import build_graph, naive_degrees
from glsg.invariants import (
    brandt_closed_forms,
    compute_invariants,
    delta_obstruction,
    family_closed_form_degree,
    is_regular_glsg,
)
from glsg.semigroup import (
    build_family,
    is_cancellative,
    make_brandt,
    make_constant_image,
    make_cyclic_group,
    make_null,
    make_rectangular_band,
    relabel,
    transpose,
    validate_table,
)


def definitional_counts(t):
    """N_S, N_R, N_C straight from their set definitions (1-based loops)."""
    n = t.n
    elems = range(1, n + 1)
    ns = {k: sum(1 for x in elems for y in elems if t.product(x, y) == k) for k in elems}
    nr, nc = {}, {}
    for i, j in itertools.product(elems, repeat=2):
        k = t.product(i, j)
        nr[i, j] = sum(1 for s in elems if s != j and t.product(i, s) == k)
        nc[i, j] = sum(1 for s in elems if s != i and t.product(s, j) == k)
    return ns, nr, nc


def check_against_definitions(t):
    inv = compute_invariants(t)
    ns, nr, nc = definitional_counts(t)
    assert inv.ns.tolist() == [ns[k] for k in range(1, t.n + 1)]
    for (i, j), value in nr.items():
        assert inv.nr[i - 1, j - 1] == value
        assert inv.nc[i - 1, j - 1] == nc[i, j]
    return inv


def test_worked_example_null_three():
    inv = compute_invariants(make_null(3))
    assert inv.ns[2] == 9
    assert inv.nr[0, 1] == 2 and inv.nc[0, 1] == 2
    assert inv.deg[0, 1] == 4


def test_s1_isolated_vertex():
    inv = compute_invariants(validate_table(S1))
    assert inv.ns[0] == 3
    assert inv.nr[0, 0] == 1 and inv.nc[0, 0] == 1
    assert inv.deg[0, 0] == 0
    assert inv.deg.ravel().tolist() == [0, 2, 2, 2]


@pytest.mark.parametrize("n", range(1, 9))
def test_cyclic_group_cells(n):
    inv = compute_invariants(make_cyclic_group(n))
    assert (inv.nr == 0).all() and (inv.nc == 0).all()
    assert (inv.ns == n).all()
    assert (inv.deg == 3 * n - 3).all()


def test_structural_invariants_on_corpus(labeled_small):
    corpus = family_corpus(12) + [t for n in range(1, 5) for t in labeled_small[n]]
    for t in corpus:
        n = t.n
        inv = compute_invariants(t)
        assert inv.ns.sum() == n * n
        assert (inv.nr >= 0).all() and (inv.nr <= n - 1).all()
        assert (inv.nc >= 0).all() and (inv.nc <= n - 1).all()
        assert (inv.ns[t.array] >= 1).all()
        assert np.array_equal(inv.q, inv.ns[t.array] - 2 * inv.nr - 2 * inv.nc)
        assert np.array_equal(inv.deg, 2 * n - 3 + inv.q)
        assert (inv.deg >= 0).all()
        # N_R = n-1 exactly when row i equals k off column j
        for i, j in itertools.product(range(n), repeat=2):
            k = t.array[i, j]
            row_constant = all(t.array[i, s] == k for s in range(n) if s != j)
            col_constant = all(t.array[s, j] == k for s in range(n) if s != i)
            assert (inv.nr[i, j] == n - 1) == row_constant
            assert (inv.nc[i, j] == n - 1) == col_constant


def test_matches_definitions_on_corpus(labeled_small):
    for t in family_corpus(9) + labeled_small[3]:
        check_against_definitions(t)


def test_formula_matches_oracle_on_families():
    for t in family_corpus(12):
        inv = compute_invariants(t)
        assert inv.deg.ravel().tolist() == naive_degrees(build_graph(t)), t.entries


def test_cancellative_tables_have_no_alternatives(labeled_small):
    cancellative = [t for n in range(1, 5) for t in labeled_small[n] if is_cancellative(t)]
    cancellative += [make_cyclic_group(n) for n in range(1, 9)]
    assert len(cancellative) > 8
    for t in cancellative:
        inv = compute_invariants(t)
        assert (inv.nr == 0).all() and (inv.nc == 0).all()


@pytest.mark.parametrize("n", range(1, 7))
def test_constant_image_counts(n):
    for c in range(1, n + 1):
        inv = compute_invariants(make_constant_image(n, c))
        assert (inv.nr == n - 1).all() and (inv.nc == n - 1).all()
        assert inv.ns[c - 1] == n * n


def test_degree_multiset_invariant_under_relabel(labeled_small):
    rng = np.random.default_rng(7)
    for t in labeled_small[3] + labeled_small[4][::37]:
        base = sorted(compute_invariants(t).deg.ravel().tolist())
        perm = (rng.permutation(t.n) + 1).tolist()
        assert sorted(compute_invariants(transpose(t)).deg.ravel().tolist()) == base
        assert sorted(compute_invariants(relabel(t, perm)).deg.ravel().tolist()) == base


class TestRegularity:
    def test_null_three(self):
        assert is_regular_glsg(make_null(3)) == (True, [4])

    def test_s1(self):
        assert is_regular_glsg(validate_table(S1)) == (False, [0, 2])

    def test_cyclic_four(self):
        assert is_regular_glsg(make_cyclic_group(4)) == (True, [9])


class TestDeltaObstruction:
    def test_brandt_two_two(self):
        t = make_brandt(make_cyclic_group(2), 2)
        inv = compute_invariants(t)
        assert inv.ns[0] == 49
        assert set(inv.ns[1:].tolist()) == {4}
        assert delta_obstruction(t) == (45, True)
        assert not is_regular_glsg(t)[0]

    def test_brandt_two_three(self):
        t = make_brandt(make_cyclic_group(2), 3)
        assert delta_obstruction(t) == (247, True)
        assert not is_regular_glsg(t)[0]

    @pytest.mark.parametrize("n", range(1, 7))
    def test_null(self, n):
        assert delta_obstruction(make_null(n)) == (0, False)

    def test_blocked_implies_irregular(self, labeled_small):
        corpus = family_corpus(12) + [t for n in range(1, 5) for t in labeled_small[n]]
        blocked = 0
        for t in corpus:
            _, is_blocked = delta_obstruction(t)
            if is_blocked:
                blocked += 1
                assert not is_regular_glsg(t)[0]
        assert blocked > 0


class TestBrandtClosedForms:
    @pytest.mark.parametrize("m, n, expected", [
        (2, 2, {"ns_nonzero": 4, "ns_zero": 49, "delta": 45}),
        (2, 3, {"ns_nonzero": 6, "ns_zero": 253, "delta": 247}),
        # order 2: ns_zero = 2^2 - 1 = 3, ns_nonzero = 1, so delta = 2
        (1, 1, {"ns_nonzero": 1, "ns_zero": 3, "delta": 2}),
    ])
    def test_values(self, m, n, expected):
        assert brandt_closed_forms(m, n) == expected

    @pytest.mark.parametrize("m, n", [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3), (3, 2), (4, 1)])
    def test_agree_with_tables(self, m, n):
        forms = brandt_closed_forms(m, n)
        inv = compute_invariants(make_brandt(make_cyclic_group(m), n))
        assert inv.ns[0] == forms["ns_zero"]
        assert set(inv.ns[1:].tolist()) == {forms["ns_nonzero"]}
        assert forms["ns_zero"] - forms["ns_nonzero"] == forms["delta"]


class TestFamilyClosedForm:
    @pytest.mark.parametrize("spec, degree", [("cyclic:5", 12), ("const:3", 4), ("band:2x2", 5)])
    def test_examples(self, spec, degree):
        assert family_closed_form_degree(spec) == degree
        regular, degrees = is_regular_glsg(build_family(spec))
        assert regular and degrees == [degree]
        assert set(naive_degrees(build_graph(build_family(spec)))) == {degree}

    def test_families_match_computation(self):
        specs = [f"cyclic:{n}" for n in range(1, 9)]
        specs += [f"null:{n}" for n in range(1, 9)]
        specs += [f"const:{n}:{c}" for n in range(1, 7) for c in range(1, n + 1)]
        specs += [f"leftzero:{n}" for n in range(1, 7)] + [f"rightzero:{n}" for n in range(1, 7)]
        specs += [f"band:{p}x{q}" for p in range(1, 5) for q in range(1, 5)]
        for spec in specs:
            expected = family_closed_form_degree(spec)
            assert is_regular_glsg(build_family(spec)) == (True, [expected]), spec

    def test_brandt(self):
        assert family_closed_form_degree("brandt:cyclic:2:2") is None
        assert family_closed_form_degree("brandt:cyclic:1:3") is None
        # order 2 semilattice {0, e}: isolated vertex plus a triangle
        assert family_closed_form_degree("brandt:cyclic:1:1") is None
        t = make_brandt(make_cyclic_group(2), 1)
        regular, degrees = is_regular_glsg(t)
        assert family_closed_form_degree("brandt:cyclic:2:1") == (degrees[0] if regular else None)

    def test_band_closed_form_counts(self):
        for p, q in itertools.product(range(1, 5), repeat=2):
            inv = compute_invariants(make_rectangular_band(p, q))
            assert (inv.ns == p * q).all()
            assert (inv.nr == p - 1).all() and (inv.nc == q - 1).all()


def test_unique_solvability_vertices(labeled_small):
    # where both alternative counts vanish the degree is 2n - 3 + N_S(k)
    tables = [t for n in range(1, 5) for t in labeled_small[n]] + family_corpus(12)
    for t in tables:
        inv = compute_invariants(t)
        mask = (inv.nr == 0) & (inv.nc == 0)
        assert np.array_equal(inv.deg[mask], (2 * t.n - 3 + inv.ns[t.array])[mask])

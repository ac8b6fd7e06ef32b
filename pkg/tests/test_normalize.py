from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from helpers import I, R, assignments, c, formulas, v
from ramseyqe.bench import BenchSpec, generate_benchmark
from ramseyqe.errors import SortError
from ramseyqe.formula import (Atom, AtomKind, FreshNames, Not, TermAtom, compare, cong, count_atoms,
                              disj, evaluate, iter_nodes, lt, map_atoms, neg)
from ramseyqe.normalize import (CanonAtom, build_selector_skeleton, canonize, nnf_positive)
from ramseyqe.terms import Sort

x, y, z = I("x"), I("y"), I("z")
a, b, p = R("a"), R("b"), R("p")


def reassemble(f):
    return map_atoms(f, lambda g: g.as_formula() if isinstance(g, CanonAtom) else g)


class TestNnf:
    def test_int_negated_lt(self):
        assert nnf_positive(neg(compare("<", v(x), v(y))), Sort.INT) == lt(v(y) - v(x) - 1)

    def test_real_negated_eq(self):
        out = nnf_positive(neg(compare("=", v(a), v(b))), Sort.REAL)
        assert out == disj(lt(v(a) - v(b)), lt(v(b) - v(a)))

    def test_int_negated_congruence(self):
        out = nnf_positive(neg(cong(v(x), 2)), Sort.INT)
        assert isinstance(out, Atom) and out.kind is AtomKind.NDIV

    def test_int_le(self):
        assert nnf_positive(compare("<=", v(x), v(y)), Sort.INT) == lt(v(x) - v(y) - 1)

    def test_real_le(self):
        out = nnf_positive(compare("<=", v(a), v(b)), Sort.REAL)
        assert out == disj(lt(v(a) - v(b)), Atom(AtomKind.EQ, v(a) - v(b)))

    def test_real_atom_in_int_domain(self):
        with pytest.raises(SortError):
            nnf_positive(compare("<", v(a), c(0)), Sort.INT)


def _no_negations(f):
    for g in iter_nodes(f):
        assert not isinstance(g, (Not, TermAtom))
        if isinstance(g, Atom):
            assert g.kind in (AtomKind.LT, AtomKind.EQ, AtomKind.DIV, AtomKind.NDIV)


@settings(max_examples=200)
@given(formulas([x, y, z], max_leaves=5), st.lists(assignments([x, y, z]), min_size=5,
                                                  max_size=5))
def test_int_pipeline_preserves_semantics(f, asgs):
    g = nnf_positive(f, Sort.INT)
    _no_negations(g)
    h = reassemble(canonize(g, [x], [y], Sort.INT))
    for asg in asgs:
        assert evaluate(f, asg) == evaluate(g, asg) == evaluate(h, asg)


@settings(max_examples=200)
@given(formulas([a, b, p], max_leaves=5), st.lists(assignments([a, b, p]), min_size=5,
                                                  max_size=5))
def test_real_pipeline_preserves_semantics(f, asgs):
    g = nnf_positive(f, Sort.REAL)
    _no_negations(g)
    h = reassemble(canonize(g, [a], [b], Sort.REAL))
    for asg in asgs:
        assert evaluate(f, asg) == evaluate(g, asg) == evaluate(h, asg)


@settings(max_examples=200)
@given(formulas([x, y, a], max_leaves=5))
def test_desugaring_at_most_doubles_atoms(f):
    assert count_atoms(nnf_positive(f)) <= 2 * count_atoms(f)


class TestCanonize:
    def test_half_shape(self):
        f = nnf_positive(compare("<=", v(y, 2), v(x)), Sort.INT)
        ca = canonize(f, [x], [y], Sort.INT)
        assert isinstance(ca, CanonAtom)
        # 2y <= x  is  -x < -2y + 1
        assert ca.r == v(x, -1) and ca.s == v(y, -2) and ca.h == 1

    def test_real_denominators_cleared(self):
        f = nnf_positive(compare("<", v(a, Fraction(1, 2)), v(b)), Sort.REAL)
        ca = canonize(f, [a], [b], Sort.REAL)
        assert ca.r == v(a) and ca.s == v(b, 2) and ca.h == 0

    def test_rearrangement(self):
        f = nnf_positive(compare("<", v(x) + v(z), v(y) + 1), Sort.INT)
        ca = canonize(f, [x], [y], Sort.INT)
        assert (ca.r, ca.s, ca.t, ca.h) == (v(x), v(y), v(z, -1), 1)


class TestSkeleton:
    def test_single_atom(self):
        f = canonize(lt(v(x) - v(y)), [x], [y], Sort.INT)
        sk = build_selector_skeleton(f, FreshNames(["x", "y"]), Sort.INT)
        assert len(sk.table) == 1
        q = sk.table[0][0]
        assert evaluate(sk.formula, {q: 1})
        assert not evaluate(sk.formula, {q: 0})

    def test_disjunction(self):
        f = canonize(disj(lt(v(x) - v(y)), lt(v(y) - v(x))), [x], [y], Sort.INT)
        sk = build_selector_skeleton(f, FreshNames(["x", "y"]), Sort.INT)
        q1, q2 = (q for q, _ in sk.table)
        assert [evaluate(sk.formula, {q1: i, q2: j}) for i in (0, 1) for j in (0, 1)] == [
            False, True, True, True]
        assert not evaluate(sk.formula, {q1: 2, q2: 1})

    def test_real_selectors_two_valued(self):
        f = canonize(lt(v(a) - v(b)), [a], [b], Sort.REAL)
        sk = build_selector_skeleton(f, FreshNames(["a", "b"]), Sort.REAL)
        q = sk.table[0][0]
        assert q.sort is Sort.REAL
        assert not evaluate(sk.formula, {q: Fraction(1, 2)})

    @pytest.mark.parametrize("d", [1, 3, 7])
    def test_dickson_has_five_selectors_per_dimension(self, d):
        g = generate_benchmark(BenchSpec("dickson", d, None, "Int")).goal
        body = canonize(nnf_positive(g.body, Sort.INT), g.xs, g.ys, Sort.INT)
        sk = build_selector_skeleton(body, FreshNames.for_formulas(g), Sort.INT)
        assert len(sk.table) == 5 * d


@settings(max_examples=150)
@given(formulas([x, y], max_leaves=4), assignments([x, y]))
def test_skeleton_reconstruction(f, asg):
    """exists q: skeleton and guards  agrees with f at every point, with the
    selectors chosen as the truth values of their atoms."""
    g = canonize(nnf_positive(f, Sort.INT), [x], [y], Sort.INT)
    sk = build_selector_skeleton(g, FreshNames(["x", "y"]), Sort.INT)
    qs = {q: int(evaluate(atom.as_formula(), asg)) for q, atom in sk.table}
    full = dict(asg)
    full.update(qs)
    assert evaluate(sk.formula, full) == evaluate(f, asg)

"""Shared builders, hypothesis strategies and independent oracles for the tests."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from hypothesis import strategies as st

from ramseyqe.formula import compare, conj, disj, evaluate, neg, substitute
from ramseyqe.terms import LinTerm, Sort, SortedVar


def I(name: str) -> SortedVar:
    return SortedVar(name, Sort.INT)


def R(name: str) -> SortedVar:
    return SortedVar(name, Sort.REAL)


def v(x: SortedVar, c=1) -> LinTerm:
    return LinTerm.var(x, c)


def c(n) -> LinTerm:
    return LinTerm.constant(Fraction(n))


# -- strategies ---------------------------------------------------------------

RELS = ("<", "<=", ">", ">=", "=", "distinct")
small_coeffs = st.integers(-3, 3)


def rationals(max_den: int = 4, bound: int = 6):
    return st.builds(Fraction, st.integers(-bound * max_den, bound * max_den),
                     st.integers(1, max_den))


def lin_terms(vars_, coeffs=small_coeffs, consts=st.integers(-4, 4)):
    return st.builds(
        lambda cs, k: LinTerm(dict(zip(vars_, cs)), k),
        st.lists(coeffs, min_size=len(vars_), max_size=len(vars_)), consts)


sparse_coeffs = st.one_of(st.just(0), st.just(0), st.integers(-3, 3))


def mixed_terms(vars_):
    """Sparse terms with at most one floor of a single Real variable."""
    reals = [x for x in vars_ if x.sort is Sort.REAL]
    plain = lin_terms(vars_, sparse_coeffs, st.integers(-3, 3))
    return st.one_of(plain, st.builds(
        lambda t, x, k: t + LinTerm.floor(LinTerm.var(x)).scale(k), plain,
        st.sampled_from(reals), st.integers(-3, 3)))


def mixed_atoms(vars_, rels=RELS):
    term = mixed_terms(vars_)
    return st.builds(lambda r, a, b: compare(r, a, b), st.sampled_from(rels), term, term)


def atoms(vars_, rels=RELS, floors=False):
    term = lin_terms(vars_)
    if floors:
        term = st.one_of(term, st.builds(
            lambda t, a, k: LinTerm.floor(t) + a.scale(k), lin_terms(vars_), lin_terms(vars_),
            st.integers(-2, 2)))
    return st.builds(lambda r, a, b: compare(r, a, b), st.sampled_from(rels), term, term)


def formulas(vars_, max_leaves: int = 4, floors=False, rels=RELS):
    base = atoms(vars_, rels, floors)
    return st.recursive(
        base,
        lambda kids: st.one_of(
            st.builds(lambda a, b: conj(a, b), kids, kids),
            st.builds(lambda a, b: disj(a, b), kids, kids),
            st.builds(neg, kids)),
        max_leaves=max_leaves)


def assignments(vars_, max_den: int = 4, bound: int = 6):
    def value(x):
        if x.sort is Sort.INT:
            return st.integers(-bound, bound).map(Fraction)
        return rationals(max_den, bound)
    return st.fixed_dictionaries({x: value(x) for x in vars_})


# -- oracles --------------------------------------------------------------------


def brute_clique(body, xs, ys, params, box, k: int):
    """A k-clique of ``body`` among integer points of ``box`` (a range per
    coordinate), found by exhaustive search, or None."""
    points = list(itertools.product(*box))
    base = substitute(body, {p: LinTerm.constant(val) for p, val in params.items()})

    def rel(a, b):
        asg = dict(zip(xs, map(Fraction, a)))
        asg.update(zip(ys, map(Fraction, b)))
        return evaluate(base, asg)

    edge = {(a, b): rel(a, b) for a in points for b in points if a != b}

    def extend(chain):
        if len(chain) == k:
            return chain
        for p in points:
            if p not in chain and all(edge[(q, p)] for q in chain):
                found = extend(chain + [p])
                if found:
                    return found
        return None

    return extend([])


def worked_example_closed_form(z1: Fraction, z2: Fraction) -> bool:
    """Exact answer for the converging floor example.

    Cliques approach z1 from below (or sit at z1). If z1 is not an integer
    the floor is eventually floor(z1); if it is, the floor is eventually
    z1 - 1, because staying at z1 itself would repeat a tuple.
    """
    if z1.denominator != 1:
        return z2 == math.floor(z1)
    return z2 == z1 - 1


def worked_example_printed_form(z1: Fraction, z2: Fraction) -> bool:
    return z2 == math.floor(z1) or (z1 == math.floor(z1) and z2 == z1 - 1)


def half_real_sat(t: Fraction) -> bool:
    """Real clique with 2 a_j <= a_i (i < j) and a_i >= t exists iff t <= 0:
    a_i = 2^-i works for t <= 0, while t > 0 forces a_2 <= a_1/2^k for all k."""
    return t <= 0


# -- parser fuzzing ---------------------------------------------------------------

TOKENS = ("(", ")", "assert", "exists-ramsey", "exists", "forall", "and", "or", "not", "=>",
          "to_int", "to_real", "div", "mod", "(_ divisible 0)", "Int", "Real", "Bool", "-1",
          "0", "1.5", "#x1F", "|q r|", "let", "!", ":named", "ite", "declare-fun", "x", "y")


def fuzz_corpus() -> list[str]:
    """Seed scripts: the samples plus one instance of every benchmark family."""
    from pathlib import Path
    from ramseyqe.bench import _ALLOWED, BenchSpec, generate_benchmark
    from ramseyqe.smtlib import print_smtlib2

    root = Path(__file__).resolve().parent.parent / "samples"
    seeds = [p.read_text() for p in sorted(root.iterdir())]
    for fam, doms in sorted(_ALLOWED.items()):
        for dom in doms:
            dim = 2
            seeds.append(print_smtlib2(generate_benchmark(BenchSpec(fam, dim, None, dom)),
                                       allow_ramsey=True))
    return seeds


def mutate(text: str, rng) -> str:
    """Apply 1 to 4 random character or token edits."""
    for _ in range(rng.randint(1, 4)):
        i = rng.randrange(len(text) + 1)
        j = min(len(text), i + rng.randint(0, 12))
        op = rng.randrange(6)
        if op == 0:
            text = text[:i] + text[j:]
        elif op == 1:
            text = text[:i] + rng.choice(TOKENS) + text[i:]
        elif op == 2:
            text = text[:i] + " " + rng.choice(TOKENS) + " " + text[j:]
        elif op == 3:
            text = text[:i] + chr(rng.randrange(32, 127)) + text[j:]
        elif op == 4:
            text = text[:i] + text[i:j] * 2 + text[j:]
        else:
            k = rng.randrange(len(text) + 1)
            text = text[:i] + text[k:k + 8] + text[i:]
    return text

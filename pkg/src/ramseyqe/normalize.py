"""Negation-free normal form, canonical atoms and the selector skeleton."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import SortError, UnsupportedFormula
from .formula import (And, Atom, AtomKind, BoolConst, Exists, ExistsRamsey, Formula, FreshNames,
                      Not, Or, TermAtom, cong, conj, disj, eq, lt)
from .terms import LinTerm, Sort, SortedVar

_NEGATED = {"<": ">=", "<=": ">", ">": "<=", ">=": "<", "=": "distinct",
            "distinct": "=", "cong": "ncong", "ncong": "cong"}


def _int_scaled(d: LinTerm) -> LinTerm | None:
    """d times the lcm of its denominators if that is integer-valued, else None."""
    m = d.denominator_lcm()
    scaled = d.scale(m) if m != 1 else d
    return scaled if scaled.is_int_valued() else None


def _relation(rel: str, d: LinTerm, domain: Sort | None, modulus: int | None) -> Formula:
    """Positive core formula equivalent to ``d rel 0``."""
    if rel == "cong":
        return cong(d, modulus)
    if rel == "ncong":
        return cong(d, modulus, negated=True)
    use_int = False
    scaled = _int_scaled(d)
    if domain is Sort.INT:
        if scaled is None:
            raise SortError(f"atom over Real variables in the integer domain: {d!r}")
        use_int = True
    elif domain is None:
        use_int = scaled is not None
    if use_int:
        d = scaled
        if rel == "<":
            return lt(d)
        if rel == "<=":
            return lt(d - 1)
        if rel == ">":
            return lt(-d)
        if rel == ">=":
            return lt(-d - 1)
        if rel == "=":
            return eq(d)
        return disj(lt(d), lt(-d))
    if rel == "<":
        return lt(d)
    if rel == "<=":
        return disj(lt(d), eq(d))
    if rel == ">":
        return lt(-d)
    if rel == ">=":
        return disj(lt(-d), eq(d))
    if rel == "=":
        return eq(d)
    return disj(lt(d), lt(-d))


def _atom_relation(f: Formula) -> tuple[str, LinTerm, int | None]:
    if isinstance(f, Atom):
        if f.kind is AtomKind.LT:
            return "<", f.lhs, None
        if f.kind is AtomKind.EQ:
            return "=", f.lhs, None
        d = f.lhs - f.residue
        return ("cong" if f.kind is AtomKind.DIV else "ncong"), d, f.modulus
    if isinstance(f, TermAtom):
        return f.rel, f.left - f.right, f.modulus
    if isinstance(f, CanonAtom):
        return _atom_relation(f.as_formula())
    raise TypeError(f"not an atom: {f!r}")


def nnf_positive(f: Formula, domain: Sort | None = None) -> Formula:
    """Push negations into atoms and eliminate them.

    The result is built from And, Or and core atoms (``t<0``, ``t=0``,
    congruences) only. ``domain`` selects the integer or real rewriting rules;
    ``None`` picks per atom (integer rules when the atom is integer-valued).
    """
    return _nnf(f, True, domain)


def _nnf(f: Formula, pol: bool, domain) -> Formula:
    if isinstance(f, BoolConst):
        return f if pol else BoolConst(not f.value)
    if isinstance(f, Not):
        return _nnf(f.arg, not pol, domain)
    if isinstance(f, And):
        parts = (_nnf(a, pol, domain) for a in f.args)
        return conj(parts) if pol else disj(parts)
    if isinstance(f, Or):
        parts = (_nnf(a, pol, domain) for a in f.args)
        return disj(parts) if pol else conj(parts)
    if isinstance(f, (Exists, ExistsRamsey)):
        raise UnsupportedFormula("nnf_positive expects a quantifier-free formula")
    rel, d, modulus = _atom_relation(f)
    if not pol:
        rel = _NEGATED[rel]
    return _relation(rel, d, domain, modulus)


# -- canonical atoms -------------------------------------------------------------


@dataclass(frozen=True)
class CanonAtom(Formula):
    """``r.x  REL  s.y + t.z + h`` split by binder side.

    REL is ``<`` (LT), ``=`` (EQ) or a congruence modulo ``modulus``
    (DIV/NDIV). ``r`` mentions only the x-side, ``s`` only the y-side and
    ``t`` only parameters.
    """

    kind: AtomKind
    r: LinTerm
    s: LinTerm
    t: LinTerm
    h: Fraction
    modulus: int | None = None

    def lhs(self) -> LinTerm:
        return self.r - self.s - self.t - self.h

    def as_formula(self) -> Formula:
        d = self.lhs()
        if self.kind is AtomKind.LT:
            return lt(d)
        if self.kind is AtomKind.EQ:
            return eq(d)
        return cong(d, self.modulus, negated=self.kind is AtomKind.NDIV)

    def substitute(self, m) -> Formula:
        from .formula import _subst_atom
        return _subst_atom(self.as_formula(), m)

    def __repr__(self) -> str:
        op = {"<": "<", "=": "=", "div": "==", "ndiv": "=/="}[self.kind.value]
        mod = f" mod {self.modulus}" if self.modulus else ""
        return f"[{self.r!r} {op} {self.s!r} | {self.t!r} | {self.h}{mod}]"


def _canon_atom(a: Atom, xs: frozenset, ys: frozenset, domain: Sort | None) -> CanonAtom:
    lhs = a.lhs
    if lhs.has_floor():
        raise UnsupportedFormula("floor must be decomposed before canonization")
    if domain is Sort.INT and not lhs.is_int_valued() and _int_scaled(lhs) is None:
        raise SortError(f"atom over Real variables in the integer domain: {lhs!r}")
    if a.kind in (AtomKind.LT, AtomKind.EQ):
        m = lhs.denominator_lcm()
        if m != 1:
            lhs = lhs.scale(m)
    r = lhs.restrict(k for k in lhs.keys() if k in xs)
    s = -lhs.restrict(k for k in lhs.keys() if k in ys)
    t = -lhs.restrict(k for k in lhs.keys() if k not in xs and k not in ys)
    if a.kind in (AtomKind.DIV, AtomKind.NDIV):
        return CanonAtom(a.kind, r, s, t, Fraction(a.residue), a.modulus)
    return CanonAtom(a.kind, r, s, t, -lhs.const)


def canonize(f: Formula, xs: Iterable[SortedVar], ys: Iterable[SortedVar],
             domain: Sort | None = None) -> Formula:
    """Replace every core atom of a positive formula by its CanonAtom.

    Variables outside ``xs`` and ``ys`` are treated as parameters.
    """
    xs_ = frozenset(xs)
    ys_ = frozenset(ys)
    if isinstance(f, BoolConst):
        return f
    if isinstance(f, Atom):
        return _canon_atom(f, xs_, ys_, domain)
    if isinstance(f, CanonAtom):
        return f
    if isinstance(f, And):
        return And(tuple(canonize(a, xs_, ys_, domain) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(canonize(a, xs_, ys_, domain) for a in f.args))
    raise UnsupportedFormula(f"canonize expects a positive formula, got {type(f).__name__}")


# -- selector skeleton ------------------------------------------------------------


@dataclass(frozen=True)
class SelectorSkeleton:
    """``formula`` is the body with atom number i replaced by ``q_i = 1``,
    conjoined with the selector range constraints. ``table`` lists the
    selectors with their atoms; ``selectors`` are those the eliminator must
    bind itself."""

    formula: Formula
    table: tuple[tuple[SortedVar, CanonAtom], ...]
    selectors: tuple[SortedVar, ...]


def selector_range(q: SortedVar) -> Formula:
    t = LinTerm.var(q)
    if q.sort is Sort.INT:
        return conj(lt(-t - 1), lt(t - 2))
    return disj(eq(t), eq(t - 1))


def selected(q: SortedVar) -> Formula:
    return eq(LinTerm.var(q) - 1)


def unselected_or(q: SortedVar, f: Formula) -> Formula:
    """``q = 1 -> f`` for a 0/1 selector, written without negation."""
    return disj(lt(LinTerm.var(q) - 1), f)


def atom_sort(a: CanonAtom) -> Sort:
    vs = a.r.variables() | a.s.variables() | a.t.variables()
    return Sort.INT if all(v.sort is Sort.INT for v in vs) else Sort.REAL


def build_selector_skeleton(f: Formula, names: FreshNames, domain: Sort | None = None,
                            hint: str | None = None) -> SelectorSkeleton:
    """Replace every CanonAtom of a canonized positive formula by a selector.

    With ``domain=None`` the selector sort follows each atom's sort.
    """
    table: list[tuple[SortedVar, CanonAtom]] = []

    def walk(g: Formula) -> Formula:
        if isinstance(g, BoolConst):
            return g
        if isinstance(g, CanonAtom):
            sort = domain if domain is not None else atom_sort(g)
            q = names.var(hint or ("q" if sort is Sort.INT else "p"), sort)
            table.append((q, g))
            return selected(q)
        if isinstance(g, And):
            return conj(walk(a) for a in g.args)
        if isinstance(g, Or):
            return disj(walk(a) for a in g.args)
        raise UnsupportedFormula(f"unexpected node {type(g).__name__} in canonized formula")

    body = walk(f)
    ranges = [selector_range(q) for q, _ in table]
    skel = conj(body, *ranges) if table else body
    sels = tuple(q for q, _ in table)
    return SelectorSkeleton(skel, tuple(table), sels)

"""Ramsey quantifier elimination over the reals.

A clique for a set of atoms exists iff there is an admissible profile
(limit value and convergence type of both sides of every inequality) and
vectors a, xc != 0, xinf such that a - xc/k + k*xinf realises it.
Type codes: -2/2 diverge down/up, -1/1 converge from above/below, 0 constant.
"""

from __future__ import annotations

from fractions import Fraction

from ..errors import UnsupportedFormula
from ..formula import (Atom, AtomKind, BoolConst, Exists, Formula, FreshNames, conj, disj,
                       eq, lt)
from ..normalize import SelectorSkeleton, unselected_or
from ..terms import LinTerm, Sort, SortedVar

RHO_CODES = (-2, -1, 0, 1, 2)
SIGMA_CODES = (-1, 0, 1, 2)
_ONE = Fraction(1)
_NEG = {v: Fraction(-v) for v in RHO_CODES}


class _Codes:
    """The atoms t = v for every code value v of one type-code variable."""

    def __init__(self, t: SortedVar, domain):
        self.domain = domain
        # t = v as a normalized atom, built directly: this runs once per atom
        self.atoms = {v: Atom(AtomKind.EQ, LinTerm._raw({t: _ONE}, _NEG[v])) for v in domain}
        self._among: dict[tuple, Formula] = {}

    def among(self, values) -> Formula:
        key = tuple(values)
        f = self._among.get(key)
        if f is None:
            if len(key) == 1:
                f = self.atoms[key[0]]
            else:
                f = disj(self.atoms[v] for v in key)
            self._among[key] = f
        return f

    def not_in(self, values) -> Formula:
        return self.among([v for v in self.domain if v not in values])

    def unless(self, values, f: Formula) -> Formula:
        """``t in values -> f``, assuming t ranges over the domain."""
        return disj(self.not_in(values), f)


def eliminate_skeleton_real(skel: SelectorSkeleton, xs, ys, names: FreshNames) -> Formula:
    a = [names.var("a", Sort.REAL) for _ in xs]
    xc = [names.var("xc", Sort.REAL) for _ in xs]
    xi = [names.var("xinf", Sort.REAL) for _ in xs]

    def onto(vec):
        m = {v: LinTerm.var(w) for v, w in zip(xs, vec)}
        m.update({v: LinTerm.var(w) for v, w in zip(ys, vec)})
        return m

    at_a, at_c, at_i = onto(a), onto(xc), onto(xi)
    profile: list[SortedVar] = []
    admissible: list[Formula] = []
    guards: list[Formula] = []
    R, S = RHO_CODES, SIGMA_CODES

    for q, atom in skel.table:
        if atom.kind is AtomKind.EQ:
            ua, uc, ui = (atom.r.substitute(m) for m in (at_a, at_c, at_i))
            va, vc, vi = (atom.s.substitute(m) for m in (at_a, at_c, at_i))
            eps = conj(eq(uc), eq(ui), eq(vc), eq(vi), eq(ua - va - atom.t - atom.h))
            guards.append(unselected_or(q, eps))
            continue
        if atom.kind is not AtomKind.LT:
            raise UnsupportedFormula("congruence atom in the real domain")
        rho = names.var("rho", Sort.REAL)
        sig = names.var("sig", Sort.REAL)
        tr = names.var("tr", Sort.REAL)
        ts = names.var("ts", Sort.REAL)
        profile += [rho, sig, tr, ts]
        Rho, Sig = LinTerm.var(rho), LinTerm.var(sig)
        cr, cs = _Codes(tr, R), _Codes(ts, S)
        ra, rc, ri = (atom.r.substitute(m) for m in (at_a, at_c, at_i))
        sa, sc, si = (atom.s.substitute(m) for m in (at_a, at_c, at_i))

        limits = conj(
            cr.unless((-1, 1), conj(eq(ra - Rho), eq(ri))),
            cs.unless((-1, 1), conj(eq(sa - Sig), eq(si))),
        )
        constants = conj(
            cr.unless((0,), conj(eq(ra - Rho), eq(rc), eq(ri))),
            cs.unless((0,), conj(eq(sa - Sig), eq(sc), eq(si))),
        )
        converge = conj(
            cr.unless((-1,), lt(rc)),
            cr.unless((1,), lt(-rc)),
            cs.unless((-1,), lt(sc)),
            cs.unless((1,), lt(-sc)),
        )
        diverge = conj(
            cr.unless((-2,), lt(ri)),
            cr.unless((2,), lt(-ri)),
            cs.unless((2,), lt(-si)),
        )
        guards.append(unselected_or(q, conj(limits, constants, converge, diverge)))

        gap = Rho - Sig - atom.t - atom.h
        no_strict = conj(
            disj(cr.not_in((-1, 0)), cs.not_in((0, 1))),
            disj(cr.not_in((-1,)), cs.not_in((-1,))),
        )
        no_weak = conj(
            disj(cr.not_in((0,)), cs.not_in((-1,))),
            cr.not_in((1,)),
        )
        admissible.append(conj(
            cr.among(R),
            cs.among(S),
            cr.unless((2,), cs.among((2,))),
            disj(no_strict, lt(gap)),
            disj(no_weak, lt(gap), eq(gap)),
        ))

    nonzero = disj(disj(lt(LinTerm.var(c)), lt(-LinTerm.var(c))) for c in xc)
    body = conj(skel.formula, *admissible, nonzero, *guards)
    if isinstance(body, BoolConst):
        return body
    # bound variables are read off the construction; scanning the output is slow
    used = set()
    for _, atom in skel.table:
        used |= atom.r.variables() | atom.s.variables()
    live = [i for i, (x, y) in enumerate(zip(xs, ys)) if x in used or y in used]
    vs = [*skel.selectors, *profile, *(a[i] for i in live), *xc, *(xi[i] for i in live)]
    return Exists(tuple(vs), body)

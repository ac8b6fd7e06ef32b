"""Ramsey quantifier elimination over the integers.

For a chosen set of atoms, an infinite clique exists iff there is an
admissible profile (per inequality: an upper bound on the left side or
"unbounded", a lower bound on the right side or "grows to infinity") together
with a start vector x0 and a nonzero direction dx such that x0 + k*dx
realises the profile and keeps every congruence stable.
"""

from __future__ import annotations

from ..formula import Formula, FreshNames, conj, cong, disj, exists, lt
from ..normalize import CanonAtom, SelectorSkeleton, unselected_or
from ..formula import AtomKind
from ..terms import LinTerm, Sort, SortedVar


def _le(t: LinTerm) -> Formula:
    """t <= 0 for an integer term"""
    return lt(t - 1)


def _is_one(w: SortedVar) -> Formula:
    return lt(-LinTerm.var(w))


def _is_zero(w: SortedVar) -> Formula:
    return lt(LinTerm.var(w) - 1)


def _flag_range(w: SortedVar) -> Formula:
    t = LinTerm.var(w)
    return conj(lt(-t - 1), lt(t - 2))


def split_equalities(atom: CanonAtom) -> list[CanonAtom]:
    """An integer equation as two strict inequalities; other atoms unchanged."""
    if atom.kind is not AtomKind.EQ:
        return [atom]
    return [
        CanonAtom(AtomKind.LT, atom.r, atom.s, atom.t, atom.h + 1),
        CanonAtom(AtomKind.LT, -atom.r, -atom.s, -atom.t, -atom.h + 1),
    ]


def eliminate_skeleton_int(skel: SelectorSkeleton, xs, ys, names: FreshNames) -> Formula:
    """Existential Presburger formula equivalent to the Ramsey quantifier over
    the selector skeleton (whose atoms are split by binder side)."""
    x0 = [names.var("x0", Sort.INT) for _ in xs]
    dx = [names.var("dx", Sort.INT) for _ in xs]
    at_x0 = {v: LinTerm.var(a) for v, a in zip(xs, x0)}
    at_x0.update({v: LinTerm.var(a) for v, a in zip(ys, x0)})
    at_dx = {v: LinTerm.var(a) for v, a in zip(xs, dx)}
    at_dx.update({v: LinTerm.var(a) for v, a in zip(ys, dx)})

    profile: list[SortedVar] = []
    admissible: list[Formula] = []
    guards: list[Formula] = []

    for q, atom in skel.table:
        if atom.kind in (AtomKind.DIV, AtomKind.NDIV):
            u0 = atom.r.substitute(at_x0)
            ud = atom.r.substitute(at_dx)
            v0 = atom.s.substitute(at_x0)
            vd = atom.s.substitute(at_dx)
            e = atom.modulus
            delta = conj(
                cong(u0 - v0 - vd - atom.t - atom.h, e, negated=atom.kind is AtomKind.NDIV),
                cong(ud, e),
                cong(vd, e),
            )
            guards.append(unselected_or(q, delta))
            continue
        parts = []
        for half in split_equalities(atom):
            po = names.var("pl", Sort.INT)
            pe = names.var("pr", Sort.INT)
            wo = names.var("wl", Sort.INT)
            we = names.var("wr", Sort.INT)
            profile += [po, pe, wo, we]
            P_o, P_e = LinTerm.var(po), LinTerm.var(pe)
            r0 = half.r.substitute(at_x0)
            rd = half.r.substitute(at_dx)
            s0 = half.s.substitute(at_x0)
            sd = half.s.substitute(at_dx)
            parts.append(conj(
                disj(_is_one(wo), conj(_le(r0 - P_o), _le(rd))),
                disj(_is_one(we), conj(_le(P_e - s0 - half.t - half.h), _le(-sd))),
                disj(_is_zero(we), lt(-sd)),
            ))
            admissible.append(conj(
                _flag_range(wo), _flag_range(we),
                disj(conj(_is_zero(wo), lt(P_o - P_e)), _is_one(we)),
            ))
        guards.append(unselected_or(q, conj(parts)))

    nonzero = disj(disj(lt(LinTerm.var(d)), lt(-LinTerm.var(d))) for d in dx)
    body = conj(skel.formula, *admissible, nonzero, *guards)
    return exists(list(skel.selectors) + profile + x0 + dx, body)

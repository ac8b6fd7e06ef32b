"""Moving existential quantifiers out of a Ramsey quantifier's body.

``ramsey (x),(y): exists w. phi(x, y, w)`` is equivalent to
``ramsey (x, v1, v2),(y, w1, w2): phi(x, y, v1 + w2) and x != y``.
The witness for the pair (a_i, a_j) is split into a part owned by the first
tuple and a part owned by the second, which lets a single infinite sequence
carry all the witnesses.
"""

from __future__ import annotations

from typing import Iterable

from .errors import UnsupportedFormula
from .formula import (And, BoolConst, Exists, ExistsRamsey, Formula, FreshNames, Not, Or,
                      conj, disj, free_vars, is_atom, lt, neg, substitute)
from .terms import LinTerm, SortedVar


def hoist_existentials(f: Formula, names: FreshNames,
                       reserved: Iterable[SortedVar] = ()) -> tuple[list[SortedVar], Formula]:
    """Pull every positively occurring existential to the front.

    Bound variables whose names clash with free or already hoisted ones are
    renamed. Existentials under negation (universal quantifiers) and Ramsey
    quantifiers are rejected.
    """
    used = {v.name for v in free_vars(f)} | {v.name for v in reserved}
    hoisted: list[SortedVar] = []

    def walk(g: Formula, pol: bool) -> Formula:
        if isinstance(g, BoolConst) or is_atom(g):
            return g
        if isinstance(g, Not):
            return neg(walk(g.arg, not pol))
        if isinstance(g, And):
            return conj(walk(a, pol) for a in g.args)
        if isinstance(g, Or):
            return disj(walk(a, pol) for a in g.args)
        if isinstance(g, Exists):
            if not pol:
                raise UnsupportedFormula("universal quantification is not supported")
            mapping = {}
            for v in g.vars:
                if v.name in used:
                    nv = names.copy_of(v)
                    mapping[v] = LinTerm.var(nv)
                    v = nv
                used.add(v.name)
                hoisted.append(v)
            body = substitute(g.body, mapping, names) if mapping else g.body
            return walk(body, pol)
        if isinstance(g, ExistsRamsey):
            raise UnsupportedFormula("nested Ramsey quantifiers are not supported")
        raise TypeError(f"unknown formula node {type(g).__name__}")

    names.reserve(used)
    out = walk(f, True)
    return hoisted, out


def tuples_differ(xs: Iterable[SortedVar], ys: Iterable[SortedVar]) -> Formula:
    parts = []
    for x, y in zip(xs, ys):
        d = LinTerm.var(x) - LinTerm.var(y)
        parts.append(lt(d))
        parts.append(lt(-d))
    return disj(parts)


def lift_inner_existentials(f: ExistsRamsey, names: FreshNames | None = None) -> ExistsRamsey:
    """Equivalent Ramsey formula whose body is quantifier-free."""
    if names is None:
        names = FreshNames.for_formulas(f)
    ws, body = hoist_existentials(f.body, names, reserved=f.xs + f.ys)
    if not ws:
        return ExistsRamsey(f.xs, f.ys, body)
    v1 = [names.copy_of(w, "v") for w in ws]
    v2 = [names.copy_of(w, "v") for w in ws]
    w1 = [names.copy_of(w, "w") for w in ws]
    w2 = [names.copy_of(w, "w") for w in ws]
    mapping = {w: LinTerm.var(a) + LinTerm.var(b) for w, a, b in zip(ws, v1, w2)}
    body = substitute(body, mapping, names)
    body = conj(body, tuples_differ(f.xs, f.ys))
    return ExistsRamsey(f.xs + tuple(v1) + tuple(v2), f.ys + tuple(w1) + tuple(w2), body)

"""Ramsey quantifier elimination over LIRA (reals with floor).

The body is decomposed into integer-part and fractional-part atoms. Along an
infinite clique either the fractional parts or the integer parts form a
clique of their own, while the other component may stay constant; the flag
r records which component is allowed to be constant.
"""

from __future__ import annotations

from ..decompose import Separator, flatten_ramsey
from ..formula import (FALSE, TRUE, ExistsRamsey, Formula, FreshNames, conj, disj, eq,
                       exists, free_vars, substitute)
from ..lift import lift_inner_existentials
from ..normalize import (SelectorSkeleton, atom_sort, build_selector_skeleton, canonize,
                         nnf_positive, selector_range, unselected_or)
from ..terms import LinTerm, Sort
from .integer import eliminate_skeleton_int
from .real import eliminate_skeleton_real


def separated_ramsey(f: ExistsRamsey, names: FreshNames):
    """Flatten and separate the body.

    Returns the split Ramsey formula, the separator and the placeholder map
    of the flattening (parameter placeholder -> term).
    """
    flat = flatten_ramsey(f, names)
    sep = Separator(names)
    for v in sorted(flat.placeholders, key=lambda v: v.name):
        sep.split(v)
    for v in sorted(free_vars(f), key=lambda v: v.name):
        sep.split(v)
    # range constraints are unary, the first side suffices (see flatten_ramsey)
    body = conj(sep.ranges(flat.xs), sep.formula(flat.body))
    g = ExistsRamsey(tuple(sep.split_all(flat.xs)), tuple(sep.split_all(flat.ys)), body)
    return g, sep, flat.placeholders


def _restrict(m: dict, a) -> dict:
    vs = a.r.variables() | a.s.variables()
    return {v: m[v] for v in vs if v in m}


def _constant_branch(table, xs, ys, names: FreshNames) -> Formula:
    """exists x: alpha(x, x) where alpha = AND_i (sel_i = 1 -> atom_i)."""
    copies = [names.copy_of(x) for x in xs]
    m = {x: LinTerm.var(c) for x, c in zip(xs, copies)}
    m.update({y: LinTerm.var(c) for y, c in zip(ys, copies)})
    body = conj(unselected_or(q, substitute(a.as_formula(), _restrict(m, a), names))
                for q, a in table)
    return exists(copies, body)


def eliminate_ramsey_mixed(f: ExistsRamsey, names: FreshNames | None = None) -> Formula:
    if names is None:
        names = FreshNames.for_formulas(f)
    params = sorted(free_vars(f), key=lambda v: v.name)
    g, sep, placeholders = separated_ramsey(f, names)
    lifted = lift_inner_existentials(g, names)
    body = nnf_positive(lifted.body, None)
    canon = canonize(body, lifted.xs, lifted.ys, None)
    skel = build_selector_skeleton(canon, names, None)

    pairs = list(zip(lifted.xs, lifted.ys))
    xs_r = [x for x, _ in pairs if x.sort is Sort.REAL]
    ys_r = [y for x, y in pairs if x.sort is Sort.REAL]
    xs_i = [x for x, _ in pairs if x.sort is Sort.INT]
    ys_i = [y for x, y in pairs if x.sort is Sort.INT]
    alpha = tuple((q, a) for q, a in skel.table if atom_sort(a) is Sort.REAL)
    beta = tuple((q, a) for q, a in skel.table if atom_sort(a) is Sort.INT)

    r = names.var("r", Sort.INT)
    R = LinTerm.var(r)
    if xs_r:
        real_clique = eliminate_skeleton_real(SelectorSkeleton(TRUE, alpha, ()), xs_r, ys_r, names)
    else:
        real_clique = FALSE
    if xs_i:
        int_clique = eliminate_skeleton_int(SelectorSkeleton(TRUE, beta, ()), xs_i, ys_i, names)
    else:
        int_clique = FALSE
    out = conj(
        skel.formula,
        selector_range(r),
        disj(real_clique, conj(eq(R), _constant_branch(alpha, xs_r, ys_r, names))),
        disj(int_clique, conj(eq(R - 1), _constant_branch(beta, xs_i, ys_i, names))),
    )
    out = exists(list(skel.selectors) + [r], out)

    back = {}
    for z in params:
        zi, zr = sep.split(z)
        if zr is None:
            continue
        fl = LinTerm.floor(LinTerm.var(z))
        back[zi] = fl
        back[zr] = LinTerm.var(z) - fl
    for p, t in placeholders.items():
        pi, pr = sep.split(p)
        if pr is None:
            back[pi] = t
        else:
            fl = LinTerm.floor(t)
            back[pi] = fl
            back[pr] = t - fl
    return substitute(out, back, names) if back else out

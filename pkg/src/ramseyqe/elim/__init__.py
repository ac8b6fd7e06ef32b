"""Ramsey quantifier elimination: integer, real and mixed paths."""

from __future__ import annotations

import gc
from contextlib import contextmanager

from ..errors import SortError
from ..formula import (And, BoolConst, Exists, ExistsRamsey, Formula, FreshNames, Not, Or,
                       all_vars, conj, disj, has_floor, is_atom, neg)
from ..lift import lift_inner_existentials
from ..normalize import build_selector_skeleton, canonize, nnf_positive
from ..terms import Sort
from .integer import eliminate_skeleton_int
from .mixed import eliminate_ramsey_mixed
from .real import eliminate_skeleton_real

DOMAINS = ("int", "real", "mixed")


def eliminate_ramsey_int(f: ExistsRamsey, names: FreshNames | None = None) -> Formula:
    """Existential Presburger formula equivalent to ``f`` (all variables Int)."""
    names = names or FreshNames.for_formulas(f)
    _require_sort(f, Sort.INT)
    lifted = lift_inner_existentials(f, names)
    body = canonize(nnf_positive(lifted.body, Sort.INT), lifted.xs, lifted.ys, Sort.INT)
    skel = build_selector_skeleton(body, names, Sort.INT)
    return eliminate_skeleton_int(skel, lifted.xs, lifted.ys, names)


def eliminate_ramsey_real(f: ExistsRamsey, names: FreshNames | None = None) -> Formula:
    """Existential LRA formula equivalent to ``f`` (all variables Real)."""
    names = names or FreshNames.for_formulas(f)
    _require_sort(f, Sort.REAL)
    lifted = lift_inner_existentials(f, names)
    body = canonize(nnf_positive(lifted.body, Sort.REAL), lifted.xs, lifted.ys, Sort.REAL)
    skel = build_selector_skeleton(body, names, Sort.REAL)
    return eliminate_skeleton_real(skel, lifted.xs, lifted.ys, names)


def _require_sort(f: Formula, sort: Sort) -> None:
    if has_floor(f):
        raise SortError("floor requires the mixed domain")
    for v in all_vars(f):
        if v.sort is not sort:
            raise SortError(f"variable {v.name} has sort {v.sort}, expected {sort}")


def infer_domain(f: Formula) -> str:
    if has_floor(f):
        return "mixed"
    sorts = {v.sort for v in all_vars(f)}
    if sorts == {Sort.REAL}:
        return "real"
    if sorts <= {Sort.INT}:
        return "int"
    return "mixed"


def eliminate_ramsey(f: ExistsRamsey, domain: str | None = None,
                     names: FreshNames | None = None) -> Formula:
    names = names or FreshNames.for_formulas(f)
    domain = domain or infer_domain(f)
    if domain == "int":
        return eliminate_ramsey_int(f, names)
    if domain == "real":
        return eliminate_ramsey_real(f, names)
    if domain == "mixed":
        return eliminate_ramsey_mixed(f, names)
    raise ValueError(f"unknown domain {domain!r}")


@contextmanager
def _gc_paused():
    # formula graphs are acyclic, so cyclic collection during a large
    # elimination only rescans live objects; it roughly doubled the run time
    enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if enabled:
            gc.enable()


def eliminate(f: Formula, domain: str | None = None, names: FreshNames | None = None) -> Formula:
    """Replace every Ramsey quantifier in ``f`` by an equivalent existential formula."""
    names = names or FreshNames.for_formulas(f)

    def walk(g: Formula) -> Formula:
        if isinstance(g, BoolConst) or is_atom(g):
            return g
        if isinstance(g, ExistsRamsey):
            return eliminate_ramsey(g, domain, names)
        if isinstance(g, Not):
            return neg(walk(g.arg))
        if isinstance(g, And):
            return conj(walk(a) for a in g.args)
        if isinstance(g, Or):
            return disj(walk(a) for a in g.args)
        if isinstance(g, Exists):
            body = walk(g.body)
            return Exists(g.vars, body)
        raise TypeError(f"unknown formula node {type(g).__name__}")

    with _gc_paused():
        return walk(f)


__all__ = ["eliminate", "eliminate_ramsey", "eliminate_ramsey_int", "eliminate_ramsey_real",
           "eliminate_ramsey_mixed", "infer_domain", "DOMAINS"]

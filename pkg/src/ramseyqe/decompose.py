"""Splitting LIRA formulas into integer and fractional parts.

Two steps. ``flatten_atoms`` rewrites every atom that mentions a Real variable
or a floor into a Boolean combination of five primitive shapes over fresh
existential variables::

    x = 0    x = 1    x + y = z    x < 0    x = floor(y)

``separate`` then writes each Real variable v as v_int + v_real with
0 <= v_real < 1 and rewrites the primitive atoms so that every atom speaks
about integer parts only or fractional parts only.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import SortError, UnsupportedFormula
from .formula import (And, Atom, AtomKind, BoolConst, Exists, ExistsRamsey, Formula,
                      FreshNames, Not, Or, TermAtom, compare, conj, disj, eq, exists, free_vars,
                      is_atom, lt, neg)
from .lift import hoist_existentials
from .terms import Floor, LinTerm, Sort, SortedVar


def is_pure_int_atom(f: Formula) -> bool:
    if isinstance(f, Atom):
        t = f.lhs
        return not t.has_floor() and all(v.sort is Sort.INT for v in t.variables())
    if isinstance(f, TermAtom):
        return (not f.left.has_floor() and not f.right.has_floor()
                and all(v.sort is Sort.INT for v in f.left.variables() | f.right.variables()))
    return False


def _v(x: SortedVar) -> LinTerm:
    return LinTerm.var(x)


def _prim_zero(x):
    return TermAtom("=", _v(x), LinTerm.constant(0))


def _prim_one(x):
    return TermAtom("=", _v(x), LinTerm.constant(1))


def _prim_sum(x, y, z):
    return TermAtom("=", _v(x) + _v(y), _v(z))


def _prim_neg(x):
    return TermAtom("<", _v(x), LinTerm.constant(0))


def _prim_floor(x, y):
    return TermAtom("=", _v(x), LinTerm({Floor(_v(y)): 1}))


P, X, Y, W = "P", "X", "Y", "W"
# largest number of unit summands compared against zero in one atom
FUSED_MAX = 3


def join_sides(a: str, b: str) -> str:
    if a == b or b == P:
        return a
    if a == P:
        return b
    return W


class _Flattener:
    """Builds primitive definitions for terms, sharing repeated subterms.

    With ``sides`` (variable -> P/X/Y/W), every fresh variable is tagged by
    what it depends on: parameters only (P), the first tuple (X), the second
    tuple (Y) or both / inner witnesses (W). Parameter-only subterms then
    become placeholder parameters instead of definitions.
    """

    def __init__(self, names: FreshNames, sides: dict | None = None):
        self.names = names
        self.sides = sides
        self.defs: list[Formula] = []
        self.fresh: list[SortedVar] = []
        self.side: dict[SortedVar, str] = {}
        self.def_side: list[str] = []
        self.placeholders: dict[SortedVar, LinTerm] = {}
        self._placeholder_of: dict[LinTerm, SortedVar] = {}
        self._zero: SortedVar | None = None
        self._one: SortedVar | None = None
        self._terms: dict[LinTerm, SortedVar] = {}
        self._sums: dict[tuple, SortedVar] = {}
        self._muls: dict[tuple, SortedVar] = {}
        self._divs: dict[tuple, SortedVar] = {}
        self._negs: dict[SortedVar, SortedVar] = {}
        self._floors: dict[SortedVar, SortedVar] = {}

    def side_of(self, v: SortedVar) -> str:
        if v in self.side:
            return self.side[v]
        if self.sides is None:
            return P
        return self.sides.get(v, P)

    def _new(self, hint: str, sort: Sort, side: str = P) -> SortedVar:
        v = self.names.var(hint, sort)
        self.fresh.append(v)
        self.side[v] = side
        return v

    def _define(self, f: Formula, side: str) -> None:
        self.defs.append(f)
        self.def_side.append(side)

    @property
    def zero(self) -> SortedVar:
        if self._zero is None and self.sides is not None:
            self._zero = self.placeholder(LinTerm.constant(0))
        if self._zero is None:
            self._zero = self._new("zero", Sort.INT)
            self._define(_prim_zero(self._zero), P)
        return self._zero

    @property
    def one(self) -> SortedVar:
        if self._one is None and self.sides is not None:
            self._one = self.placeholder(LinTerm.constant(1))
        if self._one is None:
            self._one = self._new("one", Sort.INT)
            self._define(_prim_one(self._one), P)
        return self._one

    def add(self, a: SortedVar, b: SortedVar, into: SortedVar | None = None) -> SortedVar:
        key = (a, b) if key_lt(a, b) else (b, a)
        if into is None and key in self._sums:
            return self._sums[key]
        side = join_sides(self.side_of(a), self.side_of(b))
        if into is None:
            sort = Sort.INT if a.sort is Sort.INT and b.sort is Sort.INT else Sort.REAL
            into = self._new("s", sort, side)
            self._sums[key] = into
        self._define(_prim_sum(a, b, into), join_sides(side, self.side_of(into)))
        return into

    def negate(self, v: SortedVar) -> SortedVar:
        if v == self._zero:
            return v
        if v not in self._negs:
            n = self._new("n", v.sort, self.side_of(v))
            self._define(_prim_sum(n, v, self.zero), self.side_of(v))
            self._negs[v] = n
            self._negs[n] = v
        return self._negs[v]

    def mul(self, v: SortedVar, k: int, into: SortedVar | None = None) -> SortedVar:
        """k*v for a positive integer k by double-and-add; the last addition
        defines ``into`` when given."""
        if k == 1:
            return v
        key = (v, k)
        if into is None and key in self._muls:
            return self._muls[key]
        bits = bin(k)[3:]
        acc = v
        for n, bit in enumerate(bits):
            last = n == len(bits) - 1
            acc = self.add(acc, acc, into if last and bit == "0" else None)
            if bit == "1":
                acc = self.add(acc, v, into if last else None)
        if into is None:
            self._muls[key] = acc
        return acc

    def div(self, v: SortedVar, k: int) -> SortedVar:
        """v/k for a positive integer k: a fresh h with k*h = v."""
        if k == 1:
            return v
        key = (v, k)
        if key not in self._divs:
            h = self._new("h", Sort.REAL, self.side_of(v))
            self.mul(h, k, into=v)
            self._divs[key] = h
        return self._divs[key]

    def scaled(self, v: SortedVar, c: Fraction) -> SortedVar:
        if c < 0:
            return self.negate(self.scaled(v, -c))
        return self.div(self.mul(v, c.numerator), c.denominator)

    def constant(self, c: Fraction) -> SortedVar:
        if c == 0:
            return self.zero
        return self.scaled(self.one, c)

    def floor_of(self, u: SortedVar) -> SortedVar:
        if u.sort is Sort.INT:
            return u
        if u not in self._floors:
            f = self._new("fl", Sort.INT, self.side_of(u))
            self._define(_prim_floor(f, u), self.side_of(u))
            self._floors[u] = f
        return self._floors[u]

    def placeholder(self, t: LinTerm) -> SortedVar:
        if t not in self._placeholder_of:
            sort = Sort.INT if t.is_int_valued() else Sort.REAL
            v = self.names.var("par", sort)
            self.side[v] = P
            self.placeholders[v] = t
            self._placeholder_of[t] = v
        return self._placeholder_of[t]

    def key_var(self, k) -> SortedVar:
        if isinstance(k, SortedVar):
            return k
        return self.floor_of(self.term(k.arg))

    def term(self, t: LinTerm) -> SortedVar:
        """A variable equal to t."""
        if t in self._terms:
            return self._terms[t]
        items = t.items()
        if t.const == 0 and len(items) == 1 and items[0][1] == 1 and isinstance(items[0][0], SortedVar):
            return items[0][0]
        if self.sides is not None and self.term_side(t) == P:
            v = self.placeholder(t)
            self._terms[t] = v
            return v
        parts = [self.scaled(self.key_var(k), c) for k, c in items]
        if t.const != 0 or not parts:
            parts.append(self.constant(t.const))
        acc = parts[0]
        for p in parts[1:]:
            acc = self.add(acc, p)
        self._terms[t] = acc
        return acc

    def term_side(self, t: LinTerm) -> str:
        side = P
        for v in t.variables():
            side = join_sides(side, self.side_of(v))
        return side

    def without_floors(self, d: LinTerm) -> LinTerm:
        """d with every floor over a binder-dependent term replaced by an Int variable."""
        out = {}
        for k, c in d.items():
            if isinstance(k, Floor) and self.term_side(k.arg) != P:
                k = self.key_var(k)
            out[k] = out.get(k, 0) + c
        return LinTerm(out, d.const)

    # -- atoms --

    def _compare(self, rel: str, d: LinTerm) -> Formula:
        """``d rel 0`` for rel in <, <=, =, distinct over primitive shapes."""
        if self.sides is not None:
            d = self.without_floors(d)
            if all(v.sort is Sort.INT for v in d.variables()) and not d.has_floor():
                return compare(rel, d, LinTerm.constant(0))
            groups: dict[str, list] = {P: [], X: [], Y: [], W: []}
            for k, c in d.items():
                groups[self.term_side(LinTerm({k: 1}))].append((k, c))
            if not groups[W] and (groups[X] or groups[Y]):
                par = LinTerm(dict(groups[P]), d.const)
                pieces = self._pieces(groups[X], groups[Y], par, split=True)
                if len(pieces) > FUSED_MAX:
                    pieces = self._pieces(groups[X], groups[Y], par, split=False)
                return self._fused(rel, pieces)
        return self._single(rel, self.term(d))

    @staticmethod
    def _single(rel: str, s: SortedVar) -> Formula:
        if rel == "<":
            return _prim_neg(s)
        if rel == "<=":
            return disj(_prim_neg(s), _prim_zero(s))
        if rel == "=":
            return _prim_zero(s)
        return neg(_prim_zero(s))

    def _signed(self, t: LinTerm, placeholder: bool = False) -> tuple[int, SortedVar]:
        sign = -1 if all(c < 0 for _, c in t.items()) and t.const <= 0 else 1
        t = t.scale(sign)
        return sign, (self.placeholder(t) if placeholder else self.term(t))

    def _pieces(self, xpart, ypart, par: LinTerm, split: bool) -> list:
        out = []
        for group in (xpart, ypart):
            if not group:
                continue
            if split and all(abs(c) == 1 and isinstance(k, SortedVar) for k, c in group):
                out += [(int(c), k) for k, c in group]
            else:
                out.append(self._signed(LinTerm(dict(group))))
        if not par.is_zero():
            out.append(self._signed(par, placeholder=True))
        return out

    @staticmethod
    def _fused(rel: str, pieces) -> Formula:
        zero = LinTerm.constant(0)
        s = LinTerm({v: c for c, v in pieces})
        if rel == "<":
            return TermAtom("<", s, zero)
        if rel == "<=":
            return disj(TermAtom("<", s, zero), TermAtom("=", s, zero))
        if rel == "=":
            return TermAtom("=", s, zero)
        return neg(TermAtom("=", s, zero))

    def relation(self, rel: str, d: LinTerm, modulus: int | None, pol: bool) -> Formula:
        """Primitive form of ``d rel 0`` (or its congruence) at polarity pol."""
        if rel in ("cong", "ncong"):
            positive = (rel == "cong") == pol
            # d = e*k  or  d = e*k + m with 1 <= m <= e-1
            side = self.term_side(d)
            k = self._new("k", Sort.INT, W if side != P else P)
            if positive:
                out = self.relation("=", d - LinTerm.var(k).scale(modulus), None, True)
            else:
                m = self._new("m", Sort.INT, W if side != P else P)
                out = conj(
                    self.relation("=", d - LinTerm.var(k).scale(modulus) - LinTerm.var(m), None, True),
                    self.relation(">=", LinTerm.var(m) - 1, None, True),
                    self.relation("<=", LinTerm.var(m) - (modulus - 1), None, True),
                )
            return out if pol else neg(out)
        if rel in (">", ">="):
            d = -d
            rel = "<" if rel == ">" else "<="
        if rel not in ("<", "<=", "=", "distinct"):
            raise SortError(f"unknown relation {rel}")
        return self._compare(rel, d)

    def atom(self, f: Formula, pol: bool) -> Formula:
        if is_pure_int_atom(f):
            return f
        if isinstance(f, Atom):
            if f.kind is AtomKind.LT:
                return self.relation("<", f.lhs, None, pol)
            if f.kind is AtomKind.EQ:
                return self.relation("=", f.lhs, None, pol)
            rel = "cong" if f.kind is AtomKind.DIV else "ncong"
            return self.relation(rel, f.lhs - f.residue, f.modulus, pol)
        if isinstance(f, TermAtom):
            return self.relation(f.rel, f.left - f.right, f.modulus, pol)
        return self.atom(f.as_formula(), pol)

    def walk(self, f: Formula, pol: bool) -> Formula:
        if isinstance(f, BoolConst):
            return f
        if is_atom(f):
            return self.atom(f, pol)
        if isinstance(f, Not):
            return neg(self.walk(f.arg, not pol))
        if isinstance(f, And):
            return conj(self.walk(a, pol) for a in f.args)
        if isinstance(f, Or):
            return disj(self.walk(a, pol) for a in f.args)
        raise UnsupportedFormula(f"unexpected {type(f).__name__} in a quantifier-free matrix")


def key_lt(a: SortedVar, b: SortedVar) -> bool:
    return (a.name, a.sort.value) <= (b.name, b.sort.value)


def flatten_atoms(f: Formula, names: FreshNames | None = None) -> Formula:
    """Equivalent formula whose non-Presburger atoms are primitive.

    Atoms over Int variables only (and without floor) are kept as they are;
    every other atom is rewritten over fresh variables, whose definitions are
    conjoined at the top under one existential block. Fresh variables that
    are integer-valued by construction are Int-sorted.
    """
    if names is None:
        names = FreshNames.for_formulas(f)
    if isinstance(f, ExistsRamsey):
        return ExistsRamsey(f.xs, f.ys, flatten_atoms(f.body, names))
    ws, qf = hoist_existentials(f, names)
    fl = _Flattener(names)
    body = fl.walk(qf, True)
    return exists(ws + fl.fresh, conj(*fl.defs, body))


class RamseyFlattening:
    """Result of :func:`flatten_ramsey`.

    ``xs``/``ys`` are the extended tuples, ``body`` the primitive body (with
    the witness block ``ws`` still existentially bound inside) and
    ``placeholders`` maps parameter placeholders to the terms they stand for.
    """

    def __init__(self, xs, ys, body, placeholders):
        self.xs = tuple(xs)
        self.ys = tuple(ys)
        self.body = body
        self.placeholders = placeholders

    def as_formula(self) -> ExistsRamsey:
        return ExistsRamsey(self.xs, self.ys, self.body)


def flatten_ramsey(f: ExistsRamsey, names: FreshNames | None = None) -> RamseyFlattening:
    """Flatten the body of a Ramsey quantifier, keeping the dimension small.

    Fresh variables that are functions of the first tuple only are appended to
    it as extra coordinates (and symmetrically for the second tuple). Those
    coordinates are determined by the original ones, so cliques correspond
    one to one, up to dropping the first element. Only variables depending on
    both tuples or on inner witnesses stay existential inside the body.
    Parameter-only subterms become placeholder parameters.
    """
    if names is None:
        names = FreshNames.for_formulas(f)
    ws, qf = hoist_existentials(f.body, names, reserved=set(f.xs) | set(f.ys))
    sides = {x: X for x in f.xs}
    sides.update({y: Y for y in f.ys})
    sides.update({w: W for w in ws})
    fl = _Flattener(names, sides)
    matrix = fl.walk(qf, True)

    xf = [v for v in fl.fresh if fl.side[v] == X]
    yf = [v for v in fl.fresh if fl.side[v] == Y]
    wf = [v for v in fl.fresh if fl.side[v] in (W, P)]
    xdefs = [d for d, s in zip(fl.defs, fl.def_side) if s == X]
    ydefs = [d for d, s in zip(fl.defs, fl.def_side) if s == Y]
    wdefs = [d for d, s in zip(fl.defs, fl.def_side) if s in (W, P)]

    # Each definition constrains a single tuple; stating it on one side of the
    # pair is enough, since along an infinite clique every element occurs on
    # the first side and all but the first element occur on the second.
    x_twin = [names.copy_of(v) for v in xf]
    y_twin = [names.copy_of(v) for v in yf]
    body = conj(*xdefs, *ydefs, exists(ws + wf, conj(*wdefs, matrix)))
    xs = list(f.xs) + xf + y_twin
    ys = list(f.ys) + x_twin + yf
    return RamseyFlattening(xs, ys, body, dict(fl.placeholders))


# -- separation ---------------------------------------------------------------


def _split_name(v: SortedVar) -> str:
    return v.name.split("!")[0]


class Separator:
    """Replaces Real variables by integer and fractional parts."""

    def __init__(self, names: FreshNames):
        self.names = names
        self.parts: dict[SortedVar, tuple[SortedVar, SortedVar | None]] = {}

    def split(self, v: SortedVar) -> tuple[SortedVar, SortedVar | None]:
        if v not in self.parts:
            if v.sort is Sort.INT:
                self.parts[v] = (v, None)
            else:
                base = _split_name(v)
                self.parts[v] = (self.names.var(base + "_int", Sort.INT),
                                 self.names.var(base + "_frac", Sort.REAL))
        return self.parts[v]

    def split_all(self, vs) -> list[SortedVar]:
        out = []
        for v in vs:
            i, r = self.split(v)
            out.append(i)
            if r is not None:
                out.append(r)
        return out

    def ranges(self, vs) -> Formula:
        out = []
        for v in vs:
            r = self.split(v)[1]
            if r is not None:
                t = LinTerm.var(r)
                out.append(conj(disj(lt(-t), eq(t)), lt(t - 1)))
        return conj(out)

    def I(self, v: SortedVar) -> LinTerm:
        return LinTerm.var(self.split(v)[0])

    def R(self, v: SortedVar) -> LinTerm:
        r = self.split(v)[1]
        return LinTerm.var(r) if r is not None else LinTerm.constant(0)

    def atom(self, f: Formula) -> Formula:
        if is_pure_int_atom(f):
            return f
        if not isinstance(f, TermAtom):
            raise UnsupportedFormula(f"atom is not in primitive form: {f!r}")
        left, right = f.left, f.right
        li = left.items()
        if f.rel == "<" and right == 0 and len(li) == 1 and li[0][1] == 1 and left.const == 0:
            return lt(self.I(li[0][0]))
        if (f.rel in ("<", "=") and right == 0 and left.const == 0 and 1 <= len(li) <= FUSED_MAX
                and all(abs(c) == 1 and isinstance(k, SortedVar) for k, c in li)):
            return self._signed_sum(f.rel, li)
        if f.rel != "=":
            raise UnsupportedFormula(f"atom is not in primitive form: {f!r}")
        if len(li) == 1 and li[0][1] == 1 and left.const == 0 and isinstance(li[0][0], SortedVar):
            x = li[0][0]
            if right == 0:
                return conj(eq(self.I(x)), eq(self.R(x)))
            if right == 1:
                return conj(eq(self.I(x) - 1), eq(self.R(x)))
            ri = right.items()
            if (right.const == 0 and len(ri) == 1 and ri[0][1] == 1
                    and isinstance(ri[0][0], Floor)):
                inner = ri[0][0].arg.items()
                if len(inner) == 1 and inner[0][1] == 1 and ri[0][0].arg.const == 0:
                    y = inner[0][0]
                    return conj(eq(self.R(x)), eq(self.I(x) - self.I(y)))
        ri = right.items()
        if (left.const == 0 and right.const == 0 and len(ri) == 1 and ri[0][1] == 1
                and isinstance(ri[0][0], SortedVar)):
            z = ri[0][0]
            if len(li) == 2 and li[0][1] == 1 and li[1][1] == 1:
                x, y = li[0][0], li[1][0]
            elif len(li) == 1 and li[0][1] == 2:
                x = y = li[0][0]
            else:
                raise UnsupportedFormula(f"atom is not in primitive form: {f!r}")
            rsum = self.R(x) + self.R(y)
            isum = self.I(x) + self.I(y)
            no_carry = lt(rsum - 1)
            return conj(
                disj(neg(no_carry), conj(eq(isum - self.I(z)), eq(rsum - self.R(z)))),
                disj(no_carry, conj(eq(isum + 1 - self.I(z)), eq(rsum - 1 - self.R(z)))),
            )
        raise UnsupportedFormula(f"atom is not in primitive form: {f!r}")

    def _signed_sum(self, rel: str, items) -> Formula:
        """``sum(c*v) rel 0`` for unit coefficients c.

        With S_R the sum over fractional parts, floor(S_R) = j lies in a
        range fixed by the signs, and the sum is Isum + j + (S_R - j).
        """
        isum = LinTerm.sum(self.I(v).scale(c) for v, c in items)
        rsum = LinTerm.sum(self.R(v).scale(c) for v, c in items)
        real = [c for v, c in items if v.sort is Sort.REAL]
        # S_R lies in (-#neg, #pos) and may be exactly 0
        lo = -sum(1 for c in real if c < 0)
        hi = max(0, sum(1 for c in real if c > 0) - 1)
        cases = []
        for j in range(lo, hi + 1):
            if rel == "=":
                cases.append(conj(eq(isum + j), eq(rsum - j)))
                continue
            guard = []
            if j > lo:
                guard.append(neg(lt(rsum - j)))
            if j < hi:
                guard.append(lt(rsum - j - 1))
            cases.append(conj(*guard, lt(isum + j)))
        return disj(cases)

    def formula(self, f: Formula) -> Formula:
        if isinstance(f, BoolConst):
            return f
        if is_atom(f):
            return self.atom(f)
        if isinstance(f, Not):
            return neg(self.formula(f.arg))
        if isinstance(f, And):
            return conj(self.formula(a) for a in f.args)
        if isinstance(f, Or):
            return disj(self.formula(a) for a in f.args)
        if isinstance(f, Exists):
            vs = self.split_all(f.vars)
            return Exists(tuple(vs), conj(self.ranges(f.vars), self.formula(f.body)))
        if isinstance(f, ExistsRamsey):
            xs = self.split_all(f.xs)
            ys = self.split_all(f.ys)
            body = conj(self.ranges(f.xs), self.ranges(f.ys), self.formula(f.body))
            return ExistsRamsey(tuple(xs), tuple(ys), body)
        raise TypeError(f"unknown formula node {type(f).__name__}")


def separate(f: Formula, names: FreshNames | None = None):
    """Separated formula plus the map v -> (v_int, v_frac or None).

    Free Real variables are split too; their range constraints are conjoined
    at the top level.
    """
    if names is None:
        names = FreshNames.for_formulas(f)
    sep = Separator(names)
    fv = sorted(free_vars(f), key=lambda v: v.name)
    for v in fv:
        sep.split(v)
    g = conj(sep.ranges(fv), sep.formula(f))
    return g, dict(sep.parts)

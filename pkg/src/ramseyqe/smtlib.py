"""Parsing and printing of the SMT-LIB 2 fragment used here.

The input dialect is SMT-LIB 2 for linear integer/real arithmetic extended by
``(exists-ramsey ((x S) ...) ((y S) ...) body)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .errors import ParseError, SortError, UnsupportedFormula
from .formula import (FALSE, TRUE, Atom, AtomKind, BoolConst, Exists, ExistsRamsey,
                      Formula, Not, And, Or, TermAtom, compare, conj, disj, free_vars,
                      implies, is_atom, iter_nodes, neg)
from .terms import LinTerm, Sort, SortedVar

# -- tokenizer ---------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>;[^\n]*)
  | (?P<lpar>\()
  | (?P<rpar>\))
  | (?P<string>"(?:[^"]|"")*")
  | (?P<quoted>\|[^|]*\|)
  | (?P<atom>[^\s()";|]+)
""", re.VERBOSE)


@dataclass
class _Tok:
    text: str
    line: int
    col: int
    quoted: bool = False


@dataclass
class _List:
    items: list
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        s = m.group()
        col = pos - line_start + 1
        if kind == "lpar" or kind == "rpar":
            toks.append(_Tok(s, line, col))
        elif kind == "atom":
            toks.append(_Tok(s, line, col))
        elif kind == "quoted":
            toks.append(_Tok(s[1:-1], line, col, quoted=True))
        elif kind == "string":
            toks.append(_Tok(s, line, col, quoted=True))
        nl = s.count("\n")
        if nl:
            line += nl
            line_start = pos + s.rfind("\n") + 1
        pos = m.end()
    return toks


def _read_sexprs(text: str) -> list:
    toks = _tokenize(text)
    out: list = []
    stack: list[_List] = []
    for t in toks:
        if t.text == "(" and not t.quoted:
            stack.append(_List([], t.line, t.col))
        elif t.text == ")" and not t.quoted:
            if not stack:
                raise ParseError("unbalanced ')'", t.line, t.col)
            done = stack.pop()
            (stack[-1].items if stack else out).append(done)
        else:
            (stack[-1].items if stack else out).append(t)
    if stack:
        raise ParseError("unbalanced '(' (missing ')')", stack[-1].line, stack[-1].col)
    return out


def _loc(x) -> tuple[int, int]:
    return x.line, x.col


# -- script model ------------------------------------------------------------


@dataclass
class Script:
    """A parsed input: optional logic, declared constants and one goal."""

    logic: str | None
    declarations: tuple[SortedVar, ...]
    goal: Formula
    meta: dict = field(default_factory=dict)


_NUM = re.compile(r"^-?(\d+)(?:\.(\d+))?$")
_HEX = re.compile(r"^#x([0-9a-fA-F]+)$")
_BIN = re.compile(r"^#b([01]+)$")


def _number(tok: _Tok) -> Fraction | None:
    if tok.quoted:
        return None
    m = _NUM.match(tok.text)
    if m:
        return Fraction(tok.text)
    m = _HEX.match(tok.text)
    if m:
        return Fraction(int(m.group(1), 16))
    m = _BIN.match(tok.text)
    if m:
        return Fraction(int(m.group(1), 2))
    return None


def _is_decimal(tok) -> bool:
    return isinstance(tok, _Tok) and not tok.quoted and "." in tok.text and _NUM.match(tok.text)


class _Parser:
    def __init__(self, default_sort: Sort | None):
        self.default_sort = default_sort
        self.logic: str | None = None
        self.meta: dict[str, str] = {}
        self.decls: dict[str, SortedVar] = {}
        self.decl_order: list[SortedVar] = []
        self.asserts: list[Formula] = []
        # each scope maps a name to a SortedVar, a LinTerm or a Formula
        self.scopes: list[dict] = []

    # -- commands --

    def command(self, sx) -> None:
        if isinstance(sx, _Tok):
            raise ParseError(f"unexpected token {sx.text!r} at top level", *_loc(sx))
        if not sx.items or not isinstance(sx.items[0], _Tok):
            # a bare formula at top level is accepted as an assertion
            self.asserts.append(self.formula(sx))
            return
        head = sx.items[0].text
        args = sx.items[1:]
        if head == "set-logic":
            self._arity(sx, 1)
            self.logic = self._symbol(args[0])
            if self.default_sort is None:
                self.default_sort = _logic_default_sort(self.logic)
        elif head == "set-info":
            if len(args) == 2 and isinstance(args[0], _Tok) and isinstance(args[1], _Tok):
                self.meta[args[0].text.lstrip(":")] = args[1].text.strip("|\"")
        elif head in ("set-option", "check-sat", "exit", "get-model",
                      "get-value", "push", "pop", "echo", "get-info", "reset"):
            pass
        elif head == "declare-const":
            self._arity(sx, 2)
            self._declare(args[0], args[1])
        elif head == "declare-fun":
            self._arity(sx, 3)
            if not isinstance(args[1], _List) or args[1].items:
                raise ParseError("only nullary functions are supported", *_loc(args[1]))
            self._declare(args[0], args[2])
        elif head == "define-fun":
            self._arity(sx, 4)
            if not isinstance(args[1], _List) or args[1].items:
                raise ParseError("only nullary definitions are supported", *_loc(args[1]))
            name = self._name(args[0])
            val = self.expr(args[3])
            self.scopes_global()[name] = val
        elif head == "assert":
            self._arity(sx, 1)
            self.asserts.append(self.formula(args[0]))
        else:
            # treat as a bare formula expression
            self.asserts.append(self.formula(sx))

    def scopes_global(self) -> dict:
        if not self.scopes:
            self.scopes.append({})
        return self.scopes[0]

    def _arity(self, sx: _List, n: int) -> None:
        if len(sx.items) - 1 != n:
            raise ParseError(f"'{sx.items[0].text}' expects {n} argument(s)", *_loc(sx))

    def _symbol(self, tok) -> str:
        if not isinstance(tok, _Tok) or _number(tok) is not None:
            raise ParseError("expected a symbol", *_loc(tok))
        return tok.text

    def _name(self, tok) -> str:
        """A symbol being bound; builtin names cannot be shadowed."""
        name = self._symbol(tok)
        if name in _HANDLERS or name in _RESERVED:
            raise ParseError(f"cannot bind builtin symbol '{name}'", *_loc(tok))
        return name

    def _sort(self, tok) -> Sort:
        if isinstance(tok, _Tok) and not tok.quoted:
            if tok.text == "Int":
                return Sort.INT
            if tok.text == "Real":
                return Sort.REAL
            raise SortError(f"{tok.line}:{tok.col}: unsupported sort {tok.text}")
        raise ParseError("expected a sort", *_loc(tok))

    def _declare(self, name_tok, sort_tok) -> SortedVar:
        name = self._name(name_tok)
        sort = self._sort(sort_tok)
        if name in self.decls:
            if self.decls[name].sort is not sort:
                raise SortError(f"{name_tok.line}:{name_tok.col}: {name} redeclared with another sort")
            return self.decls[name]
        v = SortedVar(name, sort)
        self.decls[name] = v
        self.decl_order.append(v)
        return v

    # -- expressions --

    def formula(self, sx) -> Formula:
        val = self.expr(sx)
        if not isinstance(val, Formula):
            raise SortError(f"{sx.line}:{sx.col}: expected a formula, found a term")
        return val

    def term(self, sx) -> LinTerm:
        val = self.expr(sx)
        if not isinstance(val, LinTerm):
            raise SortError(f"{sx.line}:{sx.col}: expected a term, found a formula")
        return val

    def lookup(self, tok: _Tok):
        name = tok.text
        for scope in reversed(self.scopes):
            if name in scope:
                val = scope[name]
                return LinTerm.var(val) if isinstance(val, SortedVar) else val
        if name in self.decls:
            return LinTerm.var(self.decls[name])
        if not tok.quoted:
            if name == "true":
                return TRUE
            if name == "false":
                return FALSE
        if name in _HANDLERS or name in _RESERVED:
            raise ParseError(f"builtin symbol '{name}' used as a constant", *_loc(tok))
        if self.default_sort is None:
            sort = Sort.INT
        else:
            sort = self.default_sort
        v = SortedVar(name, sort)
        self.decls[name] = v
        self.decl_order.append(v)
        return LinTerm.var(v)

    def expr(self, sx):
        if isinstance(sx, _Tok):
            n = _number(sx)
            if n is not None:
                return LinTerm.constant(n)
            return self.lookup(sx)
        if not sx.items:
            raise ParseError("empty expression '()'", *_loc(sx))
        head = sx.items[0]
        args = sx.items[1:]
        if isinstance(head, _List):
            return self._indexed_app(head, args, sx)
        op = head.text
        if head.quoted:
            raise ParseError(f"unknown function {op}", *_loc(head))
        handler = _HANDLERS.get(op)
        if handler is None:
            raise ParseError(f"unknown or unsupported operator '{op}'", *_loc(head))
        return handler(self, sx, args)

    def _indexed_app(self, head: _List, args, sx):
        items = head.items
        if (len(items) == 3 and isinstance(items[0], _Tok) and items[0].text == "_"
                and isinstance(items[1], _Tok) and items[1].text == "divisible"):
            e = _number(items[2]) if isinstance(items[2], _Tok) else None
            if e is None or e.denominator != 1 or e <= 0:
                raise ParseError("divisible needs a positive integer index", *_loc(head))
            if len(args) != 1:
                raise ParseError("divisible takes one argument", *_loc(sx))
            t = self.term(args[0])
            _need_int(t, sx)
            return compare("cong", t, LinTerm.constant(0), int(e))
        raise ParseError("unsupported indexed operator", *_loc(head))

    def _bind(self, binders, allow_formula=False) -> dict:
        if not isinstance(binders, _List):
            raise ParseError("expected a binder list", *_loc(binders))
        scope = {}
        for b in binders.items:
            if not isinstance(b, _List) or len(b.items) != 2:
                raise ParseError("malformed binder", *_loc(b))
            name = self._name(b.items[0])
            scope[name] = SortedVar(name, self._sort(b.items[1]))
        return scope


def _logic_default_sort(logic: str) -> Sort | None:
    if "RA" in logic:
        return Sort.REAL
    if "IA" in logic:
        return Sort.INT
    return None


def _need_int(t: LinTerm, sx) -> None:
    if not t.is_int_valued():
        raise SortError(f"{sx.line}:{sx.col}: integer operation applied to a non-integer term")


def _terms(p: _Parser, args) -> list[LinTerm]:
    return [p.term(a) for a in args]


def _h_plus(p, sx, args):
    if not args:
        raise ParseError("'+' needs arguments", *_loc(sx))
    return LinTerm.sum(_terms(p, args))


def _h_minus(p, sx, args):
    ts = _terms(p, args)
    if not ts:
        raise ParseError("'-' needs arguments", *_loc(sx))
    if len(ts) == 1:
        return -ts[0]
    out = ts[0]
    for t in ts[1:]:
        out = out - t
    return out


def _h_times(p, sx, args):
    ts = _terms(p, args)
    if not ts:
        raise ParseError("'*' needs arguments", *_loc(sx))
    out = LinTerm.constant(1)
    for t in ts:
        if not out.is_constant() and not t.is_constant():
            raise ParseError("nonlinear multiplication", *_loc(sx))
        out = out * t
    return out


def _h_div(p, sx, args):
    ts = _terms(p, args)
    if len(ts) < 2:
        raise ParseError("'/' needs at least two arguments", *_loc(sx))
    out = ts[0]
    for t in ts[1:]:
        if not t.is_constant():
            raise ParseError("division by a non-constant term", *_loc(sx))
        if t.const == 0:
            raise ParseError("division by zero", *_loc(sx))
        out = out.scale(1 / t.const)
    return out


def _const_modulus(p, sx, tok) -> int:
    t = p.term(tok)
    if not t.is_constant() or t.const.denominator != 1 or t.const <= 0:
        raise ParseError("modulus must be a positive integer constant", *_loc(sx))
    return int(t.const)


def _h_intdiv(p, sx, args):
    if len(args) != 2:
        raise ParseError("'div' takes two arguments", *_loc(sx))
    t = p.term(args[0])
    _need_int(t, sx)
    e = _const_modulus(p, sx, args[1])
    return LinTerm.floor(t.scale(Fraction(1, e)))


def _h_mod(p, sx, args):
    if len(args) != 2:
        raise ParseError("'mod' takes two arguments", *_loc(sx))
    t = p.term(args[0])
    _need_int(t, sx)
    e = _const_modulus(p, sx, args[1])
    return t - LinTerm.floor(t.scale(Fraction(1, e))).scale(e)


def _h_to_int(p, sx, args):
    if len(args) != 1:
        raise ParseError("'to_int' takes one argument", *_loc(sx))
    return LinTerm.floor(p.term(args[0]))


def _h_to_real(p, sx, args):
    if len(args) != 1:
        raise ParseError("'to_real' takes one argument", *_loc(sx))
    return p.term(args[0])


def _h_not(p, sx, args):
    if len(args) != 1:
        raise ParseError("'not' takes one argument", *_loc(sx))
    return neg(p.formula(args[0]))


def _h_and(p, sx, args):
    return conj(p.formula(a) for a in args)


def _h_or(p, sx, args):
    return disj(p.formula(a) for a in args)


def _h_implies(p, sx, args):
    fs = [p.formula(a) for a in args]
    if len(fs) < 2:
        raise ParseError("'=>' needs at least two arguments", *_loc(sx))
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = implies(f, out)
    return out


def _h_xor(p, sx, args):
    fs = [p.formula(a) for a in args]
    if len(fs) < 2:
        raise ParseError("'xor' needs at least two arguments", *_loc(sx))
    out = fs[0]
    for f in fs[1:]:
        out = disj(conj(out, neg(f)), conj(neg(out), f))
    return out


def _mod_pattern(p, a, b):
    """Recognise ``(= (mod t e) c)`` with a constant residue as a congruence."""
    if (isinstance(a, _List) and a.items and isinstance(a.items[0], _Tok)
            and a.items[0].text == "mod" and len(a.items) == 3):
        c = p.term(b)
        if c.is_constant():
            t = p.term(a.items[1])
            _need_int(t, a)
            e = _const_modulus(p, a, a.items[2])
            r = c.const
            if r.denominator != 1 or not 0 <= r < e:
                return FALSE
            return compare("cong", t, c, e)
    return None


def _chain(rel):
    def handler(p, sx, args):
        if len(args) < 2:
            raise ParseError(f"'{rel}' needs at least two arguments", *_loc(sx))
        vals = [p.expr(a) for a in args]
        if rel in ("=", "distinct") and all(isinstance(v, Formula) for v in vals):
            if rel == "=":
                return conj(conj(implies(a, b), implies(b, a)) for a, b in zip(vals, vals[1:]))
            if len(vals) != 2:
                return FALSE if len(vals) > 2 else TRUE
            a, b = vals
            return disj(conj(a, neg(b)), conj(neg(a), b))
        for v, a in zip(vals, args):
            if not isinstance(v, LinTerm):
                raise SortError(f"{a.line}:{a.col}: expected a term, found a formula")
        if rel == "=" and len(args) == 2:
            for x, y in ((args[0], args[1]), (args[1], args[0])):
                m = _mod_pattern(p, x, y)
                if m is not None:
                    return m
        if rel == "distinct":
            return conj(compare("distinct", a, b)
                        for i, a in enumerate(vals) for b in vals[i + 1:])
        return conj(compare(rel, a, b) for a, b in zip(vals, vals[1:]))
    return handler


def _h_ite(p, sx, args):
    if len(args) != 3:
        raise ParseError("'ite' takes three arguments", *_loc(sx))
    c = p.formula(args[0])
    a = p.expr(args[1])
    b = p.expr(args[2])
    if isinstance(a, Formula) and isinstance(b, Formula):
        return disj(conj(c, a), conj(neg(c), b))
    raise ParseError("term-level 'ite' is not supported", *_loc(sx))


def _h_exists(p, sx, args):
    if len(args) != 2:
        raise ParseError("'exists' takes a binder list and a body", *_loc(sx))
    scope = p._bind(args[0])
    p.scopes.append(scope)
    try:
        body = p.formula(args[1])
    finally:
        p.scopes.pop()
    vs = tuple(scope.values())
    if not vs:
        return body
    return Exists(vs, body)


def _h_forall(p, sx, args):
    if len(args) != 2:
        raise ParseError("'forall' takes a binder list and a body", *_loc(sx))
    scope = p._bind(args[0])
    p.scopes.append(scope)
    try:
        body = p.formula(args[1])
    finally:
        p.scopes.pop()
    vs = tuple(scope.values())
    return neg(Exists(vs, neg(body))) if vs else body


def _h_ramsey(p, sx, args):
    if len(args) != 3:
        raise ParseError("'exists-ramsey' takes two binder lists and a body", *_loc(sx))
    xs = p._bind(args[0])
    ys = p._bind(args[1])
    if not xs or len(xs) != len(ys):
        raise SortError(f"{sx.line}:{sx.col}: Ramsey binder lists must be non-empty and equally long")
    if set(xs) & set(ys):
        raise SortError(f"{sx.line}:{sx.col}: Ramsey binder variables must be distinct")
    scope = dict(xs)
    scope.update(ys)
    p.scopes.append(scope)
    try:
        body = p.formula(args[2])
    finally:
        p.scopes.pop()
    return ExistsRamsey(tuple(xs.values()), tuple(ys.values()), body)


def _h_let(p, sx, args):
    if len(args) != 2 or not isinstance(args[0], _List):
        raise ParseError("malformed 'let'", *_loc(sx))
    scope = {}
    for b in args[0].items:
        if not isinstance(b, _List) or len(b.items) != 2:
            raise ParseError("malformed let binding", *_loc(b))
        scope[p._name(b.items[0])] = p.expr(b.items[1])
    p.scopes.append(scope)
    try:
        return p.expr(args[1])
    finally:
        p.scopes.pop()


def _h_annot(p, sx, args):
    if not args:
        raise ParseError("'!' needs a body", *_loc(sx))
    return p.expr(args[0])


_HANDLERS = {
    "+": _h_plus, "-": _h_minus, "*": _h_times, "/": _h_div,
    "div": _h_intdiv, "mod": _h_mod, "to_int": _h_to_int, "to_real": _h_to_real,
    "not": _h_not, "and": _h_and, "or": _h_or, "=>": _h_implies, "xor": _h_xor,
    "=": _chain("="), "<": _chain("<"), "<=": _chain("<="), ">": _chain(">"),
    ">=": _chain(">="), "distinct": _chain("distinct"), "ite": _h_ite,
    "exists": _h_exists, "forall": _h_forall, "exists-ramsey": _h_ramsey,
    "let": _h_let, "!": _h_annot,
}


def parse_script(text: str, default_sort: Sort | None = None) -> Script:
    """Parse SMT-LIB text (with the Ramsey extension) into a Script.

    Undeclared symbols are declared implicitly with the logic's default sort
    (Int if there is no logic). Multiple assertions are conjoined.
    """
    p = _Parser(default_sort)
    sexprs = _read_sexprs(text)
    for sx in sexprs:
        p.command(sx)
    goal = conj(p.asserts) if p.asserts else TRUE
    _check_ramsey_shape(goal)
    return Script(p.logic, tuple(p.decl_order), goal, dict(p.meta))


def parse_formula(text: str, decls: Iterable[SortedVar] = (),
                  default_sort: Sort | None = None) -> Formula:
    p = _Parser(default_sort)
    for v in decls:
        p.decls[v.name] = v
        p.decl_order.append(v)
    sx = _read_sexprs(text)
    if len(sx) != 1:
        raise ParseError("expected exactly one expression")
    return p.formula(sx[0])


def _check_ramsey_shape(goal: Formula) -> None:
    for g in iter_nodes(goal):
        if isinstance(g, ExistsRamsey):
            for h in iter_nodes(g.body):
                if isinstance(h, ExistsRamsey):
                    raise SortError("nested Ramsey quantifiers are not supported")


# -- printing ------------------------------------------------------------------


def _num(c: Fraction, real: bool) -> str:
    neg_ = c < 0
    a = -c if neg_ else c
    if a.denominator == 1:
        s = f"{a.numerator}.0" if real else str(a.numerator)
    else:
        if not real:
            raise SortError("non-integer constant in an integer context")
        s = f"(/ {a.numerator}.0 {a.denominator}.0)"
    return f"(- {s})" if neg_ else s


def _is_real_term(t: LinTerm) -> bool:
    return not t.is_int_valued()


def _key_str(k, real: bool) -> str:
    if isinstance(k, SortedVar):
        s = _sym(k.name)
        if real and k.sort is Sort.INT:
            return f"(to_real {s})"
        return s
    s = f"(to_int {_term(k.arg, True)})"
    return f"(to_real {s})" if real else s


def _term(t: LinTerm, real: bool) -> str:
    parts = []
    for k, c in t.items():
        ks = _key_str(k, real)
        if c == 1:
            parts.append(ks)
        elif c == -1:
            parts.append(f"(- {ks})")
        else:
            parts.append(f"(* {_num(c, real)} {ks})")
    if t.const != 0 or not parts:
        parts.append(_num(t.const, real))
    if len(parts) == 1:
        return parts[0]
    return "(+ " + " ".join(parts) + ")"


_SIMPLE = re.compile(r"^[A-Za-z~!@$%^&*_+=<>.?/\-][A-Za-z0-9~!@$%^&*_+=<>.?/\-]*$")
_RESERVED = {"true", "false", "and", "or", "not", "exists", "forall", "let", "assert",
             "par", "as", "_", "!", "ite", "NUMERAL", "DECIMAL", "STRING"}


def _sym(name: str) -> str:
    if _SIMPLE.match(name) and name not in _RESERVED:
        return name
    return f"|{name}|"


def _split_sides(d: LinTerm) -> tuple[LinTerm, LinTerm]:
    """Write ``d rel 0`` as ``pos rel neg`` with non-negative coefficients."""
    pos: dict = {}
    negs: dict = {}
    for k, c in d.items():
        if c > 0:
            pos[k] = c
        else:
            negs[k] = -c
    lhs = LinTerm(pos, d.const if d.const > 0 else 0)
    rhs = LinTerm(negs, -d.const if d.const < 0 else 0)
    return lhs, rhs


def _atom_str(f: Formula) -> str:
    if isinstance(f, Atom):
        if f.kind in (AtomKind.DIV, AtomKind.NDIV):
            s = f"(= (mod {_term(f.lhs, False)} {f.modulus}) {f.residue})"
            return s if f.kind is AtomKind.DIV else f"(not {s})"
        lhs, rhs = _split_sides(f.lhs)
        real = _is_real_term(f.lhs)
        op = "<" if f.kind is AtomKind.LT else "="
        return f"({op} {_term(lhs, real)} {_term(rhs, real)})"
    if isinstance(f, TermAtom):
        if f.rel == "cong":
            r = f.right
            if (r.is_constant() and r.const.denominator == 1 and 0 <= r.const < f.modulus
                    and f.left.is_int_valued()):
                return f"(= (mod {_term(f.left, False)} {f.modulus}) {r.const.numerator})"
            return f"(= (mod {_term(f.left - f.right, False)} {f.modulus}) 0)"
        real = _is_real_term(f.left) or _is_real_term(f.right)
        return f"({f.rel} {_term(f.left, real)} {_term(f.right, real)})"
    return _atom_str_canon(f)


def _atom_str_canon(f) -> str:
    return _formula_str(f.as_formula(), False)


def _binders(vs) -> str:
    return "(" + " ".join(f"({_sym(v.name)} {v.sort.value})" for v in vs) + ")"


def _formula_str(f: Formula, allow_ramsey: bool) -> str:
    out: list[str] = []
    _emit(f, allow_ramsey, out)
    return "".join(out)


def _emit(f: Formula, allow_ramsey: bool, out: list[str]) -> None:
    if isinstance(f, BoolConst):
        out.append("true" if f.value else "false")
    elif is_atom(f):
        out.append(_atom_str(f))
    elif isinstance(f, Not):
        out.append("(not ")
        _emit(f.arg, allow_ramsey, out)
        out.append(")")
    elif isinstance(f, (And, Or)):
        out.append("(and" if isinstance(f, And) else "(or")
        for a in f.args:
            out.append(" ")
            _emit(a, allow_ramsey, out)
        out.append(")")
    elif isinstance(f, Exists):
        out.append(f"(exists {_binders(f.vars)} ")
        _emit(f.body, allow_ramsey, out)
        out.append(")")
    elif isinstance(f, ExistsRamsey):
        if not allow_ramsey:
            raise UnsupportedFormula("ramsey binder not eliminated")
        out.append(f"(exists-ramsey {_binders(f.xs)} {_binders(f.ys)} ")
        _emit(f.body, allow_ramsey, out)
        out.append(")")
    else:
        raise TypeError(f"unknown formula node {type(f).__name__}")


def formula_to_smtlib(f: Formula, allow_ramsey: bool = False) -> str:
    return _formula_str(f, allow_ramsey)


def infer_logic(f: Formula, extra_vars: Iterable[SortedVar] = ()) -> str:
    from .formula import all_vars, has_floor
    vs = all_vars(f) | set(extra_vars)
    ints = any(v.sort is Sort.INT for v in vs)
    reals = any(v.sort is Sort.REAL for v in vs)
    quantified = any(isinstance(g, Exists) for g in iter_nodes(f))
    if has_floor(f) or (ints and reals):
        base = "LIRA"
    elif reals:
        base = "LRA"
    else:
        base = "LIA"
    return base if quantified else "QF_" + base


def print_smtlib2(script: Script, allow_ramsey: bool = False, check_sat: bool = True) -> str:
    """Render a script: set-logic, one declare-const per free variable and a
    single assert. Ramsey binders are rejected unless ``allow_ramsey``."""
    goal = script.goal
    fv = free_vars(goal)
    decl_vars = list(script.declarations) + sorted(
        (v for v in fv if v not in set(script.declarations)), key=lambda v: v.name)
    logic = script.logic or infer_logic(goal, decl_vars)
    if logic == "QF_LIA" and any(v.sort is Sort.REAL for v in fv):
        raise SortError("Real variables under logic QF_LIA")
    if logic == "QF_LIA":
        from .formula import has_floor
        if has_floor(goal):
            raise SortError("floor over Real under logic QF_LIA")
    lines = [f"(set-logic {logic})"]
    for key, value in script.meta.items():
        lines.append(f"(set-info :{key} {value})")
    seen = set()
    for v in decl_vars:
        if v.name in seen:
            continue
        seen.add(v.name)
        lines.append(f"(declare-const {_sym(v.name)} {v.sort.value})")
    lines.append(f"(assert {_formula_str(goal, allow_ramsey)})")
    if check_sat:
        lines.append("(check-sat)")
    return "\n".join(lines) + "\n"


def parse_sexpr_value(text: str) -> list:
    """Read s-expressions into nested Python lists of strings (for solver output)."""
    def conv(x):
        if isinstance(x, _List):
            return [conv(i) for i in x.items]
        return x.text
    return [conv(x) for x in _read_sexprs(text)]

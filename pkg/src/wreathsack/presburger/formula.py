"""Presburger terms and formulas over the integers.

Terms are integer-linear combinations of named variables plus a constant.
Atoms are ``t = 0``, ``t <= 0`` and ``d | t``.  Every node is an immutable,
hashable value; the smart constructors :func:`eq`, :func:`le`, :func:`div`,
:func:`conj`, :func:`disj` and :func:`neg` keep atoms in a canonical form so
that structurally equal formulas compare equal.
"""

from __future__ import annotations

import math
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple


class Term:
    """``sum(c * v) + const`` with arbitrary-precision coefficients."""

    __slots__ = ("coeffs", "const", "_hash")

    def __init__(self, coeffs: Iterable[Tuple[str, int]] = (), const: int = 0):
        acc: Dict[str, int] = {}
        for v, c in coeffs:
            if c:
                acc[v] = acc.get(v, 0) + c
        self.coeffs: Tuple[Tuple[str, int], ...] = tuple(sorted((v, c) for v, c in acc.items() if c))
        self.const = int(const)
        self._hash = hash((self.coeffs, self.const))

    @classmethod
    def var(cls, name: str, coeff: int = 1) -> "Term":
        return cls(((name, coeff),))

    @classmethod
    def constant(cls, value: int) -> "Term":
        return cls((), value)

    @classmethod
    def from_dict(cls, coeffs: Mapping[str, int], const: int = 0) -> "Term":
        return cls(coeffs.items(), const)

    def coeff(self, name: str) -> int:
        for v, c in self.coeffs:
            if v == name:
                return c
        return 0

    @property
    def variables(self) -> Tuple[str, ...]:
        return tuple(v for v, _ in self.coeffs)

    def is_constant(self) -> bool:
        return not self.coeffs

    def content(self) -> int:
        """gcd of the variable coefficients (0 for a constant term)."""
        g = 0
        for _, c in self.coeffs:
            g = math.gcd(g, c)
        return g

    def __add__(self, other) -> "Term":
        if isinstance(other, int):
            return Term(self.coeffs, self.const + other)
        return Term(self.coeffs + other.coeffs, self.const + other.const)

    __radd__ = __add__

    def __neg__(self) -> "Term":
        return Term(((v, -c) for v, c in self.coeffs), -self.const)

    def __sub__(self, other) -> "Term":
        return self + (-other if isinstance(other, Term) else -other)

    def __rsub__(self, other) -> "Term":
        return (-self) + other

    def __mul__(self, k: int) -> "Term":
        return Term(((v, c * k) for v, c in self.coeffs), self.const * k)

    __rmul__ = __mul__

    def without(self, name: str) -> "Term":
        return Term(((v, c) for v, c in self.coeffs if v != name), self.const)

    def substitute(self, name: str, value: "Term") -> "Term":
        c = self.coeff(name)
        if not c:
            return self
        return self.without(name) + value * c

    def rename(self, mapping: Mapping[str, str]) -> "Term":
        return Term(((mapping.get(v, v), c) for v, c in self.coeffs), self.const)

    def evaluate(self, env: Mapping[str, int]) -> int:
        return sum(c * env[v] for v, c in self.coeffs) + self.const

    def __eq__(self, other) -> bool:
        return isinstance(other, Term) and self.coeffs == other.coeffs and self.const == other.const

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Term({to_text_term(self)})"


class Formula:
    __slots__ = ("_hash",)

    def free_vars(self) -> frozenset:
        raise NotImplementedError

    def __and__(self, other: "Formula") -> "Formula":
        return conj(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return disj(self, other)

    def __invert__(self) -> "Formula":
        return neg(self)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return to_text(self)


class Const(Formula):
    __slots__ = ("value",)

    def __init__(self, value: bool):
        self.value = bool(value)
        self._hash = hash(("const", self.value))

    def free_vars(self) -> frozenset:
        return frozenset()

    def __eq__(self, other) -> bool:
        return isinstance(other, Const) and other.value == self.value


TRUE = Const(True)
FALSE = Const(False)


class Atom(Formula):
    __slots__ = ("term",)
    term: Term

    def free_vars(self) -> frozenset:
        return frozenset(self.term.variables)


class Eq(Atom):
    """``term = 0``"""

    __slots__ = ()

    def __init__(self, term: Term):
        self.term = term
        self._hash = hash(("eq", term))

    def __eq__(self, other) -> bool:
        return isinstance(other, Eq) and other.term == self.term


class Le(Atom):
    """``term <= 0``"""

    __slots__ = ()

    def __init__(self, term: Term):
        self.term = term
        self._hash = hash(("le", term))

    def __eq__(self, other) -> bool:
        return isinstance(other, Le) and other.term == self.term


class Div(Atom):
    """``modulus | term`` with ``modulus >= 2``."""

    __slots__ = ("modulus",)

    def __init__(self, modulus: int, term: Term):
        self.modulus = modulus
        self.term = term
        self._hash = hash(("div", modulus, term))

    def __eq__(self, other) -> bool:
        return isinstance(other, Div) and other.modulus == self.modulus and other.term == self.term


class Not(Formula):
    __slots__ = ("arg",)

    def __init__(self, arg: Formula):
        self.arg = arg
        self._hash = hash(("not", arg))

    def free_vars(self) -> frozenset:
        return self.arg.free_vars()

    def __eq__(self, other) -> bool:
        return isinstance(other, Not) and other.arg == self.arg


class _NAry(Formula):
    __slots__ = ("args", "_fv")
    tag = ""

    def __init__(self, args: Tuple[Formula, ...]):
        self.args = args
        self._hash = hash((self.tag, frozenset(args)))
        self._fv = None

    def free_vars(self) -> frozenset:
        if self._fv is None:
            fv = frozenset()
            for a in self.args:
                fv = fv | a.free_vars()
            self._fv = fv
        return self._fv

    def __eq__(self, other) -> bool:
        return type(other) is type(self) and frozenset(other.args) == frozenset(self.args)


class And(_NAry):
    __slots__ = ()
    tag = "and"


class Or(_NAry):
    __slots__ = ()
    tag = "or"


class _Quant(Formula):
    __slots__ = ("var", "body")
    tag = ""

    def __init__(self, var: str, body: Formula):
        self.var = var
        self.body = body
        self._hash = hash((self.tag, var, body))

    def free_vars(self) -> frozenset:
        return self.body.free_vars() - {self.var}

    def __eq__(self, other) -> bool:
        return type(other) is type(self) and other.var == self.var and other.body == self.body


class Exists(_Quant):
    __slots__ = ()
    tag = "exists"


class Forall(_Quant):
    __slots__ = ()
    tag = "forall"


# defining __eq__ in a subclass resets __hash__
for _cls in (Const, Eq, Le, Div, Not, _NAry, _Quant):
    _cls.__hash__ = Formula.__hash__


# -- smart constructors ----------------------------------------------------


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def eq(term: Term) -> Formula:
    if term.is_constant():
        return TRUE if term.const == 0 else FALSE
    g = term.content()
    if term.const % g:
        return FALSE
    if g != 1:
        term = Term(((v, c // g) for v, c in term.coeffs), term.const // g)
    if term.coeffs[0][1] < 0:
        term = -term
    return Eq(term)


def le(term: Term) -> Formula:
    if term.is_constant():
        return TRUE if term.const <= 0 else FALSE
    g = term.content()
    if g != 1:
        term = Term(((v, c // g) for v, c in term.coeffs), _ceil_div(term.const, g))
    return Le(term)


def div(modulus: int, term: Term) -> Formula:
    d = abs(modulus)
    if d == 0:
        return eq(term)
    if d == 1:
        return TRUE
    coeffs = [(v, c % d) for v, c in term.coeffs]
    coeffs = [(v, c) for v, c in coeffs if c]
    const = term.const % d
    if not coeffs:
        return TRUE if const == 0 else FALSE
    g = d
    for _, c in coeffs:
        g = math.gcd(g, c)
    if const % g:
        return FALSE
    if g != 1:
        d //= g
        coeffs = [(v, c // g) for v, c in coeffs]
        const //= g
        if d == 1:
            return TRUE
    return Div(d, Term(coeffs, const))


def ge(term: Term) -> Formula:
    """``term >= 0``"""
    return le(-term)


def lt(term: Term) -> Formula:
    """``term < 0``"""
    return le(term + 1)


def nonneg(*names: str) -> Formula:
    return conj(*(ge(Term.var(v)) for v in names))


def _flatten(cls, args: Iterable[Formula]) -> List[Formula]:
    out: List[Formula] = []
    for a in args:
        if type(a) is cls:
            out.extend(a.args)
        else:
            out.append(a)
    return out


def conj(*args: Formula) -> Formula:
    items = []
    seen = set()
    for a in _flatten(And, args):
        if isinstance(a, Const):
            if not a.value:
                return FALSE
            continue
        if a not in seen:
            seen.add(a)
            items.append(a)
    if not items:
        return TRUE
    if len(items) == 1:
        return items[0]
    return And(tuple(items))


def disj(*args: Formula) -> Formula:
    items = []
    seen = set()
    for a in _flatten(Or, args):
        if isinstance(a, Const):
            if a.value:
                return TRUE
            continue
        if a not in seen:
            seen.add(a)
            items.append(a)
    if not items:
        return FALSE
    if len(items) == 1:
        return items[0]
    return Or(tuple(items))


def conj_all(args: Iterable[Formula]) -> Formula:
    return conj(*args)


def disj_all(args: Iterable[Formula]) -> Formula:
    return disj(*args)


def neg(f: Formula) -> Formula:
    if isinstance(f, Const):
        return FALSE if f.value else TRUE
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def implies(a: Formula, b: Formula) -> Formula:
    return disj(neg(a), b)


def exists(names, body: Formula) -> Formula:
    if isinstance(names, str):
        names = [names]
    for v in reversed(list(names)):
        if v in body.free_vars():
            body = Exists(v, body)
    return body


def forall(names, body: Formula) -> Formula:
    if isinstance(names, str):
        names = [names]
    for v in reversed(list(names)):
        if v in body.free_vars():
            body = Forall(v, body)
    return body


# -- structural operations ---------------------------------------------------


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, (Const, Atom)):
        return True
    if isinstance(f, Not):
        return is_quantifier_free(f.arg)
    if isinstance(f, _NAry):
        return all(is_quantifier_free(a) for a in f.args)
    return False


def rebuild_atom(a: Atom, term: Term) -> Formula:
    if isinstance(a, Eq):
        return eq(term)
    if isinstance(a, Le):
        return le(term)
    return div(a.modulus, term)


def substitute(f: Formula, name: str, value: Term) -> Formula:
    """Replace free occurrences of ``name`` by ``value`` (capture is the caller's concern)."""
    if name not in f.free_vars():
        return f
    if isinstance(f, Atom):
        return rebuild_atom(f, f.term.substitute(name, value))
    if isinstance(f, Not):
        return neg(substitute(f.arg, name, value))
    if isinstance(f, And):
        return conj(*(substitute(a, name, value) for a in f.args))
    if isinstance(f, Or):
        return disj(*(substitute(a, name, value) for a in f.args))
    if isinstance(f, _Quant):
        if f.var == name:
            return f
        return type(f)(f.var, substitute(f.body, name, value))
    return f


def rename(f: Formula, mapping: Mapping[str, str]) -> Formula:
    if isinstance(f, Const):
        return f
    if isinstance(f, Atom):
        return rebuild_atom(f, f.term.rename(mapping))
    if isinstance(f, Not):
        return neg(rename(f.arg, mapping))
    if isinstance(f, And):
        return conj(*(rename(a, mapping) for a in f.args))
    if isinstance(f, Or):
        return disj(*(rename(a, mapping) for a in f.args))
    inner = {k: v for k, v in mapping.items() if k != f.var}
    return type(f)(f.var, rename(f.body, inner))


def negate_atom(a: Atom) -> Formula:
    """Negation of an atom as a positive QF formula."""
    t = a.term
    if isinstance(a, Le):
        return le(1 - t)
    if isinstance(a, Eq):
        return disj(le(t + 1), le(1 - t))
    return disj(*(div(a.modulus, t - r) for r in range(1, a.modulus)))


def nnf(f: Formula, positive: bool = True) -> Formula:
    """Push negations to the atoms; negated atoms are rewritten away entirely."""
    if isinstance(f, Const):
        return f if positive else neg(f)
    if isinstance(f, Atom):
        return f if positive else negate_atom(f)
    if isinstance(f, Not):
        return nnf(f.arg, not positive)
    if isinstance(f, And):
        parts = [nnf(a, positive) for a in f.args]
        return conj(*parts) if positive else disj(*parts)
    if isinstance(f, Or):
        parts = [nnf(a, positive) for a in f.args]
        return disj(*parts) if positive else conj(*parts)
    if isinstance(f, Exists):
        return Exists(f.var, nnf(f.body)) if positive else Forall(f.var, nnf(f.body, False))
    if isinstance(f, Forall):
        return Forall(f.var, nnf(f.body)) if positive else Exists(f.var, nnf(f.body, False))
    raise TypeError(f)


def atoms(f: Formula) -> Iterator[Atom]:
    if isinstance(f, Atom):
        yield f
    elif isinstance(f, Not):
        yield from atoms(f.arg)
    elif isinstance(f, _NAry):
        for a in f.args:
            yield from atoms(a)
    elif isinstance(f, _Quant):
        yield from atoms(f.body)


def size(f: Formula) -> int:
    if isinstance(f, (Const, Atom)):
        return 1
    if isinstance(f, Not):
        return 1 + size(f.arg)
    if isinstance(f, _NAry):
        return 1 + sum(size(a) for a in f.args)
    return 1 + size(f.body)


def evaluate(f: Formula, env: Mapping[str, int], witness_bound: Optional[int] = None) -> bool:
    """Truth value under ``env``; quantifiers search ``[-witness_bound, witness_bound]``."""
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Eq):
        return f.term.evaluate(env) == 0
    if isinstance(f, Le):
        return f.term.evaluate(env) <= 0
    if isinstance(f, Div):
        return f.term.evaluate(env) % f.modulus == 0
    if isinstance(f, Not):
        return not evaluate(f.arg, env, witness_bound)
    if isinstance(f, And):
        return all(evaluate(a, env, witness_bound) for a in f.args)
    if isinstance(f, Or):
        return any(evaluate(a, env, witness_bound) for a in f.args)
    if witness_bound is None:
        raise ValueError("quantified formula needs a witness bound")
    inner = dict(env)
    values = range(-witness_bound, witness_bound + 1)
    if isinstance(f, Exists):
        for v in values:
            inner[f.var] = v
            if evaluate(f.body, inner, witness_bound):
                return True
        return False
    for v in values:
        inner[f.var] = v
        if not evaluate(f.body, inner, witness_bound):
            return False
    return True


# -- text syntax --------------------------------------------------------------


def to_text_term(t: Term) -> str:
    parts = []
    for v, c in t.coeffs:
        parts.append(v if c == 1 else f"(* {c} {v})")
    if t.const or not parts:
        parts.append(str(t.const))
    if len(parts) == 1:
        return parts[0]
    return "(+ " + " ".join(parts) + ")"


def to_text(f: Formula) -> str:
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Eq):
        return f"(= {to_text_term(f.term)} 0)"
    if isinstance(f, Le):
        return f"(<= {to_text_term(f.term)} 0)"
    if isinstance(f, Div):
        return f"(div {f.modulus} {to_text_term(f.term)})"
    if isinstance(f, Not):
        return f"(not {to_text(f.arg)})"
    if isinstance(f, _NAry):
        return f"({f.tag} " + " ".join(to_text(a) for a in f.args) + ")"
    return f"({f.tag} {f.var} {to_text(f.body)})"


class FormulaSyntaxError(ValueError):
    pass


def _tokenize(text: str) -> List[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def _read(tokens: List[str], pos: int):
    if pos >= len(tokens):
        raise FormulaSyntaxError("unexpected end of input")
    tok = tokens[pos]
    if tok == "(":
        items = []
        pos += 1
        while pos < len(tokens) and tokens[pos] != ")":
            item, pos = _read(tokens, pos)
            items.append(item)
        if pos >= len(tokens):
            raise FormulaSyntaxError("missing ')'")
        return items, pos + 1
    if tok == ")":
        raise FormulaSyntaxError(f"unexpected ')' at token {pos}")
    return tok, pos + 1


def _term_of(x) -> Term:
    if isinstance(x, str):
        try:
            return Term.constant(int(x))
        except ValueError:
            return Term.var(x)
    if not x:
        raise FormulaSyntaxError("empty term")
    op, *rest = x
    if op == "+":
        out = Term()
        for r in rest:
            out = out + _term_of(r)
        return out
    if op == "-":
        if len(rest) == 1:
            return -_term_of(rest[0])
        out = _term_of(rest[0])
        for r in rest[1:]:
            out = out - _term_of(r)
        return out
    if op == "*":
        if len(rest) != 2:
            raise FormulaSyntaxError("'*' takes two arguments")
        a, b = _term_of(rest[0]), _term_of(rest[1])
        if a.is_constant():
            return b * a.const
        if b.is_constant():
            return a * b.const
        raise FormulaSyntaxError("non-linear product")
    raise FormulaSyntaxError(f"unknown term operator {op!r}")


def _formula_of(x) -> Formula:
    if isinstance(x, str):
        if x == "true":
            return TRUE
        if x == "false":
            return FALSE
        raise FormulaSyntaxError(f"unexpected token {x!r}")
    if not x:
        raise FormulaSyntaxError("empty formula")
    op, *rest = x
    if op in ("=", "<=", ">=", "<", ">"):
        if len(rest) != 2:
            raise FormulaSyntaxError(f"'{op}' takes two arguments")
        d = _term_of(rest[0]) - _term_of(rest[1])
        return {"=": eq, "<=": le, ">=": ge, "<": lt, ">": lambda t: lt(-t)}[op](d)
    if op == "div":
        if len(rest) != 2:
            raise FormulaSyntaxError("'div' takes a modulus and a term")
        return div(int(rest[0]), _term_of(rest[1]))
    if op == "not":
        return neg(_formula_of(rest[0]))
    if op == "and":
        return conj(*(_formula_of(r) for r in rest))
    if op == "or":
        return disj(*(_formula_of(r) for r in rest))
    if op == "->":
        return implies(_formula_of(rest[0]), _formula_of(rest[1]))
    if op in ("exists", "forall"):
        if len(rest) != 2 or not isinstance(rest[0], str):
            raise FormulaSyntaxError(f"'{op}' takes a variable and a body")
        return (Exists if op == "exists" else Forall)(rest[0], _formula_of(rest[1]))
    raise FormulaSyntaxError(f"unknown operator {op!r}")


def parse_formula(text: str) -> Formula:
    tokens = _tokenize(text)
    tree, pos = _read(tokens, 0)
    if pos != len(tokens):
        raise FormulaSyntaxError("trailing input")
    return _formula_of(tree)

"""Parser for the model-formula mini-language.

Grammar::

    formula  := response "~" term ("+" term)*
    term     := "1" | NAME | NAME ":" NAME | NAME "*" NAME
              | "offset" "(" "log" "(" NAME ")" ")"

``a*b`` is shorthand for ``a + b + a:b``.  An intercept is always
implied; duplicate terms collapse to their first occurrence (``a:b``
and ``b:a`` count as the same term).  At most one offset is allowed and
its argument must be wrapped in ``log(...)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import FormulaError

__all__ = ["Term", "ModelFormula", "parse_formula"]

_TOKEN_RE = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<one>1)|(?P<op>[~+:*()]))")


@dataclass(frozen=True)
class Term:
    """A single model term: the intercept, a main effect, or an interaction."""

    kind: str                  # "intercept" | "main" | "interaction"
    factors: tuple[str, ...]   # (), (factor,), or (factor_a, factor_b)

    def canonical(self) -> tuple:
        """Order-insensitive key: a:b and b:a are the same term."""
        return (self.kind, tuple(sorted(self.factors)))

    def __str__(self) -> str:
        if self.kind == "intercept":
            return "1"
        return ":".join(self.factors)


@dataclass(frozen=True)
class ModelFormula:
    """Parsed formula: response, ordered terms, optional log offset."""

    response: str
    terms: tuple[Term, ...]
    offset_column: str | None = None

    @property
    def term_set(self) -> frozenset:
        return frozenset(t.canonical() for t in self.terms)

    def __str__(self) -> str:
        parts = [str(t) for t in self.terms if t.kind != "intercept"]
        if self.offset_column is not None:
            parts.append(f"offset(log({self.offset_column}))")
        rhs = " + ".join(parts) if parts else "1"
        return f"{self.response} ~ {rhs}"


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise FormulaError(
                f"unexpected character {stripped[0]!r} at position {at}", position=at
            )
        if m.group("name") is not None:
            tokens.append(("name", m.group("name"), m.start("name")))
        elif m.group("one") is not None:
            tokens.append(("one", "1", m.start("one")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message: str):
        kind, value, pos = self.peek()
        found = "end of input" if kind == "end" else repr(value)
        raise FormulaError(f"{message}, found {found} at position {pos}", position=pos)

    def expect(self, op: str):
        kind, value, _ = self.peek()
        if kind != "op" or value != op:
            self.fail(f"expected {op!r}")
        return self.advance()

    def expect_name(self, what: str) -> str:
        kind, value, _ = self.peek()
        if kind != "name":
            self.fail(f"expected {what}")
        return self.advance()[1]

    def parse(self) -> ModelFormula:
        response = self.expect_name("a response name")
        self.expect("~")
        terms: list[Term] = [Term("intercept", ())]
        offset: str | None = None
        while True:
            terms_here, offset_here = self.parse_term()
            if offset_here is not None:
                if offset is not None:
                    self.fail_prev("at most one offset is allowed")
                offset = offset_here
            terms.extend(terms_here)
            kind, value, _ = self.peek()
            if kind == "op" and value == "+":
                self.advance()
                continue
            if kind == "end":
                break
            self.fail("expected '+' or end of formula")
        return ModelFormula(
            response=response, terms=_dedupe(terms), offset_column=offset
        )

    def fail_prev(self, message: str):
        pos = self.tokens[self.i - 1][2]
        raise FormulaError(f"{message} (at position {pos})", position=pos)

    def parse_term(self):
        """One term; returns (list of Terms, offset column or None)."""
        kind, value, _ = self.peek()
        if kind == "one":
            # explicit intercept, e.g. "claims ~ 1"; always present anyway
            self.advance()
            return [], None
        if kind != "name":
            self.fail("expected a term")
        if value == "offset":
            nxt = self.tokens[self.i + 1]
            if nxt[0] == "op" and nxt[1] == "(":
                return self.parse_offset()
        name = self.advance()[1]
        kind, value, _ = self.peek()
        if kind == "op" and value == ":":
            self.advance()
            other = self.expect_name("a factor name after ':'")
            if other == name:
                self.fail_prev(f"interaction of {name!r} with itself")
            return [Term("interaction", (name, other))], None
        if kind == "op" and value == "*":
            self.advance()
            other = self.expect_name("a factor name after '*'")
            if other == name:
                self.fail_prev(f"interaction of {name!r} with itself")
            return (
                [
                    Term("main", (name,)),
                    Term("main", (other,)),
                    Term("interaction", (name, other)),
                ],
                None,
            )
        return [Term("main", (name,))], None

    def parse_offset(self):
        self.advance()  # offset
        self.expect("(")
        fn = self.expect_name("'log'")
        if fn != "log":
            self.fail_prev("offset must have the form offset(log(column))")
        self.expect("(")
        column = self.expect_name("a column name")
        self.expect(")")
        self.expect(")")
        return [], column


def _dedupe(terms: list[Term]) -> tuple[Term, ...]:
    seen = set()
    out = []
    for term in terms:
        key = term.canonical()
        if key not in seen:
            seen.add(key)
            out.append(term)
    return tuple(out)


def parse_formula(text: str) -> ModelFormula:
    """Parse a formula string such as ``"claims ~ region + type + region:type"``.

    Raises FormulaError with the offending position on malformed input.
    Factor names are not checked here; that happens against a dataset
    when the design matrix is built.
    """
    return _Parser(text).parse()

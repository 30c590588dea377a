"""Recursive-descent parser for the formula grammar.

Grammar tokens: G/F/X/U for always/eventually/next/until, &, |, !, ->, <->
for the connectives, identifiers for propositions, true/false literals, and
parentheses.  A trailing apostrophe on an atom is accepted as a synonym for
X applied to that atom (p' == X(p)).

Precedence, loosest first: <->, ->, |, U, &, unary.  Implication and until
associate to the right, & and | to the left.
"""

from __future__ import annotations

import re

from .errors import FormulaSyntaxError, UndeclaredPropositionError
from .formulas import (
    FALSE,
    TRUE,
    Always,
    And,
    Eventually,
    Iff,
    Implies,
    Next,
    Not,
    Or,
    Prop,
    Until,
)

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<lparen>\()|(?P<rparen>\))|(?P<iff><->)|(?P<implies>->)"
    r"|(?P<and>&)|(?P<or>\|)|(?P<not>!)|(?P<prime>')"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*))"
)

_RESERVED = {"G", "F", "X", "U", "true", "false"}


def _tokenize(text):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == m.start():
            # skip leading whitespace reached end?
            rest = text[pos:].strip()
            if not rest:
                break
            raise FormulaSyntaxError(f"unexpected character {rest[0]!r}", pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text, vocab):
        self.text = text
        self.vocab = vocab
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind, what):
        tok = self.next()
        if tok[0] != kind:
            raise FormulaSyntaxError(f"expected {what}", tok[2])
        return tok

    def parse(self):
        f = self.parse_iff()
        tok = self.peek()
        if tok[0] != "end":
            raise FormulaSyntaxError(f"unexpected token {tok[1]!r}", tok[2])
        return f

    def parse_iff(self):
        left = self.parse_implies()
        if self.peek()[0] == "iff":
            self.next()
            return Iff(left, self.parse_iff())
        return left

    def parse_implies(self):
        left = self.parse_or()
        if self.peek()[0] == "implies":
            self.next()
            return Implies(left, self.parse_implies())
        return left

    def parse_or(self):
        left = self.parse_until()
        while self.peek()[0] == "or":
            self.next()
            left = Or(left, self.parse_until())
        return left

    def parse_until(self):
        left = self.parse_and()
        if self.peek()[0] == "ident" and self.peek()[1] == "U":
            self.next()
            return Until(left, self.parse_until())
        return left

    def parse_and(self):
        left = self.parse_unary()
        while self.peek()[0] == "and":
            self.next()
            left = And(left, self.parse_unary())
        return left

    def parse_unary(self):
        tok = self.peek()
        if tok[0] == "not":
            self.next()
            return Not(self.parse_unary())
        if tok[0] == "ident" and tok[1] in ("G", "F", "X"):
            op = tok[1]
            self.next()
            arg = self.parse_unary()
            if op == "G":
                return Always(arg)
            if op == "F":
                return Eventually(arg)
            return Next(arg)
        return self.parse_atom()

    def parse_atom(self):
        tok = self.next()
        if tok[0] == "lparen":
            f = self.parse_iff()
            self.expect("rparen", "')'")
            return self._maybe_prime(f, allow=False)
        if tok[0] == "ident":
            name = tok[1]
            if name == "true":
                return TRUE
            if name == "false":
                return FALSE
            if name in _RESERVED:
                raise FormulaSyntaxError(f"misplaced operator {name!r}", tok[2])
            if self.vocab is not None and name not in self.vocab:
                raise UndeclaredPropositionError(name, tok[2])
            atom = Prop(name)
            if self.peek()[0] == "prime":
                self.next()
                return Next(atom)
            return atom
        if tok[0] == "end":
            raise FormulaSyntaxError("unexpected end of input", tok[2])
        raise FormulaSyntaxError(f"unexpected token {tok[1]!r}", tok[2])

    def _maybe_prime(self, f, allow):
        # apostrophes only attach to bare atoms
        if self.peek()[0] == "prime":
            tok = self.peek()
            raise FormulaSyntaxError("apostrophe may only follow a proposition", tok[2])
        return f


def parse_formula(text, vocab=None):
    """Parse formula text against a vocabulary.

    With vocab=None, any identifier is accepted (used internally for tests).
    """
    return _Parser(text, vocab).parse()

"""
Textual term syntax

    term  := sum
    sum   := prod ('+' prod)*
    prod  := unary ('*' unary)*
    unary := '~' unary | 'd' INT '(' term ')' | 's' DECIMAL '(' term ')' | atom
    atom  := '0' | '1' | 'x' INT? | '(' term ')'

Whitespace is insignificant and a bare ``x`` means ``x1``.
"""

from typing import Dict, List, Tuple

import numpy as np

from mvlogic.models.term import (
    ONE, ZERO, Delta, Not, Odot, Oplus, Scale, Term, TermDomainError, Var,
    children, is_one,
)

_SUM, _PROD, _UNARY = 0, 1, 2


class TermSyntaxError(ValueError):
    """Raised when term text cannot be parsed"""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class _Parser:
    """Recursive-descent parser over the non-whitespace characters"""

    def __init__(self, text: str, arity: int):
        self.chars: List[Tuple[str, int]] = [
            (char, pos) for pos, char in enumerate(text) if not char.isspace()
        ]
        self.index = 0
        self.arity = arity
        self.end = len(text)

    def _peek(self) -> str:
        return self.chars[self.index][0] if self.index < len(self.chars) else ''

    def _position(self) -> int:
        return self.chars[self.index][1] if self.index < len(self.chars) else self.end

    def _fail(self, message: str, position: int = None):
        raise TermSyntaxError(message, self._position() if position is None else position)

    def _expect(self, char: str):
        if self._peek() != char:
            found = self._peek() or 'end of input'
            self._fail(f"Expected '{char}' but found '{found}'")
        self.index += 1

    def _digits(self) -> str:
        start = self.index
        while self._peek().isdigit():
            self.index += 1
        return ''.join(char for char, _ in self.chars[start:self.index])

    def parse(self) -> Term:
        term = self._sum()
        if self.index < len(self.chars):
            self._fail(f"Unexpected character '{self._peek()}'")
        return term

    def _sum(self) -> Term:
        node = self._prod()
        while self._peek() == '+':
            self.index += 1
            node = Oplus(node, self._prod())
        return node

    def _prod(self) -> Term:
        node = self._unary()
        while self._peek() == '*':
            self.index += 1
            node = Odot(node, self._unary())
        return node

    def _unary(self) -> Term:
        char = self._peek()
        if char == '~':
            self.index += 1
            return Not(self._unary())
        if char == 'd':
            start = self._position()
            self.index += 1
            digits = self._digits()
            if not digits:
                self._fail("Expected divisor after 'd'")
            divisor = int(digits)
            if divisor < 1:
                self._fail("Divisor must be >= 1", start)
            return Delta(divisor, self._group())
        if char == 's':
            start = self._position()
            self.index += 1
            factor = self._decimal()
            if not 0 <= factor <= 1:
                self._fail(f"Scale factor {factor} is outside [0,1]", start)
            return Scale(factor, self._group())
        return self._atom()

    def _group(self) -> Term:
        self._expect('(')
        node = self._sum()
        self._expect(')')
        return node

    def _decimal(self) -> float:
        whole = self._digits()
        fraction = ''
        if self._peek() == '.':
            self.index += 1
            fraction = self._digits()
            if not fraction:
                self._fail("Expected digits after '.'")
        if not whole:
            self._fail("Expected decimal factor after 's'")
        return float(f"{whole}.{fraction}" if fraction else whole)

    def _atom(self) -> Term:
        char = self._peek()
        if char == '0':
            self.index += 1
            return ZERO
        if char == '1':
            self.index += 1
            return ONE
        if char == 'x':
            start = self._position()
            self.index += 1
            digits = self._digits()
            index = int(digits) if digits else 1
            if not 1 <= index <= self.arity:
                self._fail(f"Variable x{index} is outside x1..x{self.arity}", start)
            return Var(index)
        if char == '(':
            return self._group()
        if not char:
            self._fail("Unexpected end of input")
        self._fail(f"Unexpected character '{char}'")


def parse_term(text: str, arity: int) -> Term:
    """
    Parse term text over variables x1..x_arity

    Raises:
        TermSyntaxError: On malformed text, out-of-range variables or factors
    """
    if arity < 1:
        raise TermDomainError(f"Arity must be >= 1, got {arity}")
    return _Parser(text, arity).parse()


def format_factor(factor: float) -> str:
    return np.format_float_positional(float(factor), trim='-')


def format_term(t: Term) -> str:
    """Canonical text with minimal parentheses; binary operators associate left"""
    rendered: Dict[int, Tuple[str, int]] = {}
    stack = [t]
    while stack:
        node = stack[-1]
        if id(node) in rendered:
            stack.pop()
            continue
        pending = [kid for kid in children(node) if id(kid) not in rendered]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        rendered[id(node)] = _render(node, rendered)
    return rendered[id(t)][0]


def _wrap(entry: Tuple[str, int], needed: int) -> str:
    text, precedence = entry
    return f"({text})" if precedence < needed else text


def _render(node: Term, rendered: Dict[int, Tuple[str, int]]) -> Tuple[str, int]:
    if isinstance(node, Var):
        return f"x{node.index}", _UNARY
    if is_one(node):
        return '1', _UNARY
    if isinstance(node, Not):
        return '~' + _wrap(rendered[id(node.child)], _UNARY), _UNARY
    if isinstance(node, Delta):
        return f"d{node.divisor}({rendered[id(node.child)][0]})", _UNARY
    if isinstance(node, Scale):
        return f"s{format_factor(node.factor)}({rendered[id(node.child)][0]})", _UNARY
    if isinstance(node, Oplus):
        left = _wrap(rendered[id(node.left)], _SUM)
        right = _wrap(rendered[id(node.right)], _PROD)
        return f"{left} + {right}", _SUM
    if isinstance(node, Odot):
        left = _wrap(rendered[id(node.left)], _PROD)
        right = _wrap(rendered[id(node.right)], _UNARY)
        return f"{left} * {right}", _PROD
    return '0', _UNARY

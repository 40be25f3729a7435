"""Concrete syntax for free-group words and Mekler group elements.

Words::

    word   := "e" | factor ("*" factor)*
    factor := atom ("^" INT)?
    atom   := "x" INT | "[" word "," word "]" | "(" word ")" | "e"

Mekler elements::

    element := "e" | term ("*" term)*
    term    := "x" INT ("^" INT)? | "c" INT "," INT ("^" INT)?

``INT`` in an exponent may carry a leading ``-``. Whitespace between tokens is
ignored. Errors report the character offset and the tokens expected there.
"""
from __future__ import annotations

from pfgroups.errors import EdgeCentralGenerator, ExpressionSyntaxError, IndexOutOfRange
from pfgroups.lattice import Word

__all__ = ["parse_word", "render_word", "parse_element", "render_element"]


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            self.fail([repr(ch)])
        self.pos += 1

    def accept(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def integer(self, signed: bool = False) -> int:
        self.skip()
        start = self.pos
        if signed and self.pos < len(self.text) and self.text[self.pos] == "-":
            self.pos += 1
        digits = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == digits:
            self.fail(["INT"])
        return int(self.text[start:self.pos])

    def end(self):
        self.skip()
        if self.pos != len(self.text):
            self.fail(["'*'", "end of input"])

    def fail(self, expected):
        self.skip()
        raise ExpressionSyntaxError(self.text, self.pos, expected)


# -- words ---------------------------------------------------------------------

def _word(sc: _Scanner) -> Word:
    w = _factor(sc)
    while sc.accept("*"):
        w = w * _factor(sc)
    return w


def _factor(sc: _Scanner) -> Word:
    w = _atom(sc)
    if sc.accept("^"):
        w = w ** sc.integer(signed=True)
    return w


def _atom(sc: _Scanner) -> Word:
    ch = sc.peek()
    if ch == "x":
        sc.pos += 1
        return Word.gen(sc.integer())
    if ch == "e":
        sc.pos += 1
        return Word()
    if ch == "[":
        sc.pos += 1
        a = _word(sc)
        sc.expect(",")
        b = _word(sc)
        sc.expect("]")
        return Word.commutator(a, b)
    if ch == "(":
        sc.pos += 1
        w = _word(sc)
        sc.expect(")")
        return w
    sc.fail(["'x'", "'e'", "'['", "'('"])


def parse_word(text: str) -> Word:
    """Parse a word; the result is freely reduced."""
    sc = _Scanner(text)
    w = _word(sc)
    sc.end()
    return w


def render_word(w: Word) -> str:
    return str(w)


# -- Mekler elements ----------------------------------------------------------------

def parse_element(text: str, graph, p: int):
    """Parse an element of ``G(graph)`` at prime ``p`` into normal form.

    ``c r,s`` names ``[x_r, x_s]``; it is rejected on edges, and ``c s,r``
    with ``s > r`` is read as its inverse.
    """
    from pfgroups.mekler import central, generator, identity, multiply

    sc = _Scanner(text)
    result = identity(p, graph)

    def index(i: int, where: int) -> int:
        if not 0 <= i < graph.n:
            raise IndexOutOfRange(f"vertex {i} at position {where} outside 0..{graph.n - 1}")
        return i

    if sc.peek() == "e":
        sc.pos += 1
        sc.end()
        return result
    while True:
        ch = sc.peek()
        where = sc.pos
        if ch == "x":
            sc.pos += 1
            i = index(sc.integer(), where)
            k = sc.integer(signed=True) if sc.accept("^") else 1
            term = generator(p, graph, i, k)
        elif ch == "c":
            sc.pos += 1
            r = index(sc.integer(), where)
            sc.expect(",")
            s = index(sc.integer(), where)
            k = sc.integer(signed=True) if sc.accept("^") else 1
            if r == s:
                raise IndexOutOfRange(f"c{r},{s} at position {where} is not a commutator generator")
            if graph.adjacent(r, s):
                raise EdgeCentralGenerator(f"c{r},{s} at position {where}: {{{r},{s}}} is an edge")
            if r > s:
                r, s, k = s, r, -k
            term = central(p, graph, r, s, k)
        else:
            sc.fail(["'x'", "'c'", "'e'"])
        result = multiply(result, term)
        if not sc.accept("*"):
            break
    sc.end()
    return result


def render_element(u) -> str:
    """Normal-form text: central factors first, then ascending generators."""
    parts = []
    for (r, s), c in zip(u.graph.nonedges, u.beta):
        if c:
            parts.append(f"c{r},{s}" + (f"^{c}" if c != 1 else ""))
    for i, a in enumerate(u.alpha):
        if a:
            parts.append(f"x{i}" + (f"^{a}" if a != 1 else ""))
    return "*".join(parts) if parts else "e"

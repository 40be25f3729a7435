"""Line-oriented text formats for groups, lattice elements, filters and graphs.

Readers are strict: every line must match its grammar exactly, apart from
trailing whitespace and a final newline. Malformed input raises
:class:`FormatError` naming the offending line.
"""
from __future__ import annotations

import os
import re
import tempfile

import numpy as np

from pfgroups.errors import FormatError, PfgroupsError
from pfgroups.finite import FiniteGroup
from pfgroups.lattice import LatticeElement

__all__ = [
    "write_group",
    "read_group",
    "write_lattice_element",
    "read_lattice_element",
    "write_filter",
    "read_filter",
    "write_graph",
    "read_graph",
    "atomic_write",
]


def _lines(text: str) -> list[str]:
    lines = [ln.rstrip() for ln in text.split("\n")]
    while lines and lines[-1] == "":
        lines.pop()
    return lines


def _header(line: str, pattern: str, lineno: int, what: str) -> re.Match:
    m = re.fullmatch(pattern, line)
    if m is None:
        raise FormatError(f"line {lineno}: expected {what}, got {line!r}")
    return m


_INTS = r"\d+(?: \d+)*"


# -- groups --------------------------------------------------------------------

def write_group(g: FiniteGroup) -> str:
    rows = [" ".join(map(str, row)) for row in g.table.tolist()]
    return "\n".join([f"group {g.order}", f"identity {g.identity}", *rows]) + "\n"


def _parse_group(lines: list[str], start: int) -> tuple[FiniteGroup, int]:
    if start >= len(lines):
        raise FormatError(f"line {start + 1}: expected 'group <order>', got end of input")
    n = int(_header(lines[start], r"group (\d+)", start + 1, "'group <order>'").group(1))
    if n == 0:
        raise FormatError(f"line {start + 1}: group order must be positive")
    if start + 1 >= len(lines):
        raise FormatError(f"line {start + 2}: expected 'identity <index>', got end of input")
    ident = int(_header(lines[start + 1], r"identity (\d+)", start + 2, "'identity <index>'").group(1))
    rows = lines[start + 2:start + 2 + n]
    if len(rows) < n:
        raise FormatError(f"expected {n} table rows, found {len(rows)}")
    table = np.empty((n, n), dtype=np.int64)
    for k, row in enumerate(rows):
        lineno = start + 3 + k
        if not re.fullmatch(_INTS, row):
            raise FormatError(f"line {lineno}: table row must be space-separated indices")
        vals = [int(v) for v in row.split(" ")]
        if len(vals) != n:
            raise FormatError(f"line {lineno}: expected {n} entries, found {len(vals)}")
        table[k] = vals
    if table.max() >= n or ident >= n:
        raise FormatError("index out of range for the declared order")
    try:
        g = FiniteGroup(table, identity=ident)
        g.check_axioms()
    except PfgroupsError as exc:
        raise FormatError(f"group table rejected: {exc}") from exc
    return g, start + 2 + n


def read_group(text: str) -> FiniteGroup:
    lines = _lines(text)
    g, end = _parse_group(lines, 0)
    if end != len(lines):
        raise FormatError(f"line {end + 1}: unexpected content after the table")
    return g


# -- lattice elements -------------------------------------------------------------

def write_lattice_element(L: LatticeElement) -> str:
    images = "".join(f" {a}" for a in L.images)
    return f"epi support={L.support}\n" + write_group(L.target) + f"images{images}\n"


def _parse_lattice(lines: list[str], start: int) -> tuple[LatticeElement, int]:
    if start >= len(lines):
        raise FormatError(f"line {start + 1}: expected 'epi support=<m>', got end of input")
    m = int(_header(lines[start], r"epi support=(\d+)", start + 1, "'epi support=<m>'").group(1))
    g, pos = _parse_group(lines, start + 1)
    if pos >= len(lines):
        raise FormatError(f"line {pos + 1}: expected 'images ...', got end of input")
    mm = _header(lines[pos], r"images((?: \d+)*)", pos + 1, "'images <i0> ... <i(m-1)>'")
    images = [int(v) for v in mm.group(1).split()]
    if len(images) != m:
        raise FormatError(f"line {pos + 1}: expected {m} images, found {len(images)}")
    if any(a >= g.order for a in images):
        raise FormatError(f"line {pos + 1}: image index out of range")
    L = LatticeElement.from_images(g, images)
    if L.order != g.order:
        raise FormatError(f"line {pos + 1}: images generate a proper subgroup, not an epimorphism")
    return L, pos + 1


def read_lattice_element(text: str) -> LatticeElement:
    lines = _lines(text)
    L, end = _parse_lattice(lines, 0)
    if end != len(lines):
        raise FormatError(f"line {end + 1}: unexpected content after the element")
    return L


# -- filters ---------------------------------------------------------------------

def write_filter(elements) -> str:
    elements = list(elements)
    blocks = [write_lattice_element(L) for L in elements]
    return f"filter depth={len(elements)}\n" + "---\n".join(blocks)


def read_filter(text: str):
    """A filter file as a finite chain (constant beyond its depth)."""
    from pfgroups.filters import chain_from_elements

    lines = _lines(text)
    if not lines:
        raise FormatError("line 1: expected 'filter depth=<d>', got end of input")
    d = int(_header(lines[0], r"filter depth=(\d+)", 1, "'filter depth=<d>'").group(1))
    pos = 1
    elements = []
    for k in range(d):
        if k:
            if pos >= len(lines) or lines[pos] != "---":
                raise FormatError(f"line {pos + 1}: expected '---' between elements")
            pos += 1
        L, pos = _parse_lattice(lines, pos)
        elements.append(L)
    if pos != len(lines):
        raise FormatError(f"line {pos + 1}: unexpected content after {d} elements")
    return chain_from_elements(elements, name="file")


# -- graphs ------------------------------------------------------------------------

def write_graph(A) -> str:
    return "\n".join([f"graph {A.n}", *(f"edge {r} {s}" for r, s in A.sorted_edges())]) + "\n"


def read_graph(text: str):
    from pfgroups.mekler import Graph

    lines = _lines(text)
    if not lines:
        raise FormatError("line 1: expected 'graph <n>', got end of input")
    n = int(_header(lines[0], r"graph (\d+)", 1, "'graph <n>'").group(1))
    edges = []
    for k, line in enumerate(lines[1:], start=2):
        m = _header(line, r"edge (\d+) (\d+)", k, "'edge <r> <s>'")
        r, s = int(m.group(1)), int(m.group(2))
        if not r < s:
            raise FormatError(f"line {k}: edge must satisfy r < s")
        if s >= n:
            raise FormatError(f"line {k}: vertex {s} out of range for {n} vertices")
        if edges and (r, s) <= edges[-1]:
            raise FormatError(f"line {k}: edges must be strictly increasing")
        edges.append((r, s))
    return Graph(n, frozenset(edges))


def atomic_write(path: str, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file, so a failure never
    leaves a partial file behind."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".pfgroups-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise

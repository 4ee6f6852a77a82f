"""The shipped group corpus: named test groups loaded from package data.

Entries are either data files (validated on load, never trusted blindly:
the Mathieu entry is checked to be 5- but not 6-transitive, which pins it
among degree-24 groups) or parametric builders like ``sym(7)`` / ``agl(2,3)``.
"""

from __future__ import annotations

import re
from importlib import resources

from .affine import agl
from .errors import FormatError
from .linalg import matrix_to_permutation, parse_matrix_file
from .perm import (
    GroupHandle,
    alternating_group,
    cyclic_group,
    dihedral_group,
    parse_group_text,
    symmetric_group,
    trivial_group,
)

_PARAMETRIC = re.compile(r"^(sym|alt|c|d|agl)\((\d+)(?:,(\d+))?\)$")


def _data_text(filename: str) -> str:
    return resources.files("permclosure.data").joinpath(filename).read_text()


def _load_matrix_group(filename: str) -> GroupHandle:
    ctx, a, matrices = parse_matrix_file(_data_text(filename))
    return GroupHandle(ctx.q**a, [matrix_to_permutation(ctx, a, M) for M in matrices])


def _load_m24() -> GroupHandle:
    from .actions import transitivity_degree

    G = parse_group_text(_data_text("m24.group"))
    t = transitivity_degree(G)
    if G.degree != 24 or t != 5:
        raise AssertionError(
            f"shipped Mathieu generators fail validation: degree {G.degree}, transitivity {t}"
        )
    return G


_FILE_ENTRIES = {
    "m24": _load_m24,
    "agl_3_2": lambda: parse_group_text(_data_text("agl_3_2.group")),
    "q8_gl2_11": lambda: _load_matrix_group("q8_gl2_11.matrix"),
    "q8_gl2_3": lambda: _load_matrix_group("q8_gl2_3.matrix"),
    "heis3_gl3_13": lambda: _load_matrix_group("heis3_gl3_13.matrix"),
}

_DATA_FILES = [
    "m24.group",
    "agl_3_2.group",
    "q8_gl2_11.matrix",
    "q8_gl2_3.matrix",
    "heis3_gl3_13.matrix",
]


def corpus_names() -> list[str]:
    return sorted(_FILE_ENTRIES) + ["sym(n)", "alt(n)", "c(n)", "d(n)", "agl(a,p)"]


def load_corpus(name: str) -> GroupHandle:
    """Load a corpus group by name: a file entry or a parametric family."""
    key = name.strip().lower().replace(" ", "")
    if key in _FILE_ENTRIES:
        return _FILE_ENTRIES[key]()
    m = _PARAMETRIC.match(key)
    if not m:
        raise KeyError(f"unknown corpus entry {name!r}; known: {', '.join(corpus_names())}")
    family, first, second = m.group(1), int(m.group(2)), m.group(3)
    if family == "agl":
        if second is None:
            raise KeyError("agl needs two parameters: agl(a,p)")
        return agl(first, int(second))
    if second is not None:
        raise KeyError(f"{family} takes one parameter")
    if first < 1:
        raise KeyError("degree must be positive")
    if family == "sym":
        return symmetric_group(first)
    if family == "alt":
        return alternating_group(first)
    if family == "c":
        return cyclic_group(first)
    if family == "d":
        return dihedral_group(first)
    raise KeyError(f"unknown corpus family {family}")


def data_file_names() -> list[str]:
    return list(_DATA_FILES)


def data_file_text(filename: str) -> str:
    if filename not in _DATA_FILES:
        raise FormatError(f"not a corpus data file: {filename}")
    return _data_text(filename)

"""Computational toolkit for permutation group closures.

Core objects: :class:`~permclosure.perm.Permutation` and
:class:`~permclosure.perm.GroupHandle` (a generated group with a lazily built
stabilizer chain).  On top of those sit orbit colorings of tuple spaces,
the k-closure operator with three engines, wreath/affine/tensor
constructions, and composition-factor analysis.
"""

from .budget import Budget, default_budget
from .errors import (
    BudgetExceeded,
    DegreeMismatch,
    FormatError,
    HypothesisNotMet,
    LemmaInapplicable,
    NotDecomposable,
)
from .perm import (
    GroupHandle,
    Permutation,
    alternating_group,
    base_size,
    contains,
    cyclic_group,
    dihedral_group,
    equal_groups,
    format_group_text,
    group_from_generators,
    group_from_json,
    group_to_json,
    is_subgroup,
    load_group_file,
    order,
    parse_group_text,
    symmetric_group,
    trivial_group,
)

__version__ = "0.1.0"

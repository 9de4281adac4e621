"""
Shared helpers for the brute-force kernel checks.
"""

from itertools import product
from math import lcm

import pytest

from degree0.exactlinalg import field_row_to_rational_system


def integer_rows(row, context):
    """The rational system of a field row, each equation scaled to integers."""
    rows = []
    for equation in field_row_to_rational_system(row, context):
        den = lcm(*(q.denominator for q in equation))
        rows.append([int(q * den) for q in equation])
    return rows


def short_relations(rows, box):
    """
    Every nonzero integer vector with entries in [-box, box] solving rows . v = 0.

    Meet in the middle over the two halves of the columns. Each column is
    packed into one integer with a bit field per equation wide enough that
    the packing of any partial sum is zero only when every equation is.
    """
    ncols = len(rows[0])
    bound = box * max(sum(abs(x) for x in r) for r in rows)
    width = bound.bit_length() + 2
    packed = [sum(r[c] << (width * i) for i, r in enumerate(rows)) for c in range(ncols)]
    half = ncols // 2
    values = range(-box, box + 1)

    left = {}
    for a in product(values, repeat=half):
        key = sum(x * p for x, p in zip(a, packed[:half]))
        left.setdefault(key, []).append(a)
    found = []
    for b in product(values, repeat=ncols - half):
        key = -sum(x * p for x, p in zip(b, packed[half:]))
        for a in left.get(key, ()):
            v = a + b
            if any(v):
                found.append(v)
    return found


@pytest.fixture
def relation_search():
    """(integer_rows, short_relations) for kernel oracle tests."""
    return integer_rows, short_relations

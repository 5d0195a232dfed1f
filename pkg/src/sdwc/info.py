"""Finite probability tables and information measures.

All logarithms are base 2, so every quantity is in bits.  ``0 log 0`` is
taken as 0, which also makes terms conditioned on zero-probability events
vanish.
"""

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SizeError, ValidationError

PROB_ATOL = 1e-12
DEFAULT_MAX_CELLS = 10**7


def max_cells():
    """Cap on the number of cells of a dense table (env ``SDWC_MAX_CELLS``)."""
    raw = os.environ.get("SDWC_MAX_CELLS")
    if raw is None:
        return DEFAULT_MAX_CELLS
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ValidationError(f"SDWC_MAX_CELLS must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise ValidationError("SDWC_MAX_CELLS must be positive")
    return cap


def check_cells(n_cells, what="table"):
    cap = max_cells()
    if n_cells > cap:
        raise SizeError(f"{what} needs {n_cells} cells, cap is {cap}")


def as_prob_vector(p, atol=PROB_ATOL):
    """Validate ``p`` as a probability vector and return it as a read-only array."""
    arr = np.array(p, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError("probability vector must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("probability vector has non-finite entries")
    if np.any(arr < 0):
        raise ValidationError("probability vector has negative entries")
    if abs(arr.sum() - 1.0) > atol:
        raise ValidationError(f"probabilities sum to {arr.sum()!r}, not 1")
    arr.setflags(write=False)
    return arr


def _plogp_sum(p):
    p = np.asarray(p, dtype=float).ravel()
    nz = p[p > 0]
    return -float(np.sum(nz * np.log2(nz)))


def entropy(p):
    """Shannon entropy of a probability vector, in bits."""
    return _plogp_sum(as_prob_vector(p))


def check_probability(name, q):
    if not (0.0 <= q <= 1.0):
        raise DomainError(f"{name}={q!r} is not a probability in [0, 1]")


def binary_entropy(q):
    """H(q) = -q log2 q - (1-q) log2 (1-q)."""
    check_probability("q", q)
    if q == 0.0 or q == 1.0:
        return 0.0
    return -q * math.log2(q) - (1.0 - q) * math.log2(1.0 - q)


def star(p, u):
    """Crossover of two cascaded binary symmetric flips: p(1-u) + (1-p)u."""
    check_probability("p", p)
    check_probability("u", u)
    return p * (1.0 - u) + (1.0 - p) * u


def awgn_capacity(x):
    """C(x) = 1/2 log2(1 + x) for a signal-to-noise ratio x >= 0."""
    if not x >= 0:
        raise DomainError(f"signal-to-noise ratio must be >= 0, got {x!r}")
    return 0.5 * math.log2(1.0 + x)


@dataclass(frozen=True)
class JointTable:
    """Dense joint distribution over named discrete axes.

    ``values[i0, i1, ...]`` is the probability of the outcome where axis
    ``axes[k]`` takes value ``ik``.
    """

    axes: tuple
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        axes = tuple(self.axes)
        if len(set(axes)) != len(axes):
            raise ValidationError(f"duplicate axis names in {axes}")
        values = np.array(self.values, dtype=float)
        if values.ndim != len(axes):
            raise ValidationError(
                f"table has {values.ndim} dimensions but {len(axes)} axis names"
            )
        check_cells(values.size)
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValidationError("table entries must be finite and non-negative")
        total = values.sum()
        if abs(total - 1.0) > PROB_ATOL:
            raise ValidationError(f"table mass is {total!r}, not 1")
        values.setflags(write=False)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "values", values)

    @property
    def shape(self):
        return dict(zip(self.axes, self.values.shape))

    def resolve(self, group):
        """Turn an axis group spec into a tuple of axis names.

        A string naming an axis is that axis; any other string is read as a
        run of single-letter axis names (``"US"`` -> ``("U", "S")``).
        """
        if group is None:
            return ()
        if isinstance(group, str):
            names = (group,) if group in self.axes else tuple(group)
        else:
            names = tuple(group)
        for name in names:
            if name not in self.axes:
                raise ValidationError(f"unknown axis {name!r}; table has {self.axes}")
        if len(set(names)) != len(names):
            raise ValidationError(f"axis repeated within group {names}")
        return names

    def marginal(self, group):
        """Marginal table over ``group`` (axes kept in table order)."""
        names = set(self.resolve(group))
        keep = tuple(a for a in self.axes if a in names)
        drop = tuple(i for i, a in enumerate(self.axes) if a not in names)
        return JointTable(keep, self.values.sum(axis=drop))

    def entropy(self, group):
        """Joint entropy H(group) in bits; the empty group has entropy 0."""
        names = set(self.resolve(group))
        drop = tuple(i for i, a in enumerate(self.axes) if a not in names)
        if len(drop) == len(self.axes):
            return 0.0
        return _plogp_sum(self.values.sum(axis=drop))


def conditional_mi(t, group_a, group_b, cond=()):
    """Unclamped I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C)."""
    a = t.resolve(group_a)
    b = t.resolve(group_b)
    c = t.resolve(cond)
    if set(a) & set(b) or set(a) & set(c) or set(b) & set(c):
        raise ValidationError(f"axis groups overlap: {a}, {b}, {c}")
    if not a or not b:
        raise ValidationError("mutual information needs two non-empty groups")
    return t.entropy(a + c) + t.entropy(b + c) - t.entropy(a + b + c) - t.entropy(c)


def mutual_information(t, group_a, group_b, cond=()):
    """I(A;B|C) in bits, with round-off below zero clamped to 0."""
    return max(0.0, conditional_mi(t, group_a, group_b, cond))

"""Exhaustive policy search for the secrecy capacity, and the binary closed forms.

The search enumerates P(u, v | s) on a uniform simplex lattice (one lattice
point per state) and P(x | u, v, s) either as deterministic maps, as a
lattice, or pinned to X = V.  Every policy gets an integer id

    id = uv_index * n_x_maps + x_index

where ``uv_index`` and ``x_index`` are mixed-radix encodings of the lattice
choices.  The optimizer returns the smallest id attaining the maximum, with
values compared after rounding to 1e-12 bits, so the result does not depend
on the order in which chunks are evaluated.
"""

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.special import entr

from .discrete import AuxiliaryPolicy, induced_joint
from .errors import DomainError, SizeError, ValidationError
from .info import binary_entropy, check_probability, conditional_mi, mutual_information, star

MAX_POLICIES = 10**8
TIE_QUANTUM = 1e-12
_CHUNK_CELLS = 1 << 22


@dataclass(frozen=True)
class SearchSpec:
    """Search space for the capacity maximization.

    ``grid_steps`` is the number of lattice points per simplex edge, so
    probabilities move in steps of ``1 / (grid_steps - 1)``.
    """

    card_u: int = 1
    card_v: int = 2
    grid_steps: int = 11
    deterministic_x: bool = True
    x_equals_v: bool = False

    def __post_init__(self):
        if self.card_u < 1 or self.card_v < 1:
            raise ValidationError("auxiliary cardinalities must be >= 1")
        if self.grid_steps < 2:
            raise ValidationError("grid_steps must be >= 2")


def simplex_lattice(k, grid_steps):
    """All points of the k-simplex with coordinates in multiples of 1/(grid_steps-1).

    Rows are in lexicographic order of their integer numerators.
    """
    m = grid_steps - 1
    rows = []
    # stars and bars: bar positions among m + k - 1 slots
    for bars in itertools.combinations(range(m + k - 1), k - 1):
        edges = (-1,) + bars + (m + k - 1,)
        rows.append([edges[i + 1] - edges[i] - 1 for i in range(k)])
    rows.sort()
    return np.array(rows, dtype=float).reshape(-1, k) / m


def _count_lattice(k, grid_steps):
    return math.comb(grid_steps - 1 + k - 1, k - 1)


class _Space:
    """Mixed-radix enumeration of the policies described by a SearchSpec."""

    def __init__(self, ch, spec):
        self.ch = ch
        self.spec = spec
        cs, cu, cv, cx = ch.card_s, spec.card_u, spec.card_v, ch.card_x
        self.n_uv_point = _count_lattice(cu * cv, spec.grid_steps)
        self.n_uv = self.n_uv_point**cs
        n_slots = cu * cv * cs
        if spec.x_equals_v:
            if cv != cx:
                raise ValidationError(f"x_equals_v needs card_v == |X| = {cx}")
            self.x_mode = "identity"
            self.n_x = 1
        elif spec.deterministic_x:
            self.x_mode = "deterministic"
            self.n_x = cx**n_slots
        else:
            self.x_mode = "lattice"
            self.n_x_point = _count_lattice(cx, spec.grid_steps)
            self.n_x = self.n_x_point**n_slots
        self.total = self.n_uv * self.n_x
        if self.total > MAX_POLICIES:
            raise SizeError(
                f"search space has {self.total} policies, cap is {MAX_POLICIES}"
            )
        self.uv_points = simplex_lattice(cu * cv, spec.grid_steps)
        if self.x_mode == "lattice":
            self.x_points = simplex_lattice(cx, spec.grid_steps)

    def uv_block(self, start, stop):
        """P(u,v|s) for uv indices in [start, stop) as (B, S, U, V)."""
        cs = self.ch.card_s
        digits = np.unravel_index(np.arange(start, stop), (self.n_uv_point,) * cs)
        block = np.stack([self.uv_points[d] for d in digits], axis=1)
        return block.reshape(stop - start, cs, self.spec.card_u, self.spec.card_v)

    def x_map(self, index):
        """P(x|u,v,s) for one x index as (U, V, S, X)."""
        cu, cv, cs, cx = self.spec.card_u, self.spec.card_v, self.ch.card_s, self.ch.card_x
        if self.x_mode == "identity":
            out = np.zeros((cu, cv, cs, cx))
            for v in range(cv):
                out[:, v, :, v] = 1.0
            return out
        n_slots = cu * cv * cs
        if self.x_mode == "deterministic":
            digits = np.unravel_index(index, (cx,) * n_slots)
            return np.eye(cx)[list(digits)].reshape(cu, cv, cs, cx)
        digits = np.unravel_index(index, (self.n_x_point,) * n_slots)
        return self.x_points[list(digits)].reshape(cu, cv, cs, cx)

    def policy(self, policy_id):
        uv_index, x_index = divmod(int(policy_id), self.n_x)
        uv = self.uv_block(uv_index, uv_index + 1)[0]
        return AuxiliaryPolicy(uv, self.x_map(x_index))


def _batched_entropy(p, keep_axes):
    """Entropy of the marginal on ``keep_axes`` (batch axis 0 always kept)."""
    drop = tuple(i for i in range(1, p.ndim) if i not in keep_axes)
    marg = p.sum(axis=drop) if drop else p
    return entr(marg).reshape(marg.shape[0], -1).sum(axis=1) / math.log(2)


def batched_objective(ch, uv_block, x_map):
    """Raw I(V;Y|U,S) - I(V;Z|U,S) for a batch of P(u,v|s) sharing one x map."""
    # p(y|u,v,s) and p(z|u,v,s) after averaging over x
    law_y = ch.law.sum(axis=3)
    law_z = ch.law.sum(axis=2)
    y_uvs = np.einsum("uvsx,xsy->suvy", x_map, law_y)
    z_uvs = np.einsum("uvsx,xsz->suvz", x_map, law_z)
    base = ch.state_prior[None, :, None, None] * uv_block
    p_y = base[..., None] * y_uvs[None]
    p_z = base[..., None] * z_uvs[None]
    # axes: 0 batch, 1 S, 2 U, 3 V, 4 Y|Z
    return (
        _batched_entropy(p_y, (1, 2, 4))
        - _batched_entropy(p_y, (1, 2, 3, 4))
        - _batched_entropy(p_z, (1, 2, 4))
        + _batched_entropy(p_z, (1, 2, 3, 4))
    )


class OptimizationResult(NamedTuple):
    policy: AuxiliaryPolicy
    value: float
    policy_id: int
    n_policies: int
    trace: Optional[np.ndarray] = None


def optimize_secrecy(ch, spec, trace=False):
    """Maximize the capacity objective over the lattice described by ``spec``.

    Returns the maximizing policy (smallest id on ties) and the maximum,
    floored at 0.  With ``trace=True`` the value of every policy is also
    returned, indexed by policy id.
    """
    space = _Space(ch, spec)
    cells = ch.card_s * spec.card_u * spec.card_v * max(ch.card_y, ch.card_z)
    chunk = max(1, _CHUNK_CELLS // cells)
    values = np.empty(space.total) if trace else None
    best_key, best_id = None, None
    for x_index in range(space.n_x):
        x_map = space.x_map(x_index)
        for start in range(0, space.n_uv, chunk):
            stop = min(space.n_uv, start + chunk)
            vals = batched_objective(ch, space.uv_block(start, stop), x_map)
            ids = np.arange(start, stop) * space.n_x + x_index
            if trace:
                values[ids] = vals
            keys = np.rint(vals / TIE_QUANTUM).astype(np.int64)
            k = keys.max()
            i = int(ids[keys == k].min())
            if best_key is None or k > best_key or (k == best_key and i < best_id):
                best_key, best_id = k, i
    policy = space.policy(best_id)
    value = max(0.0, conditional_value(ch, policy))
    return OptimizationResult(policy, value, best_id, space.total, values)


def conditional_value(ch, pol):
    t = induced_joint(ch, pol)
    return conditional_mi(t, "V", "Y", "US") - conditional_mi(t, "V", "Z", "US")


def policy_by_id(ch, spec, policy_id):
    """Decode a policy id produced by :func:`optimize_secrecy`."""
    space = _Space(ch, spec)
    if not 0 <= policy_id < space.total:
        raise ValidationError(f"policy id {policy_id} outside [0, {space.total})")
    return space.policy(policy_id)


# Binary channel closed forms ------------------------------------------------


def canonical_crossover(q):
    """Map a crossover in (1/2, 1] to its mirror 1 - q; reject values outside [0, 1]."""
    if not (0.0 <= q <= 1.0):
        raise DomainError(f"crossover {q!r} outside [0, 1]")
    return 1.0 - q if q > 0.5 else q


def binary_capacity(n1, n2):
    """[H(n2) - H(n1)]^+ for the binary channel with main/eavesdropper flips n1, n2."""
    n1, n2 = canonical_crossover(n1), canonical_crossover(n2)
    return max(0.0, binary_entropy(n2) - binary_entropy(n1))


def binary_objective(p, n1, n2):
    """H(n2) - H(n1) - [H(p*n2) - H(p*n1)] for input bias p."""
    for name, val in (("p", p), ("n1", n1), ("n2", n2)):
        check_probability(name, val)
    return (
        binary_entropy(n2)
        - binary_entropy(n1)
        - (binary_entropy(star(p, n2)) - binary_entropy(star(p, n1)))
    )


def binary_argmax(n1, n2, grid_steps=201):
    """Input bias on a uniform grid maximizing :func:`binary_objective`.

    Returns (bias, value); ties go to the smallest bias.
    """
    grid = np.linspace(0.0, 1.0, grid_steps)
    vals = np.array([binary_objective(float(p), n1, n2) for p in grid])
    keys = np.rint(vals / TIE_QUANTUM).astype(np.int64)
    i = int(np.flatnonzero(keys == keys.max())[0])
    return float(grid[i]), float(vals[i])


def binary_regime_thresholds(ch, pol):
    """(I(S;Y), max{I(S;Y), I(X;S) - I(X;Z|S)}) on a binary channel."""
    if (ch.card_x, ch.card_s, ch.card_y, ch.card_z) != (2, 2, 2, 2):
        raise ValidationError("binary regime thresholds need all alphabets binary")
    t = induced_joint(ch, pol)
    i_sy = mutual_information(t, "S", "Y")
    leak = conditional_mi(t, "X", "S") - conditional_mi(t, "X", "Z", "S")
    return i_sy, max(i_sy, leak)

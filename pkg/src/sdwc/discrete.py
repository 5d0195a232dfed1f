"""State-dependent wiretap channels over finite alphabets.

A channel is a state prior P(s) together with a law p(y, z | x, s).  An
auxiliary policy supplies P(u, v | s) and P(x | u, v, s); together they
induce a joint table over (S, U, V, X, Y, Z) on which every rate
expression below is a combination of conditional mutual informations.

Time sharing is fixed to a single slot, so every evaluator is a pure
function of one policy.  Convex hulls, where wanted, come from
:func:`time_share` over evaluated :class:`RatePoint` objects.
"""

import enum
import json
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import DomainError, ValidationError
from .info import (
    PROB_ATOL,
    JointTable,
    check_probability,
    as_prob_vector,
    check_cells,
    conditional_mi,
)

AXES = ("S", "U", "V", "X", "Y", "Z")
RENORMALIZE_ATOL = 1e-9
REGIME_TOL = 1e-9


def _conditional(arr, n_given, name):
    """Validate that ``arr`` is a stack of distributions over its trailing axes."""
    arr = np.array(arr, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValidationError(f"{name}: entries must be finite and non-negative")
    sums = arr.reshape(arr.shape[:n_given] + (-1,)).sum(axis=-1)
    bad = np.abs(sums - 1.0) > PROB_ATOL
    if np.any(bad):
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        raise ValidationError(f"{name}: slice {idx} sums to {sums[idx]!r}, not 1")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DiscreteSDWC:
    """Finite-alphabet state-dependent wiretap channel.

    ``law[x, s, y, z]`` is p(y, z | x, s); ``state_prior[s]`` is P(s).
    """

    state_prior: np.ndarray = field(repr=False)
    law: np.ndarray = field(repr=False)

    def __post_init__(self):
        prior = as_prob_vector(self.state_prior)
        law = np.array(self.law, dtype=float)
        if law.ndim != 4:
            raise ValidationError(f"law must have shape (|X|,|S|,|Y|,|Z|), got {law.shape}")
        if law.shape[1] != prior.size:
            raise ValidationError(
                f"law has {law.shape[1]} states but the prior has {prior.size}"
            )
        law = _conditional(law, 2, "law p(y,z|x,s)")
        object.__setattr__(self, "state_prior", prior)
        object.__setattr__(self, "law", law)

    @property
    def card_x(self):
        return self.law.shape[0]

    @property
    def card_s(self):
        return self.law.shape[1]

    @property
    def card_y(self):
        return self.law.shape[2]

    @property
    def card_z(self):
        return self.law.shape[3]

    def state_averaged_law(self):
        """p(y, z | x) with the state summed out under its prior."""
        return np.einsum("s,xsyz->xyz", self.state_prior, self.law)

    def n_fold(self, x_seq, s_seq):
        """Probability table p(y^n, z^n | x^n, s^n) of the memoryless extension."""
        x_seq = np.asarray(x_seq, dtype=int)
        s_seq = np.asarray(s_seq, dtype=int)
        if x_seq.shape != s_seq.shape or x_seq.ndim != 1:
            raise ValidationError("x and s sequences must be 1-D and of equal length")
        check_cells((self.card_y * self.card_z) ** x_seq.size, "n-fold law")
        out = np.ones(())
        for x, s in zip(x_seq, s_seq):
            out = np.multiply.outer(out, self.law[x, s])
        n = x_seq.size
        # (y1, z1, y2, z2, ...) -> (y1..yn, z1..zn)
        order = [2 * i for i in range(n)] + [2 * i + 1 for i in range(n)]
        return out.transpose(order)


@dataclass(frozen=True)
class AuxiliaryPolicy:
    """Auxiliary variables U, V and the input map of a coding scheme.

    ``uv_given_s[s, u, v]`` is P(u, v | s) and ``x_given_uvs[u, v, s, x]``
    is P(x | u, v, s).
    """

    uv_given_s: np.ndarray = field(repr=False)
    x_given_uvs: np.ndarray = field(repr=False)

    def __post_init__(self):
        uv = np.asarray(self.uv_given_s, dtype=float)
        x = np.asarray(self.x_given_uvs, dtype=float)
        if uv.ndim != 3:
            raise ValidationError(f"uv_given_s must have shape (|S|,|U|,|V|), got {uv.shape}")
        if x.ndim != 4:
            raise ValidationError(
                f"x_given_uvs must have shape (|U|,|V|,|S|,|X|), got {x.shape}"
            )
        if x.shape[:3] != (uv.shape[1], uv.shape[2], uv.shape[0]):
            raise ValidationError(
                f"x_given_uvs shape {x.shape} does not match uv_given_s shape {uv.shape}"
            )
        object.__setattr__(self, "uv_given_s", _conditional(uv, 1, "uv_given_s"))
        object.__setattr__(self, "x_given_uvs", _conditional(x, 3, "x_given_uvs"))

    @property
    def card_u(self):
        return self.uv_given_s.shape[1]

    @property
    def card_v(self):
        return self.uv_given_s.shape[2]

    @property
    def card_s(self):
        return self.uv_given_s.shape[0]

    @property
    def card_x(self):
        return self.x_given_uvs.shape[3]

    def x_given_s(self):
        """Induced input law P(x | s)."""
        return np.einsum("suv,uvsx->sx", self.uv_given_s, self.x_given_uvs)

    @classmethod
    def from_x_given_s(cls, x_given_s):
        """The policy V = X with U degenerate, for a given P(x | s)."""
        xs = np.asarray(x_given_s, dtype=float)
        card_s, card_x = xs.shape
        x_map = np.zeros((1, card_x, card_s, card_x))
        for v in range(card_x):
            x_map[0, v, :, v] = 1.0
        return cls(xs[:, None, :], x_map)


class RatePoint(NamedTuple):
    """An achievable (R, R1, R2, Re) tuple; the split is None when unused."""

    r: float
    r_e: float
    r1: Optional[float] = None
    r2: Optional[float] = None


def time_share(points, weights):
    """Convex combination of rate points (explicit time sharing)."""
    w = as_prob_vector(weights)
    if len(points) != w.size:
        raise ValidationError("one weight per rate point is required")
    r = float(sum(wi * p.r for wi, p in zip(w, points)))
    r_e = float(sum(wi * p.r_e for wi, p in zip(w, points)))
    if all(p.r1 is not None for p in points):
        r1 = float(sum(wi * p.r1 for wi, p in zip(w, points)))
        return RatePoint(r, r_e, r1, r - r1)
    return RatePoint(r, r_e)


class GPCBounds(NamedTuple):
    r1: float
    r: float
    r_e: float


class SPCBounds(NamedTuple):
    r: float
    r_e: float


class Regime(str, enum.Enum):
    SPC = "SPC"
    GPC = "GPC"
    NEITHER = "NEITHER"


def induced_joint(ch, pol):
    """Joint table P(s) P(u,v|s) P(x|u,v,s) p(y,z|x,s) over (S,U,V,X,Y,Z)."""
    if pol.card_s != ch.card_s or pol.card_x != ch.card_x:
        raise ValidationError(
            f"policy alphabets (|S|={pol.card_s}, |X|={pol.card_x}) do not match "
            f"channel (|S|={ch.card_s}, |X|={ch.card_x})"
        )
    check_cells(
        ch.card_s * pol.card_u * pol.card_v * ch.card_x * ch.card_y * ch.card_z,
        "induced joint",
    )
    values = np.einsum(
        "s,suv,uvsx,xsyz->suvxyz", ch.state_prior, pol.uv_given_s, pol.x_given_uvs, ch.law
    )
    return JointTable(AXES, values)


def _pos(x):
    return max(0.0, x)


def lemma1_rate(ch, pol, r_s):
    """Point-to-point rate with non-causal state knowledge for one policy.

    min{ I(X;Y|S), max{ I(U,S;Y) - R_S, I(U;Y) - I(U;S) } }, floored at 0.
    """
    if r_s < 0:
        raise ValidationError(f"state rate must be >= 0, got {r_s!r}")
    t = induced_joint(ch, pol)
    mi = lambda a, b, c=(): conditional_mi(t, a, b, c)
    spc = mi("US", "Y") - r_s
    gpc = mi("U", "Y") - mi("U", "S")
    return _pos(min(mi("X", "Y", "S"), max(spc, gpc)))


def gpc_region(ch, pol):
    """Right-hand sides of the GPC equivocation region, each floored at 0."""
    t = induced_joint(ch, pol)
    mi = lambda a, b, c=(): conditional_mi(t, a, b, c)
    return GPCBounds(
        r1=_pos(mi("V", "Y", "U") - mi("V", "S", "U")),
        r=_pos(mi("VU", "Y") - mi("VU", "S")),
        r_e=_pos(mi("V", "Y", "U") - mi("V", "SZ", "U")),
    )


def gpc_perfect_secrecy(ch, pol):
    """min{ I(V,U;Y) - I(V,U;S), I(V;Y|U) - I(V;S,Z|U) }, floored at 0."""
    b = gpc_region(ch, pol)
    return min(b.r, b.r_e)


def gpc_rate_point(ch, pol):
    b = gpc_region(ch, pol)
    r1 = min(b.r1, b.r)
    return RatePoint(r=b.r, r_e=min(b.r_e, b.r), r1=r1, r2=b.r - r1)


def corollary1_rate(ch, pol):
    """I(V;Y|S) - max{ I(V;Z|S), H(S|Y) }, floored at 0."""
    t = induced_joint(ch, pol)
    h_s_given_y = t.entropy("SY") - t.entropy("Y")
    leak = max(conditional_mi(t, "V", "Z", "S"), h_s_given_y)
    return _pos(conditional_mi(t, "V", "Y", "S") - leak)


def spc_region(ch, pol):
    """(I(U,V;Y|S), I(V;Y|U,S) - I(V;Z|U,S)), the second floored at 0."""
    t = induced_joint(ch, pol)
    return SPCBounds(
        r=_pos(conditional_mi(t, "UV", "Y", "S")),
        r_e=_pos(_secrecy_gap(t)),
    )


def spc_rate_point(ch, pol):
    b = spc_region(ch, pol)
    return RatePoint(r=b.r, r_e=min(b.r_e, b.r))


def _secrecy_gap(t):
    return conditional_mi(t, "V", "Y", "US") - conditional_mi(t, "V", "Z", "US")


def spc_perfect_secrecy(ch, pol):
    return spc_region(ch, pol).r_e


def corollary2_rate(ch, pol):
    """I(V;Y|S) - I(V;Z|S), floored at 0 (U is ignored)."""
    t = induced_joint(ch, pol)
    return _pos(conditional_mi(t, "V", "Y", "S") - conditional_mi(t, "V", "Z", "S"))


def capacity_objective(ch, pol, clamp=True):
    """I(V;Y|U,S) - I(V;Z|U,S), the quantity maximized for the secrecy capacity.

    With ``clamp=False`` the raw (possibly negative) difference is returned.
    """
    gap = _secrecy_gap(induced_joint(ch, pol))
    return _pos(gap) if clamp else gap


def regime_thresholds(ch, pol):
    """(SPC threshold, GPC threshold) on the state rate R_S for one policy."""
    t = induced_joint(ch, pol)
    mi = lambda a, b, c=(): conditional_mi(t, a, b, c)
    spc = max(0.0, min(mi("S", "UY"), mi("S", "VY", "U")))
    gpc = max(spc, mi("VU", "S") - mi("U", "Y", "S") - mi("V", "Z", "S"))
    return spc, gpc


def regime_check(ch, pol, r_s):
    """Which scheme attains the capacity objective at state rate ``r_s``.

    Boundary ties (within 1e-9) go to SPC.
    """
    h_s = JointTable(("S",), ch.state_prior).entropy("S")
    if r_s < 0 or r_s > h_s + REGIME_TOL:
        raise DomainError(f"state rate {r_s!r} outside [0, H(S)={h_s:.6f}]")
    spc, gpc = regime_thresholds(ch, pol)
    if r_s <= spc + REGIME_TOL:
        return Regime.SPC
    if r_s >= gpc - REGIME_TOL:
        return Regime.GPC
    return Regime.NEITHER


def default_input_grid(card_x, points=101, seed=0):
    """Input distributions used to probe the more-capable ordering.

    Binary inputs use ``points`` interior Bernoulli biases (the endpoints
    give zero information on both outputs and certify nothing); larger
    alphabets use seeded Dirichlet(1) samples.
    """
    if card_x == 2:
        p = np.linspace(0.0, 1.0, points + 2)[1:-1]
        return [np.array([1.0 - q, q]) for q in p]
    rng = np.random.default_rng(seed)
    return list(rng.dirichlet(np.ones(card_x), size=points))


def more_capable_margin(ch, input_dists):
    """min over inputs of I(X;Y) - I(X;Z) on the state-averaged channel.

    A non-negative result certifies "Y more capable than Z" on the tested
    inputs only.
    """
    if len(input_dists) == 0:
        raise ValidationError("need at least one input distribution")
    law = ch.state_averaged_law()
    margins = []
    for px in input_dists:
        px = as_prob_vector(px)
        if px.size != ch.card_x:
            raise ValidationError(f"input distribution has {px.size} symbols, |X|={ch.card_x}")
        t = JointTable(("X", "Y", "Z"), px[:, None, None] * law)
        margins.append(conditional_mi(t, "X", "Y") - conditional_mi(t, "X", "Z"))
    return float(min(margins))


def more_capable_capacity_objective(ch, x_given_s):
    """I(X;Y|S) - I(X;Z|S) for the input law ``x_given_s[s, x]``, floored at 0."""
    xs = _conditional(x_given_s, 1, "x_given_s")
    if xs.shape != (ch.card_s, ch.card_x):
        raise ValidationError(f"x_given_s must have shape {(ch.card_s, ch.card_x)}")
    values = np.einsum("s,sx,xsyz->sxyz", ch.state_prior, xs, ch.law)
    t = JointTable(("S", "X", "Y", "Z"), values)
    return _pos(conditional_mi(t, "X", "Y", "S") - conditional_mi(t, "X", "Z", "S"))


def binary_sdwc(n1, n2, q):
    """Binary channel Y = X+S+N1, Z = X+S+N2 (mod 2), S ~ B(q), independent flips."""
    for name, val in (("n1", n1), ("n2", n2), ("q", q)):
        check_probability(name, val)
    flip1 = np.array([[1 - n1, n1], [n1, 1 - n1]])
    flip2 = np.array([[1 - n2, n2], [n2, 1 - n2]])
    law = np.empty((2, 2, 2, 2))
    for x in range(2):
        for s in range(2):
            c = x ^ s
            law[x, s] = np.outer(flip1[c], flip2[c])
    return DiscreteSDWC(np.array([1 - q, q]), law)


# JSON documents ------------------------------------------------------------


def _renormalized(arr, n_given, name):
    arr = np.array(arr, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValidationError(f"{name}: entries must be finite and non-negative")
    sums = arr.reshape(arr.shape[:n_given] + (-1,)).sum(axis=-1)
    off = np.abs(sums - 1.0)
    if np.any(off >= RENORMALIZE_ATOL):
        idx = tuple(int(i) for i in np.argwhere(off >= RENORMALIZE_ATOL)[0])
        raise ValidationError(f"{name}: slice {idx} sums to {sums[idx]!r}, not 1")
    return arr / sums.reshape(sums.shape + (1,) * (arr.ndim - n_given))


def _require(doc, key, kind):
    if key not in doc:
        raise ValidationError(f"missing field {key!r}")
    val = doc[key]
    if kind is int and (isinstance(val, bool) or not isinstance(val, int) or val < 1):
        raise ValidationError(f"field {key!r} must be a positive integer, got {val!r}")
    return val


def _shaped(doc, key, shape):
    if key not in doc:
        raise ValidationError(f"missing field {key!r}")
    try:
        arr = np.array(doc[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"field {key!r} is not a rectangular numeric array") from exc
    if arr.shape != shape:
        raise ValidationError(f"field {key!r} has shape {arr.shape}, expected {shape}")
    return arr


CHANNEL_FIELDS = {"card_x", "card_s", "card_y", "card_z", "state_prior", "law"}
POLICY_FIELDS = {"card_u", "card_v", "uv_given_s", "x_given_uvs"}


def channel_from_dict(doc):
    """Build a channel from its JSON document.

    ``law`` is nested ``[x][s][y][z]``.  Slices off by less than 1e-9 are
    renormalized; anything worse is rejected.
    """
    if not isinstance(doc, dict):
        raise ValidationError("channel document must be a JSON object")
    extra = set(doc) - CHANNEL_FIELDS
    if extra:
        raise ValidationError(f"unknown channel fields {sorted(extra)}")
    cx, cs, cy, cz = (_require(doc, k, int) for k in ("card_x", "card_s", "card_y", "card_z"))
    prior = _shaped(doc, "state_prior", (cs,))
    law = _shaped(doc, "law", (cx, cs, cy, cz))
    return DiscreteSDWC(
        _renormalized(prior, 0, "state_prior"), _renormalized(law, 2, "law")
    )


def channel_to_dict(ch):
    return {
        "card_x": ch.card_x,
        "card_s": ch.card_s,
        "card_y": ch.card_y,
        "card_z": ch.card_z,
        "state_prior": ch.state_prior.tolist(),
        "law": ch.law.tolist(),
    }


def policy_from_dict(doc, card_s=None, card_x=None):
    """Build a policy from JSON: ``uv_given_s[s][u][v]``, ``x_given_uvs[u][v][s][x]``."""
    if not isinstance(doc, dict):
        raise ValidationError("policy document must be a JSON object")
    extra = set(doc) - POLICY_FIELDS
    if extra:
        raise ValidationError(f"unknown policy fields {sorted(extra)}")
    cu, cv = _require(doc, "card_u", int), _require(doc, "card_v", int)
    uv = np.array(_require(doc, "uv_given_s", list), dtype=float)
    if uv.ndim != 3 or uv.shape[1:] != (cu, cv):
        raise ValidationError(f"uv_given_s has shape {uv.shape}, expected (|S|, {cu}, {cv})")
    if card_s is not None and uv.shape[0] != card_s:
        raise ValidationError(f"uv_given_s covers {uv.shape[0]} states, channel has {card_s}")
    cs = uv.shape[0]
    xm = np.array(_require(doc, "x_given_uvs", list), dtype=float)
    if xm.ndim != 4 or xm.shape[:3] != (cu, cv, cs):
        raise ValidationError(
            f"x_given_uvs has shape {xm.shape}, expected ({cu}, {cv}, {cs}, |X|)"
        )
    if card_x is not None and xm.shape[3] != card_x:
        raise ValidationError(f"x_given_uvs covers {xm.shape[3]} inputs, channel has {card_x}")
    return AuxiliaryPolicy(
        _renormalized(uv, 1, "uv_given_s"), _renormalized(xm, 3, "x_given_uvs")
    )


def policy_to_dict(pol):
    return {
        "card_u": pol.card_u,
        "card_v": pol.card_v,
        "uv_given_s": pol.uv_given_s.tolist(),
        "x_given_uvs": pol.x_given_uvs.tolist(),
    }


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc


def load_policies(doc, ch):
    """A policy file holds one policy object, a list, or {"policies": [...]}."""
    if isinstance(doc, dict) and "policies" in doc:
        doc = doc["policies"]
    items = doc if isinstance(doc, list) else [doc]
    if not items:
        raise ValidationError("policy file contains no policies")
    return [policy_from_dict(d, ch.card_s, ch.card_x) for d in items]

"""Gaussian state-dependent wiretap channel and secure dirty paper coding.

Channel:  Y = X + S + N1,  Z = X + S + N2  with S ~ N(0, q) known to the
encoder and power constraint p on X.

The encoder splits its power as

    X = X1 + X2 + k S,   X1 ~ N(0, a b' p),  X2 ~ N(0, a b p),
    k = sqrt((1 - a) p / q)

(a = alpha, b = beta, b' = 1 - b) and uses the auxiliaries
V = X1 + lambda1 S (private layer) and U = X2 + lambda2 S (common layer).
All entropies are differential entropies in bits.

Degenerate auxiliaries are handled explicitly: U is dropped when it is
identically zero (b p alpha = 0 and lambda2 = 0), and q = 0 removes the
state from every expression (k is then taken as 0).  Any other zero
conditional variance raises :class:`SingularityError`.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .discrete import Regime
from .errors import DomainError, SingularityError
from .info import awgn_capacity

TWO_PI_E = 2.0 * math.pi * math.e
SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class GaussianSDWC:
    p: float
    q: float
    n1: float
    n2: float

    def __post_init__(self):
        if not (self.p >= 0 and self.q >= 0):
            raise DomainError(f"powers must be >= 0, got p={self.p!r}, q={self.q!r}")
        if not (self.n1 > 0 and self.n2 > 0):
            raise DomainError(f"noise variances must be > 0, got {self.n1!r}, {self.n2!r}")


@dataclass(frozen=True)
class DpcParams:
    alpha: float
    beta: float
    lambda1: float
    lambda2: float

    def __post_init__(self):
        for name in ("alpha", "beta", "lambda1", "lambda2"):
            val = getattr(self, name)
            if not (0.0 <= val <= 1.0):
                raise DomainError(f"{name}={val!r} outside [0, 1]")


class DpcEntropies(NamedTuple):
    h_vu_given_s: float
    h_vu_given_y: float
    h_v_given_u: float
    h_v_given_yu: float
    h_sz_given_u: float
    h_sz_given_uv: float


class LambdaChoice(NamedTuple):
    lambda1: float
    lambda2: float
    clamped: bool
    state_free: bool


class SdpcAuxiliary(NamedTuple):
    """V = X + coefficient * S with U empty."""

    coefficient: float
    u_degenerate: bool = True


def state_gain(ch, alpha):
    """k = sqrt((1 - alpha) p / q); 0 when q = 0."""
    if ch.q == 0:
        return 0.0
    return math.sqrt((1.0 - alpha) * ch.p / ch.q)


def _h(term, *variances):
    """1/2 log2((2 pi e)^n prod variances) for a product of conditional variances."""
    total = 0.0
    for var in variances:
        if not var > SINGULAR_TOL:
            raise SingularityError(term, f"{term}: conditional variance {var!r} is singular")
        total += 0.5 * math.log2(TWO_PI_E * var)
    return total


def _h_det(term, det, dim):
    if not det > SINGULAR_TOL:
        raise SingularityError(term, f"{term}: conditional determinant {det!r} is singular")
    return 0.5 * math.log2(TWO_PI_E**dim * det)


class _Moments:
    """Second moments of (V, U, Y) shared by the entropy closed forms."""

    def __init__(self, ch, dp):
        a, b = dp.alpha, dp.beta
        l1, l2, q = dp.lambda1, dp.lambda2, ch.q
        self.k = state_gain(ch, a)
        self.a1 = a * (1.0 - b) * ch.p
        self.a2 = a * b * ch.p
        self.var_v = self.a1 + l1 * l1 * q
        self.var_u = self.a2 + l2 * l2 * q
        self.cov_vu = l1 * l2 * q
        g = self.k + 1.0
        # Var(Y); with q > 0 this is p + (2k + 1) q + n1 since k^2 q = (1 - alpha) p
        self.var_y = ch.p + (2 * self.k + 1) * q + ch.n1 if q > 0 else a * ch.p + ch.n1
        self.cov_vy = self.a1 + l1 * q * g
        self.cov_uy = self.a2 + l2 * q * g
        self.u_const = self.var_u <= SINGULAR_TOL
        self.v_const = self.var_v <= SINGULAR_TOL


def dpc_entropies(ch, dp):
    """The six differential entropies behind the GPC rate expressions.

    With U identically zero the U-conditioning is dropped, so the fields
    become H(V|S), H(V|Y), H(V), H(V|Y), H(S,Z), H(S,Z|V).  With q = 0 the
    state drops out of the last two.
    """
    m = _Moments(ch, dp)
    q, n2 = ch.q, ch.n2
    l1, l2 = dp.lambda1, dp.lambda2
    if m.v_const:
        raise SingularityError("H(V|U)", "V is identically zero")
    if m.u_const:
        h_vu_s = _h("H(V|S)", m.a1)
        h_vu_y = _h("H(V|Y)", m.var_v - m.cov_vy**2 / m.var_y)
        h_v_u = _h("H(V)", m.var_v)
        h_v_yu = h_vu_y
        if q > 0:
            h_sz_u = _h("H(S,Z)", q, m.a1 + n2)
            h_sz_uv = _h("H(S,Z|V)", q * m.a1 / m.var_v, n2)
        else:
            h_sz_u = _h("H(Z)", m.a1 + n2)
            h_sz_uv = _h("H(Z|V)", n2)
        return DpcEntropies(h_vu_s, h_vu_y, h_v_u, h_v_yu, h_sz_u, h_sz_uv)

    B = m.var_y
    c1, c2 = m.cov_vy, m.cov_uy
    cross = 2.0 * m.cov_vu * c1 * c2
    A = -m.var_u * c1**2 - m.var_v * c2**2 + cross
    C = -(m.cov_vu**2) * B - m.var_u * c1**2 + cross
    D = m.var_u * B - c2**2
    if not D > SINGULAR_TOL:
        raise SingularityError("H(V|Y,U)", f"Var(U,Y) determinant {D!r} is singular")

    h_vu_s = _h_det("H(V,U|S)", m.a1 * m.a2, 2)
    h_vu_y = _h_det("H(V,U|Y)", m.var_u * m.var_v - m.cov_vu**2 + A / B, 2)
    h_v_u = _h("H(V|U)", m.var_v - m.cov_vu**2 / m.var_u)
    h_v_yu = _h("H(V|Y,U)", m.var_v + C / D)
    if q > 0:
        h_sz_u = _h("H(S,Z|U)", m.a2 * q / m.var_u, m.a1 + n2)
        denom = m.a1 * m.a2 + l1 * l1 * m.a2 * q + l2 * l2 * m.a1 * q
        h_sz_uv = _h("H(S,Z|U,V)", m.a1 * m.a2 * q / denom if denom > 0 else 0.0, n2)
    else:
        h_sz_u = _h("H(Z|U)", m.a1 + n2)
        h_sz_uv = _h("H(Z|U,V)", n2)
    return DpcEntropies(h_vu_s, h_vu_y, h_v_u, h_v_yu, h_sz_u, h_sz_uv)


def _u_only_re1(ch, dp):
    """I(U;Y) - I(U;S) when V is identically zero."""
    m = _Moments(ch, dp)
    h_u_s = _h("H(U|S)", m.a2) if ch.q > 0 else _h("H(U)", m.var_u)
    return h_u_s - _h("H(U|Y)", m.var_u - m.cov_uy**2 / m.var_y)


def dpc_rates(ch, dp):
    """(Re1, Re2) = (I(V,U;Y) - I(V,U;S), I(V;Y|U) - I(V;S,Z|U))."""
    m = _Moments(ch, dp)
    if m.v_const:
        if m.u_const:
            return 0.0, 0.0
        return _u_only_re1(ch, dp), 0.0
    h = dpc_entropies(ch, dp)
    re1 = h.h_vu_given_s - h.h_vu_given_y
    re2 = h.h_v_given_u - h.h_v_given_yu - h.h_sz_given_u + h.h_sz_given_uv
    return re1, re2


def re1(ch, dp):
    return dpc_rates(ch, dp)[0]


def re2(ch, dp):
    return dpc_rates(ch, dp)[1]


def optimal_lambdas(ch, alpha, beta):
    """Stationary binning coefficients of Re1.

    lambda1 = a b' p (k+1) / (a p + n1),  lambda2 = a b p (k+1) / (a p + n1).
    Values outside [0, 1] are clamped and flagged; q = 0 is flagged as
    ``state_free`` (k := 0).
    """
    for name, val in (("alpha", alpha), ("beta", beta)):
        if not (0.0 <= val <= 1.0):
            raise DomainError(f"{name}={val!r} outside [0, 1]")
    g = state_gain(ch, alpha) + 1.0
    denom = alpha * ch.p + ch.n1
    raw1 = alpha * (1.0 - beta) * ch.p * g / denom
    raw2 = alpha * beta * ch.p * g / denom
    l1, l2 = min(raw1, 1.0), min(raw2, 1.0)
    return LambdaChoice(l1, l2, (l1, l2) != (raw1, raw2), ch.q == 0 and alpha < 1)


def gpc_closed_rates(ch, alpha):
    """(C(alpha p/n1), C(alpha p/n1) - C(alpha p/n2)): Re1, Re2 at beta = 0 and the optimal lambdas."""
    c1 = awgn_capacity(alpha * ch.p / ch.n1)
    return c1, c1 - awgn_capacity(alpha * ch.p / ch.n2)


def gpc_secrecy_rate(ch):
    """Best GPC secrecy rate: alpha = 1, beta = 0 when n1 < n2, otherwise zero."""
    if ch.n1 >= ch.n2:
        return 0.0
    return max(0.0, min(gpc_closed_rates(ch, 1.0)))


def spc_secrecy_rate(ch):
    """SPC with V = X ~ N(0, p), U empty: h(X+N1) - h(N1) - h(X+N2) + h(N2)."""
    rate = (
        _h("H(X+N1)", ch.p + ch.n1)
        - _h("H(N1)", ch.n1)
        - _h("H(X+N2)", ch.p + ch.n2)
        + _h("H(N2)", ch.n2)
    )
    return max(0.0, rate)


def gsdwc_capacity(ch):
    """[C(p/n1) - C(p/n2)]^+, independent of the state power."""
    return max(0.0, awgn_capacity(ch.p / ch.n1) - awgn_capacity(ch.p / ch.n2))


def epi_entropy_gap_bound(h_m, n1, n2):
    """EPI lower bound on h(M + N') - h(M) for N' ~ N(0, n2 - n1), in bits."""
    return 0.5 * math.log2(TWO_PI_E * (n2 - n1) + 2.0 ** (2.0 * h_m)) - h_m


def epi_converse_bound(ch):
    """Upper bound on I(X;Y|S) - I(X;Z|S) for the degraded channel n1 <= n2.

    Uses the EPI bound on h(X+N2) - h(X+N1), which increases with h(X+N1)
    and is therefore weakest at the Gaussian maximum h = 1/2 log2(2 pi e (p+n1)).
    """
    if ch.n2 < ch.n1:
        raise DomainError(
            f"converse needs a degraded eavesdropper (n2 >= n1), got n1={ch.n1}, n2={ch.n2}"
        )
    h_m_max = 0.5 * math.log2(TWO_PI_E * (ch.p + ch.n1))
    return 0.5 * math.log2(ch.n2 / ch.n1) - epi_entropy_gap_bound(h_m_max, ch.n1, ch.n2)


def regime_boundary(ch):
    """I(S;Y) = C(q / (p + n1)) at the SDPC parameters."""
    return awgn_capacity(ch.q / (ch.p + ch.n1))


def classify_state_rate(ch, r_s):
    """SPC for r_s up to the boundary (inclusive), GPC above it."""
    if r_s < 0:
        raise DomainError(f"state rate must be >= 0, got {r_s!r}")
    return Regime.SPC if r_s <= regime_boundary(ch) else Regime.GPC


def sdpc_auxiliary(ch):
    """Secure dirty paper coding: V = X + p/(p+n1) S, U empty."""
    return SdpcAuxiliary(ch.p / (ch.p + ch.n1))


def sdpc_params(ch):
    """DpcParams at alpha = 1, beta = 0 with the optimal lambdas."""
    lam = optimal_lambdas(ch, 1.0, 0.0)
    return DpcParams(1.0, 0.0, lam.lambda1, lam.lambda2)


def maximize_re2_over_lambda1(ch, xatol=1e-10):
    """Numerically maximize Re2 over lambda1 in [0, 1] at alpha = 1, beta = 0, lambda2 = 0."""
    def neg(l1):
        return -re2(ch, DpcParams(1.0, 0.0, float(l1), 0.0))

    res = minimize_scalar(neg, bounds=(0.0, 1.0), method="bounded", options={"xatol": xatol})
    # the bounded method never evaluates the endpoints
    best_l, best_v = float(res.x), -float(res.fun)
    for edge in (0.0, 1.0):
        v = -neg(edge)
        if v > best_v:
            best_l, best_v = edge, v
    return best_l, best_v


def power_split_search(ch, step=0.01):
    """Grid search of min(Re1, Re2) over (alpha, beta) at the optimal lambdas.

    Returns (alpha, beta, value); ties go to the smallest (alpha, beta),
    and singular grid points are skipped.
    """
    grid = np.round(np.arange(0.0, 1.0 + step / 2, step), 12)
    best = (0.0, 0.0, -math.inf)
    best_key = None
    for alpha in grid:
        for beta in grid:
            lam = optimal_lambdas(ch, float(alpha), float(beta))
            dp = DpcParams(float(alpha), float(beta), lam.lambda1, lam.lambda2)
            try:
                value = min(dpc_rates(ch, dp))
            except SingularityError:
                continue
            key = round(value, 9)
            if best_key is None or key > best_key:
                best_key, best = key, (float(alpha), float(beta), value)
    return best


SWEEP_COLUMNS = (
    "p", "q", "n1", "n2", "alpha", "beta", "lambda1", "lambda2",
    "re1", "re2", "capacity", "boundary",
)


def sweep_rows(channels, alphas=(1.0,), betas=(0.0,)):
    """Rows for the Gaussian sweep CSV, at the optimal lambdas of each (alpha, beta)."""
    for ch in channels:
        cap, boundary = gsdwc_capacity(ch), regime_boundary(ch)
        for alpha in alphas:
            for beta in betas:
                lam = optimal_lambdas(ch, alpha, beta)
                dp = DpcParams(alpha, beta, lam.lambda1, lam.lambda2)
                try:
                    r1, r2 = dpc_rates(ch, dp)
                except SingularityError:
                    r1 = r2 = float("nan")
                yield (ch.p, ch.q, ch.n1, ch.n2, alpha, beta, dp.lambda1, dp.lambda2,
                       r1, r2, cap, boundary)

import itertools
import math

import numpy as np
import pytest

import gaussian_oracle as oracle
from sdwc.discrete import Regime
from sdwc.errors import DomainError, SingularityError
from sdwc.gaussian import (
    DpcParams,
    GaussianSDWC,
    classify_state_rate,
    dpc_entropies,
    dpc_rates,
    epi_converse_bound,
    gpc_closed_rates,
    gpc_secrecy_rate,
    gsdwc_capacity,
    maximize_re2_over_lambda1,
    optimal_lambdas,
    power_split_search,
    re1,
    re2,
    regime_boundary,
    sdpc_auxiliary,
    sdpc_params,
    spc_secrecy_rate,
    sweep_rows,
)
from sdwc.info import awgn_capacity

LEVELS = (0.5, 1.0, 2.0, 4.0)
C_HALF_GAP = 0.2075187496394219  # C(1) - C(1/2)


def oracle_rates(ch, dp):
    return oracle.rates(ch.p, ch.q, ch.n1, ch.n2, dp.alpha, dp.beta, dp.lambda1, dp.lambda2)


def random_params(rng):
    ch = GaussianSDWC(*rng.uniform(0.2, 5.0, size=4))
    dp = DpcParams(*rng.uniform(0.05, 0.95, size=4))
    return ch, dp


class TestTypes:
    @pytest.mark.parametrize("args", [(-1, 1, 1, 1), (1, -1, 1, 1), (1, 1, 0, 1), (1, 1, 1, 0)])
    def test_channel_domain(self, args):
        with pytest.raises(DomainError):
            GaussianSDWC(*args)

    def test_params_domain(self):
        with pytest.raises(DomainError):
            DpcParams(1.2, 0, 0, 0)


class TestEntropies:
    def test_private_layer_alone(self):
        ch = GaussianSDWC(2.0, 1.0, 1.0, 2.0)
        h = dpc_entropies(ch, DpcParams(1.0, 0.0, 0.0, 0.0))
        assert h.h_v_given_u == pytest.approx(0.5 * math.log2(2 * math.pi * math.e * 2.0), abs=1e-12)

    def test_zero_state_power(self):
        ch = GaussianSDWC(1.0, 0.0, 1.0, 2.0)
        dp = DpcParams(0.7, 0.3, 0.4, 0.2)
        h = dpc_entropies(ch, dp)
        assert np.all(np.isfinite(h))
        assert dpc_rates(ch, dp) == pytest.approx(oracle_rates(ch, dp), abs=1e-9)

    def test_reference_point(self):
        ch = GaussianSDWC(1.0, 1.0, 1.0, 2.0)
        dp = DpcParams(1.0, 0.0, 0.5, 0.0)
        h = dpc_entropies(ch, dp)
        frozen = (
            2.047095585180641, 1.547095585180641, 2.2080596326243223,
            1.547095585180641, 4.88667242072186, 4.433227122917601,
        )
        assert h == pytest.approx(frozen, abs=1e-12)
        assert h == pytest.approx(oracle.entropies(1, 1, 1, 2, 1, 0, 0.5, 0), abs=1e-9)

    def test_entropies_match_oracle(self, rng):
        for _ in range(200):
            ch, dp = random_params(rng)
            h = dpc_entropies(ch, dp)
            ref = oracle.entropies(ch.p, ch.q, ch.n1, ch.n2, dp.alpha, dp.beta, dp.lambda1, dp.lambda2)
            assert h == pytest.approx(ref, abs=1e-9)

    def test_singular_v(self):
        ch = GaussianSDWC(1.0, 1.0, 1.0, 2.0)
        with pytest.raises(SingularityError) as err:
            dpc_entropies(ch, DpcParams(0.0, 0.0, 0.0, 0.5))
        assert err.value.term


class TestRates:
    def test_nothing_sent(self):
        ch = GaussianSDWC(1.0, 1.0, 1.0, 2.0)
        assert dpc_rates(ch, DpcParams(0, 0, 0, 0)) == (0.0, 0.0)

    def test_reference_point(self):
        ch = GaussianSDWC(1.0, 1.0, 1.0, 2.0)
        dp = DpcParams(1.0, 0.0, 0.5, 0.0)
        assert re2(ch, dp) == pytest.approx(C_HALF_GAP, abs=1e-9)
        assert re1(ch, dp) == pytest.approx(0.5, abs=1e-9)
        assert (re1(ch, dp), re2(ch, dp)) == pytest.approx(oracle_rates(ch, dp), abs=1e-9)

    def test_closed_form_matches_oracle(self, rng):
        for _ in range(500):
            ch, dp = random_params(rng)
            assert dpc_rates(ch, dp) == pytest.approx(oracle_rates(ch, dp), abs=1e-9)

    def test_degenerate_u_matches_oracle(self, rng):
        for _ in range(100):
            ch, dp = random_params(rng)
            dp = DpcParams(dp.alpha, 0.0, dp.lambda1, 0.0)
            assert dpc_rates(ch, dp) == pytest.approx(oracle_rates(ch, dp), abs=1e-9)

    def test_u_only(self, rng):
        ch = GaussianSDWC(1.0, 1.0, 1.0, 2.0)
        dp = DpcParams(0.8, 1.0, 0.0, 0.3)
        assert dpc_rates(ch, dp) == pytest.approx(oracle_rates(ch, dp), abs=1e-9)


class TestLambdas:
    def test_examples(self):
        assert optimal_lambdas(GaussianSDWC(1, 1, 1, 2), 1, 0)[:2] == pytest.approx((0.5, 0.0))
        assert optimal_lambdas(GaussianSDWC(1, 1, 1, 2), 0, 0.3)[:2] == (0.0, 0.0)
        assert optimal_lambdas(GaussianSDWC(4, 1, 1, 2), 1, 0)[:2] == pytest.approx((0.8, 0.0))

    def test_numeric_grid_oracle(self):
        ch = GaussianSDWC(4, 1, 1, 2)
        grid = np.round(np.arange(0, 1 + 5e-5, 1e-4), 10)
        vals = [re2(ch, DpcParams(1, 0, float(l), 0)) for l in grid]
        assert grid[int(np.argmax(vals))] == pytest.approx(0.8, abs=1e-4)

    def test_flags(self):
        lam = optimal_lambdas(GaussianSDWC(4.0, 0.1, 0.1, 1.0), 0.5, 0.0)
        assert lam.clamped and lam.lambda1 == 1.0
        assert optimal_lambdas(GaussianSDWC(1.0, 0.0, 1.0, 2.0), 0.5, 0.0).state_free

    def test_stationarity(self):
        h = 1e-5
        for p, q, n1, n2 in itertools.product(LEVELS, repeat=4):
            ch = GaussianSDWC(p, q, n1, n2)
            l1 = optimal_lambdas(ch, 1.0, 0.0).lambda1
            lo = re2(ch, DpcParams(1, 0, l1 - h, 0))
            hi = re2(ch, DpcParams(1, 0, min(1.0, l1 + h), 0))
            assert abs(hi - lo) / (2 * h) < 1e-6

    def test_numeric_maximizer(self):
        for p, q, n1, n2 in [(1, 1, 1, 2), (4, 0.5, 2, 4), (0.5, 4, 0.5, 1)]:
            ch = GaussianSDWC(p, q, n1, n2)
            l1, val = maximize_re2_over_lambda1(ch)
            assert l1 == pytest.approx(p / (p + n1), abs=1e-3)
            assert val == pytest.approx(gsdwc_capacity(ch), abs=1e-6)


class TestClosedRates:
    def test_examples(self):
        assert gpc_closed_rates(GaussianSDWC(1, 1, 1, 2), 0) == (0.0, 0.0)
        assert gpc_closed_rates(GaussianSDWC(1, 1, 1, 2), 1) == pytest.approx((0.5, C_HALF_GAP), abs=1e-12)
        assert gpc_closed_rates(GaussianSDWC(1, 1, 1.5, 1.5), 0.7)[1] == 0.0

    def test_identity_at_beta_zero(self, rng):
        for _ in range(200):
            ch = GaussianSDWC(*rng.uniform(0.2, 5.0, size=4))
            alpha = float(rng.uniform(0.05, 1.0))
            lam = optimal_lambdas(ch, alpha, 0.0)
            if lam.clamped:
                continue
            dp = DpcParams(alpha, 0.0, lam.lambda1, lam.lambda2)
            assert dpc_rates(ch, dp) == pytest.approx(gpc_closed_rates(ch, alpha), abs=1e-9)

    def test_ordering(self):
        for p, q, n1, n2 in itertools.product(LEVELS, repeat=4):
            if n1 < n2:
                ch = GaussianSDWC(p, q, n1, n2)
                r1, r2 = dpc_rates(ch, sdpc_params(ch))
                assert min(r1, r2) == pytest.approx(r2, abs=1e-12)

    def test_decreasing_in_alpha_when_eavesdropper_stronger(self):
        ch = GaussianSDWC(2.0, 1.0, 2.0, 1.0)
        vals = []
        for alpha in np.linspace(0.05, 1.0, 40):
            lam = optimal_lambdas(ch, float(alpha), 0.0)
            vals.append(re2(ch, DpcParams(float(alpha), 0.0, lam.lambda1, lam.lambda2)))
        assert np.all(np.diff(vals) < 0)


class TestSecrecyRates:
    def test_examples(self):
        for fn in (gpc_secrecy_rate, spc_secrecy_rate, gsdwc_capacity):
            assert fn(GaussianSDWC(1, 1, 2, 1)) == 0
            assert fn(GaussianSDWC(0, 1, 1, 2)) == 0
            assert fn(GaussianSDWC(1, 1, 1, 2)) == pytest.approx(C_HALF_GAP, abs=1e-12)

    def test_capacity_ignores_q(self):
        for q in (0.0, 1.0, 5.0):
            ch = GaussianSDWC(1, q, 1, 2)
            assert gsdwc_capacity(ch) == pytest.approx(C_HALF_GAP, abs=1e-12)
            assert re2(ch, sdpc_params(ch)) == pytest.approx(C_HALF_GAP, abs=1e-9)
        assert gsdwc_capacity(GaussianSDWC(1, 1, 1, 1)) == 0

    def test_converse_examples(self):
        assert epi_converse_bound(GaussianSDWC(1, 1, 1, 1)) == pytest.approx(0, abs=1e-15)
        assert epi_converse_bound(GaussianSDWC(1, 1, 1, 2)) == pytest.approx(C_HALF_GAP, abs=1e-12)
        assert epi_converse_bound(GaussianSDWC(1e-9, 1, 1, 2)) < 1e-9
        with pytest.raises(DomainError):
            epi_converse_bound(GaussianSDWC(1, 1, 2, 1))

    def test_closure(self):
        for p, q, n1, n2 in itertools.product(LEVELS, repeat=4):
            ch = GaussianSDWC(p, q, n1, n2)
            vals = [gpc_secrecy_rate(ch), spc_secrecy_rate(ch), gsdwc_capacity(ch)]
            if n1 <= n2:
                vals.append(epi_converse_bound(ch))
            else:
                assert vals == [0.0, 0.0, 0.0]
            assert max(vals) - min(vals) <= 1e-12

    def test_power_split_grid(self):
        for p, q, n1, n2 in [(1, 1, 1, 2), (2, 0.5, 1, 4), (4, 2, 0.5, 1)]:
            ch = GaussianSDWC(p, q, n1, n2)
            alpha, beta, value = power_split_search(ch, step=0.05)
            assert alpha >= 1 - 0.05 and beta <= 0.05
            assert value == pytest.approx(gpc_secrecy_rate(ch), abs=1e-9)


class TestRegime:
    def test_examples(self):
        assert regime_boundary(GaussianSDWC(1, 0, 1, 2)) == 0
        ch = GaussianSDWC(1, 1, 1, 2)
        assert regime_boundary(ch) == pytest.approx(0.2924812503605781, abs=1e-12)
        assert regime_boundary(ch) == pytest.approx(0.5 * math.log2(3 / 2), abs=1e-12)

    def test_monotone_in_q(self):
        qs = np.geomspace(1e-3, 1e6, 60)
        vals = [regime_boundary(GaussianSDWC(1, q, 1, 2)) for q in qs]
        assert np.all(np.diff(vals) > 0)
        assert vals[-1] > 9

    def test_classify(self):
        ch = GaussianSDWC(1, 1, 1, 2)
        b = regime_boundary(ch)
        assert classify_state_rate(ch, 0.0) is Regime.SPC
        assert classify_state_rate(ch, b) is Regime.SPC
        assert classify_state_rate(ch, b + 1e-6) is Regime.GPC
        with pytest.raises(DomainError):
            classify_state_rate(ch, -1)


class TestSdpc:
    def test_examples(self):
        assert sdpc_auxiliary(GaussianSDWC(1, 1, 1, 2)).coefficient == 0.5
        assert sdpc_auxiliary(GaussianSDWC(0, 1, 1, 2)).coefficient == 0
        assert sdpc_auxiliary(GaussianSDWC(3, 1, 1, 2)).coefficient == pytest.approx(0.75)
        assert sdpc_auxiliary(GaussianSDWC(3, 1, 1, 2)).u_degenerate

    def test_matches_lambda(self):
        for p, q, n1, n2 in itertools.product(LEVELS, repeat=4):
            ch = GaussianSDWC(p, q, n1, n2)
            assert sdpc_auxiliary(ch).coefficient == pytest.approx(
                optimal_lambdas(ch, 1, 0).lambda1, abs=1e-15
            )

    def test_numeric_oracle(self):
        l1, _ = maximize_re2_over_lambda1(GaussianSDWC(3, 1, 1, 2))
        assert l1 == pytest.approx(0.75, abs=1e-4)


def test_sweep_rows():
    rows = list(sweep_rows([GaussianSDWC(1, 1, 1, 2)], alphas=(0.5, 1.0)))
    assert len(rows) == 2
    assert rows[1][8:] == pytest.approx((0.5, C_HALF_GAP, C_HALF_GAP, awgn_capacity(0.5)), abs=1e-9)

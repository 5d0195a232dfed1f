"""Policy builders shared by the test modules."""

import numpy as np

from sdwc.discrete import AuxiliaryPolicy, DiscreteSDWC


def v_equals_x(card_s, bias=0.5):
    """V = X ~ Bernoulli(bias) independent of S, U degenerate."""
    return AuxiliaryPolicy.from_x_given_s(np.tile([1 - bias, bias], (card_s, 1)))


def u_equals_s():
    """Binary U = S, V = X uniform and independent of (U, S)."""
    uv = np.zeros((2, 2, 2))
    for s in range(2):
        uv[s, s, :] = 0.5
    xm = np.zeros((2, 2, 2, 2))
    for v in range(2):
        xm[:, v, :, v] = 1.0
    return AuxiliaryPolicy(uv, xm)


def xor_precoder():
    """U uniform independent of S, V degenerate, X = U xor S."""
    uv = np.full((2, 2, 1), 0.5)
    xm = np.zeros((2, 1, 2, 2))
    for u in range(2):
        for s in range(2):
            xm[u, 0, s, u ^ s] = 1.0
    return AuxiliaryPolicy(uv, xm)


def random_policy(rng, card_s, card_x, card_u, card_v, alpha=0.7):
    uv = rng.dirichlet(np.full(card_u * card_v, alpha), size=card_s)
    xm = rng.dirichlet(np.full(card_x, alpha), size=(card_u, card_v, card_s))
    return AuxiliaryPolicy(uv.reshape(card_s, card_u, card_v), xm)


def random_channel(rng, card_x=2, card_s=2, card_y=2, card_z=2, alpha=0.7):
    prior = rng.dirichlet(np.full(card_s, 1.0))
    law = rng.dirichlet(np.full(card_y * card_z, alpha), size=(card_x, card_s))
    return DiscreteSDWC(prior, law.reshape(card_x, card_s, card_y, card_z))


def random_degraded_channel(rng, card_s=2, alpha=0.7):
    """Binary channel with Z drawn from Y through a further channel."""
    prior = rng.dirichlet(np.ones(card_s))
    y_law = rng.dirichlet(np.full(2, alpha), size=(2, card_s))
    z_given_y = rng.dirichlet(np.full(2, alpha), size=2)
    law = y_law[..., :, None] * z_given_y[None, None]
    return DiscreteSDWC(prior, law)


def with_z_equal_y(ch):
    """Same main channel, eavesdropper output identical to Y."""
    y_law = ch.law.sum(axis=3)
    law = np.zeros(ch.law.shape[:3] + (ch.card_y,))
    for y in range(ch.card_y):
        law[:, :, y, y] = y_law[:, :, y]
    return DiscreteSDWC(ch.state_prior, law)

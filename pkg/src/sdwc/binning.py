"""Small-blocklength random binning on the binary state-dependent wiretap channel.

Channel (per symbol):  y = x ^ s ^ e1,  z = x ^ s ^ e2  with e1 ~ B(n1),
e2 ~ B(n2), s ~ B(q).

The code is the U-empty, V = X scheme: a message w picks a bin, a uniform
randomization index picks a codeword c inside it, and the encoder sends
x = c ^ s.  The state then cancels at both receivers, y = c ^ e1 and
z ^ s = c ^ e2.

Equivocation.  The eavesdropper sees (z, s).  Because c and e2 are drawn
independently of s, the pair (z ^ s, s) is a one-to-one image of (z, s)
and s is independent of (w, z ^ s).  Hence

    H(W | Z^n, S^n) = H(W | Z^n ^ S^n, S^n) = H(W | C ^ E2),

which is evaluated exactly by summing over the 2^n values of C ^ E2.

Codewords are stored as n-bit integers, bit i holding symbol i.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from .errors import SizeError, ValidationError
from .info import binary_entropy, check_probability, max_cells

MAX_EXACT_N = 14
RESULT_COLUMNS = (
    "n", "rate_r", "rate_rand", "n1", "n2", "q", "seed",
    "p_e", "equivocation_rate", "secrecy_ratio",
)


@dataclass(frozen=True)
class SimConfig:
    """One simulation: blocklength, rates (bits/use), channel, trials and seed.

    Bin count and bin size are ``floor(2^(n*rate))``, so the realized rates
    never exceed the nominal ones.
    """

    n: int
    rate_r: float
    rate_rand: float
    n1: float
    n2: float
    q: float = 0.0
    trials: int = 2000
    seed: int = 0
    injective: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("blocklength must be >= 1")
        if self.n > MAX_EXACT_N:
            raise SizeError(f"blocklength {self.n} exceeds the enumeration cap {MAX_EXACT_N}")
        if self.rate_r < 0 or self.rate_rand < 0:
            raise ValidationError("rates must be >= 0")
        for name in ("n1", "n2", "q"):
            check_probability(name, getattr(self, name))
        if self.trials < 1:
            raise ValidationError("trials must be >= 1")
        if self.injective and self.n_bins * self.bin_size > 2**self.n:
            raise ValidationError(
                f"{self.n_bins * self.bin_size} distinct codewords do not fit in {2**self.n}"
            )

    @property
    def n_bins(self):
        return _count(self.n * self.rate_r)

    @property
    def bin_size(self):
        return _count(self.n * self.rate_rand)


def _count(bits):
    # guard against 2**3.0000000001 style round-off just below an integer
    return max(1, int(math.floor(2.0**bits + 1e-9)))


def default_rate_rand(n2, margin=0.05):
    """Randomization rate just below the eavesdropper's capacity 1 - H(n2)."""
    return max(0.0, 1.0 - binary_entropy(n2) - margin)


@dataclass(frozen=True)
class Codebook:
    """``words[w, r]`` is codeword r of bin w, as an n-bit integer."""

    n: int
    words: np.ndarray

    def __post_init__(self):
        words = np.array(self.words, dtype=np.int64)
        if words.ndim != 2 or words.size == 0:
            raise ValidationError("codebook needs shape (bins, bin_size)")
        if np.any(words < 0) or np.any(words >= 2**self.n):
            raise ValidationError(f"codewords must be {self.n}-bit integers")
        words.setflags(write=False)
        object.__setattr__(self, "words", words)

    @property
    def n_bins(self):
        return self.words.shape[0]

    @property
    def bin_size(self):
        return self.words.shape[1]

    @property
    def rate(self):
        return math.log2(self.n_bins) / self.n

    def is_injective(self):
        return np.unique(self.words).size == self.words.size

    def codeword(self, w, r):
        if not (0 <= w < self.n_bins and 0 <= r < self.bin_size):
            raise ValidationError(
                f"index ({w}, {r}) outside {self.n_bins} bins x {self.bin_size} words"
            )
        return to_bits(int(self.words[w, r]), self.n)


def to_bits(value, n):
    return ((int(value) >> np.arange(n)) & 1).astype(np.uint8)


def from_bits(bits):
    bits = np.asarray(bits, dtype=np.int64)
    return (bits << np.arange(bits.shape[-1])).sum(axis=-1)


def _streams(seed):
    """Independent generators for codebook, messages, state and noise."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(4)]


def generate_codebook(cfg, seed=None):
    """i.i.d. Bernoulli(1/2) codebook of ``cfg.n_bins`` x ``cfg.bin_size`` words."""
    cells = cfg.n_bins * cfg.bin_size
    if cells > max_cells():
        raise SizeError(f"codebook needs {cells} words, cap is {max_cells()}")
    rng = _streams(cfg.seed if seed is None else seed)[0]
    shape = (cfg.n_bins, cfg.bin_size)
    if cfg.injective:
        words = rng.choice(2**cfg.n, size=cells, replace=False).reshape(shape)
    else:
        words = rng.integers(0, 2**cfg.n, size=shape)
    return Codebook(cfg.n, words)


def encode(cb, w, s_n, rand_index):
    """x = codeword(w, rand_index) XOR s."""
    s_n = np.asarray(s_n, dtype=np.uint8)
    if s_n.shape != (cb.n,):
        raise ValidationError(f"state sequence must have length {cb.n}")
    return cb.codeword(w, rand_index) ^ s_n


def transmit(x_n, s_n, n1, n2, rng):
    """Pass x through both binary channels; returns (y, z)."""
    x_n = np.asarray(x_n, dtype=np.uint8)
    s_n = np.asarray(s_n, dtype=np.uint8)
    e1 = (rng.random(x_n.shape) < n1).astype(np.uint8)
    e2 = (rng.random(x_n.shape) < n2).astype(np.uint8)
    return x_n ^ s_n ^ e1, x_n ^ s_n ^ e2


def _distances(cb, obs):
    """Hamming distance between each observation and every codeword, (B, M*L)."""
    obs = np.atleast_1d(np.asarray(obs, dtype=np.int64))
    return np.bitwise_count(obs[:, None] ^ cb.words.ravel()[None, :]).astype(np.int64)


def _map_flat(cb, y_ints, n1):
    d = _distances(cb, y_ints)
    if n1 < 0.5:
        return np.argmin(d, axis=1)
    if n1 > 0.5:
        return np.argmax(d, axis=1)
    return np.zeros(d.shape[0], dtype=np.int64)


def decode_map(cb, y_n, s_n, n1):
    """MAP codeword for the main-channel output; returns (w_hat, rand_hat).

    The precoder already removed the state, so y = c ^ e1 and ``s_n`` is
    not needed.  Under uniform codeword priors MAP is minimum Hamming
    distance for n1 < 1/2; ties go to the smallest (bin, index).
    """
    del s_n
    flat = int(_map_flat(cb, from_bits(y_n), n1)[0])
    return divmod(flat, cb.bin_size)


def _bsc_likelihood(d, n, p):
    """p^d (1-p)^(n-d), exact for p in {0, 1/2, 1}."""
    if p == 0.5:
        return np.full(d.shape, 0.5**n)
    return np.power(p, d) * np.power(1.0 - p, n - d)


def _posterior_entropy(lik):
    """Entropy of each row of unnormalized likelihoods.

    Rows whose non-zero entries are all equal are evaluated as log2(count),
    so uniform and one-hot posteriors come out exact.
    """
    total = lik.sum(axis=1, keepdims=True)
    post = np.divide(lik, total, out=np.zeros_like(lik), where=total > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(post > 0, -post * np.log2(post), 0.0)
    h = terms.sum(axis=1)
    nz = lik > 0
    row_max = lik.max(axis=1, keepdims=True)
    uniform = np.all(~nz | (lik == row_max), axis=1)
    h[uniform] = np.log2(np.maximum(nz.sum(axis=1), 1))[uniform]
    return h


def exact_equivocation(cb, n2):
    """H(W | Z^n, S^n) / n in bits per use, for uniform messages and bin indices."""
    n = cb.n
    if n > MAX_EXACT_N:
        raise SizeError(f"blocklength {n} exceeds the enumeration cap {MAX_EXACT_N}")
    m, l = cb.n_bins, cb.bin_size
    chunk = max(1, max_cells() // (m * l))
    terms = []
    for start in range(0, 2**n, chunk):
        obs = np.arange(start, min(2**n, start + chunk))
        lik = _bsc_likelihood(_distances(cb, obs), n, n2).reshape(-1, m, l)
        p_o_given_w = lik.sum(axis=2) / l
        p_o = p_o_given_w.sum(axis=1) / m
        terms.extend((p_o * _posterior_entropy(p_o_given_w)).tolist())
    return math.fsum(terms) / n


def exact_error_probability(cb, n1):
    """Exact message error probability of the MAP decoder, over all 2^n noise patterns."""
    n = cb.n
    if n > MAX_EXACT_N:
        raise SizeError(f"blocklength {n} exceeds the enumeration cap {MAX_EXACT_N}")
    noise = np.arange(2**n, dtype=np.int64)
    weight = _bsc_likelihood(np.bitwise_count(noise).astype(np.int64), n, n1)
    errs = []
    for w in range(cb.n_bins):
        for r in range(cb.bin_size):
            w_hat = _map_flat(cb, cb.words[w, r] ^ noise, n1) // cb.bin_size
            errs.append(math.fsum(weight[w_hat != w].tolist()))
    return math.fsum(errs) / cb.words.size


@dataclass(frozen=True)
class SimResult:
    """Monte Carlo error rate and exact equivocation of one codebook.

    ``secrecy_ratio`` divides by the realized message rate log2(M)/n (1 when
    there is a single message).
    """

    p_e: float
    equivocation_rate: float
    secrecy_ratio: float
    rate_effective: float
    n_bins: int
    bin_size: int

    def as_dict(self):
        return asdict(self)


def run_experiment(cfg):
    """Simulate ``cfg.trials`` transmissions over one seeded codebook.

    Codebook, messages, state and noise use separate random streams, so
    changing ``q`` alters only the state draws, which the precoder cancels.
    """
    _, rng_msg, rng_state, rng_noise = _streams(cfg.seed)
    cb = generate_codebook(cfg)
    t, n = cfg.trials, cfg.n
    w = rng_msg.integers(0, cb.n_bins, size=t)
    r = rng_msg.integers(0, cb.bin_size, size=t)
    s = from_bits(rng_state.random((t, n)) < cfg.q)
    e1 = from_bits(rng_noise.random((t, n)) < cfg.n1)
    e2 = from_bits(rng_noise.random((t, n)) < cfg.n2)
    x = cb.words[w, r] ^ s
    y = x ^ s ^ e1
    # e2 is drawn to keep the noise stream layout fixed; leakage is computed exactly
    del e2
    chunk = max(1, max_cells() // cb.words.size)
    w_hat = np.concatenate(
        [_map_flat(cb, y[i:i + chunk], cfg.n1) // cb.bin_size for i in range(0, t, chunk)]
    )
    p_e = float(np.count_nonzero(w_hat != w)) / t
    eq = exact_equivocation(cb, cfg.n2)
    rate = cb.rate
    ratio = eq / rate if cb.n_bins > 1 else 1.0
    return SimResult(p_e, eq, ratio, rate, cb.n_bins, cb.bin_size)


def codebook_seed(seed, index):
    """Seed of the index-th codebook in a seed-averaged run."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1, np.uint64)[0])


def _run_one(cfg):
    return run_experiment(cfg)


def seed_averaged(cfg, n_codebooks=20, workers=None):
    """Average p_e and secrecy ratio over independently seeded codebooks.

    Returns (mean p_e, mean equivocation rate, mean secrecy ratio, results).
    Results are ordered by codebook index whatever the worker count.
    """
    cfgs = [replace(cfg, seed=codebook_seed(cfg.seed, i)) for i in range(n_codebooks)]
    if workers and workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_run_one, cfgs))
    else:
        results = [run_experiment(c) for c in cfgs]
    mean = lambda xs: math.fsum(xs) / len(xs)
    return (
        mean([res.p_e for res in results]),
        mean([res.equivocation_rate for res in results]),
        mean([res.secrecy_ratio for res in results]),
        results,
    )


def result_row(cfg, res):
    return (cfg.n, cfg.rate_r, cfg.rate_rand, cfg.n1, cfg.n2, cfg.q, cfg.seed,
            res.p_e, res.equivocation_rate, res.secrecy_ratio)

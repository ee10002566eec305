import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def channel_entries(channel):
    """{(secret label, observable label): probability} for label-based compares."""
    out = {}
    for i, s in enumerate(channel.secret_alphabet):
        for j, o in enumerate(channel.observable_alphabet):
            out[(s, o)] = channel.matrix[i, j]
    return out


def max_entry_deviation(chan_a, chan_b):
    """Largest |p_a - p_b| over the union of (secret, observable) labels."""
    a = channel_entries(chan_a)
    b = channel_entries(chan_b)
    return max(abs(a.get(key, 0.0) - b.get(key, 0.0)) for key in set(a) | set(b))


def random_channel(rng, n_secrets, n_observables):
    from leakmeter import Channel

    matrix = rng.random((n_secrets, n_observables)) + 1e-3
    matrix /= matrix.sum(axis=1, keepdims=True)
    secrets = tuple(f"s{i}" for i in range(n_secrets))
    observables = tuple(f"o{j}" for j in range(n_observables))
    return Channel(secrets, observables, matrix)


def random_row_symmetric_channel(rng, n):
    """Random rows-are-permutations channel on which the uniform input is optimal.

    Cyclic shifts of a random row (then a random relabeling of secrets and
    observables) keep the rows permutations of each other and the column
    sums equal, so the symmetric shortcut provably applies. Arbitrary
    per-row permutations would not guarantee that.
    """
    from leakmeter import Channel

    row = rng.random(n) + 1e-3
    row /= row.sum()
    matrix = np.stack([np.roll(row, shift) for shift in range(n)])
    matrix = matrix[rng.permutation(n)][:, rng.permutation(n)]
    secrets = tuple(f"s{i}" for i in range(n))
    observables = tuple(f"o{j}" for j in range(n))
    return Channel(secrets, observables, matrix)

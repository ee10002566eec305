"""Exact channel matrices and capacities for the two case-study protocols.

These give the ground-truth curves that the statistical estimates are judged
against: the dining-cryptographers channel by exhaustive enumeration of all
coin outcomes, the crowds channel by absorption analysis of the forwarding
Markov chain. Labels match the simulators' trace tokens, so oracle rows can
be compared entrywise with empirically learned channels.
"""

from __future__ import annotations

import itertools

import numpy as np

from .channel import Channel, CapacityResult, capacity


def oracle_dc_channel(k: int, bias: float) -> Channel:
    """Exact p(announcements | payer) for the dining-cryptographers ring.

    Enumerates all 2**k coin vectors, weighting each by
    bias**heads * (1-bias)**tails, and accumulates the announcement vector
    a_i = pay_bit(i) XOR coin(i) XOR coin((i+1) mod k), the same rule the
    simulator applies. Columns are the 2**(k-1) odd-parity announcement
    vectors; every other vector has exact probability 0 and is omitted.
    """
    if k < 3:
        raise ValueError("k must be at least 3")
    if not 0.0 <= bias <= 1.0:
        raise ValueError("bias must lie in [0, 1]")

    observables = [
        combo
        for combo in itertools.product("01", repeat=k)
        if sum(map(int, combo)) % 2 == 1
    ]
    col_index = {combo: i for i, combo in enumerate(observables)}
    matrix = np.zeros((k, len(observables)))
    for coins in range(1 << k):
        heads = bin(coins).count("1")
        weight = bias**heads * (1.0 - bias) ** (k - heads)
        if weight == 0.0:
            continue
        diffs = [
            ((coins >> i) & 1) ^ ((coins >> ((i + 1) % k)) & 1) for i in range(k)
        ]
        for payer in range(k):
            ann = tuple(
                str((1 if i == payer else 0) ^ diffs[i]) for i in range(k)
            )
            matrix[payer, col_index[ann]] += weight
    secrets = tuple(str(i) for i in range(k))
    return Channel(secrets, tuple(observables), matrix)


def _crowds_reduced(honest: int, corrupt: int, pf: float):
    """Detection probabilities by symmetry: two unknowns instead of n**2.

    f_self: P(eventually absorbed by a corrupt member with the *current*
    holder recorded), f_other: same for one fixed other honest member. From
    a holder, one step detects with probability pf*c/m, moves to each honest
    member with probability pf/m, and delivers (ending undetected) with
    probability 1-pf.
    """
    n, c = honest, corrupt
    m = n + c
    denom_other = m - pf * (n - 1)  # >= c + 1 > 0 for pf <= 1
    f_self = (pf * c / m) / (1.0 - pf / m - pf * pf * (n - 1) / (m * denom_other))
    f_other = f_self * pf / denom_other
    # First hop from the initiator is an unconditional forward.
    walk = f_self / m + (n - 1) * f_other / m
    u = c / m + walk  # detected with predecessor == initiator
    v = walk if n > 1 else 0.0  # detected with predecessor == a fixed other
    # walk happens to equal v because hitting any fixed target honest member
    # first costs 1/m (then f_self) and the remaining n-1 starts cost f_other
    return u, v


def _crowds_full_solve(honest: int, corrupt: int, pf: float) -> np.ndarray:
    """Absorption probabilities from the explicit Markov chain, unreduced.

    Transient states: message held by honest member h. Absorbing states:
    detected-with-predecessor-h for each h, plus delivery. Solves
    (I - Q) B = R for the absorption matrix, then prepends the initiator's
    first hop. Returns the unnormalized detection matrix rows
    P(detected = g, detection | initiator = i).
    """
    n, c = honest, corrupt
    m = n + c
    q = np.full((n, n), pf / m)
    r = np.eye(n) * (pf * c / m)  # detection from holder h records h
    absorb = np.linalg.solve(np.eye(n) - q, r)
    rows = np.empty((n, n))
    for i in range(n):
        row = np.zeros(n)
        row[i] += c / m  # first hop straight to a corrupt member
        row += absorb.sum(axis=0) / m  # first hop to any honest holder
        rows[i] = row
    return rows


def oracle_crowds_channel(honest: int, corrupt: int, pf: float) -> Channel:
    """Exact p(detected | initiator, detection) for the crowds protocol.

    Uses the symmetry-reduced closed form (only two distinct row values:
    predecessor equal to the initiator or not); for honest <= 12 the full
    linear solve is run as well and must agree to 1e-9. pf = 1 is fine:
    nothing is ever delivered but every step may still reach a corrupt
    member, so detection probabilities sum to 1.
    """
    if honest < 2:
        raise ValueError("honest must be at least 2")
    if corrupt < 1:
        raise ValueError("corrupt must be at least 1")
    if not 0.0 <= pf <= 1.0:
        raise ValueError("pf must lie in [0, 1]")
    u, v = _crowds_reduced(honest, corrupt, pf)
    p_det = u + (honest - 1) * v
    self_p = u / p_det
    other_p = v / p_det
    matrix = np.full((honest, honest), other_p)
    np.fill_diagonal(matrix, self_p)

    if honest <= 12:
        rows = _crowds_full_solve(honest, corrupt, pf)
        full = rows / rows.sum(axis=1, keepdims=True)
        if not np.allclose(full, matrix, atol=1e-9):
            raise RuntimeError(
                "crowds symmetry reduction disagrees with the full linear solve"
            )

    labels = tuple(str(i) for i in range(honest))
    return Channel(labels, labels, matrix)


def oracle_capacity(channel: Channel) -> CapacityResult:
    """Exact capacity of an oracle channel (auto solver dispatch)."""
    return capacity(channel, method="auto")

"""Discrete memoryless channel model and capacity solvers.

A channel is the conditional distribution p(observable | secret) of a
randomized protocol, as a row-stochastic matrix. Capacity (the worst-case
leakage in bits, max over input distributions of I(secret; observable)) is
computed one of two ways:

* ``symmetric_capacity``: when the rows are permutations of one another the
  uniform input is maximizing and capacity reduces to H(output under uniform
  input) minus the entropy of any single row. Exact and non-iterative.
* ``arimoto_blahut``: alternating maximization over the posterior
  p(secret | observable) and the input p(secret), for arbitrary channels.

``capacity`` dispatches between the two (``auto`` detects row symmetry).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .infotheory import (
    DiscreteDistribution,
    InvalidDistributionError,
    JointDistribution,
    entropy_of_probs,
)

ROW_SUM_TOLERANCE = 1e-9
SYMMETRY_TOLERANCE = 1e-6
DEFAULT_AB_TOLERANCE = 1e-9
DEFAULT_MAX_ITER = 10000

# AB input weights below this are treated as exact zeros and renormalized away
UNDERFLOW_CLAMP = 1e-300


class NotRowSymmetricError(ValueError):
    """symmetric_capacity was asked to solve a non-row-symmetric channel."""


@dataclass(frozen=True)
class Channel:
    """Row-stochastic conditional matrix p(observable | secret)."""

    secret_alphabet: tuple
    observable_alphabet: tuple
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "secret_alphabet", tuple(self.secret_alphabet))
        object.__setattr__(
            self, "observable_alphabet", tuple(self.observable_alphabet)
        )
        if not self.secret_alphabet or not self.observable_alphabet:
            raise InvalidDistributionError("channel alphabets must be non-empty")
        if len(set(self.secret_alphabet)) != len(self.secret_alphabet):
            raise InvalidDistributionError("secret labels are not unique")
        if len(set(self.observable_alphabet)) != len(self.observable_alphabet):
            raise InvalidDistributionError("observable labels are not unique")
        matrix = np.asarray(self.matrix, dtype=np.float64)
        if matrix.shape != (len(self.secret_alphabet), len(self.observable_alphabet)):
            raise InvalidDistributionError("channel matrix shape mismatch")
        if not np.all(np.isfinite(matrix)):
            raise InvalidDistributionError("channel matrix has non-finite entries")
        if np.any(matrix < 0) or np.any(matrix > 1 + ROW_SUM_TOLERANCE):
            raise InvalidDistributionError("channel entries must lie in [0, 1]")
        sums = matrix.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > ROW_SUM_TOLERANCE):
            worst = float(np.abs(sums - 1.0).max())
            raise InvalidDistributionError(
                f"channel rows must sum to 1 within {ROW_SUM_TOLERANCE} "
                f"(worst deviation {worst:g})"
            )
        matrix = matrix / sums[:, None]
        matrix.flags.writeable = False
        object.__setattr__(self, "matrix", matrix)

    @property
    def n_secrets(self) -> int:
        return len(self.secret_alphabet)

    @property
    def n_observables(self) -> int:
        return len(self.observable_alphabet)


@dataclass(frozen=True)
class CapacityResult:
    """Capacity value plus the achieving input distribution and diagnostics.

    ``history`` holds the mutual-information value (bits) of each input
    iterate, starting with the initial one; for the symmetric solver it is
    the single exact value.
    """

    capacity_bits: float
    input_distribution: DiscreteDistribution
    iterations: int
    converged: bool
    method: str
    history: tuple = ()


def channel_to_dict(channel: Channel) -> dict:
    """JSON-ready form: tuples become arrays (lists)."""

    def enc(label):
        return list(label) if isinstance(label, tuple) else label

    return {
        "secrets": [enc(s) for s in channel.secret_alphabet],
        "observables": [enc(o) for o in channel.observable_alphabet],
        "matrix": [[float(x) for x in row] for row in channel.matrix],
    }


def channel_from_dict(data: dict) -> Channel:
    def dec(label):
        return tuple(label) if isinstance(label, list) else label

    try:
        secrets = [dec(s) for s in data["secrets"]]
        observables = [dec(o) for o in data["observables"]]
        matrix = data["matrix"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed channel JSON: {exc}") from exc
    return Channel(tuple(secrets), tuple(observables), np.asarray(matrix))


def save_channel(channel: Channel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(channel_to_dict(channel), fh, indent=2)
        fh.write("\n")


def load_channel(path) -> Channel:
    with open(path, "r", encoding="utf-8") as fh:
        return channel_from_dict(json.load(fh))


def joint_from(channel: Channel, input_dist: DiscreteDistribution) -> JointDistribution:
    """Joint p(s, o) = p(s) * p(o|s) for a given input distribution."""
    if input_dist.alphabet != channel.secret_alphabet:
        raise InvalidDistributionError(
            "input distribution alphabet does not match the channel secrets"
        )
    probs = input_dist.probs[:, None] * channel.matrix
    return JointDistribution(
        channel.secret_alphabet, channel.observable_alphabet, probs
    )


def is_row_symmetric(channel: Channel, tol: float = SYMMETRY_TOLERANCE) -> bool:
    """True when every row is a permutation of every other row, within tol."""
    sorted_rows = np.sort(channel.matrix, axis=1)
    return bool(np.all(np.abs(sorted_rows - sorted_rows[0]) <= tol))


def _live_columns(matrix: np.ndarray) -> np.ndarray:
    """Drop observables that no secret ever emits; they carry no information."""
    keep = matrix.sum(axis=0) > 0
    return matrix if keep.all() else matrix[:, keep]


def _uniform_input_is_optimal(matrix: np.ndarray, tol: float = 1e-9) -> bool:
    """Certificate that the uniform input achieves capacity.

    The input p maximizes I iff D(row_s || output(p)) is the same for every
    secret in p's support. Rows being permutations of each other does not by
    itself put the channel in this class (it holds for the protocol channels
    via their relabeling symmetry, and for any channel with equal column
    sums), so ``auto`` checks before trusting the shortcut.
    """
    out = matrix.mean(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(matrix > 0, matrix / np.where(out > 0, out, 1.0), 1.0)
        d = np.where(matrix > 0, matrix * np.log2(ratio), 0.0).sum(axis=1)
    return float(d.max() - d.min()) <= tol


def _mutual_information_bits(p: np.ndarray, matrix: np.ndarray) -> float:
    """I(S;O) in bits for input p and channel matrix, zeros skipped."""
    p_out = p @ matrix
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(matrix > 0, matrix / np.where(p_out > 0, p_out, 1.0), 1.0)
        terms = np.where(matrix > 0, matrix * np.log2(ratio), 0.0)
    return max(0.0, float(p @ terms.sum(axis=1)))


def symmetric_capacity(
    channel: Channel, tol: float = SYMMETRY_TOLERANCE
) -> CapacityResult:
    """Capacity of a row-symmetric channel: H(output at uniform input) - H(row).

    The uniform input achieves the maximum, so no optimization is run.
    Raises NotRowSymmetricError otherwise; callers wanting a fallback should
    use ``capacity(..., method="auto")``.
    """
    if not is_row_symmetric(channel, tol):
        raise NotRowSymmetricError(
            "channel rows are not permutations of each other; "
            "use the arimoto_blahut solver"
        )
    matrix = _live_columns(channel.matrix)
    output = matrix.mean(axis=0)
    cap = max(0.0, entropy_of_probs(output) - entropy_of_probs(matrix[0]))
    uniform = DiscreteDistribution.uniform(channel.secret_alphabet)
    return CapacityResult(cap, uniform, 0, True, "symmetric", (cap,))


def arimoto_blahut(
    channel: Channel,
    tol: float = DEFAULT_AB_TOLERANCE,
    max_iter: int = DEFAULT_MAX_ITER,
    initial: DiscreteDistribution | None = None,
) -> CapacityResult:
    """Capacity by alternating maximization.

    Each iteration updates the posterior q(s|o) = p(s) p(o|s) / sum_s' p(s')
    p(o|s'), then the input p(s) proportionally to the product over o of
    q(s|o) ** p(o|s). The product is evaluated in the log domain
    (sum_o p(o|s) * log q(s|o)) to avoid underflow; the initial input is
    uniform unless ``initial`` is given. Iteration stops when successive
    mutual-information values differ by less than ``tol``; hitting
    ``max_iter`` first is reported via ``converged=False``, with the best
    iterate still returned.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    matrix = _live_columns(channel.matrix)
    m = matrix.shape[0]
    if initial is None:
        p = np.full(m, 1.0 / m)
    else:
        if initial.alphabet != channel.secret_alphabet:
            raise InvalidDistributionError(
                "initial input alphabet does not match the channel secrets"
            )
        p = initial.probs.copy()

    history = [_mutual_information_bits(p, matrix)]
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        p_out = p @ matrix
        q = (p[:, None] * matrix) / np.where(p_out > 0, p_out, 1.0)[None, :]
        # log-domain product: sum_o p(o|s) log q(s|o); a zero posterior with
        # positive channel mass sends the whole product to zero
        log_q = np.log(np.where(q > 0, q, 1.0))
        exponent = (matrix * log_q).sum(axis=1)
        finite = ~((matrix > 0) & (q <= 0)).any(axis=1)
        if not finite.any():  # defensive; cannot happen for a valid channel
            break
        shifted = exponent - exponent[finite].max()
        weights = np.where(finite, np.exp(np.minimum(shifted, 0.0)), 0.0)
        weights[weights < UNDERFLOW_CLAMP] = 0.0
        p = weights / weights.sum()
        history.append(_mutual_information_bits(p, matrix))
        if abs(history[-1] - history[-2]) < tol:
            converged = True
            break

    return CapacityResult(
        max(0.0, history[-1]),
        DiscreteDistribution(channel.secret_alphabet, p),
        iterations,
        converged,
        "arimoto_blahut",
        tuple(history),
    )


def capacity(
    channel: Channel,
    method: str = "auto",
    tol: float = DEFAULT_AB_TOLERANCE,
    max_iter: int = DEFAULT_MAX_ITER,
) -> CapacityResult:
    """Channel capacity in bits via the requested solver.

    ``auto`` takes the exact symmetric shortcut when the rows are
    permutations of each other (detected within SYMMETRY_TOLERANCE) and the
    uniform input is certified optimal, and falls back to Arimoto-Blahut
    otherwise. Without the certificate the shortcut can understate the
    capacity of row-permutation channels that lack a transitive relabeling
    symmetry, which would break the I(input) <= capacity guarantee.
    """
    if method == "auto":
        if is_row_symmetric(channel, SYMMETRY_TOLERANCE) and _uniform_input_is_optimal(
            _live_columns(channel.matrix)
        ):
            return symmetric_capacity(channel)
        return arimoto_blahut(channel, tol=tol, max_iter=max_iter)
    if method == "symmetric":
        return symmetric_capacity(channel)
    if method == "arimoto_blahut":
        return arimoto_blahut(channel, tol=tol, max_iter=max_iter)
    raise ValueError(f"unknown capacity method {method!r}")


def capacity_upper_bound(channel: Channel) -> float:
    """log2 of the smaller alphabet; capacity can never exceed it."""
    return math.log2(min(channel.n_secrets, channel.n_observables))

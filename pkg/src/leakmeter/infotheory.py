"""Exact information-theoretic functionals over finite discrete distributions.

All quantities use base-2 logarithms and are reported in bits. Zero
probabilities follow the 0*log(0) = 0 continuity convention and are skipped,
never passed to log. Distributions whose mass is within 1e-9 of 1 are
renormalized on construction; anything further off is rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .traces import TraceSet

SUM_TOLERANCE = 1e-9


class InvalidDistributionError(ValueError):
    """Probability vector or matrix violates the distribution invariants."""


class AlphabetMismatchError(ValueError):
    """Two distributions that must share an alphabet do not."""


def _check_probs(probs: np.ndarray, what: str) -> np.ndarray:
    probs = np.asarray(probs, dtype=np.float64)
    if not np.all(np.isfinite(probs)):
        raise InvalidDistributionError(f"{what}: non-finite probabilities")
    if np.any(probs < 0):
        raise InvalidDistributionError(f"{what}: negative probabilities")
    total = float(probs.sum())
    if abs(total - 1.0) > SUM_TOLERANCE:
        raise InvalidDistributionError(
            f"{what}: probabilities sum to {total!r}, not 1 within {SUM_TOLERANCE}"
        )
    probs = probs / total
    probs.flags.writeable = False
    return probs


@dataclass(frozen=True)
class DiscreteDistribution:
    """Probability vector over a finite, ordered categorical alphabet."""

    alphabet: tuple
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        probs = _check_probs(self.probs, "distribution")
        if probs.ndim != 1 or len(self.alphabet) != probs.shape[0]:
            raise InvalidDistributionError("alphabet and probs lengths differ")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise InvalidDistributionError("alphabet labels are not unique")
        object.__setattr__(self, "probs", probs)

    def __len__(self) -> int:
        return len(self.alphabet)

    def prob(self, label) -> float:
        return float(self.probs[self.alphabet.index(label)])

    @classmethod
    def uniform(cls, alphabet: Sequence) -> "DiscreteDistribution":
        n = len(alphabet)
        return cls(tuple(alphabet), np.full(n, 1.0 / n))

    @classmethod
    def point_mass(cls, alphabet: Sequence, label) -> "DiscreteDistribution":
        probs = np.zeros(len(alphabet))
        probs[list(alphabet).index(label)] = 1.0
        return cls(tuple(alphabet), probs)


@dataclass(frozen=True)
class JointDistribution:
    """Joint probability matrix; rows and columns are two categorical variables."""

    row_alphabet: tuple
    col_alphabet: tuple
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "row_alphabet", tuple(self.row_alphabet))
        object.__setattr__(self, "col_alphabet", tuple(self.col_alphabet))
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 2 or probs.shape != (
            len(self.row_alphabet),
            len(self.col_alphabet),
        ):
            raise InvalidDistributionError("joint matrix shape mismatch")
        flat = _check_probs(probs.reshape(-1), "joint distribution")
        probs = flat.reshape(probs.shape)
        probs.flags.writeable = False
        if len(set(self.row_alphabet)) != len(self.row_alphabet):
            raise InvalidDistributionError("row labels are not unique")
        if len(set(self.col_alphabet)) != len(self.col_alphabet):
            raise InvalidDistributionError("column labels are not unique")
        object.__setattr__(self, "probs", probs)

    def row_marginal(self) -> DiscreteDistribution:
        return DiscreteDistribution(self.row_alphabet, self.probs.sum(axis=1))

    def col_marginal(self) -> DiscreteDistribution:
        return DiscreteDistribution(self.col_alphabet, self.probs.sum(axis=0))

    def transpose(self) -> "JointDistribution":
        return JointDistribution(self.col_alphabet, self.row_alphabet, self.probs.T)


def entropy_of_probs(probs: np.ndarray) -> float:
    """H(p) in bits for a bare probability vector (zeros skipped)."""
    p = np.asarray(probs, dtype=np.float64).reshape(-1)
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum()) if nz.size else 0.0


def entropy(dist: DiscreteDistribution) -> float:
    """Shannon entropy H(X) in bits."""
    return max(0.0, entropy_of_probs(dist.probs))


def kl_divergence(p: DiscreteDistribution, q: DiscreteDistribution) -> float:
    """Relative entropy D(p||q) in bits.

    Returns math.inf when p puts mass where q has none; this is a reportable
    result, not an error, so parameter sweeps can record it.
    """
    if p.alphabet != q.alphabet:
        raise AlphabetMismatchError("kl_divergence requires identical alphabets")
    mask = p.probs > 0
    if np.any(q.probs[mask] == 0):
        return math.inf
    pm = p.probs[mask]
    qm = q.probs[mask]
    return max(0.0, float((pm * np.log2(pm / qm)).sum()))


def conditional_entropy(joint: JointDistribution) -> float:
    """H(X|Y) in bits, X on rows, Y on columns."""
    p = joint.probs
    p_col = p.sum(axis=0)
    mask = p > 0
    cond = p[mask] / np.broadcast_to(p_col, p.shape)[mask]
    return max(0.0, float(-(p[mask] * np.log2(cond)).sum()))


def mutual_information(joint: JointDistribution) -> float:
    """I(X;Y) in bits; symmetric in the two variables."""
    p = joint.probs
    outer = np.outer(p.sum(axis=1), p.sum(axis=0))
    mask = p > 0
    return max(0.0, float((p[mask] * np.log2(p[mask] / outer[mask])).sum()))


def encode_columns(traces: TraceSet, var_names: Sequence[str]):
    """Integer-code the joint values of the named variables.

    Returns (codes, levels): codes is an int64 array with one combined code
    per record, levels the per-variable sorted value alphabets. The combined
    code enumerates the full cartesian product of the levels in row-major
    order (last variable fastest).
    """
    if not var_names:
        raise ValueError("need at least one variable name")
    codes = None
    levels = []
    for name in var_names:
        values, inverse = np.unique(traces.column(name), return_inverse=True)
        levels.append(tuple(values.tolist()))
        codes = inverse if codes is None else codes * len(values) + inverse
    return codes.astype(np.int64), levels


def _labels_for_codes(codes: np.ndarray, levels) -> list:
    """Map combined codes back to labels: scalars for one variable, tuples else."""
    sizes = [len(lv) for lv in levels]
    labels = []
    for code in codes.tolist():
        parts = []
        for size, level in zip(reversed(sizes), reversed(levels)):
            parts.append(level[code % size])
            code //= size
        parts.reverse()
        labels.append(parts[0] if len(levels) == 1 else tuple(parts))
    return labels


def empirical_distribution(
    traces: TraceSet, var_names: Sequence[str]
) -> DiscreteDistribution:
    """Frequency distribution of the joint values of the named variables.

    The alphabet contains exactly the value combinations observed in the
    trace set (single variable: the bare values; several: value tuples),
    in sorted order.
    """
    if traces.n_records < 1:
        raise ValueError("empty trace set")
    codes, levels = encode_columns(traces, var_names)
    observed, counts = np.unique(codes, return_counts=True)
    labels = _labels_for_codes(observed, levels)
    return DiscreteDistribution(tuple(labels), counts / counts.sum())


def empirical_joint(
    traces: TraceSet, row_vars: Sequence[str], col_vars: Sequence[str]
) -> JointDistribution:
    """Empirical joint of two (possibly compound) variables from a trace set.

    Row/column alphabets are restricted to observed combinations, so all-zero
    rows and columns never occur.
    """
    if traces.n_records < 1:
        raise ValueError("empty trace set")
    row_codes, row_levels = encode_columns(traces, row_vars)
    col_codes, col_levels = encode_columns(traces, col_vars)
    row_obs, row_inv = np.unique(row_codes, return_inverse=True)
    col_obs, col_inv = np.unique(col_codes, return_inverse=True)
    counts = np.bincount(
        row_inv * col_obs.size + col_inv, minlength=row_obs.size * col_obs.size
    ).reshape(row_obs.size, col_obs.size)
    row_labels = _labels_for_codes(row_obs, row_levels)
    col_labels = _labels_for_codes(col_obs, col_levels)
    return JointDistribution(
        tuple(row_labels), tuple(col_labels), counts / counts.sum()
    )

"""Reference black-box implementations of the two case-study protocols.

Both simulators are pure functions of their config (including the seed):
equal configs give byte-identical trace sets, on either kernel backend.

Dining cryptographers: k participants in a ring each toss a coin with
P(heads) = bias and compare it with the coin of their left neighbour
(participant (i+1) mod k). Exactly one participant pays per round (the
secret, drawn uniformly). A participant announces 1 when "coins match" and
"I paid" agree in parity; equivalently announcement i is
pay_bit(i) XOR coin(i) XOR coin(i+1 mod k). The XOR of all announcements is
therefore 1 in every record.

Crowds: honest members route a message, each holder forwarding with
probability pf to a uniformly chosen member (self allowed) and delivering
otherwise; the initiator's first hop is always a forward. Corrupt members
absorb the message and record the honest member that sent it to them. Only
runs seen by a corrupt member are emitted (rejection sampling), so the
traces are conditioned on detection.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import _kernels
from .traces import TraceSet

MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class DcConfig:
    """Dining-cryptographers run: ring size, coin bias, sample count, seed."""

    k: int
    bias: float
    samples: int
    seed: int = 0

    def __post_init__(self):
        if self.k < 3:
            raise ValueError("k must be at least 3")
        if not 0.0 <= self.bias <= 1.0:
            raise ValueError("bias must lie in [0, 1]")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")


@dataclass(frozen=True)
class CrowdsConfig:
    """Crowds run: honest/corrupt member counts, forwarding probability, seed."""

    honest: int
    corrupt: int
    pf: float
    samples: int
    seed: int = 0

    def __post_init__(self):
        if self.honest < 2:
            raise ValueError("honest must be at least 2")
        if self.corrupt < 1:
            raise ValueError("corrupt must be at least 1")
        if not 0.0 <= self.pf <= 1.0:
            raise ValueError("pf must lie in [0, 1]")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")


def simulate_dc(cfg: DcConfig) -> TraceSet:
    """Trace set with secret `payer` and observables `a0` .. `a{k-1}`."""
    payer, ann = _kernels.dc_kernel(
        cfg.k, cfg.bias, cfg.samples, cfg.seed & MASK64
    )
    columns = {"payer": payer.astype(str)}
    for j in range(cfg.k):
        columns[f"a{j}"] = ann[:, j].astype(str)
    return TraceSet(
        ("payer",), tuple(f"a{j}" for j in range(cfg.k)), columns
    )


def simulate_crowds(cfg: CrowdsConfig) -> TraceSet:
    """Trace set with secret `initiator` and observable `detected`.

    Every emitted record was observed by a corrupt member; `detected` is the
    honest predecessor it recorded. Detection has probability at least
    corrupt/(honest+corrupt) per attempt (the first hop may be corrupt), so
    rejection sampling terminates; a generous attempt cap guards against
    misuse.
    """
    m = cfg.honest + cfg.corrupt
    max_attempts = cfg.samples * 50 * m // cfg.corrupt + 1_000_000
    initiator, detected = _kernels.crowds_kernel(
        cfg.honest, cfg.corrupt, cfg.pf, cfg.samples, cfg.seed & MASK64, max_attempts
    )
    columns = {
        "initiator": initiator.astype(str),
        "detected": detected.astype(str),
    }
    return TraceSet(("initiator",), ("detected",), columns)


def kernel_backend() -> str:
    """Which simulation backend is active: "compiled" or "pure-python"."""
    return _kernels.BACKEND

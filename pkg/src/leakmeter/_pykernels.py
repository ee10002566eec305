"""Pure-Python simulation kernels, the fallback when the compiled core is absent.

Draw-for-draw identical to leakmeter._speedups: same PRNG (splitmix64), same
draw order per record, so both backends emit byte-identical traces for equal
configurations. Any change here must be mirrored in _speedups.pyx.
"""

import numpy as np

from ._rng import SplitMix64


def dc_kernel(k, bias, samples, seed):
    """Simulate `samples` dining-cryptographers rounds.

    Per record: one payer index drawn uniformly from [0, k), then k coin
    tosses with P(heads) = bias in ring order. Announcement j is the payer
    bit of cryptographer j XORed with the mismatch of coins j and (j+1) % k.

    Returns (payer int64[samples], announcements uint8[samples, k]).
    """
    rng = SplitMix64(seed)
    payer = np.empty(samples, dtype=np.int64)
    ann = bytearray(samples * k)
    coins = [0] * k
    for i in range(samples):
        p = rng.below(k)
        for j in range(k):
            coins[j] = 1 if rng.unit() < bias else 0
        base = i * k
        for j in range(k):
            ann[base + j] = (1 if j == p else 0) ^ coins[j] ^ coins[(j + 1) % k]
        payer[i] = p
    ann_arr = np.frombuffer(bytes(ann), dtype=np.uint8).reshape(samples, k)
    return payer, ann_arr


def crowds_kernel(honest, corrupt, pf, samples, seed, max_attempts):
    """Simulate crowds runs, keeping only runs observed by a corrupt member.

    Members 0..honest-1 are honest, honest..honest+corrupt-1 corrupt. Per
    attempt: initiator drawn uniformly from the honest members, first hop
    uniform over all members (self allowed, never a delivery). Honest holders
    forward with probability pf to a uniform member, otherwise deliver.
    A corrupt recipient absorbs the message and records its predecessor; runs
    that reach delivery are rejected and redrawn from scratch.

    Returns (initiator int64[samples], detected int64[samples]); both hold
    honest member indices.
    """
    rng = SplitMix64(seed)
    m = honest + corrupt
    initiator = np.empty(samples, dtype=np.int64)
    detected = np.empty(samples, dtype=np.int64)
    accepted = 0
    attempts = 0
    while accepted < samples:
        attempts += 1
        if attempts > max_attempts:
            raise RuntimeError(
                f"crowds simulation exceeded {max_attempts} attempts "
                f"for {samples} accepted runs"
            )
        s = rng.below(honest)
        hop = rng.below(m)
        if hop >= honest:
            initiator[accepted] = s
            detected[accepted] = s
            accepted += 1
            continue
        holder = hop
        while True:
            if rng.unit() < pf:
                nxt = rng.below(m)
                if nxt >= honest:
                    initiator[accepted] = s
                    detected[accepted] = holder
                    accepted += 1
                    break
                holder = nxt
            else:
                break  # delivered without meeting a corrupt member: reject
    return initiator, detected

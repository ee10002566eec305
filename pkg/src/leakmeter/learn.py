"""Black-box learning of the secret-to-observable dependency model.

Pipeline: ``learn_structure`` finds, for each observable variable, the
smallest set of secret variables that accounts for all of its mutual
information with the secrets; ``fit_cpts`` estimates the conditional
probability tables by frequency counts (maximum likelihood, optional add-α
smoothing); ``model_to_channel`` multiplies per-cluster factors into an
end-to-end channel; ``estimate_capacity`` chains everything and solves for
capacity.

Channel assembly treats observables with disjoint parent sets as
conditionally independent given the secrets and multiplies their factors.
Observables whose parent sets overlap are grouped into one cluster and
their joint conditional table is estimated directly from the traces:
a shared parent frequently comes with shared protocol randomness (ring
protocols are the canonical case), and the per-variable product can then
misstate the joint rows badly even at infinite sample size.

Structure search visits candidate parent subsets by growing size k = 1..d
and, within one size, in lexicographic order over the declared secret-variable
order; the first satisfying subset wins, which makes the result deterministic.
A subset S_c of secrets resolves observable O when

    |M(S_c, O) - M(S_all, O)| <= tol * max(H(O), 1)

i.e. the candidate parents carry as much information about O as the full
secret tuple does. For observables that are deterministic functions of their
parents this coincides with the classic M(S_c, O) = H(O) test (then
M(S_all, O) = H(O)); unlike the classic test it also resolves observables
that keep private randomness, where M(S_all, O) < H(O) strictly. Constant
observables (H(O) = 0) degenerate to the first singleton subset.
"""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .channel import Channel, CapacityResult, capacity as solve_capacity
from .infotheory import (
    empirical_distribution,
    empirical_joint,
    entropy,
    mutual_information,
)
from .traces import TraceSet, read_traces, write_traces  # noqa: F401  (re-export)

log = logging.getLogger(__name__)

DEFAULT_STRUCT_TOL = 0.01


class StructureLearningError(RuntimeError):
    """No candidate parent set resolved some observables within max_degree."""

    def __init__(self, message: str, unresolved, diagnostics):
        super().__init__(message)
        self.unresolved = list(unresolved)
        self.diagnostics = diagnostics


@dataclass
class DependencyModel:
    """Learned bipartite dependency structure plus conditional tables.

    edges: observable variable -> tuple of parent secret variables.
    cpts: observable variable -> {parent value tuple: probability vector
          over the observable's alphabet}. Parent tuples follow the order
          of ``edges[obs]``; vectors follow ``alphabets[obs]``.
    alphabets: variable -> tuple of observed values, sorted.
    """

    edges: dict
    cpts: dict
    alphabets: dict

    def __post_init__(self):
        for obs, parents in self.edges.items():
            if not parents:
                raise ValueError(f"observable {obs!r} has no parents")
            for row in self.cpts[obs].values():
                if abs(float(np.sum(row)) - 1.0) > 1e-9:
                    raise ValueError(f"CPT row for {obs!r} does not sum to 1")


def learn_structure(
    traces: TraceSet,
    max_degree: int | None = None,
    tol: float = DEFAULT_STRUCT_TOL,
) -> dict:
    """Find parent secret sets for every observable variable.

    Returns {observable: tuple of parent secrets}. Raises
    StructureLearningError listing the unresolved observables (with the best
    candidate each achieved) if some observable cannot be resolved by any
    subset of size up to max_degree (default: all secret variables).
    """
    if traces.n_records < 1:
        raise ValueError("empty trace set")
    secrets = traces.secret_vars
    if max_degree is None:
        max_degree = len(secrets)
    if max_degree < 1:
        raise ValueError("max_degree must be at least 1")
    max_degree = min(max_degree, len(secrets))

    h_obs = {o: entropy(empirical_distribution(traces, [o])) for o in traces.observable_vars}
    m_full = {
        o: mutual_information(empirical_joint(traces, secrets, [o]))
        for o in traces.observable_vars
    }

    edges: dict = {}
    unresolved = list(traces.observable_vars)
    best = {o: (0.0, ()) for o in unresolved}
    for k in range(1, max_degree + 1):
        still = []
        for obs in unresolved:
            threshold = tol * max(h_obs[obs], 1.0)
            found = None
            for combo in itertools.combinations(range(len(secrets)), k):
                subset = tuple(secrets[i] for i in combo)
                m_sub = mutual_information(empirical_joint(traces, subset, [obs]))
                if m_sub > best[obs][0]:
                    best[obs] = (m_sub, subset)
                if abs(m_sub - m_full[obs]) <= threshold:
                    found = subset
                    break
            if found is None:
                still.append(obs)
            else:
                edges[obs] = found
                log.debug("resolved %s with parents %s at degree %d", obs, found, k)
        unresolved = still
        if not unresolved:
            break

    if unresolved:
        diagnostics = {
            o: {
                "entropy": h_obs[o],
                "mi_full": m_full[o],
                "best_mi": best[o][0],
                "best_subset": best[o][1],
            }
            for o in unresolved
        }
        lines = ", ".join(
            f"{o} (best M={d['best_mi']:.4g} of {d['mi_full']:.4g} "
            f"with {list(d['best_subset'])}, H={d['entropy']:.4g})"
            for o, d in diagnostics.items()
        )
        raise StructureLearningError(
            f"unresolved observables at max_degree={max_degree}: {lines}; "
            "raise max_degree or tol",
            unresolved,
            diagnostics,
        )
    return {o: edges[o] for o in traces.observable_vars}


def fit_cpts(traces: TraceSet, edges: Mapping[str, Sequence[str]], alpha: float = 0.0) -> DependencyModel:
    """Estimate conditional probability tables by frequency counts.

    With alpha > 0 every count gets an add-alpha prior; with the default
    alpha = 0 each table entry is a pure ratio of integer counts. Parent
    value combinations never observed in the traces get a uniform row.
    """
    if traces.n_records < 1:
        raise ValueError("empty trace set")
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    known = set(traces.variables)
    for obs, parents in edges.items():
        if obs not in traces.observable_vars:
            raise ValueError(f"edge map names unknown observable {obs!r}")
        bad = [p for p in parents if p not in traces.secret_vars]
        if bad:
            raise ValueError(f"edge map for {obs!r} names unknown secrets {bad}")
    missing = [o for o in traces.observable_vars if o not in edges]
    if missing:
        raise ValueError(f"edge map does not cover observables {missing}")

    alphabets = {
        name: tuple(np.unique(traces.column(name)).tolist()) for name in known
    }
    secret_order = {name: i for i, name in enumerate(traces.secret_vars)}

    cpts: dict = {}
    norm_edges: dict = {}
    for obs in traces.observable_vars:
        parents = tuple(sorted(edges[obs], key=secret_order.__getitem__))
        norm_edges[obs] = parents
        parent_levels = [alphabets[p] for p in parents]
        child_levels = alphabets[obs]
        n_child = len(child_levels)

        parent_codes = np.zeros(traces.n_records, dtype=np.int64)
        for p in parents:
            values, inverse = np.unique(traces.column(p), return_inverse=True)
            parent_codes = parent_codes * len(values) + inverse
        child_values, child_codes = np.unique(traces.column(obs), return_inverse=True)
        n_parent_combos = int(np.prod([len(lv) for lv in parent_levels]))
        counts = np.bincount(
            parent_codes * n_child + child_codes,
            minlength=n_parent_combos * n_child,
        ).reshape(n_parent_combos, n_child).astype(np.float64)

        table = {}
        for idx, combo in enumerate(itertools.product(*parent_levels)):
            row = counts[idx] + alpha
            total = row.sum()
            if total == 0:
                row = np.full(n_child, 1.0 / n_child)
            else:
                row = row / total
            table[combo] = row
        cpts[obs] = table
    return DependencyModel(edges=norm_edges, cpts=cpts, alphabets=alphabets)


def _observed_combos(traces: TraceSet, var_names: Sequence[str]):
    """Sorted observed joint assignments as a list of value tuples."""
    dist = empirical_distribution(traces, var_names)
    if len(var_names) == 1:
        return [(label,) for label in dist.alphabet], list(dist.alphabet)
    return [tuple(label) for label in dist.alphabet], list(dist.alphabet)


def parent_clusters(edges: Mapping[str, Sequence[str]]) -> list:
    """Group observables whose parent sets overlap (transitively).

    Returns a list of (observable tuple, parent tuple) pairs; observable
    order inside a cluster follows the edge-map order, parents are sorted
    by name. Disjoint clusters are treated as conditionally independent
    given the secrets when the channel is assembled; members of one cluster
    are not.
    """
    names = list(edges)
    leader = {o: o for o in names}

    def find(o):
        while leader[o] != o:
            leader[o] = leader[leader[o]]
            o = leader[o]
        return o

    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            if set(edges[a]) & set(edges[b]) and find(a) != find(b):
                leader[find(b)] = find(a)
    groups: dict = {}
    for o in names:
        groups.setdefault(find(o), []).append(o)
    clusters = []
    for members in groups.values():
        parents = sorted({p for o in members for p in edges[o]})
        clusters.append((tuple(members), tuple(parents)))
    return clusters


def _cluster_factor(
    traces: TraceSet, member_vars, parent_vars, alpha: float
) -> tuple:
    """Empirical p(member tuple | parent tuple) over observed combinations.

    Returns (factor, column labels): factor maps each observed parent value
    tuple to a probability vector over the observed member value tuples.
    """
    joint = empirical_joint(traces, list(parent_vars), list(member_vars))
    counts = joint.probs * traces.n_records + alpha
    rows = counts / counts.sum(axis=1, keepdims=True)
    row_labels = (
        [(l,) for l in joint.row_alphabet]
        if len(parent_vars) == 1
        else list(joint.row_alphabet)
    )
    col_labels = (
        [(l,) for l in joint.col_alphabet]
        if len(member_vars) == 1
        else list(joint.col_alphabet)
    )
    factor = {label: rows[i] for i, label in enumerate(row_labels)}
    return factor, col_labels


def model_to_channel(model: DependencyModel, traces: TraceSet) -> Channel:
    """Assemble the end-to-end channel from the learned structure.

    Rows are the secret-variable assignments observed in the traces, columns
    the observed observable assignments; the entry is the product of one
    factor per parent cluster. Singleton clusters use the model's CPT
    directly, so with a single observable the channel matrix *is* the CPT,
    and observables with disjoint parents multiply exactly. Clusters with
    several observables use the jointly estimated conditional from the
    traces. Rows are renormalized because the cross-cluster product can put
    mass on observable combinations outside the observed columns.
    """
    for obs in model.edges:
        if obs not in traces.observable_vars:
            raise ValueError(f"model names unknown observable {obs!r}")
        for p in model.edges[obs]:
            if p not in traces.secret_vars:
                raise ValueError(f"model names unknown secret {p!r}")
    missing = [o for o in traces.observable_vars if o not in model.edges]
    if missing:
        raise ValueError(f"model does not cover observables {missing}")

    secret_combos, secret_labels = _observed_combos(traces, traces.secret_vars)
    obs_combos, obs_labels = _observed_combos(traces, traces.observable_vars)
    secret_index = {name: i for i, name in enumerate(traces.secret_vars)}
    obs_index = {name: i for i, name in enumerate(traces.observable_vars)}

    factors = []
    for members, parents in parent_clusters(model.edges):
        if len(members) == 1:
            obs = members[0]
            cpt_parents = model.edges[obs]
            table = {
                combo: row for combo, row in model.cpts[obs].items()
            }
            col_pos = {
                (value,): i for i, value in enumerate(model.alphabets[obs])
            }
            factors.append((members, cpt_parents, table, col_pos))
        else:
            table, col_labels = _cluster_factor(traces, members, parents, 0.0)
            col_pos = {label: i for i, label in enumerate(col_labels)}
            factors.append((members, parents, table, col_pos))

    matrix = np.empty((len(secret_combos), len(obs_combos)))
    for r, s_combo in enumerate(secret_combos):
        for c, o_combo in enumerate(obs_combos):
            prob = 1.0
            for members, parents, table, col_pos in factors:
                pa_values = tuple(s_combo[secret_index[p]] for p in parents)
                member_values = tuple(o_combo[obs_index[o]] for o in members)
                row = table.get(pa_values)
                if row is None:  # parent combination never observed
                    prob *= 1.0 / len(col_pos)
                    continue
                pos = col_pos.get(member_values)
                prob *= row[pos] if pos is not None else 0.0
            matrix[r, c] = prob
    row_sums = matrix.sum(axis=1)
    if np.any(row_sums <= 0):
        raise ValueError("factorized model assigns zero mass to some secret row")
    matrix /= row_sums[:, None]
    return Channel(tuple(secret_labels), tuple(obs_labels), matrix)


def empirical_channel(traces: TraceSet) -> Channel:
    """Direct frequency estimate of p(observables | secrets), no factorization."""
    joint = empirical_joint(
        traces, traces.secret_vars, traces.observable_vars
    )
    rows = joint.probs / joint.probs.sum(axis=1, keepdims=True)
    return Channel(joint.row_alphabet, joint.col_alphabet, rows)


@dataclass(frozen=True)
class EstimationResult:
    """End-to-end estimate: capacity plus the intermediates for inspection."""

    capacity: CapacityResult
    model: DependencyModel = field(repr=False)
    channel: Channel = field(repr=False)


def estimate_capacity(
    traces: TraceSet,
    max_degree: int | None = None,
    struct_tol: float = DEFAULT_STRUCT_TOL,
    ab_tol: float = 1e-9,
    max_iter: int = 10000,
    alpha: float = 0.0,
    method: str = "auto",
) -> EstimationResult:
    """learn_structure -> fit_cpts -> model_to_channel -> capacity."""
    edges = learn_structure(traces, max_degree=max_degree, tol=struct_tol)
    model = fit_cpts(traces, edges, alpha=alpha)
    chan = model_to_channel(model, traces)
    result = solve_capacity(chan, method=method, tol=ab_tol, max_iter=max_iter)
    return EstimationResult(capacity=result, model=model, channel=chan)


def model_to_dict(model: DependencyModel) -> dict:
    """JSON form: {"edges": ..., "cpts": ..., "alphabets": ...}.

    CPT keys are JSON-encoded lists of the parent values (value tokens may
    contain any character, so a separator-joined key would be ambiguous).
    """
    return {
        "edges": {obs: list(parents) for obs, parents in model.edges.items()},
        "cpts": {
            obs: {
                json.dumps(list(combo)): [float(x) for x in row]
                for combo, row in table.items()
            }
            for obs, table in model.cpts.items()
        },
        "alphabets": {name: list(values) for name, values in model.alphabets.items()},
    }


def model_from_dict(data: dict) -> DependencyModel:
    try:
        edges = {obs: tuple(parents) for obs, parents in data["edges"].items()}
        cpts = {
            obs: {
                tuple(json.loads(key)): np.asarray(row, dtype=np.float64)
                for key, row in table.items()
            }
            for obs, table in data["cpts"].items()
        }
        alphabets = {
            name: tuple(values) for name, values in data["alphabets"].items()
        }
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ValueError(f"malformed model JSON: {exc}") from exc
    return DependencyModel(edges=edges, cpts=cpts, alphabets=alphabets)


def save_model(model: DependencyModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2)
        fh.write("\n")


def load_model(path) -> DependencyModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))


def model_closure_channel(model: DependencyModel) -> Channel:
    """Channel over the full cartesian products of the model's alphabets.

    Used when only a serialized model is available (no trace set): secrets
    are the union of all parent variables, observables the CPT children.
    Unlike ``model_to_channel`` this cannot restrict rows and columns to
    trace-observed combinations.
    """
    secret_vars = sorted({p for parents in model.edges.values() for p in parents})
    obs_vars = list(model.edges.keys())
    secret_levels = [model.alphabets[v] for v in secret_vars]
    obs_levels = [model.alphabets[v] for v in obs_vars]
    secret_combos = list(itertools.product(*secret_levels))
    obs_combos = list(itertools.product(*obs_levels))
    secret_index = {name: i for i, name in enumerate(secret_vars)}
    child_pos = {
        obs: {value: i for i, value in enumerate(model.alphabets[obs])}
        for obs in obs_vars
    }
    matrix = np.empty((len(secret_combos), len(obs_combos)))
    for r, s_combo in enumerate(secret_combos):
        for c, o_combo in enumerate(obs_combos):
            prob = 1.0
            for j, obs in enumerate(obs_vars):
                pa_values = tuple(s_combo[secret_index[p]] for p in model.edges[obs])
                prob *= model.cpts[obs][pa_values][child_pos[obs][o_combo[j]]]
            matrix[r, c] = prob
    secret_labels = [c[0] if len(secret_vars) == 1 else c for c in secret_combos]
    obs_labels = [c[0] if len(obs_vars) == 1 else c for c in obs_combos]
    return Channel(tuple(secret_labels), tuple(obs_labels), matrix)

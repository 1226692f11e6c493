"""Seeded random instance generators for the search harness and test corpora.

Instances are plain dicts of primitives so they can be fingerprinted,
serialised into findings, and shrunk; builders turn them back into live
objects. Metric spaces use log-uniform distances repaired to satisfy the
triangle inequality by shortest paths, which keeps them honest metrics while
staying small enough for brute-force oracles.
"""

from __future__ import annotations

import math

import numpy as np

from .core import NormedSpaceInstance, custom_space, euclidean_space, p_norm_space
from .delta import (
    DeltaNormSpec,
    DeltaNormedSpace,
    FiniteMetricSpace,
    FunctionTable,
    make_holder_spec,
    make_lip0_spec,
)
from .membership import ORDER_GE, ORDER_LE, SpacePair
from .projection import KIND_SUBSPACE, SubsetSpec


def _shortest_path_repair(d: np.ndarray) -> np.ndarray:
    n = d.shape[0]
    out = d.copy()
    for k in range(n):
        out = np.minimum(out, out[:, [k]] + out[[k], :])
    return out


def random_metric_matrix(rng, n_points: int) -> np.ndarray:
    d = np.exp(rng.uniform(math.log(0.5), math.log(3.0), size=(n_points, n_points)))
    d = (d + d.T) / 2.0
    np.fill_diagonal(d, 0.0)
    return _shortest_path_repair(d)


def _target_space(p, dim: int) -> NormedSpaceInstance:
    p = math.inf if p in ("inf", math.inf) else float(p)
    return euclidean_space(dim) if p == 2 else p_norm_space(dim, p)


# ---------------------------------------------------------------------------
# Family "delta": X over a pair sub-domain inside Y over all ordered pairs
# ---------------------------------------------------------------------------

def generate_delta_instance(rng, drop_prob: float = 0.25,
                            holder_prob: float = 0.4) -> dict:
    n = int(rng.integers(3, 6))
    dist = random_metric_matrix(rng, n)
    target_dim = int(rng.integers(1, 4))
    target_p = [1, 2, math.inf][int(rng.integers(3))]
    use_holder = rng.random() < holder_prob
    beta = float(rng.choice([0.5, 1.0, 2.0])) if use_holder else 1.0
    values = rng.standard_normal((n, target_dim)) * 2.0
    values[0] = 0.0
    unordered = [(i, j) for i in range(n) for j in range(i + 1, n)]
    dropped = [list(p) for p in unordered if rng.random() < drop_prob]
    if len(dropped) == len(unordered):
        dropped = dropped[:-1]  # keep the X pair domain nonempty
    return {
        "family": "delta",
        "kind": "holder" if use_holder else "lip0",
        "beta": beta,
        "dist": dist.tolist(),
        "target_p": "inf" if target_p == math.inf else target_p,
        "target_dim": target_dim,
        "values": values.tolist(),
        "dropped": dropped,
    }


def build_delta_instance(inst: dict):
    """Returns (pair, f): the SpacePair X inside Y and the table element."""
    dist = np.asarray(inst["dist"], dtype=float)
    n = dist.shape[0]
    s1 = FiniteMetricSpace(points=tuple(range(n)), dist=dist, base_point=0)
    s2 = _target_space(inst["target_p"], inst["target_dim"])
    if inst["kind"] == "holder":
        spec_full = make_holder_spec(s1, s2, inst["beta"])
    else:
        spec_full = make_lip0_spec(s1, s2)
    dropped = {tuple(p) for p in inst["dropped"]}
    sub_pairs = [p for p in spec_full.pair_domain
                 if (min(p), max(p)) not in dropped]
    spec_sub = spec_full.restrict(sub_pairs)
    x_space = DeltaNormedSpace(s1, s2, spec_sub, label="X", validate_samples=0)
    y_space = DeltaNormedSpace(s1, s2, spec_full, label="Y", validate_samples=0)
    pair = SpacePair(x_space, y_space, order_flag=ORDER_LE)
    f = FunctionTable(s1, s2, np.asarray(inst["values"], dtype=float))
    return pair, f


def delta_shrink_candidates(inst: dict):
    """Smaller variants: fewer points, zeroed values, rounded numbers."""
    dist = np.asarray(inst["dist"], dtype=float)
    values = np.asarray(inst["values"], dtype=float)
    n = dist.shape[0]

    def restrict(keep):
        keep = sorted(keep)
        pos = {old: new for new, old in enumerate(keep)}
        dropped = [[pos[a], pos[b]] for a, b in inst["dropped"]
                   if a in pos and b in pos]
        out = dict(inst)
        out["dist"] = dist[np.ix_(keep, keep)].tolist()
        out["values"] = values[keep].tolist()
        out["dropped"] = dropped
        return out

    if n > 2:
        half = max(2, (n + 1) // 2)
        yield restrict(range(half))
        yield restrict([0] + list(range(n - half + 1, n)))
        for drop in range(1, n):
            yield restrict([i for i in range(n) if i != drop])
    for i in range(1, n):
        for j in range(values.shape[1]):
            if values[i, j] != 0.0:
                out = dict(inst)
                v = values.copy()
                v[i, j] = 0.0
                out["values"] = v.tolist()
                yield out
    rounded_dist = np.round(dist, 1)
    rounded_vals = np.round(values, 1)
    if not (np.array_equal(rounded_dist, dist) and np.array_equal(rounded_vals, values)):
        off = rounded_dist[~np.eye(n, dtype=bool)]
        if off.size == 0 or np.min(off) > 0.05:
            out = dict(inst)
            out["dist"] = _shortest_path_repair(rounded_dist).tolist()
            out["values"] = rounded_vals.tolist()
            yield out


# ---------------------------------------------------------------------------
# Family "scaled": coordinate subspace with a scaled norm inside R^n
# ---------------------------------------------------------------------------

def generate_scaled_instance(rng, scales=(0.25, 0.5, 0.75, 1.0)) -> dict:
    n = int(rng.integers(2, 6))
    k = int(rng.integers(1, n + 1))
    p = [1, 2, math.inf][int(rng.integers(3))]
    c = float(rng.choice(np.asarray(scales)))
    coeffs = np.round(rng.standard_normal(k) * 2.0, 6)
    if not np.any(coeffs):
        coeffs[0] = 1.0
    return {
        "family": "scaled",
        "dim": n,
        "k": k,
        "p": "inf" if p == math.inf else p,
        "c": c,
        "coeffs": coeffs.tolist(),
    }


def build_scaled_instance(inst: dict):
    n, k, c = inst["dim"], inst["k"], inst["c"]
    y_space = _target_space(inst["p"], n)
    embed = np.zeros((n, k))
    embed[:k, :k] = np.eye(k)

    def x_norm(u, _c=c, _e=embed, _y=y_space):
        return _c * float(_y.norm(_e @ np.asarray(u, dtype=float)))

    x_space = custom_space(k, x_norm, label=f"scaled({c})")
    order = ORDER_LE if c <= 1 else ORDER_GE
    pair = SpacePair(x_space, y_space, embed=embed, order_flag=order)
    return pair, np.asarray(inst["coeffs"], dtype=float)


def scaled_shrink_candidates(inst: dict):
    n, k = inst["dim"], inst["k"]
    coeffs = np.asarray(inst["coeffs"], dtype=float)
    if n > 1:
        half = max(1, n // 2)
        out = dict(inst)
        out["dim"] = half
        out["k"] = min(k, half)
        out["coeffs"] = coeffs[:min(k, half)].tolist()
        yield out
    for i in range(k):
        if coeffs[i] != 0.0:
            v = coeffs.copy()
            v[i] = 0.0
            if np.any(v):
                out = dict(inst)
                out["coeffs"] = v.tolist()
                yield out
    rounded = np.round(coeffs, 1)
    rc = round(inst["c"], 1)
    if not np.array_equal(rounded, coeffs) or rc != inst["c"]:
        if np.any(rounded) and 0.0 < rc:
            out = dict(inst)
            out["coeffs"] = rounded.tolist()
            out["c"] = rc
            yield out


# ---------------------------------------------------------------------------
# Family "renorm_source": subspace sources for the renorming pipeline
# ---------------------------------------------------------------------------

def generate_renorm_source(rng) -> dict:
    n = int(rng.integers(2, 5))
    k = int(rng.integers(1, n + 1))
    basis = rng.standard_normal((k, n))
    while np.linalg.matrix_rank(basis) < k:
        basis = rng.standard_normal((k, n))
    own_kind = "scaled" if rng.random() < 0.5 else "weighted_l1"
    own = {"kind": own_kind}
    if own_kind == "scaled":
        own["c"] = float(np.round(rng.uniform(0.5, 2.0), 3))
    else:
        own["weights"] = np.round(rng.uniform(0.5, 2.0, size=k), 3).tolist()
    return {
        "family": "renorm_source",
        "dim": n,
        "k": k,
        "basis": np.round(basis, 6).tolist(),
        "own": own,
    }


def build_renorm_source(inst: dict) -> SubsetSpec:
    basis = np.asarray(inst["basis"], dtype=float)
    ambient = euclidean_space(inst["dim"])
    own = inst["own"]
    if own["kind"] == "scaled":
        c = own["c"]
        own_norm = lambda v: c * float(np.linalg.norm(np.asarray(v, dtype=float)))
    else:
        w = np.asarray(own["weights"], dtype=float)
        pinv = np.linalg.pinv(basis.T)

        def own_norm(v, _w=w, _p=pinv):
            return float(np.sum(_w * np.abs(_p @ np.asarray(v, dtype=float))))

    return SubsetSpec(ambient=ambient, kind=KIND_SUBSPACE, basis=basis,
                      own_norm=own_norm, validate=False)


def renorm_shrink_candidates(inst: dict):
    basis = np.asarray(inst["basis"], dtype=float)
    n, k = inst["dim"], inst["k"]
    if k > 1:
        out = dict(inst)
        out["k"] = k - 1
        out["basis"] = basis[:k - 1].tolist()
        if inst["own"]["kind"] == "weighted_l1":
            out["own"] = {"kind": "weighted_l1",
                          "weights": inst["own"]["weights"][:k - 1]}
        yield out
    rounded = np.round(basis, 1)
    if not np.array_equal(rounded, basis) and np.linalg.matrix_rank(rounded) == k:
        out = dict(inst)
        out["basis"] = rounded.tolist()
        yield out


# ---------------------------------------------------------------------------
# Family "vector": plain vectors in a random normed space (norm identities)
# ---------------------------------------------------------------------------

def generate_vector_instance(rng) -> dict:
    n = int(rng.integers(1, 6))
    p = [1, 2, math.inf][int(rng.integers(3))]
    return {
        "family": "vector",
        "dim": n,
        "p": "inf" if p == math.inf else p,
        "u": np.round(rng.standard_normal(n) * 3.0, 6).tolist(),
        "v": np.round(rng.standard_normal(n) * 3.0, 6).tolist(),
    }


def build_vector_instance(inst: dict):
    space = _target_space(inst["p"], inst["dim"])
    return space, np.asarray(inst["u"], dtype=float), np.asarray(inst["v"], dtype=float)


def vector_shrink_candidates(inst: dict):
    n = inst["dim"]
    u = np.asarray(inst["u"], dtype=float)
    v = np.asarray(inst["v"], dtype=float)
    if n > 1:
        half = max(1, n // 2)
        out = dict(inst)
        out.update(dim=half, u=u[:half].tolist(), v=v[:half].tolist())
        yield out
    for name, arr in (("u", u), ("v", v)):
        for i in range(n):
            if arr[i] != 0.0:
                out = dict(inst)
                w = arr.copy()
                w[i] = 0.0
                out[name] = w.tolist()
                yield out
    ru, rv = np.round(u, 1), np.round(v, 1)
    if not (np.array_equal(ru, u) and np.array_equal(rv, v)):
        out = dict(inst)
        out.update(u=ru.tolist(), v=rv.tolist())
        yield out


def corpus_delta_instances(seed: int, count: int, drop_prob: float = 0.25) -> list:
    """A reproducible corpus of delta instances for batch property tests."""
    rng = np.random.default_rng(seed)
    return [generate_delta_instance(rng, drop_prob=drop_prob) for _ in range(count)]
